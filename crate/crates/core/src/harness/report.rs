//! Score reports (CSV / JSON) and plain-text result tables.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::{BenchmarkRow, CalibrationSummary, ScoreRecord};
use crate::calibration::RadiiVector;
use crate::error::{Error, Result};
use crate::harness::EvalSummary;
use crate::measures::{Measure, MeasureVector};

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 13] = [
    "path",
    "glcm_contrast",
    "glcm_energy",
    "ced",
    "vbm",
    "ms",
    "r1",
    "r2",
    "r3",
    "r4",
    "r5",
    "irs",
    "verdict",
];

/// Mean IRS values reported for four generators and real photos on the
/// generator benchmark. Reference only; not reproducible without that data.
pub const REFERENCE_MODEL_MEANS: [(&str, f64); 5] = [
    ("SDM", 2.29),
    ("Dalle2", 1.58),
    ("Midjourney", 2.03),
    ("BigGAN", 1.74),
    ("Real", 4.68),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` → JSON, anything else → CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

pub fn write_report<W: Write>(records: &[ScoreRecord], format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => write_csv(records, out),
        ReportFormat::Json => write_json(records, out),
    }
}

pub fn write_report_file(records: &[ScoreRecord], format: ReportFormat, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_report(records, format, &mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_csv<W: Write>(records: &[ScoreRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        let mut row = Vec::with_capacity(CSV_COLUMNS.len());
        row.push(r.path.clone());
        row.extend(r.measure_vector.to_array().iter().map(f64::to_string));
        row.extend(r.radii.values().iter().map(f64::to_string));
        row.push(r.irs.to_string());
        row.push(r.verdict.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<report>", e))
}

fn write_json<W: Write>(records: &[ScoreRecord], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n").map_err(|e| Error::io("<report>", e))
}

/// Parses a CSV report written by [`write_report`].
pub fn read_report_csv(data: &[u8]) -> Result<Vec<ScoreRecord>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(data);
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(Error::InvalidReport(format!(
            "unexpected CSV header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row?;
        if row.len() != CSV_COLUMNS.len() {
            return Err(Error::InvalidReport(format!(
                "row {} has {} fields",
                line + 1,
                row.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            row[i].parse::<f64>().map_err(|_| {
                Error::InvalidReport(format!(
                    "row {}: {} is not a number: {:?}",
                    line + 1,
                    CSV_COLUMNS[i],
                    &row[i]
                ))
            })
        };
        let measures = [num(1)?, num(2)?, num(3)?, num(4)?, num(5)?];
        let radii = [num(6)?, num(7)?, num(8)?, num(9)?, num(10)?];
        out.push(ScoreRecord {
            path: row[0].to_string(),
            truth: None,
            measure_vector: MeasureVector::from_array(measures),
            radii: RadiiVector(radii),
            irs: num(11)?,
            verdict: row[12].parse()?,
        });
    }
    Ok(out)
}

/// Parses a JSON report written by [`write_report`].
pub fn read_report_json(data: &[u8]) -> Result<Vec<ScoreRecord>> {
    Ok(serde_json::from_slice(data)?)
}

pub fn read_report_file(path: &Path) -> Result<Vec<ScoreRecord>> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    match ReportFormat::from_path(path) {
        ReportFormat::Json => read_report_json(&data),
        ReportFormat::Csv => read_report_csv(&data),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"))
}

/// Calibration means laid out as a before/after table with an IRS column.
pub fn render_calibration_table(s: &CalibrationSummary) -> String {
    let mut out = String::new();
    let header: Vec<_> = Measure::ALL.iter().map(|m| format!("{:>8}", m.label())).collect();
    let _ = writeln!(out, "{:<14}{} {:>8}", "Metrics", header.join(""), "IRS");
    let row = |out: &mut String, name: &str, v: &MeasureVector, irs: f64| {
        let cells: Vec<_> = v.to_array().iter().map(|x| format!("{x:>8.2}")).collect();
        let _ = writeln!(out, "{:<14}{} {:>8.2}", name, cells.join(""), irs);
    };
    let _ = writeln!(out, "-- before calibration --");
    row(&mut out, "Real Images", &s.before_real, s.irs_before_real);
    row(&mut out, "Fake Images", &s.before_fake, s.irs_before_fake);
    let _ = writeln!(out, "-- after calibration --");
    row(&mut out, "Real Images", &s.after_real, s.irs_after_real);
    row(&mut out, "Fake Images", &s.after_fake, s.irs_after_fake);
    let _ = writeln!(out, "ordering: {}", s.ordering);
    out
}

/// One column per dataset, rows Accuracy / F1 Score / Recall / Precision.
pub fn render_detection_table(rows: &[(String, EvalSummary)]) -> String {
    let mut out = String::new();
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(8) + 2;
    let _ = write!(out, "{:<14}", "Dataset Name");
    for (name, _) in rows {
        let _ = write!(out, "{name:>width$}");
    }
    out.push('\n');
    let metrics: [(&str, fn(&EvalSummary) -> Option<f64>); 4] = [
        ("Accuracy", |s| s.accuracy),
        ("F1 Score", |s| s.f1),
        ("Recall", |s| s.recall),
        ("Precision", |s| s.precision),
    ];
    for (label, get) in metrics {
        let _ = write!(out, "{label:<14}");
        for (_, s) in rows {
            let _ = write!(out, "{:>width$}", fmt_opt(get(s)));
        }
        out.push('\n');
    }
    out
}

/// One column per source tag with its mean IRS, followed by count and
/// standard deviation rows and the reference means.
pub fn render_benchmark_table(rows: &[BenchmarkRow]) -> String {
    let mut out = String::new();
    let width = rows.iter().map(|r| r.source_tag.len()).max().unwrap_or(0).max(8) + 2;
    let _ = write!(out, "{:<12}", "Model Name");
    for r in rows {
        let _ = write!(out, "{:>width$}", r.source_tag);
    }
    out.push('\n');
    let _ = write!(out, "{:<12}", "IRS score");
    for r in rows {
        let _ = write!(out, "{:>width$}", fmt_opt(r.mean));
    }
    out.push('\n');
    let _ = write!(out, "{:<12}", "std");
    for r in rows {
        let _ = write!(out, "{:>width$}", fmt_opt(r.std));
    }
    out.push('\n');
    let _ = write!(out, "{:<12}", "count");
    for r in rows {
        let _ = write!(out, "{:>width$}", r.count);
    }
    out.push('\n');
    let reference: Vec<_> = REFERENCE_MODEL_MEANS
        .iter()
        .map(|(n, v)| format!("{n} {v:.2}"))
        .collect();
    let _ = writeln!(out, "reference (not reproduced): {}", reference.join(", "));
    out
}
