//! Corpus-level workflows: batch scoring, detection metrics, per-source
//! benchmarks, ordering statistics, rotation checks, reports and plots.

mod corpus;
mod metrics;
mod report;
mod svg;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use corpus::{ingest_corpus, sniff_image, Corpus, CorpusEntry};
pub use metrics::{detection_metrics, EvalSummary};
pub use report::{
    read_report_csv, read_report_file, read_report_json, render_benchmark_table, render_calibration_table,
    render_detection_table, write_report, write_report_file, ReportFormat, CSV_COLUMNS, REFERENCE_MODEL_MEANS,
};
pub use svg::{render_pentagon_svg, PentagonSeries, PLOT_SCALE};

use crate::calibration::{
    calibrate_vector, calibrated_values, enumerate_cyclic_orders, normalize_and_invert, CalibrationProfile, Ordering,
    RadiiVector,
};
use crate::error::{Error, Result};
use crate::imgproc::{load_image, standardize, to_grayscale, GrayImage, RgbImage};
use crate::measures::{measure_vector, MeasureVector};
use crate::scoring::{classify, irs, pentagon_area, Label};

/// Decodes nothing; grayscale, standardize and measure an RGB image.
pub fn analyze_image(img: &RgbImage) -> Result<MeasureVector> {
    measure_vector(&standardize(&to_grayscale(img))?)
}

/// Loads an image file and returns its standardized grayscale working image.
pub fn load_standardized(path: &Path) -> Result<GrayImage> {
    standardize(&to_grayscale(&load_image(path)?))
}

pub fn analyze_file(path: &Path) -> Result<MeasureVector> {
    measure_vector(&load_standardized(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoreRecord {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Label>,
    #[serde(rename = "measures", alias = "measure_vector")]
    pub measure_vector: MeasureVector,
    pub radii: RadiiVector,
    pub irs: f64,
    pub verdict: Label,
}

impl ScoreRecord {
    pub fn new(path: String, truth: Option<Label>, v: MeasureVector, profile: &CalibrationProfile) -> Result<Self> {
        let score = irs(&v, profile)?;
        let verdict = classify(&score, profile.threshold())?;
        Ok(ScoreRecord {
            path,
            truth,
            measure_vector: v,
            radii: score.radii,
            irs: score.value,
            verdict: verdict.label,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScoreFailure {
    pub path: String,
    pub error: String,
}

/// Batch output; both lists are in path order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusScores {
    pub records: Vec<ScoreRecord>,
    pub failures: Vec<ScoreFailure>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusMeasures {
    pub entries: Vec<(CorpusEntryRef, MeasureVector)>,
    pub failures: Vec<ScoreFailure>,
}

/// Path and label of an analyzed entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntryRef {
    pub path: String,
    pub label: Option<Label>,
}

impl CorpusMeasures {
    pub fn vectors(&self) -> Vec<MeasureVector> {
        self.entries.iter().map(|(_, v)| *v).collect()
    }
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::io("<thread pool>", std::io::Error::other(e)))
}

/// Runs `f` over every entry on `workers` threads, keeping input order.
fn par_map<T: Send>(corpus: &Corpus, workers: usize, f: impl Fn(&CorpusEntry) -> T + Sync) -> Result<Vec<T>> {
    Ok(thread_pool(workers)?.install(|| corpus.entries.par_iter().map(&f).collect()))
}

/// Measures every entry of a corpus. Per-file errors are collected.
pub fn measure_corpus(corpus: &Corpus, workers: usize) -> Result<CorpusMeasures> {
    let results = par_map(corpus, workers, |e| analyze_file(&e.path))?;
    let mut out = CorpusMeasures::default();
    for (entry, r) in corpus.entries.iter().zip(results) {
        let path = entry.path.display().to_string();
        match r {
            Ok(v) => out.entries.push((
                CorpusEntryRef {
                    path,
                    label: entry.label,
                },
                v,
            )),
            Err(e) => {
                log::warn!("{path}: {e}");
                out.failures.push(ScoreFailure {
                    path,
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

/// Scores a corpus. Output order is path order regardless of `workers`.
pub fn score_corpus(corpus: &Corpus, profile: &CalibrationProfile, workers: usize) -> Result<CorpusScores> {
    let results = par_map(corpus, workers, |e| {
        let v = analyze_file(&e.path)?;
        ScoreRecord::new(e.path.display().to_string(), e.label, v, profile)
    })?;
    let mut out = CorpusScores::default();
    for (entry, r) in corpus.entries.iter().zip(results) {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(e) => {
                let path = entry.path.display().to_string();
                log::warn!("{path}: {e}");
                out.failures.push(ScoreFailure {
                    path,
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub source_tag: String,
    pub count: usize,
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
}

impl BenchmarkRow {
    pub fn from_records(source_tag: &str, records: &[ScoreRecord]) -> Self {
        let n = records.len();
        let (mean, std) = if n == 0 {
            (None, None)
        } else {
            let mean = records.iter().map(|r| r.irs).sum::<f64>() / n as f64;
            let var = records.iter().map(|r| (r.irs - mean).powi(2)).sum::<f64>() / n as f64;
            (Some(mean), Some(var.sqrt()))
        };
        BenchmarkRow {
            source_tag: source_tag.to_string(),
            count: n,
            mean,
            std,
        }
    }
}

/// Sorts rows by descending mean; rows without a mean go last.
pub fn sort_benchmark_rows(rows: &mut [BenchmarkRow]) {
    rows.sort_by(|a, b| match (a.mean, b.mean) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
}

/// Mean, standard deviation and count of IRS per corpus.
pub fn benchmark_models(corpora: &[Corpus], profile: &CalibrationProfile, workers: usize) -> Result<Vec<BenchmarkRow>> {
    if corpora.is_empty() {
        return Err(Error::EmptyCorpus("benchmark"));
    }
    let mut rows = Vec::with_capacity(corpora.len());
    for c in corpora {
        let scores = score_corpus(c, profile, workers)?;
        rows.push(BenchmarkRow::from_records(&c.source_tag, &scores.records));
    }
    sort_benchmark_rows(&mut rows);
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingFrequency {
    pub ordering: Ordering,
    pub frequency: f64,
}

/// For each sample, which of the 12 cyclic orders of its calibrated radii
/// gives the largest pentagon. Tied maxima share the sample equally.
///
/// Returned in enumeration order.
pub fn ordering_frequency(samples: &[MeasureVector], profile: &CalibrationProfile) -> Result<Vec<OrderingFrequency>> {
    if samples.is_empty() {
        return Err(Error::EmptyCorpus("ordering frequency"));
    }
    let orders = enumerate_cyclic_orders();
    let mut tally = vec![0.0; orders.len()];
    let mut areas = vec![0.0; orders.len()];
    for v in samples {
        let values = calibrated_values(v, profile);
        for (a, o) in areas.iter_mut().zip(&orders) {
            *a = pentagon_area(&RadiiVector(o.arrange(&values)))?.value;
        }
        let max = areas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tol = 1e-12 * max.abs().max(1.0);
        let winners: Vec<_> = (0..areas.len()).filter(|&i| areas[i] >= max - tol).collect();
        let share = 1.0 / winners.len() as f64;
        for i in winners {
            tally[i] += share;
        }
    }
    let n = samples.len() as f64;
    Ok(orders
        .into_iter()
        .zip(tally)
        .map(|(ordering, t)| OrderingFrequency {
            ordering,
            frequency: t / n,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationEntry {
    pub path: String,
    pub irs: f64,
    /// Relative deviation for 90°, 180° and 270° rotations.
    pub deviations: [f64; 3],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RotationReport {
    pub entries: Vec<RotationEntry>,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub failures: Vec<ScoreFailure>,
}

/// `|a - b| / |a|`, or the absolute difference when `a` is zero.
fn relative_deviation(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if a == 0.0 {
        d
    } else {
        d / a.abs()
    }
}

/// IRS of a standardized image against its quarter-turn rotations.
pub fn rotation_entry(path: String, img: &GrayImage, profile: &CalibrationProfile) -> Result<RotationEntry> {
    let base = irs(&measure_vector(img)?, profile)?.value;
    let mut deviations = [0.0; 3];
    for (k, d) in (1..=3).zip(deviations.iter_mut()) {
        let rotated = irs(&measure_vector(&img.rotate90(k))?, profile)?.value;
        *d = relative_deviation(base, rotated);
    }
    Ok(RotationEntry {
        path,
        irs: base,
        deviations,
    })
}

pub fn summarize_rotations(entries: Vec<RotationEntry>, failures: Vec<ScoreFailure>) -> RotationReport {
    let all: Vec<f64> = entries.iter().flat_map(|e| e.deviations).collect();
    let max_deviation = all.iter().copied().fold(0.0, f64::max);
    let mean_deviation = if all.is_empty() {
        0.0
    } else {
        all.iter().sum::<f64>() / all.len() as f64
    };
    RotationReport {
        entries,
        max_deviation,
        mean_deviation,
        failures,
    }
}

/// Rotation check over a corpus, parallel across images.
pub fn rotation_check(corpus: &Corpus, profile: &CalibrationProfile, workers: usize) -> Result<RotationReport> {
    let results = par_map(corpus, workers, |e| {
        rotation_entry(e.path.display().to_string(), &load_standardized(&e.path)?, profile)
    })?;
    let mut entries = Vec::new();
    let mut failures = Vec::new();
    for (entry, r) in corpus.entries.iter().zip(results) {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => failures.push(ScoreFailure {
                path: entry.path.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    Ok(summarize_rotations(entries, failures))
}

/// Corpus means before and after weighting, with the pentagon areas of
/// the mean rows.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub before_real: MeasureVector,
    pub before_fake: MeasureVector,
    pub after_real: MeasureVector,
    pub after_fake: MeasureVector,
    pub irs_before_real: f64,
    pub irs_before_fake: f64,
    pub irs_after_real: f64,
    pub irs_after_fake: f64,
    pub ordering: Ordering,
}

pub fn calibration_summary(
    real: &[MeasureVector],
    fake: &[MeasureVector],
    profile: &CalibrationProfile,
) -> Result<CalibrationSummary> {
    let means = |set: &[MeasureVector], f: &dyn Fn(&MeasureVector) -> MeasureVector, which| {
        let mapped: Vec<_> = set.iter().map(f).collect();
        MeasureVector::mean(&mapped).ok_or(Error::EmptyCorpus(which))
    };
    let before = |v: &MeasureVector| normalize_and_invert(v, profile.real_means());
    let after = |v: &MeasureVector| calibrated_values(v, profile);
    let before_real = means(real, &before, "real")?;
    let before_fake = means(fake, &before, "fake")?;
    let after_real = means(real, &after, "real")?;
    let after_fake = means(fake, &after, "fake")?;
    let ordering = profile.ordering();
    let area = |v: &MeasureVector| pentagon_area(&RadiiVector(ordering.arrange(v))).map(|s| s.value);
    Ok(CalibrationSummary {
        irs_before_real: area(&before_real)?,
        irs_before_fake: area(&before_fake)?,
        irs_after_real: area(&after_real)?,
        irs_after_fake: area(&after_fake)?,
        before_real,
        before_fake,
        after_real,
        after_fake,
        ordering,
    })
}

/// Mean calibrated radii of a set of vectors, in slot order.
pub fn mean_radii(samples: &[MeasureVector], profile: &CalibrationProfile) -> Option<RadiiVector> {
    let radii: Vec<_> = samples.iter().map(|v| calibrate_vector(v, profile)).collect();
    if radii.is_empty() {
        return None;
    }
    let n = radii.len() as f64;
    let mut acc = [0.0; 5];
    for r in &radii {
        for (a, x) in acc.iter_mut().zip(r.values()) {
            *a += x;
        }
    }
    Some(RadiiVector(acc.map(|a| a / n)))
}
