//! `irs` command-line front end.
//!
//! Machine output goes to stdout, diagnostics to stderr. Exit codes: 0 on
//! success, 1 when analysis fails, 2 for usage errors and missing paths.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use irs_core::calibration::{
    calibrated_values, compute_profile, default_profile, select_ordering, CalibrationProfile, CorrelationMatrix,
    RadiiVector, REFERENCE_FAKE_MEANS,
};
use irs_core::harness::{
    benchmark_models, calibration_summary, detection_metrics, ingest_corpus, measure_corpus, read_report_file,
    render_benchmark_table, render_calibration_table, render_detection_table, render_pentagon_svg, rotation_check,
    score_corpus, write_report, Corpus, PentagonSeries, ReportFormat, ScoreRecord,
};
use irs_core::scoring::{classify, pentagon_area, unit_pentagon_area};
use irs_core::{Label, MeasureVector};

/// Rotation deviation tolerated by `rotcheck` before it exits nonzero.
pub const ROTATION_TOLERANCE: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(
    name = "irs",
    version,
    about = "Image Realism Score: flag generated images from five classical statistics"
)]
pub struct Cli {
    /// Log progress and per-file diagnostics to stderr
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    /// Calibration profile (JSON); defaults to the bundled profile
    #[arg(long, env = "IRS_PROFILE")]
    pub profile: Option<PathBuf>,

    /// Override the profile's decision threshold
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct WorkerArgs {
    /// Worker threads for batch scoring (default: available cores)
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Score images or directories of images
    Score {
        /// Image files or directories (searched recursively)
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        workers: WorkerArgs,
        /// JSON output (default)
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// CSV report output
        #[arg(long)]
        csv: bool,
        /// Write the report to a file instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a calibration profile from a real and a fake corpus
    Calibrate {
        /// Directory of real photographs
        #[arg(long)]
        real: PathBuf,
        /// Directory of generated images
        #[arg(long)]
        fake: PathBuf,
        /// Where to write the profile
        #[arg(short, long)]
        output: PathBuf,
        /// Decision threshold stored in the profile
        #[arg(long, default_value_t = irs_core::calibration::DEFAULT_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        workers: WorkerArgs,
    },
    /// Detection metrics on a labeled real/fake pair of corpora
    Evaluate {
        /// Directory of real photographs
        #[arg(long)]
        real: PathBuf,
        /// Directory of generated images
        #[arg(long)]
        fake: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        workers: WorkerArgs,
        /// Print a text table instead of JSON
        #[arg(long)]
        table: bool,
        /// Dataset name used in the table header
        #[arg(long, default_value = "corpus")]
        name: String,
    },
    /// Mean IRS per source corpus
    Benchmark {
        /// Corpus as TAG=DIR; repeat for each source
        #[arg(long = "corpus", value_name = "TAG=DIR", required = true)]
        corpora: Vec<String>,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        workers: WorkerArgs,
        /// JSON output instead of a text table
        #[arg(long)]
        json: bool,
    },
    /// Draw the mean pentagon of a score report as SVG
    Plot {
        /// Report written by `score` (CSV or JSON)
        #[arg(long)]
        input: PathBuf,
        /// Where to write the SVG
        #[arg(short, long)]
        output: PathBuf,
        /// Overlay the same records under a second profile
        #[arg(long)]
        compare: Option<PathBuf>,
        #[command(flatten)]
        profile: ProfileArgs,
    },
    /// Check that scores are unchanged under 90° rotations
    Rotcheck {
        /// Directory of images to rotate and rescore
        dir: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[command(flatten)]
        workers: WorkerArgs,
        /// Full per-image report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in analytic fixtures
    Selfcheck,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Analysis(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Analysis(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Analysis(m) => m,
        }
    }
}

impl From<irs_core::Error> for Failure {
    fn from(e: irs_core::Error) -> Self {
        Failure::Analysis(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Analysis(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Analysis(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                2
            } else {
                let _ = write!(out, "{rendered}");
                0
            };
        }
    };
    if cli.verbose {
        log::set_max_level(log::LevelFilter::Debug);
    }
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "irs: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match command {
        Command::Score {
            paths,
            profile,
            workers,
            json: _,
            csv,
            output,
        } => score(&paths, &profile, &workers, csv, output.as_deref(), out, err),
        Command::Calibrate {
            real,
            fake,
            output,
            threshold,
            workers,
        } => calibrate(&real, &fake, &output, threshold, &workers, out, err),
        Command::Evaluate {
            real,
            fake,
            profile,
            workers,
            table,
            name,
        } => evaluate(&real, &fake, &profile, &workers, table, &name, out, err),
        Command::Benchmark {
            corpora,
            profile,
            workers,
            json,
        } => benchmark(&corpora, &profile, &workers, json, out, err),
        Command::Plot {
            input,
            output,
            compare,
            profile,
        } => plot(&input, &output, compare.as_deref(), &profile, out),
        Command::Rotcheck {
            dir,
            profile,
            workers,
            json,
        } => rotcheck(&dir, &profile, &workers, json, out, err),
        Command::Selfcheck => selfcheck(out),
    }
}

fn require_exists(path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{}: no such file or directory", path.display())))
    }
}

fn load_profile_file(path: &Path) -> Result<CalibrationProfile, Failure> {
    require_exists(path)?;
    CalibrationProfile::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn resolve_profile(args: &ProfileArgs) -> Result<CalibrationProfile, Failure> {
    let profile = match &args.profile {
        Some(path) => load_profile_file(path)?,
        None => default_profile()?,
    };
    match args.threshold {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Failure::Usage(format!("threshold must be > 0, got {t}"))),
        Some(t) => Ok(profile.with_threshold(t)?),
        None => Ok(profile),
    }
}

fn worker_count(args: &WorkerArgs) -> Result<usize, Failure> {
    match args.workers {
        Some(0) => Err(Failure::Usage("--workers must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn load_corpus(dir: &Path, label: Option<Label>, tag: &str, err: &mut dyn Write) -> Result<Corpus, Failure> {
    require_exists(dir)?;
    let corpus = ingest_corpus(dir, label, tag)?;
    if !corpus.skipped.is_empty() {
        writeln!(
            err,
            "{}: skipped {} non-image file(s)",
            dir.display(),
            corpus.skipped.len()
        )?;
    }
    Ok(corpus)
}

fn report_failures(failures: &[irs_core::harness::ScoreFailure], err: &mut dyn Write) -> Result<(), Failure> {
    for f in failures {
        writeln!(err, "{}: {}", f.path, f.error)?;
    }
    Ok(())
}

fn write_json<T: serde::Serialize + ?Sized>(value: &T, out: &mut dyn Write) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn score(
    paths: &[PathBuf],
    profile: &ProfileArgs,
    workers: &WorkerArgs,
    csv: bool,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    for p in paths {
        require_exists(p)?;
    }
    let profile = resolve_profile(profile)?;
    let workers = worker_count(workers)?;
    let mut records: Vec<ScoreRecord> = Vec::new();
    let mut failed = 0;
    for p in paths {
        let corpus = match load_corpus(p, None, "input", err) {
            Ok(c) => c,
            Err(Failure::Analysis(m)) => {
                writeln!(err, "{m}")?;
                failed += 1;
                continue;
            }
            Err(u) => return Err(u),
        };
        let scores = score_corpus(&corpus, &profile, workers)?;
        report_failures(&scores.failures, err)?;
        failed += scores.failures.len();
        records.extend(scores.records);
    }
    if records.is_empty() {
        return Err(Failure::Analysis(format!(
            "no image could be scored ({failed} failure(s))"
        )));
    }
    let single = paths.len() == 1 && paths[0].is_file();
    let format = if csv { ReportFormat::Csv } else { ReportFormat::Json };
    let mut sink: Box<dyn Write> = match output {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(&mut *out),
    };
    match format {
        ReportFormat::Json if single => write_json(&records[0], &mut *sink)?,
        _ => write_report(&records, format, &mut *sink)?,
    }
    sink.flush()?;
    Ok(0)
}

fn calibrate(
    real: &Path,
    fake: &Path,
    output: &Path,
    threshold: f64,
    workers: &WorkerArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Failure::Usage(format!("threshold must be > 0, got {threshold}")));
    }
    let workers = worker_count(workers)?;
    let real_c = load_corpus(real, Some(Label::Real), "real", err)?;
    let fake_c = load_corpus(fake, Some(Label::Fake), "fake", err)?;
    let real_m = measure_corpus(&real_c, workers)?;
    let fake_m = measure_corpus(&fake_c, workers)?;
    report_failures(&real_m.failures, err)?;
    report_failures(&fake_m.failures, err)?;
    let (real_v, fake_v) = (real_m.vectors(), fake_m.vectors());
    let profile = compute_profile(&real_v, &fake_v, threshold)?;
    profile.save(output)?;
    let summary = calibration_summary(&real_v, &fake_v, &profile)?;
    write!(out, "{}", render_calibration_table(&summary))?;
    writeln!(
        err,
        "profile written to {} ({} real, {} fake)",
        output.display(),
        real_v.len(),
        fake_v.len()
    )?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    real: &Path,
    fake: &Path,
    profile: &ProfileArgs,
    workers: &WorkerArgs,
    table: bool,
    name: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    require_exists(real)?;
    require_exists(fake)?;
    let profile = resolve_profile(profile)?;
    let workers = worker_count(workers)?;
    let real_c = load_corpus(real, Some(Label::Real), "real", err)?;
    let fake_c = load_corpus(fake, Some(Label::Fake), "fake", err)?;
    let merged = Corpus::merge(&[real_c, fake_c], name);
    let scores = score_corpus(&merged, &profile, workers)?;
    report_failures(&scores.failures, err)?;
    if scores.records.is_empty() {
        return Err(Failure::Analysis("no image could be scored".into()));
    }
    let summary = detection_metrics(&scores.records)?;
    if table {
        write!(out, "{}", render_detection_table(&[(name.to_string(), summary)]))?;
    } else {
        write_json(&summary, out)?;
    }
    Ok(0)
}

fn benchmark(
    specs: &[String],
    profile: &ProfileArgs,
    workers: &WorkerArgs,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let mut parsed = Vec::with_capacity(specs.len());
    for spec in specs {
        match spec.split_once('=') {
            Some((tag, dir)) if !tag.is_empty() && !dir.is_empty() => {
                let dir = PathBuf::from(dir);
                require_exists(&dir)?;
                parsed.push((tag.to_string(), dir));
            }
            _ => return Err(Failure::Usage(format!("--corpus expects TAG=DIR, got {spec:?}"))),
        }
    }
    let profile = resolve_profile(profile)?;
    let workers = worker_count(workers)?;
    let mut corpora = Vec::with_capacity(parsed.len());
    for (tag, dir) in &parsed {
        corpora.push(load_corpus(dir, None, tag, err)?);
    }
    let rows = benchmark_models(&corpora, &profile, workers)?;
    if json {
        write_json(&rows, out)?;
    } else {
        write!(out, "{}", render_benchmark_table(&rows))?;
    }
    Ok(0)
}

fn mean_values(records: &[ScoreRecord], profile: &CalibrationProfile) -> MeasureVector {
    let values: Vec<_> = records
        .iter()
        .map(|r| calibrated_values(&r.measure_vector, profile))
        .collect();
    MeasureVector::mean(&values).expect("non-empty")
}

fn plot(input: &Path, output: &Path, compare: Option<&Path>, profile: &ProfileArgs, out: &mut dyn Write) -> Outcome {
    require_exists(input)?;
    let profile = resolve_profile(profile)?;
    let records = read_report_file(input)?;
    if records.is_empty() {
        return Err(Failure::Analysis(format!("{}: report has no records", input.display())));
    }
    let ordering = profile.ordering();
    let mut series = vec![PentagonSeries {
        label: format!("mean of {} image(s)", records.len()),
        radii: RadiiVector(ordering.arrange(&mean_values(&records, &profile))),
        color: "#1f77b4".into(),
    }];
    if let Some(path) = compare {
        let other = load_profile_file(path)?;
        series.push(PentagonSeries {
            label: format!("mean under {}", path.display()),
            radii: RadiiVector(ordering.arrange(&mean_values(&records, &other))),
            color: "#ff7f0e".into(),
        });
    }
    std::fs::write(output, render_pentagon_svg(&series, ordering))
        .map_err(|e| Failure::Usage(format!("{}: {e}", output.display())))?;
    for s in &series {
        writeln!(out, "{}: area {:.4}", s.label, pentagon_area(&s.radii)?.value)?;
    }
    Ok(0)
}

fn rotcheck(
    dir: &Path,
    profile: &ProfileArgs,
    workers: &WorkerArgs,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    require_exists(dir)?;
    let profile = resolve_profile(profile)?;
    let workers = worker_count(workers)?;
    let corpus = load_corpus(dir, None, "rotation", err)?;
    let report = rotation_check(&corpus, &profile, workers)?;
    report_failures(&report.failures, err)?;
    if report.entries.is_empty() {
        return Err(Failure::Analysis("no image could be scored".into()));
    }
    if json {
        write_json(&report, out)?;
    } else {
        for e in &report.entries {
            writeln!(
                out,
                "{}  irs {:.6}  dev90 {:.2e}  dev180 {:.2e}  dev270 {:.2e}",
                e.path, e.irs, e.deviations[0], e.deviations[1], e.deviations[2]
            )?;
        }
        writeln!(
            out,
            "images {}  max deviation {:.3e}  mean deviation {:.3e}  tolerance {:.0e}",
            report.entries.len(),
            report.max_deviation,
            report.mean_deviation,
            ROTATION_TOLERANCE
        )?;
    }
    Ok(if report.max_deviation <= ROTATION_TOLERANCE {
        0
    } else {
        1
    })
}

fn selfcheck(out: &mut dyn Write) -> Outcome {
    let profile = default_profile()?;
    let ordering = select_ordering(&CorrelationMatrix::reference());
    let area = |v: [f64; 5]| -> Result<f64, Failure> {
        Ok(pentagon_area(&RadiiVector(ordering.arrange(&MeasureVector::from_array(v))))?.value)
    };
    let unit = pentagon_area(&RadiiVector([1.0; 5]))?.value;
    let fake_before = area(REFERENCE_FAKE_MEANS)?;
    let real_after = area([2.31, 1.02, 1.57, 1.11, 1.02])?;
    let sum = ordering.adjacency_sum(&CorrelationMatrix::reference());
    let reciprocal = irs_core::Measure::ALL
        .iter()
        .all(|&m| profile.weights().get(m) == 1.0 / profile.fake_calibrated_means().get(m));
    let probe = |v: f64| irs_core::IrsScore {
        value: v,
        radii: RadiiVector([0.0; 5]),
        triangle_areas: [0.0; 5],
    };
    let boundary = classify(&probe(3.0), 3.0)?.label == Label::Real
        && classify(&probe(2.38), 3.0)?.label == Label::Fake
        && classify(&probe(4.68), 3.0)?.label == Label::Real;

    let checks = [
        (
            "unit pentagon",
            (unit - 2.377641).abs() <= 1e-6 && (unit - unit_pentagon_area()).abs() < 1e-15,
            format!("{unit:.6}"),
        ),
        (
            "fake means before calibration",
            (fake_before - 1.48).abs() <= 0.03,
            format!("{fake_before:.4}"),
        ),
        (
            "real means after calibration",
            (real_after - 4.68).abs() <= 0.10,
            format!("{real_after:.4}"),
        ),
        (
            "ordering selection",
            (sum - 1.03).abs() < 1e-9 && ordering == profile.ordering(),
            format!("{ordering} (adjacency {sum:.2})"),
        ),
        (
            "bundled profile weights",
            reciprocal,
            format!("{:?}", profile.weights().to_array()),
        ),
        ("threshold boundary", boundary, format!("delta {}", profile.threshold())),
    ];
    let mut failed = 0;
    for (name, ok, detail) in &checks {
        writeln!(out, "{} {name}: {detail}", if *ok { "PASS" } else { "FAIL" })?;
        failed += usize::from(!ok);
    }
    Ok(if failed == 0 { 0 } else { 1 })
}
