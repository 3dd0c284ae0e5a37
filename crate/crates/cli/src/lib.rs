//! Command-line front end: argument types and subcommand drivers.
//!
//! `gls` parses [`Cli`] and hands it to [`run`] together with the streams
//! that receive data and diagnostics.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
pub use clap::Error as UsageError;
use serde_json::json;

use gls_coding::coding::{
    curve_argmin, linspace, shannon_experiment, write_curve_csv, ShannonExperimentConfig,
};
use gls_coding::model::{DEFAULT_ALPHA, MODEL_VERSION};
use gls_coding::pipeline::{
    self, load_manifest, threshold_search, train_test_split, Dataset, DatasetManifest,
    MetricsReport, ThresholdGrid, DEFAULT_CV_SEED, DEFAULT_FOLDS, DEFAULT_SPLIT_SEED,
    DEFAULT_TEST_FRACTION,
};
use gls_coding::{ClassModelSet, FirstPairSeed, OddLengthPolicy, PairCoding, TrainingConfig};

/// Compression-based classification with skew tent map coding.
#[derive(Parser, Debug)]
#[command(name = "gls", version)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean first-return codelength of random sequences across skew values.
    Shannon(ShannonArgs),
    /// Train on the training split and write a model file.
    Train(TrainArgs),
    /// Score a model, or train-and-score, on the test split.
    Evaluate(EvaluateArgs),
    /// Cross-validated threshold search on the training split.
    Cv(CvArgs),
}

#[derive(Args, Debug)]
struct ShannonArgs {
    /// Sequence length.
    #[arg(long, default_value_t = 20)]
    length: usize,
    /// Probability of symbol 0.
    #[arg(long, default_value_t = 0.45)]
    p0: f64,
    /// Sequences per skew value.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.01)]
    b_min: f64,
    #[arg(long, default_value_t = 0.99)]
    b_max: f64,
    /// Number of skew values.
    #[arg(long, default_value_t = 100)]
    b_count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Curve CSV; written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OddPolicy {
    Drop,
    Pad,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SeedRule {
    Published,
    Region,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SPLIT_SEED)]
    split_seed: u32,
    #[arg(long, default_value_t = DEFAULT_TEST_FRACTION, value_parser = open_unit)]
    test_fraction: f64,
}

#[derive(Args, Debug)]
struct CodingArgs {
    /// Additive smoothing constant.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Handling of the trailing symbol when the feature count is odd.
    #[arg(long, value_enum, default_value_t = OddPolicy::Drop)]
    odd_policy: OddPolicy,
    /// Initial interval for a leading `10` pair.
    #[arg(long, value_enum, default_value_t = SeedRule::Published)]
    first_pair_seed: SeedRule,
}

impl CodingArgs {
    fn config(&self, threshold: f64) -> TrainingConfig {
        TrainingConfig {
            threshold,
            alpha: self.alpha,
            coding: PairCoding {
                odd_length: match self.odd_policy {
                    OddPolicy::Drop => OddLengthPolicy::Drop,
                    OddPolicy::Pad => OddLengthPolicy::PadZero,
                },
                first_pair_seed: match self.first_pair_seed {
                    SeedRule::Published => FirstPairSeed::Published,
                    SeedRule::Region => FirstPairSeed::Region,
                },
            },
        }
    }
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Binarization threshold in [0, 1].
    #[arg(long, value_parser = unit)]
    threshold: f64,
    #[command(flatten)]
    coding: CodingArgs,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Trained model. Without it a model is trained on the split at `--threshold`.
    #[arg(long, conflicts_with = "threshold", required_unless_present = "threshold")]
    model: Option<PathBuf>,
    #[arg(long, value_parser = unit)]
    threshold: Option<f64>,
    /// Score every row of the dataset instead of the test split.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    coding: CodingArgs,
    /// Metrics JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-row codelengths and predictions (CSV).
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_CV_SEED)]
    cv_seed: u32,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    /// Threshold grid as lo:hi:step.
    #[arg(long, default_value = "0.01:1.00:0.01")]
    grid: ThresholdGrid,
    #[command(flatten)]
    coding: CodingArgs,
    /// Curve CSV; written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Runs `write` against the file at `path`, or `out` when there is none.
fn emit<F>(path: Option<&Path>, out: &mut dyn Write, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let mut w = create(p)?;
            write(&mut w).with_context(|| format!("writing {}", p.display()))?;
            w.flush()?;
        }
        None => {
            write(out)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Summary lines go to `out` unless `out` already carries the data.
fn summary(to_file: bool, out: &mut dyn Write, err: &mut dyn Write, line: &str) -> io::Result<()> {
    if to_file {
        writeln!(out, "{line}")
    } else {
        writeln!(err, "{line}")
    }
}

fn load(args: &DataArgs) -> Result<(DatasetManifest, Dataset)> {
    load_manifest(&args.data).with_context(|| format!("loading {}", args.data.display()))
}

fn split(ds: &Dataset, args: &DataArgs) -> Result<(Dataset, Dataset)> {
    let s = train_test_split(ds, args.test_fraction, args.split_seed)?;
    Ok((ds.subset(&s.train), ds.subset(&s.test)))
}

fn counts(ds: &Dataset) -> String {
    ds.classes
        .iter()
        .zip(ds.class_counts())
        .map(|(c, n)| format!("{c}={n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_shannon(args: &ShannonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if !(args.b_min > 0.0 && args.b_max < 1.0 && args.b_min <= args.b_max) {
        bail!("skew range must satisfy 0 < b-min <= b-max < 1");
    }
    let config = ShannonExperimentConfig {
        sequence_length: args.length,
        prob_zero: args.p0,
        trials_per_b: args.trials,
        b_grid: linspace(args.b_min, args.b_max, args.b_count),
        rng_seed: args.seed,
    };
    let curve = shannon_experiment(&config)?;
    emit(args.out.as_deref(), out, |w| write_curve_csv(&curve, w))?;
    if let Some(best) = curve_argmin(&curve) {
        let line = format!(
            "argmin b = {:.6} (mean codelength {:.6}), p0 = {:.6}",
            best.b, best.mean_codelength, args.p0
        );
        summary(args.out.is_some(), out, err, &line)?;
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let (_, ds) = load(&args.data)?;
    let (train, _) = split(&ds, &args.data)?;
    let model = pipeline::fit(&train, &args.coding.config(args.threshold))?;
    model.save(&args.out)?;
    writeln!(out, "train instances: {} ({})", train.len(), counts(&train))?;
    for c in model.classes.iter().filter(|c| c.smoothed) {
        writeln!(out, "smoothed: {}", c.label)?;
    }
    writeln!(out, "parameters: {}", model.parameter_count())?;
    Ok(())
}

fn metrics_json(
    manifest: &DatasetManifest,
    model: &ClassModelSet,
    args: &EvaluateArgs,
    scored: &Dataset,
    report: &MetricsReport,
) -> serde_json::Value {
    json!({
        "version": MODEL_VERSION,
        "dataset": manifest.name,
        "threshold": model.threshold,
        "split_seed": args.data.split_seed,
        "test_fraction": args.data.test_fraction,
        "scored": if args.all { "all" } else { "test" },
        "class_counts": scored.class_counts(),
        "metrics": report,
    })
}

fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let (manifest, ds) = load(&args.data)?;
    let (train, test) = split(&ds, &args.data)?;
    let model = match (&args.model, args.threshold) {
        (Some(path), _) => ClassModelSet::load(path)
            .with_context(|| format!("loading model {}", path.display()))?,
        (None, Some(t)) => pipeline::fit(&train, &args.coding.config(t))?,
        (None, None) => bail!("either --model or --threshold is required"),
    };
    if model.features() != ds.n_features() {
        bail!(
            "model expects {} features but {} has {}",
            model.features(),
            manifest.name,
            ds.n_features()
        );
    }
    let scored = if args.all { ds.clone() } else { test };
    let (preds, report) = pipeline::evaluate(&model, &scored)?;

    write!(out, "{}", report.to_table())?;
    if !args.all {
        if let Ok((_, train_report)) = pipeline::evaluate(&model, &train) {
            writeln!(out, "train accuracy: {:.6}", train_report.accuracy)?;
        }
    }
    if let Some(path) = &args.out {
        let value = metrics_json(&manifest, &model, args, &scored, &report);
        emit(Some(path), out, |w| {
            serde_json::to_writer_pretty(&mut *w, &value)?;
            writeln!(w)
        })?;
    }
    if let Some(path) = &args.predictions {
        emit(Some(path), out, |w| preds.write_csv(&model, w))?;
    }
    Ok(())
}

fn cmd_cv(args: &CvArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if args.folds < 2 {
        bail!("--folds must be at least 2");
    }
    let (_, ds) = load(&args.data)?;
    let (train, _) = split(&ds, &args.data)?;
    let result = threshold_search(
        &train,
        &args.grid,
        args.folds,
        args.cv_seed,
        &args.coding.config(0.5),
    )?;
    emit(args.out.as_deref(), out, |w| result.write_csv(w))?;
    let line = format!(
        "best threshold: {:.2} (mean macro-F1 {:.6} over {} folds)",
        result.best_threshold, result.best_score, result.folds
    );
    summary(args.out.is_some(), out, err, &line)?;
    Ok(())
}

/// Parses command-line arguments; the first item is the program name.
pub fn parse<I, T>(args: I) -> Result<Cli, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Executes a parsed command line. Data goes to files or `out`,
/// diagnostics to `err`. With `--threads` the work runs on a dedicated pool
/// of that size and console output is released when the command finishes.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let dispatch = |out: &mut dyn Write, err: &mut dyn Write| match &cli.command {
        Command::Shannon(a) => cmd_shannon(a, out, err),
        Command::Train(a) => cmd_train(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Cv(a) => cmd_cv(a, out, err),
    };
    match cli.threads {
        None => dispatch(out, err),
        Some(0) => bail!("--threads must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building the thread pool")?;
            let (mut o, mut e) = (Vec::new(), Vec::new());
            let result = pool.install(|| dispatch(&mut o, &mut e));
            out.write_all(&o)?;
            err.write_all(&e)?;
            result
        }
    }
}
