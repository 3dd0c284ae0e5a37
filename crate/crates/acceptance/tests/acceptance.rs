//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.
//!
//! Command-line criteria drive the same entry point as the `gls` binary,
//! in-process, so `--threads` really switches between thread pools.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gls_coding::coding::exact::back_iterate_second_exact;
use gls_coding::coding::{
    back_iterate_first, back_iterate_second, codelength_log_domain, curve_argmin, optimal_skew,
    shannon_experiment, CurvePoint, ShannonExperimentConfig,
};
use gls_coding::maps::{PairProbabilities, SecondReturnMap, SkewTentMap, SymbolicSequence};
use gls_coding::model::{laplace_smooth, pair_probabilities, TrainingConfig};
use gls_coding::pipeline::{
    load_manifest, run_holdout, threshold_search, train_test_split, DatasetManifest,
    ThresholdGrid, DEFAULT_CV_SEED, DEFAULT_FOLDS, DEFAULT_SPLIT_SEED, DEFAULT_TEST_FRACTION,
};
use gls_coding::{OddLengthPolicy, PairCoding};
use gls_verify::{data_dir, report, Outcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn manifest_path(name: &str) -> PathBuf {
    data_dir().join(format!("{name}.json"))
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn shannon_curve() -> Outcome {
    let config = ShannonExperimentConfig::default();
    let start = Instant::now();
    let curve = shannon_experiment(&config).unwrap();
    let probe = ShannonExperimentConfig {
        b_grid: vec![0.10, 0.45, 0.90],
        ..config.clone()
    };
    let at = shannon_experiment(&probe).unwrap();
    let elapsed = start.elapsed();
    let best = curve_argmin(&curve).unwrap();
    let [lo, mid, hi]: [CurvePoint; 3] = at.try_into().unwrap();
    let pass = (best.b - 0.45).abs() <= 0.05
        && mid.mean_codelength < lo.mean_codelength
        && mid.mean_codelength < hi.mean_codelength
        && elapsed < Duration::from_secs(10);
    Outcome::new(
        pass,
        format!(
            "argmin b = {:.4} (|b - 0.45| <= 0.05); mean bits at b=0.10/0.45/0.90 = {:.2}/{:.2}/{:.2}; {}",
            best.b,
            lo.mean_codelength,
            mid.mean_codelength,
            hi.mean_codelength,
            secs(elapsed)
        ),
    )
}

fn random_positive_map(rng: &mut ChaCha8Rng) -> SecondReturnMap {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.001..1.0));
    let s: f64 = w.iter().sum();
    let p = [w[0] / s, w[1] / s, w[2] / s];
    let p10 = 1.0 - p[0] - p[1] - p[2];
    SecondReturnMap::new(PairProbabilities::from_array([p[0], p[1], p[2], p10])).unwrap()
}

fn random_sequence(rng: &mut ChaCha8Rng, len: usize) -> SymbolicSequence {
    SymbolicSequence::from_bools((0..len).map(|_| rng.random_bool(0.5)))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cases = 2000;
    let mut failures = 0;
    let mut float_misses = 0;
    let mut boundary = 0;
    for _ in 0..cases {
        let map = random_positive_map(&mut rng);
        let len = 2 * rng.random_range(1..=30);
        let seq = random_sequence(&mut rng, len);
        let coding = PairCoding::default();
        let log = codelength_log_domain(&map, &seq, coding).unwrap();
        let interval = back_iterate_second_exact(&map, &seq, coding).unwrap();
        let exact = interval.exact_bits();
        let near_int = (log.exact_bits - log.exact_bits.round()).abs() < 1e-9;
        boundary += usize::from(near_int);
        let rel_ok = (exact - log.exact_bits).abs() <= 1e-6 * log.exact_bits.max(1e-12);
        let ceil_ok = near_int || interval.codelength() == log.codelength;
        if !(rel_ok && ceil_ok) {
            failures += 1;
        }
        let float = back_iterate_second(&map, &seq, coding).unwrap();
        if (float.exact_bits - log.exact_bits).abs() > 1e-6 * log.exact_bits.max(1e-12) {
            float_misses += 1;
        }
    }
    let mut o = Outcome::new(
        failures == 0,
        format!("{failures} failures over {cases} cases ({boundary} within 1e-9 of an integer)"),
    );
    o.details.push(format!(
        "rational interval route compared; the f64 interval route misses 1e-6 relative in {float_misses} of {cases} cases"
    ));
    o
}

fn first_return_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = 500;
    let mut failures = 0;
    let mut done = 0;
    while done < cases {
        let len = rng.random_range(2..=32);
        let seq = random_sequence(&mut rng, len);
        if seq.zeros() == 0 || seq.zeros() == seq.len() {
            continue;
        }
        done += 1;
        let map = SkewTentMap::new(optimal_skew(&seq).unwrap()).unwrap();
        let enc = back_iterate_first(&map, &seq).unwrap();
        let back = map.symbolize(&map.trajectory(enc.x0, seq.len(), 0).unwrap()).unwrap();
        if back != seq {
            failures += 1;
        }
    }
    Outcome::new(failures == 0, format!("{failures} failures over {cases} sequences of length 2..=32"))
}

fn worked_example() -> Outcome {
    let seq = SymbolicSequence::new(vec![0, 0, 1, 0, 0, 1, 1, 1, 0, 0]).unwrap();
    let p = pair_probabilities(&seq, OddLengthPolicy::Drop).unwrap();
    let got = (p.p00, p.p01, p.p10, p.p11);
    Outcome::new(
        got == (0.4, 0.2, 0.2, 0.2),
        format!("(p00, p01, p10, p11) = {got:?}"),
    )
}

fn smoothing_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cases = 1000;
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let m = rng.random_range(1..=300usize);
        let alpha = 10f64.powf(rng.random_range(-6.0..0.0));
        let mut sums = [0.0; 4];
        for _ in 0..m {
            let mut w: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
            // Knock out components so some sums come out exactly zero.
            for v in w.iter_mut() {
                if rng.random_bool(0.4) {
                    *v = 0.0;
                }
            }
            let s: f64 = w.iter().sum();
            if s == 0.0 {
                w = [1.0, 0.0, 0.0, 0.0];
            } else {
                w = w.map(|v| v / s);
            }
            for (acc, v) in sums.iter_mut().zip(w) {
                *acc += v;
            }
        }
        let p = laplace_smooth(sums, m, alpha);
        let err = (p.sum() - 1.0).abs();
        worst = worst.max(err);
        if !(p.to_array().iter().all(|&v| v > 0.0) && err <= 1e-12) {
            failures += 1;
        }
    }
    Outcome::new(
        failures == 0,
        format!("{failures} failures over {cases} cases; worst |sum - 1| = {worst:.1e}"),
    )
}

const TABLE_ONE: [(&str, f64, f64, f64); 7] = [
    ("iris", 0.59, 0.8667, 0.05),
    ("breast_cancer", 0.32, 0.9298, 0.05),
    ("wine", 0.25, 0.7500, 0.05),
    ("banknote", 0.62, 0.7927, 0.05),
    ("ionosphere", 0.01, 0.8028, 0.05),
    ("seeds", 0.51, 0.7857, 0.05),
    ("haberman", 0.61, 0.6774, 0.07),
];

fn table_one() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let mut ok = 0;
    for (name, tau, target, band) in TABLE_ONE {
        let manifest = DatasetManifest::load(&manifest_path(name)).unwrap();
        if !manifest.path.exists() {
            pass = false;
            details.push(format!("FAIL {name}: data file {} not present", manifest.path.display()));
            continue;
        }
        let start = Instant::now();
        let ds = manifest.load_dataset().unwrap();
        let run = run_holdout(
            &ds,
            DEFAULT_TEST_FRACTION,
            DEFAULT_SPLIT_SEED,
            &TrainingConfig::with_threshold(tau),
        )
        .unwrap();
        let elapsed = start.elapsed();
        let acc = run.metrics.accuracy;
        let good = (acc - target).abs() <= band && elapsed < Duration::from_secs(5);
        ok += usize::from(good);
        pass &= good;
        details.push(format!(
            "{} {name}: tau {tau:.2}, accuracy {acc:.4} vs {target:.4} +/- {band:.2}, macro-F1 {:.4}, {}",
            if good { "PASS" } else { "FAIL" },
            run.metrics.macro_f1,
            secs(elapsed)
        ));
    }
    Outcome {
        pass,
        summary: format!("{ok} of {} datasets within band", TABLE_ONE.len()),
        details,
    }
}

fn cv_search() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, floor) in [("breast_cancer", 0.85), ("iris", 0.63)] {
        let (_, ds) = load_manifest(&manifest_path(name)).unwrap();
        let start = Instant::now();
        let split = train_test_split(&ds, DEFAULT_TEST_FRACTION, DEFAULT_SPLIT_SEED).unwrap();
        let train = ds.subset(&split.train);
        let r = threshold_search(
            &train,
            &ThresholdGrid::default(),
            DEFAULT_FOLDS,
            DEFAULT_CV_SEED,
            &TrainingConfig::default(),
        )
        .unwrap();
        let elapsed = start.elapsed();
        let good = r.best_score >= floor && elapsed < Duration::from_secs(60);
        pass &= good;
        details.push(format!(
            "{} {name}: best tau {:.2}, mean macro-F1 {:.4} (>= {floor}), {}",
            if good { "PASS" } else { "FAIL" },
            r.best_threshold,
            r.best_score,
            secs(elapsed)
        ));
    }
    Outcome {
        pass,
        summary: "best mean macro-F1 over the 0.01..1.00 grid".into(),
        details,
    }
}

struct Run {
    ok: bool,
    stdout: Vec<u8>,
}

/// Runs the `gls` command line in-process.
fn gls(args: &[&str]) -> Run {
    let argv = std::iter::once("gls").chain(args.iter().copied());
    let Ok(cli) = gls_cli::parse(argv) else {
        return Run { ok: false, stdout: Vec::new() };
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let ok = gls_cli::run(&cli, &mut out, &mut err).is_ok();
    Run { ok, stdout: out }
}

fn probability_count(model: &Path) -> usize {
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(model).unwrap()).unwrap();
    json["probabilities"]
        .as_object()
        .unwrap()
        .values()
        .map(|p| p.as_object().unwrap().values().filter(|v| v.is_number()).count())
        .sum()
}

fn compactness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, tau, expected) in [("iris", "0.59", 12), ("breast_cancer", "0.32", 8)] {
        let model = dir.path().join(format!("{name}.json"));
        let m = manifest_path(name);
        let o = gls(&["train", "--data", m.to_str().unwrap(), "--threshold", tau, "--out", model.to_str().unwrap()]);
        let n = if o.ok { probability_count(&model) } else { 0 };
        pass &= n == expected;
        parts.push(format!("{name} {n} (expected {expected})"));
    }
    Outcome::new(pass, parts.join(", "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let iris = manifest_path("iris");
    let iris = iris.to_str().unwrap();
    let bc = manifest_path("breast_cancer");
    let bc = bc.to_str().unwrap();

    // Each command writes into `<dir>/<tag>/`; `{}` is replaced by that path.
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("shannon", vec!["shannon".into(), "--out".into(), "{}/curve.csv".into()]),
        (
            "train",
            ["train", "--data", iris, "--threshold", "0.59", "--out", "{}/model.json"]
                .map(String::from)
                .to_vec(),
        ),
        (
            "evaluate",
            [
                "evaluate", "--data", bc, "--threshold", "0.32", "--out", "{}/metrics.json",
                "--predictions", "{}/preds.csv",
            ]
            .map(String::from)
            .to_vec(),
        ),
        (
            "cv",
            ["cv", "--data", bc, "--out", "{}/cv.csv"].map(String::from).to_vec(),
        ),
    ];
    let thread_settings: [Option<&str>; 4] = [None, Some("1"), Some("3"), None];

    let mut mismatches = Vec::new();
    for (tag, args) in &commands {
        let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
        for (run, threads) in thread_settings.iter().enumerate() {
            let out_dir = dir.path().join(format!("{tag}-{run}"));
            std::fs::create_dir_all(&out_dir).unwrap();
            let mut argv: Vec<String> = Vec::new();
            if let Some(t) = threads {
                argv.push("--threads".into());
                argv.push((*t).into());
            }
            argv.extend(args.iter().map(|a| a.replace("{}", out_dir.to_str().unwrap())));
            let argv_ref: Vec<&str> = argv.iter().map(String::as_str).collect();
            let o = gls(&argv_ref);
            if !o.ok {
                mismatches.push(format!("{tag}: run {run} failed"));
                continue;
            }
            let mut artifacts: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out_dir)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
                })
                .collect();
            artifacts.sort();
            artifacts.push(("stdout".into(), o.stdout.clone()));
            match &reference {
                None => reference = Some(artifacts),
                Some(r) if *r != artifacts => {
                    mismatches.push(format!("{tag}: run {run} (threads {threads:?}) differs"))
                }
                Some(_) => {}
            }
        }
    }
    let mut o = Outcome::new(
        mismatches.is_empty(),
        format!(
            "{} commands x {} runs (threads default/1/3/default), {} mismatches",
            commands.len(),
            thread_settings.len(),
            mismatches.len()
        ),
    );
    o.details = mismatches;
    o
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("skew sweep minimum", shannon_curve),
        ("interval vs log-domain codelength", oracle_equivalence),
        ("first-return round trip", first_return_round_trip),
        ("pair-probability worked example", worked_example),
        ("smoothing normalization", smoothing_normalization),
        ("hold-out accuracy per dataset", table_one),
        ("cross-validated threshold search", cv_search),
        ("model compactness", compactness),
        ("CLI determinism", determinism),
    ];
    let outcomes: Vec<(&str, Outcome)> = criteria
        .iter()
        .map(|&(name, check)| {
            let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Outcome::new(false, format!("panicked: {msg}"))
            });
            (name, outcome)
        })
        .collect();
    if report(&outcomes) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
