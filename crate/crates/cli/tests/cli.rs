use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gls"))
        .args(args)
        .output()
        .expect("run gls")
}

fn manifest(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn train_reports_four_parameters_per_class() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("iris.json");
    let o = gls(&["train", "--data", &manifest("iris"), "--threshold", "0.59", "--out", path_str(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("parameters: 12"));
    assert!(stdout(&o).contains("train instances: 120"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(json["probabilities"].as_object().unwrap().len(), 3);

    let o = gls(&["train", "--data", &manifest("breast_cancer"), "--threshold", "0.32", "--out", path_str(&model)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("parameters: 8"));
}

#[test]
fn out_of_range_threshold_is_a_usage_error() {
    let o = gls(&["train", "--data", &manifest("iris"), "--threshold", "1.5", "--out", "/dev/null"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("outside [0, 1]"));
}

#[test]
fn evaluate_with_saved_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("bc.json");
    let metrics = dir.path().join("metrics.json");
    let preds = dir.path().join("preds.csv");
    let o = gls(&["train", "--data", &manifest("breast_cancer"), "--threshold", "0.32", "--out", path_str(&model)]);
    assert!(o.status.success());
    let o = gls(&[
        "evaluate",
        "--data",
        &manifest("breast_cancer"),
        "--model",
        path_str(&model),
        "--out",
        path_str(&metrics),
        "--predictions",
        path_str(&preds),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("accuracy: 0.929825"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&metrics).unwrap()).unwrap();
    let acc = json["metrics"]["accuracy"].as_f64().unwrap();
    assert!((acc - 0.9298).abs() <= 0.05);
    assert_eq!(json["metrics"]["total"], 114);
    let csv = std::fs::read_to_string(&preds).unwrap();
    assert!(csv.starts_with("row,predicted,malignant,benign\n"));
    assert_eq!(csv.lines().count(), 115);
}

#[test]
fn evaluate_rejects_feature_count_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("iris.json");
    assert!(gls(&["train", "--data", &manifest("iris"), "--threshold", "0.59", "--out", path_str(&model)])
        .status
        .success());
    let o = gls(&["evaluate", "--data", &manifest("wine"), "--model", path_str(&model)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("model expects 4 features"), "{}", stderr(&o));
}

#[test]
fn evaluate_requires_model_or_threshold() {
    let o = gls(&["evaluate", "--data", &manifest("iris")]);
    assert!(!o.status.success());
}

#[test]
fn load_errors_name_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "a,b,class\n1,2,x\n3,,y\n").unwrap();
    let m = dir.path().join("bad.json");
    std::fs::write(&m, r#"{"name": "bad", "path": "bad.csv", "label_column": "class"}"#).unwrap();
    let o = gls(&["train", "--data", path_str(&m), "--threshold", "0.5", "--out", "/dev/null"]);
    assert!(!o.status.success());
    let err = stderr(&o);
    assert!(err.contains("row 2") && err.contains("`b`"), "{err}");
}

#[test]
fn cv_single_point_grid() {
    let o = gls(&["cv", "--data", &manifest("iris"), "--grid", "0.5:0.5:0.01"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("0.500000,"));
    assert!(stderr(&o).contains("best threshold: 0.50"));
}

#[test]
fn cv_rejects_bad_grid() {
    let o = gls(&["cv", "--data", &manifest("iris"), "--grid", "0.5:0.1"]);
    assert!(!o.status.success());
}

fn best_score(o: &Output) -> f64 {
    let out = stdout(o);
    let line = out.lines().find(|l| l.starts_with("best threshold")).unwrap();
    let start = line.find("macro-F1 ").unwrap() + "macro-F1 ".len();
    line[start..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn cv_haberman_within_band() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("cv.csv");
    let o = gls(&["cv", "--data", &manifest("haberman"), "--out", path_str(&curve)]);
    assert!(o.status.success());
    let score = best_score(&o);
    assert!((0.40..=0.65).contains(&score), "{score}");
    let csv = std::fs::read_to_string(&curve).unwrap();
    assert!(csv.starts_with("threshold,mean_macro_f1\n"));
    assert_eq!(csv.lines().count(), 101);
}

#[test]
fn cv_breast_cancer_score() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("cv.csv");
    let o = gls(&["cv", "--data", &manifest("breast_cancer"), "--out", path_str(&curve)]);
    assert!(o.status.success());
    assert!(best_score(&o) >= 0.85);
}

fn argmin(o: &Output) -> f64 {
    let out = stdout(o);
    let line = out.lines().find(|l| l.starts_with("argmin b = ")).unwrap();
    line["argmin b = ".len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn shannon_argmin_tracks_symbol_probability() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = gls(&["shannon", "--out", path_str(&out)]);
    assert!(o.status.success());
    assert!((argmin(&o) - 0.45).abs() <= 0.05);
    let o = gls(&["shannon", "--p0", "0.5", "--out", path_str(&out)]);
    assert!((argmin(&o) - 0.5).abs() <= 0.05);
}

#[test]
fn shannon_is_repeatable() {
    let a = gls(&["shannon", "--trials", "1", "--seed", "7"]);
    let b = gls(&["shannon", "--trials", "1", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("b,mean_codelength\n"));
    assert_eq!(stdout(&a).lines().count(), 101);
}

#[test]
fn zero_threads_is_rejected() {
    let o = gls(&["--threads", "0", "shannon", "--trials", "1"]);
    assert!(!o.status.success());
}
