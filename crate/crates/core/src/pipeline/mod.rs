//! Data handling and the evaluation protocol around the classifier.

pub mod dataset;
pub mod metrics;
pub mod normalize;
pub mod search;
pub mod split;

use crate::classify::{predict_raw, Predictions};
use crate::error::Result;
use crate::model::{train, ClassModelSet, TrainingConfig};

pub use dataset::{load_manifest, Dataset, DatasetManifest};
pub use metrics::{compute_metrics, ClassMetrics, MetricsReport};
pub use normalize::{binarize, binarize_row, MinMaxStats};
pub use search::{threshold_search, CvSearchResult, ThresholdGrid};
pub use split::{kfold, stratified_kfold, train_test_split, Fold, LegacyShuffler, Split};

pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_SPLIT_SEED: u32 = 42;
pub const DEFAULT_CV_SEED: u32 = 90;
pub const DEFAULT_FOLDS: usize = 5;

/// Fits min-max scaling on `train_set`, binarizes and trains. The class order
/// is `train_set.classes`.
pub fn fit(train_set: &Dataset, config: &TrainingConfig) -> Result<ClassModelSet> {
    config.validate()?;
    let stats = MinMaxStats::fit(&train_set.features)?;
    let x_bin = binarize(&stats.apply(&train_set.features)?, config.threshold);
    train(&x_bin, &train_set.labels, &train_set.classes, stats, config)
}

/// Predicts `ds` with `model` and scores the predictions against its labels.
pub fn evaluate(model: &ClassModelSet, ds: &Dataset) -> Result<(Predictions, MetricsReport)> {
    let preds = predict_raw(model, &ds.features)?;
    let report = compute_metrics(&ds.labels, &preds.labels, &model.labels())?;
    Ok((preds, report))
}

#[derive(Debug, Clone)]
pub struct HoldoutRun {
    pub split: Split,
    pub train_counts: Vec<usize>,
    pub test_counts: Vec<usize>,
    pub model: ClassModelSet,
    pub predictions: Predictions,
    pub metrics: MetricsReport,
}

/// Shuffled hold-out split, training on one side and scoring on the other.
pub fn run_holdout(
    ds: &Dataset,
    test_fraction: f64,
    seed: u32,
    config: &TrainingConfig,
) -> Result<HoldoutRun> {
    let split = train_test_split(ds, test_fraction, seed)?;
    let train_set = ds.subset(&split.train);
    let test_set = ds.subset(&split.test);
    let model = fit(&train_set, config)?;
    let (predictions, metrics) = evaluate(&model, &test_set)?;
    Ok(HoldoutRun {
        train_counts: train_set.class_counts(),
        test_counts: test_set.class_counts(),
        split,
        model,
        predictions,
        metrics,
    })
}
