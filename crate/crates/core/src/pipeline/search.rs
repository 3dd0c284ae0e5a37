//! Cross-validated threshold search.

use std::io::Write;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::predict;
use crate::error::{Error, Result};
use crate::model::{train, TrainingConfig};
use crate::pipeline::dataset::Dataset;
use crate::pipeline::metrics::compute_metrics;
use crate::pipeline::normalize::{binarize, MinMaxStats};
use crate::pipeline::split::stratified_kfold;

/// Evenly spaced thresholds `lo, lo + step, ..., hi`, written `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        Self {
            lo: 0.01,
            hi: 1.0,
            step: 0.01,
        }
    }
}

impl ThresholdGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let g = Self { lo, hi, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.lo.is_finite()
            && self.hi.is_finite()
            && (0.0..=1.0).contains(&self.lo)
            && (0.0..=1.0).contains(&self.hi)
            && self.lo <= self.hi
            && self.step > 0.0
            && self.step.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "grid {}:{}:{} must satisfy 0 <= lo <= hi <= 1 and step > 0",
                self.lo, self.hi, self.step
            )))
        }
    }

    /// Grid values, rounded to 10 decimals so that `0.01:1.00:0.01` gives
    /// exactly 0.01, 0.02, ..., 1.0.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|i| ((self.lo + i as f64 * self.step) * 1e10).round() / 1e10)
            .collect()
    }
}

impl FromStr for ThresholdGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidParameter(format!("grid `{s}` is not of the form lo:hi:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(v[0], v[1], v[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSearchResult {
    pub thresholds: Vec<f64>,
    pub mean_macro_f1: Vec<f64>,
    pub best_threshold: f64,
    pub best_score: f64,
    pub folds: usize,
}

impl CvSearchResult {
    /// `threshold,mean_macro_f1` with six decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "threshold,mean_macro_f1")?;
        for (t, f) in self.thresholds.iter().zip(&self.mean_macro_f1) {
            writeln!(out, "{t:.6},{f:.6}")?;
        }
        Ok(())
    }
}

struct PreparedFold {
    train_x: Vec<Vec<f64>>,
    train_y: Vec<String>,
    val_x: Vec<Vec<f64>>,
    val_y: Vec<String>,
    stats: MinMaxStats,
}

fn fold_score(ds: &Dataset, fold: &PreparedFold, config: &TrainingConfig) -> Result<f64> {
    let model = train(
        &binarize(&fold.train_x, config.threshold),
        &fold.train_y,
        &ds.classes,
        fold.stats.clone(),
        config,
    )?;
    let preds = predict(&model, &binarize(&fold.val_x, config.threshold))?;
    Ok(compute_metrics(&fold.val_y, &preds.labels, &ds.classes)?.macro_f1)
}

/// Scores every grid threshold by mean validation macro-F1 over `k`
/// stratified folds and returns the best one (the smallest on ties).
///
/// Normalization is refitted on each fold's training part. A fold whose
/// training fails is skipped with a warning; a threshold for which every
/// fold fails scores 0.
pub fn threshold_search(
    ds: &Dataset,
    grid: &ThresholdGrid,
    k: usize,
    seed: u32,
    base: &TrainingConfig,
) -> Result<CvSearchResult> {
    grid.validate()?;
    let folds = stratified_kfold(&ds.labels, k, seed)?;
    let prepared = folds
        .iter()
        .map(|f| {
            let train = ds.subset(&f.train);
            let val = ds.subset(&f.validation);
            let stats = MinMaxStats::fit(&train.features)?;
            Ok(PreparedFold {
                train_x: stats.apply(&train.features)?,
                train_y: train.labels,
                val_x: stats.apply(&val.features)?,
                val_y: val.labels,
                stats,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let thresholds = grid.points();
    let mean_macro_f1: Vec<f64> = thresholds
        .par_iter()
        .map(|&threshold| {
            let config = TrainingConfig { threshold, ..*base };
            let mut total = 0.0;
            let mut ok = 0usize;
            for (i, fold) in prepared.iter().enumerate() {
                match fold_score(ds, fold, &config) {
                    Ok(f1) => {
                        total += f1;
                        ok += 1;
                    }
                    Err(e) => warn!("threshold {threshold}: skipping fold {i}: {e}"),
                }
            }
            if ok == 0 {
                0.0
            } else {
                total / ok as f64
            }
        })
        .collect();

    let mut best = 0;
    for (i, &s) in mean_macro_f1.iter().enumerate() {
        if s > mean_macro_f1[best] {
            best = i;
        }
    }
    Ok(CvSearchResult {
        best_threshold: thresholds[best],
        best_score: mean_macro_f1[best],
        thresholds,
        mean_macro_f1,
        folds: k,
    })
}
