//! Per-feature min-max scaling and thresholding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::SymbolicSequence;

/// Column-wise minima and maxima of a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxStats {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Dataset("needs at least one training instance".into()))?;
        let mut min = first.clone();
        let mut max = first.clone();
        for (r, row) in rows.iter().enumerate().skip(1) {
            if row.len() != min.len() {
                return Err(Error::Row {
                    row: r,
                    source: Box::new(Error::FeatureCountMismatch {
                        expected: min.len(),
                        found: row.len(),
                    }),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn features(&self) -> usize {
        self.min.len()
    }

    pub fn is_constant(&self, feature: usize) -> bool {
        self.min[feature] == self.max[feature]
    }

    pub fn constant_features(&self) -> Vec<usize> {
        (0..self.features()).filter(|&j| self.is_constant(j)).collect()
    }

    /// Rescales one row into `[0, 1]`. Values outside the fitted range are
    /// clamped and constant features map to 0.
    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.features() {
            return Err(Error::FeatureCountMismatch {
                expected: self.features(),
                found: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let (lo, hi) = (self.min[j], self.max[j]);
                if hi > lo {
                    ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn apply(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter()
            .enumerate()
            .map(|(r, row)| {
                self.apply_row(row).map_err(|e| Error::Row {
                    row: r,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

/// `1` where the value is at least `threshold`, `0` elsewhere.
pub fn binarize_row(row: &[f64], threshold: f64) -> SymbolicSequence {
    SymbolicSequence::from_bools(row.iter().map(|&v| v >= threshold))
}

pub fn binarize(rows: &[Vec<f64>], threshold: f64) -> Vec<SymbolicSequence> {
    rows.iter().map(|r| binarize_row(r, threshold)).collect()
}
