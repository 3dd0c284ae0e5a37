//! Training: one second-return map per class.
//!
//! Each training instance is binarized, cut into non-overlapping pairs and
//! turned into four pair frequencies. A class keeps the mean of its
//! instances' frequencies. When any of the four means is exactly zero the
//! class switches to additive smoothing over all four.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coding::{pairs, FirstPairSeed, OddLengthPolicy, PairCoding};
use crate::error::{Error, Result};
use crate::maps::{PairProbabilities, SecondReturnMap, SymbolicSequence};
use crate::pipeline::normalize::{binarize_row, MinMaxStats};

pub const DEFAULT_ALPHA: f64 = 0.001;
pub const MODEL_VERSION: u32 = 1;

/// Relative frequencies of the non-overlapping pairs of one sequence.
pub fn pair_probabilities(seq: &SymbolicSequence, policy: OddLengthPolicy) -> Result<PairProbabilities> {
    let pairs = pairs(seq, policy)?;
    let mut counts = [0usize; 4];
    for p in &pairs {
        counts[p.index()] += 1;
    }
    let total = pairs.len() as f64;
    Ok(PairProbabilities::from_array(counts.map(|c| c as f64 / total)))
}

/// Component sums, accumulated in sorted order so the result does not
/// depend on instance order.
fn component_sums(per_instance: &[PairProbabilities]) -> [f64; 4] {
    let mut sums = [0.0; 4];
    for (k, sum) in sums.iter_mut().enumerate() {
        let mut column: Vec<f64> = per_instance.iter().map(|p| p.to_array()[k]).collect();
        column.sort_by(f64::total_cmp);
        *sum = column.iter().sum();
    }
    sums
}

pub fn class_average(per_instance: &[PairProbabilities]) -> Result<PairProbabilities> {
    if per_instance.is_empty() {
        return Err(Error::EmptyClass(String::new()));
    }
    let m = per_instance.len() as f64;
    Ok(PairProbabilities::from_array(
        component_sums(per_instance).map(|s| s / m),
    ))
}

/// `(sum + alpha) / (m + 4 alpha)` for each pair; `sums` in region order.
pub fn laplace_smooth(sums: [f64; 4], m: usize, alpha: f64) -> PairProbabilities {
    let denom = m as f64 + 4.0 * alpha;
    PairProbabilities::from_array(sums.map(|s| (s + alpha) / denom))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingConfig {
    pub threshold: f64,
    pub alpha: f64,
    pub coding: PairCoding,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            alpha: DEFAULT_ALPHA,
            coding: PairCoding::default(),
        }
    }
}

impl TrainingConfig {
    pub fn with_threshold(threshold: f64) -> Self {
        Self {
            threshold,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold {} must lie in [0, 1]",
                self.threshold
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothing alpha {} must be positive",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub label: String,
    pub map: SecondReturnMap,
    pub smoothed: bool,
}

/// Everything needed to classify raw feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassModelSet {
    pub threshold: f64,
    pub alpha: f64,
    pub coding: PairCoding,
    pub normalization: MinMaxStats,
    pub classes: Vec<ClassModel>,
}

/// Labels in order of first appearance.
pub fn classes_in_order<S: AsRef<str>>(labels: &[S]) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for l in labels {
        if !seen.iter().any(|s| s == l.as_ref()) {
            seen.push(l.as_ref().to_owned());
        }
    }
    seen
}

/// Fits one second-return map per class.
///
/// `classes` fixes the class order (and therefore tie-breaking); every class
/// must have at least one instance and every label must be listed.
pub fn train(
    x_bin: &[SymbolicSequence],
    labels: &[String],
    classes: &[String],
    normalization: MinMaxStats,
    config: &TrainingConfig,
) -> Result<ClassModelSet> {
    config.validate()?;
    if x_bin.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: x_bin.len(),
            right: labels.len(),
        });
    }
    let mut per_class: Vec<Vec<PairProbabilities>> = vec![Vec::new(); classes.len()];
    for (row, (seq, label)) in x_bin.iter().zip(labels).enumerate() {
        let c = classes
            .iter()
            .position(|k| k == label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
        let probs = pair_probabilities(seq, config.coding.odd_length).map_err(|e| Error::Row {
            row,
            source: Box::new(e),
        })?;
        per_class[c].push(probs);
    }

    let classes = classes
        .iter()
        .zip(&per_class)
        .map(|(label, instances)| {
            if instances.is_empty() {
                return Err(Error::EmptyClass(label.clone()));
            }
            let average = class_average(instances)?;
            let smoothed = average.any_zero();
            let probs = if smoothed {
                laplace_smooth(component_sums(instances), instances.len(), config.alpha)
            } else {
                average
            };
            Ok(ClassModel {
                label: label.clone(),
                map: SecondReturnMap::new(probs)?,
                smoothed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ClassModelSet {
        threshold: config.threshold,
        alpha: config.alpha,
        coding: config.coding,
        normalization,
        classes,
    })
}

impl ClassModelSet {
    pub fn labels(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.label.clone()).collect()
    }

    /// Four probabilities per class.
    pub fn parameter_count(&self) -> usize {
        4 * self.classes.len()
    }

    pub fn features(&self) -> usize {
        self.normalization.features()
    }

    /// Normalizes and binarizes one raw feature vector.
    pub fn prepare(&self, row: &[f64]) -> Result<SymbolicSequence> {
        let scaled = self.normalization.apply_row(row)?;
        Ok(binarize_row(&scaled, self.threshold))
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            version: MODEL_VERSION,
            threshold: self.threshold,
            alpha: self.alpha,
            odd_length_policy: self.coding.odd_length,
            first_pair_seed: self.coding.first_pair_seed,
            feature_min: self.normalization.min.clone(),
            feature_max: self.normalization.max.clone(),
            classes: self.labels(),
            probabilities: self
                .classes
                .iter()
                .map(|c| (c.label.clone(), c.map.probabilities()))
                .collect(),
            smoothed: self
                .classes
                .iter()
                .filter(|c| c.smoothed)
                .map(|c| c.label.clone())
                .collect(),
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        if file.version != MODEL_VERSION {
            return Err(Error::ModelVersion(file.version));
        }
        let config = TrainingConfig {
            threshold: file.threshold,
            alpha: file.alpha,
            coding: PairCoding {
                odd_length: file.odd_length_policy,
                first_pair_seed: file.first_pair_seed,
            },
        };
        config.validate()?;
        if file.feature_min.len() != file.feature_max.len() {
            return Err(Error::LengthMismatch {
                left: file.feature_min.len(),
                right: file.feature_max.len(),
            });
        }
        if file.probabilities.len() != file.classes.len() {
            return Err(Error::InvalidProbabilities(format!(
                "{} probability sets for {} classes",
                file.probabilities.len(),
                file.classes.len()
            )));
        }
        let classes = file
            .classes
            .iter()
            .map(|label| {
                let probs = file
                    .probabilities
                    .get(label)
                    .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
                Ok(ClassModel {
                    label: label.clone(),
                    map: SecondReturnMap::new(*probs)?,
                    smoothed: file.smoothed.contains(label),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            threshold: config.threshold,
            alpha: config.alpha,
            coding: config.coding,
            normalization: MinMaxStats {
                min: file.feature_min,
                max: file.feature_max,
            },
            classes,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// On-disk model layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub threshold: f64,
    pub alpha: f64,
    pub odd_length_policy: OddLengthPolicy,
    #[serde(default)]
    pub first_pair_seed: FirstPairSeed,
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    pub classes: Vec<String>,
    pub probabilities: BTreeMap<String, PairProbabilities>,
    /// Classes whose probabilities went through additive smoothing.
    #[serde(default)]
    pub smoothed: Vec<String>,
}
