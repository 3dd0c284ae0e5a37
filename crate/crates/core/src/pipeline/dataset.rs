//! CSV datasets and their JSON manifests.

use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::classes_in_order;

/// Points at a CSV file and names its label column.
///
/// A relative `path` is resolved against the directory holding the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub path: PathBuf,
    /// Defaults to the last column.
    #[serde(default)]
    pub label_column: Option<String>,
    #[serde(default)]
    pub positive_class: Option<String>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest = serde_json::from_str(&text)?;
        if manifest.path.is_relative() {
            if let Some(dir) = path.parent() {
                manifest.path = dir.join(&manifest.path);
            }
        }
        Ok(manifest)
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        let file = std::fs::File::open(&self.path).map_err(|e| Error::io(&self.path, e))?;
        let ds = Dataset::from_csv(&self.name, file, self.label_column.as_deref())?;
        if let Some(pos) = &self.positive_class {
            if !ds.classes.contains(pos) {
                return Err(Error::Dataset(format!(
                    "{}: positive class `{pos}` does not occur in the label column",
                    self.name
                )));
            }
        }
        Ok(ds)
    }
}

/// Reads a manifest and the dataset it points to.
pub fn load_manifest(path: &Path) -> Result<(DatasetManifest, Dataset)> {
    let manifest = DatasetManifest::load(path)?;
    let ds = manifest.load_dataset()?;
    Ok((manifest, ds))
}

/// A labelled feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// Distinct labels in order of first appearance.
    pub classes: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "?" | "NA" | "N/A" | "na" | "nan" | "NaN" | "null")
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        if let Some((row, r)) = features
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != feature_names.len())
        {
            return Err(Error::Row {
                row,
                source: Box::new(Error::FeatureCountMismatch {
                    expected: feature_names.len(),
                    found: r.len(),
                }),
            });
        }
        let classes = classes_in_order(&labels);
        Ok(Self {
            name: name.into(),
            feature_names,
            features,
            labels,
            classes,
        })
    }

    /// Parses a CSV with a header row. Every column except the label column
    /// is a numeric feature. Missing or non-numeric cells are rejected with
    /// the 1-based data row and the column name.
    pub fn from_csv<R: Read>(name: &str, reader: R, label_column: Option<&str>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if header.len() < 2 {
            return Err(Error::Dataset(format!(
                "{name}: need at least one feature column and a label column"
            )));
        }
        let label_idx = match label_column {
            Some(col) => header.iter().position(|h| h == col).ok_or_else(|| {
                Error::Dataset(format!("{name}: label column `{col}` not found in header"))
            })?,
            None => header.len() - 1,
        };
        let feature_names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != label_idx)
            .map(|(_, h)| h.clone())
            .collect();

        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let mut values = Vec::with_capacity(feature_names.len());
            for (j, cell) in record.iter().enumerate() {
                let column = &header[j];
                if is_missing(cell) {
                    return Err(Error::BadValue {
                        row,
                        column: column.clone(),
                        message: "missing value".into(),
                    });
                }
                if j == label_idx {
                    labels.push(cell.to_owned());
                    continue;
                }
                let v: f64 = cell.parse().map_err(|_| Error::BadValue {
                    row,
                    column: column.clone(),
                    message: format!("`{cell}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::BadValue {
                        row,
                        column: column.clone(),
                        message: format!("`{cell}` is not finite"),
                    });
                }
                values.push(v);
            }
            features.push(values);
        }
        if features.is_empty() {
            return Err(Error::Dataset(format!("{name}: no data rows")));
        }
        Self::new(name, feature_names, features, labels)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Rows at `indices`, in that order. The class list is inherited so
    /// class order stays stable across splits.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            classes: self.classes.clone(),
        }
    }

    /// Instances per class, in class order.
    pub fn class_counts(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| self.labels.iter().filter(|l| *l == c).count())
            .collect()
    }
}
