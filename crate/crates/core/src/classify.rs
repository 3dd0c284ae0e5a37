//! Prediction by minimum codelength.
//!
//! A binarized instance is coded once per class; the class whose map gives
//! the fewest whole bits wins. Ties go to the earliest class in model order.

use std::io::Write;

use rayon::prelude::*;

use crate::coding::{back_iterate_second, codelength_log_domain, Codelength};
use crate::error::{Error, Result};
use crate::maps::SymbolicSequence;
use crate::model::ClassModelSet;

/// One row of the codelength matrix plus its decision.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub codelengths: Vec<Codelength>,
    /// Exact `-log2` widths before the ceiling, for diagnostics.
    pub exact_bits: Vec<f64>,
    /// Index into the model's class list.
    pub predicted: usize,
}

fn argmin(codelengths: &[Codelength]) -> usize {
    let mut best = 0;
    for (i, c) in codelengths.iter().enumerate().skip(1) {
        if *c < codelengths[best] {
            best = i;
        }
    }
    best
}

fn record(codelengths: Vec<Codelength>, exact_bits: Vec<f64>) -> PredictionRecord {
    PredictionRecord {
        predicted: argmin(&codelengths),
        codelengths,
        exact_bits,
    }
}

/// Classifies one binarized instance using log-domain codelengths.
pub fn predict_one(model: &ClassModelSet, x_bin: &SymbolicSequence) -> Result<PredictionRecord> {
    let (codelengths, exact_bits) = model
        .classes
        .iter()
        .map(|c| codelength_log_domain(&c.map, x_bin, model.coding).map(|l| (l.codelength, l.exact_bits)))
        .collect::<Result<(Vec<_>, Vec<_>)>>()?;
    Ok(record(codelengths, exact_bits))
}

/// Same decision rule, but codelengths come from explicit interval
/// back-iteration. Only meaningful for short sequences.
pub fn predict_one_interval(model: &ClassModelSet, x_bin: &SymbolicSequence) -> Result<PredictionRecord> {
    let (codelengths, exact_bits) = model
        .classes
        .iter()
        .map(|c| back_iterate_second(&c.map, x_bin, model.coding).map(|e| (e.codelength, e.exact_bits)))
        .collect::<Result<(Vec<_>, Vec<_>)>>()?;
    Ok(record(codelengths, exact_bits))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictions {
    pub labels: Vec<String>,
    pub records: Vec<PredictionRecord>,
}

impl Predictions {
    /// Writes `row,predicted,<class...>` with one codelength column per class.
    pub fn write_csv<W: Write>(&self, model: &ClassModelSet, mut out: W) -> std::io::Result<()> {
        write!(out, "row,predicted")?;
        for c in &model.classes {
            write!(out, ",{}", c.label)?;
        }
        writeln!(out)?;
        for (i, (label, rec)) in self.labels.iter().zip(&self.records).enumerate() {
            write!(out, "{i},{label}")?;
            for c in &rec.codelengths {
                write!(out, ",{c}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Row-wise [`predict_one`]. Rows are processed in parallel; output order
/// follows input order.
pub fn predict(model: &ClassModelSet, rows: &[SymbolicSequence]) -> Result<Predictions> {
    let records = rows
        .par_iter()
        .enumerate()
        .map(|(row, x)| {
            predict_one(model, x).map_err(|e| Error::Row {
                row,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = records
        .iter()
        .map(|r| model.classes[r.predicted].label.clone())
        .collect();
    Ok(Predictions { labels, records })
}

/// Normalizes, binarizes and classifies raw feature rows.
pub fn predict_raw(model: &ClassModelSet, rows: &[Vec<f64>]) -> Result<Predictions> {
    let binarized = rows
        .iter()
        .enumerate()
        .map(|(row, r)| {
            model.prepare(r).map_err(|e| Error::Row {
                row,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    predict(model, &binarized)
}
