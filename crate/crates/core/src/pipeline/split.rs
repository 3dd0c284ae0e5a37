//! Seeded hold-out splits and k-fold partitions.
//!
//! Shuffling uses MT19937 seeded with `init_genrand(seed)` and a
//! Fisher-Yates pass that draws each swap index by masked rejection
//! sampling on 32-bit outputs. This is the same stream NumPy's legacy
//! `RandomState(seed).shuffle` produces, so a seed gives the same
//! permutation in both.

use log::warn;
use rand_mt::Mt;

use crate::error::{Error, Result};
use crate::pipeline::dataset::Dataset;

pub struct LegacyShuffler {
    mt: Mt,
}

impl LegacyShuffler {
    pub fn new(seed: u32) -> Self {
        Self { mt: Mt::new(seed) }
    }

    /// Uniform integer in `0..=max`.
    fn interval(&mut self, max: u32) -> u32 {
        if max == 0 {
            return 0;
        }
        let mut mask = max;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        loop {
            let v = self.mt.next_u32() & mask;
            if v <= max {
                return v;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.interval(i as u32) as usize;
            items.swap(i, j);
        }
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..n).collect();
        self.shuffle(&mut v);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Shuffled hold-out split.
///
/// The test set takes `ceil(test_fraction * n)` instances from the front of
/// a seeded permutation and the training set takes the rest, in permutation
/// order. Fails if a class ends up with no training instance.
pub fn train_test_split(ds: &Dataset, test_fraction: f64, seed: u32) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction {test_fraction} must lie in (0, 1)"
        )));
    }
    let n = ds.len();
    let n_test = (test_fraction * n as f64).ceil() as usize;
    if n_test == 0 || n_test >= n {
        return Err(Error::InvalidParameter(format!(
            "test fraction {test_fraction} leaves an empty side for {n} instances"
        )));
    }
    let perm = LegacyShuffler::new(seed).permutation(n);
    let split = Split {
        test: perm[..n_test].to_vec(),
        train: perm[n_test..].to_vec(),
    };
    for class in &ds.classes {
        if !split.train.iter().any(|&i| &ds.labels[i] == class) {
            return Err(Error::ClassAbsentFromTrain(class.clone()));
        }
    }
    Ok(split)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

fn folds_from_assignment(assignment: &[usize], k: usize) -> Vec<Fold> {
    (0..k)
        .map(|f| {
            let (validation, train): (Vec<usize>, Vec<usize>) =
                (0..assignment.len()).partition(|&i| assignment[i] == f);
            Fold { train, validation }
        })
        .collect()
}

/// Shuffled k-fold without stratification. The first `n % k` folds get one
/// extra instance.
pub fn kfold(n: usize, k: usize, seed: u32) -> Result<Vec<Fold>> {
    check_k(n, k)?;
    let perm = LegacyShuffler::new(seed).permutation(n);
    let mut assignment = vec![0; n];
    let mut start = 0;
    for f in 0..k {
        let size = n / k + usize::from(f < n % k);
        for &i in &perm[start..start + size] {
            assignment[i] = f;
        }
        start += size;
    }
    Ok(folds_from_assignment(&assignment, k))
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    if k > n {
        return Err(Error::FoldsExceedInstances { folds: k, instances: n });
    }
    Ok(())
}

/// Stratified k-fold.
///
/// Classes are encoded by first appearance. The number of instances of each
/// class in each fold comes from dealing the class-sorted labels round-robin
/// over the folds; each class's block of fold ids is then shuffled and
/// handed out to that class's instances in index order. If some class has
/// fewer than `k` instances this falls back to [`kfold`].
pub fn stratified_kfold<S: AsRef<str>>(labels: &[S], k: usize, seed: u32) -> Result<Vec<Fold>> {
    let n = labels.len();
    check_k(n, k)?;
    let classes = crate::model::classes_in_order(labels);
    let encoded: Vec<usize> = labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l.as_ref()).unwrap_or_default())
        .collect();
    let mut counts = vec![0usize; classes.len()];
    for &c in &encoded {
        counts[c] += 1;
    }
    if counts.iter().any(|&c| c < k) {
        warn!(
            "a class has fewer than {k} instances (counts {counts:?}); using plain k-fold"
        );
        return kfold(n, k, seed);
    }

    let mut sorted = encoded.clone();
    sorted.sort_unstable();
    let mut allocation = vec![vec![0usize; classes.len()]; k];
    for (pos, &c) in sorted.iter().enumerate() {
        allocation[pos % k][c] += 1;
    }

    let mut rng = LegacyShuffler::new(seed);
    let mut assignment = vec![0usize; n];
    for c in 0..classes.len() {
        let mut fold_ids: Vec<usize> = (0..k)
            .flat_map(|f| std::iter::repeat_n(f, allocation[f][c]))
            .collect();
        rng.shuffle(&mut fold_ids);
        let members = (0..n).filter(|&i| encoded[i] == c);
        for (i, f) in members.zip(fold_ids) {
            assignment[i] = f;
        }
    }
    Ok(folds_from_assignment(&assignment, k))
}
