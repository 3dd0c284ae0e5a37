//! Back-iteration coding on skew tent maps.
//!
//! Back-iterating a symbolic sequence yields the interval `[L, U]` of initial
//! conditions whose orbit reproduces the sequence. The code for the sequence
//! is any point of that interval, so its length is `ceil(-log2(U - L))` bits.
//!
//! Every second-return update multiplies the interval width by the
//! probability of the pair being encoded, so the same quantity can be
//! computed as a sum of `-log2 p` terms without ever forming the interval.
//! [`codelength_log_domain`] does that and does not underflow. The
//! floating-point interval route loses relative precision as soon as the
//! width approaches the spacing of doubles around the interval, which can
//! happen after a few dozen symbols; [`exact`] repeats it in rational
//! arithmetic.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{Pair, SecondReturnMap, SkewTentMap, SymbolicSequence};

pub mod exact;

/// Closed interval `[lower, upper]` inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        if lower > upper {
            Self {
                lower: upper,
                upper: lower,
            }
        } else {
            Self { lower, upper }
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }
}

/// A codelength in whole bits, or infinity for an empty interval.
///
/// `Infinite` orders after every finite length so an argmin over classes
/// is always defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Codelength {
    Bits(u64),
    Infinite,
}

impl Codelength {
    /// Ceiling of an exact bit count; non-finite input maps to `Infinite`.
    pub fn from_exact(bits: f64) -> Self {
        if bits.is_finite() {
            Codelength::Bits(bits.ceil().max(0.0) as u64)
        } else {
            Codelength::Infinite
        }
    }

    pub fn bits(self) -> Option<u64> {
        match self {
            Codelength::Bits(b) => Some(b),
            Codelength::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Codelength::Bits(_))
    }
}

impl fmt::Display for Codelength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codelength::Bits(b) => write!(f, "{b}"),
            Codelength::Infinite => f.write_str("inf"),
        }
    }
}

/// `-log2(U - L)`, infinite for a zero-width interval.
pub fn exact_bits(interval: &Interval) -> f64 {
    let width = interval.width();
    if width > 0.0 {
        -width.log2()
    } else {
        f64::INFINITY
    }
}

/// `ceil(-log2(U - L))`.
pub fn codelength_from_interval(interval: &Interval) -> Codelength {
    Codelength::from_exact(exact_bits(interval))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingResult {
    pub interval: Interval,
    /// Midpoint of the interval, the canonical initial condition.
    pub x0: f64,
    pub codelength: Codelength,
    pub exact_bits: f64,
}

impl EncodingResult {
    fn from_interval(interval: Interval) -> Self {
        let exact_bits = exact_bits(&interval);
        Self {
            interval,
            x0: interval.midpoint(),
            codelength: Codelength::from_exact(exact_bits),
            exact_bits,
        }
    }
}

/// Recovers the interval of initial conditions for `seq` under the
/// first-return map.
///
/// The sequence is walked backwards: the last symbol seeds `[0, b]` or
/// `[b, 1]` and every earlier symbol pulls the interval back through the
/// inverse of its branch. Forward-iterating any interior point reproduces
/// `seq` from its first symbol.
pub fn back_iterate_first(map: &SkewTentMap, seq: &SymbolicSequence) -> Result<EncodingResult> {
    let b = map.skew();
    let mut reversed = seq.symbols().iter().rev();
    let last = *reversed.next().ok_or(Error::EmptySequence)?;
    let (mut lo, mut hi) = if last == 0 { (0.0, b) } else { (b, 1.0) };
    for &symbol in reversed {
        if symbol == 0 {
            lo *= b;
            hi *= b;
        } else {
            lo = lo * b - lo + 1.0;
            hi = hi * b - hi + 1.0;
        }
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
    }
    Ok(EncodingResult::from_interval(Interval::new(lo, hi)))
}

/// What to do with the last symbol of an odd-length sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddLengthPolicy {
    #[default]
    Drop,
    /// Pair the trailing symbol with a `0`.
    PadZero,
}

/// Initial interval used when the first pair is `10`.
///
/// The published back-iteration seeds `10` with `[1 - (p00 + p01 + p11), 1]`,
/// an interval of width `1 - p10` rather than the `[p00 + p01 + p11, 1]`
/// region of the map. Reported benchmark accuracies depend on the published
/// seed, so it is the default; both coding routes honour the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstPairSeed {
    #[default]
    Published,
    Region,
}

/// Options shared by every second-return coding routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairCoding {
    pub odd_length: OddLengthPolicy,
    pub first_pair_seed: FirstPairSeed,
}

/// Non-overlapping pairs `(s1, s2), (s3, s4), ...`.
pub fn pairs(seq: &SymbolicSequence, policy: OddLengthPolicy) -> Result<Vec<Pair>> {
    let symbols = seq.symbols();
    let mut out: Vec<Pair> = symbols
        .chunks_exact(2)
        .map(|c| Pair::from_symbols(c[0], c[1]))
        .collect();
    if policy == OddLengthPolicy::PadZero && symbols.len() % 2 == 1 {
        out.push(Pair::from_symbols(symbols[symbols.len() - 1], 0));
    }
    if out.is_empty() {
        return Err(Error::SequenceTooShort { len: symbols.len() });
    }
    Ok(out)
}

fn seed_interval(map: &SecondReturnMap, pair: Pair, seed: FirstPairSeed) -> (f64, f64) {
    let p = map.probabilities();
    match pair {
        Pair::ZeroZero => (0.0, p.p00),
        Pair::ZeroOne => (p.p00, p.p00 + p.p01),
        Pair::OneOne => (p.p00 + p.p01, p.p00 + p.p01 + p.p11),
        Pair::OneZero => match seed {
            FirstPairSeed::Published => (1.0 - (p.p00 + p.p01 + p.p11), 1.0),
            FirstPairSeed::Region => (p.p00 + p.p01 + p.p11, 1.0),
        },
    }
}

fn pull_back(map: &SecondReturnMap, pair: Pair, x: f64) -> f64 {
    let p = map.probabilities();
    match pair {
        Pair::ZeroZero => x * p.p00,
        Pair::ZeroOne => p.p00 + p.p01 - p.p01 * x,
        Pair::OneOne => p.p11 * x + p.p00 + p.p01,
        Pair::OneZero => 1.0 - p.p10 * x,
    }
}

/// Interval back-iteration on the second-return map.
///
/// The first pair seeds the interval, each later pair maps it through the
/// inverse branch of its region. A pair with zero probability collapses the
/// interval and yields an infinite codelength rather than an error.
pub fn back_iterate_second(
    map: &SecondReturnMap,
    seq: &SymbolicSequence,
    coding: PairCoding,
) -> Result<EncodingResult> {
    let pairs = pairs(seq, coding.odd_length)?;
    let (mut lo, mut hi) = seed_interval(map, pairs[0], coding.first_pair_seed);
    for &pair in &pairs[1..] {
        lo = pull_back(map, pair, lo);
        hi = pull_back(map, pair, hi);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
    }
    Ok(EncodingResult::from_interval(Interval::new(lo, hi)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCodelength {
    pub exact_bits: f64,
    pub codelength: Codelength,
}

/// `-log2(U - L)` for the second-return interval, accumulated as a sum of
/// per-pair `-log2` widths.
pub fn codelength_log_domain(
    map: &SecondReturnMap,
    seq: &SymbolicSequence,
    coding: PairCoding,
) -> Result<LogCodelength> {
    let pairs = pairs(seq, coding.odd_length)?;
    let (lo, hi) = seed_interval(map, pairs[0], coding.first_pair_seed);
    let mut bits = neg_log2(hi - lo);
    for &pair in &pairs[1..] {
        bits += neg_log2(map.probability(pair));
    }
    Ok(LogCodelength {
        exact_bits: bits,
        codelength: Codelength::from_exact(bits),
    })
}

fn neg_log2(width: f64) -> f64 {
    if width > 0.0 {
        -width.log2()
    } else {
        f64::INFINITY
    }
}

/// Fraction of zeros in `seq`, the skew that makes first-return coding
/// Shannon-optimal.
pub fn optimal_skew(seq: &SymbolicSequence) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let b = seq.zeros() as f64 / seq.len() as f64;
    if b <= 0.0 || b >= 1.0 {
        return Err(Error::DegenerateSkew(b));
    }
    Ok(b)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
            v[n - 1] = hi;
            v
        }
    }
}

/// Average codelength of random i.i.d. binary sequences as a function of
/// the first-return skew.
#[derive(Debug, Clone, PartialEq)]
pub struct ShannonExperimentConfig {
    pub sequence_length: usize,
    /// Probability of emitting a `0`.
    pub prob_zero: f64,
    pub trials_per_b: usize,
    pub b_grid: Vec<f64>,
    pub rng_seed: u64,
}

impl Default for ShannonExperimentConfig {
    fn default() -> Self {
        Self {
            sequence_length: 20,
            prob_zero: 0.45,
            trials_per_b: 100,
            b_grid: linspace(0.01, 0.99, 100),
            rng_seed: 42,
        }
    }
}

impl ShannonExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sequence_length == 0 {
            return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
        }
        if !(self.prob_zero > 0.0 && self.prob_zero < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "probability of zero {} must lie in (0, 1)",
                self.prob_zero
            )));
        }
        if self.trials_per_b == 0 {
            return Err(Error::InvalidParameter("at least one trial per skew is required".into()));
        }
        if self.b_grid.is_empty() {
            return Err(Error::InvalidParameter("skew grid is empty".into()));
        }
        if let Some(&b) = self.b_grid.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
            return Err(Error::InvalidSkew(b));
        }
        Ok(())
    }

    /// Random sequence for grid point `b_index`, trial `trial`.
    ///
    /// Each draw comes from its own ChaCha8 stream, selected from the seed and
    /// the `(b_index, trial)` coordinates, so results do not depend on
    /// evaluation order or thread count.
    pub fn sequence(&self, b_index: usize, trial: usize) -> SymbolicSequence {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(((b_index as u64) << 32) | trial as u64);
        SymbolicSequence::from_bools(
            (0..self.sequence_length).map(|_| !rng.random_bool(self.prob_zero)),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub b: f64,
    pub mean_codelength: f64,
}

pub fn shannon_experiment(config: &ShannonExperimentConfig) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    config
        .b_grid
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            let map = SkewTentMap::new(b)?;
            let mut total = 0u64;
            let mut infinite = false;
            for trial in 0..config.trials_per_b {
                let enc = back_iterate_first(&map, &config.sequence(i, trial))?;
                match enc.codelength {
                    Codelength::Bits(bits) => total += bits,
                    Codelength::Infinite => infinite = true,
                }
            }
            let mean_codelength = if infinite {
                f64::INFINITY
            } else {
                total as f64 / config.trials_per_b as f64
            };
            Ok(CurvePoint { b, mean_codelength })
        })
        .collect()
}

/// First grid point attaining the smallest mean codelength.
pub fn curve_argmin(points: &[CurvePoint]) -> Option<CurvePoint> {
    points.iter().copied().fold(None, |best, p| match best {
        Some(q) if q.mean_codelength <= p.mean_codelength => Some(q),
        _ => Some(p),
    })
}

pub fn write_curve_csv<W: Write>(points: &[CurvePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "b,mean_codelength")?;
    for p in points {
        writeln!(out, "{:.6},{:.6}", p.b, p.mean_codelength)?;
    }
    Ok(())
}
