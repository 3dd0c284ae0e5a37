//! Skew tent maps.
//!
//! [`SkewTentMap`] is the two-branch first-return map with break point `b`.
//! [`SecondReturnMap`] is its four-branch second iterate, whose branch widths
//! are the probabilities of the non-overlapping symbol pairs `00`, `01`, `11`
//! and `10`, laid out left to right in that order.
//!
//! All regions are left-closed and right-open.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `f64` strictly below 1. Orbits that land on 1.0 are pulled back here.
pub const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Pair probabilities must sum to one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-12;

fn check_domain(x: f64) -> Result<()> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { value: x })
    }
}

/// A finite string over the binary alphabet `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymbolicSequence(Vec<u8>);

impl SymbolicSequence {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s > 1) {
            return Err(Error::InvalidSymbol(bad));
        }
        Ok(Self(symbols))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zeros(&self) -> usize {
        self.0.iter().filter(|&&s| s == 0).count()
    }

    pub fn push(&mut self, symbol: bool) {
        self.0.push(u8::from(symbol));
    }
}

impl fmt::Display for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The skew tent map `T(x) = x/b` on `[0, b)` and `(1-x)/(1-b)` on `[b, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewTentMap {
    skew: f64,
}

impl SkewTentMap {
    pub fn new(skew: f64) -> Result<Self> {
        if skew > 0.0 && skew < 1.0 {
            Ok(Self { skew })
        } else {
            Err(Error::InvalidSkew(skew))
        }
    }

    pub fn skew(&self) -> f64 {
        self.skew
    }

    /// One forward step. The result lies in `[0, 1]`; it is exactly 1 only
    /// when `x == b` (or when `x/b` rounds up just below `b`).
    pub fn forward(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        let b = self.skew;
        Ok(if x < b { x / b } else { (1.0 - x) / (1.0 - b) })
    }

    /// Iterates `transient + n` times from `x0` and keeps the last `n` iterates.
    ///
    /// `x0` itself counts as the first iterate, so with no transient the orbit
    /// starts at `x0`. An iterate equal to 1.0 is replaced by [`BELOW_ONE`].
    pub fn trajectory(&self, x0: f64, n: usize, transient: usize) -> Result<Vec<f64>> {
        check_domain(x0)?;
        let mut orbit = Vec::with_capacity(n);
        let mut x = x0;
        for step in 0..transient + n {
            if step >= transient {
                orbit.push(x);
            }
            x = self.forward(x)?.min(BELOW_ONE);
        }
        Ok(orbit)
    }

    /// Symbol `0` below the skew, `1` at or above it.
    pub fn symbol(&self, x: f64) -> u8 {
        u8::from(x >= self.skew)
    }

    pub fn symbolize(&self, xs: &[f64]) -> Result<SymbolicSequence> {
        xs.iter()
            .map(|&x| check_domain(x).map(|()| self.symbol(x)))
            .collect::<Result<Vec<_>>>()
            .map(SymbolicSequence)
    }
}

/// One of the four non-overlapping symbol pairs, in region order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pair {
    ZeroZero,
    ZeroOne,
    OneOne,
    OneZero,
}

impl Pair {
    /// Region order: `00`, `01`, `11`, `10`.
    pub const ALL: [Pair; 4] = [Pair::ZeroZero, Pair::ZeroOne, Pair::OneOne, Pair::OneZero];

    pub fn from_symbols(first: u8, second: u8) -> Self {
        match (first != 0, second != 0) {
            (false, false) => Pair::ZeroZero,
            (false, true) => Pair::ZeroOne,
            (true, true) => Pair::OneOne,
            (true, false) => Pair::OneZero,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::ZeroZero => "00",
            Pair::ZeroOne => "01",
            Pair::OneOne => "11",
            Pair::OneZero => "10",
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Probabilities of the pairs `00`, `01`, `11`, `10`.
///
/// Plain data: per-instance estimates, class averages and raw sums all use
/// this type. [`SecondReturnMap`] is the validated form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairProbabilities {
    #[serde(rename = "00")]
    pub p00: f64,
    #[serde(rename = "01")]
    pub p01: f64,
    #[serde(rename = "11")]
    pub p11: f64,
    #[serde(rename = "10")]
    pub p10: f64,
}

impl PairProbabilities {
    pub fn new(p00: f64, p01: f64, p11: f64, p10: f64) -> Self {
        Self { p00, p01, p11, p10 }
    }

    /// Region order `[p00, p01, p11, p10]`.
    pub fn from_array([p00, p01, p11, p10]: [f64; 4]) -> Self {
        Self { p00, p01, p11, p10 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.p00, self.p01, self.p11, self.p10]
    }

    pub fn get(&self, pair: Pair) -> f64 {
        self.to_array()[pair.index()]
    }

    pub fn sum(&self) -> f64 {
        self.p00 + self.p01 + self.p11 + self.p10
    }

    pub fn any_zero(&self) -> bool {
        self.to_array().iter().any(|&p| p == 0.0)
    }
}

/// The second iterate `T(T(x))` with branch widths given by pair probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondReturnMap {
    probs: PairProbabilities,
}

impl SecondReturnMap {
    pub fn new(probs: PairProbabilities) -> Result<Self> {
        let values = probs.to_array();
        if values.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidProbabilities(format!(
                "{values:?} contains a negative or non-finite entry"
            )));
        }
        let sum = probs.sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidProbabilities(format!(
                "{values:?} sums to {sum}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn probabilities(&self) -> PairProbabilities {
        self.probs
    }

    pub fn probability(&self, pair: Pair) -> f64 {
        self.probs.get(pair)
    }

    /// Breakpoints `p1 = p00`, `p2 = p00 + p01`, `p3 = p00 + p01 + p11`.
    pub fn breakpoints(&self) -> [f64; 3] {
        let p = &self.probs;
        let p1 = p.p00;
        let p2 = p1 + p.p01;
        [p1, p2, p2 + p.p11]
    }

    pub fn region(&self, x: f64) -> Pair {
        let [p1, p2, p3] = self.breakpoints();
        if x < p1 {
            Pair::ZeroZero
        } else if x < p2 {
            Pair::ZeroOne
        } else if x < p3 {
            Pair::OneOne
        } else {
            Pair::OneZero
        }
    }

    pub fn symbolize(&self, x: f64) -> Result<Pair> {
        check_domain(x)?;
        Ok(self.region(x))
    }

    pub fn forward(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        let pair = self.region(x);
        let p = &self.probs;
        if p.get(pair) == 0.0 {
            return Err(Error::DegenerateBranch {
                x,
                pair: pair.label(),
            });
        }
        let [_, p2, _] = self.breakpoints();
        Ok(match pair {
            Pair::ZeroZero => x / p.p00,
            Pair::ZeroOne => (p.p00 + p.p01 - x) / p.p01,
            Pair::OneOne => (x - p2) / p.p11,
            Pair::OneZero => (1.0 - x) / p.p10,
        })
    }
}
