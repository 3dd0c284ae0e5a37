//! Second-return back-iteration in exact rational arithmetic.
//!
//! Every `f64` is a dyadic rational, so seeding and the four pull-back
//! rules can be carried out without rounding. The result is the interval
//! the floating-point routine approximates; its width stays exact even when
//! it is far below the spacing of doubles near the interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{pairs, Codelength, FirstPairSeed, PairCoding};
use crate::error::{Error, Result};
use crate::maps::{Pair, SecondReturnMap, SymbolicSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct ExactInterval {
    pub lower: BigRational,
    pub upper: BigRational,
}

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidProbabilities(format!("{x} is not finite")))
}

fn log2_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        n.to_f64().unwrap_or(f64::NAN).log2()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap_or(f64::NAN).log2() + shift as f64
    }
}

impl ExactInterval {
    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    /// `-log2` of the width, accurate to double precision.
    pub fn exact_bits(&self) -> f64 {
        let w = self.width();
        if !w.is_positive() {
            return f64::INFINITY;
        }
        log2_int(w.denom()) - log2_int(w.numer())
    }

    pub fn codelength(&self) -> Codelength {
        Codelength::from_exact(self.exact_bits())
    }
}

/// Rational counterpart of [`super::back_iterate_second`].
pub fn back_iterate_second_exact(
    map: &SecondReturnMap,
    seq: &SymbolicSequence,
    coding: PairCoding,
) -> Result<ExactInterval> {
    let pairs = pairs(seq, coding.odd_length)?;
    let p = map.probabilities();
    let [p00, p01, p11, p10] = [p.p00, p.p01, p.p11, p.p10].map(rational);
    let (p00, p01, p11, p10) = (p00?, p01?, p11?, p10?);
    let one = BigRational::one();
    let a = &p00 + &p01;
    let b = &a + &p11;

    let (mut lo, mut hi) = match pairs[0] {
        Pair::ZeroZero => (BigRational::zero(), p00.clone()),
        Pair::ZeroOne => (p00.clone(), a.clone()),
        Pair::OneOne => (a.clone(), b.clone()),
        Pair::OneZero => match coding.first_pair_seed {
            FirstPairSeed::Published => (&one - &b, one.clone()),
            FirstPairSeed::Region => (b.clone(), one.clone()),
        },
    };
    let pull = |pair: Pair, x: &BigRational| -> BigRational {
        match pair {
            Pair::ZeroZero => x * &p00,
            Pair::ZeroOne => &a - &p01 * x,
            Pair::OneOne => &p11 * x + &a,
            Pair::OneZero => &one - &p10 * x,
        }
    };
    for &pair in &pairs[1..] {
        lo = pull(pair, &lo);
        hi = pull(pair, &hi);
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
    }
    Ok(ExactInterval { lower: lo, upper: hi })
}
