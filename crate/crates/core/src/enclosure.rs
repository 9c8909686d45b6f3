use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Closed interval with exact rational endpoints, `lo <= hi`.
///
/// All arithmetic is outward: the result interval contains every value
/// attainable by the operation on members of the operands. No binary
/// floating point is involved anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidCantorData(format!(
                "enclosure endpoints out of order: {lo} > {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Zero-width enclosure of an exactly known rational.
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Self::point(BigRational::zero())
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn into_parts(self) -> (BigRational, BigRational) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn halfwidth(&self) -> BigRational {
        self.width() / BigRational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_enclosure(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn neg(&self) -> Self {
        Self { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo }
    }

    pub fn add_rational(&self, x: &BigRational) -> Self {
        Self { lo: &self.lo + x, hi: &self.hi + x }
    }

    /// Widen both endpoints outward by `slack >= 0`.
    pub fn widen(&self, slack: &BigRational) -> Self {
        debug_assert!(!slack.is_negative());
        Self { lo: &self.lo - slack, hi: &self.hi + slack }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Self { lo, hi }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_negative() {
            Self { lo: &self.hi * c, hi: &self.lo * c }
        } else {
            Self { lo: &self.lo * c, hi: &self.hi * c }
        }
    }

    /// Reciprocal; the interval must not contain zero.
    pub fn recip(&self) -> Result<Self> {
        if self.lo.is_positive() || self.hi.is_negative() {
            Ok(Self { lo: self.hi.recip(), hi: self.lo.recip() })
        } else {
            Err(Error::InvalidCantorData(format!(
                "reciprocal of enclosure containing zero: [{}, {}]",
                self.lo, self.hi
            )))
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Enclosure of `max(x_1, ..., x_k)` given enclosures of each `x_i`:
    /// `[max lo_i, max hi_i]`.
    pub fn max_of<'a>(mut items: impl Iterator<Item = &'a Self>) -> Option<Self> {
        let first = items.next()?.clone();
        Some(items.fold(first, |acc, e| Self {
            lo: acc.lo.max(e.lo.clone()),
            hi: acc.hi.max(e.hi.clone()),
        }))
    }

    /// Enclosure of `min(x_1, ..., x_k)`.
    pub fn min_of<'a>(mut items: impl Iterator<Item = &'a Self>) -> Option<Self> {
        let first = items.next()?.clone();
        Some(items.fold(first, |acc, e| Self {
            lo: acc.lo.min(e.lo.clone()),
            hi: acc.hi.min(e.hi.clone()),
        }))
    }

    /// True if both endpoints are strictly positive.
    pub fn strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
