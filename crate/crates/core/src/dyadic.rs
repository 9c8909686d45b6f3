//! Nonnegative dyadic floats `m * 2^e` with directed rounding.
//!
//! The dimension solver compares sums like `sum_i x_i^d` against 1 where
//! `d` is a dyadic rational. Every operation here rounds outward under
//! caller control, and rounding is exactness-aware: when no bits are
//! dropped both directions agree, so exact algebraic coincidences (for
//! instance `2 * (1/4)^(1/2) = 1`) are detected rather than smeared.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Down,
    Up,
}

/// Value `m * 2^e`, `m >= 0`. Kept normalized to at most `prec` mantissa
/// bits by the operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Df {
    m: BigUint,
    e: i64,
}

impl Df {
    pub fn zero() -> Self {
        Df { m: BigUint::zero(), e: 0 }
    }

    pub fn one() -> Self {
        Df { m: BigUint::one(), e: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        let m = BigInt::from(self.m.clone());
        if self.e >= 0 {
            BigRational::from_integer(m << self.e as u64)
        } else {
            BigRational::new(m, BigInt::one() << (-self.e) as u64)
        }
    }

    fn normalize(mut self, prec: u64, dir: Dir) -> Self {
        let bits = self.m.bits();
        if bits <= prec {
            return self;
        }
        let shift = bits - prec;
        let dropped_nonzero = {
            let mask = (BigUint::one() << shift) - BigUint::one();
            !(&self.m & mask).is_zero()
        };
        self.m >>= shift;
        self.e += shift as i64;
        if dropped_nonzero && dir == Dir::Up {
            self.m += BigUint::one();
        }
        self
    }

    pub fn from_rational(x: &BigRational, prec: u64, dir: Dir) -> Self {
        assert!(!x.is_negative(), "dyadic floats are nonnegative");
        if x.is_zero() {
            return Df::zero();
        }
        let num = x.numer().magnitude().clone();
        let den = x.denom().magnitude().clone();
        // scale numerator so the quotient carries prec+1 significant bits
        let extra = (den.bits() + prec + 2).saturating_sub(num.bits());
        let scaled = num << extra;
        let (q, r) = num_integer::Integer::div_rem(&scaled, &den);
        let mut m = q;
        if !r.is_zero() && dir == Dir::Up {
            m += BigUint::one();
        }
        Df { m, e: -(extra as i64) }.normalize(prec, dir)
    }

    pub fn mul(&self, other: &Self, prec: u64, dir: Dir) -> Self {
        Df {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
        .normalize(prec, dir)
    }

    pub fn add(&self, other: &Self, prec: u64, dir: Dir) -> Self {
        if self.is_zero() {
            return other.clone().normalize(prec, dir);
        }
        if other.is_zero() {
            return self.clone().normalize(prec, dir);
        }
        let (hi, lo) = if self.e >= other.e { (self, other) } else { (other, self) };
        let shift = (hi.e - lo.e) as u64;
        // when the small addend is below one ulp of the large one, bound it
        if shift > prec + lo.m.bits() + 2 {
            return match dir {
                Dir::Down => hi.clone().normalize(prec, dir),
                Dir::Up => Df { m: &hi.m + BigUint::one(), e: hi.e }.normalize(prec, dir),
            };
        }
        Df {
            m: (&hi.m << shift) + &lo.m,
            e: lo.e,
        }
        .normalize(prec, dir)
    }

    pub fn sqrt(&self, prec: u64, dir: Dir) -> Self {
        if self.is_zero() {
            return Df::zero();
        }
        let mut m = self.m.clone();
        let mut e = self.e;
        // force an even exponent after widening for precision
        let mut widen = 2 * prec + 2;
        if (e - widen as i64) % 2 != 0 {
            widen += 1;
        }
        m <<= widen;
        e -= widen as i64;
        let root = m.sqrt();
        let exact = &root * &root == m;
        let m_out = if exact || dir == Dir::Down { root } else { root + BigUint::one() };
        Df { m: m_out, e: e / 2 }.normalize(prec, dir)
    }

    /// x^k by binary exponentiation with directed rounding.
    pub fn pow(&self, k: u64, prec: u64, dir: Dir) -> Self {
        if k == 0 {
            return Df::one();
        }
        let mut base = self.clone();
        let mut acc: Option<Df> = None;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base, prec, dir),
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = base.mul(&base, prec, dir);
        }
        acc.unwrap()
    }

    pub fn cmp_rational(&self, x: &BigRational) -> std::cmp::Ordering {
        self.to_rational().cmp(x)
    }
}

/// Interval of dyadic floats with outward rounding.
#[derive(Debug, Clone)]
pub(crate) struct DfInterval {
    pub lo: Df,
    pub hi: Df,
}

impl DfInterval {
    pub fn from_rational(x: &BigRational, prec: u64) -> Self {
        DfInterval {
            lo: Df::from_rational(x, prec, Dir::Down),
            hi: Df::from_rational(x, prec, Dir::Up),
        }
    }

    /// x^(k / 2^j) for x in [0, 1]: binary power then j square roots.
    /// Monotone in x, so endpoints map to endpoints.
    pub fn dyadic_pow(&self, k: u64, j: u32, prec: u64) -> Self {
        let mut lo = self.lo.pow(k, prec, Dir::Down);
        let mut hi = self.hi.pow(k, prec, Dir::Up);
        for _ in 0..j {
            lo = lo.sqrt(prec, Dir::Down);
            hi = hi.sqrt(prec, Dir::Up);
        }
        DfInterval { lo, hi }
    }

    pub fn add(&self, other: &Self, prec: u64) -> Self {
        DfInterval {
            lo: self.lo.add(&other.lo, prec, Dir::Down),
            hi: self.hi.add(&other.hi, prec, Dir::Up),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn conversion_round_trip_directed() {
        let x = rat(1, 3);
        let lo = Df::from_rational(&x, 64, Dir::Down).to_rational();
        let hi = Df::from_rational(&x, 64, Dir::Up).to_rational();
        assert!(lo <= x && x <= hi);
        assert!(lo < hi); // 1/3 is not dyadic
        let d = rat(3, 8);
        assert_eq!(Df::from_rational(&d, 64, Dir::Down).to_rational(), d);
        assert_eq!(Df::from_rational(&d, 64, Dir::Up).to_rational(), d);
    }

    #[test]
    fn sqrt_exactness_detected() {
        let quarter = DfInterval::from_rational(&rat(1, 4), 96);
        let half = quarter.dyadic_pow(1, 1, 96); // (1/4)^(1/2)
        assert_eq!(half.lo.to_rational(), rat(1, 2));
        assert_eq!(half.hi.to_rational(), rat(1, 2));
    }

    #[test]
    fn pow_brackets_value() {
        let x = DfInterval::from_rational(&rat(2, 3), 96);
        // (2/3)^(5/4): k=5, j=2
        let p = x.dyadic_pow(5, 2, 96);
        let lo = p.lo.to_rational();
        let hi = p.hi.to_rational();
        assert!(lo < hi);
        // check against squaring back: (value^4) should bracket (2/3)^5
        let t = rat(2, 3).pow(5);
        assert!(lo.pow(4) <= t && t <= hi.pow(4));
    }
}
