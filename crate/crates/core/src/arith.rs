//! Rational-arithmetic helpers: parsing, exact decimal rendering, and
//! rigorous enclosures of sqrt, n-th roots, and the natural logarithm.
//!
//! Irrational functions are bracketed by integer-root extraction and by
//! the atanh power series with an explicit tail bound; no transcendental
//! library and no binary floating point appears on any result path.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_big(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// 10^-k as a rational.
pub fn pow10(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u32).pow(k))
}

pub fn check_tolerance(tol: &BigRational) -> Result<()> {
    if tol.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol.clone()))
    }
}

/// Parse "p/q", "-3", "0.125", or scientific notation "2.5e-3".
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse rational from {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i32 = e.parse().map_err(|_| bad())?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let sign = if int_part.starts_with('-') { -1 } else { 1 };
    let digits: String = int_part
        .trim_start_matches(['-', '+'])
        .chars()
        .chain(frac_part.chars())
        .collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = frac_part.len() as i32 - exp;
    let value = if scale >= 0 {
        BigRational::new(n, BigInt::from(10u32).pow(scale as u32))
    } else {
        BigRational::from_integer(n * BigInt::from(10u32).pow((-scale) as u32))
    };
    Ok(if sign < 0 { -value } else { value })
}

pub enum Dir {
    Down,
    Up,
}

/// Exact decimal rendering of `x` with `digits` places, rounded toward
/// the requested direction. Output is canonical, so identical inputs give
/// byte-identical strings.
pub fn decimal_string(x: &BigRational, digits: u32, dir: Dir) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = x * BigRational::from_integer(scale.clone());
    let int = match dir {
        Dir::Down => scaled.floor().to_integer(),
        Dir::Up => scaled.ceil().to_integer(),
    };
    let neg = int.is_negative();
    let mag = int.magnitude().to_string();
    let mut body = if mag.len() as u32 > digits {
        let split = mag.len() - digits as usize;
        format!("{}.{}", &mag[..split], &mag[split..])
    } else {
        format!("0.{}{}", "0".repeat(digits as usize - mag.len()), mag)
    };
    if digits == 0 {
        body = mag;
    }
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Midpoint +/- halfwidth presentation; both values rounded outward.
pub fn decimal_mid_half(e: &Enclosure, digits: u32) -> (String, String) {
    (
        decimal_string(&e.midpoint(), digits, Dir::Down),
        decimal_string(&e.halfwidth(), digits, Dir::Up),
    )
}

/// Smallest number of dyadic bits `b` with `2^-b <= tol / margin`.
fn bits_for(tol: &BigRational, margin: u32) -> u64 {
    let need = BigRational::from_integer(BigInt::from(margin)) / tol;
    let q = need.ceil().to_integer();
    let q = if q.is_positive() { q } else { BigInt::one() };
    q.bits() + 1
}

/// Rigorous enclosure of sqrt(x) for x >= 0, width <= tol.
pub fn sqrt_enclosure(x: &BigRational, tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if x.is_negative() {
        return Err(Error::Parse(format!("sqrt of negative rational {x}")));
    }
    if x.is_zero() {
        return Ok(Enclosure::zero());
    }
    let bits = bits_for(tol, 4);
    let scale = BigInt::one() << (2 * bits);
    let scaled = x * BigRational::from_integer(scale);
    let lo_int = scaled.floor().to_integer().magnitude().sqrt();
    let hi_int = scaled.ceil().to_integer().magnitude().sqrt() + 1u32;
    let den = BigInt::one() << bits;
    Enclosure::new(
        BigRational::new(BigInt::from(lo_int), den.clone()),
        BigRational::new(BigInt::from(hi_int), den),
    )
}

/// Rigorous enclosure of x^(1/n) for x >= 0 and n >= 1, width <= tol.
pub fn nth_root_enclosure(x: &BigRational, n: u32, tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if n == 0 {
        return Err(Error::Parse("zeroth root is undefined".into()));
    }
    if x.is_negative() {
        return Err(Error::Parse(format!("even root of negative rational {x}")));
    }
    if x.is_zero() {
        return Ok(Enclosure::zero());
    }
    let bits = bits_for(tol, 4);
    let scale = BigInt::one() << (bits * n as u64);
    let scaled = x * BigRational::from_integer(scale);
    let lo_int = scaled.floor().to_integer().magnitude().nth_root(n);
    let hi_int = scaled.ceil().to_integer().magnitude().nth_root(n) + 1u32;
    let den = BigInt::one() << bits;
    Enclosure::new(
        BigRational::new(BigInt::from(lo_int), den.clone()),
        BigRational::new(BigInt::from(hi_int), den),
    )
}

/// floor(log2(x)) for x > 0.
fn floor_log2(x: &BigRational) -> i64 {
    debug_assert!(x.is_positive());
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = rat_int(2);
    // adjust: want 2^k <= x < 2^(k+1)
    while pow2(k) > *x {
        k -= 1;
    }
    while pow2(k + 1) <= *x {
        k += 1;
    }
    let _ = two;
    k
}

fn pow2(k: i64) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(BigInt::one() << (k as u64))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-k) as u64))
    }
}

/// atanh power series: for 0 <= z < 1/2, returns (partial_sum, tail_bound) with
/// 2*atanh(z) in [partial_sum, partial_sum + tail_bound].
fn atanh2_series(z: &BigRational, eps: &BigRational) -> (BigRational, BigRational) {
    debug_assert!(!z.is_negative() && *z < rat(1, 2));
    if z.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    let z2 = z * z;
    let geom = (BigRational::one() - &z2).recip();
    let mut term_pow = z.clone(); // z^(2i+1)
    let mut sum = BigRational::zero();
    let mut i: u64 = 0;
    loop {
        sum += &term_pow / rat_int((2 * i + 1) as i64);
        term_pow *= &z2;
        i += 1;
        // tail after i terms: 2 * z^(2i+1) / ((2i+1)(1-z^2))
        let tail = rat_int(2) * &term_pow / rat_int((2 * i + 1) as i64) * &geom;
        if tail <= *eps {
            return (rat_int(2) * sum, tail);
        }
    }
}

/// Rigorous enclosure of ln(x) for x > 0, width <= tol.
///
/// Reduction x = 2^k * m with m in [1,2), then ln m = 2*atanh((m-1)/(m+1))
/// with the series tail added on the high side.
pub fn ln_enclosure(x: &BigRational, tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if !x.is_positive() {
        return Err(Error::NonpositiveLog(x.clone()));
    }
    if x.is_one() {
        return Ok(Enclosure::zero());
    }
    let k = floor_log2(x);
    let m = x / pow2(k);
    debug_assert!(m >= BigRational::one() && m < rat_int(2));
    let half = tol / rat_int(2);
    let (m_sum, m_tail) = {
        let z = (&m - BigRational::one()) / (&m + BigRational::one());
        let eps = &half / rat_int(2);
        atanh2_series(&z, &eps)
    };
    let m_enc = Enclosure::new(m_sum.clone(), m_sum + m_tail)?;
    if k == 0 {
        return Ok(m_enc);
    }
    let eps2 = &half / rat_int(2 * k.unsigned_abs() as i64);
    let (l2_sum, l2_tail) = atanh2_series(&rat(1, 3), &eps2);
    let ln2 = Enclosure::new(l2_sum.clone(), l2_sum + l2_tail)?;
    Ok(ln2.scale(&rat_int(k)).add(&m_enc))
}

/// Exact floor of N^(p/q) for integer N >= 1 (used for index-set sizes).
pub fn floor_pow(n: u64, p: u32, q: u32) -> u64 {
    debug_assert!(q > 0);
    let base = BigUint::from(n).pow(p);
    let root = base.nth_root(q);
    root.to_u64().expect("floor_pow result exceeds u64")
}

/// Sign helper for BigInt construction in tests.
pub fn bigint_from_sign(sign: Sign, mag: BigUint) -> BigInt {
    BigInt::from_biguint(sign, mag)
}

/// Greatest common divisor of word lengths, used for period primitivity.
pub fn gcd_usize(a: usize, b: usize) -> usize {
    a.gcd(&b)
}
