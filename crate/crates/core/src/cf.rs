//! Continued fractions with exact rational bracketing.
//!
//! Eventually periodic expansions `[a0; d1, ..., dm, (p1, ..., pk)]` are
//! evaluated two independent ways: convergent bracketing (consecutive
//! convergents alternate sides of the value) and quadratic-root isolation
//! (a purely periodic value satisfies an explicit integer quadratic).
//! Both yield exact rational enclosures of requested width.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{check_tolerance, rat_big, rat_int, sqrt_enclosure};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};

/// An eventually periodic continued fraction. `period` empty means finite.
///
/// Digits are positive integers. Stored in normal form: a finite expansion
/// never ends in digit 1 (`[..., a, 1]` is rewritten to `[..., a+1]`) and
/// the period is primitive (not a power of a shorter word).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    a0: BigInt,
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

fn check_digits(digits: &[u64]) -> Result<()> {
    for &d in digits {
        if d == 0 {
            return Err(Error::InvalidDigit(0));
        }
    }
    Ok(())
}

fn primitive_root(word: &[u64]) -> Vec<u64> {
    let n = word.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && word.chunks(d).all(|c| c == &word[..d]) {
            return word[..d].to_vec();
        }
    }
    word.to_vec()
}

impl ContinuedFraction {
    pub fn new(
        a0: impl Into<BigInt>,
        preperiod: Vec<u64>,
        period: Vec<u64>,
    ) -> Result<Self> {
        check_digits(&preperiod)?;
        check_digits(&period)?;
        let mut a0: BigInt = a0.into();
        let mut preperiod = preperiod;
        let period = primitive_root(&period);
        if period.is_empty() {
            // trailing-1 normal form for finite expansions
            if preperiod.last() == Some(&1) && preperiod.len() >= 2 {
                preperiod.pop();
                *preperiod.last_mut().unwrap() += 1;
            } else if preperiod == [1] {
                preperiod.clear();
                a0 += 1;
            }
        }
        Ok(Self { a0, preperiod, period })
    }

    pub fn integer(a0: impl Into<BigInt>) -> Self {
        Self { a0: a0.into(), preperiod: Vec::new(), period: Vec::new() }
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Digit a_i of the expansion; `None` past the end of a finite one.
    /// a_0 may be any integer, digits with i >= 1 are positive.
    pub fn digit(&self, i: usize) -> Option<BigInt> {
        if i == 0 {
            return Some(self.a0.clone());
        }
        let i = i - 1;
        if i < self.preperiod.len() {
            Some(BigInt::from(self.preperiod[i]))
        } else if self.period.is_empty() {
            None
        } else {
            let j = (i - self.preperiod.len()) % self.period.len();
            Some(BigInt::from(self.period[j]))
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.a0)?;
        if !self.preperiod.is_empty() || !self.period.is_empty() {
            write!(f, ";")?;
            let pre: Vec<String> = self.preperiod.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", pre.join(","))?;
            if !self.period.is_empty() {
                if !self.preperiod.is_empty() {
                    write!(f, ",")?;
                }
                let per: Vec<String> = self.period.iter().map(|d| d.to_string()).collect();
                write!(f, "({})", per.join(","))?;
            }
        }
        write!(f, "]")
    }
}

/// Parse the grammar `[a0;d1,d2,...,(p1,...,pk)]`. The digit list and the
/// parenthesized period are each optional: `[3]`, `[0;2]`, `[1;(1)]`.
pub fn parse_cf(s: &str) -> Result<ContinuedFraction> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |msg: &str| Error::Parse(format!("{msg} in continued fraction {s:?}"));
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| bad("missing brackets"))?;
    let (a0_str, rest) = match inner.split_once(';') {
        Some((a, r)) => (a, Some(r)),
        None => (inner, None),
    };
    let a0: BigInt = a0_str.parse().map_err(|_| bad("bad integer part"))?;
    let (mut preperiod, mut period) = (Vec::new(), Vec::new());
    if let Some(rest) = rest {
        let (pre_str, per_str) = match rest.find('(') {
            Some(pos) => {
                let per = rest[pos..]
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| bad("unclosed period"))?;
                let pre = rest[..pos].trim_end_matches(',');
                (pre, Some(per))
            }
            None => (rest, None),
        };
        let parse_list = |list: &str| -> Result<Vec<u64>> {
            if list.is_empty() {
                return Ok(Vec::new());
            }
            list.split(',')
                .map(|d| {
                    d.parse::<u64>()
                        .map_err(|_| bad("bad digit"))
                        .and_then(|v| if v == 0 { Err(Error::InvalidDigit(0)) } else { Ok(v) })
                })
                .collect()
        };
        preperiod = parse_list(pre_str)?;
        if let Some(per) = per_str {
            period = parse_list(per)?;
            if period.is_empty() {
                return Err(bad("empty period"));
            }
        }
    }
    ContinuedFraction::new(a0, preperiod, period)
}

/// Exact value of the finite expansion `[a0; digits...]`.
pub fn finite_cf_value(a0: &BigInt, digits: &[BigInt]) -> BigRational {
    let mut acc: Option<BigRational> = None;
    for d in digits.iter().rev() {
        let t = rat_big(d.clone());
        acc = Some(match acc {
            None => t,
            Some(prev) => t + prev.recip(),
        });
    }
    match acc {
        None => rat_big(a0.clone()),
        Some(tail) => rat_big(a0.clone()) + tail.recip(),
    }
}

/// Convergent bracketing for a digit stream. `digit(i)` must return the i-th
/// digit; the stream must be infinite. Consecutive convergents p/q alternate
/// around the value, and the bracket width is exactly 1/(q_n q_{n-1}).
fn converge_stream(digit: impl Fn(usize) -> BigInt, tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (digit(0), BigInt::one());
    let (tn, td) = (tol.numer().clone(), tol.denom().clone());
    for i in 1.. {
        let a = digit(i);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        // bracket width 1/(q q_prev) <= tol  <=>  td <= tn * q * q_prev
        if !q_prev.is_zero() && td <= &tn * &q * &q_prev {
            let c1 = BigRational::new(p_prev.clone(), q_prev.clone());
            let c2 = BigRational::new(p.clone(), q.clone());
            return if c1 <= c2 {
                Enclosure::new(c1, c2)
            } else {
                Enclosure::new(c2, c1)
            };
        }
    }
    unreachable!("convergent denominators grow without bound")
}

/// Enclosure of the value of `cf` with width <= tol. Finite expansions give
/// exact zero-width enclosures; infinite ones are bracketed by consecutive
/// convergents, so every deeper convergent bracket nests inside the result.
pub fn cf_value(cf: &ContinuedFraction, tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if cf.is_finite() {
        let digits: Vec<BigInt> = cf.preperiod.iter().map(|&d| BigInt::from(d)).collect();
        return Ok(Enclosure::point(finite_cf_value(&cf.a0, &digits)));
    }
    converge_stream(|i| cf.digit(i).unwrap(), tol)
}

/// Independent evaluation route for infinite expansions: the purely periodic
/// tail satisfies Q y^2 + (Q' - P) y - P' = 0 where P/Q, P'/Q' are the
/// convergents of one period; the root in (1, p1 + 1) is isolated by exact
/// bisection and pulled back through the preperiod with interval arithmetic.
pub fn surd_enclosure(cf: &ContinuedFraction, tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if cf.is_finite() {
        return Err(Error::RequiresInfiniteCf);
    }
    let w = &cf.period;
    // convergents of the word w read as [w0; w1, ..., w_{p-1}]
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (BigInt::from(w[0]), BigInt::one());
    for &d in &w[1..] {
        let a = BigInt::from(d);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    // f(y) = q y^2 + (q_prev - p) y - p_prev, increasing past its root > 1
    let (ca, cb, cc) = (rat_big(q), rat_big(q_prev - &p), rat_big(-p_prev));
    let f = |y: &BigRational| -> BigRational { &ca * y * y + &cb * y + &cc };
    let mut lo = BigRational::one();
    let mut hi = rat_int(w[0] as i64 + 1);
    debug_assert!(f(&lo).is_negative() && !f(&hi).is_negative());
    let inner_tol = tol / rat_int(2);
    while &hi - &lo > inner_tol {
        let mid = (&lo + &hi) / rat_int(2);
        if f(&mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut enc = Enclosure::new(lo, hi)?;
    // pull back through preperiod digits and the integer part
    for &d in cf.preperiod.iter().rev() {
        enc = enc.recip()?.add_rational(&rat_int(d as i64));
    }
    Ok(enc.recip()?.add_rational(&rat_big(cf.a0.clone())))
}

/// Tail alpha_n = [a_n; a_{n+1}, ...] and reversal beta_n = [0; a_{n-1}, ..., a_1].
/// The tail needs an infinite expansion; the reversal is an exact rational
/// (beta_0 is the empty expansion, i.e. 0).
pub fn tail_and_reversal(
    cf: &ContinuedFraction,
    n: usize,
    tol: &BigRational,
) -> Result<(Enclosure, BigRational)> {
    check_tolerance(tol)?;
    if cf.is_finite() {
        return Err(Error::RequiresInfiniteCf);
    }
    let alpha = converge_stream(|i| cf.digit(n + i).unwrap(), tol)?;
    let rev_digits: Vec<BigInt> = (1..n).rev().map(|i| cf.digit(i).unwrap()).collect();
    let beta = finite_cf_value(&BigInt::zero(), &rev_digits);
    Ok((alpha, beta))
}

/// Purely periodic enclosure for the word rotated to start at `start`,
/// read forward: [w_s; w_{s+1}, w_{s+2}, ...].
fn periodic_forward(word: &[u64], start: usize, tol: &BigRational) -> Result<Enclosure> {
    let p = word.len();
    converge_stream(|i| BigInt::from(word[(start + i) % p]), tol)
}

/// Purely periodic enclosure read backward from `start`:
/// [0; w_{s-1}, w_{s-2}, ...].
fn periodic_backward(word: &[u64], start: usize, tol: &BigRational) -> Result<Enclosure> {
    let p = word.len();
    converge_stream(
        |i| {
            if i == 0 {
                BigInt::zero()
            } else {
                BigInt::from(word[(start + p - i % p) % p])
            }
        },
        tol,
    )
}

/// Candidate values alpha* + beta* over all offsets of a periodic word.
fn periodic_candidates(word: &[u64], tol: &BigRational) -> Result<Vec<Enclosure>> {
    check_digits(word)?;
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let quarter = tol / rat_int(4);
    (0..word.len())
        .map(|j| {
            let alpha = periodic_forward(word, j, &quarter)?;
            let beta = periodic_backward(word, j, &quarter)?;
            Ok(alpha.add(&beta))
        })
        .collect()
}

/// Lagrange value k(alpha) = limsup_n (alpha_n + beta_n) of an eventually
/// periodic expansion: the maximum over one period of the two-sided periodic
/// completions. The preperiod never affects the limsup.
pub fn lagrange_value(cf: &ContinuedFraction, tol: &BigRational) -> Result<Enclosure> {
    if cf.is_finite() {
        return Err(Error::RequiresInfiniteCf);
    }
    let cands = periodic_candidates(&cf.period, tol)?;
    Ok(Enclosure::max_of(cands.iter()).expect("period is non-empty"))
}

/// Markov value of the bi-infinite periodic word: sup over cyclic shifts of
/// alpha_0 + beta_0. Agrees with `lagrange_value` of the periodic expansion.
pub fn markov_value_word(word: &[u64], tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    let cands = periodic_candidates(word, tol)?;
    Ok(Enclosure::max_of(cands.iter()).expect("word is non-empty"))
}

/// Indefinite binary quadratic form a x^2 + b xy + c y^2 with rational
/// coefficients and positive discriminant b^2 - 4ac.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

impl QuadraticForm {
    pub fn new(a: BigRational, b: BigRational, c: BigRational) -> Result<Self> {
        let form = Self { a, b, c };
        let disc = form.discriminant();
        if !disc.is_positive() {
            return Err(Error::NonIndefiniteForm { disc });
        }
        Ok(form)
    }

    pub fn discriminant(&self) -> BigRational {
        &self.b * &self.b - rat_int(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigRational {
        let (x, y) = (rat_big(x.clone()), rat_big(y.clone()));
        &self.a * &x * &x + &self.b * &x * &y + &self.c * &y * &y
    }

    /// Unimodular substitution (x, y) -> (m00 x + m01 y, m10 x + m11 y).
    pub fn substitute(&self, m: [[i64; 2]; 2]) -> Self {
        let [[al, be], [ga, de]] = m.map(|row| row.map(rat_int));
        Self {
            a: &self.a * &al * &al + &self.b * &al * &ga + &self.c * &ga * &ga,
            b: rat_int(2) * &self.a * &al * &be
                + &self.b * (&al * &de + &be * &ga)
                + rat_int(2) * &self.c * &ga * &de,
            c: &self.a * &be * &be + &self.b * &be * &de + &self.c * &de * &de,
        }
    }
}

/// Truncated Markov value of a form: with f normalized to discriminant 1,
/// the reciprocal of min |f(x, y)| over lattice points 0 < max(|x|,|y|) <= R.
/// The normalization divides by sqrt(disc), so the result is
/// sqrt(disc) / min |f|, enclosed to width tol.
pub fn form_markov_value(
    q: &QuadraticForm,
    radius: u64,
    tol: &BigRational,
) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if radius == 0 {
        return Err(Error::InvalidRadius);
    }
    let disc = q.discriminant();
    if !disc.is_positive() {
        return Err(Error::NonIndefiniteForm { disc });
    }
    let r = radius as i64;
    let mut min_abs: Option<(BigRational, i64, i64)> = None;
    // f(-x,-y) = f(x,y): scan y > 0 with all x, plus y = 0 with x > 0
    for y in 0..=r {
        let xs = if y == 0 { 1..=r } else { -r..=r };
        for x in xs {
            let v = q.eval(&BigInt::from(x), &BigInt::from(y)).abs();
            if v.is_zero() {
                return Err(Error::FormZeroMinimum { x, y });
            }
            if min_abs.as_ref().is_none_or(|(m, _, _)| v < *m) {
                min_abs = Some((v, x, y));
            }
        }
    }
    let (m, _, _) = min_abs.expect("radius >= 1 gives at least one point");
    let sqrt_tol = tol * &m;
    let sq = sqrt_enclosure(&disc, &sqrt_tol)?;
    Ok(sq.scale(&m.recip()))
}

/// Freiman's constant (2221564096 + 283748 sqrt(462)) / 491993569,
/// the right endpoint of the last gap of the Markov spectrum.
pub fn freiman_constant(tol: &BigRational) -> Result<Enclosure> {
    check_tolerance(tol)?;
    let num_int = rat_int(2_221_564_096);
    let coeff = rat_int(283_748);
    let den = rat_int(491_993_569);
    let sqrt_tol = tol * &den / &coeff;
    let s = sqrt_enclosure(&rat_int(462), &sqrt_tol)?;
    Ok(s.scale(&coeff).add_rational(&num_int).scale(&den.recip()))
}

/// Height map v -> log(v/2), the monotone endpoint image. The logarithm is
/// evaluated to a tolerance tied to the input width (or 2^-120 for exact
/// inputs), so the output width tracks the input width.
pub fn height_map(v: &Enclosure) -> Result<Enclosure> {
    if !v.lo().is_positive() {
        return Err(Error::NonpositiveLog(v.lo().clone()));
    }
    let two = rat_int(2);
    let (lo, hi) = (v.lo() / &two, v.hi() / &two);
    let eps = if v.is_point() {
        BigRational::new(BigInt::one(), BigInt::one() << 120)
    } else {
        v.width() / &two
    };
    let ln_lo = crate::arith::ln_enclosure(&lo, &eps)?;
    if v.is_point() {
        return Ok(ln_lo);
    }
    let ln_hi = crate::arith::ln_enclosure(&hi, &eps)?;
    Enclosure::new(ln_lo.lo().clone(), ln_hi.hi().clone())
}
