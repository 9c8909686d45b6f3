//! Subshifts of finite type, periodic points, window potentials, and
//! dynamical Markov spectrum sampling.
//!
//! Counting uses exact big-integer transfer matrices. Periodic points are
//! enumerated as primitive necklaces (one lexicographically least
//! representative per rotation class). Spectrum samples are inner
//! approximations: every reported value is attained by its witness orbit.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{check_tolerance, decimal_string, rat_int, Dir};
use crate::cf::finite_cf_value;
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};

pub type Sym = usize;

/// Internal enumeration guard: adjust if a caller genuinely needs more.
const WORD_BUDGET: u64 = 1_000_000;

/// Subshift of finite type on alphabet {0, ..., n-1} given by allowed
/// transitions. Every symbol must occur in at least one allowed pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft {
    n: usize,
    allowed: Vec<bool>, // row-major n x n
}

impl Sft {
    pub fn new(n: usize, pairs: &[(Sym, Sym)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut allowed = vec![false; n * n];
        for &(a, b) in pairs {
            for s in [a, b] {
                if s >= n {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet: n });
                }
            }
            allowed[a * n + b] = true;
        }
        let sft = Self { n, allowed };
        for s in 0..n {
            let occurs = (0..n).any(|t| sft.allows(s, t) || sft.allows(t, s));
            if !occurs {
                return Err(Error::UnusedSymbol(s));
            }
        }
        Ok(sft)
    }

    pub fn full(n: usize) -> Result<Self> {
        let pairs: Vec<(Sym, Sym)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .collect();
        Self::new(n, &pairs)
    }

    /// Full shift minus the given transitions.
    pub fn forbidding(n: usize, forbidden: &[(Sym, Sym)]) -> Result<Self> {
        let pairs: Vec<(Sym, Sym)> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|p| !forbidden.contains(p))
            .collect();
        Self::new(n, &pairs)
    }

    /// Golden-mean shift: two symbols, transition (1, 1) forbidden.
    pub fn golden_mean() -> Self {
        Self::forbidding(2, &[(1, 1)]).expect("static data")
    }

    pub fn alphabet_size(&self) -> usize {
        self.n
    }

    pub fn allows(&self, a: Sym, b: Sym) -> bool {
        self.allowed[a * self.n + b]
    }

    pub fn allowed_pairs(&self) -> Vec<(Sym, Sym)> {
        (0..self.n)
            .flat_map(|a| (0..self.n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.allows(a, b))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let pairs: Vec<(Sym, Sym)> = self.allowed_pairs().iter().map(|&(a, b)| (b, a)).collect();
        Self::new(self.n, &pairs).expect("transpose preserves symbol usage")
    }

    pub fn is_admissible(&self, word: &[Sym]) -> bool {
        word.iter().all(|&s| s < self.n)
            && word.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    pub fn is_cyclically_admissible(&self, word: &[Sym]) -> bool {
        !word.is_empty()
            && self.is_admissible(word)
            && self.allows(word[word.len() - 1], word[0])
    }

    /// Exact transfer matrix (adjacency matrix with big-integer entries).
    pub fn transfer_matrix(&self) -> Vec<Vec<BigUint>> {
        (0..self.n)
            .map(|a| {
                (0..self.n)
                    .map(|b| if self.allows(a, b) { BigUint::one() } else { BigUint::zero() })
                    .collect()
            })
            .collect()
    }

    /// Least k <= cap with A^k entrywise positive, if any.
    pub fn mixing_certificate(&self, cap: u32) -> Option<u32> {
        let mut power = self.allowed.clone();
        for k in 1..=cap {
            if power.iter().all(|&x| x) {
                return Some(k);
            }
            let mut next = vec![false; self.n * self.n];
            for a in 0..self.n {
                for c in 0..self.n {
                    if power[a * self.n + c] {
                        for b in 0..self.n {
                            if self.allowed[c * self.n + b] {
                                next[a * self.n + b] = true;
                            }
                        }
                    }
                }
            }
            power = next;
        }
        None
    }

    /// All admissible words of the given length, lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Result<Vec<Vec<Sym>>> {
        if len == 0 {
            return Ok(vec![Vec::new()]);
        }
        let bound = (self.n as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
        if bound > WORD_BUDGET {
            let exact = count_words(self, len);
            if exact > BigUint::from(WORD_BUDGET) {
                return Err(Error::BudgetExceeded {
                    what: "admissible word enumeration",
                    needed: exact.try_into().unwrap_or(u64::MAX),
                    budget: WORD_BUDGET,
                });
            }
        }
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Sym>> = (0..self.n).rev().map(|s| vec![s]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == len {
                out.push(w);
                continue;
            }
            let last = *w.last().unwrap();
            for b in (0..self.n).rev() {
                if self.allows(last, b) {
                    let mut next = w.clone();
                    next.push(b);
                    stack.push(next);
                }
            }
        }
        Ok(out)
    }
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = BigUint::zero();
                    for k in 0..n {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc += &a[i][k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Number of admissible words of length `len`: the entry sum of A^(len-1).
/// The empty word counts once.
pub fn count_words(s: &Sft, len: usize) -> BigUint {
    if len == 0 {
        return BigUint::one();
    }
    let mut result: Option<Vec<Vec<BigUint>>> = None; // A^(len-1), None = identity
    let mut base = s.transfer_matrix();
    let mut k = len - 1;
    while k > 0 {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => mat_mul(&r, &base),
            });
        }
        k >>= 1;
        if k > 0 {
            base = mat_mul(&base, &base);
        }
    }
    match result {
        None => BigUint::from(s.alphabet_size()),
        Some(m) => m.iter().flatten().sum(),
    }
}

/// A periodic orbit, stored as one cyclically admissible word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PeriodicPoint {
    word: Vec<Sym>,
}

impl PeriodicPoint {
    pub fn new(s: &Sft, word: Vec<Sym>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        if !s.is_cyclically_admissible(&word) {
            return Err(Error::NotAdmissible(word));
        }
        Ok(Self { word })
    }

    pub fn word(&self) -> &[Sym] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol at bi-infinite position i (periodic unrolling).
    pub fn at(&self, i: i64) -> Sym {
        let n = self.word.len() as i64;
        self.word[(((i % n) + n) % n) as usize]
    }
}

fn is_primitive(word: &[Sym]) -> bool {
    let n = word.len();
    (1..n)
        .filter(|&d| n.is_multiple_of(d))
        .all(|d| !word.chunks(d).all(|c| c == &word[..d]))
}

fn is_least_rotation(word: &[Sym]) -> bool {
    let n = word.len();
    (1..n).all(|r| {
        let rotated = (0..n).map(|i| word[(i + r) % n]);
        word.iter().copied().le(rotated)
    })
}

/// All periodic orbits of period <= max_period: primitive necklaces in
/// lexicographically least rotation, ordered by (length, word).
pub fn enumerate_periodic(s: &Sft, max_period: usize) -> Result<Vec<PeriodicPoint>> {
    let mut out = Vec::new();
    for len in 1..=max_period {
        for w in s.admissible_words(len)? {
            if s.allows(w[len - 1], w[0]) && is_primitive(&w) && is_least_rotation(&w) {
                out.push(PeriodicPoint { word: w });
            }
        }
    }
    Ok(out)
}

/// A local observable: a value on admissible windows of length 2m+1
/// centered at position 0. Two-sided orbit functionals use the same shape.
pub trait Potential {
    fn locality(&self) -> usize;

    /// Evaluate on a window of length 2*locality+1 (center at index
    /// locality). The enclosure accounts for everything the window does not
    /// determine.
    fn eval_window(&self, window: &[Sym]) -> Result<Enclosure>;
}

/// Exact table-driven potential.
#[derive(Debug, Clone)]
pub struct TablePotential {
    m: usize,
    entries: std::collections::BTreeMap<Vec<Sym>, BigRational>,
}

impl TablePotential {
    /// Build from a rule over all admissible windows of the subshift.
    pub fn from_rule(
        s: &Sft,
        m: usize,
        rule: impl Fn(&[Sym]) -> BigRational,
    ) -> Result<Self> {
        let mut entries = std::collections::BTreeMap::new();
        for w in s.admissible_words(2 * m + 1)? {
            let v = rule(&w);
            entries.insert(w, v);
        }
        Ok(Self { m, entries })
    }

    pub fn constant(c: BigRational) -> Self {
        let mut entries = std::collections::BTreeMap::new();
        entries.insert(Vec::new(), c);
        Self { m: 0, entries }
    }
}

impl Potential for TablePotential {
    fn locality(&self) -> usize {
        self.m
    }

    fn eval_window(&self, window: &[Sym]) -> Result<Enclosure> {
        if self.entries.len() == 1 && self.entries.keys().next().unwrap().is_empty() {
            return Ok(Enclosure::point(self.entries.values().next().unwrap().clone()));
        }
        self.entries
            .get(window)
            .map(|v| Enclosure::point(v.clone()))
            .ok_or_else(|| Error::NotAdmissible(window.to_vec()))
    }
}

/// The two-sided continued fraction potential alpha_0 + beta_0, truncated at
/// locality m. Window symbols map to digits; forward and backward finite
/// expansions are evaluated exactly, and the unseen tails contribute at most
/// 1/(q_m q_{m+1}) <= 2^(1-m) on each side, folded into the enclosure.
#[derive(Debug, Clone)]
pub struct CfSumPotential {
    m: usize,
    digits: Vec<u64>, // symbol -> continued fraction digit
}

impl CfSumPotential {
    pub fn new(m: usize, digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for &d in &digits {
            if d == 0 {
                return Err(Error::InvalidDigit(0));
            }
        }
        Ok(Self { m, digits })
    }

    /// Digits 1..=n for the full shift on n symbols.
    pub fn for_digit_alphabet(m: usize, n: usize) -> Result<Self> {
        Self::new(m, (1..=n as u64).collect())
    }

    fn digit(&self, s: Sym) -> Result<num_bigint::BigInt> {
        self.digits
            .get(s)
            .map(|&d| num_bigint::BigInt::from(d))
            .ok_or(Error::SymbolOutOfRange { symbol: s, alphabet: self.digits.len() })
    }
}

impl Potential for CfSumPotential {
    fn locality(&self) -> usize {
        self.m
    }

    fn eval_window(&self, window: &[Sym]) -> Result<Enclosure> {
        let m = self.m;
        if window.len() != 2 * m + 1 {
            return Err(Error::Parse(format!(
                "window length {} does not match locality {m}",
                window.len()
            )));
        }
        let center = self.digit(window[m])?;
        let fwd: Vec<num_bigint::BigInt> =
            window[m + 1..].iter().map(|&s| self.digit(s)).collect::<Result<_>>()?;
        let bwd: Vec<num_bigint::BigInt> =
            window[..m].iter().rev().map(|&s| self.digit(s)).collect::<Result<_>>()?;
        let alpha = finite_cf_value(&center, &fwd);
        let beta = finite_cf_value(&num_bigint::BigInt::from(0), &bwd);
        // tail bound 2^(1-m) per side: q_m q_{m+1} >= F_{m+1} F_{m+2} >= 2^(m-1)
        let slack = if m == 0 {
            rat_int(4)
        } else {
            BigRational::new(4.into(), num_bigint::BigInt::one() << m)
        };
        Ok(Enclosure::point(alpha + beta).widen(&slack))
    }
}

fn unrolled_window(p: &PeriodicPoint, center: usize, m: usize) -> Vec<Sym> {
    (-(m as i64)..=m as i64)
        .map(|k| p.at(center as i64 + k))
        .collect()
}

/// Dynamical Markov value of a periodic orbit: max of the potential along
/// the orbit, evaluated on the periodic unrolling (so short words need no
/// special case). `tol` is a refinement hint; the built-in potentials
/// already evaluate at their intrinsic precision, which this never loosens.
pub fn dyn_markov_value(
    s: &Sft,
    p: &PeriodicPoint,
    f: &dyn Potential,
    tol: &BigRational,
) -> Result<Enclosure> {
    check_tolerance(tol)?;
    if !s.is_cyclically_admissible(p.word()) {
        return Err(Error::NotAdmissible(p.word().to_vec()));
    }
    let m = f.locality();
    let cands: Vec<Enclosure> = (0..p.len())
        .map(|j| f.eval_window(&unrolled_window(p, j, m)))
        .collect::<Result<_>>()?;
    Ok(Enclosure::max_of(cands.iter()).expect("orbit is non-empty"))
}

/// Inner approximation of a dynamical spectrum: the multiset of orbit values
/// over all periodic orbits of period <= max_period, sorted by midpoint.
#[derive(Debug, Clone)]
pub struct SpectrumSample {
    pub entries: Vec<(Enclosure, PeriodicPoint)>,
    pub max_period: usize,
    pub tol: BigRational,
}

pub fn spectrum_sample(
    s: &Sft,
    f: &dyn Potential,
    max_period: usize,
    tol: &BigRational,
) -> Result<SpectrumSample> {
    check_tolerance(tol)?;
    let mut entries: Vec<(Enclosure, PeriodicPoint)> = enumerate_periodic(s, max_period)?
        .into_iter()
        .map(|p| dyn_markov_value(s, &p, f, tol).map(|e| (e, p)))
        .collect::<Result<_>>()?;
    entries.sort_by(|(ea, pa), (eb, pb)| {
        ea.midpoint().cmp(&eb.midpoint()).then_with(|| pa.cmp(pb))
    });
    Ok(SpectrumSample { entries, max_period, tol: tol.clone() })
}

impl SpectrumSample {
    pub fn values(&self) -> Vec<&Enclosure> {
        self.entries.iter().map(|(e, _)| e).collect()
    }

    /// CSV with header value_lo,value_hi,witness_word. Endpoints rounded
    /// outward to `digits` decimal places; witness symbols are rendered via
    /// `label` (for instance a digit map) and joined with spaces.
    pub fn to_csv(&self, digits: u32, label: impl Fn(Sym) -> String) -> String {
        let mut out = String::from("value_lo,value_hi,witness_word\n");
        for (e, p) in &self.entries {
            let word: Vec<String> = p.word().iter().map(|&s| label(s)).collect();
            out.push_str(&format!(
                "{},{},{}\n",
                decimal_string(e.lo(), digits, Dir::Down),
                decimal_string(e.hi(), digits, Dir::Up),
                word.join(" ")
            ));
        }
        out
    }
}

/// A maximal run of nearby sample midpoints: heuristic evidence of an
/// interval inside the spectrum, never a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectedRun {
    pub lo: BigRational,
    pub hi: BigRational,
    pub run_len: usize,
}

/// Scan sorted midpoints for maximal runs with successive gaps at most
/// `gap_threshold`; runs shorter than 2 points are dropped.
pub fn interval_detect(sample: &SpectrumSample, gap_threshold: &BigRational) -> Vec<DetectedRun> {
    let mids: Vec<BigRational> = sample.entries.iter().map(|(e, _)| e.midpoint()).collect();
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=mids.len() {
        let breaks = i == mids.len() || &mids[i] - &mids[i - 1] > *gap_threshold;
        if breaks {
            if i - start >= 2 {
                runs.push(DetectedRun {
                    lo: mids[start].clone(),
                    hi: mids[i - 1].clone(),
                    run_len: i - start,
                });
            }
            start = i;
        }
    }
    runs
}
