//! Regular Cantor sets defined by expanding full branches, with exact
//! rational cylinder combinatorics.
//!
//! Each branch carries its own domain interval and expands it onto a common
//! image (the hull). Cylinder intervals, derivative bounds, and Minkowski
//! sums are all exact rationals, so every reported bracket is certified:
//! dimension bounds come from Moran equations solved with directed rounding,
//! and sum-interval checks sweep exact interval unions.

use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{check_tolerance, parse_rational, rat, rat_int};
use crate::cf::{surd_enclosure, ContinuedFraction};
use crate::dyadic::DfInterval;
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::symbolic::{count_words, Sft, Sym};

/// Most cylinders a single cover may hold.
pub const CYLINDER_BUDGET: u64 = 1_000_000;
/// Most interval pairs a single Minkowski sum may combine.
pub const PAIR_BUDGET: u64 = 10_000_000;

const MORAN_PREC_CAP: u64 = 4096;
const MORAN_DEPTH_CAP: u32 = 58;

/// The expanding map carried by one branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchMap {
    /// g(x) = (x - domain.lo) / ratio, expanding the domain onto [0, 1].
    Affine { ratio: BigRational },
    /// g(x) = 1/x - digit, expanding the domain onto the hull.
    Gauss { digit: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    map: BranchMap,
    lo: BigRational,
    hi: BigRational,
}

impl Branch {
    pub fn map(&self) -> &BranchMap {
        &self.map
    }

    pub fn domain(&self) -> (&BigRational, &BigRational) {
        (&self.lo, &self.hi)
    }

    /// Exact range of |g'| over a subinterval [lo, hi] of the domain.
    fn deriv_range(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        match &self.map {
            BranchMap::Affine { ratio } => {
                let d = ratio.recip();
                (d.clone(), d)
            }
            // |g'(x)| = 1/x^2 is decreasing on (0, 1)
            BranchMap::Gauss { .. } => ((hi * hi).recip(), (lo * lo).recip()),
        }
    }

    /// Preimage of [lo, hi] (a subinterval of the hull) under g: the
    /// contracting direction. Exact; order-reversing for Gauss branches.
    fn pull_back(&self, lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
        match &self.map {
            BranchMap::Affine { ratio } => (&self.lo + ratio * lo, &self.lo + ratio * hi),
            BranchMap::Gauss { digit } => {
                let d = rat_int(*digit as i64);
                ((hi + &d).recip(), (lo + &d).recip())
            }
        }
    }
}

/// A Cantor set carved out by finitely many expanding full branches whose
/// itineraries range over a subshift of finite type.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularCantorSet {
    sft: Sft,
    branches: Vec<Branch>,
    hull_lo: BigRational,
    hull_hi: BigRational,
}

impl RegularCantorSet {
    /// Affine family: branch a contracts [0, 1] by ratio r_a; domains are
    /// placed left to right with equal gaps. Requires 0 < r_a and
    /// sum r_a <= 1.
    pub fn affine_family(ratios: &[BigRational]) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let total: BigRational = ratios.iter().sum();
        for r in ratios {
            if !r.is_positive() || r >= &rat_int(1) {
                return Err(Error::InvalidCantorData(format!(
                    "affine ratio {r} is outside (0, 1)"
                )));
            }
        }
        if total > rat_int(1) {
            return Err(Error::InvalidCantorData(format!(
                "affine ratios sum to {total} > 1, domains would overlap"
            )));
        }
        let k = ratios.len();
        let gap = if k == 1 {
            BigRational::zero()
        } else {
            (rat_int(1) - &total) / rat_int((k - 1) as i64)
        };
        let mut branches = Vec::with_capacity(k);
        let mut cursor = BigRational::zero();
        for r in ratios {
            let lo = cursor.clone();
            let hi = &lo + r;
            cursor = &hi + &gap;
            branches.push(Branch { map: BranchMap::Affine { ratio: r.clone() }, lo, hi });
        }
        let set = Self {
            sft: Sft::full(k)?,
            branches,
            hull_lo: BigRational::zero(),
            hull_hi: rat_int(1),
        };
        set.validate()?;
        Ok(set)
    }

    /// The middle-third set: two affine branches of ratio 1/3.
    pub fn middle_third() -> Self {
        Self::affine_family(&[rat(1, 3), rat(1, 3)]).expect("static data")
    }

    /// Continued fractions with digits in {1, ..., n}: Gauss branches over a
    /// rational outer hull. The true hull endpoints are the quadratic surds
    /// with digit patterns (n,1) and (1,n); the rational hull pads them
    /// outward by roughly 2^-64, which only widens every enclosure.
    pub fn gauss_cantor(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDigit(0));
        }
        // enclose the surds far more tightly than the padding, then pad both
        // sides by the same amount: symmetric padding keeps every branch
        // domain inside the hull (the pull-back contracts by at least the
        // squared hull bound, which stays below one)
        let enc_tol = BigRational::new(BigInt::one(), BigInt::one() << 128u32);
        let pad = BigRational::new(BigInt::one(), BigInt::one() << 64u32);
        let min_cf = ContinuedFraction::new(BigInt::zero(), vec![], vec![n, 1])?;
        let max_cf = ContinuedFraction::new(BigInt::zero(), vec![], vec![1, n])?;
        let hull_lo = surd_enclosure(&min_cf, &enc_tol)?.into_parts().0 - &pad;
        let hull_hi = surd_enclosure(&max_cf, &enc_tol)?.into_parts().1 + &pad;
        let mut branches = Vec::with_capacity(n as usize);
        for digit in 1..=n {
            let d = rat_int(digit as i64);
            // I(digit) = {x in hull : 1/x - digit in hull}
            let lo = (&d + &hull_hi).recip();
            let hi = (&d + &hull_lo).recip();
            branches.push(Branch { map: BranchMap::Gauss { digit }, lo, hi });
        }
        // symbol a carries digit a + 1; larger digits sit further left
        let set = Self { sft: Sft::full(n as usize)?, branches, hull_lo, hull_hi };
        set.validate()?;
        Ok(set)
    }

    /// Affine branches with explicit domain placement inside [0, 1]: each
    /// entry is (contraction ratio, domain lower endpoint). Used to present
    /// block refinements, where a branch stands for a composed word map and
    /// its domain is the word's cylinder.
    pub fn affine_with_domains(
        sft: Sft,
        data: &[(BigRational, BigRational)],
    ) -> Result<Self> {
        let branches = data
            .iter()
            .map(|(ratio, lo)| Branch {
                map: BranchMap::Affine { ratio: ratio.clone() },
                lo: lo.clone(),
                hi: lo + ratio,
            })
            .collect();
        let set = Self {
            sft,
            branches,
            hull_lo: BigRational::zero(),
            hull_hi: rat_int(1),
        };
        set.validate()?;
        Ok(set)
    }

    /// Exact interval of the cylinder with the given itinerary prefix.
    pub fn cylinder_interval(&self, word: &[Sym]) -> Result<(BigRational, BigRational)> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        if !self.sft.is_admissible(word) {
            return Err(Error::NotAdmissible(word.to_vec()));
        }
        let last = &self.branches[word[word.len() - 1]];
        let mut iv = (last.lo.clone(), last.hi.clone());
        for &a in word[..word.len() - 1].iter().rev() {
            iv = self.branches[a].pull_back(&iv.0, &iv.1);
        }
        Ok(iv)
    }

    /// Restrict the itineraries to a subshift on the same alphabet.
    pub fn with_sft(mut self, sft: Sft) -> Result<Self> {
        if sft.alphabet_size() != self.branches.len() {
            return Err(Error::InvalidCantorData(format!(
                "subshift alphabet {} does not match branch count {}",
                sft.alphabet_size(),
                self.branches.len()
            )));
        }
        self.sft = sft;
        Ok(self)
    }

    pub fn sft(&self) -> &Sft {
        &self.sft
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn branch(&self, a: Sym) -> Option<&Branch> {
        self.branches.get(a)
    }

    pub fn hull(&self) -> (&BigRational, &BigRational) {
        (&self.hull_lo, &self.hull_hi)
    }

    /// True when every branch map is affine.
    pub fn is_affine(&self) -> bool {
        self.branches
            .iter()
            .all(|b| matches!(b.map, BranchMap::Affine { .. }))
    }

    /// Continued fraction digit of a symbol, for Gauss families.
    pub fn digit_of(&self, a: Sym) -> Option<u64> {
        match self.branches.get(a)?.map {
            BranchMap::Gauss { digit } => Some(digit),
            BranchMap::Affine { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if self.hull_lo >= self.hull_hi {
            return Err(Error::InvalidCantorData("hull interval is empty".into()));
        }
        let one = rat_int(1);
        for (a, b) in self.branches.iter().enumerate() {
            if b.lo >= b.hi {
                return Err(Error::InvalidCantorData(format!(
                    "branch {a} has an empty domain"
                )));
            }
            if b.lo < self.hull_lo || b.hi > self.hull_hi {
                return Err(Error::InvalidCantorData(format!(
                    "branch {a} domain leaves the hull"
                )));
            }
            // full branch: the preimage of the hull is exactly the domain
            let (plo, phi) = b.pull_back(&self.hull_lo, &self.hull_hi);
            if plo != b.lo || phi != b.hi {
                return Err(Error::InvalidCantorData(format!(
                    "branch {a} does not map its domain onto the hull"
                )));
            }
            let (dmin, _) = b.deriv_range(&b.lo, &b.hi);
            if dmin <= one {
                return Err(Error::InvalidCantorData(format!(
                    "branch {a} is not uniformly expanding"
                )));
            }
            if let BranchMap::Gauss { .. } = b.map {
                if !b.lo.is_positive() {
                    return Err(Error::InvalidCantorData(format!(
                        "branch {a} domain must be positive"
                    )));
                }
            }
        }
        let mut by_position: Vec<&Branch> = self.branches.iter().collect();
        by_position.sort_by(|p, q| p.lo.cmp(&q.lo));
        for w in by_position.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(Error::InvalidCantorData(
                    "branch domains overlap".into(),
                ));
            }
        }
        Ok(())
    }
}

/// One cylinder of the construction: the exact interval of points whose
/// itinerary starts with `word`, and exact bounds on the derivative of the
/// word-length iterate over that interval.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub word: Vec<Sym>,
    pub lo: BigRational,
    pub hi: BigRational,
    pub deriv_min: BigRational,
    pub deriv_max: BigRational,
}

#[derive(Debug, Clone)]
pub struct CylinderCover {
    pub level: usize,
    pub cylinders: Vec<Cylinder>,
}

impl CylinderCover {
    pub fn intervals(&self) -> Vec<(BigRational, BigRational)> {
        self.cylinders.iter().map(|c| (c.lo.clone(), c.hi.clone())).collect()
    }
}

impl RegularCantorSet {
    /// All admissible cylinders of the given level (>= 1), in lexicographic
    /// word order.
    pub fn construction_level(&self, level: usize) -> Result<CylinderCover> {
        if level == 0 {
            return Err(Error::InvalidCantorData(
                "construction level must be at least 1".into(),
            ));
        }
        let needed = count_words(&self.sft, level);
        if needed > BigUint::from(CYLINDER_BUDGET) {
            return Err(Error::BudgetExceeded {
                what: "cylinder construction",
                needed: needed.try_into().unwrap_or(u64::MAX),
                budget: CYLINDER_BUDGET,
            });
        }
        let mut current: Vec<Cylinder> = (0..self.branches.len())
            .map(|a| {
                let b = &self.branches[a];
                let (dmin, dmax) = b.deriv_range(&b.lo, &b.hi);
                Cylinder {
                    word: vec![a],
                    lo: b.lo.clone(),
                    hi: b.hi.clone(),
                    deriv_min: dmin,
                    deriv_max: dmax,
                }
            })
            .collect();
        for _ in 1..level {
            let mut next = Vec::new();
            for a in 0..self.branches.len() {
                let b = &self.branches[a];
                for c in &current {
                    if !self.sft.allows(a, c.word[0]) {
                        continue;
                    }
                    let (lo, hi) = b.pull_back(&c.lo, &c.hi);
                    let (dmin, dmax) = b.deriv_range(&lo, &hi);
                    let mut word = Vec::with_capacity(c.word.len() + 1);
                    word.push(a);
                    word.extend_from_slice(&c.word);
                    next.push(Cylinder {
                        word,
                        deriv_min: &dmin * &c.deriv_min,
                        deriv_max: &dmax * &c.deriv_max,
                        lo,
                        hi,
                    });
                }
            }
            current = next;
        }
        Ok(CylinderCover { level, cylinders: current })
    }

    /// Moran dimension bracket from the level-`level` cover: the endpoints
    /// bracket the roots of the two Moran equations built from the
    /// derivative bounds of the cylinders. For full transition structure
    /// these certify the Hausdorff dimension from both sides (bounded
    /// distortion sandwich), the brackets nest, and their width shrinks
    /// with the level; the upper endpoint is a covering bound for any
    /// transition structure. For affine families the two roots coincide,
    /// so the bracket is a point up to `tol`.
    pub fn dim_bounds(&self, level: usize, tol: &BigRational) -> Result<Enclosure> {
        let cover = self.construction_level(level)?;
        if cover.cylinders.is_empty() {
            return Ok(Enclosure::zero());
        }
        let small: Vec<BigRational> =
            cover.cylinders.iter().map(|c| c.deriv_max.recip()).collect();
        let large: Vec<BigRational> =
            cover.cylinders.iter().map(|c| c.deriv_min.recip()).collect();
        let (lo, _) = moran_root(&small, tol)?;
        let (_, hi) = moran_root(&large, tol)?;
        Enclosure::new(lo, hi)
    }
}

fn moran_prec(tol: &BigRational) -> u64 {
    64 + tol.denom().bits().saturating_sub(tol.numer().bits())
}

enum MoranCmp {
    Above,
    Below,
    Exact,
    Unresolved,
}

/// Compare F(k/2^j) = sum of m_w * w^(k/2^j) with 1 over (weight,
/// multiplicity) pairs, escalating precision until the directed-rounding
/// interval decides or proves exact equality.
fn moran_compare(weights: &[(BigRational, u64)], k: u64, j: u32, base_prec: u64) -> MoranCmp {
    let one = rat_int(1);
    let mut prec = base_prec;
    loop {
        let mut sum = DfInterval::from_rational(&BigRational::zero(), prec);
        let mut early_above = false;
        for (w, m) in weights {
            let mut term = DfInterval::from_rational(w, prec).dyadic_pow(k, j, prec);
            if *m > 1 {
                let mult = DfInterval::from_rational(&rat_int(*m as i64), prec);
                term = DfInterval {
                    lo: term.lo.mul(&mult.lo, prec, crate::dyadic::Dir::Down),
                    hi: term.hi.mul(&mult.hi, prec, crate::dyadic::Dir::Up),
                };
            }
            sum = sum.add(&term, prec);
            if sum.lo.cmp_rational(&one) == std::cmp::Ordering::Greater {
                early_above = true;
                break;
            }
        }
        if early_above {
            return MoranCmp::Above;
        }
        let lo_cmp = sum.lo.cmp_rational(&one);
        let hi_cmp = sum.hi.cmp_rational(&one);
        match (lo_cmp, hi_cmp) {
            (std::cmp::Ordering::Greater, _) => return MoranCmp::Above,
            (_, std::cmp::Ordering::Less) => return MoranCmp::Below,
            (std::cmp::Ordering::Equal, std::cmp::Ordering::Equal) => return MoranCmp::Exact,
            _ => {
                if prec >= MORAN_PREC_CAP {
                    return exact_moran_compare(weights, k, j);
                }
                prec *= 2;
            }
        }
    }
}

/// Exact rational evaluation of F(k/2^j) against 1, applicable when every
/// weight raised to k has an exact 2^j-th rational root. Positive rational
/// terms can only sum to exactly 1 at a dyadic exponent when each term is
/// itself rational (linear independence of radicals), so this decides every
/// stall the interval route hits at an exactly-dyadic root, such as two
/// branches of ratio 1/2 (root 1) or nine weights of 1/81 (root 1/2).
fn exact_moran_compare(weights: &[(BigRational, u64)], k: u64, j: u32) -> MoranCmp {
    if k > 4096 || j > 16 {
        return MoranCmp::Unresolved;
    }
    let shift = j.min(k.trailing_zeros());
    let (k, j) = ((k >> shift) as u32, j - shift);
    let mut sum = BigRational::zero();
    for (w, m) in weights {
        let mut num = w.numer().magnitude().pow(k);
        let mut den = w.denom().magnitude().pow(k);
        for _ in 0..j {
            let (rn, rd) = (num.sqrt(), den.sqrt());
            if &rn * &rn != num || &rd * &rd != den {
                return MoranCmp::Unresolved;
            }
            num = rn;
            den = rd;
        }
        sum += BigRational::new(BigInt::from(num * *m), BigInt::from(den));
    }
    match sum.cmp(&rat_int(1)) {
        std::cmp::Ordering::Greater => MoranCmp::Above,
        std::cmp::Ordering::Less => MoranCmp::Below,
        std::cmp::Ordering::Equal => MoranCmp::Exact,
    }
}

/// Bracket the root of sum_i w_i^d = 1 for weights in (0, 1), to width at
/// most `tol` (dyadic endpoints, both certified sides). A single weight
/// gives the exact root 0. F(d) is strictly decreasing, so the bisection
/// keeps a proven invariant F(lo) > 1 > F(hi).
pub fn moran_root(
    weights: &[BigRational],
    tol: &BigRational,
) -> Result<(BigRational, BigRational)> {
    check_tolerance(tol)?;
    if weights.is_empty() {
        return Err(Error::EmptyCover);
    }
    let one = rat_int(1);
    for w in weights {
        if !w.is_positive() || w >= &one {
            return Err(Error::InvalidCantorData(format!(
                "Moran weight {w} is outside (0, 1)"
            )));
        }
    }
    if weights.len() == 1 {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    // group repeated weights so each distinct ratio is raised to the
    // exponent once per evaluation
    let mut grouped: BTreeMap<BigRational, u64> = BTreeMap::new();
    for w in weights {
        *grouped.entry(w.clone()).or_insert(0) += 1;
    }
    let weights: Vec<(BigRational, u64)> = grouped.into_iter().collect();
    let weights = weights.as_slice();
    let prec = moran_prec(tol);
    // find an integer upper endpoint with F proven below 1
    let mut h: u64 = 1;
    loop {
        match moran_compare(weights, h, 0, prec) {
            MoranCmp::Below => break,
            MoranCmp::Exact => return Ok((rat_int(h as i64), rat_int(h as i64))),
            MoranCmp::Above | MoranCmp::Unresolved => {
                h = h.checked_mul(2).ok_or(Error::BudgetExceeded {
                    what: "Moran root search",
                    needed: u64::MAX,
                    budget: 1 << 20,
                })?;
                if h > (1 << 20) {
                    return Err(Error::BudgetExceeded {
                        what: "Moran root search",
                        needed: h,
                        budget: 1 << 20,
                    });
                }
            }
        }
    }
    // bisect [kl, kh] / 2^j
    let (mut kl, mut kh, mut j) = (0u64, h, 0u32);
    let dyadic = |k: u64, j: u32| BigRational::new(BigInt::from(k), BigInt::one() << j);
    while &dyadic(kh - kl, j) > tol && j < MORAN_DEPTH_CAP {
        kl *= 2;
        kh *= 2;
        j += 1;
        let km = (kl + kh) / 2;
        match moran_compare(weights, km, j, prec) {
            MoranCmp::Above => kl = km,
            MoranCmp::Below => kh = km,
            MoranCmp::Exact => return Ok((dyadic(km, j), dyadic(km, j))),
            MoranCmp::Unresolved => break,
        }
    }
    Ok((dyadic(kl, j), dyadic(kh, j)))
}

/// Union of pairwise Minkowski sums of two interval families, merged into
/// maximal disjoint components (touching intervals merge).
#[derive(Debug, Clone)]
pub struct SumCover {
    pub components: Vec<(BigRational, BigRational)>,
    pub pairs: u64,
}

pub fn cantor_sum_cover(a: &CylinderCover, b: &CylinderCover) -> Result<SumCover> {
    sum_cover_of_intervals(&a.intervals(), &b.intervals())
}

pub fn sum_cover_of_intervals(
    a: &[(BigRational, BigRational)],
    b: &[(BigRational, BigRational)],
) -> Result<SumCover> {
    let pairs = (a.len() as u64).saturating_mul(b.len() as u64);
    if pairs > PAIR_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "Minkowski sum pairs",
            needed: pairs,
            budget: PAIR_BUDGET,
        });
    }
    if a.is_empty() || b.is_empty() {
        return Ok(SumCover { components: Vec::new(), pairs });
    }
    let mut xs: Vec<(BigRational, BigRational)> = a.to_vec();
    let mut ys: Vec<(BigRational, BigRational)> = b.to_vec();
    xs.sort_by(|p, q| p.0.cmp(&q.0));
    ys.sort_by(|p, q| p.0.cmp(&q.0));
    // one sorted stream per xs entry; k-way merge by lower endpoint keeps
    // peak memory at the number of streams, not the number of pairs
    let mut heap: BinaryHeap<std::cmp::Reverse<(BigRational, usize, usize)>> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| std::cmp::Reverse((&x.0 + &ys[0].0, i, 0usize)))
        .collect();
    let mut components: Vec<(BigRational, BigRational)> = Vec::new();
    while let Some(std::cmp::Reverse((lo, i, t))) = heap.pop() {
        let hi = &xs[i].1 + &ys[t].1;
        match components.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => components.push((lo, hi)),
        }
        if t + 1 < ys.len() {
            heap.push(std::cmp::Reverse((&xs[i].0 + &ys[t + 1].0, i, t + 1)));
        }
    }
    Ok(SumCover { components, pairs })
}

/// Result of sweeping a sum cover across a target interval.
#[derive(Debug, Clone)]
pub struct SumCheckReport {
    pub pass: bool,
    /// Largest uncovered jump inside the target (zero when fully covered).
    pub largest_gap: BigRational,
    pub components_touched: usize,
}

/// Verify that every point of [target_lo, target_hi] is covered by the sum
/// cover, allowing uncovered jumps of at most `slack`. Reports the largest
/// gap found either way.
pub fn sum_interval_check(
    cover: &SumCover,
    target_lo: &BigRational,
    target_hi: &BigRational,
    slack: &BigRational,
) -> Result<SumCheckReport> {
    if target_lo >= target_hi {
        return Err(Error::EmptyTarget {
            lo: Box::new(target_lo.clone()),
            hi: Box::new(target_hi.clone()),
        });
    }
    if slack.is_negative() {
        return Err(Error::InvalidTolerance(slack.clone()));
    }
    if cover.components.is_empty() {
        return Err(Error::EmptyCover);
    }
    let mut covered_to = target_lo.clone();
    let mut largest_gap = BigRational::zero();
    let mut touched = 0usize;
    for (lo, hi) in &cover.components {
        if hi <= &covered_to {
            continue;
        }
        if lo > &covered_to {
            let gap_end = lo.min(target_hi);
            if *gap_end > covered_to {
                let gap = gap_end - &covered_to;
                if gap > largest_gap {
                    largest_gap = gap;
                }
            }
            if lo >= target_hi {
                break;
            }
            covered_to = lo.clone();
        }
        touched += 1;
        if hi > &covered_to {
            covered_to = hi.clone();
        }
        if &covered_to >= target_hi {
            break;
        }
    }
    if covered_to < *target_hi {
        let gap = target_hi - &covered_to;
        if gap > largest_gap {
            largest_gap = gap;
        }
    }
    Ok(SumCheckReport { pass: largest_gap <= *slack, largest_gap, components_touched: touched })
}

/// Parse a Cantor set family description:
/// `middle_third`, `gauss:N`, or `affine:r1,r2,...` with rational ratios.
pub fn parse_family(s: &str) -> Result<RegularCantorSet> {
    let s = s.trim();
    if s == "middle_third" {
        return Ok(RegularCantorSet::middle_third());
    }
    if let Some(rest) = s.strip_prefix("gauss:") {
        let n: u64 = rest
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid digit bound in {s:?}")))?;
        return RegularCantorSet::gauss_cantor(n);
    }
    if let Some(rest) = s.strip_prefix("affine:") {
        let ratios: Vec<BigRational> = rest
            .split(',')
            .map(|p| parse_rational(p.trim()))
            .collect::<Result<_>>()?;
        return RegularCantorSet::affine_family(&ratios);
    }
    Err(Error::Parse(format!(
        "unknown Cantor family {s:?}; expected middle_third, gauss:N, or affine:r1,r2,..."
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::pow10;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    /// r < log 2 / log 3 iff 3^p < 2^q for r = p/q > 0.
    fn below_log2_log3(r: &BigRational) -> bool {
        let p: u32 = r.numer().try_into().unwrap();
        let q: u32 = r.denom().try_into().unwrap();
        big(3).pow(p) < big(2).pow(q)
    }

    #[test]
    fn middle_third_cylinders_are_exact() {
        let c = RegularCantorSet::middle_third();
        let cover = c.construction_level(3).unwrap();
        assert_eq!(cover.cylinders.len(), 8);
        let w = rat(1, 27);
        for cyl in &cover.cylinders {
            assert_eq!(&cyl.hi - &cyl.lo, w);
            assert_eq!(cyl.deriv_min, rat_int(27));
            assert_eq!(cyl.deriv_max, rat_int(27));
        }
        assert_eq!(cover.cylinders[0].lo, rat(0, 1));
        assert_eq!(cover.cylinders[7].hi, rat(1, 1));
    }

    #[test]
    fn length_sandwich_holds_exactly() {
        for set in [
            RegularCantorSet::middle_third(),
            RegularCantorSet::gauss_cantor(3).unwrap(),
        ] {
            let (hl, hh) = set.hull();
            let hull_w = hh - hl;
            for level in 1..=4 {
                for cyl in set.construction_level(level).unwrap().cylinders {
                    let w = &cyl.hi - &cyl.lo;
                    assert!(&cyl.deriv_min * &w <= hull_w);
                    assert!(&cyl.deriv_max * &w >= hull_w);
                }
            }
        }
    }

    #[test]
    fn middle_third_dimension_brackets_log2_log3_at_every_level() {
        let c = RegularCantorSet::middle_third();
        let tol = rat(1, 4096);
        for level in 1..=4 {
            let d = c.dim_bounds(level, &tol).unwrap();
            assert!(below_log2_log3(d.lo()));
            assert!(!below_log2_log3(d.hi()));
            assert!(d.width() <= rat(2, 4096));
        }
    }

    #[test]
    fn gauss_two_digit_brackets_nest_and_shrink() {
        let c = RegularCantorSet::gauss_cantor(2).unwrap();
        let tol = pow10(5);
        let d2 = c.dim_bounds(2, &tol).unwrap();
        let d4 = c.dim_bounds(4, &tol).unwrap();
        let known = rat(5312805, 10_000_000);
        assert!(d2.contains(&known));
        assert!(d4.contains(&known));
        assert!(d2.contains_enclosure(&d4));
        assert!(d4.width() < d2.width());
    }

    #[test]
    fn gauss_hull_endpoints_are_tight() {
        // C(4): hull endpoints approximate (sqrt 2 - 1)/2 and 2 (sqrt 2 - 1),
        // the roots of 4y^2 + 4y - 1 and y^2 + 4y - 4
        let c = RegularCantorSet::gauss_cantor(4).unwrap();
        let (lo, hi) = c.hull();
        let f_lo = |y: &BigRational| rat_int(4) * y * y + rat_int(4) * y - rat_int(1);
        let f_hi = |y: &BigRational| y * y + rat_int(4) * y - rat_int(4);
        let pad = BigRational::new(big(1), big(1) << 60);
        assert!(f_lo(lo) <= BigRational::zero());
        assert!(f_lo(&(lo + &pad)) >= BigRational::zero());
        assert!(f_hi(hi) >= BigRational::zero());
        assert!(f_hi(&(hi - &pad)) <= BigRational::zero());
    }

    #[test]
    fn moran_root_exact_cases() {
        let (lo, hi) = moran_root(&[rat(1, 4), rat(1, 4)], &pow10(6)).unwrap();
        assert_eq!(lo, rat(1, 2));
        assert_eq!(hi, rat(1, 2));
        let (lo, hi) = moran_root(&[rat(1, 2), rat(1, 2)], &pow10(6)).unwrap();
        assert_eq!(lo, rat_int(1));
        assert_eq!(hi, rat_int(1));
        let (lo, hi) = moran_root(&[rat(1, 3)], &pow10(6)).unwrap();
        assert_eq!(lo, BigRational::zero());
        assert_eq!(hi, BigRational::zero());
        assert!(moran_root(&[rat_int(1)], &pow10(6)).is_err());
        assert!(moran_root(&[], &pow10(6)).is_err());
        // non-dyadic weights whose root is exactly dyadic: the interval
        // route alone cannot certify the probe at 1/2, the exact rational
        // fallback can
        let (lo, hi) = moran_root(&vec![rat(1, 81); 9], &pow10(9)).unwrap();
        assert_eq!(lo, rat(1, 2));
        assert_eq!(hi, rat(1, 2));
        let (lo, hi) = moran_root(&[rat(1, 50), rat(9, 50), rat(16, 50)], &pow10(9)).unwrap();
        // 1/sqrt(50) + 3/sqrt(50) + 4/sqrt(50) is not 1; root is irrational
        // and must still come out tightly bracketed
        assert!(hi - lo <= pow10(9));
    }

    #[test]
    fn full_measure_affine_family_has_dimension_one_exactly() {
        let c = RegularCantorSet::affine_family(&[rat(1, 2), rat(1, 2)]).unwrap();
        for level in 1..=3 {
            let d = c.dim_bounds(level, &pow10(4)).unwrap();
            assert!(d.is_point());
            assert_eq!(d.lo(), &rat_int(1));
        }
    }

    #[test]
    fn sft_restriction_lowers_dimension() {
        let gm = Sft::golden_mean();
        let c = RegularCantorSet::middle_third().with_sft(gm).unwrap();
        let tol = rat(1, 4096);
        let d = c.dim_bounds(6, &tol).unwrap();
        // 21 admissible words of length 6, so the level-6 Moran root solves
        // 21 * 3^(-6 d) = 1: check 3^(6 r) vs 21 exactly at the endpoints
        let below_root = |r: &BigRational| {
            let p: u32 = (r.numer() * big(6)).try_into().unwrap();
            let q: u32 = r.denom().try_into().unwrap();
            big(3).pow(p) < big(21).pow(q)
        };
        assert!(below_root(d.lo()));
        assert!(!below_root(d.hi()));
        assert!(d.width() <= rat(2, 4096));
        let full = RegularCantorSet::middle_third().dim_bounds(6, &tol).unwrap();
        assert!(d.hi() < full.lo());
    }

    #[test]
    fn middle_third_self_sum_covers_zero_two() {
        let c = RegularCantorSet::middle_third();
        let cover = c.construction_level(3).unwrap();
        let sum = cantor_sum_cover(&cover, &cover).unwrap();
        assert_eq!(sum.pairs, 64);
        assert_eq!(sum.components.len(), 1);
        assert_eq!(sum.components[0], (rat(0, 1), rat(2, 1)));
        let report =
            sum_interval_check(&sum, &rat(0, 1), &rat(2, 1), &BigRational::zero()).unwrap();
        assert!(report.pass);
        assert!(report.largest_gap.is_zero());
    }

    #[test]
    fn sparse_sum_reports_its_gap() {
        // {0} + [0,1] u [2,3] leaves the gap (1, 2)
        let a = vec![(rat(0, 1), rat(0, 1))];
        let b = vec![(rat(0, 1), rat(1, 1)), (rat(2, 1), rat(3, 1))];
        let sum = sum_cover_of_intervals(&a, &b).unwrap();
        assert_eq!(sum.components.len(), 2);
        let report = sum_interval_check(&sum, &rat(0, 1), &rat(3, 1), &rat(1, 100)).unwrap();
        assert!(!report.pass);
        assert_eq!(report.largest_gap, rat_int(1));
        let lax = sum_interval_check(&sum, &rat(0, 1), &rat(3, 1), &rat(3, 2)).unwrap();
        assert!(lax.pass);
    }

    #[test]
    fn four_digit_sum_covers_inner_rational_window() {
        // level-2 covers of C(4) already sum across [0.415, 1.65], inside
        // [sqrt 2 - 1, 4 (sqrt 2 - 1)]
        let c = RegularCantorSet::gauss_cantor(4).unwrap();
        let cover = c.construction_level(2).unwrap();
        let sum = cantor_sum_cover(&cover, &cover).unwrap();
        let report =
            sum_interval_check(&sum, &rat(415, 1000), &rat(165, 100), &BigRational::zero())
                .unwrap();
        assert!(report.pass, "largest gap {}", report.largest_gap);
    }

    #[test]
    fn budgets_are_enforced() {
        let c = RegularCantorSet::gauss_cantor(4).unwrap();
        assert!(matches!(
            c.construction_level(11),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn family_parser_round_trips() {
        assert_eq!(parse_family("middle_third").unwrap().branch_count(), 2);
        assert_eq!(parse_family("gauss:4").unwrap().branch_count(), 4);
        let aff = parse_family("affine:1/3,0.25").unwrap();
        assert_eq!(aff.branch_count(), 2);
        assert!(parse_family("affine:2/3,2/3").is_err());
        assert!(parse_family("nonsense").is_err());
    }
}
