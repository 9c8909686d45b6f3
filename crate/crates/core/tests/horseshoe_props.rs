//! Property suites for Markov horseshoes: duality between the two
//! foliations under time reversal, exact additivity of the dimension
//! estimate, monotonicity under passage to sub-horseshoes, and rotation
//! invariance of orbit maxima.

use num_rational::BigRational;
use proptest::prelude::*;
use spectra_core::arith::{pow10, rat, rat_int};
use spectra_core::cantor::RegularCantorSet;
use spectra_core::horseshoe::MarkovHorseshoe;
use spectra_core::symbolic::{PeriodicPoint, Sft, TablePotential};

type Sym = usize;

fn ratio_strategy() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(2i64..=6, 2..=4).prop_map(|dens| {
        let k = dens.len() as i64;
        dens.into_iter().map(|d| rat(1, d * k)).collect()
    })
}

fn horseshoe_strategy() -> impl Strategy<Value = MarkovHorseshoe> {
    (ratio_strategy(), ratio_strategy()).prop_map(|(stable, mut unstable)| {
        unstable.truncate(stable.len());
        while unstable.len() < stable.len() {
            unstable.push(rat(1, 8));
        }
        let sft = Sft::full(stable.len()).unwrap();
        MarkovHorseshoe::new(sft, stable, unstable, None).unwrap()
    })
}

fn same_structure(a: &RegularCantorSet, b: &RegularCantorSet) -> bool {
    if a.branch_count() != b.branch_count() {
        return false;
    }
    if a.hull() != b.hull() {
        return false;
    }
    if a.sft().allowed_pairs() != b.sft().allowed_pairs() {
        return false;
    }
    (0..a.branch_count()).all(|s| {
        let (alo, ahi) = a.branch(s).unwrap().domain();
        let (blo, bhi) = b.branch(s).unwrap().domain();
        alo == blo && ahi == bhi
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn time_reversal_swaps_the_foliations(h in horseshoe_strategy()) {
        let rev = h.inverse();
        prop_assert!(same_structure(
            &h.stable_cantor().unwrap(),
            &rev.unstable_cantor().unwrap()
        ));
        prop_assert!(same_structure(
            &h.unstable_cantor().unwrap(),
            &rev.stable_cantor().unwrap()
        ));
    }

    #[test]
    fn dimension_estimate_is_the_exact_factor_sum(h in horseshoe_strategy()) {
        let tol = pow10(5);
        let est = h.hd_estimate(2, &tol).unwrap();
        let s = h.stable_cantor().unwrap().dim_bounds(2, &tol).unwrap();
        let u = h.unstable_cantor().unwrap().dim_bounds(2, &tol).unwrap();
        let sum = s.add(&u);
        prop_assert_eq!(est.lo(), sum.lo());
        prop_assert_eq!(est.hi(), sum.hi());
    }

    #[test]
    fn sub_horseshoe_never_gains_dimension(words_mask in 1usize..15) {
        let h = MarkovHorseshoe::linear(2, rat(1, 3)).unwrap();
        let all: Vec<Vec<Sym>> = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let words: Vec<Vec<Sym>> = all
            .into_iter()
            .enumerate()
            .filter(|(i, _)| words_mask & (1 << i) != 0)
            .map(|(_, w)| w)
            .collect();
        let sub = h.sub_horseshoe(&words).unwrap();
        let tol = pow10(6);
        let parent = h.hd_estimate(2, &tol).unwrap();
        let child = sub.hd_estimate(2, &tol).unwrap();
        // true roots are ordered; certified brackets may disagree by tol
        prop_assert!(child.hi() <= &(parent.hi() + &tol));
    }

    #[test]
    fn orbit_max_is_rotation_invariant(
        raw in prop::collection::vec(0usize..2, 1..=6),
        r in 0usize..6,
    ) {
        let h = MarkovHorseshoe::linear(2, rat(1, 3)).unwrap();
        let f = TablePotential::from_rule(h.sft(), 1, |w| {
            rat_int(w.iter().map(|&x| 2 * x as i64 + 1).sum())
        })
        .unwrap();
        let word = raw;
        let mut rotated = word.clone();
        let r = r % word.len();
        rotated.rotate_left(r);
        let tol = pow10(6);
        let a = h
            .max_along_word(&f, &PeriodicPoint::new(h.sft(), word).unwrap(), &tol)
            .unwrap();
        let b = h
            .max_along_word(&f, &PeriodicPoint::new(h.sft(), rotated).unwrap(), &tol)
            .unwrap();
        prop_assert_eq!(a.lo(), b.lo());
        prop_assert_eq!(a.hi(), b.hi());
    }
}

/// Restricting the Smale model to the two order-two words with distinct
/// symbols halves the per-level branch count: each factor solves
/// 2 * 9^(-d) = 1.
#[test]
fn two_block_restriction_has_log2_over_log9_factors() {
    let h = MarkovHorseshoe::linear(2, rat(1, 3)).unwrap();
    let sub = h.sub_horseshoe(&[vec![0, 1], vec![1, 0]]).unwrap();
    let tol = pow10(8);
    let est = sub.hd_estimate(1, &tol).unwrap();
    // each factor contributes log 2 / log 9, so the estimate encloses
    // log 2 / log 3 = 0.63092975...
    let lo = spectra_core::arith::parse_rational("0.630929").unwrap();
    let hi = spectra_core::arith::parse_rational("0.630930").unwrap();
    assert!(est.lo() >= &lo && est.hi() <= &hi);
}

#[test]
fn conservative_flag_follows_the_ratio_data() {
    let sft = Sft::full(2).unwrap();
    let even = MarkovHorseshoe::new(
        sft.clone(),
        vec![rat(1, 3), rat(1, 4)],
        vec![rat(1, 3), rat(1, 4)],
        None,
    )
    .unwrap();
    assert!(even.conservative());
    let skew = MarkovHorseshoe::new(
        sft,
        vec![rat(1, 3), rat(1, 4)],
        vec![rat(1, 4), rat(1, 3)],
        None,
    )
    .unwrap();
    assert!(!skew.conservative());
    assert!(!skew.inverse().conservative());
}
