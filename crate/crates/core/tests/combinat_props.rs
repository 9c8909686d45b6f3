//! Property suites for the counting lemmas: trace bounds and dense cores
//! on random near-complete matrices, selection postconditions, seeded
//! reproducibility, and the identity behavior of pruning with no
//! prohibitions.

use std::collections::BTreeSet;

use proptest::prelude::*;
use spectra_core::arith::{pow10, rat};
use spectra_core::cantor::RegularCantorSet;
use spectra_core::combinat::{
    dense_core, injection_trials, interference_free_selection, prune_to_core_cantor,
    random_injection, trace_bounds, DenseMatrix, InterferenceRelation, ProhibitionInstance,
    ProhibitionRule,
};

fn dense_matrix() -> impl Strategy<Value = DenseMatrix> {
    (30usize..=80, any::<u64>()).prop_flat_map(|(n, seed)| {
        (Just(n), 0usize..=n * n / 100, Just(seed))
            .prop_map(|(n, zeros, seed)| DenseMatrix::random_dense(n, zeros, seed).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn trace_bounds_hold_on_dense_matrices(a in dense_matrix()) {
        for tb in trace_bounds(&a, 2, 5).unwrap() {
            prop_assert!(tb.holds, "k={} trace={} bound={}", tb.k, tb.trace, tb.bound);
        }
    }

    #[test]
    fn dense_core_square_entries_are_large(a in dense_matrix()) {
        let z = dense_core(&a).unwrap();
        let n = a.n();
        prop_assert!(5 * z.len() >= 4 * n);
        let sq = a.power(2).unwrap();
        for &i in &z {
            for &j in &z {
                prop_assert!(5 * sq.entry(i, j) as usize >= 4 * n);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn selection_postconditions(
        k in 2u64..=30,
        pair_seed in prop::collection::vec((0u64..30, 0u64..30), 0..=40),
        protected_seed in prop::collection::vec(0u64..30, 0..=5),
    ) {
        let elements: Vec<u64> = (0..k).collect();
        let interferes: BTreeSet<(u64, u64)> = pair_seed
            .into_iter()
            .map(|(a, b)| (a % k, b % k))
            .filter(|(a, b)| a != b)
            .collect();
        let protected: BTreeSet<u64> = protected_seed.into_iter().map(|p| p % k).collect();
        let rel = InterferenceRelation::new(elements.clone(), interferes.clone()).unwrap();
        let survivors = interference_free_selection(&rel, &protected).unwrap();

        for s in &survivors {
            prop_assert!(!protected.contains(s));
            for p in &protected {
                prop_assert!(!interferes.contains(&(*p, *s)));
            }
        }
        // counting bound: each protected element removes itself plus its
        // out-neighbors
        let mut removed_at_most = 0usize;
        for p in &protected {
            removed_at_most += 1 + interferes.iter().filter(|(a, _)| a == p).count();
        }
        prop_assert!(survivors.len() + removed_at_most >= elements.len());
        // survivors keep the original order
        let positions: Vec<usize> = survivors
            .iter()
            .map(|s| elements.iter().position(|e| e == s).unwrap())
            .collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn injection_draws_and_trials_are_reproducible(seed in any::<u64>(), n in 16u64..=200) {
        let alpha = rat(1, 3);
        let a = random_injection(n, &alpha, seed).unwrap();
        let b = random_injection(n, &alpha, seed).unwrap();
        prop_assert_eq!(a.map, b.map);
        prop_assert_eq!(a.injective, b.injective);
        let r1 = injection_trials(n, &alpha, 10, seed).unwrap();
        let r2 = injection_trials(n, &alpha, 10, seed).unwrap();
        prop_assert_eq!(r1.to_json().to_string(), r2.to_json().to_string());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn empty_prohibition_is_identity_on_bounds(m in 3i64..=5, block in 1usize..=2) {
        let model = RegularCantorSet::affine_family(&[rat(1, m), rat(1, m)]).unwrap();
        let words: Vec<Vec<usize>> = (0..(1usize << block))
            .map(|x| (0..block).rev().map(|b| (x >> b) & 1).collect())
            .collect();
        let instance =
            ProhibitionInstance::new(words, ProhibitionRule::WordPairs(BTreeSet::new())).unwrap();
        let tol = pow10(5);
        let out = prune_to_core_cantor(&model, &instance, block, 2, &tol, &rat(1, 100)).unwrap();
        prop_assert_eq!(out.zero_entries, 0);
        let core = out.core.expect("full density always passes the threshold");
        prop_assert!(core.within_epsilon);
        prop_assert_eq!(core.pruned_bounds.lo(), core.original_bounds.lo());
        prop_assert_eq!(core.pruned_bounds.hi(), core.original_bounds.hi());
    }
}
