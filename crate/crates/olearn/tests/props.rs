//! Property tests for the class algebra, the dimension relations, and the
//! game solvers on randomly generated inputs.

use proptest::prelude::*;

use olearn::concepts::{ConceptClass, LabeledExample};
use olearn::dims::{dual_vcdim, ldim, threshold_dim, vcdim};
use olearn::games::{
    col_strategy_payoff, game_value_exact, game_value_iterative, row_strategy_payoff,
    triangular_dim, GameMatrix, DEFAULT_ITER_CAP,
};
use olearn::learner_vote::VoteHypothesis;
use olearn::{rat_int, Instance};

use num_traits::{ToPrimitive, Zero};

prop_compose! {
    fn arb_class()(n in 1usize..=5, m in 1usize..=12, seed in any::<u64>()) -> ConceptClass {
        ConceptClass::random(n, m, seed).unwrap()
    }
}

prop_compose! {
    fn arb_matrix()(r in 1usize..=7, c in 1usize..=7, bits in proptest::collection::vec(any::<bool>(), 49)) -> GameMatrix {
        let rows: Vec<Vec<bool>> = (0..r).map(|i| (0..c).map(|j| bits[i * 7 + j]).collect()).collect();
        GameMatrix::new(rows).unwrap()
    }
}

proptest! {
    #[test]
    fn restriction_is_idempotent(class in arb_class(), x in 0usize..5, y in any::<bool>()) {
        let x = x % class.domain_size();
        let e = LabeledExample::new(x, y);
        let once = class.restrict(e).unwrap();
        if !once.is_empty() {
            let twice = once.restrict(e).unwrap();
            prop_assert_eq!(once, twice);
        }
    }

    #[test]
    fn restrictions_partition_the_class(class in arb_class(), x in 0usize..5) {
        let x = x % class.domain_size();
        let zeros = class.restrict(LabeledExample::new(x, false)).unwrap();
        let ones = class.restrict(LabeledExample::new(x, true)).unwrap();
        prop_assert_eq!(zeros.len() + ones.len(), class.len());
    }

    #[test]
    fn realizability_is_iterated_nonemptiness(class in arb_class(), raw in proptest::collection::vec((0usize..5, any::<bool>()), 0..6)) {
        let seq: Vec<LabeledExample> = raw
            .into_iter()
            .map(|(x, y)| LabeledExample::new(x % class.domain_size(), y))
            .collect();
        let mut survivor = Some(class.clone());
        for &e in &seq {
            survivor = survivor.and_then(|c| {
                let r = c.restrict(e).unwrap();
                (!r.is_empty()).then_some(r)
            });
        }
        prop_assert_eq!(class.is_realizable(&seq), survivor.is_some());
    }

    #[test]
    fn dimension_relations(class in arb_class()) {
        let l = ldim(&class);
        let v = vcdim(&class);
        let vstar = dual_vcdim(&class);
        prop_assert!(v <= l);
        prop_assert!(vstar < 1 << (v + 1));
        let t = threshold_dim(&class) as i64;
        if l >= 1 {
            let log2 = |z: i64| 63 - (z as u64).leading_zeros() as i64;
            prop_assert!(log2(t) <= l);
            prop_assert!(log2(l) <= t);
        }
    }

    #[test]
    fn exact_game_gap_is_zero(m in arb_matrix()) {
        let sol = game_value_exact(&m).unwrap();
        prop_assert!(sol.duality_gap.is_zero());
        prop_assert_eq!(row_strategy_payoff(&m, &sol.row_strategy), sol.value.clone());
        prop_assert_eq!(col_strategy_payoff(&m, &sol.col_strategy), sol.value);
    }

    #[test]
    fn iterative_game_matches_exact(m in arb_matrix()) {
        let exact = game_value_exact(&m).unwrap();
        let iter = game_value_iterative(&m, 1e-4, DEFAULT_ITER_CAP).unwrap();
        let diff = (&exact.value - &iter.value).to_f64().unwrap().abs();
        prop_assert!(diff <= 1e-4);
        prop_assert!(iter.duality_gap.to_f64().unwrap() <= 1e-4);
    }

    #[test]
    fn triangular_dim_transposition_invariant(m in arb_matrix()) {
        let t: Vec<Vec<bool>> = (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| m.at(i, j)).collect())
            .collect();
        let mt = GameMatrix::new(t).unwrap();
        // A triangular submatrix of the transpose is a triangular submatrix
        // of the original with both orders reversed.
        prop_assert_eq!(triangular_dim(&m), triangular_dim(&mt));
    }

    #[test]
    fn vote_average_counts_multiset(class in arb_class(), raw in proptest::collection::vec(0usize..12, 1..8), x in 0usize..5) {
        let members: Vec<usize> = raw.into_iter().map(|i| i % class.len()).collect();
        let x = Instance(x % class.domain_size());
        let v = VoteHypothesis { members: members.clone() };
        let ones = members.iter().filter(|&&i| class.concept(i).label(x)).count();
        prop_assert_eq!(
            v.eval(&class, x),
            rat_int(ones as i64) / rat_int(members.len() as i64)
        );
    }
}
