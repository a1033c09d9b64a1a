//! The linear-programming oracle, the closed-form criterion, and the
//! recursive construction must agree on every system: three independent
//! routes to the same yes/no answer.

use cyccon_core::coupling::maximal_coupling;
use cyccon_core::criterion::{check_consistent, check_main, check_necessary};
use cyccon_core::model::{pair_correlation_bounds, ContextMoments, CyclicSystem};
use cyccon_core::oracle::{feasible, feasible_traditional, OracleOutcome};
use cyccon_core::rational::{rat, Rational};
use proptest::prelude::*;

fn moment() -> impl Strategy<Value = Rational> {
    (-8i64..=8).prop_map(|n| rat(n, 8))
}

fn context() -> impl Strategy<Value = ContextMoments> {
    (moment(), moment(), 0i64..=16).prop_map(|(e_own, e_next, t)| {
        let (lo, hi) = pair_correlation_bounds(&e_own, &e_next);
        let corr = &lo + (hi - &lo) * rat(t, 16);
        ContextMoments {
            e_own,
            e_next,
            corr,
        }
    })
}

fn system(max_rank: usize) -> impl Strategy<Value = CyclicSystem> {
    prop::collection::vec(context(), 2..=max_rank).prop_map(|contexts| {
        let labels = (1..=contexts.len()).map(|i| format!("q{i}")).collect();
        CyclicSystem::new(labels, contexts).expect("correlations drawn inside the bounds")
    })
}

/// Consistently connected system: every property's two marginals are equal.
fn consistent_system(rank: usize) -> impl Strategy<Value = CyclicSystem> {
    (
        prop::collection::vec(moment(), rank),
        prop::collection::vec(0i64..=16, rank),
    )
        .prop_map(|(es, ts)| {
            let n = es.len();
            let contexts = (0..n)
                .map(|i| {
                    let e_own = es[i].clone();
                    let e_next = es[(i + 1) % n].clone();
                    let (lo, hi) = pair_correlation_bounds(&e_own, &e_next);
                    let corr = &lo + (hi - &lo) * rat(ts[i], 16);
                    ContextMoments {
                        e_own,
                        e_next,
                        corr,
                    }
                })
                .collect();
            let labels = (1..=n).map(|i| format!("q{i}")).collect();
            CyclicSystem::new(labels, contexts).expect("correlations drawn inside the bounds")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oracle_criterion_and_construction_agree(sys in system(3)) {
        let lp_feasible = matches!(feasible(&sys).unwrap(), OracleOutcome::Feasible(_));
        let criterion_feasible = !check_main(&sys).contextual;
        let construction_feasible = maximal_coupling(&sys).is_ok();
        prop_assert_eq!(lp_feasible, criterion_feasible);
        prop_assert_eq!(lp_feasible, construction_feasible);
    }

    #[test]
    fn traditional_joint_agrees_with_the_consistent_criterion(sys in consistent_system(3)) {
        let verdict = check_consistent(&sys).unwrap();
        let lp = feasible_traditional(&sys, false).unwrap();
        prop_assert_eq!(matches!(lp, OracleOutcome::Feasible(_)), !verdict.contextual);
    }

    #[test]
    fn necessary_violations_imply_main_violations(sys in system(4)) {
        let necessary = check_necessary(&sys);
        if necessary.contextual {
            prop_assert!(check_main(&sys).contextual);
        }
    }
}
