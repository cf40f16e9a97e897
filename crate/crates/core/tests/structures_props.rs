use proptest::prelude::*;
use pue_core::structures::{staircase, two_level_staircase};
use pue_core::{
    certify_convergence, check_superenvelope, is_almost_decreasing, transfinite_sequence, weakly_equivalent,
    Candidate, ConvergingSequence, TopologicalFamily,
};

fn family_strategy() -> impl Strategy<Value = TopologicalFamily> {
    (2usize..8)
        .prop_flat_map(|n| {
            let seq = (proptest::collection::vec(0..n, 1..4), 0..n)
                .prop_map(|(terms, limit)| ConvergingSequence { terms, limit });
            (Just(n), proptest::collection::vec(seq, 0..4))
        })
        .prop_map(|(n, seqs)| TopologicalFamily::new((0..n).map(|i| format!("x{i}")).collect(), seqs).unwrap())
}

fn values_for(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn envelope_is_idempotent_and_dominates(
        (family, f) in family_strategy().prop_flat_map(|fam| { let n = fam.len(); (Just(fam), values_for(n)) })
    ) {
        let env = family.usc_envelope(&f).unwrap();
        prop_assert_eq!(family.usc_envelope(&env).unwrap(), env.clone());
        prop_assert!(env.iter().zip(&f).all(|(e, v)| e >= v));
        prop_assert!(family.defect(&f).unwrap().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn transfinite_sequence_is_monotone(
        (family, cutoffs, k) in family_strategy().prop_flat_map(|fam| {
            let n = fam.len();
            (Just(fam), proptest::collection::vec(0usize..6, n), 3usize..7)
        })
    ) {
        // Tail at x is 1 before its cutoff step and 0 from then on.
        let n = family.len();
        let values: Vec<Vec<f64>> = (0..k)
            .map(|step| cutoffs.iter().map(|&c| if step + 1 == k || step >= c { 1.0 } else { 0.0 }).collect())
            .collect();
        let candidate = Candidate::new(values, vec![1.0; n], 0.0).unwrap();
        prop_assert!(candidate.certify().is_ok());
        let trace = transfinite_sequence(&candidate, &family, 50).unwrap();
        for w in trace.u.windows(2) {
            prop_assert!(w[1].iter().zip(&w[0]).all(|(a, b)| a >= b));
        }
        // Cyclic families can grow without bound; stabilization, when it happens, is permanent.
        if let Some(order) = trace.order_of_accumulation {
            prop_assert_eq!(trace.u.len(), order + 2);
            prop_assert_eq!(&trace.u[order], &trace.u[order + 1]);
            let again = transfinite_sequence(&candidate, &family, 50 + order).unwrap();
            prop_assert_eq!(again.u, trace.u);
        }
    }

    #[test]
    fn interchange_of_limit_and_max(
        (family, raw) in family_strategy().prop_flat_map(|fam| {
            let n = fam.len();
            (Just(fam), proptest::collection::vec(values_for(n), 2..6))
        })
    ) {
        // Upper semi-continuous, decreasing in k: envelopes then running minima.
        let mut fs: Vec<Vec<f64>> = raw.iter().map(|f| family.usc_envelope(f).unwrap()).collect();
        for k in 1..fs.len() {
            let prev = fs[k - 1].clone();
            fs[k].iter_mut().zip(&prev).for_each(|(a, b)| *a = a.min(*b));
        }
        let max_then_limit = fs.last().unwrap().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pointwise: Vec<f64> = (0..family.len())
            .map(|x| *fs.iter().map(|f| f[x]).collect::<Vec<_>>().last().unwrap())
            .collect();
        let limit_then_max = pointwise.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((max_then_limit - limit_then_max).abs() <= 1e-9);
        for (x, seq) in (0..family.len()).map(|x| (x, fs.iter().map(|f| f[x]).collect::<Vec<_>>())) {
            prop_assert!(is_almost_decreasing(&seq, &[0.0]).passed, "point {}", x);
        }
    }

    #[test]
    fn convergence_certifier_matches_tail_oscillation(
        values in proptest::collection::vec(0.0f64..1.0, 1..12),
        tail in 1usize..6,
        gamma in 0.0f64..0.5,
    ) {
        let start = values.len().saturating_sub(tail);
        let window = &values[start..];
        let osc = window.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - window.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(certify_convergence(&values, &[gamma], tail), vec![osc <= gamma + 1e-12]);
    }

    #[test]
    fn weakly_equivalent_candidates_share_traces(
        target in proptest::collection::vec(0.1f64..1.0, 3),
        rates in proptest::collection::vec(0.2f64..0.6, 2),
        e_offsets in proptest::collection::vec(proptest::collection::vec(-0.2f64..0.5, 3), 4),
    ) {
        let family = TopologicalFamily::discrete(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let tol = 0.02;
        let make = |rate: f64| {
            let values = (1..=12)
                .map(|k| target.iter().map(|h| h * (1.0 - rate.powi(k))).collect())
                .collect();
            Candidate::new(values, target.clone(), tol).unwrap()
        };
        let first = make(rates[0]);
        let second = make(rates[1]);
        prop_assert!(weakly_equivalent(&first, &second, &[0.05, 0.1]).unwrap());
        let a = transfinite_sequence(&first, &family, 10).unwrap();
        let b = transfinite_sequence(&second, &family, 10).unwrap();
        prop_assert!(a.distance(&b) <= 1e-9);
        for offset in &e_offsets {
            let e: Vec<f64> = target.iter().zip(offset).map(|(h, o)| h + o).collect();
            prop_assert_eq!(
                check_superenvelope(&e, &first, &family).unwrap().passed,
                check_superenvelope(&e, &second, &family).unwrap().passed
            );
        }
    }
}

#[test]
fn staircases_reach_their_orders_at_several_horizons() {
    for k in 2..8 {
        let (family, candidate) = staircase(k).unwrap();
        let trace = transfinite_sequence(&candidate, &family, 10).unwrap();
        assert_eq!(trace.order_of_accumulation, Some(1));
        assert_eq!(trace.u[1][0], 1.0);
        let (family, candidate) = two_level_staircase(k).unwrap();
        let trace = transfinite_sequence(&candidate, &family, 10).unwrap();
        assert_eq!(trace.order_of_accumulation, Some(2));
        assert_eq!(trace.u[2][0], 2.0);
    }
}
