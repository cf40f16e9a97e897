mod common;

use common::*;
use proptest::prelude::*;
use pue_core::{make_cylinder_partition, make_smoothed_partition, LocallyConstantFunction, ShiftMeasure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn golden_mean_word_counts_follow_fibonacci() {
    let s = golden();
    let mut counts = vec![0usize; 21];
    for (n, c) in counts.iter_mut().enumerate().skip(1) {
        *c = s.words(n).len();
    }
    assert_eq!((counts[1], counts[2]), (2, 3));
    for n in 3..=20 {
        assert_eq!(counts[n], counts[n - 1] + counts[n - 2], "n = {n}");
    }
}

#[test]
fn kolmogorov_consistency_to_depth_ten() {
    for mu in [
        ShiftMeasure::markov(golden(), vec![vec![0.5, 0.5], vec![1.0, 0.0]], None).unwrap(),
        ShiftMeasure::markov(full2(), vec![vec![0.8, 0.2], vec![0.4, 0.6]], None).unwrap(),
    ] {
        let system = mu.system().clone();
        for depth in 1..10 {
            for w in system.words(depth).iter() {
                let children: f64 = (0..2u16)
                    .map(|a| {
                        let mut longer = w.to_vec();
                        longer.push(a);
                        mu.weight(&longer)
                    })
                    .sum();
                assert!((children - mu.weight(w)).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn cylinder_join_diameters_shrink() {
    for s in [full2(), golden()] {
        let p = make_cylinder_partition(s, 1).unwrap();
        let base = p.diameter().unwrap();
        let mut previous = base;
        for n in 1..6 {
            let d = p.iterate_join(n).unwrap().diameter().unwrap();
            assert!(d <= base && d <= previous);
            previous = d;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pullback_preserves_range(seed in any::<u64>(), depth in 1usize..4, steps in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in [full2(), golden()] {
            let f = random_function(&s, depth, &mut rng);
            let g = f.shift_pullback_by(steps);
            prop_assert_eq!((g.min(), g.max()), (f.min(), f.max()));
        }
    }

    #[test]
    fn refinement_preserves_integrals(seed in any::<u64>(), depth in 1usize..4, extra in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for mu in three_measures(&full2()) {
            let f = random_function(mu.system(), depth, &mut rng);
            let fine = f.refine_to_depth(depth + extra).unwrap();
            prop_assert!((mu.integrate(&f).unwrap() - mu.integrate(&fine).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn integrals_are_shift_invariant(seed in any::<u64>(), depth in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = golden();
        let mu = ShiftMeasure::markov(s.clone(), vec![vec![0.5, 0.5], vec![1.0, 0.0]], None).unwrap();
        let f = random_function(&s, depth, &mut rng);
        prop_assert!((mu.integrate(&f).unwrap() - mu.integrate(&f.shift_pullback()).unwrap()).abs() <= 1e-12);
        for nu in three_measures(&full2()) {
            let f = random_function(nu.system(), depth, &mut rng);
            prop_assert!((nu.integrate(&f).unwrap() - nu.integrate(&f.shift_pullback()).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn conditional_measures_are_probabilities(seed in any::<u64>(), depth in 1usize..3, lambda in 0.0f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = full2();
        let psi = random_smoothed(&s, depth, lambda, &mut rng);
        let one = LocallyConstantFunction::constant(s.clone(), 1.0).unwrap();
        for mu in three_measures(&s) {
            for member in psi.members() {
                let cond = mu.conditional(member).unwrap();
                prop_assert!((cond.integrate(&one).unwrap() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn constructors_validate(depth in 1usize..4, lambda in 0.0f64..0.99, k in 1usize..4) {
        for s in [full2(), golden()] {
            let p = make_smoothed_partition(s.clone(), depth, lambda).unwrap();
            prop_assert!(p.validate().passed);
            prop_assert!(p.scale_copies(k).unwrap().validate().passed);
            prop_assert!(p.iterate_join(2).unwrap().validate().passed);
        }
    }

    #[test]
    fn join_is_associative(seed in any::<u64>(), d1 in 1usize..3, d2 in 1usize..3, d3 in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = full2();
        let a = random_smoothed(&s, d1, 0.3, &mut rng);
        let b = make_cylinder_partition(s.clone(), d2).unwrap();
        let c = random_smoothed(&s, d3, 0.6, &mut rng);
        let left = a.join(&b).unwrap().join(&c).unwrap();
        let right = a.join(&b.join(&c).unwrap()).unwrap();
        let depth = left.depth().max(right.depth());
        prop_assert!(tables_close(&tables(&left, depth), &tables(&right, depth), 1e-12));
    }

    #[test]
    fn iterated_joins_factor(seed in any::<u64>(), n in 1usize..3, m in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in [full2(), golden()] {
            let p = random_smoothed(&s, 1, 0.4, &mut rng);
            let whole = p.iterate_join(n + m).unwrap();
            let split = p.iterate_join(n).unwrap().join(&p.iterate_join(m).unwrap().pullback_by(n)).unwrap();
            let depth = whole.depth().max(split.depth());
            prop_assert!(tables_close(&tables(&whole, depth), &tables(&split, depth), 1e-12));
        }
    }

    #[test]
    fn pruning_drops_only_vanishing_products(n in 1usize..5) {
        let s = golden();
        let p = make_smoothed_partition(s.clone(), 1, 0.0).unwrap();
        let joined = p.iterate_join(n).unwrap();
        // Brute force: every admissible word of length n is exactly one nonzero product.
        prop_assert_eq!(joined.len(), s.words(n).len());
        prop_assert!(joined.members().iter().all(|m| !m.is_zero()));
    }
}
