use pue_core::{approx_static_entropies, approx_trace, hat_partition, ApproxOptions, IntervalSystem};

fn systems() -> Vec<(&'static str, IntervalSystem)> {
    let a = (5f64.sqrt() - 1.0) / 2.0;
    vec![
        ("doubling", IntervalSystem::doubling()),
        ("golden", IntervalSystem::piecewise_linear(vec![0.0, a, 1.0], vec![1.0 / a, a / (1.0 - a)]).unwrap()),
        ("tent", IntervalSystem::piecewise_linear(vec![0.0, 0.5, 1.0], vec![2.0, -2.0]).unwrap()),
        ("three", IntervalSystem::piecewise_linear(vec![0.0, 1.0 / 3.0, 1.0], vec![3.0, -1.5]).unwrap()),
    ]
}

#[test]
fn static_variational_inequality_within_error_bars() {
    let options = ApproxOptions::default();
    for (name, system) in systems() {
        for m in [2usize, 4, 8] {
            let phi = hat_partition(m, 1 << 12).unwrap();
            for n in 1..=4 {
                let s = approx_static_entropies(&system, &phi, n, &options).unwrap();
                assert!(s.variational_inequality_holds(), "{name} m={m} n={n}: {:?}", s);
                assert!(s.metric.value >= -1e-12 && s.topological.value >= -1e-12);
            }
        }
    }
}

#[test]
fn metric_ratios_grow_with_refinement_up_to_bars() {
    let options = ApproxOptions::default();
    let system = IntervalSystem::doubling();
    let horizon = 4;
    let ratios: Vec<_> = [2usize, 4, 8]
        .iter()
        .map(|&m| {
            let phi = hat_partition(m, 1 << 14).unwrap();
            approx_trace(&system, &phi, horizon, &options).unwrap().metric_ratios()[horizon - 1]
        })
        .collect();
    for w in ratios.windows(2) {
        assert!(w[1].hi() >= w[0].lo(), "{:?}", ratios);
    }
}

#[test]
fn serial_and_parallel_quadrature_agree() {
    let options = ApproxOptions::default();
    let system = IntervalSystem::doubling();
    let phi = hat_partition(4, 1 << 13).unwrap();
    let parallel = approx_static_entropies(&system, &phi, 3, &options).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = pool.install(|| approx_static_entropies(&system, &phi, 3, &options).unwrap());
    assert_eq!(parallel.metric.value.to_bits(), serial.metric.value.to_bits());
    assert_eq!(parallel.topological.value.to_bits(), serial.topological.value.to_bits());
}
