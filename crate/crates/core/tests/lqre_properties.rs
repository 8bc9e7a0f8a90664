use proptest::prelude::*;
use txentropy::index::{decentralization_index, TransactionValues};
use txentropy::lqre::*;

fn cfg(n: usize, lambda: f64) -> LqreConfig {
    LqreConfig::new(n, lambda).unwrap()
}

const LAMBDAS: [f64; 4] = [0.0, 0.01, 0.1, 1.0];

#[test]
fn strictly_increasing_in_n_at_high_precision() {
    for lambda in LAMBDAS {
        let mut prev: Option<PreciseIndex> = None;
        for n in 2..=200 {
            let c = cfg(n, lambda);
            let h = lqre_index_precise(&c, precision_bits_for(&c));
            if let Some(p) = &prev {
                assert!(h > *p, "λ = {lambda}, N = {n}");
            }
            prev = Some(h);
        }
    }
}

#[test]
fn f64_is_nondecreasing_in_n() {
    for lambda in LAMBDAS {
        for n in 2..200 {
            assert!(lqre_index(&cfg(n + 1, lambda)).value() >= lqre_index(&cfg(n, lambda)).value());
        }
    }
}

#[test]
fn f64_resolution_limit_at_unit_lambda() {
    // At λ = 1 the increment from N to N + 1 is about N·e^{−N}, below one ulp of the index past N ≈ 40.
    let (a, b) = (lqre_index(&cfg(60, 1.0)).value(), lqre_index(&cfg(61, 1.0)).value());
    assert_eq!(a, b);
    let (pa, pb) = (lqre_index_precise(&cfg(60, 1.0), 256), lqre_index_precise(&cfg(61, 1.0), 256));
    assert!(pb > pa);
}

#[test]
fn strictly_decreasing_in_lambda() {
    for n in 2..=200 {
        let values: Vec<f64> = LAMBDAS.iter().map(|&l| lqre_index(&cfg(n, l)).value()).collect();
        for w in values.windows(2) {
            assert!(w[1] < w[0], "N = {n}: {values:?}");
        }
    }
}

#[test]
fn zero_lambda_is_uniform() {
    let mut n = 1.0f64;
    while n <= 1e5 {
        let k = n.round() as usize;
        assert_eq!(lqre_index(&cfg(k, 0.0)).value(), k as f64);
        n *= 1.13;
    }
    assert_eq!(lqre_index(&cfg(100_000, 0.0)).value(), 1e5);
}

#[test]
fn large_lambda_collapses_to_one() {
    for n in [1, 2, 10, 100, 1_000, 10_000] {
        assert!(lqre_index(&cfg(n, 500.0)).value() - 1.0 < 1e-6);
    }
}

#[test]
fn sweep_examples() {
    let rows = sweep(&SweepGrid::new(vec![1], vec![0.0]).unwrap());
    assert_eq!(rows, vec![SweepRow { n: 1, lambda: 0.0, index: 1.0 }]);
    let rows = sweep(&SweepGrid::new(vec![2, 3], vec![0.0]).unwrap());
    assert!((rows[0].index - 2.0).abs() < 1e-12 && (rows[1].index - 3.0).abs() < 1e-12);
    let rows = sweep(&SweepGrid::new(vec![3], vec![0.0, std::f64::consts::LN_2, 100.0]).unwrap());
    assert!(rows[0].index > rows[1].index && rows[1].index > rows[2].index);
}

#[test]
fn weights_agree_with_direct_values_when_representable() {
    for (n, lambda) in [(3, std::f64::consts::LN_2), (10, 0.3), (50, 0.05)] {
        let direct: Vec<f64> = (1..=n).map(|k| (k as f64 * lambda).exp()).collect();
        let expect = decentralization_index(&TransactionValues::new(direct.clone()).unwrap()).value();
        assert!((lqre_index(&cfg(n, lambda)).value() - expect).abs() < 1e-12 * expect);
        let total: f64 = direct.iter().sum();
        for (w, v) in lqre_weights(&cfg(n, lambda)).as_slice().iter().zip(&direct) {
            assert!((w - v / total).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_space_is_stable(n in 1usize..5_000, log_l in -6.0f64..4.0) {
        let lambda = 10f64.powf(log_l).min(1e8 / n as f64);
        let w = lqre_weights(&cfg(n, lambda));
        prop_assert!(w.as_slice().iter().all(|x| x.is_finite() && *x >= 0.0));
        let sum: f64 = w.as_slice().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        let h = lqre_index(&cfg(n, lambda)).value();
        prop_assert!(h.is_finite() && h >= 1.0 - 1e-12 && h <= n as f64 + 1e-9);
    }

    #[test]
    fn precise_agrees_with_f64(n in 1usize..300, lambda in 0.0f64..2.0) {
        let c = cfg(n, lambda);
        let fast = lqre_index(&c).value();
        let precise = lqre_index_precise(&c, 192);
        let rendered: f64 = format!("{:?}", precise)
            .trim_start_matches("PreciseIndex(")
            .trim_end_matches(')')
            .parse()
            .unwrap();
        prop_assert!((fast - rendered).abs() <= 1e-12 * rendered, "{fast} vs {rendered}");
    }
}
