use proptest::prelude::*;
use txentropy::index::*;

/// Nonnegative values of mixed magnitude with at least one positive entry.
fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![
            1 => Just(0.0),
            4 => 1e-3f64..1e3,
            2 => 1.0f64..1e24,
        ],
        1..max_len,
    )
    .prop_filter("needs a positive value", |v| v.iter().any(|x| *x > 0.0))
}

fn index(v: &[f64]) -> f64 {
    decentralization_index(&TransactionValues::new(v.to_vec()).unwrap()).value()
}

/// Entropy by plain left-to-right summation over positive weights.
fn oracle_entropy_bits(v: &[f64]) -> f64 {
    let total: f64 = v.iter().sum();
    -v.iter().filter(|x| **x > 0.0).map(|x| x / total).map(|p| p * p.log2()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn bounded_between_one_and_support(v in values(200)) {
        let h = index(&v);
        let n = v.iter().filter(|x| **x > 0.0).count() as f64;
        prop_assert!(h >= 1.0 - 1e-12);
        prop_assert!(h <= n + 1e-9);
    }

    #[test]
    fn permutation_is_exact(v in values(100), seed in any::<u64>()) {
        let mut w = v.clone();
        let k = w.len();
        let mut s = seed;
        for i in (1..k).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            w.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(index(&v).to_bits(), index(&w).to_bits());
    }

    #[test]
    fn scale_invariant(v in values(100), c in 1e-6f64..1e6) {
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        let (a, b) = (index(&v), index(&scaled));
        prop_assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
    }

    #[test]
    fn product_form_agrees(v in values(200)) {
        let tv = TransactionValues::new(v.clone()).unwrap();
        let a = decentralization_index(&tv).value();
        let b = decentralization_index_product(&tv);
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn matches_naive_entropy(v in values(200)) {
        let expect = oracle_entropy_bits(&v).exp2();
        prop_assert!((index(&v) - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn entropy_obeys_gibbs(v in values(200)) {
        let dist = weights(&TransactionValues::new(v.clone()).unwrap());
        let h = shannon_entropy_bits(&dist);
        let support = v.iter().filter(|x| **x > 0.0).count() as f64;
        prop_assert!(h >= 0.0);
        prop_assert!(h <= support.log2() + 1e-12);
    }

    #[test]
    fn multiplicative_over_joints(p in values(9), q in values(9)) {
        let joint: Vec<f64> = p.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
        let expect = index(&p) * index(&q);
        prop_assert!((index(&joint) - expect).abs() <= 1e-9 * expect);
    }

    #[test]
    fn restricted_continuity(base in prop::collection::vec(1.0f64..3.0, 2..34), pick in any::<prop::sample::Index>(), eps in -1e-6f64..1e-6) {
        // Values in [1, 3] and at most 33 of them keep every weight above 0.01.
        let dist = weights(&TransactionValues::new(base.clone()).unwrap());
        prop_assert!(dist.as_slice().iter().all(|w| *w >= 0.01));
        let h0 = index(&base);
        let mut moved = base.clone();
        let i = pick.index(moved.len());
        moved[i] *= 1.0 + eps;
        let h1 = index(&moved);
        prop_assert!((h1 - h0).abs() <= 1e-3 * h0);
    }

    #[test]
    fn index_at_least_inverse_hhi(v in values(100)) {
        let dist = weights(&TransactionValues::new(v.clone()).unwrap());
        prop_assert!(index(&v) >= 1.0 / hhi(&dist) * (1.0 - 1e-12));
    }

    #[test]
    fn gini_matches_pairwise_oracle(v in values(60)) {
        let dist = weights(&TransactionValues::new(v.clone()).unwrap());
        let w = dist.as_slice();
        let n = w.len() as f64;
        let mean = 1.0 / n;
        let mad: f64 = w.iter().flat_map(|a| w.iter().map(move |b| (a - b).abs())).sum::<f64>() / (n * n);
        let g = gini(&dist);
        prop_assert!((g - mad / (2.0 * mean)).abs() < 1e-12);
        prop_assert!((0.0..1.0).contains(&g));
    }

    #[test]
    fn nakamoto_matches_prefix_oracle(v in values(60), threshold in 0.05f64..=1.0) {
        let dist = weights(&TransactionValues::new(v.clone()).unwrap());
        let mut w = dist.as_slice().to_vec();
        w.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        let mut expect = w.len();
        for (k, x) in w.iter().enumerate() {
            acc += x;
            if acc >= threshold - 1e-12 {
                expect = k + 1;
                break;
            }
        }
        prop_assert_eq!(nakamoto(&dist, threshold).unwrap(), expect);
    }
}

#[test]
fn uniform_is_exact_and_increasing() {
    let mut prev = 0.0;
    for n in 1..=2_000 {
        let h = decentralization_index(&TransactionValues::new(vec![7.5; n]).unwrap()).value();
        assert!((h - n as f64).abs() <= 1e-9, "n = {n}: {h}");
        assert!(h > prev);
        prev = h;
    }
}

#[test]
fn single_transaction_is_one() {
    for v in [1e-300, 1.0, 3.5, 1e300] {
        assert_eq!(index(&[v]), 1.0);
        assert_eq!(index(&[0.0, v, 0.0]), 1.0);
    }
}

#[test]
fn equality_only_at_uniform() {
    assert!((index(&[2.0, 2.0, 2.0]) - 3.0).abs() < 1e-12);
    assert!(index(&[2.0, 2.0, 2.0 + 1e-4]) < 3.0 - 1e-10);
}

#[test]
fn index_and_hhi_can_agree_in_direction() {
    // Effective numbers of different orders need not rank distributions alike.
    let p = WeightDistribution::new(vec![0.7, 0.2, 0.1]).unwrap();
    let q = WeightDistribution::new(vec![0.65, 0.3, 0.05]).unwrap();
    let (hp, hq) = (index_of_distribution(&p).value(), index_of_distribution(&q).value());
    assert!(hp > hq + 1e-3, "{hp} vs {hq}");
    assert!(hhi(&p) > hhi(&q) + 1e-3);
}

#[test]
fn inverse_ordering_holds_for_two_point_supports() {
    // On two outcomes both metrics are monotone in the larger share.
    let mut last = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 50..100 {
        let a = k as f64 / 100.0;
        let d = WeightDistribution::new(vec![a, 1.0 - a]).unwrap();
        let (h, c) = (index_of_distribution(&d).value(), hhi(&d));
        assert!(h < last.0 && c > last.1);
        last = (h, c);
    }
}

#[test]
fn error_cases() {
    assert_eq!(TransactionValues::new(vec![0.0, 0.0]).err(), Some(IndexError::AllZero));
    assert!(matches!(TransactionValues::new(vec![1.0, -2.0]), Err(IndexError::NegativeValue { position: 1, .. })));
    assert!(TransactionValues::new(vec![]).is_err());
    assert!(WeightDistribution::new(vec![0.5, 0.4]).is_err());
    let d = WeightDistribution::uniform(4).unwrap();
    assert!(nakamoto(&d, 0.0).is_err());
    assert!(nakamoto(&d, 1.5).is_err());
}
