use proptest::prelude::*;

use skn::construct::{compile_theorem1, forward_chain, invert_chain, ScalingConfig};
use skn::eval::{full_kernel, Evaluator};
use skn::harness::{alpha_sweep, sample_kernel, sample_kernel_trial, CounterRng, SweepConfig};
use skn::model::{bin_of, index_of, tv_distance, DistVec, LayerParams, NetworkParams};

fn simplex(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_filter_map("zero mass", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-6).then(|| w.iter().map(|x| x / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rows_are_normalized(seed in any::<u64>(), k in 0usize..=3, n in 1usize..=3, m in 0usize..=10) {
        let mut rng = CounterRng::new(seed, 0);
        let mut draw = |len: usize| (0..len).map(|_| rng.uniform_range(-6.0, 6.0)).collect::<Vec<f64>>();
        let hidden = LayerParams::from_flat(k, m, draw(k * m), draw(m)).unwrap();
        let output = LayerParams::from_flat(m, n, draw(m * n), draw(n)).unwrap();
        let net = NetworkParams::new(hidden, output, None).unwrap();
        let kernel = full_kernel(&net, Evaluator::Naive).unwrap();
        for row in kernel.rows() {
            prop_assert!((row.total() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn clamp_is_interior(mass in simplex(8), eta in 1e-6f64..0.12) {
        let q = DistVec::with_tolerance(mass, 1e-9).unwrap();
        let c = q.clamp_to_interior(eta).unwrap();
        prop_assert!(c.mass().iter().all(|&p| p >= eta * (1.0 - 1e-12)));
        prop_assert!((c.total() - 1.0).abs() < 1e-12);
        // entries already above the floor keep their relative order
        for (i, j) in [(0, 1), (2, 5), (3, 7)] {
            if q.mass()[i] > q.mass()[j] && c.mass()[j] > eta {
                prop_assert!(c.mass()[i] >= c.mass()[j]);
            }
        }
    }

    #[test]
    fn chain_round_trip(mass in simplex(16)) {
        let q = DistVec::with_tolerance(mass, 1e-9).unwrap().clamp_to_interior(1e-4).unwrap();
        let p = invert_chain(q.mass()).unwrap();
        for (a, b) in forward_chain(&p).iter().zip(q.mass()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn index_round_trip(width in 1usize..=20, raw in any::<u64>()) {
        let i = (raw as usize) & ((1usize << width) - 1);
        prop_assert_eq!(index_of(&bin_of(i, width).unwrap()), i);
    }

    #[test]
    fn tv_is_a_metric(a in simplex(4), b in simplex(4), c in simplex(4)) {
        let (a, b, c) = (
            DistVec::with_tolerance(a, 1e-9).unwrap(),
            DistVec::with_tolerance(b, 1e-9).unwrap(),
            DistVec::with_tolerance(c, 1e-9).unwrap(),
        );
        let ab = tv_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, tv_distance(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(ab <= tv_distance(&a, &c).unwrap() + tv_distance(&c, &b).unwrap() + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn leakage_shrinks_with_sharpness(seed in any::<u64>(), shape in prop::sample::select(vec![(1usize, 1usize), (1, 2), (2, 2), (1, 3)])) {
        let target = sample_kernel(shape.0, shape.1, seed, 1e-3).unwrap();
        let reports = alpha_sweep(&target, &[5.0, 10.0, 20.0, 40.0], &SweepConfig::default()).unwrap();
        for w in reports.windows(2) {
            prop_assert!(w[1].max_tv <= w[0].max_tv, "{} then {}", w[0].max_tv, w[1].max_tv);
        }
        prop_assert!(reports[0].max_tv > reports[3].max_tv);
    }
}

#[test]
fn fixed_compile_at_many_seeds() {
    let cfg = ScalingConfig::default();
    for seed in 0..20 {
        let target = sample_kernel_trial(2, 2, seed, 0, 1e-3).unwrap();
        let net = compile_theorem1(&target, &cfg).unwrap();
        let realized = full_kernel(&net, Evaluator::Naive).unwrap();
        assert!(realized.max_row_tv(&target).unwrap() <= 1e-6, "seed {seed}");
    }
}
