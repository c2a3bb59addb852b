//! Evaluators checked against a direct triple sum over hidden and output
//! states.

use skn::construct::{compile_theorem1, compile_theorem2, ScalingConfig};
use skn::eval::{
    compose_row_naive, compose_row_naive_with, full_kernel, full_kernel_with, EvalOptions, Evaluator, StateOrder,
};
use skn::harness::{sample_kernel_trial, CounterRng};
use skn::model::{BinaryState, LayerParams, MarkovKernel, NetworkParams};

fn sigma(a: f64) -> f64 {
    1.0 / (1.0 + (-a).exp())
}

fn unit_prob(bit: bool, pre: f64) -> f64 {
    if bit { sigma(pre) } else { 1.0 - sigma(pre) }
}

fn oracle_kernel(net: &NetworkParams) -> Vec<Vec<f64>> {
    let (k, m, n) = net.shape();
    (0..1usize << k)
        .map(|y| {
            (0..1usize << n)
                .map(|x| {
                    (0..1usize << m)
                        .map(|z| {
                            let q: f64 = (0..m)
                                .map(|j| {
                                    let pre = net.hidden().bias()[j]
                                        + (0..k).filter(|t| y >> t & 1 == 1).map(|t| net.hidden().weight(j, t)).sum::<f64>();
                                    unit_prob(z >> j & 1 == 1, pre)
                                })
                                .product();
                            let r: f64 = (0..n)
                                .map(|i| {
                                    let pre = net.output().bias()[i]
                                        + (0..m).filter(|j| z >> j & 1 == 1).map(|j| net.output().weight(i, j)).sum::<f64>();
                                    unit_prob(x >> i & 1 == 1, pre)
                                })
                                .product();
                            q * r
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn random_net(seed: u64, k: usize, m: usize, n: usize, scale: f64) -> NetworkParams {
    let mut rng = CounterRng::new(seed, 0);
    let mut draw = |len: usize| (0..len).map(|_| rng.uniform_range(-scale, scale)).collect::<Vec<f64>>();
    let hidden = LayerParams::from_flat(k, m, draw(k * m), draw(m)).unwrap();
    let output = LayerParams::from_flat(m, n, draw(m * n), draw(n)).unwrap();
    NetworkParams::new(hidden, output, None).unwrap()
}

#[test]
fn naive_matches_direct_sum() {
    for seed in 0..20 {
        for (k, m, n) in [(0, 1, 1), (1, 2, 2), (2, 3, 2), (2, 5, 3), (3, 4, 1)] {
            let net = random_net(seed, k, m, n, 3.0);
            let kernel = full_kernel(&net, Evaluator::Naive).unwrap();
            for (y, row) in oracle_kernel(&net).iter().enumerate() {
                for (x, p) in row.iter().enumerate() {
                    assert!((kernel.entry(y, x) - p).abs() < 1e-13, "seed {seed} ({k},{m},{n}) y={y} x={x}");
                }
            }
        }
    }
}

#[test]
fn gray_order_matches_counting() {
    for seed in 0..10 {
        let net = random_net(seed, 2, 9, 3, 4.0);
        let gray = EvalOptions { order: StateOrder::Gray, ..EvalOptions::default() };
        let a = full_kernel(&net, Evaluator::Naive).unwrap();
        let b = full_kernel_with(&net, Evaluator::Naive, gray).unwrap();
        assert!(a.max_row_tv(&b).unwrap() <= 1e-12);
        let y = BinaryState::from_index(3, 2).unwrap();
        let row = compose_row_naive_with(&net, &y, gray).unwrap();
        let direct = compose_row_naive(&net, &y).unwrap();
        assert!(row.mass().iter().zip(direct.mass()).all(|(a, b)| (a - b).abs() < 1e-13));
    }
}

#[test]
fn compiled_networks_match_direct_sum() {
    let cfg = ScalingConfig::default();
    let target = sample_kernel_trial(2, 2, 1, 0, 1e-3).unwrap();
    let fixed = compile_theorem1(&target, &cfg).unwrap();
    let (trainable, _) = compile_theorem2(&target, &cfg).unwrap();
    for net in [fixed, trainable] {
        let kernel = full_kernel(&net, Evaluator::Naive).unwrap();
        let direct = MarkovKernel::from_rows(oracle_kernel(&net)).unwrap();
        assert!(kernel.max_row_tv(&direct).unwrap() < 1e-12);
        let block = full_kernel(&net, Evaluator::Blockwise).unwrap();
        assert!(kernel.max_row_tv(&block).unwrap() < 1e-9);
    }
}

#[test]
fn fixed_compile_is_pinned_down_in_one_unit_case() {
    // k = n = 1: one hidden unit copies the input's target odds, the output
    // unit thresholds it.
    let target = MarkovKernel::from_rows(vec![vec![0.25, 0.75], vec![0.6, 0.4]]).unwrap();
    let net = compile_theorem1(&target, &ScalingConfig::default()).unwrap();
    assert_eq!(net.shape(), (1, 1, 1));
    assert_eq!(net.output().weight(0, 0), 80.0);
    assert_eq!(net.output().bias()[0], -40.0);
    let direct = oracle_kernel(&net);
    assert!((direct[0][1] - 0.75).abs() < 1e-10);
    assert!((direct[1][1] - 0.4).abs() < 1e-10);
}
