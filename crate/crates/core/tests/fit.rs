use skn::construct::{compile_theorem2, ScalingConfig};
use skn::eval::{full_kernel, Evaluator};
use skn::fit::{conditional_entropy, fit, objective, refine, FitConfig};
use skn::harness::{sample_kernel, CounterRng};
use skn::model::{LayerParams, NetworkParams};

fn random_net(seed: u64, k: usize, m: usize, n: usize) -> NetworkParams {
    let mut rng = CounterRng::new(seed, 99);
    let mut draw = |len: usize| (0..len).map(|_| rng.uniform_range(-2.0, 2.0)).collect::<Vec<f64>>();
    let hidden = LayerParams::from_flat(k, m, draw(k * m), draw(m)).unwrap();
    let output = LayerParams::from_flat(m, n, draw(m * n), draw(n)).unwrap();
    NetworkParams::new(hidden, output, None).unwrap()
}

#[test]
fn recovers_a_representable_target() {
    let teacher = random_net(1, 1, 2, 2);
    let target = full_kernel(&teacher, Evaluator::Naive).unwrap();
    let cfg = FitConfig { seed: 3, restarts: 5, iterations: 5000, ..FitConfig::default() };
    let result = fit(&target, 2, &cfg).unwrap();
    let realized = full_kernel(&result.params, Evaluator::Naive).unwrap();
    let tv = realized.max_row_tv(&target).unwrap();
    assert!(tv <= 1e-2, "max-row TV {tv}");
    assert!(result.trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn fit_is_deterministic() {
    let target = sample_kernel(1, 2, 5, 1e-3).unwrap();
    let cfg = FitConfig { seed: 11, restarts: 3, iterations: 100, ..FitConfig::default() };
    let a = fit(&target, 2, &cfg).unwrap();
    let b = fit(&target, 2, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn objective_bounded_by_entropy() {
    for seed in 0..20 {
        let target = sample_kernel(2, 2, seed, 1e-3).unwrap();
        let net = random_net(seed, 2, 3, 2);
        assert!(objective(&net, &target).unwrap() >= conditional_entropy(&target) - 1e-12);
    }
}

#[test]
fn refinement_never_raises_objective() {
    let cfg = FitConfig { iterations: 30, ..FitConfig::default() };
    for seed in 0..5 {
        let target = sample_kernel(2, 3, seed, 1e-3).unwrap();
        let (net, _) = compile_theorem2(&target, &ScalingConfig::with_alpha(10.0)).unwrap();
        let clamped = target.clamp_to_interior(1e-3).unwrap();
        let before = objective(&net, &clamped).unwrap();
        let refined = refine(&net, &clamped, &cfg).unwrap();
        assert!(refined.objective <= before);
        assert_eq!(refined.trace[0], before);
    }
}
