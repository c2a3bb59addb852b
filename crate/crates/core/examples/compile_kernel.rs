//! Compile a random kernel with the fixed output layer and check it exactly.
//!
//! cargo run --example compile_kernel

use skn::construct::{bounds, compile_theorem1, ScalingConfig};
use skn::eval::Evaluator;
use skn::harness::{sample_kernel, verify, RunTag};

fn main() -> skn::Result<()> {
    let (k, n, seed) = (2, 2, 7);
    let target = sample_kernel(k, n, seed, 1e-3)?;
    let cfg = ScalingConfig::default();
    let net = compile_theorem1(&target, &cfg)?;
    println!("(k, n) = ({k}, {n}), m = {}, bounds = {:?}", net.m(), bounds(k, n)?);

    let report = verify(&target, &net, Evaluator::Naive, RunTag { seed, alpha: cfg.alpha })?;
    for (y, (tv, kl)) in report.per_input_tv.iter().zip(&report.per_input_kl).enumerate() {
        println!("input {y}: tv = {tv:.3e}, kl = {kl:.3e}");
    }
    println!("max-row tv = {:.3e} in {:?}", report.max_tv, report.wall_time);
    Ok(())
}
