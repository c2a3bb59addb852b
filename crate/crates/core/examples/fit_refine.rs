//! Fit a small network from random starts, then refine a compiled one.
//!
//! cargo run --release --example fit_refine

use skn::construct::{compile_theorem2, ScalingConfig};
use skn::eval::{full_kernel, Evaluator};
use skn::fit::{conditional_entropy, fit, refine, FitConfig};
use skn::harness::sample_kernel;

fn main() -> skn::Result<()> {
    let target = sample_kernel(1, 2, 5, 1e-3)?;
    println!("entropy floor = {:.6}", conditional_entropy(&target));

    let cfg = FitConfig { iterations: 2000, seed: 1, ..FitConfig::default() };
    for m in 1..=3 {
        let result = fit(&target, m, &cfg)?;
        let tv = full_kernel(&result.params, Evaluator::Naive)?.max_row_tv(&target)?;
        println!("m = {m}: objective {:.6}, max-row tv {tv:.3e}", result.objective);
    }

    let (net, _) = compile_theorem2(&target, &ScalingConfig::with_alpha(8.0))?;
    let refined = refine(&net, &target, &FitConfig { iterations: 500, ..cfg })?;
    println!(
        "compiled at alpha = 8: objective {:.6} -> {:.6}",
        refined.trace[0], refined.objective
    );
    Ok(())
}
