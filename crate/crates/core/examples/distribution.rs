//! Input-free networks: both output regimes reproduce a distribution.
//!
//! cargo run --example distribution

use skn::construct::{compile_distribution, ScalingConfig, Variant};
use skn::eval::{full_kernel, Evaluator};
use skn::model::{tv_distance, DistVec};

fn main() -> skn::Result<()> {
    let q = DistVec::new(vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.1, 0.1, 0.05])?;
    for variant in [Variant::Fixed, Variant::Trainable] {
        let net = compile_distribution(&q, variant, &ScalingConfig::default())?;
        let realized = full_kernel(&net, Evaluator::Naive)?;
        println!(
            "{variant:?}: m = {}, tv = {:.3e}",
            net.m(),
            tv_distance(realized.row(0), &q)?
        );
    }
    Ok(())
}
