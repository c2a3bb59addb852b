//! The trainable-output compile uses half the hidden units of the fixed one.
//! Its residual report gives the gap left by the shared output weights.
//!
//! cargo run --example trainable_output

use skn::construct::{compile_theorem2, ScalingConfig};
use skn::eval::{full_kernel, Evaluator};
use skn::model::MarkovKernel;

fn main() -> skn::Result<()> {
    let cfg = ScalingConfig::default();
    let rows = vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.1, 0.2, 0.3, 0.4]];
    let equal = MarkovKernel::from_rows(rows)?;
    let generic = MarkovKernel::from_rows(vec![vec![0.1, 0.2, 0.3, 0.4], vec![0.4, 0.3, 0.2, 0.1]])?;

    for (name, target) in [("equal rows", equal), ("generic", generic)] {
        let (net, residual) = compile_theorem2(&target, &cfg)?;
        let realized = full_kernel(&net, Evaluator::Naive)?;
        println!("{name}: m = {}, residual per input = {:?}", net.m(), residual.per_input);
        for (y, row) in realized.rows().iter().enumerate() {
            println!("  P(.|{y}) = {:.6?}", row.mass());
        }
    }
    Ok(())
}
