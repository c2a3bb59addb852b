//! Residuals of the trainable-output compile on three target classes.
//!
//! cargo run --release --example pairing_probe

use skn::harness::{pairing_probe, ProbeConfig};

fn main() -> skn::Result<()> {
    for (k, n) in [(1, 2), (2, 2), (1, 3)] {
        let report = pairing_probe(k, n, 0, 8, &ProbeConfig::default())?;
        println!("(k, n) = ({k}, {n}), m = {}, upper_free = {:?}", report.m, report.bounds.upper_free);
        for c in &report.classes {
            println!(
                "  {:?}: residual max {:.2e} mean {:.2e}; realized {:.2e}; refined {:.2e}; monotone {}",
                c.class,
                c.max_residual,
                c.mean_residual,
                c.max_realized_tv,
                c.max_refined_tv.unwrap_or(f64::NAN),
                c.refinement_monotone
            );
        }
    }
    Ok(())
}
