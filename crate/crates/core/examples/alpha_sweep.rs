//! Realized error against sharpness, written as CSV to stdout.
//!
//! cargo run --example alpha_sweep

use skn::harness::{alpha_sweep, reports_to_csv, sample_kernel, summarize, SweepConfig};

fn main() -> skn::Result<()> {
    let seed = 3;
    let target = sample_kernel(2, 3, seed, 1e-3)?;
    let cfg = SweepConfig { seed, ..SweepConfig::default() };
    let reports = alpha_sweep(&target, &[5.0, 10.0, 20.0, 40.0], &cfg)?;
    for r in &reports {
        eprintln!("alpha = {:>4}: max-row tv = {:.3e}", r.alpha, r.max_tv);
    }
    print!("{}", reports_to_csv(&reports));
    eprintln!("{}", serde_json::to_string_pretty(&summarize(&reports))?);
    Ok(())
}
