//! Recover the independent hidden law whose "highest active unit" statistic
//! has a prescribed distribution.
//!
//! cargo run --example chain_inversion

use skn::construct::{forward_chain, invert_chain};

fn main() -> skn::Result<()> {
    for q in [vec![0.25; 4], vec![0.5, 0.25, 0.125, 0.125]] {
        let p = invert_chain(&q)?;
        println!("q = {q:?}");
        println!("  Pr(z_j = 0) = {:?}", p.off_probs());
        println!("  forward     = {:?}", forward_chain(&p));
    }
    Ok(())
}
