//! Sequential inversion of the highest-set-bit law of a product distribution.
//!
//! For hidden units with `off_j = Pr(z_j = 0)`, the probability that the
//! highest set bit is `i` is `q_i = (1 − off_i) Π_{j>i} off_j` and
//! `q_0 = Π_j off_j`. The ratios `q_i / q_0` determine each `off_i` from
//! the ones below it.

use crate::error::{Error, Result};
use crate::model::{pairwise_sum, ProductDist};

const MASS_TOL: f64 = 1e-10;

/// Product distribution of width `q.len() − 1` whose highest-set-bit law is `q`.
pub fn invert_chain(q: &[f64]) -> Result<ProductDist> {
    if q.len() < 2 {
        return Err(Error::InvalidDistribution(format!(
            "chain inversion needs at least two outcomes, got {}",
            q.len()
        )));
    }
    if let Some(bad) = q.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidDistribution(format!(
            "chain inversion needs a strictly positive distribution, found entry {bad}"
        )));
    }
    let total = pairwise_sum(q);
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    let width = q.len() - 1;
    let mut on = Vec::with_capacity(width);
    let mut off = Vec::with_capacity(width);
    let mut below = 1.0;
    for &qi in &q[1..] {
        let t = qi / q[0] * below;
        on.push(t / (1.0 + t));
        off.push(1.0 / (1.0 + t));
        below *= 1.0 / (1.0 + t);
    }
    Ok(ProductDist::from_parts(on, off))
}

/// Highest-set-bit law of `p`, length `p.width() + 1`.
pub fn forward_chain(p: &ProductDist) -> Vec<f64> {
    let width = p.width();
    let mut q = vec![0.0; width + 1];
    let mut above = 1.0;
    for i in (1..=width).rev() {
        q[i] = p.on(i - 1) * above;
        above *= p.off(i - 1);
    }
    q[0] = above;
    q
}

/// `(q_0 + q_1, q_2 + q_3, …)`: mass of each output pair `(2l, 2l + 1)`.
pub fn pair_sums(q: &[f64]) -> Vec<f64> {
    q.chunks(2).map(|c| c.iter().sum()).collect()
}
