//! Output-bias row for the trainable second layer.
//!
//! The first output unit splits the mass of every hidden state `z` between
//! outputs `2 l(z)` and `2 l(z) + 1` with weight
//! `λ_z = 1 − σ(μ_0 + Σ_j μ_j z_j)`. For a product law `p` on the hidden
//! block, the odds of `2l` against `2l + 1` are
//!
//! ```text
//! Σ_{z ∈ Z_l} λ_z w_z / Σ_{z ∈ Z_l} (1 − λ_z) w_z,   w_z = Π_{j<l} Pr_p(z_j)
//! ```
//!
//! where `Z_l` is the set of states whose highest set bit is `l`. States in
//! `Z_l` have `z_j = 0` for `j > l`, so `μ_l` only affects `Z_l` and later
//! sets; solving `μ_0, μ_1, …` in order never disturbs an earlier ratio.

use super::ScalingConfig;
use crate::error::{Error, Result};
use crate::model::{pairwise_sum, sigmoid, BinaryState, ProductDist};

/// Target odds `r_l` of output `2l` versus `2l + 1`, for `l = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioTarget {
    r: Vec<f64>,
}

impl RatioTarget {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::Domain("ratio target needs at least one entry".into()));
        }
        if let Some(bad) = r.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::Domain(format!("target odds {bad} not in (0, inf)")));
        }
        Ok(Self { r })
    }

    /// Odds `q_{2l} / q_{2l+1}` read off a distribution over `2(N + 1)` outcomes.
    pub fn from_distribution(q: &[f64]) -> Result<Self> {
        Self::new(q.chunks(2).map(|c| c[0] / c[1]).collect())
    }

    pub fn odds(&self) -> &[f64] {
        &self.r
    }
}

/// Bias `μ_0` (shared by every block) and one weight sequence per block.
#[derive(Clone, Debug, PartialEq)]
pub struct MuParams {
    pub mu0: f64,
    pub blocks: Vec<Vec<f64>>,
}

impl MuParams {
    pub fn lambda(&self, block: usize, z: &BinaryState) -> Result<f64> {
        let mu = &self.blocks[block];
        if z.width() != mu.len() {
            return Err(Error::LengthMismatch {
                expected: mu.len(),
                found: z.width(),
            });
        }
        let a = mu
            .iter()
            .zip(z.bits())
            .filter(|(_, &b)| b == 1)
            .fold(self.mu0, |acc, (m, _)| acc + m);
        Ok(sigmoid(-a))
    }
}

/// `λ_z` for a single-block parameter set.
pub fn lambda_of(mu: &MuParams, z: &BinaryState) -> Result<f64> {
    mu.lambda(0, z)
}

/// Log of the `p`-weighted odds of output `2l` versus `2l + 1`, using
/// `mu[..l]` (the entries `μ_1..μ_l`).
pub fn log_weighted_ratio(p: &ProductDist, mu0: f64, mu: &[f64], l: usize) -> f64 {
    if l == 0 {
        return -mu0;
    }
    let lower = l - 1;
    let base = mu0 + mu[l - 1];
    let mut num = Vec::with_capacity(1 << lower);
    let mut den = Vec::with_capacity(1 << lower);
    for z in 0..1usize << lower {
        let mut a = base;
        let mut w = 1.0;
        for (j, m) in mu[..lower].iter().enumerate() {
            if z >> j & 1 == 1 {
                a += m;
                w *= p.on(j);
            } else {
                w *= p.off(j);
            }
        }
        num.push(w * sigmoid(-a));
        den.push(w * sigmoid(a));
    }
    pairwise_sum(&num).ln() - pairwise_sum(&den).ln()
}

/// Single-block solve: `μ_0 = −ln r_0` in closed form, then `μ_1..μ_N` by
/// bisection.
pub fn solve_mu(p: &ProductDist, target: &RatioTarget, cfg: &ScalingConfig) -> Result<MuParams> {
    if target.r.len() != p.width() + 1 {
        return Err(Error::LengthMismatch {
            expected: p.width() + 1,
            found: target.r.len(),
        });
    }
    let mu0 = -target.r[0].ln();
    let block = solve_mu_block(p, &target.r[1..], mu0, cfg)?;
    Ok(MuParams {
        mu0,
        blocks: vec![block],
    })
}

/// Solves `μ_1..μ_N` of one block for a fixed shared `μ_0`; `odds[l − 1]`
/// is the target for `Z_l`.
pub fn solve_mu_block(p: &ProductDist, odds: &[f64], mu0: f64, cfg: &ScalingConfig) -> Result<Vec<f64>> {
    if odds.len() != p.width() {
        return Err(Error::LengthMismatch {
            expected: p.width(),
            found: odds.len(),
        });
    }
    if p.on_probs().iter().chain(p.off_probs()).any(|&x| x.is_nan() || x <= 0.0) {
        return Err(Error::Domain("hidden product law must be strictly positive".into()));
    }
    RatioTarget::new(odds.to_vec())?;
    let mut mu = vec![0.0; odds.len()];
    for l in 1..=odds.len() {
        let goal = odds[l - 1].ln();
        mu[l - 1] = bisect_decreasing(
            |x| {
                let mut trial = mu[..l].to_vec();
                trial[l - 1] = x;
                log_weighted_ratio(p, mu0, &trial, l) - goal
            },
            cfg,
        )?;
    }
    Ok(mu)
}

/// Root of a continuous, strictly decreasing `f`, bracketed by doubling.
fn bisect_decreasing(f: impl Fn(f64) -> f64, cfg: &ScalingConfig) -> Result<f64> {
    let cap = cfg.max_bisection_iters;
    let mut iterations = 0;
    let mut half_width = 1.0f64;
    loop {
        iterations += 1;
        if f(-half_width) > 0.0 && f(half_width) < 0.0 {
            break;
        }
        if iterations >= cap || !half_width.is_finite() {
            return Err(Error::NonConvergence {
                iterations,
                residual: f64::NAN,
            });
        }
        half_width *= 2.0;
    }
    let (mut lo, mut hi) = (-half_width, half_width);
    let mut best = (0.0, f64::INFINITY);
    while iterations < cap {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let value = f(mid);
        if value.abs() < best.1.abs() {
            best = (mid, value);
        }
        if value.abs() <= cfg.ratio_tol || mid <= lo || mid >= hi {
            return Ok(best.0);
        }
        if value > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        iterations,
        residual: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ScalingConfig {
        ScalingConfig::default()
    }

    #[test]
    fn lambda_examples() {
        let zero = MuParams { mu0: 0.0, blocks: vec![vec![0.0; 3]] };
        for z in BinaryState::iter_all(3) {
            assert_eq!(lambda_of(&zero, &z).unwrap(), 0.5);
        }
        let biased = MuParams { mu0: -(3.0f64).ln(), blocks: vec![vec![0.0; 2]] };
        assert!((lambda_of(&biased, &BinaryState::zeros(2)).unwrap() - 0.75).abs() < 1e-15);
        let steep = MuParams { mu0: 0.0, blocks: vec![vec![0.0, -800.0]] };
        let z = BinaryState::new(vec![1, 1]).unwrap();
        assert_eq!(lambda_of(&steep, &z).unwrap(), 1.0);
    }

    #[test]
    fn even_odds_give_zero_mu() {
        let mu = solve_mu(&ProductDist::uniform(1), &RatioTarget::new(vec![1.0, 1.0]).unwrap(), &cfg()).unwrap();
        assert_eq!(mu.mu0, 0.0);
        assert!(mu.blocks[0][0].abs() < 1e-12);
    }

    #[test]
    fn closed_form_mu0() {
        let mu = solve_mu(&ProductDist::uniform(1), &RatioTarget::new(vec![3.0, 2.0]).unwrap(), &cfg()).unwrap();
        assert_eq!(mu.mu0, -(3.0f64).ln());
    }

    #[test]
    fn sequential_stability() {
        let p = ProductDist::new(vec![0.3, 0.6, 0.45]).unwrap();
        let mu = vec![0.4, -1.2, 2.0];
        for z in BinaryState::iter_all(3) {
            let l = z.highest_set();
            for changed in (l + 1)..=3 {
                let mut bumped = mu.clone();
                bumped[changed - 1] += 5.0;
                let a = MuParams { mu0: 0.2, blocks: vec![mu.clone()] };
                let b = MuParams { mu0: 0.2, blocks: vec![bumped] };
                assert_eq!(a.lambda(0, &z).unwrap(), b.lambda(0, &z).unwrap());
            }
        }
        let before = log_weighted_ratio(&p, 0.2, &mu, 2);
        let mut bumped = mu.clone();
        bumped[2] = -7.0;
        assert_eq!(before, log_weighted_ratio(&p, 0.2, &bumped, 2));
    }

    #[test]
    fn ratio_strictly_decreasing_in_own_weight() {
        let p = ProductDist::new(vec![0.2, 0.7, 0.4]).unwrap();
        for l in 1..=3 {
            let mut last = f64::INFINITY;
            for step in 0..10 {
                let mut mu = vec![0.3, -0.5, 1.1];
                mu[l - 1] = -6.0 + 1.3 * step as f64;
                let r = log_weighted_ratio(&p, -0.25, &mu, l);
                assert!(r < last);
                last = r;
            }
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let tight = ScalingConfig { max_bisection_iters: 3, ..cfg() };
        let p = ProductDist::new(vec![0.4, 0.5]).unwrap();
        let err = solve_mu(&p, &RatioTarget::new(vec![1.0, 1e30, 2.0]).unwrap(), &tight).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(RatioTarget::new(vec![1.0, 0.0]).is_err());
        assert!(RatioTarget::new(vec![f64::INFINITY]).is_err());
        let p = ProductDist::uniform(2);
        assert!(solve_mu(&p, &RatioTarget::new(vec![1.0, 1.0]).unwrap(), &cfg()).is_err());
    }
}
