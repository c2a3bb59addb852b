//! Weight compilers.
//!
//! Every construction is parameterized by a sharpness `alpha`: weights that
//! must act as hard thresholds are scaled by it, and the realized kernel
//! converges to the target as `alpha` grows. Targets are first clamped
//! into the interior of the simplex with the floor `eta`.

mod bounds;
mod chain;
mod compile;
mod edge;
mod mu;
mod orthant;

pub use bounds::{bounds, fixed_output_hidden_units, trainable_output_hidden_units, Bounds};
pub use chain::{forward_chain, invert_chain, pair_sums};
pub use compile::{
    compile_distribution, compile_theorem1, compile_theorem2, idealized_trainable_kernel, ResidualReport,
    Variant,
};
pub use edge::{edge_unit, first_layer, EdgeSpec};
pub use mu::{lambda_of, log_weighted_ratio, solve_mu, solve_mu_block, MuParams, RatioTarget};
pub use orthant::{fixed_output_layer, orthant_weights, OrthantMap, MAX_ORTHANT_WIDTH};

use crate::error::{Error, Result};
use crate::model::DEFAULT_ETA;

/// Sharpness and tolerances shared by the compilers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingConfig {
    pub alpha: f64,
    /// Probability floor applied to targets.
    pub eta: f64,
    /// Bisection tolerance on log-odds in the output-bias solver.
    pub ratio_tol: f64,
    pub max_bisection_iters: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            alpha: 40.0,
            eta: DEFAULT_ETA,
            ratio_tol: 1e-12,
            max_bisection_iters: 200,
        }
    }
}

impl ScalingConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    /// Sharpness that bounds the per-unit leakage of an `m`-unit network with
    /// `n` outputs by `eps_target / (m 2^n)`: `S + ln(m 2^n / eps_target)`,
    /// where `S = ln((1 - eta) / eta)` bounds every hidden log-odds after
    /// clamping.
    pub fn auto_alpha(eta: f64, m: usize, n: usize, eps_target: f64) -> f64 {
        let max_logit = ((1.0 - eta) / eta).ln();
        max_logit + ((m.max(1) as f64) * (1u64 << n) as f64 / eps_target).ln()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Domain(format!("sharpness alpha = {} must be positive", self.alpha)));
        }
        let ceiling = 0.5f64.powi(n as i32);
        if !(self.eta > 0.0 && self.eta < ceiling) {
            return Err(Error::Domain(format!(
                "probability floor eta = {} outside (0, 2^-{n})",
                self.eta
            )));
        }
        if self.ratio_tol.is_nan() || self.ratio_tol <= 0.0 || self.max_bisection_iters == 0 {
            return Err(Error::Domain("ratio tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_ranges() {
        assert!(ScalingConfig::default().validate(3).is_ok());
        assert!(ScalingConfig::with_alpha(0.0).validate(1).is_err());
        let cfg = ScalingConfig { eta: 0.2, ..Default::default() };
        assert!(cfg.validate(2).is_ok());
        assert!(cfg.validate(3).is_err());
    }

    #[test]
    fn auto_alpha_formula() {
        let a = ScalingConfig::auto_alpha(1e-3, 6, 2, 1e-9);
        let expected = (999.0f64).ln() + (24.0e9f64).ln();
        assert!((a - expected).abs() < 1e-12);
    }
}
