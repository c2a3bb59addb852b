//! Scalar nonlinearities.

use crate::error::{Error, Result};

/// Logistic function `1 / (1 + exp(-a))`.
///
/// Evaluated in the sign-split form so neither branch overflows; the
/// result saturates to `0.0` or `1.0` only where `f64` cannot represent
/// the true value.
#[inline]
pub fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

/// `ln(sigmoid(a))`, accurate for large `|a|`.
#[inline]
pub fn log_sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        -(-a).exp().ln_1p()
    } else {
        a - a.exp().ln_1p()
    }
}

/// Inverse of [`sigmoid`] on `[eta, 1 - eta]`.
pub fn logit(p: f64, eta: f64) -> Result<f64> {
    if !(p.is_finite() && p >= eta && p <= 1.0 - eta) {
        return Err(Error::Domain(format!(
            "logit argument {p} outside [eta, 1 - eta] for probability floor eta = {eta}"
        )));
    }
    Ok(log_odds(p, 1.0 - p))
}

/// `ln(on / off)` for a Bernoulli given both of its masses.
///
/// Taking both masses avoids the cancellation in `1 - p` when one of them
/// was computed separately to full relative precision.
#[inline]
pub fn log_odds(on: f64, off: f64) -> f64 {
    on.ln() - off.ln()
}
