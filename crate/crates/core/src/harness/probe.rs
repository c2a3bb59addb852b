//! How much the shared output row of the trainable-output compile costs.
//!
//! Paired inputs `2i` and `2i + 1` drive the same hidden block and the same
//! `μ` weights, and every input shares `μ_0`. Three target classes separate
//! what that sharing can and cannot represent:
//!
//! - (a) the two rows of each pair are equal;
//! - (b) the rows of a pair have equal pair sums `K(2l|y) + K(2l+1|y)` but
//!   different within-pair odds;
//! - (c) generic rows.

use rayon::prelude::*;
use serde::Serialize;

use super::{dirichlet_row, finish_row, CounterRng};
use crate::construct::{bounds, compile_theorem2, Bounds, ScalingConfig};
use crate::error::{Error, Result};
use crate::eval::{full_kernel, Evaluator};
use crate::fit::{objective, refine, FitConfig};
use crate::model::{pairwise_sum, DistVec, MarkovKernel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TargetClass {
    #[serde(rename = "a")]
    EqualRows,
    #[serde(rename = "b")]
    EqualPairSums,
    #[serde(rename = "c")]
    Generic,
}

impl TargetClass {
    pub const ALL: [TargetClass; 3] = [TargetClass::EqualRows, TargetClass::EqualPairSums, TargetClass::Generic];

    fn index(self) -> u64 {
        self as u64
    }
}

/// Draws a target of the given class from stream `3 · trial + class`.
pub fn sample_class_target(class: TargetClass, k: usize, n: usize, seed: u64, trial: u64, eta: f64) -> Result<MarkovKernel> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("need k >= 1 and n >= 1, got ({k}, {n})")));
    }
    let mut rng = CounterRng::new(seed, 3 * trial + class.index());
    let mut rows: Vec<DistVec> = Vec::with_capacity(1 << k);
    for _ in 0..1usize << (k - 1) {
        let even = finish_row(dirichlet_row(&mut rng, 1 << n), eta)?;
        let odd = match class {
            TargetClass::EqualRows => even.clone(),
            TargetClass::Generic => finish_row(dirichlet_row(&mut rng, 1 << n), eta)?,
            TargetClass::EqualPairSums => {
                let mut mass = Vec::with_capacity(1 << n);
                for pair in even.mass().chunks(2) {
                    let s = pair[0] + pair[1];
                    let lo = eta / s;
                    let u = rng.uniform_range(lo, 1.0 - lo);
                    mass.push(u * s);
                    mass.push(s - u * s);
                }
                DistVec::new(mass)?
            }
        };
        rows.push(even);
        rows.push(odd);
    }
    MarkovKernel::new(rows)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeConfig {
    pub scaling: ScalingConfig,
    /// Descent applied to each compiled network; `None` skips refinement.
    pub refine: Option<FitConfig>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            scaling: ScalingConfig::default(),
            refine: Some(FitConfig {
                iterations: 50,
                restarts: 1,
                ..FitConfig::default()
            }),
        }
    }
}

/// Distances are to the clamped target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTrial {
    pub trial: u64,
    /// Max-row TV of the `alpha → ∞` limit.
    pub residual: f64,
    /// Max-row TV of the compiled network at the configured sharpness.
    pub realized_tv: f64,
    pub objective_before: f64,
    pub refined_tv: Option<f64>,
    pub objective_after: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassSummary {
    pub class: TargetClass,
    pub count: usize,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub max_realized_tv: f64,
    pub mean_realized_tv: f64,
    pub max_refined_tv: Option<f64>,
    pub mean_refined_tv: Option<f64>,
    /// No refinement raised its objective.
    pub refinement_monotone: bool,
    pub trials: Vec<ProbeTrial>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub trials: u64,
    pub alpha: f64,
    pub eta: f64,
    pub bounds: Bounds,
    pub classes: Vec<ClassSummary>,
}

pub fn pairing_probe(k: usize, n: usize, seed: u64, trials: u64, cfg: &ProbeConfig) -> Result<ProbeReport> {
    if k == 0 || n < 2 {
        return Err(Error::InvalidShape(format!("probe needs k >= 1 and n >= 2, got ({k}, {n})")));
    }
    let jobs: Vec<(TargetClass, u64)> = TargetClass::ALL
        .iter()
        .flat_map(|&c| (0..trials).map(move |t| (c, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(class, trial)| run_trial(class, k, n, seed, trial, cfg))
        .collect::<Result<Vec<_>>>()?;

    let m = crate::construct::trainable_output_hidden_units(k, n) as usize;
    let classes = TargetClass::ALL
        .iter()
        .map(|&class| {
            let trials: Vec<ProbeTrial> = jobs
                .iter()
                .zip(&results)
                .filter(|((c, _), _)| *c == class)
                .map(|(_, r)| r.clone())
                .collect();
            summarize_class(class, trials)
        })
        .collect();
    Ok(ProbeReport {
        k,
        n,
        m,
        seed,
        trials,
        alpha: cfg.scaling.alpha,
        eta: cfg.scaling.eta,
        bounds: bounds(k, n)?,
        classes,
    })
}

fn run_trial(class: TargetClass, k: usize, n: usize, seed: u64, trial: u64, cfg: &ProbeConfig) -> Result<ProbeTrial> {
    let target = sample_class_target(class, k, n, seed, trial, cfg.scaling.eta)?;
    let clamped = target.clamp_to_interior(cfg.scaling.eta)?;
    let (net, residual) = compile_theorem2(&target, &cfg.scaling)?;
    let realized_tv = full_kernel(&net, Evaluator::Naive)?.max_row_tv(&clamped)?;
    let objective_before = objective(&net, &clamped)?;
    let (refined_tv, objective_after) = match &cfg.refine {
        Some(fit_cfg) => {
            let refined = refine(&net, &clamped, fit_cfg)?;
            let tv = full_kernel(&refined.params, Evaluator::Naive)?.max_row_tv(&clamped)?;
            (Some(tv), Some(refined.objective))
        }
        None => (None, None),
    };
    Ok(ProbeTrial {
        trial,
        residual: residual.max,
        realized_tv,
        objective_before,
        refined_tv,
        objective_after,
    })
}

fn max_mean(values: &[f64]) -> (f64, f64) {
    let max = values.iter().copied().fold(0.0, f64::max);
    (max, pairwise_sum(values) / values.len().max(1) as f64)
}

fn summarize_class(class: TargetClass, trials: Vec<ProbeTrial>) -> ClassSummary {
    let residuals: Vec<f64> = trials.iter().map(|t| t.residual).collect();
    let realized: Vec<f64> = trials.iter().map(|t| t.realized_tv).collect();
    let refined: Vec<f64> = trials.iter().filter_map(|t| t.refined_tv).collect();
    let (max_residual, mean_residual) = max_mean(&residuals);
    let (max_realized_tv, mean_realized_tv) = max_mean(&realized);
    let refined_stats = (!refined.is_empty()).then(|| max_mean(&refined));
    ClassSummary {
        class,
        count: trials.len(),
        max_residual,
        mean_residual,
        max_realized_tv,
        mean_realized_tv,
        max_refined_tv: refined_stats.map(|s| s.0),
        mean_refined_tv: refined_stats.map(|s| s.1),
        refinement_monotone: trials
            .iter()
            .all(|t| t.objective_after.is_none_or(|after| after <= t.objective_before)),
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_shapes() {
        let eta = 1e-3;
        let a = sample_class_target(TargetClass::EqualRows, 2, 2, 1, 0, eta).unwrap();
        assert_eq!(a.row(0), a.row(1));
        assert_eq!(a.row(2), a.row(3));
        let b = sample_class_target(TargetClass::EqualPairSums, 2, 3, 1, 0, eta).unwrap();
        for pair in [0, 2] {
            let (e, o) = (b.row(pair).mass(), b.row(pair + 1).mass());
            for l in 0..4 {
                assert!((e[2 * l] + e[2 * l + 1] - o[2 * l] - o[2 * l + 1]).abs() < 1e-15);
            }
            assert!(o.iter().all(|&p| p >= eta * (1.0 - 1e-12)));
            assert_ne!(e, o);
        }
    }

    #[test]
    fn equal_rows_are_exact_for_one_input() {
        let cfg = ProbeConfig { refine: None, ..Default::default() };
        let report = pairing_probe(1, 2, 4, 5, &cfg).unwrap();
        assert_eq!(report.bounds.upper_free, Some(1));
        let a = &report.classes[0];
        assert_eq!(a.class, TargetClass::EqualRows);
        assert!(a.max_residual <= 1e-6, "{}", a.max_residual);
    }

    #[test]
    fn probe_is_deterministic() {
        let cfg = ProbeConfig {
            refine: Some(FitConfig { iterations: 5, restarts: 1, ..FitConfig::default() }),
            ..Default::default()
        };
        let a = serde_json::to_string(&pairing_probe(2, 2, 8, 2, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&pairing_probe(2, 2, 8, 2, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let report: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(report["bounds"]["upper_free"], 2);
        assert!(report["classes"].as_array().unwrap().iter().all(|c| c["refinement_monotone"] == true));
    }
}
