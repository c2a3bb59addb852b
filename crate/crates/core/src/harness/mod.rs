//! Randomized verification, sharpness sweeps, bound tables and the
//! pairing probe.
//!
//! Every random draw comes from [`CounterRng`], keyed by a seed and a trial
//! index, so reports are byte-identical across runs and thread counts.
//! Trials may run concurrently but are always assembled in trial order.

mod probe;
mod report;
mod rng;

pub use probe::{pairing_probe, sample_class_target, ClassSummary, ProbeConfig, ProbeReport, ProbeTrial, TargetClass};
pub use report::{reports_to_csv, summarize, write_csv_rows, RunSummary, CSV_HEADER};
pub use rng::{mix64, CounterRng};

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::construct::{bounds, compile_theorem1, compile_theorem2, Bounds, ScalingConfig};
use crate::error::{Error, Result};
use crate::eval::{full_kernel, Evaluator};
use crate::model::{kl_divergence, pairwise_sum, tv_distance, DistVec, MarkovKernel, NetworkParams};

/// One row drawn from the flat Dirichlet: normalized unit exponentials.
pub fn dirichlet_row(rng: &mut CounterRng, len: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| rng.exponential()).collect();
    let total = pairwise_sum(&draws);
    draws.into_iter().map(|d| d / total).collect()
}

/// Random kernel with flat-Dirichlet rows, clamped to the floor `eta`
/// (`eta = 0` skips the clamp). Uses trial stream 0.
pub fn sample_kernel(k: usize, n: usize, seed: u64, eta: f64) -> Result<MarkovKernel> {
    sample_kernel_trial(k, n, seed, 0, eta)
}

pub fn sample_kernel_trial(k: usize, n: usize, seed: u64, trial: u64, eta: f64) -> Result<MarkovKernel> {
    let mut rng = CounterRng::new(seed, trial);
    let rows = (0..1usize << k)
        .map(|_| finish_row(dirichlet_row(&mut rng, 1 << n), eta))
        .collect::<Result<Vec<_>>>()?;
    MarkovKernel::new(rows)
}

pub(crate) fn finish_row(mass: Vec<f64>, eta: f64) -> Result<DistVec> {
    let row = DistVec::new(mass)?;
    if eta == 0.0 {
        Ok(row)
    } else {
        row.clamp_to_interior(eta)
    }
}

/// Identifies a run in reports.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RunTag {
    pub seed: u64,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub alpha: f64,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub per_input_tv: Vec<f64>,
    pub per_input_kl: Vec<f64>,
    /// Always the maximum of `per_input_tv`.
    pub max_tv: f64,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerifyReport {
    pub fn max_kl(&self) -> f64 {
        self.per_input_kl.iter().copied().fold(0.0, f64::max)
    }

    pub fn mean_tv(&self) -> f64 {
        pairwise_sum(&self.per_input_tv) / self.per_input_tv.len() as f64
    }
}

fn check_rows(kernel: &MarkovKernel, what: &str) -> Result<()> {
    for (y, row) in kernel.rows().iter().enumerate() {
        let sum = row.total();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("{what} row {y} sums to {sum}")));
        }
    }
    Ok(())
}

/// Evaluates `net` exactly and compares it row by row with `target`.
pub fn verify(target: &MarkovKernel, net: &NetworkParams, evaluator: Evaluator, tag: RunTag) -> Result<VerifyReport> {
    let start = Instant::now();
    if target.k() != net.k() || target.n() != net.n() {
        return Err(Error::InvalidShape(format!(
            "target is ({}, {}) but network is ({}, {})",
            target.k(),
            target.n(),
            net.k(),
            net.n()
        )));
    }
    check_rows(target, "target")?;
    let realized = full_kernel(net, evaluator)?;
    check_rows(&realized, "realized")?;
    let mut per_input_tv = Vec::with_capacity(target.rows().len());
    let mut per_input_kl = Vec::with_capacity(target.rows().len());
    for (t, r) in target.rows().iter().zip(realized.rows()) {
        per_input_tv.push(tv_distance(t, r)?);
        per_input_kl.push(kl_divergence(t, r)?);
    }
    Ok(VerifyReport {
        seed: tag.seed,
        alpha: tag.alpha,
        k: net.k(),
        n: net.n(),
        m: net.m(),
        max_tv: per_input_tv.iter().copied().fold(0.0, f64::max),
        per_input_tv,
        per_input_kl,
        wall_time: start.elapsed(),
    })
}

/// Which compiler a sweep recompiles at each sharpness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Construction {
    /// Fixed output layer.
    #[default]
    Fixed,
    /// Trainable output layer.
    Trainable,
}

impl Construction {
    pub fn compile(self, target: &MarkovKernel, cfg: &ScalingConfig) -> Result<NetworkParams> {
        match self {
            Construction::Fixed => compile_theorem1(target, cfg),
            Construction::Trainable => compile_theorem2(target, cfg).map(|(net, _)| net),
        }
    }
}

impl std::str::FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "fixed" => Ok(Self::Fixed),
            "2" | "trainable" => Ok(Self::Trainable),
            other => Err(Error::Domain(format!("unknown construction `{other}`, expected 1 (fixed) or 2 (trainable)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub theorem: Construction,
    /// Floor and solver settings; `alpha` is overridden per sweep point.
    pub scaling: ScalingConfig,
    pub evaluator: Evaluator,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            theorem: Construction::Fixed,
            scaling: ScalingConfig::default(),
            evaluator: Evaluator::Naive,
            seed: 0,
        }
    }
}

/// Recompiles `target` at each sharpness and verifies each network against
/// the unclamped target.
pub fn alpha_sweep(target: &MarkovKernel, alphas: &[f64], cfg: &SweepConfig) -> Result<Vec<VerifyReport>> {
    if alphas.is_empty() || alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::Domain("sweep needs finite positive sharpness values".into()));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("sweep sharpness values must be increasing".into()));
    }
    alphas
        .par_iter()
        .map(|&alpha| {
            let scaling = ScalingConfig { alpha, ..cfg.scaling };
            let net = cfg.theorem.compile(target, &scaling)?;
            verify(target, &net, cfg.evaluator, RunTag { seed: cfg.seed, alpha })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessRow {
    pub k: usize,
    pub n: usize,
    pub bounds: Bounds,
    pub fixed_tight: bool,
    pub free_tight: bool,
}

/// Bounds for every `1 ≤ k ≤ 4`, `1 ≤ n ≤ 4`, row-major in `k`.
pub fn tightness_table() -> Vec<TightnessRow> {
    (1..=4)
        .flat_map(|k| (1..=4).map(move |n| (k, n)))
        .map(|(k, n)| {
            let b = bounds(k, n).expect("small shapes are in range");
            TightnessRow {
                k,
                n,
                bounds: b,
                fixed_tight: b.fixed_tight(),
                free_tight: b.free_tight(),
            }
        })
        .collect()
}

pub fn tightness_csv(rows: &[TightnessRow]) -> String {
    let mut out = String::from("k,n,lower_fixed,upper_fixed,lower_free,upper_free,fixed_tight,free_tight\n");
    for r in rows {
        let upper_free = r.bounds.upper_free.map(|u| u.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k,
            r.n,
            r.bounds.lower_fixed,
            r.bounds.upper_fixed,
            r.bounds.lower_free,
            upper_free,
            r.fixed_tight,
            r.free_tight
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LayerParams;

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_kernel(2, 2, 11, 1e-3).unwrap(), sample_kernel(2, 2, 11, 1e-3).unwrap());
        assert_ne!(sample_kernel(2, 2, 11, 1e-3).unwrap(), sample_kernel(2, 2, 12, 1e-3).unwrap());
    }

    #[test]
    fn floor_respected() {
        for seed in 0..50 {
            let kernel = sample_kernel(3, 1, seed, 0.25).unwrap();
            for row in kernel.rows() {
                assert!(row.mass().iter().all(|&p| (0.25..=0.75).contains(&p)));
            }
        }
    }

    #[test]
    fn dirichlet_mean_is_uniform() {
        let mut rng = CounterRng::new(5, 0);
        let mut mean = [0.0; 4];
        let draws = 10_000;
        for _ in 0..draws {
            for (m, p) in mean.iter_mut().zip(dirichlet_row(&mut rng, 4)) {
                *m += p / draws as f64;
            }
        }
        assert!(mean.iter().all(|m| (m - 0.25).abs() < 0.01), "{mean:?}");
    }

    #[test]
    fn self_verification_is_exact() {
        let hidden = LayerParams::new(vec![vec![0.5], vec![-1.0]], vec![0.1, 0.2]).unwrap();
        let output = LayerParams::new(vec![vec![1.0, -2.0], vec![0.3, 0.4]], vec![0.0, -0.5]).unwrap();
        let net = NetworkParams::new(hidden, output, None).unwrap();
        let target = full_kernel(&net, Evaluator::Naive).unwrap();
        let report = verify(&target, &net, Evaluator::Naive, RunTag::default()).unwrap();
        assert!(report.max_tv <= 1e-12);
        assert!(report.max_kl() <= 1e-12);
    }

    #[test]
    fn shape_mismatch() {
        let net = NetworkParams::zeros(1, 2, 2);
        let target = MarkovKernel::uniform(2, 2);
        assert!(matches!(
            verify(&target, &net, Evaluator::Naive, RunTag::default()),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn sweep_rejects_unordered() {
        let target = sample_kernel(1, 1, 0, 1e-3).unwrap();
        assert!(alpha_sweep(&target, &[10.0, 5.0], &SweepConfig::default()).is_err());
        assert!(alpha_sweep(&target, &[], &SweepConfig::default()).is_err());
    }

    #[test]
    fn singleton_sweep_equals_verify() {
        let target = sample_kernel(2, 2, 3, 1e-3).unwrap();
        let cfg = SweepConfig { seed: 3, ..Default::default() };
        let swept = alpha_sweep(&target, &[20.0], &cfg).unwrap();
        let net = compile_theorem1(&target, &ScalingConfig::with_alpha(20.0)).unwrap();
        let direct = verify(&target, &net, Evaluator::Naive, RunTag { seed: 3, alpha: 20.0 }).unwrap();
        assert_eq!(swept[0].per_input_tv, direct.per_input_tv);
        assert_eq!(swept[0].per_input_kl, direct.per_input_kl);
    }

    #[test]
    fn table_rows() {
        let table = tightness_table();
        assert_eq!(table.len(), 16);
        let find = |k, n| table.iter().find(|r| r.k == k && r.n == n).unwrap();
        assert!(find(1, 2).free_tight && find(1, 2).bounds.lower_free == 1);
        assert!(find(1, 3).free_tight && find(1, 3).bounds.lower_free == 3);
        let r = find(2, 3);
        assert_eq!((r.bounds.lower_free, r.bounds.upper_free), (5, Some(6)));
        assert!(!r.free_tight);
        assert!(tightness_csv(&table).lines().count() == 17);
    }
}
