//! Exact-gradient fitting of network parameters to a target kernel.
//!
//! The objective is the mean cross-entropy
//! `−2^−k Σ_y Σ_x T(x|y) ln P(x|y)`, evaluated by enumerating every hidden
//! state. Its gradient comes from the same enumeration: with
//! `g(x) = T(x|y) / P(x|y)`,
//!
//! ```text
//! ∂/∂a_j = −Σ_z Q(z|y) (z_j − σ(a_j)) Σ_x g(x) R(x|z)
//! ∂/∂o_i = −Σ_z Q(z|y) Σ_x g(x) R(x|z) (x_i − σ(o_i(z)))
//! ```
//!
//! for hidden pre-activations `a` and output pre-activations `o(z)`.
//!
//! Descent is plain gradient steps with backtracking halving, accepting a
//! step only if it lowers the objective, so every trace is non-increasing.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{marginalize, output_law, StateOrder, DEFAULT_ENUMERATION_CAP};
use crate::harness::CounterRng;
use crate::model::{pairwise_sum, BinaryState, LayerParams, MarkovKernel, NetworkParams, ProductDist};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub initial_step: f64,
    /// Step multiplier after an accepted step.
    pub growth: f64,
    /// Descent stops once backtracking shrinks the step below this.
    pub min_step: f64,
    pub iterations: usize,
    pub restarts: usize,
    /// Initial weights and biases are uniform in `[−init_scale, init_scale]`.
    pub init_scale: f64,
    pub seed: u64,
    pub cap: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            growth: 1.2,
            min_step: 1e-14,
            iterations: 5000,
            restarts: 5,
            init_scale: 0.5,
            seed: 0,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        let positive = [self.initial_step, self.growth, self.min_step, self.init_scale];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) || self.restarts == 0 {
            return Err(Error::Domain("fit step sizes, scale and restarts must be positive".into()));
        }
        Ok(())
    }
}

/// Gradient with the same layout as the network's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkGradient {
    pub hidden: LayerParams,
    pub output: LayerParams,
}

impl NetworkGradient {
    /// Same order as [`NetworkParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::new();
        v.extend_from_slice(self.hidden.weights_flat());
        v.extend_from_slice(self.hidden.bias());
        v.extend_from_slice(self.output.weights_flat());
        v.extend_from_slice(self.output.bias());
        v
    }

    pub fn norm(&self) -> f64 {
        self.to_flat().iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub params: NetworkParams,
    /// Objective after each iteration, starting with the initial value.
    pub trace: Vec<f64>,
    pub objective: f64,
    pub restart: usize,
}

fn check(net: &NetworkParams, target: &MarkovKernel, cap: usize) -> Result<()> {
    if net.k() != target.k() || net.n() != target.n() {
        return Err(Error::InvalidShape(format!(
            "network (k, n) = ({}, {}) but target is ({}, {})",
            net.k(),
            net.n(),
            target.k(),
            target.n()
        )));
    }
    if net.m() > cap {
        return Err(Error::Capacity { m: net.m(), cap });
    }
    Ok(())
}

/// `−2^−k Σ_y Σ_x T ln T`, the smallest value [`objective`] can take.
pub fn conditional_entropy(target: &MarkovKernel) -> f64 {
    let per_row: Vec<f64> = target
        .rows()
        .iter()
        .map(|row| {
            let terms: Vec<f64> = row.mass().iter().filter(|&&t| t > 0.0).map(|&t| -t * t.ln()).collect();
            pairwise_sum(&terms)
        })
        .collect();
    pairwise_sum(&per_row) / per_row.len() as f64
}

pub fn objective(net: &NetworkParams, target: &MarkovKernel) -> Result<f64> {
    check(net, target, DEFAULT_ENUMERATION_CAP)?;
    Ok(objective_unchecked(net, target))
}

fn objective_unchecked(net: &NetworkParams, target: &MarkovKernel) -> f64 {
    let k = net.k();
    let per_row: Vec<f64> = (0..1usize << k)
        .into_par_iter()
        .map(|y| {
            let realized = realized_row(net, y);
            cross_entropy(target.row(y).mass(), &realized)
        })
        .collect();
    pairwise_sum(&per_row) / per_row.len() as f64
}

fn realized_row(net: &NetworkParams, y: usize) -> Vec<f64> {
    let state = BinaryState::from_index(y, net.k()).expect("row index in range");
    let pre = net.hidden().preactivations(&state).expect("width checked");
    marginalize(&ProductDist::from_logits(&pre), 0, net.output(), StateOrder::Counting)
}

fn cross_entropy(target: &[f64], realized: &[f64]) -> f64 {
    let terms: Vec<f64> = target
        .iter()
        .zip(realized)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, &p)| -t * p.ln())
        .collect();
    pairwise_sum(&terms)
}

pub fn gradient(net: &NetworkParams, target: &MarkovKernel) -> Result<NetworkGradient> {
    objective_and_gradient(net, target).map(|(_, g)| g)
}

pub fn objective_and_gradient(net: &NetworkParams, target: &MarkovKernel) -> Result<(f64, NetworkGradient)> {
    check(net, target, DEFAULT_ENUMERATION_CAP)?;
    let (k, m, n) = net.shape();
    let rows: Vec<RowGradient> = (0..1usize << k)
        .into_par_iter()
        .map(|y| row_gradient(net, target.row(y).mass(), y))
        .collect();

    let scale = -1.0 / rows.len() as f64;
    let mut hidden = LayerParams::zeros(k, m);
    let mut output = LayerParams::zeros(m, n);
    let mut values = Vec::with_capacity(rows.len());
    for (y, row) in rows.iter().enumerate() {
        values.push(row.cross_entropy);
        for j in 0..m {
            let ga = scale * row.hidden[j];
            hidden.bias_mut()[j] += ga;
            for t in 0..k {
                if y >> t & 1 == 1 {
                    *hidden.weight_mut(j, t) += ga;
                }
            }
        }
        for i in 0..n {
            output.bias_mut()[i] += scale * row.output_bias[i];
            for j in 0..m {
                *output.weight_mut(i, j) += scale * row.output_weights[i * m + j];
            }
        }
    }
    let value = pairwise_sum(&values) / values.len() as f64;
    Ok((value, NetworkGradient { hidden, output }))
}

struct RowGradient {
    cross_entropy: f64,
    /// `Σ_x g(x) ∂P(x|y)/∂a_j`
    hidden: Vec<f64>,
    output_weights: Vec<f64>,
    output_bias: Vec<f64>,
}

fn row_gradient(net: &NetworkParams, target: &[f64], y: usize) -> RowGradient {
    let (_, m, n) = net.shape();
    let state = BinaryState::from_index(y, net.k()).expect("row index in range");
    let hidden_law = ProductDist::from_logits(&net.hidden().preactivations(&state).expect("width checked"));
    let realized = marginalize(&hidden_law, 0, net.output(), StateOrder::Counting);
    let weight: Vec<f64> = target
        .iter()
        .zip(&realized)
        .map(|(&t, &p)| if t > 0.0 { t / p } else { 0.0 })
        .collect();

    let out = net.output();
    let mut grad_hidden = vec![0.0; m];
    let mut grad_w = vec![0.0; n * m];
    let mut grad_b = vec![0.0; n];
    let mut law = vec![0.0; 1 << n];
    let mut pre = vec![0.0; n];
    let mut t = vec![0.0; n];
    for z in 0..1usize << m {
        let mut q = 1.0;
        pre.copy_from_slice(out.bias());
        for j in 0..m {
            if z >> j & 1 == 1 {
                q *= hidden_law.on(j);
                for (i, p) in pre.iter_mut().enumerate() {
                    *p += out.weight(i, j);
                }
            } else {
                q *= hidden_law.off(j);
            }
        }
        if q == 0.0 {
            continue;
        }
        output_law(&pre, &mut law);
        let mut s = 0.0;
        t.iter_mut().for_each(|v| *v = 0.0);
        for (x, (&g, &r)) in weight.iter().zip(&law).enumerate() {
            if g == 0.0 {
                continue;
            }
            let gr = g * r;
            s += gr;
            for (i, ti) in t.iter_mut().enumerate() {
                // x_i − σ(o_i), using the complementary sigmoid directly
                let centered = if x >> i & 1 == 1 {
                    crate::model::sigmoid(-pre[i])
                } else {
                    -crate::model::sigmoid(pre[i])
                };
                *ti += gr * centered;
            }
        }
        for (j, g) in grad_hidden.iter_mut().enumerate() {
            let centered = if z >> j & 1 == 1 { hidden_law.off(j) } else { -hidden_law.on(j) };
            *g += q * s * centered;
        }
        for i in 0..n {
            grad_b[i] += q * t[i];
            for j in 0..m {
                if z >> j & 1 == 1 {
                    grad_w[i * m + j] += q * t[i];
                }
            }
        }
    }
    RowGradient {
        cross_entropy: cross_entropy(target, &realized),
        hidden: grad_hidden,
        output_weights: grad_w,
        output_bias: grad_b,
    }
}

/// Best-of-restarts descent from random initializations.
pub fn fit(target: &MarkovKernel, m: usize, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let (k, n) = (target.k(), target.n());
    if m == 0 {
        return Err(Error::InvalidShape("fit needs at least one hidden unit".into()));
    }
    if m > cfg.cap {
        return Err(Error::Capacity { m, cap: cfg.cap });
    }
    let template = NetworkParams::zeros(k, m, n);
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = CounterRng::new(cfg.seed, restart as u64);
            let init: Vec<f64> = (0..template.num_params())
                .map(|_| rng.uniform_range(-cfg.init_scale, cfg.init_scale))
                .collect();
            descend(template.with_flat(&init)?, target, cfg, restart)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, run| if run.objective < best.objective { run } else { best })
        .expect("at least one restart"))
}

/// Descends from `start`; the result never has a higher objective.
pub fn refine(start: &NetworkParams, target: &MarkovKernel, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    check(start, target, cfg.cap)?;
    descend(start.clone(), target, cfg, 0)
}

fn descend(start: NetworkParams, target: &MarkovKernel, cfg: &FitConfig, restart: usize) -> Result<FitResult> {
    check(&start, target, cfg.cap)?;
    let mut params = start;
    let (mut value, mut grad) = objective_and_gradient(&params, target)?;
    let mut trace = vec![value];
    let mut step = cfg.initial_step;
    'outer: for _ in 0..cfg.iterations {
        let theta = params.to_flat();
        let g = grad.to_flat();
        loop {
            let candidate: Vec<f64> = theta.iter().zip(&g).map(|(t, d)| t - step * d).collect();
            if let Ok(next) = params.with_flat(&candidate) {
                let next_value = objective_unchecked(&next, target);
                if next_value < value {
                    params = next;
                    (value, grad) = objective_and_gradient(&params, target)?;
                    step *= cfg.growth;
                    break;
                }
            }
            step *= 0.5;
            if step < cfg.min_step {
                break 'outer;
            }
        }
        trace.push(value);
    }
    Ok(FitResult {
        params,
        trace,
        objective: value,
        restart,
    })
}
