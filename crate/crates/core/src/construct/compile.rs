//! End-to-end compilers from a target kernel (or distribution) to network
//! weights.

use serde::Serialize;

use super::chain::{invert_chain, pair_sums};
use super::edge::first_layer;
use super::mu::{solve_mu, solve_mu_block, MuParams, RatioTarget};
use super::orthant::{fixed_output_layer, tiled_orthant_layer};
use super::ScalingConfig;
use crate::error::{Error, Result};
use crate::model::{
    highest_set_index, log_odds, sigmoid, DistVec, LayerParams, MarkovKernel, NetworkParams,
    PairwiseAccumulator, ProductDist,
};

/// Fixed-output-layer compile: `m = 2^(k−1) (2^n − 1)`.
///
/// Each clamped row is inverted into a product law on its block; the output
/// layer is the block-repeated orthant map and does not depend on the target.
pub fn compile_theorem1(target: &MarkovKernel, cfg: &ScalingConfig) -> Result<NetworkParams> {
    let (k, n) = (target.k(), target.n());
    if k == 0 || n == 0 {
        return Err(Error::InvalidShape(format!("need k >= 1 and n >= 1, got ({k}, {n})")));
    }
    cfg.validate(n)?;
    let clamped = target.clamp_to_interior(cfg.eta)?;
    let per_input = clamped
        .rows()
        .iter()
        .map(|row| invert_chain(row.mass()))
        .collect::<Result<Vec<_>>>()?;
    let (hidden, meta) = first_layer(&per_input, k, cfg)?;
    let output = fixed_output_layer(k, n, cfg)?;
    NetworkParams::new(hidden, output, Some(meta))
}

/// Per-input gap between the `alpha → ∞` limit of a trainable-output compile
/// and its (clamped) target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    /// TV between the limit row and the clamped target row, by input index.
    pub per_input: Vec<f64>,
    pub max: f64,
    /// TV moved by clamping the target, by input index.
    pub clamp_shift: Vec<f64>,
}

/// Trainable-output compile: `m = 2^(k−1) (2^(n−1) − 1)`.
///
/// The hidden block of each input pair reproduces the pair sums
/// `K(2l|y) + K(2l+1|y)` of both inputs exactly. The first output unit
/// carries `μ`: `μ_0` is fitted to input 0 and each block's weights to the
/// even input of its pair. Odd inputs, and the `l = 0` odds of inputs
/// outside block 0, inherit those shared values; the report measures what
/// that costs.
pub fn compile_theorem2(target: &MarkovKernel, cfg: &ScalingConfig) -> Result<(NetworkParams, ResidualReport)> {
    let (k, n) = (target.k(), target.n());
    if k == 0 || n < 2 {
        return Err(Error::InvalidShape(format!("need k >= 1 and n >= 2, got ({k}, {n})")));
    }
    cfg.validate(n)?;
    let clamped = target.clamp_to_interior(cfg.eta)?;
    let per_input = clamped
        .rows()
        .iter()
        .map(|row| invert_chain(&pair_sums(row.mass())))
        .collect::<Result<Vec<_>>>()?;
    let (hidden, meta) = first_layer(&per_input, k, cfg)?;

    let first = RatioTarget::from_distribution(clamped.row(0).mass())?;
    let mu0 = -first.odds()[0].ln();
    let blocks = (0..meta.blocks)
        .map(|i| {
            let odds = RatioTarget::from_distribution(clamped.row(2 * i).mass())?;
            solve_mu_block(&per_input[2 * i], &odds.odds()[1..], mu0, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = MuParams { mu0, blocks };
    let output = trainable_output_layer(&mu, n, meta.blocks, cfg.alpha)?;
    let net = NetworkParams::new(hidden, output, Some(meta))?;

    let limit = idealized_trainable_kernel(&per_input, &mu, n)?;
    let per_input_tv = limit.row_tv(&clamped)?;
    let report = ResidualReport {
        k,
        n,
        m: net.m(),
        max: per_input_tv.iter().copied().fold(0.0, f64::max),
        per_input: per_input_tv,
        clamp_shift: clamped.row_tv(target)?,
    };
    Ok((net, report))
}

/// Row 0 is the `μ` row; rows `1..n` are `alpha` times the tiled orthant map
/// of width `n − 1`.
fn trainable_output_layer(mu: &MuParams, n: usize, blocks: usize, alpha: f64) -> Result<LayerParams> {
    let orthant = tiled_orthant_layer(n - 1, blocks, alpha)?;
    let mut rows = vec![mu.blocks.concat()];
    rows.extend(orthant.rows());
    let mut bias = vec![mu.mu0];
    bias.extend_from_slice(orthant.bias());
    LayerParams::new(rows, bias)
}

/// The `alpha → ∞` limit of a trainable-output compile: input `y` draws
/// its block state from `per_input[y]` and splits each state's mass between
/// `2 l(z)` and `2 l(z) + 1` by `λ_z`.
pub fn idealized_trainable_kernel(per_input: &[ProductDist], mu: &MuParams, n: usize) -> Result<MarkovKernel> {
    let rows = per_input
        .iter()
        .enumerate()
        .map(|(y, p)| {
            let block = &mu.blocks[y / 2];
            let width = p.width();
            if block.len() != width || 2 * (width + 1) != 1 << n {
                return Err(Error::InvalidShape(format!(
                    "block of width {width} cannot drive {n} outputs"
                )));
            }
            let mut acc = PairwiseAccumulator::new(1 << n);
            let mut term = vec![0.0; 1 << n];
            for z in 0..1usize << width {
                let a = (0..width)
                    .filter(|j| z >> j & 1 == 1)
                    .fold(mu.mu0, |acc, j| acc + block[j]);
                let l = highest_set_index(z);
                term[2 * l] = sigmoid(-a);
                term[2 * l + 1] = sigmoid(a);
                acc.push_scaled(p.mass_of_index(z), &term);
                term[2 * l] = 0.0;
                term[2 * l + 1] = 0.0;
            }
            DistVec::with_tolerance(acc.finish(), 1e-10)
        })
        .collect::<Result<Vec<_>>>()?;
    MarkovKernel::new(rows)
}

/// Second-layer regime for an input-free network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Output layer is the fixed orthant map; `m = 2^n − 1`.
    Fixed,
    /// Output layer carries a solved `μ` row; `m = 2^(n−1) − 1`.
    Trainable,
}

/// Network with no input units whose output law approximates `q`.
pub fn compile_distribution(q: &DistVec, variant: Variant, cfg: &ScalingConfig) -> Result<NetworkParams> {
    let n = q.n();
    cfg.validate(n)?;
    let clamped = q.clamp_to_interior(cfg.eta)?;
    let (hidden_law, output) = match variant {
        Variant::Fixed => {
            let p = invert_chain(clamped.mass())?;
            (p, tiled_orthant_layer(n, 1, cfg.alpha)?)
        }
        Variant::Trainable => {
            if n < 2 {
                return Err(Error::InvalidShape("the trainable variant needs n >= 2".into()));
            }
            let p = invert_chain(&pair_sums(clamped.mass()))?;
            let mu = solve_mu(&p, &RatioTarget::from_distribution(clamped.mass())?, cfg)?;
            (p, trainable_output_layer(&mu, n, 1, cfg.alpha)?)
        }
    };
    let bias = (0..hidden_law.width())
        .map(|j| log_odds(hidden_law.on(j), hidden_law.off(j)))
        .collect::<Vec<_>>();
    let hidden = LayerParams::from_flat(0, bias.len(), Vec::new(), bias)?;
    NetworkParams::new(hidden, output, None)
}
