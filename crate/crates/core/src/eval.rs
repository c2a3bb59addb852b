//! Exact evaluation of layer and network kernels.
//!
//! The naive path marginalizes over all `2^m` hidden states and is the
//! ground truth, leakage included. The blockwise path enumerates only the
//! block selected by the input and pins every other hidden unit to zero,
//! which is the idealization the paired-block compilers aim for.
//!
//! Both walk hidden states with suffix partial products: level `j` holds
//! the mass and output pre-activation contributed by bits `j..w`, so moving
//! to the next state only recomputes the levels below the highest changed
//! bit (amortized `O(1)` levels per state in counting or Gray order). The
//! value attached to a given state does not depend on the walk order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    sigmoid, BinaryState, DistVec, LayerParams, MarkovKernel, NetworkParams, PairwiseAccumulator,
    ProductDist,
};

pub use crate::model::BlockMeta;

/// Largest hidden layer the naive evaluator will enumerate.
pub const DEFAULT_ENUMERATION_CAP: usize = 22;

/// Tolerance on the mass of an evaluated row.
pub const ROW_SUM_TOL: f64 = 1e-10;

/// Order in which hidden states are visited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StateOrder {
    #[default]
    Counting,
    Gray,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub cap: usize,
    pub order: StateOrder,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            order: StateOrder::Counting,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Evaluator {
    #[default]
    Naive,
    Blockwise,
}

impl std::str::FromStr for Evaluator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "blockwise" => Ok(Self::Blockwise),
            other => Err(Error::Domain(format!("unknown evaluator `{other}`"))),
        }
    }
}

/// Output law of one layer: unit `j` fires with probability `σ(v_j·y + c_j)`.
pub fn layer_row(layer: &LayerParams, y: &BinaryState) -> Result<ProductDist> {
    Ok(ProductDist::from_logits(&layer.preactivations(y)?))
}

pub fn product_mass(pd: &ProductDist, z: &BinaryState) -> Result<f64> {
    pd.mass(z)
}

pub fn compose_row_naive(net: &NetworkParams, y: &BinaryState) -> Result<DistVec> {
    compose_row_naive_with(net, y, EvalOptions::default())
}

/// `P(x|y) = Σ_z Q(z|y) R(x|z)` over every hidden state.
pub fn compose_row_naive_with(net: &NetworkParams, y: &BinaryState, opts: EvalOptions) -> Result<DistVec> {
    if net.m() > opts.cap {
        return Err(Error::Capacity { m: net.m(), cap: opts.cap });
    }
    let hidden = layer_row(net.hidden(), y)?;
    let mass = marginalize(&hidden, 0, net.output(), opts.order);
    finish_row(mass, y.index())
}

/// Idealized row: only the block selected by `y` is enumerated and every
/// other hidden unit is treated as exactly zero.
pub fn compose_row_blockwise(net: &NetworkParams, y: &BinaryState) -> Result<DistVec> {
    compose_row_blockwise_with(net, y, StateOrder::Counting)
}

pub fn compose_row_blockwise_with(net: &NetworkParams, y: &BinaryState, order: StateOrder) -> Result<DistVec> {
    let meta = net.block_meta().ok_or(Error::MissingBlockMeta)?;
    if meta.block_size == 0 {
        return Err(Error::InvalidShape("block of zero hidden units".into()));
    }
    if meta.block_size > DEFAULT_ENUMERATION_CAP {
        return Err(Error::Capacity {
            m: meta.block_size,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let pre = net.hidden().preactivations(y)?;
    let units = meta.units(meta.active_block(y.index()));
    let block = ProductDist::from_logits(&pre[units.clone()]);
    let mass = marginalize(&block, units.start, net.output(), order);
    finish_row(mass, y.index())
}

/// Every row of the realized kernel, row `y` at index `index(y)`.
pub fn full_kernel(net: &NetworkParams, evaluator: Evaluator) -> Result<MarkovKernel> {
    full_kernel_with(net, evaluator, EvalOptions::default())
}

pub fn full_kernel_with(net: &NetworkParams, evaluator: Evaluator, opts: EvalOptions) -> Result<MarkovKernel> {
    let k = net.k();
    let rows = (0..1usize << k)
        .into_par_iter()
        .map(|i| {
            let y = BinaryState::from_index(i, k)?;
            match evaluator {
                Evaluator::Naive => compose_row_naive_with(net, &y, opts),
                Evaluator::Blockwise => compose_row_blockwise_with(net, &y, opts.order),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    MarkovKernel::new(rows)
}

fn finish_row(mass: Vec<f64>, row: usize) -> Result<DistVec> {
    let sum = crate::model::pairwise_sum(&mass);
    DistVec::with_tolerance(mass, ROW_SUM_TOL).map_err(|_| Error::Normalization { row, sum })
}

/// Marginal output law when `hidden` drives output-layer columns
/// `offset..offset + hidden.width()` and all other columns read zero.
pub(crate) fn marginalize(hidden: &ProductDist, offset: usize, output: &LayerParams, order: StateOrder) -> Vec<f64> {
    let w = hidden.width();
    let n = output.outputs();
    let columns: Vec<f64> = (0..w)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| output.weight(i, offset + j))
        .collect();
    let mut mass_level = vec![1.0; w + 1];
    let mut pre_level = vec![0.0; (w + 1) * n];
    pre_level[w * n..].copy_from_slice(output.bias());

    let mut acc = PairwiseAccumulator::new(1 << n);
    let mut out_law = vec![0.0; 1 << n];
    let mut prev = 0usize;
    for g in 0..1usize << w {
        let z = match order {
            StateOrder::Counting => g,
            StateOrder::Gray => g ^ (g >> 1),
        };
        let top = if g == 0 {
            w
        } else {
            (usize::BITS - (z ^ prev).leading_zeros()) as usize
        };
        prev = z;
        for j in (0..top).rev() {
            let on = z >> j & 1 == 1;
            mass_level[j] = mass_level[j + 1] * if on { hidden.on(j) } else { hidden.off(j) };
            let (lower, upper) = pre_level.split_at_mut((j + 1) * n);
            let here = &mut lower[j * n..];
            let above = &upper[..n];
            if on {
                let col = &columns[j * n..(j + 1) * n];
                for ((h, a), c) in here.iter_mut().zip(above).zip(col) {
                    *h = a + c;
                }
            } else {
                here.copy_from_slice(above);
            }
        }
        let q = mass_level[0];
        if q == 0.0 {
            continue;
        }
        output_law(&pre_level[..n], &mut out_law);
        acc.push_scaled(q, &out_law);
    }
    acc.finish()
}

/// Product law of `n` sigmoid units with the given pre-activations, written
/// LSB-first into `out` (length `2^n`).
pub(crate) fn output_law(pre: &[f64], out: &mut [f64]) {
    out[0] = 1.0;
    for (i, &a) in pre.iter().enumerate() {
        let (on, off) = (sigmoid(a), sigmoid(-a));
        let half = 1usize << i;
        for x in 0..half {
            let base = out[x];
            out[x + half] = base * on;
            out[x] = base * off;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(bits: &[u8]) -> BinaryState {
        BinaryState::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn zero_layer_is_uniform() {
        let row = layer_row(&LayerParams::zeros(3, 4), &state(&[1, 0, 1])).unwrap();
        assert!(row.on_probs().iter().all(|&p| p == 0.5));
        assert!(layer_row(&LayerParams::zeros(3, 4), &state(&[1, 0])).is_err());
    }

    #[test]
    fn zero_network_rows_uniform() {
        let net = NetworkParams::zeros(1, 1, 1);
        let kernel = full_kernel(&net, Evaluator::Naive).unwrap();
        for row in kernel.rows() {
            assert_eq!(row.mass(), &[0.5, 0.5]);
        }
        let kernel = full_kernel(&NetworkParams::zeros(2, 3, 2), Evaluator::Naive).unwrap();
        for row in kernel.rows() {
            assert!(row.mass().iter().all(|&p| (p - 0.25).abs() < 1e-16));
        }
    }

    #[test]
    fn mixture_identity_single_hidden_unit() {
        let hidden = LayerParams::new(vec![vec![1.3]], vec![-0.4]).unwrap();
        let output = LayerParams::new(vec![vec![2.0], vec![-1.5]], vec![0.3, 0.7]).unwrap();
        let net = NetworkParams::new(hidden, output.clone(), None).unwrap();
        for yi in 0..2 {
            let y = BinaryState::from_index(yi, 1).unwrap();
            let q = sigmoid(1.3 * yi as f64 - 0.4);
            let r0 = layer_row(&output, &state(&[0])).unwrap();
            let r1 = layer_row(&output, &state(&[1])).unwrap();
            let row = compose_row_naive(&net, &y).unwrap();
            for x in BinaryState::iter_all(2) {
                let expected = (1.0 - q) * r0.mass(&x).unwrap() + q * r1.mass(&x).unwrap();
                assert!((row.at(&x) - expected).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn capacity_error_past_cap() {
        let net = NetworkParams::zeros(1, 5, 1);
        let opts = EvalOptions { cap: 4, ..Default::default() };
        assert!(matches!(
            compose_row_naive_with(&net, &state(&[0]), opts),
            Err(Error::Capacity { m: 5, cap: 4 })
        ));
    }

    #[test]
    fn blockwise_requires_meta() {
        let net = NetworkParams::zeros(1, 2, 1);
        assert!(matches!(
            compose_row_blockwise(&net, &state(&[0])),
            Err(Error::MissingBlockMeta)
        ));
    }

    #[test]
    fn gray_and_counting_orders_agree() {
        let hidden = LayerParams::new(
            (0..9).map(|j| vec![0.3 * j as f64 - 1.0, 0.7 - 0.2 * j as f64]).collect(),
            (0..9).map(|j| 0.1 * j as f64 - 0.4).collect(),
        )
        .unwrap();
        let output = LayerParams::new(
            (0..3).map(|i| (0..9).map(|j| ((i * 9 + j) as f64).sin()).collect()).collect(),
            vec![0.2, -0.1, 0.4],
        )
        .unwrap();
        let net = NetworkParams::new(hidden, output, None).unwrap();
        for yi in 0..4 {
            let y = BinaryState::from_index(yi, 2).unwrap();
            let a = compose_row_naive(&net, &y).unwrap();
            let b = compose_row_naive_with(&net, &y, EvalOptions { order: StateOrder::Gray, ..Default::default() }).unwrap();
            for (p, q) in a.mass().iter().zip(b.mass()) {
                assert!((p - q).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn output_law_matches_product_mass() {
        let pre = [0.3, -1.2, 2.0];
        let mut law = vec![0.0; 8];
        output_law(&pre, &mut law);
        let pd = ProductDist::from_logits(&pre);
        for x in BinaryState::iter_all(3) {
            assert!((law[x.index()] - pd.mass(&x).unwrap()).abs() < 1e-16);
        }
    }
}
