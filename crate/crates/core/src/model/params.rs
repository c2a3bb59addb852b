//! Affine parameters of sigmoid layers and of a one-hidden-layer network.

use serde::{Deserialize, Serialize};

use super::state::BinaryState;
use crate::error::{Error, Result};

/// Weights (row-major, `outputs × inputs`) and bias of one sigmoid layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LayerParams {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Result<Self> {
        let outputs = bias.len();
        if weights.len() != outputs {
            return Err(Error::LengthMismatch {
                expected: outputs,
                found: weights.len(),
            });
        }
        let inputs = weights.first().map_or(0, Vec::len);
        if let Some(row) = weights.iter().find(|r| r.len() != inputs) {
            return Err(Error::LengthMismatch {
                expected: inputs,
                found: row.len(),
            });
        }
        Self::from_flat(inputs, outputs, weights.concat(), bias)
    }

    pub fn from_flat(inputs: usize, outputs: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if weights.len() != inputs * outputs {
            return Err(Error::LengthMismatch {
                expected: inputs * outputs,
                found: weights.len(),
            });
        }
        if bias.len() != outputs {
            return Err(Error::LengthMismatch {
                expected: outputs,
                found: bias.len(),
            });
        }
        if weights.iter().chain(&bias).any(|x| !x.is_finite()) {
            return Err(Error::Domain("layer parameters must be finite".into()));
        }
        Ok(Self {
            inputs,
            outputs,
            weights,
            bias,
        })
    }

    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weight(&self, out: usize, input: usize) -> f64 {
        self.weights[out * self.inputs + input]
    }

    pub fn weight_mut(&mut self, out: usize, input: usize) -> &mut f64 {
        &mut self.weights[out * self.inputs + input]
    }

    pub fn row(&self, out: usize) -> &[f64] {
        &self.weights[out * self.inputs..(out + 1) * self.inputs]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.outputs).map(|o| self.row(o).to_vec()).collect()
    }

    pub fn weights_flat(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_flat_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// `W y + b` for a binary input.
    pub fn preactivations(&self, y: &BinaryState) -> Result<Vec<f64>> {
        if y.width() != self.inputs {
            return Err(Error::LengthMismatch {
                expected: self.inputs,
                found: y.width(),
            });
        }
        Ok((0..self.outputs)
            .map(|o| {
                self.row(o)
                    .iter()
                    .zip(y.bits())
                    .filter(|(_, &b)| b == 1)
                    .fold(self.bias[o], |acc, (w, _)| acc + w)
            })
            .collect())
    }
}

/// Hidden units grouped into equal blocks, one per pair of inputs
/// `(2i, 2i + 1)`; input `y` activates block `⌊index(y) / 2⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMeta {
    pub block_size: usize,
    pub blocks: usize,
}

impl BlockMeta {
    pub fn for_inputs(k: usize, block_size: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidShape("paired blocks need at least one input unit".into()));
        }
        Ok(Self {
            block_size,
            blocks: 1 << (k - 1),
        })
    }

    pub fn active_block(&self, input_index: usize) -> usize {
        input_index / 2
    }

    /// Hidden-unit range owned by `block`.
    pub fn units(&self, block: usize) -> std::ops::Range<usize> {
        block * self.block_size..(block + 1) * self.block_size
    }
}

/// A `k → m → n` network of stochastic sigmoid units.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkParams {
    k: usize,
    m: usize,
    n: usize,
    hidden: LayerParams,
    output: LayerParams,
    block_meta: Option<BlockMeta>,
}

impl NetworkParams {
    pub fn new(hidden: LayerParams, output: LayerParams, block_meta: Option<BlockMeta>) -> Result<Self> {
        let (k, m, n) = (hidden.inputs(), hidden.outputs(), output.outputs());
        if output.inputs() != m {
            return Err(Error::InvalidShape(format!(
                "output layer reads {} units but the hidden layer has {m}",
                output.inputs()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidShape("network needs at least one output unit".into()));
        }
        if let Some(meta) = block_meta {
            if meta.block_size == 0 {
                return Err(Error::InvalidShape("blocks must hold at least one unit".into()));
            }
            if k == 0 || meta.blocks != 1 << (k - 1) || meta.blocks * meta.block_size != m {
                return Err(Error::InvalidShape(format!(
                    "block metadata {} x {} inconsistent with (k, m) = ({k}, {m})",
                    meta.blocks, meta.block_size
                )));
            }
        }
        Ok(Self {
            k,
            m,
            n,
            hidden,
            output,
            block_meta,
        })
    }

    /// All-zero parameters; every unit fires with probability ½.
    pub fn zeros(k: usize, m: usize, n: usize) -> Self {
        Self::new(LayerParams::zeros(k, m), LayerParams::zeros(m, n), None).expect("zero network")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.k, self.m, self.n)
    }

    pub fn hidden(&self) -> &LayerParams {
        &self.hidden
    }

    pub fn output(&self) -> &LayerParams {
        &self.output
    }

    pub fn hidden_mut(&mut self) -> &mut LayerParams {
        &mut self.hidden
    }

    pub fn output_mut(&mut self) -> &mut LayerParams {
        &mut self.output
    }

    pub fn block_meta(&self) -> Option<BlockMeta> {
        self.block_meta
    }

    pub fn without_block_meta(mut self) -> Self {
        self.block_meta = None;
        self
    }

    pub fn num_params(&self) -> usize {
        self.m * (self.k + 1) + self.n * (self.m + 1)
    }

    /// Parameters in a fixed order: hidden weights, hidden bias, output
    /// weights, output bias.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_params());
        v.extend_from_slice(self.hidden.weights_flat());
        v.extend_from_slice(self.hidden.bias());
        v.extend_from_slice(self.output.weights_flat());
        v.extend_from_slice(self.output.bias());
        v
    }

    /// Inverse of [`NetworkParams::to_flat`] for this network's shape.
    pub fn with_flat(&self, flat: &[f64]) -> Result<Self> {
        if flat.len() != self.num_params() {
            return Err(Error::LengthMismatch {
                expected: self.num_params(),
                found: flat.len(),
            });
        }
        let (k, m, n) = self.shape();
        let (hw, rest) = flat.split_at(m * k);
        let (hb, rest) = rest.split_at(m);
        let (ow, ob) = rest.split_at(n * m);
        Self::new(
            LayerParams::from_flat(k, m, hw.to_vec(), hb.to_vec())?,
            LayerParams::from_flat(m, n, ow.to_vec(), ob.to_vec())?,
            self.block_meta,
        )
    }
}
