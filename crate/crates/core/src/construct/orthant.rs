//! The affine map sending `{z : l(z) = l}` to the `l`-th orthant, and the
//! fixed second layer built from it.

use super::ScalingConfig;
use crate::error::{Error, Result};
use crate::model::LayerParams;

/// Widest output layer whose orthant weights fit exactly in `i128`.
pub const MAX_ORTHANT_WIDTH: usize = 6;

/// Integer weights `W` (`n × (2^n − 1)`) and bias `b = −1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthantMap {
    pub weights: Vec<Vec<i128>>,
    pub bias: Vec<i128>,
}

impl OrthantMap {
    pub fn n(&self) -> usize {
        self.bias.len()
    }

    pub fn columns(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    /// `W z + b` for the configuration with LSB-first index `z`.
    pub fn apply(&self, z: usize) -> Vec<i128> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, &b)| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| z >> j & 1 == 1)
                    .fold(b, |acc, (_, &w)| acc + w)
            })
            .collect()
    }
}

/// Column `l` (1-based) is `2^(l+1) (bin_n(l) − ½)`, i.e. `±2^l` with the
/// sign pattern of `l`'s bits.
pub fn orthant_weights(n: usize) -> Result<OrthantMap> {
    if n == 0 || n > MAX_ORTHANT_WIDTH {
        return Err(Error::InvalidShape(format!(
            "orthant map width {n} outside 1..={MAX_ORTHANT_WIDTH}"
        )));
    }
    let columns = (1usize << n) - 1;
    let weights = (0..n)
        .map(|i| {
            (1..=columns)
                .map(|l| {
                    let magnitude = 1i128 << l;
                    if l >> i & 1 == 1 {
                        magnitude
                    } else {
                        -magnitude
                    }
                })
                .collect()
        })
        .collect();
    Ok(OrthantMap {
        weights,
        bias: vec![-1; n],
    })
}

/// `alpha [W | … | W]` with `2^(k−1)` copies of the orthant map, bias `−alpha`.
pub fn fixed_output_layer(k: usize, n: usize, cfg: &ScalingConfig) -> Result<LayerParams> {
    if k == 0 {
        return Err(Error::InvalidShape("the block-repeated output layer needs k >= 1".into()));
    }
    tiled_orthant_layer(n, 1 << (k - 1), cfg.alpha)
}

pub(crate) fn tiled_orthant_layer(n: usize, blocks: usize, alpha: f64) -> Result<LayerParams> {
    let map = orthant_weights(n)?;
    let rows = map
        .weights
        .iter()
        .map(|row| {
            let scaled: Vec<f64> = row.iter().map(|&w| alpha * w as f64).collect();
            scaled.repeat(blocks)
        })
        .collect();
    LayerParams::new(rows, vec![-alpha; n])
}
