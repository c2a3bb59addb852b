//! Edge units and the paired-block first layer.

use super::ScalingConfig;
use crate::error::{Error, Result};
use crate::model::{log_odds, BinaryState, BlockMeta, LayerParams, ProductDist};

/// Relative slack on the probability floor, absorbing rounding in targets
/// that were clamped and then transformed.
const FLOOR_SLACK: f64 = 1e-9;

/// One hidden unit serving the input pair `(2 pair, 2 pair + 1)`, which
/// differ only in their least significant bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeSpec {
    pub pair: usize,
    /// Probability of firing on input `2 pair`.
    pub q_even: f64,
    /// Probability of firing on input `2 pair + 1`.
    pub q_odd: f64,
}

fn target_log_odds(on: f64, off: f64, eta: f64) -> Result<f64> {
    let floor = eta * (1.0 - FLOOR_SLACK);
    if !(on.is_finite() && off.is_finite() && on >= floor && off >= floor) {
        return Err(Error::Domain(format!(
            "edge target {on} outside [eta, 1 - eta] for probability floor eta = {eta}"
        )));
    }
    Ok(log_odds(on, off))
}

/// Weights and bias of a unit that fires with `q_even` / `q_odd` on its
/// pair and is suppressed by at least `2 alpha - |s'| - |s'' - s'|` in
/// pre-activation on every other input.
///
/// The supporting hyperplane of the edge is `Σ_{i≠1} 2(2y'_i − 1) y_i − 2·#{i≠1 : y'_i = 1}`,
/// which is zero on the pair and at most −2 elsewhere.
pub fn edge_unit(spec: &EdgeSpec, k: usize, cfg: &ScalingConfig) -> Result<(Vec<f64>, f64)> {
    if k == 0 || spec.pair >= 1 << (k - 1) {
        return Err(Error::IndexOutOfRange {
            index: spec.pair,
            width: k.saturating_sub(1),
        });
    }
    let s_even = target_log_odds(spec.q_even, 1.0 - spec.q_even, cfg.eta)?;
    let s_odd = target_log_odds(spec.q_odd, 1.0 - spec.q_odd, cfg.eta)?;
    Ok(edge_unit_from_log_odds(spec.pair, k, s_even, s_odd, cfg.alpha))
}

fn edge_unit_from_log_odds(pair: usize, k: usize, s_even: f64, s_odd: f64, alpha: f64) -> (Vec<f64>, f64) {
    let y_even = BinaryState::from_index(2 * pair, k).expect("pair index checked");
    let mut v = vec![0.0; k];
    let mut ones = 0.0;
    for (i, vi) in v.iter_mut().enumerate().skip(1) {
        let bit = y_even.bit(i);
        *vi = alpha * if bit { 2.0 } else { -2.0 };
        if bit {
            ones += 1.0;
        }
    }
    v[0] = s_odd - s_even;
    (v, alpha * (-2.0 * ones) + s_even)
}

/// Hidden layer in which block `i` reproduces `per_input[2i]` on input `2i`
/// and `per_input[2i + 1]` on input `2i + 1`, and stays silent otherwise.
pub fn first_layer(per_input: &[ProductDist], k: usize, cfg: &ScalingConfig) -> Result<(LayerParams, BlockMeta)> {
    if k == 0 {
        return Err(Error::InvalidShape("the paired first layer needs k >= 1".into()));
    }
    if per_input.len() != 1 << k {
        return Err(Error::LengthMismatch {
            expected: 1 << k,
            found: per_input.len(),
        });
    }
    let block_size = per_input[0].width();
    if block_size == 0 {
        return Err(Error::InvalidShape("blocks must hold at least one unit".into()));
    }
    let meta = BlockMeta::for_inputs(k, block_size)?;
    let mut weights = Vec::with_capacity(meta.blocks * block_size * k);
    let mut bias = Vec::with_capacity(meta.blocks * block_size);
    for pair in 0..meta.blocks {
        let (even, odd) = (&per_input[2 * pair], &per_input[2 * pair + 1]);
        for p in [even, odd] {
            if p.width() != block_size {
                return Err(Error::LengthMismatch {
                    expected: block_size,
                    found: p.width(),
                });
            }
        }
        for j in 0..block_size {
            let s_even = target_log_odds(even.on(j), even.off(j), cfg.eta)?;
            let s_odd = target_log_odds(odd.on(j), odd.off(j), cfg.eta)?;
            let (v, c) = edge_unit_from_log_odds(pair, k, s_even, s_odd, cfg.alpha);
            weights.extend(v);
            bias.push(c);
        }
    }
    let layer = LayerParams::from_flat(k, meta.blocks * block_size, weights, bias)?;
    Ok((layer, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::layer_row;
    use crate::model::{logit, sigmoid};

    fn cfg() -> ScalingConfig {
        ScalingConfig::with_alpha(40.0)
    }

    #[test]
    fn uniform_pair_weights() {
        let spec = EdgeSpec { pair: 0, q_even: 0.5, q_odd: 0.5 };
        let (v, c) = edge_unit(&spec, 2, &cfg()).unwrap();
        assert_eq!(v, vec![0.0, -80.0]);
        assert_eq!(c, 0.0);
        let layer = LayerParams::new(vec![v], vec![c]).unwrap();
        for (i, expected) in [(0, 0.5), (1, 0.5)] {
            let y = BinaryState::from_index(i, 2).unwrap();
            assert_eq!(layer_row(&layer, &y).unwrap().on(0), expected);
        }
        for i in 2..4 {
            let y = BinaryState::from_index(i, 2).unwrap();
            assert!(layer_row(&layer, &y).unwrap().on(0) <= sigmoid(-80.0));
        }
    }

    #[test]
    fn edge_activations_hit_log_odds() {
        let spec = EdgeSpec { pair: 1, q_even: 0.3, q_odd: 0.9 };
        let (v, c) = edge_unit(&spec, 3, &cfg()).unwrap();
        let layer = LayerParams::new(vec![v], vec![c]).unwrap();
        let pre = |i| layer.preactivations(&BinaryState::from_index(i, 3).unwrap()).unwrap()[0];
        let (s1, s2) = (logit(0.3, 1e-3).unwrap(), logit(0.9, 1e-3).unwrap());
        assert!((s1 + 0.84730).abs() < 1e-5);
        assert!((s2 - 2.19722).abs() < 1e-5);
        assert!((pre(2) - s1).abs() < 1e-12);
        assert!((pre(3) - s2).abs() < 1e-12);
        let bound = -80.0 + s1.abs() + (s2 - s1).abs();
        for i in [0, 1, 4, 5, 6, 7] {
            assert!(pre(i) <= bound + 1e-12, "input {i}: {}", pre(i));
        }
    }

    #[test]
    fn all_ones_off_edge() {
        let spec = EdgeSpec { pair: 0, q_even: 0.3, q_odd: 0.9 };
        let (v, c) = edge_unit(&spec, 3, &cfg()).unwrap();
        let ones = BinaryState::new(vec![1, 1, 1]).unwrap();
        let pre = LayerParams::new(vec![v], vec![c]).unwrap().preactivations(&ones).unwrap()[0];
        let (s1, s2) = (logit(0.3, 1e-3).unwrap(), logit(0.9, 1e-3).unwrap());
        assert!(pre <= -80.0 + s1.abs() + (s2 - s1).abs());
    }

    #[test]
    fn edge_rejects_targets_outside_floor() {
        let spec = EdgeSpec { pair: 0, q_even: 1e-5, q_odd: 0.5 };
        assert!(edge_unit(&spec, 1, &cfg()).is_err());
        let spec = EdgeSpec { pair: 1, q_even: 0.5, q_odd: 0.5 };
        assert!(edge_unit(&spec, 1, &cfg()).is_err());
    }

    #[test]
    fn single_unit_first_layer() {
        let per_input = vec![ProductDist::new(vec![0.3]).unwrap(), ProductDist::new(vec![0.9]).unwrap()];
        let (layer, meta) = first_layer(&per_input, 1, &cfg()).unwrap();
        let (v, c) = edge_unit(&EdgeSpec { pair: 0, q_even: 0.3, q_odd: 0.9 }, 1, &cfg()).unwrap();
        assert_eq!(meta, BlockMeta { block_size: 1, blocks: 1 });
        assert!((layer.weight(0, 0) - v[0]).abs() < 1e-15);
        assert!((layer.bias()[0] - c).abs() < 1e-15);
    }

    #[test]
    fn uniform_targets_give_uniform_rows_on_pairs() {
        let per_input = vec![ProductDist::uniform(2); 4];
        let (layer, _) = first_layer(&per_input, 2, &cfg()).unwrap();
        for i in 0..4 {
            let row = layer_row(&layer, &BinaryState::from_index(i, 2).unwrap()).unwrap();
            let block = i / 2;
            for j in 0..2 {
                assert_eq!(row.on(2 * block + j), 0.5);
            }
        }
    }

    #[test]
    fn leakage_on_inactive_block() {
        let per_input: Vec<ProductDist> = (0..4)
            .map(|i| ProductDist::new(vec![0.2 + 0.1 * i as f64, 0.6, 0.05 + 0.2 * i as f64]).unwrap())
            .collect();
        let (layer, meta) = first_layer(&per_input, 2, &cfg()).unwrap();
        assert_eq!(layer.outputs(), 6);
        let row = layer_row(&layer, &BinaryState::from_index(2, 2).unwrap()).unwrap();
        for (j, p) in per_input[2].on_probs().iter().enumerate() {
            assert!((row.on(3 + j) - p).abs() < 1e-12);
        }
        for j in meta.units(0) {
            let (q1, q2) = (per_input[0].on(j), per_input[1].on(j));
            let (s1, s2) = (logit(q1, 1e-3).unwrap(), logit(q2, 1e-3).unwrap());
            assert!(row.on(j) <= sigmoid(-80.0 + s1.abs() + (s2 - s1).abs()));
        }
    }

    #[test]
    fn first_layer_width_mismatch() {
        let per_input = vec![ProductDist::uniform(2), ProductDist::uniform(3)];
        assert!(matches!(
            first_layer(&per_input, 1, &cfg()),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
