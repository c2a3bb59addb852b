//! Distributions over binary configurations and Markov kernels between them.

use serde::{Deserialize, Serialize};

use super::state::BinaryState;
use super::sum::pairwise_sum;
use crate::error::{Error, Result};

/// Default probability floor for clamping targets into the interior.
pub const DEFAULT_ETA: f64 = 1e-3;

/// Tolerance on the total mass of a validated distribution.
pub const SUM_TOL: f64 = 1e-12;

/// A probability distribution over `{0,1}^n`, indexed LSB-first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DistVec {
    mass: Vec<f64>,
    n: usize,
}

fn width_of_len(len: usize) -> Option<usize> {
    (len.is_power_of_two() && len >= 2).then(|| len.trailing_zeros() as usize)
}

impl DistVec {
    /// Validates non-negativity and unit mass to within [`SUM_TOL`].
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(mass, SUM_TOL)
    }

    pub fn with_tolerance(mass: Vec<f64>, tol: f64) -> Result<Self> {
        let n = width_of_len(mass.len()).ok_or_else(|| {
            Error::InvalidDistribution(format!(
                "length {} is not a power of two of at least 2",
                mass.len()
            ))
        })?;
        if let Some(bad) = mass.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {bad} is negative or not finite")));
        }
        let total = pairwise_sum(&mass);
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self { mass, n })
    }

    pub fn uniform(n: usize) -> Self {
        let len = 1usize << n;
        Self {
            mass: vec![1.0 / len as f64; len],
            n,
        }
    }

    /// Point mass on the configuration with the given index.
    pub fn point(n: usize, index: usize) -> Result<Self> {
        let len = 1usize << n;
        if index >= len {
            return Err(Error::IndexOutOfRange { index, width: n });
        }
        let mut mass = vec![0.0; len];
        mass[index] = 1.0;
        Ok(Self { mass, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn at(&self, x: &BinaryState) -> f64 {
        self.mass[x.index()]
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.mass)
    }

    /// True when every entry is at least `eta`.
    pub fn is_interior(&self, eta: f64) -> bool {
        self.mass.iter().all(|&x| x >= eta)
    }

    /// Raises every entry to at least `eta`, taking the extra mass
    /// proportionally from the entries that stay above the floor.
    ///
    /// Interior inputs are returned unchanged.
    pub fn clamp_to_interior(&self, eta: f64) -> Result<DistVec> {
        let len = self.mass.len();
        if !(eta > 0.0 && eta < 1.0 / len as f64) {
            return Err(Error::Domain(format!(
                "probability floor {eta} outside (0, 2^-{})",
                self.n
            )));
        }
        if self.is_interior(eta) {
            return Ok(self.clone());
        }
        let mut floored: Vec<bool> = self.mass.iter().map(|&x| x < eta).collect();
        let scale = loop {
            let pinned = floored.iter().filter(|&&f| f).count();
            let rest = 1.0 - pinned as f64 * eta;
            let free: Vec<f64> = self
                .mass
                .iter()
                .zip(&floored)
                .filter(|(_, &f)| !f)
                .map(|(&x, _)| x)
                .collect();
            let scale = rest / pairwise_sum(&free);
            let mut grew = false;
            for (x, f) in self.mass.iter().zip(floored.iter_mut()) {
                if !*f && x * scale < eta {
                    *f = true;
                    grew = true;
                }
            }
            if !grew {
                break scale;
            }
        };
        let mass = self
            .mass
            .iter()
            .zip(&floored)
            .map(|(&x, &f)| if f { eta } else { x * scale })
            .collect();
        Ok(DistVec { mass, n: self.n })
    }
}

impl TryFrom<Vec<f64>> for DistVec {
    type Error = Error;
    fn try_from(mass: Vec<f64>) -> Result<Self> {
        DistVec::new(mass)
    }
}

impl From<DistVec> for Vec<f64> {
    fn from(d: DistVec) -> Self {
        d.mass
    }
}

/// Total variation distance `½ Σ |p_i − q_i|`.
pub fn tv_distance(p: &DistVec, q: &DistVec) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let diffs: Vec<f64> = p.mass.iter().zip(&q.mass).map(|(a, b)| (a - b).abs()).collect();
    Ok(0.5 * pairwise_sum(&diffs))
}

/// Kullback-Leibler divergence `KL(p ‖ q)` in nats; infinite when `q`
/// misses mass that `p` has.
pub fn kl_divergence(p: &DistVec, q: &DistVec) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let terms: Vec<f64> = p
        .mass
        .iter()
        .zip(&q.mass)
        .map(|(&a, &b)| match (a > 0.0, b > 0.0) {
            (false, _) => 0.0,
            (true, false) => f64::INFINITY,
            (true, true) => a * (a / b).ln(),
        })
        .collect();
    Ok(pairwise_sum(&terms).max(0.0))
}

/// A row-stochastic `2^k × 2^n` table; row `y` is the output law given input `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovKernel {
    k: usize,
    n: usize,
    rows: Vec<DistVec>,
}

impl MarkovKernel {
    pub fn new(rows: Vec<DistVec>) -> Result<Self> {
        if !rows.len().is_power_of_two() {
            return Err(Error::InvalidShape(format!(
                "kernel has {} rows, not a power of two",
                rows.len()
            )));
        }
        let k = rows.len().trailing_zeros() as usize;
        let n = rows[0].n();
        if let Some(bad) = rows.iter().find(|r| r.n() != n) {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                found: bad.len(),
            });
        }
        Ok(Self { k, n, rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows.into_iter().map(DistVec::new).collect::<Result<_>>()?)
    }

    pub fn uniform(k: usize, n: usize) -> Self {
        Self {
            k,
            n,
            rows: vec![DistVec::uniform(n); 1 << k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[DistVec] {
        &self.rows
    }

    pub fn row(&self, y: usize) -> &DistVec {
        &self.rows[y]
    }

    pub fn entry(&self, y: usize, x: usize) -> f64 {
        self.rows[y].mass[x]
    }

    pub fn clamp_to_interior(&self, eta: f64) -> Result<MarkovKernel> {
        Ok(Self {
            k: self.k,
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| r.clamp_to_interior(eta))
                .collect::<Result<_>>()?,
        })
    }

    /// Row-wise total variation distances to `other`.
    pub fn row_tv(&self, other: &MarkovKernel) -> Result<Vec<f64>> {
        self.check_shape(other)?;
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| tv_distance(a, b))
            .collect()
    }

    pub fn max_row_tv(&self, other: &MarkovKernel) -> Result<f64> {
        Ok(self.row_tv(other)?.into_iter().fold(0.0, f64::max))
    }

    fn check_shape(&self, other: &MarkovKernel) -> Result<()> {
        if self.k != other.k || self.n != other.n {
            return Err(Error::InvalidShape(format!(
                "kernel shapes differ: (k, n) = ({}, {}) vs ({}, {})",
                self.k, self.n, other.k, other.n
            )));
        }
        Ok(())
    }
}

/// A factorizing distribution over `{0,1}^m`.
///
/// Stores both Bernoulli masses of each unit so that whichever is tiny keeps
/// full relative precision. [`ProductDist::on`] is `Pr(unit = 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDist {
    on: Vec<f64>,
    off: Vec<f64>,
}

impl ProductDist {
    /// From the probabilities that each unit outputs 1.
    pub fn new(on: Vec<f64>) -> Result<Self> {
        check_probs(&on)?;
        let off = on.iter().map(|p| 1.0 - p).collect();
        Ok(Self { on, off })
    }

    /// From the probabilities that each unit outputs 0.
    pub fn from_off(off: Vec<f64>) -> Result<Self> {
        check_probs(&off)?;
        let on = off.iter().map(|p| 1.0 - p).collect();
        Ok(Self { on, off })
    }

    /// Sigmoid units with the given pre-activations.
    pub fn from_logits(preactivations: &[f64]) -> Self {
        use super::scalar::sigmoid;
        Self {
            on: preactivations.iter().map(|&a| sigmoid(a)).collect(),
            off: preactivations.iter().map(|&a| sigmoid(-a)).collect(),
        }
    }

    pub(crate) fn from_parts(on: Vec<f64>, off: Vec<f64>) -> Self {
        debug_assert_eq!(on.len(), off.len());
        Self { on, off }
    }

    pub fn uniform(width: usize) -> Self {
        Self {
            on: vec![0.5; width],
            off: vec![0.5; width],
        }
    }

    pub fn width(&self) -> usize {
        self.on.len()
    }

    pub fn on(&self, j: usize) -> f64 {
        self.on[j]
    }

    pub fn off(&self, j: usize) -> f64 {
        self.off[j]
    }

    pub fn on_probs(&self) -> &[f64] {
        &self.on
    }

    pub fn off_probs(&self) -> &[f64] {
        &self.off
    }

    /// Mass of configuration `z`: `Π_j on_j^{z_j} off_j^{1−z_j}`.
    pub fn mass(&self, z: &BinaryState) -> Result<f64> {
        if z.width() != self.width() {
            return Err(Error::LengthMismatch {
                expected: self.width(),
                found: z.width(),
            });
        }
        Ok(self.mass_of_index(z.index()))
    }

    pub(crate) fn mass_of_index(&self, z: usize) -> f64 {
        (0..self.width())
            .map(|j| if z >> j & 1 == 1 { self.on[j] } else { self.off[j] })
            .product()
    }

    /// Clamps every unit into `[eta, 1 - eta]`.
    pub fn clamped(&self, eta: f64) -> ProductDist {
        let on: Vec<f64> = self.on.iter().map(|p| p.clamp(eta, 1.0 - eta)).collect();
        let off = self
            .off
            .iter()
            .zip(&on)
            .map(|(&q, &p)| if q < eta || q > 1.0 - eta { 1.0 - p } else { q })
            .collect();
        ProductDist { on, off }
    }
}

fn check_probs(ps: &[f64]) -> Result<()> {
    match ps.iter().find(|p| !(p.is_finite() && (0.0..=1.0).contains(*p))) {
        Some(bad) => Err(Error::Domain(format!("Bernoulli parameter {bad} outside [0, 1]"))),
        None => Ok(()),
    }
}
