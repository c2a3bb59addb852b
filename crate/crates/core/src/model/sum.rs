//! Pairwise (tree) summation.

/// Sums a slice by recursive halving; rounding error grows as `O(log n)`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Streaming pairwise accumulator over fixed-width vectors.
///
/// Terms are merged like a binary counter: a partial sum at level `j`
/// always holds exactly `2^j` terms, so a stream of `2^m` pushes is summed
/// along a balanced tree.
#[derive(Debug, Clone)]
pub struct PairwiseAccumulator {
    width: usize,
    levels: Vec<Vec<f64>>,
    occupied: Vec<bool>,
    carry: Vec<f64>,
}

impl PairwiseAccumulator {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            levels: Vec::new(),
            occupied: Vec::new(),
            carry: vec![0.0; width],
        }
    }

    /// Adds `scale * term` (elementwise) to the running sum.
    pub fn push_scaled(&mut self, scale: f64, term: &[f64]) {
        debug_assert_eq!(term.len(), self.width);
        for (c, t) in self.carry.iter_mut().zip(term) {
            *c = scale * t;
        }
        let mut level = 0;
        loop {
            if level == self.levels.len() {
                self.levels.push(vec![0.0; self.width]);
                self.occupied.push(false);
            }
            if !self.occupied[level] {
                self.levels[level].copy_from_slice(&self.carry);
                self.occupied[level] = true;
                return;
            }
            for (c, s) in self.carry.iter_mut().zip(&self.levels[level]) {
                *c += s;
            }
            self.occupied[level] = false;
            level += 1;
        }
    }

    pub fn finish(self) -> Vec<f64> {
        let mut total = vec![0.0; self.width];
        for (level, used) in self.levels.iter().zip(&self.occupied) {
            if *used {
                for (t, s) in total.iter_mut().zip(level) {
                    *t += s;
                }
            }
        }
        total
    }
}
