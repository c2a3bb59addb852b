//! Parameter-counting lower bounds and constructive upper bounds on the
//! number of hidden units.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// `⌈2^k (2^n − 1) / (k + 1)⌉`: fewest hidden units when only the first
    /// layer is free.
    pub lower_fixed: u64,
    /// `⌈(2^k (2^n − 1) − n) / (n + k + 1)⌉`: fewest hidden units when both
    /// layers are free.
    pub lower_free: u64,
    pub upper_fixed: u64,
    /// Undefined for `n = 1`.
    pub upper_free: Option<u64>,
}

impl Bounds {
    pub fn fixed_tight(&self) -> bool {
        self.lower_fixed == self.upper_fixed
    }

    pub fn free_tight(&self) -> bool {
        self.upper_free == Some(self.lower_free)
    }
}

pub fn fixed_output_hidden_units(k: usize, n: usize) -> u64 {
    (1u64 << k.saturating_sub(1)) * ((1u64 << n) - 1)
}

pub fn trainable_output_hidden_units(k: usize, n: usize) -> u64 {
    (1u64 << k.saturating_sub(1)) * ((1u64 << (n - 1)) - 1)
}

pub fn bounds(k: usize, n: usize) -> Result<Bounds> {
    if k == 0 || n == 0 || k + n > 60 {
        return Err(Error::InvalidShape(format!("bounds need k, n >= 1 and k + n <= 60, got ({k}, {n})")));
    }
    let dim = (1u64 << k) * ((1u64 << n) - 1);
    let (k64, n64) = (k as u64, n as u64);
    Ok(Bounds {
        lower_fixed: dim.div_ceil(k64 + 1),
        lower_free: (dim - n64).div_ceil(n64 + k64 + 1),
        upper_fixed: fixed_output_hidden_units(k, n),
        upper_free: (n >= 2).then(|| trainable_output_hidden_units(k, n)),
    })
}
