//! Binary configurations and their LSB-first integer index.
//!
//! Bit `j` (1-based) of a configuration carries weight `2^(j-1)`, so
//! `(1, 0)` is index 1 and `(0, 1)` is index 2. Every table in the crate
//! (kernel rows, output columns, hidden states) is addressed this way.

use std::fmt;

use crate::error::{Error, Result};

/// Widest configuration addressable by a `usize` index.
pub const MAX_WIDTH: usize = 63;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryState {
    bits: Vec<u8>,
}

impl BinaryState {
    /// Builds a state from explicit bits (first entry is the least significant).
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.len() > MAX_WIDTH {
            return Err(Error::InvalidShape(format!(
                "state width {} exceeds {MAX_WIDTH}",
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Domain(format!("binary state entry {bad} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    /// The width-`width` state whose index is `index`.
    pub fn from_index(index: usize, width: usize) -> Result<Self> {
        if width > MAX_WIDTH || index >> width != 0 {
            return Err(Error::IndexOutOfRange { index, width });
        }
        let bits = (0..width).map(|j| ((index >> j) & 1) as u8).collect();
        Ok(Self { bits })
    }

    pub fn zeros(width: usize) -> Self {
        Self { bits: vec![0; width] }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Zero-based bit access.
    pub fn bit(&self, j: usize) -> bool {
        self.bits[j] == 1
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }

    /// 1-based position of the highest set bit; 0 for the all-zero state.
    pub fn highest_set(&self) -> usize {
        self.bits.iter().rposition(|&b| b == 1).map_or(0, |j| j + 1)
    }

    pub fn iter_all(width: usize) -> impl Iterator<Item = BinaryState> {
        (0..1usize << width).map(move |i| BinaryState::from_index(i, width).unwrap())
    }
}

impl fmt::Debug for BinaryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, b) in self.bits.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

pub fn index_of(state: &BinaryState) -> usize {
    state.index()
}

pub fn bin_of(index: usize, width: usize) -> Result<BinaryState> {
    BinaryState::from_index(index, width)
}

pub fn highest_set(state: &BinaryState) -> usize {
    state.highest_set()
}

/// `highest_set` computed directly on an index.
#[inline]
pub fn highest_set_index(index: usize) -> usize {
    (usize::BITS - index.leading_zeros()) as usize
}

/// Index of the orthant containing `r`: Heaviside entrywise, read LSB-first.
pub fn orthant_index(r: &[f64]) -> Result<usize> {
    let mut index = 0;
    for (j, &x) in r.iter().enumerate() {
        if x == 0.0 || x.is_nan() {
            return Err(Error::DegenerateSign { position: j });
        }
        if x > 0.0 {
            index |= 1 << j;
        }
    }
    Ok(index)
}
