//! Binary stochastic feedforward networks as Markov kernels.
//!
//! A network with `k` inputs, `m` hidden units and `n` outputs, all binary
//! with sigmoid conditionals, defines the kernel
//! `P(x|y) = Σ_z Q(z|y) R(x|z)`. This crate evaluates such kernels exactly,
//! compiles weights that approximate a given kernel to any accuracy as the
//! sharpness `alpha` grows, fits weights by exact gradient descent, and runs
//! seeded verification experiments.
//!
//! States are indexed least-significant bit first: `y = (y_1, ..., y_k)`
//! has index `Σ 2^(i−1) y_i`, and kernel row `y` is the output law for the
//! input with that index.
//!
//! ```
//! use skn::construct::{compile_theorem1, ScalingConfig};
//! use skn::eval::{full_kernel, Evaluator};
//! use skn::model::MarkovKernel;
//!
//! let target = MarkovKernel::from_rows(vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap();
//! let net = compile_theorem1(&target, &ScalingConfig::default()).unwrap();
//! let realized = full_kernel(&net, Evaluator::Naive).unwrap();
//! assert!(realized.max_row_tv(&target).unwrap() < 1e-6);
//! ```

pub mod cli;
pub mod construct;
pub mod error;
pub mod eval;
pub mod fit;
pub mod harness;
pub mod io;
pub mod model;

pub use error::{Error, Result};
