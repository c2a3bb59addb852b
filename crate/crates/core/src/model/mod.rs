//! Domain types shared by every other module: binary states, distributions,
//! kernels, layer parameters and the scalar nonlinearities.

mod dist;
mod params;
mod scalar;
mod state;
mod sum;

pub use dist::{kl_divergence, tv_distance, DistVec, MarkovKernel, ProductDist, DEFAULT_ETA, SUM_TOL};
pub use params::{BlockMeta, LayerParams, NetworkParams};
pub use scalar::{log_odds, log_sigmoid, logit, sigmoid};
pub use state::{bin_of, highest_set, highest_set_index, index_of, orthant_index, BinaryState, MAX_WIDTH};
pub use sum::{pairwise_sum, PairwiseAccumulator};
