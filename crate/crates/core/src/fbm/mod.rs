//! Scalar fractional Brownian motion for `H ≤ 1/2`.

mod hurst;
mod kernel;
mod kstar;
mod sampled;
mod sampler;
mod wiener;

pub use hurst::{fbm_covariance, HurstParam, Regime};
pub use kernel::VolterraKernel;
pub use kstar::{kstar_apply, KStarImage};
pub use sampled::SampledFunction;
pub use sampler::{sample_fbm, sample_fbm_ensemble, uniform_grid, FbmPath, FgnSampler};
pub use wiener::wiener_integral_pathwise;

/// Default time resolution: grid points per unit time.
pub const DEFAULT_POINTS_PER_UNIT: usize = 1 << 10;
