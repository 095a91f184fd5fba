//! Spectral simulation and verification lab for the 2D stochastic bipolar
//! viscous fluid driven by cylindrical fractional Brownian motion with
//! Hurst parameter in (1/4, 1/2).
//!
//! The crate is organised bottom-up:
//!
//! - [`fbm`]: scalar fBm covariance, the Volterra kernel, the `K*` transfer
//!   operator, exact samplers and Wiener integrals of deterministic integrands.
//! - [`spectral`]: the stream-function sine basis on the square, the diagonal
//!   operator `A`, its semigroup and fractional powers, zeta/beta functions and
//!   lattice sums.
//! - [`fluid`]: rate of deformation, the forms `a` and `b`, the convection
//!   operator `B` and the nonlinear viscosity `N`, evaluated pseudospectrally.
//! - [`stoch`]: stochastic convolution, its variance bounds, the fractional
//!   Ornstein-Uhlenbeck process and ergodic averages.
//! - [`solver`]: Picard iteration for the mild solution, exponential Euler for
//!   the random `v`-equation, and energy monitoring.
//! - [`attractor`]: cocycle evaluation, pullback experiments and absorbing radii.
//! - [`runner`]: configuration, experiments, CSV/JSON outputs and manifests.
//!
//! Core numerical types are generic over the scalar through [`Real`]; the
//! aliases below fix the common `f64` instantiations.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod attractor;
pub mod error;
pub mod fbm;
pub mod fluid;
pub mod quad;
pub mod runner;
pub mod scalar;
pub mod seed;
pub mod solver;
pub mod spectral;
pub mod stats;
pub mod stoch;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double precision spectral velocity field.
pub type Field = spectral::SpectralVelocityField<f64>;
/// Single precision spectral velocity field.
pub type Field32 = spectral::SpectralVelocityField<f32>;
/// Double precision collocation grid.
pub type Grid = spectral::CollocationGrid<f64>;
/// Double precision Hurst parameter.
pub type Hurst = fbm::HurstParam<f64>;
/// Double precision Volterra kernel.
pub type Kernel = fbm::VolterraKernel<f64>;
/// Double precision sampled function.
pub type Sampled = fbm::SampledFunction<f64>;
