//! The random dynamical system generated by the fluid and experiments on its
//! pullback attractor.
//!
//! `φ(t, ω, u₀) = v(t, ω; 0, u₀ − Z(ω)) + Z(θ_t ω)`, with `Z` the stationary
//! fractional Ornstein-Uhlenbeck process approximated by a convolution
//! started a burn-in before the earliest time of interest.

mod cocycle;
mod condition;
mod ergodic;
mod pullback;
mod radius;

pub use cocycle::{cocycle_evaluate, Cocycle, MIN_BURN_IN};
pub use condition::{condition_check, ConditionVerdict};
pub use ergodic::{ergodic_limit_study, ErgodicReport, ErgodicStudy};
pub use pullback::{pullback_run, random_initial_set, PullbackExperiment, PullbackReport, PullbackRun};
pub use radius::{absorbing_radius_estimate, deepest_start, RadiusReport};
