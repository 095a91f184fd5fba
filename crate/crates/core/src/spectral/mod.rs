//! Square-domain spectral model on `(0, π)²`.
//!
//! Divergence-free fields are represented by stream-function amplitudes on
//! the sine basis `e_mn = (2 / (π √(m²+n²))) ∇⊥(sin m x₁ sin n x₂)`, which is
//! orthonormal in `L²`. The operator `A` acts diagonally with eigenvalue
//! `(m² + n²)²`; this is a surrogate for the biharmonic Stokes operator whose
//! eigenvalues are bounded below by the same expression. The basis satisfies
//! incompressibility and zero normal flow but not full no-slip.

mod collocation;
mod field;
mod lattice;
mod special;

pub use collocation::{dealiased_size, CollocationField, CollocationGrid, GridScalar, Trig};
pub use field::{eigenvalue, modes, ModeIndex, SpectralVelocityField, SURROGATE_LAMBDA1};
pub use lattice::{lattice_limit, lattice_sum, lattice_sum_upper_bound};
pub use special::{dirichlet_beta, gamma, ln_gamma, riemann_zeta};

use serde::{Deserialize, Serialize};

/// Global constants appearing in the estimates, stored once measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateConstants {
    /// Fractional-integral embedding constant `c₀` (configured, not derived).
    pub c0: f64,
    /// Trilinear interpolation constant `C₁` (empirical lower estimate).
    pub big_c1: f64,
    /// Further constants `c₁..c₆` in order, when measured.
    pub c: [Option<f64>; 6],
    /// First eigenvalue; 4 in the surrogate model.
    pub lambda1: f64,
}

impl Default for EstimateConstants {
    fn default() -> Self {
        Self {
            c0: 1.0,
            big_c1: 0.5,
            c: [None; 6],
            lambda1: SURROGATE_LAMBDA1,
        }
    }
}

impl EstimateConstants {
    pub fn validate(&self) -> crate::Result<()> {
        let mut bad = Vec::new();
        if !(self.c0 > 0.0) {
            bad.push(format!("c0 must be positive, got {}", self.c0));
        }
        if !(self.big_c1 > 0.0) {
            bad.push(format!("C1 must be positive, got {}", self.big_c1));
        }
        if !(self.lambda1 > 0.0) {
            bad.push(format!("lambda1 must be positive, got {}", self.lambda1));
        }
        for (i, c) in self.c.iter().enumerate() {
            if let Some(c) = c {
                if !(*c > 0.0) {
                    bad.push(format!("c{} must be positive, got {c}", i + 1));
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(crate::Error::Validation(bad))
        }
    }
}
