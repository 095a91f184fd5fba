use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constitutive parameters of the viscosity `μ(u) = 2μ₀(ε + |e|²)^{−α/2}`
/// and the coefficient `μ₁` of the fourth-order term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidParams {
    pub mu0: f64,
    pub mu1: f64,
    pub eps: f64,
    pub alpha: f64,
}

impl Default for FluidParams {
    fn default() -> Self {
        Self {
            mu0: 2.0,
            mu1: 1.0,
            eps: 2.0,
            alpha: 0.5,
        }
    }
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.eps > 0.0) {
            bad.push(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.mu0 > 0.0) {
            bad.push(format!("mu0 must be positive, got {}", self.mu0));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            bad.push(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.mu1 > 0.0) {
            bad.push(format!("mu1 must be positive, got {}", self.mu1));
        }
        if !bad.is_empty() {
            return Err(Error::Validation(bad));
        }
        if self.mu1 != 1.0 {
            log::warn!("mu1 overridden to {} (the model fixes mu1 = 1)", self.mu1);
        }
        Ok(())
    }

    /// Explicit constant `μ₀ ε^{−α/2}` in `|⟨N(Z), v⟩| ≤ μ₀ε^{−α/2}|Z|_{H₀¹}|v|_{H₀¹}`.
    pub fn n_duality_constant(&self) -> f64 {
        self.mu0 * self.eps.powf(-0.5 * self.alpha)
    }
}
