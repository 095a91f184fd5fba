use serde::Serialize;

use crate::error::Result;
use crate::spectral::{dirichlet_beta, riemann_zeta};

/// Outcome of the test `c₀C₁² < 1/(β(4)ζ(4))`.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionVerdict {
    pub c0: f64,
    pub c1: f64,
    /// `c₀C₁²`.
    pub lhs: f64,
    /// `1/(β(4)ζ(4))`.
    pub threshold: f64,
    pub pass: bool,
    /// `threshold − lhs`.
    pub margin: f64,
    /// `(c₀C₁β(4)ζ(4), 1/C₁)`, the interval the proof picks `C₂` from.
    pub c2_window: (f64, f64),
    pub window_nonempty: bool,
    pub note: &'static str,
}

pub fn condition_check(c0: f64, c1: f64) -> Result<ConditionVerdict> {
    let lattice = dirichlet_beta(4.0f64)? * riemann_zeta(4.0f64)?;
    let threshold = 1.0 / lattice;
    let lhs = c0 * c1 * c1;
    let c2_window = (c0 * c1 * lattice, 1.0 / c1);
    Ok(ConditionVerdict {
        c0,
        c1,
        lhs,
        threshold,
        pass: lhs < threshold,
        margin: threshold - lhs,
        c2_window,
        window_nonempty: c2_window.0 < c2_window.1,
        note: "c0 is configured; the embedding constant is not derived here",
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        // β(4) = 0.98894455174110533611, ζ(4) = π⁴/90
        let oracle = 1.0 / (0.988_944_551_741_105_3 * std::f64::consts::PI.powi(4) / 90.0);
        let v = condition_check(1.0, 0.5).unwrap();
        assert!((v.threshold - oracle).abs() < 1e-10);
        assert!(v.pass && v.window_nonempty && (v.margin - (oracle - 0.25)).abs() < 1e-12);
        let v = condition_check(1.0, 1.0).unwrap();
        assert!(!v.pass && !v.window_nonempty);
    }

    #[test]
    fn flips_at_threshold() {
        let c0 = 1.3;
        let edge = condition_check(c0, 1.0).unwrap().threshold;
        let c1 = (edge / c0).sqrt();
        assert!(condition_check(c0, c1 * (1.0 - 1e-12)).unwrap().pass);
        assert!(!condition_check(c0, c1 * (1.0 + 1e-12)).unwrap().pass);
    }
}
