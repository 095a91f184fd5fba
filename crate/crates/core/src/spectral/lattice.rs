//! Lattice sums `Σ_{1≤i,j≤M} (i² + j²)^{-s}`.

use rayon::prelude::*;

use crate::error::Result;
use crate::scalar::Real;

use super::special::{dirichlet_beta, riemann_zeta};

/// Partial sum `Σ_{1≤i,j≤M} (i² + j²)^{-s}`.
///
/// Rows are summed independently and reduced in row order, so the value does
/// not depend on the thread pool size.
pub fn lattice_sum<T: Real>(s: T, m: usize) -> T {
    let rows: Vec<T> = (1..=m)
        .into_par_iter()
        .map(|i| {
            let i2 = i * i;
            // sum small terms first
            (1..=m)
                .rev()
                .map(|j| T::of(i2 + j * j).powf(-s))
                .fold(T::zero(), |a, b| a + b)
        })
        .collect();
    rows.into_iter().rev().fold(T::zero(), |a, b| a + b)
}

/// Limit of [`lattice_sum`] as `M → ∞` for `s > 1`: `ζ(s)β(s) − ζ(2s)`.
///
/// `4ζ(s)β(s)` counts all nonzero lattice points; removing the axes
/// (`4ζ(2s)`) and dividing by the four quadrants gives the positive quadrant.
pub fn lattice_limit<T: Real>(s: T) -> Result<T> {
    Ok(riemann_zeta(s)? * dirichlet_beta(s)? - riemann_zeta(s + s)?)
}

/// The upper bound `2β(s)ζ(s)` used for the same sum.
pub fn lattice_sum_upper_bound<T: Real>(s: T) -> Result<T> {
    Ok(T::lit(2.0) * riemann_zeta(s)? * dirichlet_beta(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_to_quadrant_limit() {
        let limit: f64 = lattice_limit(4.0).unwrap();
        assert!((limit - 0.0663).abs() < 1e-4, "{limit}");
        let partial = lattice_sum(4.0f64, 2000);
        assert!((partial - limit).abs() < 1e-6);
    }

    #[test]
    fn limit_matches_brute_force_with_tail() {
        // oracle: r_2(k) counts via direct enumeration of the quadrant
        let s = 2.5f64;
        let m = 400usize;
        let mut direct = 0.0;
        for i in 1..=m {
            for j in 1..=m {
                direct += ((i * i + j * j) as f64).powf(-s);
            }
        }
        // tail of the quadrant beyond the box is O(M^{2-2s})
        let limit: f64 = lattice_limit(s).unwrap();
        assert!(limit > direct);
        assert!(limit - direct < 4.0 * (m as f64).powf(2.0 - 2.0 * s));
    }

    #[test]
    fn bounded_and_monotone() {
        let bound: f64 = lattice_sum_upper_bound(4.0).unwrap();
        assert!((bound - 2.1407).abs() < 1e-3);
        let mut prev = 0.0;
        for m in [1, 2, 5, 10, 50, 100] {
            let v = lattice_sum(4.0f64, m);
            assert!(v >= prev && v <= bound);
            prev = v;
        }
    }

    #[test]
    fn critical_exponent_diverges() {
        // s = 1: partial sums grow like (π/2) ln M
        let a = lattice_sum(1.0f64, 100);
        let b = lattice_sum(1.0f64, 1000);
        let c = lattice_sum(1.0f64, 4000);
        let d1 = b - a;
        let d2 = c - b;
        assert!(d1 > 3.0 && d2 > 2.0, "{d1} {d2}");
        assert!((d1 - std::f64::consts::FRAC_PI_2 * 10f64.ln()).abs() < 0.05);
    }
}
