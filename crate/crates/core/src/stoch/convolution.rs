use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::FbmPath;
use crate::quad::gauss_legendre;
use crate::scalar::Real;
use crate::spectral::{eigenvalue, modes, ModeIndex, SpectralVelocityField};

use super::noise::NoiseRealization;

/// `φ₁(x) = (1 − e^{−x})/x`, with `φ₁(0) = 1`.
pub fn phi1<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-8) {
        return T::one() - x * T::lit(0.5);
    }
    -(-x).exp_m1() / x
}

/// `φ₂(x) = (x − 1 + e^{−x})/x²`, with `φ₂(0) = 1/2`.
pub fn phi2<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-2) {
        // alternating Taylor series, six terms
        let mut term = T::lit(0.5);
        let mut sum = term;
        for k in 3..8 {
            term = -term * x / T::of(k);
            sum = sum + term;
        }
        return sum;
    }
    (x + (-x).exp_m1()) / (x * x)
}

/// `∫ e^{−λ(t_k−s)} dβ(s)` at every node of a uniform grid, for the linear
/// interpolant of `β`. Exact for that interpolant.
pub fn convolution_series(values: &[f64], dt: f64, lambda: f64) -> Vec<f64> {
    let decay = (-lambda * dt).exp();
    let gain = phi1(lambda * dt);
    let mut out = Vec::with_capacity(values.len());
    let mut z = 0.0;
    out.push(z);
    for w in values.windows(2) {
        z = decay * z + gain * (w[1] - w[0]);
        out.push(z);
    }
    out
}

/// `z(t) = ∫₀^t e^{−λ(t−s)} dβ(s) = β(t) − λ∫₀^t e^{−λ(t−s)}β(s) ds` along one path.
pub fn mode_convolution(path: &FbmPath, lambda: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || t > path.t_final() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "time {t} outside path domain [0, {}]",
            path.t_final()
        )));
    }
    let mut z = 0.0;
    for k in 0..path.len() - 1 {
        let (t0, t1) = (path.times[k], path.times[k + 1]);
        if t0 >= t {
            break;
        }
        let end = t1.min(t);
        let h = end - t0;
        let db = if end < t1 {
            path.value_at(end)? - path.values[k]
        } else {
            path.values[k + 1] - path.values[k]
        };
        z = (-lambda * h).exp() * z + phi1(lambda * h) * db;
    }
    Ok(z)
}

/// Truncated stochastic convolution at one time.
#[derive(Debug, Clone, Serialize)]
pub struct ConvolutionSample {
    pub t: f64,
    pub field: SpectralVelocityField<f64>,
    pub m_max: usize,
}

/// `z(t) = Σ z_mn(t) e_mn` with the convolution started at the noise origin.
pub fn convolution_field(noise: &NoiseRealization, t: f64) -> Result<ConvolutionSample> {
    noise.hurst.require_convolution()?;
    let k_end = noise.index_of(t)?;
    let list: Vec<ModeIndex> = modes(noise.m_max).collect();
    let coeffs: Vec<f64> = list
        .par_iter()
        .map(|&k| {
            let series = convolution_series(&noise.values(k)[..=k_end], noise.dt, eigenvalue(k));
            series[k_end]
        })
        .collect();
    Ok(ConvolutionSample {
        t,
        field: SpectralVelocityField::from_coeffs(noise.m_max, coeffs)?,
        m_max: noise.m_max,
    })
}

/// `z` at every node of the noise grid.
pub fn convolution_trajectory(noise: &NoiseRealization) -> Result<Vec<SpectralVelocityField<f64>>> {
    scaled_convolution_trajectory(noise, 1.0)
}

/// As [`convolution_trajectory`] for the operator `μ₁A`.
pub fn scaled_convolution_trajectory(
    noise: &NoiseRealization,
    mu1: f64,
) -> Result<Vec<SpectralVelocityField<f64>>> {
    noise.hurst.require_convolution()?;
    let list: Vec<ModeIndex> = modes(noise.m_max).collect();
    let series: Vec<Vec<f64>> = list
        .par_iter()
        .map(|&k| convolution_series(noise.values(k), noise.dt, mu1 * eigenvalue::<f64>(k)))
        .collect();
    (0..=noise.steps())
        .map(|i| SpectralVelocityField::from_coeffs(noise.m_max, series.iter().map(|s| s[i]).collect()))
        .collect()
}

const Y_ORDER: usize = 6;

/// `|z(t) − (β(t) − λY(t))|` for one mode on a uniform grid, where `Y` is a
/// composite Gauss-Legendre quadrature of `e^{−λ(t−s)}β(s)` over the linear
/// interpolant of `β`.
pub fn y_identity_mode(values: &[f64], dt: f64, lambda: f64) -> f64 {
    let n = values.len() - 1;
    let z = convolution_series(values, dt, lambda)[n];
    let (x, w) = gauss_legendre::<f64>(Y_ORDER);
    let mut y = 0.0;
    for k in 0..n {
        let (b0, b1) = (values[k], values[k + 1]);
        let right = (n - k - 1) as f64 * dt;
        let mut cell = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let frac = 0.5 * (xi + 1.0);
            let beta = b0 + frac * (b1 - b0);
            cell += wi * (-lambda * (right + (1.0 - frac) * dt)).exp() * beta;
        }
        y += 0.5 * dt * cell;
    }
    (z - (values[n] - lambda * y)).abs()
}

/// Per-mode residuals of `z = AY + B^H` at time `t`.
#[derive(Debug, Clone, Serialize)]
pub struct YIdentityReport {
    pub t: f64,
    pub dt: f64,
    pub residuals: Vec<(ModeIndex, f64)>,
    pub max_residual: f64,
}

impl YIdentityReport {
    pub fn residual(&self, mode: ModeIndex) -> Option<f64> {
        self.residuals.iter().find(|(k, _)| *k == mode).map(|(_, r)| *r)
    }
}

/// Checks the identity for every mode, integrating from the noise origin.
pub fn y_identity_check(noise: &NoiseRealization, t: f64) -> Result<YIdentityReport> {
    if !(t > noise.origin) {
        return Err(Error::domain(format!("identity check needs t > {}", noise.origin)));
    }
    let k_end = noise.index_of(t)?;
    let list: Vec<ModeIndex> = modes(noise.m_max).collect();
    let residuals: Vec<(ModeIndex, f64)> = list
        .par_iter()
        .map(|&k| (k, y_identity_mode(&noise.values(k)[..=k_end], noise.dt, eigenvalue(k))))
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, (_, r)| m.max(*r));
    Ok(YIdentityReport {
        t,
        dt: noise.dt,
        residuals,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_fbm, uniform_grid, wiener_integral_pathwise, HurstParam, SampledFunction};

    fn path(n: usize, seed: u64) -> FbmPath {
        sample_fbm(&uniform_grid(1.0, n), HurstParam::new(0.35).unwrap(), seed).unwrap()
    }

    #[test]
    fn phi_functions_are_continuous() {
        for &x in &[1e-9f64, 1e-3, 9.99e-3, 1.001e-2, 0.5, 30.0] {
            let p1 = -(-x).exp_m1() / x;
            assert!((phi1(x) - p1).abs() < 1e-12);
            let q = if x < 1e-4 { 0.5 - x / 6.0 } else { (x - 1.0 + (-x).exp()) / (x * x) };
            assert!((phi2(x) - q).abs() < 1e-9, "{x}");
        }
        assert_eq!(phi2(0.0f64), 0.5);
    }

    #[test]
    fn trivial_cases() {
        let p = path(256, 3);
        assert_eq!(mode_convolution(&p, 4.0, 0.0).unwrap(), 0.0);
        let z = mode_convolution(&p, 0.0, 1.0).unwrap();
        assert!((z - p.values[256]).abs() < 1e-12);
        assert!(mode_convolution(&p, 4.0, 1.5).is_err());
        // off-grid end point uses the interpolant
        let z = mode_convolution(&p, 0.0, 0.3).unwrap();
        assert!((z - p.value_at(0.3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn matches_wiener_integral() {
        let p = path(1024, 8);
        let lambda = 4.0;
        let grid = uniform_grid(1.0, 1024);
        let phi = SampledFunction::smooth(
            grid,
            |s| (-lambda * (1.0 - s)).exp(),
            |s| lambda * (-lambda * (1.0 - s)).exp(),
        )
        .unwrap();
        let w = wiener_integral_pathwise(&phi, &p).unwrap();
        let z = mode_convolution(&p, lambda, 1.0).unwrap();
        assert!((w - z).abs() < 1e-4, "{w} {z}");
    }

    #[test]
    fn identity_residual_vanishes_without_decay() {
        let p = path(64, 1);
        assert_eq!(y_identity_mode(&p.values, 1.0 / 64.0, 0.0), 0.0);
        let r = y_identity_mode(&p.values, 1.0 / 64.0, 400.0);
        assert!(r < 1e-6, "{r}");
    }
}
