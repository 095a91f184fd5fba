//! Closed-form variances of the per-mode convolutions.

use crate::fbm::HurstParam;
use crate::quad::tanh_sinh_split;
use crate::spectral::{eigenvalue, gamma, modes};

const TOL: f64 = 1e-12;
/// Beyond this unit-rate horizon the transient is below `e^{−40}`.
const STATIONARY_HORIZON: f64 = 40.0;

/// Break points clustered towards `t`: `0, t − 2^k, …, t − 1, t`.
fn breaks_towards(t: f64) -> Vec<f64> {
    let mut b = vec![t];
    let mut d = 1.0;
    while d < t {
        b.push(t - d);
        d *= 2.0;
    }
    b.push(0.0);
    b.reverse();
    b
}

/// `Var ∫₀^T e^{−(T−u)} dβ(u)` for a unit-rate convolution.
///
/// With `z = β(T) − ∫₀^T e^{−(T−u)}β(u) du`, the variance is
/// `T^{2H} − 2A + (1 − e^{−T})P − Q/2` where
/// `A = ∫ e^{−(T−u)}R(T,u) du`, `P = ∫ e^{−(T−u)}u^{2H} du` and
/// `Q = ∫₀^T d^{2H}(e^{−d} − e^{d−2T}) dd`.
pub fn unit_rate_variance(hurst: HurstParam<f64>, t: f64) -> f64 {
    let h2 = 2.0 * hurst.value();
    if t >= STATIONARY_HORIZON {
        return stationary_unit_variance(hurst);
    }
    if t <= 0.0 {
        return 0.0;
    }
    let br = breaks_towards(t);
    let tp = t.powf(h2);
    let a = tanh_sinh_split(
        |u, _, d| (-d).exp() * 0.5 * (tp + u.powf(h2) - d.powf(h2)),
        &br,
        TOL,
    );
    let p = tanh_sinh_split(|u, _, d| (-d).exp() * u.powf(h2), &br, TOL);
    let q = tanh_sinh_split(
        |d, _, _| d.powf(h2) * ((-d).exp() - (d - 2.0 * t).exp()),
        &br,
        TOL,
    );
    tp - 2.0 * a + (-(-t).exp_m1()) * p - 0.5 * q
}

/// `HΓ(2H)`, the stationary unit-rate variance.
pub fn stationary_unit_variance(hurst: HurstParam<f64>) -> f64 {
    let h = hurst.value();
    h * gamma(2.0 * h)
}

/// `Var z_λ(t) = λ^{−2H} V₁(λt)` by self-similarity.
pub fn mode_variance(hurst: HurstParam<f64>, lambda: f64, t: f64) -> f64 {
    lambda.powf(-2.0 * hurst.value()) * unit_rate_variance(hurst, lambda * t)
}

/// `λ^{−2H} HΓ(2H)`.
pub fn stationary_mode_variance(hurst: HurstParam<f64>, lambda: f64) -> f64 {
    lambda.powf(-2.0 * hurst.value()) * stationary_unit_variance(hurst)
}

/// `E|A^α z(t)|²` truncated at `m_max`; `t = ∞` gives the stationary value.
pub fn expected_norm_f_sq(hurst: HurstParam<f64>, t: f64, m_max: usize, alpha: f64) -> f64 {
    modes(m_max)
        .map(|k| {
            let l: f64 = eigenvalue(k);
            l.powf(2.0 * alpha) * mode_variance(hurst, l, t)
        })
        .sum()
}

/// `E|z(t)|²_{H₀¹}` truncated at `m_max`.
pub fn expected_h1_norm_sq(hurst: HurstParam<f64>, t: f64, m_max: usize) -> f64 {
    modes(m_max)
        .map(|k| k.k2() as f64 * mode_variance(hurst, eigenvalue(k), t))
        .sum()
}
