//! Quadrature primitives.
//!
//! - [`tanh_sinh`]: double-exponential rule for integrands with algebraic
//!   endpoint singularities. The integrand receives the node together with its
//!   distances to both endpoints so that factors like `(b - x)^p` can be formed
//!   without cancellation.
//! - [`gauss_legendre`]: nodes and weights on `[-1, 1]`.
//! - [`power_moments`]: closed-form moments of `(A + w)^p` used to integrate
//!   singular factors exactly against piecewise-linear interpolants.

use std::sync::OnceLock;

use crate::scalar::Real;

/// Default relative tolerance for [`tanh_sinh`].
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_LEVEL: usize = 11;
const T_MAX: f64 = 6.5;

/// Integrates `f(x, x - a, b - x)` over `[a, b]`.
///
/// Converges for integrands with integrable algebraic singularities at either
/// endpoint. Returns zero for an empty interval.
pub fn tanh_sinh<T, F>(f: F, a: T, b: T, tol: T) -> T
where
    T: Real,
    F: FnMut(T, T, T) -> T,
{
    tanh_sinh_capped(f, a, b, tol, MAX_LEVEL)
}

/// [`tanh_sinh`] stopping after `max_level` halvings of the step, for
/// integrands whose evaluation noise would defeat the tolerance test.
pub fn tanh_sinh_capped<T, F>(mut f: F, a: T, b: T, tol: T, max_level: usize) -> T
where
    T: Real,
    F: FnMut(T, T, T) -> T,
{
    if !(b > a) {
        return T::zero();
    }
    let width = b - a;
    let half = width * T::lit(0.5);
    let pi_2 = T::FRAC_PI_2();
    let t_max = T::lit(T_MAX);
    let center = half * pi_2 * f(a + half, half, half);
    // nodes closer than this to an endpoint would overflow singular integrands
    let min_dist = T::min_positive_value().sqrt() * width;

    // contribution of the symmetric node pair at parameter t
    let mut pair = |t: T| -> T {
        let u = pi_2 * t.sinh();
        let e = (-(u + u)).exp();
        // weight = half * (pi/2) cosh t / cosh^2 u, written without overflow
        let w = half * pi_2 * t.cosh() * T::lit(4.0) * e / ((T::one() + e) * (T::one() + e));
        let d = width * e / (T::one() + e);
        if d <= min_dist || w == T::zero() {
            return T::zero();
        }
        let right = f(b - d, width - d, d);
        let left = f(a + d, d, width - d);
        w * (left + right)
    };

    let mut h = T::one();
    let mut sum = center;
    let mut k = 1usize;
    loop {
        let t = h * T::of(k);
        if t > t_max {
            break;
        }
        sum = sum + pair(t);
        k += 1;
    }
    let mut estimate = h * sum;

    for level in 1..=max_level.min(MAX_LEVEL) {
        h = h * T::lit(0.5);
        let mut k = 1usize;
        loop {
            let t = h * T::of(k);
            if t > t_max {
                break;
            }
            sum = sum + pair(t);
            k += 2;
        }
        let next = h * sum;
        let delta = (next - estimate).abs();
        estimate = next;
        if level >= 3 && delta <= tol * estimate.abs() {
            break;
        }
        if level >= 3 && estimate == T::zero() && delta == T::zero() {
            break;
        }
    }
    estimate
}

/// [`tanh_sinh`] applied on each piece of a partition of `[breaks[0], breaks[last]]`.
///
/// The integrand receives distances to the ends of the whole interval, exact
/// on the first and last pieces.
pub fn tanh_sinh_split<T, F>(mut f: F, breaks: &[T], tol: T) -> T
where
    T: Real,
    F: FnMut(T, T, T) -> T,
{
    let n = breaks.len();
    if n < 2 {
        return T::zero();
    }
    let (lo, hi) = (breaks[0], breaks[n - 1]);
    breaks
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let first = i == 0;
            let last = i == n - 2;
            tanh_sinh(
                |x, da, db| {
                    let to_lo = if first { da } else { x - lo };
                    let to_hi = if last { db } else { hi - x };
                    f(x, to_lo, to_hi)
                },
                w[0],
                w[1],
                tol,
            )
        })
        .sum()
}

/// Gauss-Legendre nodes and weights of order `n` on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, refined by Newton on P_n
        let mut x = (T::PI() * (T::of(i) + T::lit(0.75)) / (T::of(n) + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let d = T::of(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| gauss_legendre(8))
}

/// Moments `(∫₀^Δ (A+w)^p dw, ∫₀^Δ w (A+w)^p dw)` for `A ≥ 0`, `Δ > 0`.
///
/// When `A = 0` the zeroth moment diverges for `p ≤ -1`; it is returned as
/// infinity and callers must only combine it with a vanishing coefficient.
pub fn power_moments<T: Real>(offset: T, delta: T, p: T) -> (T, T) {
    let one = T::one();
    let two = T::lit(2.0);
    if offset == T::zero() {
        let m0 = if p > -one {
            delta.powf(p + one) / (p + one)
        } else {
            T::infinity()
        };
        let m1 = delta.powf(p + two) / (p + two);
        return (m0, m1);
    }
    if offset > T::lit(8.0) * delta {
        // smooth on the cell: 8-point Gauss-Legendre is at round-off level here
        let (x, w) = gl8();
        let half = delta * T::lit(0.5);
        let mut m0 = T::zero();
        let mut m1 = T::zero();
        for (xi, wi) in x.iter().zip(w) {
            let s = half * (T::lit(*xi) + one);
            let v = (offset + s).powf(p) * T::lit(*wi) * half;
            m0 = m0 + v;
            m1 = m1 + v * s;
        }
        return (m0, m1);
    }
    let end = offset + delta;
    let m0 = (end.powf(p + one) - offset.powf(p + one)) / (p + one);
    let m2 = (end.powf(p + two) - offset.powf(p + two)) / (p + two);
    (m0, m2 - offset * m0)
}

/// Composite trapezoid weights for a non-decreasing grid.
pub fn trapezoid_weights<T: Real>(grid: &[T]) -> Vec<T> {
    let mut w = vec![T::zero(); grid.len()];
    for i in 1..grid.len() {
        let h = (grid[i] - grid[i - 1]) * T::lit(0.5);
        w[i - 1] = w[i - 1] + h;
        w[i] = w[i] + h;
    }
    w
}
