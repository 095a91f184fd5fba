//! Volterra kernel `K_H(t, s)` with `β^H(t) = ∫₀^t K_H(t, s) dW(s)`, for `H ≤ 1/2`.
//!
//! ```text
//! K_H(t,s) = c_H [ (t/s)^{H-1/2} (t-s)^{H-1/2}
//!                  + (1/2 - H) s^{H-1/2} ∫₀^{1-s/t} w^{H-1/2} (1-w)^{-2H} dw ]
//! ∂K_H/∂t  = c_H (H - 1/2) (t-s)^{H-3/2} (s/t)^{1/2-H}
//! ```
//!
//! The bracket is the classical `s^{1/2-H}∫_s^t u^{H-3/2}(u-s)^{H-1/2}du`
//! form after the substitution `u = s/(1-w)`, which turns it into an
//! incomplete beta integral with integrable endpoint singularities.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::scalar::Real;

use super::hurst::HurstParam;

/// Kernel for a fixed Hurst parameter, with `c_H` fixed by
/// `∫₀¹ K_H(1, s)² ds = 1`.
#[derive(Debug, Clone, Copy)]
pub struct VolterraKernel<T> {
    hurst: HurstParam<T>,
    c_h: T,
}

impl<T: Real> VolterraKernel<T> {
    pub fn new(hurst: HurstParam<T>) -> Result<Self> {
        let h = hurst.value();
        let half = T::lit(0.5);
        if h > half {
            return Err(Error::domain(format!("kernel implemented for H <= 1/2, got {h}")));
        }
        if h == half {
            return Ok(Self { hurst, c_h: T::one() });
        }
        let probe = Self { hurst, c_h: T::one() };
        // unnormalized kernel is linear in c_H, so the normalization is a plain rescaling
        let tol = quad_tol::<T>();
        let norm_sq = tanh_sinh(
            |s, ds, dt_s| {
                let k = probe.raw(T::one(), s.max(ds), dt_s);
                k * k
            },
            T::zero(),
            T::one(),
            tol,
        );
        Ok(Self {
            hurst,
            c_h: norm_sq.sqrt().recip(),
        })
    }

    pub fn hurst(&self) -> HurstParam<T> {
        self.hurst
    }

    pub fn c_h(&self) -> T {
        self.c_h
    }

    /// `K_H(t, s)` for `0 < s < t`.
    pub fn eval(&self, t: T, s: T) -> Result<T> {
        check_args(t, s)?;
        Ok(self.eval_gap(t, s, t - s))
    }

    /// `K_H(t, s)` given `t − s` separately, to keep accuracy near the diagonal.
    pub fn eval_gap(&self, t: T, s: T, gap: T) -> T {
        if self.hurst.value() == T::lit(0.5) {
            return T::one();
        }
        self.c_h * self.raw(t, s, gap)
    }

    fn raw(&self, t: T, s: T, gap: T) -> T {
        let h = self.hurst.value();
        let half = T::lit(0.5);
        let a = h - half;
        let lead = (t / s).powf(a) * gap.powf(a);
        let x = gap / t;
        let one_minus_x = s / t;
        let b = -(h + h);
        let tail = tanh_sinh(
            |_, dw, dx| dw.powf(a) * (one_minus_x + dx).powf(b),
            T::zero(),
            x,
            quad_tol::<T>(),
        );
        lead + (half - h) * s.powf(a) * tail
    }

    /// `∂K_H/∂t (t, s)` for `0 < s < t`.
    pub fn dkdt(&self, t: T, s: T) -> Result<T> {
        check_args(t, s)?;
        Ok(self.dkdt_gap(t, s, t - s))
    }

    pub fn dkdt_gap(&self, t: T, s: T, gap: T) -> T {
        let h = self.hurst.value();
        let half = T::lit(0.5);
        if h == half {
            return T::zero();
        }
        self.c_h * (h - half) * gap.powf(h - T::lit(1.5)) * (s / t).powf(half - h)
    }

    /// `K_H(t,s) / ((t−s)^{H−1/2} s^{H−1/2})`, the quantity bounded by `C(H)`.
    pub fn bound_ratio(&self, t: T, s: T) -> Result<T> {
        let k = self.eval(t, s)?;
        let a = self.hurst.value() - T::lit(0.5);
        Ok(k / ((t - s).powf(a) * s.powf(a)))
    }
}

fn quad_tol<T: Real>() -> T {
    (T::epsilon() * T::lit(1e4)).max(T::lit(1e-13))
}

fn check_args<T: Real>(t: T, s: T) -> Result<()> {
    if !(s > T::zero() && s < t) {
        return Err(Error::domain(format!("kernel needs 0 < s < t, got t = {t}, s = {s}")));
    }
    Ok(())
}
