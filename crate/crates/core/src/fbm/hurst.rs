use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which parameter regime an operation ran in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `1/4 < h < 1/2`, the regime the convolution theory needs.
    Rough,
    /// `h = 1/2`.
    Brownian,
    /// `0 < h ≤ 1/4`: the fBm exists but the noise convolution does not.
    VeryRough,
    /// `1/2 < h < 1`.
    Smooth,
}

/// Hurst parameter `0 < h < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HurstParam<T> {
    h: T,
}

impl<T: Real> HurstParam<T> {
    pub fn new(h: T) -> Result<Self> {
        if !(h > T::zero() && h < T::one()) {
            return Err(Error::domain(format!("Hurst parameter must lie in (0, 1), got {h}")));
        }
        Ok(Self { h })
    }

    #[inline]
    pub fn value(self) -> T {
        self.h
    }

    pub fn regime(self) -> Regime {
        let q = T::lit(0.25);
        let half = T::lit(0.5);
        if self.h == half {
            Regime::Brownian
        } else if self.h > half {
            Regime::Smooth
        } else if self.h > q {
            Regime::Rough
        } else {
            Regime::VeryRough
        }
    }

    /// Fails unless `1/4 < h < 1/2`; returns the regime otherwise.
    pub fn require_rough(self) -> Result<Regime> {
        match self.regime() {
            Regime::Rough => Ok(Regime::Rough),
            r => Err(Error::domain(format!(
                "operation requires 1/4 < H < 1/2 (4H > 1 and H < 1/2), got H = {} ({r:?})",
                self.h
            ))),
        }
    }

    /// Fails unless `1/4 < h ≤ 1/2`.
    pub fn require_convolution(self) -> Result<Regime> {
        match self.regime() {
            r @ (Regime::Rough | Regime::Brownian) => Ok(r),
            r => Err(Error::domain(format!(
                "stochastic convolution requires H > 1/4 (4H > 1) and H <= 1/2, got H = {} ({r:?})",
                self.h
            ))),
        }
    }
}

/// `R(t, s) = ½(t^{2h} + s^{2h} − |t − s|^{2h})`.
pub fn fbm_covariance<T: Real>(t: T, s: T, h: HurstParam<T>) -> Result<T> {
    if !(t >= T::zero() && s >= T::zero()) {
        return Err(Error::domain(format!("covariance needs nonnegative times, got ({t}, {s})")));
    }
    let two_h = h.value() + h.value();
    let p = |x: T| if x == T::zero() { T::zero() } else { x.powf(two_h) };
    Ok(T::lit(0.5) * (p(t) + p(s) - p((t - s).abs())))
}
