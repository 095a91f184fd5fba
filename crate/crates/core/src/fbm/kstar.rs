//! The transfer operator
//!
//! ```text
//! (K*_t φ)(s) = K(t,s) φ(s) + ∫_s^t (φ(r) − φ(s)) ∂K/∂r(r,s) dr,
//! ```
//!
//! which maps integrands against `β^H` on `[0, t]` to integrands against the
//! underlying Wiener process, isometrically onto `L²(0, t)`.
//!
//! The integral is evaluated by product integration: on each piece the
//! factor `(r − s)^{H−3/2}` is integrated exactly against the linear
//! interpolant of `g(r) = (φ(r) − φ(s)) (s/r)^{1/2−H}`. Pieces are split
//! geometrically so that `s/r` varies by at most a few percent on each.

use crate::error::{Error, Result};
use crate::quad::{power_moments, tanh_sinh_capped};
use crate::scalar::Real;

use super::kernel::VolterraKernel;
use super::sampled::SampledFunction;

/// Relative width of product-integration pieces, measured from their left end.
const PIECE_RATIO: f64 = 1.0 / 32.0;
/// Uniform sub-intervals used between singular points for `L²` quadrature
/// when `φ` has few nodes.
const L2_PIECES: usize = 8;
/// Cap on the number of `L²` quadrature pieces.
const MAX_L2_NODES: usize = 512;
/// Refinement level used on partitions finer than `L2_PIECES`.
const FINE_LEVEL: usize = 4;
const L2_TOL: f64 = 1e-9;

/// `K*_t φ` as an evaluable function on `(0, t)`.
#[derive(Debug, Clone)]
pub struct KStarImage<T> {
    phi: SampledFunction<T>,
    t: T,
    kernel: VolterraKernel<T>,
}

/// Builds `K*_t φ`; `φ` must be sampled on a grid covering `[0, t]`.
pub fn kstar_apply<T: Real>(
    phi: &SampledFunction<T>,
    t: T,
    kernel: &VolterraKernel<T>,
) -> Result<KStarImage<T>> {
    let (lo, hi) = phi.domain();
    if !(t > T::zero()) || lo > T::zero() || hi < t {
        return Err(Error::domain(format!(
            "integrand grid [{lo}, {hi}] does not cover [0, {t}]"
        )));
    }
    Ok(KStarImage {
        phi: phi.clone(),
        t,
        kernel: *kernel,
    })
}

impl<T: Real> KStarImage<T> {
    pub fn t(&self) -> T {
        self.t
    }

    /// `(K*_t φ)(s)` for `0 < s < t`.
    pub fn eval(&self, s: T) -> Result<T> {
        if !(s > T::zero() && s < self.t) {
            return Err(Error::domain(format!("K* image is defined on (0, {}), got {s}", self.t)));
        }
        Ok(self.eval_inner(s, self.t - s))
    }

    /// Evaluation with `t − s` supplied by the caller.
    fn eval_inner(&self, s: T, gap: T) -> T {
        let t = self.t;
        let h = self.kernel.hurst().value();
        let phi_s = self.phi.eval(s);
        let head = if phi_s == T::zero() {
            T::zero()
        } else {
            self.kernel.eval_gap(t, s, gap) * phi_s
        };
        if h == T::lit(0.5) {
            return head;
        }
        let gamma = T::lit(0.5) - h;
        let p = h - T::lit(1.5);
        let ratio = T::lit(PIECE_RATIO);
        let g = |r: T, phi_r: T| (phi_r - phi_s) * (s / r).powf(gamma);

        let grid = self.phi.grid();
        let vals = self.phi.values();
        let start = grid.partition_point(|&x| x <= s).saturating_sub(1);
        let mut acc = T::zero();
        for i in start..grid.len() - 1 {
            let (x0, x1) = (grid[i], grid[i + 1]);
            if x0 >= t {
                break;
            }
            if !(x1 > x0) || x1 <= s {
                continue;
            }
            let slope = (vals[i + 1] - vals[i]) / (x1 - x0);
            let phi_at = |r: T| vals[i] + slope * (r - x0);
            let a = x0.max(s);
            let b = x1.min(t);
            let mut p0 = a;
            let mut g0 = g(p0, phi_at(p0));
            while p0 < b {
                let step = ratio * p0;
                let p1 = if p0 + step >= b || b - (p0 + step) < step * T::lit(0.25) {
                    b
                } else {
                    p0 + step
                };
                let g1 = g(p1, phi_at(p1));
                let delta = p1 - p0;
                let offset = p0 - s;
                let (m0, m1) = power_moments(offset, delta, p);
                let lin = (g1 - g0) / delta * m1;
                acc = acc + if offset == T::zero() { lin } else { g0 * m0 + lin };
                p0 = p1;
                g0 = g1;
            }
        }
        head + self.kernel.c_h() * (h - T::lit(0.5)) * acc
    }

    /// Points where the image is singular or non-smooth: `0`, `t`, jumps of `φ`
    /// and the nodes of its piecewise-linear interpolant.
    fn breaks(&self, other: Option<&Self>) -> Vec<T> {
        let inside = |x: &T| *x > T::zero() && *x < self.t;
        let mut pts = vec![T::zero(), self.t];
        pts.extend(self.phi.grid().iter().copied().filter(inside));
        if let Some(o) = other {
            pts.extend(o.phi.grid().iter().copied().filter(inside));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup();
        if pts.len() > MAX_L2_NODES {
            // keep the ends and jumps, thin the smooth interior nodes
            let stride = pts.len().div_ceil(MAX_L2_NODES);
            let mut jumps = self.phi.jumps();
            if let Some(o) = other {
                jumps.extend(o.phi.jumps());
            }
            let last = pts.len() - 1;
            pts = pts
                .iter()
                .enumerate()
                .filter(|(i, x)| *i == 0 || *i == last || i % stride == 0 || jumps.contains(x))
                .map(|(_, x)| *x)
                .collect();
        }
        if pts.len() > L2_PIECES {
            return pts;
        }
        let mut fine = Vec::with_capacity(pts.len() * L2_PIECES);
        for w in pts.windows(2) {
            for k in 0..L2_PIECES {
                fine.push(w[0] + (w[1] - w[0]) * T::of(k) / T::of(L2_PIECES));
            }
        }
        fine.push(self.t);
        fine
    }

    /// `∫₀^t (K*φ)(s) (K*ψ)(s) ds`.
    pub fn l2_inner(&self, other: &Self) -> Result<T> {
        if self.t != other.t {
            return Err(Error::domain("K* images must share the same end time"));
        }
        let breaks = self.breaks(Some(other));
        Ok(self.integrate(&breaks, |s, gap| self.eval_inner(s, gap) * other.eval_inner(s, gap)))
    }

    /// Piecewise tanh-sinh over `breaks`, passing an accurate `t − s` on the last piece.
    ///
    /// The product-integration error makes the image slightly rough in `s`;
    /// on fine partitions the rule therefore stops at a fixed refinement.
    fn integrate(&self, breaks: &[T], f: impl Fn(T, T) -> T) -> T {
        let cap = if breaks.len() > L2_PIECES + 1 { FINE_LEVEL } else { usize::MAX };
        breaks
            .windows(2)
            .map(|w| {
                let at_end = w[1] == self.t;
                tanh_sinh_capped(
                    |s, _, db| f(s, if at_end { db } else { self.t - s }),
                    w[0],
                    w[1],
                    T::lit(L2_TOL),
                    cap,
                )
            })
            .sum()
    }

    /// `|K*_t φ|²_{L²(0,t)}`, the variance of `∫₀^t φ dβ^H`.
    pub fn l2_norm_sq(&self) -> T {
        let breaks = self.breaks(None);
        self.integrate(&breaks, |s, gap| {
            let v = self.eval_inner(s, gap);
            v * v
        })
    }

    /// The image sampled at the grid nodes of `φ` strictly inside `(0, t)`.
    pub fn sampled(&self) -> Result<SampledFunction<T>> {
        let mut nodes: Vec<T> = self
            .phi
            .grid()
            .iter()
            .copied()
            .filter(|&x| x > T::zero() && x < self.t)
            .collect();
        nodes.dedup();
        SampledFunction::from_fn(nodes, |s| self.eval_inner(s, self.t - s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{fbm_covariance, HurstParam};

    fn kernel(h: f64) -> VolterraKernel<f64> {
        VolterraKernel::new(HurstParam::new(h).unwrap()).unwrap()
    }

    fn grid(t: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| t * i as f64 / n as f64).collect()
    }

    #[test]
    fn constant_maps_to_kernel() {
        let k = kernel(0.3);
        let one = SampledFunction::from_fn(grid(1.0, 64), |_| 1.0).unwrap();
        let img = kstar_apply(&one, 1.0, &k).unwrap();
        for &s in &[0.01, 0.3, 0.77] {
            assert!((img.eval(s).unwrap() - k.eval(1.0, s).unwrap()).abs() < 1e-13);
        }
        // |K*1|² = Var β^H(1) = 1
        assert!((img.l2_norm_sq() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn indicator_images_reproduce_covariance() {
        let h = 0.3;
        let k = kernel(h);
        let (t_end, t, s) = (1.0, 0.8, 0.5);
        let a = kstar_apply(&SampledFunction::indicator(t, t_end).unwrap(), t_end, &k).unwrap();
        let b = kstar_apply(&SampledFunction::indicator(s, t_end).unwrap(), t_end, &k).unwrap();
        // K*_T 1_{[0,t]} = K(t, ·) on (0, t)
        let x = 0.3;
        assert!((a.eval(x).unwrap() - k.eval(t, x).unwrap()).abs() < 1e-5);
        assert!(a.eval(0.9).unwrap().abs() < 1e-12);
        let v = a.l2_inner(&b).unwrap();
        let want = fbm_covariance(t, s, HurstParam::new(h).unwrap()).unwrap();
        assert!((v - want).abs() < 1e-3, "{v} vs {want}");
    }

    #[test]
    fn brownian_case_is_identity() {
        let k = kernel(0.5);
        let f = SampledFunction::from_fn(grid(1.0, 32), |x| x.sin()).unwrap();
        let img = kstar_apply(&f, 1.0, &k).unwrap();
        assert!((img.eval(0.4).unwrap() - f.eval(0.4)).abs() < 1e-15);
    }

    #[test]
    fn rejects_short_grid() {
        let k = kernel(0.3);
        let f = SampledFunction::from_fn(grid(0.5, 8), |x| x).unwrap();
        assert!(kstar_apply(&f, 1.0, &k).is_err());
    }
}
