//! Per-mode pieces `I₁`, `I₂` of the convolution variance bound.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fbm::{HurstParam, VolterraKernel};
use crate::quad::tanh_sinh_split;
use crate::spectral::{lattice_sum_upper_bound, modes};

use super::lemma2::lemma2_integral;

const OUTER_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-10;

/// `[0, u − 64/λ, …, u − 1/λ, u]`, dropping points outside `(0, u)`.
fn scale_breaks(u: f64, lambda: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut c = 64.0;
    while c >= 1.0 {
        let x = u - c / lambda;
        if x > *b.last().expect("nonempty") {
            b.push(x);
        }
        c *= 0.5;
    }
    b.push(u);
    b
}

/// Quadratures for one eigenvalue.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeTerms {
    /// `m² + n²`.
    pub k2: usize,
    pub lambda: f64,
    /// `∫₀^t e^{−2λ(t−s)} K(t,s)² ds`.
    pub i1: f64,
    /// `∫₀^t (∫_s^t (e^{−λ(t−r)} − e^{−λ(t−s)}) ∂K/∂r(r,s) dr)² ds`.
    pub i2: f64,
    /// `C(H)² λ^{−2H} L(λt)` with `C(H) = c_H(½ − H)` bounding `|∂K/∂r| (r−s)^{3/2−H}`
    /// and `L` the damped integral of the corrected constant.
    pub i2_bound: f64,
}

fn mode_terms(kernel: &VolterraKernel<f64>, k2: usize, t: f64) -> ModeTerms {
    let h = kernel.hurst().value();
    let lambda = (k2 * k2) as f64;
    let outer = scale_breaks(t, lambda);
    let i1 = tanh_sinh_split(
        |s, _, u| {
            let k = kernel.eval_gap(t, s, u);
            (-2.0 * lambda * u).exp() * k * k
        },
        &outer,
        OUTER_TOL,
    );
    let scale = kernel.c_h() * (h - 0.5);
    let i2 = tanh_sinh_split(
        |s, _, u| {
            if s <= 0.0 {
                return 0.0;
            }
            let e_u = (-lambda * u).exp();
            let j = tanh_sinh_split(
                |v, _, rest| {
                    // (e^{−λ(u−v)} − e^{−λu}) ∂K/∂r(s+v, s), with the v^{H−3/2}
                    // factor split so tiny nodes stay finite
                    let w_over_v = if lambda * v < 1.0 {
                        e_u * (lambda * v).exp_m1() / v
                    } else {
                        ((-lambda * rest).exp() - e_u) / v
                    };
                    w_over_v * scale * v.powf(h - 0.5) * (s / (s + v)).powf(0.5 - h)
                },
                &scale_breaks(u, lambda),
                INNER_TOL,
            );
            j * j
        },
        &outer,
        OUTER_TOL,
    );
    let c = kernel.c_h() * (0.5 - h);
    let i2_bound = c * c * lambda.powf(-2.0 * h) * lemma2_integral(h, lambda * t);
    ModeTerms {
        k2,
        lambda,
        i1,
        i2,
        i2_bound,
    }
}

/// Result of [`i1_i2_diagnostics`].
#[derive(Debug, Clone, Serialize)]
pub struct I1I2Report {
    pub hurst: f64,
    pub t: f64,
    pub m_max: usize,
    /// One entry per distinct `m² + n²`, increasing.
    pub terms: Vec<ModeTerms>,
    /// `(M, Σ_{m,n≤M} (I₁ + I₂))` for `M = 1..=m_max`.
    pub partial_sums: Vec<(usize, f64)>,
    /// `(I₁ + I₂)(1,1) · λ₁^{2H}`.
    pub fitted_c: f64,
    /// `fitted_c · 2β(4H)ζ(4H)`.
    pub bound: f64,
    /// Every `I₁ + I₂ ≤ fitted_c · λ^{−2H}`.
    pub termwise_ok: bool,
    /// Every `I₂ ≤ i2_bound` (up to quadrature tolerance).
    pub i2_lemma_ok: bool,
    /// Partial sums nondecreasing and at most `bound`.
    pub bounded: bool,
}

impl I1I2Report {
    pub fn term(&self, k2: usize) -> Option<&ModeTerms> {
        self.terms.iter().find(|m| m.k2 == k2)
    }

    pub fn partial_sum(&self, m: usize) -> Option<f64> {
        self.partial_sums.iter().find(|(k, _)| *k == m).map(|(_, s)| *s)
    }
}

/// Computes `I₁`, `I₂` per eigenvalue at time `t`, their lattice partial sums
/// and the `β/ζ` bound with the constant fitted on mode `(1,1)`.
pub fn i1_i2_diagnostics(hurst: HurstParam<f64>, t: f64, m_max: usize) -> Result<I1I2Report> {
    hurst.require_convolution()?;
    let kernel = VolterraKernel::new(hurst)?;
    let h = hurst.value();
    let k2s: Vec<usize> = modes(m_max)
        .map(|k| k.k2())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let terms: Vec<ModeTerms> = k2s.par_iter().map(|&k2| mode_terms(&kernel, k2, t)).collect();
    let by_k2: BTreeMap<usize, &ModeTerms> = terms.iter().map(|m| (m.k2, m)).collect();

    let mut partial_sums = Vec::with_capacity(m_max);
    let mut acc = 0.0;
    for big_m in 1..=m_max {
        // the new L-shaped shell of the square, smallest terms first
        let mut shell: Vec<f64> = (1..=big_m)
            .flat_map(|j| {
                let a = by_k2[&(big_m * big_m + j * j)];
                let first = a.i1 + a.i2;
                (j < big_m).then_some(first).into_iter().chain(std::iter::once(first))
            })
            .collect();
        shell.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        acc += shell.iter().sum::<f64>();
        partial_sums.push((big_m, acc));
    }

    let first = by_k2[&2];
    let fitted_c = (first.i1 + first.i2) * first.lambda.powf(2.0 * h);
    let bound = fitted_c * lattice_sum_upper_bound(4.0 * h)?;
    let termwise_ok = terms
        .iter()
        .all(|m| m.i1 + m.i2 <= fitted_c * m.lambda.powf(-2.0 * h) * (1.0 + 1e-8));
    let i2_lemma_ok = terms.iter().all(|m| m.i2 <= m.i2_bound * (1.0 + 1e-6));
    let bounded = partial_sums.windows(2).all(|w| w[1].1 >= w[0].1)
        && partial_sums.iter().all(|(_, s)| *s <= bound);
    Ok(I1I2Report {
        hurst: h,
        t,
        m_max,
        terms,
        partial_sums,
        fitted_c,
        bound,
        termwise_ok,
        i2_lemma_ok,
        bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stoch::variance::mode_variance;

    #[test]
    fn variance_is_dominated_by_twice_the_sum() {
        let h = HurstParam::new(0.3).unwrap();
        let r = i1_i2_diagnostics(h, 1.0, 3).unwrap();
        for m in &r.terms {
            let v = mode_variance(h, m.lambda, 1.0);
            assert!(v <= 2.0 * (m.i1 + m.i2), "k2 = {}: {v}", m.k2);
            assert!(m.i1 > 0.0 && m.i2 > 0.0);
        }
        assert!(r.i2_lemma_ok);
        assert!(r.bounded, "{:?}", r.partial_sums);
    }

    #[test]
    fn brownian_kernel_has_no_second_term() {
        let h = HurstParam::new(0.5).unwrap();
        let r = i1_i2_diagnostics(h, 1.0, 1).unwrap();
        let m = r.terms[0];
        assert_eq!(m.i2, 0.0);
        // ∫₀¹ e^{−8(1−s)} ds
        assert!((m.i1 - (1.0 - (-8.0f64).exp()) / 8.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_h_below_quarter() {
        assert!(i1_i2_diagnostics(HurstParam::new(0.25).unwrap(), 1.0, 2).is_err());
    }
}
