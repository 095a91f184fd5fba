use serde::Serialize;

use crate::error::{Error, Result};
use crate::fluid::FluidParams;
use crate::spectral::{dirichlet_beta, riemann_zeta, EstimateConstants};
use crate::stoch::phi1;

use super::{Field, Trajectory};

/// Constants of the energy inequality
/// `d|v|²/dt + (λ₁/2 − C₁|Z|₁²/C₂)|v|² ≤ g₂(Z)`, with
/// `g₂(Z) = (C₁/C₂)|Z|²|Z|₁² + C₁C₂|Z|₁² + μ₀²/(4r₁ε^α)|Z|₁²`.
#[derive(Debug, Clone, Serialize)]
pub struct G2Constants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Admissible interval for `C₂`; empty when `lo ≥ hi`.
    pub c2_window: (f64, f64),
    pub r1: f64,
    pub r2: f64,
    /// `r₂` was taken from the bound `2c₀β(4)ζ(4)` on `E|Z|₁²` because the
    /// measured value left no positive margin.
    pub r2_fallback: bool,
    pub c6: f64,
    pub lambda1: f64,
    pub mu0: f64,
    pub eps: f64,
    pub alpha: f64,
}

impl G2Constants {
    /// Picks `C₂` at nine tenths of its window, `r₁` halfway to the limit
    /// allowed by `λ₁`, and `r₂ = (2 − (C₁/C₂)E|Z|₁²)/2` from a measured mean
    /// when one is given.
    pub fn choose(constants: &EstimateConstants, params: &FluidParams, mean_z_h1: Option<f64>) -> Result<Self> {
        constants.validate()?;
        params.validate()?;
        let (c0, c1, lambda1) = (constants.c0, constants.big_c1, constants.lambda1);
        let lattice = dirichlet_beta(4.0f64)? * riemann_zeta(4.0f64)?;
        let window = (c0 * c1 * lattice, 1.0 / c1);
        let c2 = window.0 + 0.9 * (window.1 - window.0);
        if !(c2 > 0.0) {
            return Err(Error::Validation(vec![format!("no positive C2 in window {window:?}")]));
        }
        let root = lambda1.sqrt();
        let r1 = 0.5 * (0.5 * root - c1 * c2);
        if !(r1 > 0.0) {
            return Err(Error::Validation(vec![format!(
                "C1 C2 = {} leaves no room below sqrt(lambda1)/2",
                c1 * c2
            )]));
        }
        let c6 = 1.0 / (0.5 - (c1 * c2 + r1) / root);
        let display = 2.0 * c0 * lattice;
        let margin = |e: f64| 2.0 - c1 / c2 * e;
        let (r2, r2_fallback) = match mean_z_h1 {
            Some(e) if margin(e) > 0.0 => (0.5 * margin(e), false),
            Some(_) => (0.5 * margin(display), true),
            None => (0.5 * margin(display), false),
        };
        Ok(Self {
            c0,
            c1,
            c2,
            c2_window: window,
            r1,
            r2,
            r2_fallback,
            c6,
            lambda1,
            mu0: params.mu0,
            eps: params.eps,
            alpha: params.alpha,
        })
    }

    pub fn window_is_empty(&self) -> bool {
        self.c2_window.0 >= self.c2_window.1
    }

    /// `C₁/C₂`, the rate in the a-priori exponential.
    pub fn c5(&self) -> f64 {
        self.c1 / self.c2
    }

    pub fn g2(&self, z: &Field) -> f64 {
        let h1 = z.h1_norm_sq();
        let visc = self.mu0 * self.mu0 / (4.0 * self.r1 * self.eps.powf(self.alpha));
        self.c5() * z.l2_norm_sq() * h1 + self.c1 * self.c2 * h1 + visc * h1
    }

    /// `λ₁/2 − C₁|Z|₁²/C₂`.
    pub fn decay_rate(&self, z: &Field) -> f64 {
        0.5 * self.lambda1 - self.c5() * z.h1_norm_sq()
    }
}

/// `y₀e^{−at} + (g/a)(1 − e^{−at})`, the solution of `y' + ay = g`.
pub fn gronwall_envelope(y0: f64, a: f64, g: f64, t: f64) -> f64 {
    let decay = (-a * t).exp();
    y0 * decay + g * t * phi1(a * t)
}

/// Solves `y' + a(t)y = g(t)` exactly for coefficients constant on each step
/// (left values), returning `y` at every node.
pub fn integrate_envelope(a: &[f64], g: &[f64], dt: f64, y0: f64) -> Vec<f64> {
    let mut y = Vec::with_capacity(a.len() + 1);
    y.push(y0);
    for (&ak, &gk) in a.iter().zip(g) {
        let last = *y.last().expect("nonempty");
        y.push(gronwall_envelope(last, ak, gk, dt));
    }
    y
}

/// A step where the discrete energy inequality fails.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Violation {
    pub step: usize,
    pub t: f64,
    /// `lhs − rhs`, before the discretization slack.
    pub excess: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub steps: usize,
    /// Steps failing even with the discretization slack.
    pub violations: Vec<Violation>,
    /// Steps where `lhs > rhs` without slack.
    pub strict_violations: usize,
    /// Largest `lhs − rhs` over all steps.
    pub worst_excess: f64,
    /// Nodes where `|v|²` exceeds the integrated envelope.
    pub envelope_violations: usize,
    pub envelope: Vec<f64>,
}

impl EnergyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the energy inequality step by step along `traj`, whose noise term
/// plays the role of `Z`. The finite difference of `|v|²` is allowed a slack
/// of its second difference.
pub fn energy_monitor(traj: &Trajectory, consts: &G2Constants) -> EnergyReport {
    let dt = traj.dt;
    let e: Vec<f64> = traj.states.iter().map(|s| s.energy.l2_sq).collect();
    let n = e.len().saturating_sub(1);
    let a: Vec<f64> = traj.states[..n].iter().map(|s| consts.decay_rate(&s.z)).collect();
    let g: Vec<f64> = traj.states[..n].iter().map(|s| consts.g2(&s.z)).collect();
    let mut violations = Vec::new();
    let mut strict = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..n {
        let lhs = (e[k + 1] - e[k]) / dt + a[k] * e[k];
        let excess = lhs - g[k];
        let slack = if k == 0 {
            if n >= 2 {
                (e[2] - 2.0 * e[1] + e[0]).abs() / dt
            } else {
                0.0
            }
        } else {
            (e[k + 1] - 2.0 * e[k] + e[k - 1]).abs() / dt
        };
        worst = worst.max(excess);
        if excess > 0.0 {
            strict += 1;
        }
        if excess > slack + 1e-12 * (1.0 + e[k] / dt) {
            violations.push(Violation {
                step: k,
                t: traj.states[k].t,
                excess,
                slack,
            });
        }
    }
    let envelope = integrate_envelope(&a, &g, dt, e.first().copied().unwrap_or(0.0));
    let envelope_violations = e
        .iter()
        .zip(&envelope)
        .filter(|(x, y)| **x > **y * (1.0 + 1e-9) + 1e-14)
        .count();
    EnergyReport {
        steps: n,
        violations,
        strict_violations: strict,
        worst_excess: worst,
        envelope_violations,
        envelope,
    }
}

/// Pathwise a-priori bounds along a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct AprioriReport {
    /// `sup_k |v(t_k)|² / (e^{c₅∫|Z|₁²}(|v₀|² + ∫g₂))`.
    pub sup_ratio: f64,
    pub holds: bool,
    /// `∫₀^T |v|_V²`.
    pub v_integral: f64,
    /// `c₆|v₀|²`.
    pub initial_term: f64,
    /// `∫₀^T g₂(Z)`.
    pub noise_integral: f64,
}

impl AprioriReport {
    /// Smallest `K` with `∫|v|_V² ≤ c₆|v₀|² + K∫g₂` on this trajectory.
    pub fn required_k(&self) -> f64 {
        if self.noise_integral > 0.0 {
            ((self.v_integral - self.initial_term) / self.noise_integral).max(0.0)
        } else {
            0.0
        }
    }

    pub fn integral_bound_holds(&self, k: f64) -> bool {
        self.v_integral <= self.initial_term + k * self.noise_integral
    }
}

pub fn a_priori_check(traj: &Trajectory, consts: &G2Constants) -> AprioriReport {
    let dt = traj.dt;
    let v0 = traj.states[0].energy.l2_sq;
    let mut exponent = 0.0;
    let mut noise = 0.0;
    let mut sup_ratio = if v0 > 0.0 { 1.0 } else { 0.0 };
    let mut prev = (traj.states[0].z.h1_norm_sq(), consts.g2(&traj.states[0].z));
    for s in &traj.states[1..] {
        let cur = (s.z.h1_norm_sq(), consts.g2(&s.z));
        exponent += 0.5 * dt * (prev.0 + cur.0);
        noise += 0.5 * dt * (prev.1 + cur.1);
        prev = cur;
        let bound = (consts.c5() * exponent).exp() * (v0 + noise);
        if bound > 0.0 {
            sup_ratio = f64::max(sup_ratio, s.energy.l2_sq / bound);
        } else if s.energy.l2_sq > 0.0 {
            sup_ratio = f64::INFINITY;
        }
    }
    AprioriReport {
        sup_ratio,
        holds: sup_ratio <= 1.0 + 1e-9,
        v_integral: traj.last().energy.v_integral,
        initial_term: consts.c6 * v0,
        noise_integral: noise,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluid::FluidParams;
    use crate::seed::rng;
    use crate::solver::{global_solve, Dynamics};
    use crate::stoch::{scaled_convolution_trajectory, NoiseRealization};
    use crate::fbm::HurstParam;

    fn consts() -> G2Constants {
        G2Constants::choose(&EstimateConstants::default(), &FluidParams::default(), None).unwrap()
    }

    #[test]
    fn chosen_constants_are_admissible() {
        let c = consts();
        assert!(!c.window_is_empty());
        assert!(c.c2 > c.c2_window.0 && c.c2 < c.c2_window.1);
        assert!(c.r1 > 0.0 && c.c6 > 0.0 && c.r2 > 0.0);
        assert!(c.c1 * c.c2 + c.r1 < 0.5 * c.lambda1.sqrt());
        let fallback = G2Constants::choose(&EstimateConstants::default(), &FluidParams::default(), Some(1e6)).unwrap();
        assert!(fallback.r2_fallback);
        assert_eq!(fallback.r2, c.r2);
    }

    #[test]
    fn envelope_matches_closed_form() {
        let (a, g, y0) = (1.7, 0.4, 2.0);
        let y = integrate_envelope(&[a; 100], &[g; 100], 0.01, y0);
        let exact = y0 * (-a).exp() + g / a * (1.0 - (-a).exp());
        assert!((y[100] - exact).abs() < 1e-12);
        assert!((gronwall_envelope(y0, 0.0, g, 1.0) - (y0 + g)).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_reduces_to_decay() {
        let d = Dynamics::new(4, FluidParams::default()).unwrap();
        let u0 = Field::random(4, 1.0, &mut rng(5));
        let z = vec![Field::zeros(4); 257];
        let tr = global_solve(&u0, &z, 0.0, 1.0 / 256.0, &d).unwrap();
        let c = consts();
        assert_eq!(c.g2(&z[0]), 0.0);
        let r = energy_monitor(&tr, &c);
        assert!(r.holds() && r.strict_violations == 0, "{:?}", r.worst_excess);
        // the sharper form with the full first eigenvalue
        for w in tr.states.windows(2) {
            let (e0, e1) = (w[0].energy.l2_sq, w[1].energy.l2_sq);
            assert!((e1 - e0) / tr.dt + c.lambda1 * e1 <= 1e-12);
        }
    }

    #[test]
    fn monitor_and_bounds_along_noisy_path() {
        let m = 4;
        let noise = NoiseRealization::generate(HurstParam::new(0.35).unwrap(), m, 0.0, 2.0, 1.0 / 256.0, 11).unwrap();
        let z = scaled_convolution_trajectory(&noise, 1.0).unwrap();
        let d = Dynamics::new(m, FluidParams::default()).unwrap();
        let u0 = Field::random(m, 1.0, &mut rng(12));
        let tr = global_solve(&u0, &z, 0.0, noise.dt, &d).unwrap();
        let c = consts();
        let r = energy_monitor(&tr, &c);
        assert!(r.holds(), "{:?}", r.violations.first());
        assert_eq!(r.envelope_violations, 0);
        let a = a_priori_check(&tr, &c);
        assert!(a.holds, "{}", a.sup_ratio);
        assert!(a.integral_bound_holds(a.required_k()));
    }
}
