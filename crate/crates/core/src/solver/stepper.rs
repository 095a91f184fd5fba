use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::eigenvalue;
use crate::stoch::phi1;

use super::{Dynamics, Energy, Field, SolverState};

/// One exponential Euler step
/// `v ← e^{−μ₁A dt} v − dt φ₁(μ₁A dt) [B(v+z) + N(v+z)]`, with `z` taken at
/// the left end; the new state carries `z_next`.
pub fn step_v_equation(state: &SolverState, z_next: &Field, dynamics: &Dynamics, dt: f64) -> Result<SolverState> {
    let mu1 = dynamics.mu1();
    let v_next = if dynamics.is_linear() {
        state.v.map_modes(|k, c| c * (-mu1 * eigenvalue::<f64>(k) * dt).exp())
    } else {
        let f = dynamics.nonlinear(&state.u());
        state.v.map_modes(|k, c| {
            let x = mu1 * eigenvalue::<f64>(k) * dt;
            let idx = (k.m - 1) * f.m_max() + (k.n - 1);
            c * (-x).exp() - dt * phi1(x) * f.coeffs()[idx]
        })
    };
    if !v_next.is_finite() {
        return Err(Error::Numerical {
            message: format!("non-finite state after step at t = {}", state.t),
            dump: serde_json::to_string(state).ok(),
        });
    }
    let (l2_sq, v_sq) = (v_next.l2_norm_sq(), v_next.v_norm_sq());
    Ok(SolverState {
        t: state.t + dt,
        v: v_next,
        z: z_next.clone(),
        energy: Energy {
            l2_sq,
            v_sq,
            v_integral: state.energy.v_integral + 0.5 * dt * (state.energy.v_sq + v_sq),
        },
    })
}

/// States at every step of a solve.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<SolverState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &SolverState {
        self.states.last().expect("trajectory has its initial state")
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn sup_l2_sq(&self) -> f64 {
        self.states.iter().fold(0.0, |m, s| m.max(s.energy.l2_sq))
    }

    /// `sup|v| + (∫|v|_V²)^{1/2}`.
    pub fn x_norm(&self) -> f64 {
        self.sup_l2_sq().sqrt() + self.last().energy.v_integral.sqrt()
    }

    /// Rows `t, |v|², |v|_V², |u|², |z|²`.
    pub fn csv_rows(&self) -> Vec<[f64; 5]> {
        self.states
            .iter()
            .map(|s| [s.t, s.energy.l2_sq, s.energy.v_sq, s.u().l2_norm_sq(), s.z.l2_norm_sq()])
            .collect()
    }
}

/// Steps the `v`-equation over the whole noise grid `z[0..]`, starting from
/// `v(t0) = u0 − z[0]`.
pub fn global_solve(u0: &Field, z: &[Field], t0: f64, dt: f64, dynamics: &Dynamics) -> Result<Trajectory> {
    if z.is_empty() {
        return Err(Error::domain("global solve needs the noise term at the start time"));
    }
    if u0.m_max() != dynamics.m_max() || z[0].m_max() != dynamics.m_max() {
        return Err(Error::domain("initial data, noise and dynamics must share the truncation"));
    }
    let mut states = Vec::with_capacity(z.len());
    states.push(SolverState::new(t0, u0 - &z[0], z[0].clone()));
    for zk in &z[1..] {
        let next = step_v_equation(states.last().expect("nonempty"), zk, dynamics, dt)?;
        states.push(next);
    }
    Ok(Trajectory { dt, states })
}
