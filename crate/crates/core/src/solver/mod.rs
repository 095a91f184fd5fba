//! Mild solutions and the pathwise `v`-equation.
//!
//! With `u = v + z`, the random equation
//! `dv/dt + μ₁Av + B(v + z) + N(v + z) = 0` is solved by exponential Euler;
//! short windows can also be solved as fixed points of the mild formulation
//! by Picard iteration.

mod energy;
mod picard;
mod stepper;

pub use energy::{
    a_priori_check, energy_monitor, gronwall_envelope, integrate_envelope, AprioriReport, EnergyReport,
    G2Constants, Violation,
};
pub use picard::{picard_local_solve, x_norm, PicardReport};
pub use stepper::{global_solve, step_v_equation, Trajectory};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid::{FluidOps, FluidParams};
use crate::spectral::SpectralVelocityField;

type Field = SpectralVelocityField<f64>;

/// Discretization controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub dt: f64,
    pub m_max: usize,
    /// Picard stopping tolerance on successive `X`-norm distances.
    pub tol: f64,
    pub max_picard: usize,
    pub t_final: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 256.0,
            m_max: 8,
            tol: 1e-10,
            max_picard: 60,
            t_final: 1.0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.dt > 0.0) {
            bad.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.tol > 0.0) {
            bad.push(format!("tol must be positive, got {}", self.tol));
        }
        if self.m_max == 0 {
            bad.push("m_max must be at least 1".to_string());
        }
        if self.max_picard == 0 {
            bad.push("max_picard must be at least 1".to_string());
        }
        if !(self.t_final > 0.0) {
            bad.push(format!("t_final must be positive, got {}", self.t_final));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Number of steps of size `dt` in `[0, t_final]`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// The drift `μ₁A + B + N`, with switches for the nonlinear parts.
#[derive(Debug, Clone)]
pub struct Dynamics {
    ops: FluidOps<f64>,
    pub convection: bool,
    pub viscosity: bool,
}

impl Dynamics {
    pub fn new(m_max: usize, params: FluidParams) -> Result<Self> {
        Ok(Self {
            ops: FluidOps::new(m_max, params)?,
            convection: true,
            viscosity: true,
        })
    }

    /// Only the linear part `μ₁A`.
    pub fn linear(m_max: usize, params: FluidParams) -> Result<Self> {
        Ok(Self {
            convection: false,
            viscosity: false,
            ..Self::new(m_max, params)?
        })
    }

    pub fn ops(&self) -> &FluidOps<f64> {
        &self.ops
    }

    pub fn m_max(&self) -> usize {
        self.ops.m_max()
    }

    pub fn mu1(&self) -> f64 {
        self.ops.params().mu1
    }

    /// `B(u) + N(u)` restricted to the enabled terms.
    pub fn nonlinear(&self, u: &Field) -> Field {
        match (self.convection, self.viscosity) {
            (true, true) => self.ops.nonlinear(u),
            (true, false) => self.ops.b_op(u),
            (false, true) => self.ops.n_op(u),
            (false, false) => Field::zeros(u.m_max()),
        }
    }

    pub fn is_linear(&self) -> bool {
        !(self.convection || self.viscosity)
    }
}

/// Energy diagnostics carried along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    /// `|v|²`.
    pub l2_sq: f64,
    /// `|v|_V²`.
    pub v_sq: f64,
    /// Running `∫|v|_V² dt` (trapezoid rule).
    pub v_integral: f64,
}

/// One point of a solution of the `v`-equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverState {
    pub t: f64,
    pub v: Field,
    /// The noise term at `t`; `u = v + z`.
    pub z: Field,
    pub energy: Energy,
}

impl SolverState {
    pub fn new(t: f64, v: Field, z: Field) -> Self {
        let energy = Energy {
            l2_sq: v.l2_norm_sq(),
            v_sq: v.v_norm_sq(),
            v_integral: 0.0,
        };
        Self { t, v, z, energy }
    }

    /// `u = v + z`.
    pub fn u(&self) -> Field {
        &self.v + &self.z
    }
}
