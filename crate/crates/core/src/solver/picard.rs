use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::eigenvalue;
use crate::stoch::{phi1, phi2};

use super::{Dynamics, Field};

/// `max_k |w_k| + (Σ_k ω_k |w_k|_V²)^{1/2}` with trapezoid weights `ω_k`.
pub fn x_norm(path: &[Field], dt: f64) -> f64 {
    let n = path.len();
    let mut sup = 0.0f64;
    let mut integral = 0.0;
    for (k, w) in path.iter().enumerate() {
        sup = sup.max(w.l2_norm_sq());
        let weight = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
        integral += weight * dt * w.v_norm_sq();
    }
    sup.sqrt() + integral.sqrt()
}

/// Outcome of [`picard_local_solve`].
#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    /// `u` at every node.
    pub u: Vec<Field>,
    /// Accepted windows as node ranges.
    pub windows: Vec<(usize, usize)>,
    /// Successive-iterate distances per accepted window.
    pub distances: Vec<Vec<f64>>,
    /// Window halvings performed.
    pub shrinks: usize,
}

impl PicardReport {
    /// Ratios `d_{k+1}/d_k` for `k ≥ 2` above the noise floor, over all windows.
    pub fn late_ratios(&self, floor: f64) -> Vec<f64> {
        self.distances
            .iter()
            .flat_map(|d| {
                d.windows(2)
                    .enumerate()
                    .filter(move |(k, w)| *k >= 2 && w[1] > floor)
                    .map(|(_, w)| w[1] / w[0])
            })
            .collect()
    }

    pub fn iterations(&self) -> usize {
        self.distances.iter().map(Vec::len).sum()
    }
}

/// Largest ratio of successive distances tolerated before the window shrinks.
const CONTRACTION: f64 = 0.5;

/// `u = S(·)(u0 − z(0)) + z + J(u)` on the nodes of `z`, where
/// `J(u)(t) = −∫₀^t S(t − s)(B + N)(u(s)) ds` uses the linear interpolant of
/// the drift on each step.
///
/// Windows start at the full span and are halved until successive distances
/// contract by at most one half from the third iterate on; the solution is
/// then continued window by window.
pub fn picard_local_solve(
    u0: &Field,
    z: &[Field],
    dt: f64,
    dynamics: &Dynamics,
    tol: f64,
    max_iter: usize,
) -> Result<PicardReport> {
    if z.len() < 2 {
        return Err(Error::domain("Picard solve needs at least one step"));
    }
    let total = z.len() - 1;
    let mut u = vec![u0.clone()];
    let mut windows = Vec::new();
    let mut distances = Vec::new();
    let mut shrinks = 0;
    let mut start = 0;
    let mut width = total;
    while start < total {
        let end = (start + width).min(total);
        let anchor = u[start].clone();
        match solve_window(&anchor, &z[start..=end], dt, dynamics, tol, max_iter)? {
            Some((path, d)) => {
                u.extend(path.into_iter().skip(1));
                windows.push((start, end));
                distances.push(d);
                start = end;
            }
            None if width > 1 => {
                width = width.div_ceil(2);
                shrinks += 1;
            }
            None => {
                return Err(Error::Numerical {
                    message: format!("Picard map does not contract on a single step at node {start}"),
                    dump: serde_json::to_string(&anchor).ok(),
                })
            }
        }
    }
    Ok(PicardReport {
        u,
        windows,
        distances,
        shrinks,
    })
}

type WindowResult = Option<(Vec<Field>, Vec<f64>)>;

fn solve_window(u_start: &Field, z: &[Field], dt: f64, dynamics: &Dynamics, tol: f64, max_iter: usize) -> Result<WindowResult> {
    let n = z.len() - 1;
    let mu1 = dynamics.mu1();
    let m = u_start.m_max();
    let rates: Vec<f64> = u_start.modes().map(|k| mu1 * eigenvalue::<f64>(k) * dt).collect();
    let decay: Vec<f64> = rates.iter().map(|x| (-x).exp()).collect();
    let w_left: Vec<f64> = rates.iter().map(|&x| dt * (phi1(x) - phi2(x))).collect();
    let w_right: Vec<f64> = rates.iter().map(|&x| dt * phi2(x)).collect();

    let v0 = u_start - &z[0];
    let mut phi = Vec::with_capacity(n + 1);
    let mut s = v0;
    for (k, zk) in z.iter().enumerate() {
        if k > 0 {
            s = s.map_modes(|mode, c| c * decay[(mode.m - 1) * m + mode.n - 1]);
        }
        phi.push(&s + zk);
    }

    let mut iterate = phi.clone();
    let mut dists: Vec<f64> = Vec::new();
    for _ in 0..max_iter {
        if dynamics.is_linear() {
            dists.push(0.0);
            return Ok(Some((iterate, dists)));
        }
        let drift: Vec<Field> = iterate.iter().map(|u| dynamics.nonlinear(u)).collect();
        let mut next = Vec::with_capacity(n + 1);
        let mut j = vec![0.0; m * m];
        next.push(phi[0].clone());
        for k in 0..n {
            let (f0, f1) = (drift[k].coeffs(), drift[k + 1].coeffs());
            for i in 0..j.len() {
                j[i] = decay[i] * j[i] - (w_left[i] * f0[i] + w_right[i] * f1[i]);
            }
            let mut u = phi[k + 1].clone();
            for (c, ji) in u.coeffs_mut().iter_mut().zip(&j) {
                *c += ji;
            }
            next.push(u);
        }
        let diff: Vec<Field> = next.iter().zip(&iterate).map(|(a, b)| a - b).collect();
        let d = x_norm(&diff, dt);
        if !d.is_finite() {
            return Err(Error::Numerical {
                message: "non-finite Picard iterate".into(),
                dump: None,
            });
        }
        dists.push(d);
        iterate = next;
        let scale = 1.0 + x_norm(&iterate, dt);
        if d <= tol * scale {
            return Ok(Some((iterate, dists)));
        }
        let k = dists.len();
        if k >= 4 && dists[k - 1] > CONTRACTION * dists[k - 2] {
            return Ok(None);
        }
    }
    Ok(None)
}
