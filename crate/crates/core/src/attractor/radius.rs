use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::G2Constants;

use super::cocycle::{Cocycle, MIN_BURN_IN};

/// Absorbing radii computed along one noise path.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusReport {
    /// `4∫_{−T_w}^0 g₂(s)e^{(1+s)r₂}ds + 2 sup_{[−1,0]}|Z|²`.
    pub rho_h: f64,
    /// `max(C, C̃)`.
    pub rho_1: f64,
    pub c_term: f64,
    pub c_tilde_term: f64,
    /// Window `T_w` of the `g₂` quadrature.
    pub window: f64,
    /// Bound on the part of `4∫g₂e^{(1+s)r₂}` beyond the window, taking `g₂`
    /// at its window average.
    pub tail_estimate: f64,
    pub sup_z_sq: f64,
    /// `(T_w, ρ_H(T_w))` at integer windows up to `window`.
    pub profile: Vec<(f64, f64)>,
}

/// First whole start time with `e^{r₂(1+t₀)}·bound² < 10⁻⁸` for initial data
/// of norm at most `bound`.
pub fn deepest_start(r2: f64, bound: f64) -> f64 {
    let need = (1e8 * bound * bound).max(1.0).ln();
    (-1.0 - need / r2).floor()
}

pub fn absorbing_radius_estimate(cocycle: &Cocycle, consts: &G2Constants, window: f64) -> Result<RadiusReport> {
    let noise = cocycle.noise();
    if !(window >= 1.0) {
        return Err(Error::domain(format!("radius window must be at least 1, got {window}")));
    }
    if -window - noise.origin < MIN_BURN_IN - 1e-12 || noise.t_end() < -1e-12 {
        return Err(Error::domain(format!(
            "noise on [{}, {}] does not cover [-{window}, 0] with burn-in",
            noise.origin,
            noise.t_end()
        )));
    }
    let dt = noise.dt;
    let (i0, i_end) = (noise.index_of(-window)?, noise.index_of(0.0)?);
    let i_minus1 = noise.index_of(-1.0)?;
    let z = cocycle.z_path();
    let weighted = |i: usize| consts.g2(&z[i]) * ((1.0 + noise.time(i)) * consts.r2).exp();

    // accumulate backwards from 0 so every integer window is a prefix
    let mut integral = 0.0;
    let mut g2_sum = 0.0;
    let mut profile = Vec::new();
    let mut next_mark = 1.0;
    for i in (i0..i_end).rev() {
        integral += 0.5 * dt * (weighted(i) + weighted(i + 1));
        g2_sum += 0.5 * dt * (consts.g2(&z[i]) + consts.g2(&z[i + 1]));
        let reach = -noise.time(i);
        if reach >= next_mark - 1e-9 * dt {
            profile.push((next_mark, 4.0 * integral));
            next_mark += 1.0;
        }
    }
    let sup_z_sq = z[i_minus1..=i_end].iter().fold(0.0f64, |m, f| m.max(f.l2_norm_sq()));
    let rho_h = 4.0 * integral + 2.0 * sup_z_sq;
    for p in &mut profile {
        p.1 += 2.0 * sup_z_sq;
    }
    let mean_g2 = g2_sum / window;
    let tail_estimate = 4.0 * mean_g2 * (consts.r2 * (1.0 - window)).exp() / consts.r2;

    let (mut g2_last, mut h1_last, mut v_last) = (0.0, 0.0, 0.0);
    for i in i_minus1..i_end {
        g2_last += 0.5 * dt * (consts.g2(&z[i]) + consts.g2(&z[i + 1]));
        h1_last += 0.5 * dt * (z[i].h1_norm_sq() + z[i + 1].h1_norm_sq());
        v_last += 0.5 * dt * (z[i].v_norm_sq() + z[i + 1].v_norm_sq());
    }
    // |v(−1)|² is bounded by 2∫g₂e^{(1+s)r₂}
    let c_term = consts.c6 * (g2_last + consts.c5() * rho_h * h1_last + 2.0 * integral);
    let c_tilde_term = 2.0 * consts.c6 * (g2_last + consts.c5() * rho_h * h1_last + 2.0 * v_last);
    Ok(RadiusReport {
        rho_h,
        rho_1: c_term.max(c_tilde_term),
        c_term,
        c_tilde_term,
        window,
        tail_estimate,
        sup_z_sq,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::{pullback_run, random_initial_set, PullbackExperiment};
    use crate::fbm::HurstParam;
    use crate::fluid::FluidParams;
    use crate::solver::Dynamics;
    use crate::spectral::EstimateConstants;
    use crate::stoch::NoiseRealization;

    fn consts() -> G2Constants {
        G2Constants::choose(&EstimateConstants::default(), &FluidParams::default(), None).unwrap()
    }

    fn cocycle(m: usize, seed: Option<u64>, origin: f64) -> Cocycle {
        let h = HurstParam::new(0.35).unwrap();
        let dt = 1.0 / 128.0;
        let noise = match seed {
            Some(s) => NoiseRealization::generate(h, m, origin, 0.0, dt, s).unwrap(),
            None => NoiseRealization::zero(h, m, origin, 0.0, dt).unwrap(),
        };
        Cocycle::new(noise, Dynamics::new(m, FluidParams::default()).unwrap()).unwrap()
    }

    #[test]
    fn zero_noise_gives_zero_radius() {
        let r = absorbing_radius_estimate(&cocycle(3, None, -6.0), &consts(), 4.0).unwrap();
        assert_eq!(r.rho_h, 0.0);
        assert_eq!(r.rho_1, 0.0);
    }

    #[test]
    fn profile_is_nondecreasing() {
        let r = absorbing_radius_estimate(&cocycle(4, Some(2), -14.0), &consts(), 12.0).unwrap();
        assert_eq!(r.profile.len(), 12);
        assert!(r.profile.windows(2).all(|w| w[1].1 >= w[0].1));
        assert!((r.profile[11].1 - r.rho_h).abs() < 1e-12 * r.rho_h);
        assert!(r.tail_estimate > 0.0);
    }

    #[test]
    fn absorbed_trajectories_stay_inside() {
        let c = consts();
        let t2 = deepest_start(c.r2, 1.0);
        let origin = t2 - 3.0;
        for seed in 0..3 {
            let co = cocycle(3, Some(seed), origin);
            let r = absorbing_radius_estimate(&co, &c, -origin - MIN_BURN_IN).unwrap();
            let exp = PullbackExperiment {
                t0_list: vec![t2],
                initial_set: random_initial_set(3, 3, 1.0, seed),
                constants: EstimateConstants::default(),
            };
            let p = pullback_run(&co, &exp).unwrap();
            for run in &p.runs {
                assert!(run.sup_u_sq <= r.rho_h, "{} > {}", run.sup_u_sq, r.rho_h);
                assert!(run.v_integral <= r.rho_1);
            }
        }
    }
}
