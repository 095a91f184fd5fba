use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng};
use crate::spectral::{EstimateConstants, SpectralVelocityField};
use crate::stats::linear_fit;

use super::cocycle::Cocycle;
use super::condition::{condition_check, ConditionVerdict};

type Field = SpectralVelocityField<f64>;

/// Start times and initial data for a pullback study; every run uses the
/// noise of the cocycle it is given.
#[derive(Debug, Clone)]
pub struct PullbackExperiment {
    /// Strictly decreasing negative start times.
    pub t0_list: Vec<f64>,
    pub initial_set: Vec<Field>,
    pub constants: EstimateConstants,
}

impl PullbackExperiment {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.t0_list.is_empty() {
            bad.push("t0_list is empty".to_string());
        }
        if self.t0_list.iter().any(|&t| !(t < 0.0)) {
            bad.push("start times must be negative".to_string());
        }
        if self.t0_list.windows(2).any(|w| !(w[1] < w[0])) {
            bad.push("start times must be strictly decreasing".to_string());
        }
        if self.initial_set.is_empty() {
            bad.push("initial set is empty".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }
}

/// `count` fields with norm `radius·(i+1)/count`, directions drawn from `seed`.
pub fn random_initial_set(m_max: usize, count: usize, radius: f64, seed: u64) -> Vec<Field> {
    (0..count)
        .map(|i| {
            let f = Field::random(m_max, 1.0, &mut rng(derive_seed(seed, i as u64)));
            &f * (radius * (i + 1) as f64 / count as f64 / f.l2_norm())
        })
        .collect()
}

/// One trajectory from `(t0, u0)` observed on `[−1, 0]`.
#[derive(Debug, Clone, Serialize)]
pub struct PullbackRun {
    pub t0: f64,
    pub initial: usize,
    pub u_final: Field,
    /// `sup |u|²` over the stored steps in `[−1, 0]`.
    pub sup_u_sq: f64,
    pub sup_v_sq: f64,
    /// `sup |u|²_{H₀¹}` over `[−1, 0]`.
    pub sup_u_h1_sq: f64,
    /// `∫_{−1}^0 |v|_V²`.
    pub v_integral: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PullbackReport {
    pub condition: ConditionVerdict,
    /// Set when the run went ahead although the condition failed.
    pub outside_regime: bool,
    pub t0_list: Vec<f64>,
    /// Largest pairwise distance at `t = 0`, per start time.
    pub diameters: Vec<f64>,
    /// Pairwise distances at `t = 0`, upper triangle in row order, per start time.
    pub distances: Vec<Vec<f64>>,
    /// Diameters strictly decrease as the start time recedes.
    pub monotone: bool,
    pub runs: Vec<PullbackRun>,
    /// Empirical `ρ_V`: the largest `|u|²_{H₀¹}` seen on `[−1, 0]`.
    pub rho_v_empirical: f64,
}

impl PullbackReport {
    /// Exponential rate of the diameter against `|t0|`, by least squares on
    /// the logarithm over nonzero diameters.
    pub fn decay_rate(&self) -> Option<f64> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .t0_list
            .iter()
            .zip(&self.diameters)
            .filter(|(_, d)| **d > 0.0)
            .map(|(t, d)| (-t, d.ln()))
            .unzip();
        (x.len() >= 2).then(|| -linear_fit(&x, &y).0)
    }

    pub fn runs_from(&self, t0: f64) -> impl Iterator<Item = &PullbackRun> {
        self.runs.iter().filter(move |r| r.t0 == t0)
    }
}

pub fn pullback_run(cocycle: &Cocycle, exp: &PullbackExperiment) -> Result<PullbackReport> {
    exp.validate()?;
    let condition = condition_check(exp.constants.c0, exp.constants.big_c1)?;
    if !condition.pass {
        log::warn!(
            "attractor condition fails (c0 C1^2 = {} >= {}); running anyway",
            condition.lhs,
            condition.threshold
        );
    }
    let jobs: Vec<(f64, usize)> = exp
        .t0_list
        .iter()
        .flat_map(|&t0| (0..exp.initial_set.len()).map(move |i| (t0, i)))
        .collect();
    let runs: Vec<PullbackRun> = jobs
        .par_iter()
        .map(|&(t0, i)| {
            let traj = cocycle.trajectory(t0, -t0, &exp.initial_set[i])?;
            let window = traj.states.iter().filter(|s| s.t >= -1.0 - 1e-9 * cocycle.dt());
            let mut run = PullbackRun {
                t0,
                initial: i,
                u_final: traj.last().u(),
                sup_u_sq: 0.0,
                sup_v_sq: 0.0,
                sup_u_h1_sq: 0.0,
                v_integral: 0.0,
            };
            let mut start_integral = None;
            for s in window {
                let u = s.u();
                run.sup_u_sq = run.sup_u_sq.max(u.l2_norm_sq());
                run.sup_u_h1_sq = run.sup_u_h1_sq.max(u.h1_norm_sq());
                run.sup_v_sq = run.sup_v_sq.max(s.energy.l2_sq);
                start_integral.get_or_insert(s.energy.v_integral);
            }
            run.v_integral = traj.last().energy.v_integral - start_integral.unwrap_or(0.0);
            Ok(run)
        })
        .collect::<Result<_>>()?;

    let n = exp.initial_set.len();
    let mut distances = Vec::with_capacity(exp.t0_list.len());
    let mut diameters = Vec::with_capacity(exp.t0_list.len());
    for (j, _) in exp.t0_list.iter().enumerate() {
        let finals = &runs[j * n..(j + 1) * n];
        let mut d = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                d.push((&finals[a].u_final - &finals[b].u_final).l2_norm());
            }
        }
        diameters.push(d.iter().copied().fold(0.0, f64::max));
        distances.push(d);
    }
    let monotone = diameters.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    let rho_v_empirical = runs.iter().fold(0.0f64, |m, r| m.max(r.sup_u_h1_sq));
    Ok(PullbackReport {
        outside_regime: !condition.pass,
        condition,
        t0_list: exp.t0_list.clone(),
        diameters,
        distances,
        monotone,
        runs,
        rho_v_empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::HurstParam;
    use crate::fluid::FluidParams;
    use crate::solver::Dynamics;
    use crate::spectral::SURROGATE_LAMBDA1;
    use crate::stoch::NoiseRealization;

    fn cocycle(m: usize, noise_on: bool, seed: u64) -> Cocycle {
        let h = HurstParam::new(0.35).unwrap();
        let dt = 1.0 / 128.0;
        let noise = if noise_on {
            NoiseRealization::generate(h, m, -6.0, 0.0, dt, seed).unwrap()
        } else {
            NoiseRealization::zero(h, m, -6.0, 0.0, dt).unwrap()
        };
        Cocycle::new(noise, Dynamics::new(m, FluidParams::default()).unwrap()).unwrap()
    }

    fn experiment(m: usize, t0_list: Vec<f64>) -> PullbackExperiment {
        PullbackExperiment {
            t0_list,
            initial_set: random_initial_set(m, 3, 1.0, 9),
            constants: EstimateConstants::default(),
        }
    }

    #[test]
    fn identical_pair_stays_together() {
        let c = cocycle(3, true, 1);
        let u = random_initial_set(3, 1, 1.0, 2);
        let exp = PullbackExperiment {
            t0_list: vec![-1.0, -2.0],
            initial_set: vec![u[0].clone(), u[0].clone()],
            constants: EstimateConstants::default(),
        };
        let r = pullback_run(&c, &exp).unwrap();
        assert!(r.diameters.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn noisy_diameters_shrink() {
        let c = cocycle(4, true, 3);
        let r = pullback_run(&c, &experiment(4, vec![-1.0, -2.0, -4.0])).unwrap();
        assert!(!r.outside_regime);
        assert!(r.monotone, "{:?}", r.diameters);
        assert!(r.rho_v_empirical > 0.0);
    }

    #[test]
    fn noise_off_rate_is_comparable_to_first_eigenvalue() {
        let c = cocycle(4, false, 0);
        let r = pullback_run(&c, &experiment(4, vec![-0.5, -1.0, -1.5, -2.0])).unwrap();
        let rate = r.decay_rate().unwrap();
        assert!((0.5 * SURROGATE_LAMBDA1..=2.0 * SURROGATE_LAMBDA1).contains(&rate), "{rate}");
    }

    #[test]
    fn rejects_bad_start_times() {
        let c = cocycle(2, false, 0);
        assert!(pullback_run(&c, &experiment(2, vec![-2.0, -1.0])).is_err());
        assert!(pullback_run(&c, &experiment(2, vec![0.5])).is_err());
    }
}
