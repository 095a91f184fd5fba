use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fbm::HurstParam;
use crate::seed::{derive_seed, stream_seed};
use crate::spectral::{dirichlet_beta, lattice_sum, riemann_zeta};
use crate::stats::Estimate;
use crate::stoch::{
    birkhoff_average, convolution_series, expected_h1_norm_sq, scaled_convolution_trajectory, NoiseRealization,
};
use crate::spectral::{eigenvalue, modes};

/// Settings for comparing time averages of `|Z|²_{H₀¹}` with ensemble means.
#[derive(Debug, Clone, Serialize)]
pub struct ErgodicStudy {
    pub hurst: f64,
    pub m_max: usize,
    pub dt: f64,
    /// Increasing averaging horizons.
    pub horizons: Vec<f64>,
    pub ensemble: usize,
    pub burn_in: f64,
    pub c0: f64,
    pub mu1: f64,
    pub seed: u64,
    /// Truncations at which the lattice sum `Σ(m²+n²)^{−1}` is reported.
    pub lattice_m: Vec<usize>,
}

impl Default for ErgodicStudy {
    fn default() -> Self {
        Self {
            hurst: 0.35,
            m_max: 8,
            dt: 1.0 / 64.0,
            horizons: vec![25.0, 50.0, 100.0, 200.0],
            ensemble: 400,
            burn_in: 4.0,
            c0: 1.0,
            mu1: 1.0,
            seed: 0,
            lattice_m: vec![8, 64, 512],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErgodicReport {
    /// `(horizon, time average)`.
    pub averages: Vec<(f64, f64)>,
    /// Mean of `|Z(0)|²_{H₀¹}` over independent paths.
    pub ensemble: Estimate,
    /// Exact stationary mean for the truncation.
    pub oracle: f64,
    /// `|last average − ensemble mean| / ensemble mean`.
    pub relative_gap: f64,
    /// `2c₀β(4)ζ(4)`.
    pub display_bound: f64,
    /// `(M, Σ_{m,n≤M} (m²+n²)^{−1})`.
    pub lattice_partial_sums: Vec<(usize, f64)>,
    /// Some partial sum exceeds the displayed closed form.
    pub discrepancy: bool,
}

pub fn ergodic_limit_study(study: &ErgodicStudy) -> Result<ErgodicReport> {
    let hurst = HurstParam::new(study.hurst)?;
    hurst.require_convolution()?;
    if study.horizons.is_empty() || study.horizons.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Validation(vec!["horizons must be nonempty and increasing".into()]));
    }
    if study.ensemble < 2 {
        return Err(Error::Validation(vec!["ensemble needs at least two samples".into()]));
    }
    let horizon = *study.horizons.last().expect("nonempty");
    let noise = NoiseRealization::generate(
        hurst,
        study.m_max,
        -study.burn_in,
        horizon,
        study.dt,
        stream_seed(study.seed, "ergodic-path"),
    )?;
    let z = scaled_convolution_trajectory(&noise, study.mu1)?;
    let start = noise.index_of(0.0)?;
    let series: Vec<f64> = z[start..].iter().map(|f| f.h1_norm_sq()).collect();
    let averages = study
        .horizons
        .iter()
        .map(|&n| {
            let k = ((n / study.dt).round() as usize).min(series.len() - 1);
            Ok((n, birkhoff_average(&series[..=k], study.dt)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let base = stream_seed(study.seed, "ergodic-ensemble");
    let samples: Vec<f64> = (0..study.ensemble)
        .into_par_iter()
        .map(|i| {
            let path = NoiseRealization::generate(hurst, study.m_max, -study.burn_in, 0.0, study.dt, derive_seed(base, i as u64))?;
            Ok(modes(study.m_max)
                .map(|k| {
                    let zk = *convolution_series(path.values(k), study.dt, study.mu1 * eigenvalue::<f64>(k))
                        .last()
                        .expect("nonempty");
                    k.k2() as f64 * zk * zk
                })
                .sum())
        })
        .collect::<Result<_>>()?;
    let ensemble = Estimate::of(&samples);
    let oracle = expected_h1_norm_sq(hurst, f64::INFINITY, study.m_max);
    let last = averages.last().expect("nonempty").1;
    let display_bound = 2.0 * study.c0 * dirichlet_beta(4.0f64)? * riemann_zeta(4.0f64)?;
    let lattice_partial_sums: Vec<(usize, f64)> = study.lattice_m.iter().map(|&m| (m, lattice_sum(1.0f64, m))).collect();
    let discrepancy = lattice_partial_sums.iter().any(|&(_, s)| s > display_bound);
    Ok(ErgodicReport {
        averages,
        relative_gap: (last - ensemble.mean).abs() / ensemble.mean,
        ensemble,
        oracle,
        display_bound,
        lattice_partial_sums,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stoch::stationary_mode_variance;

    #[test]
    fn single_mode_time_average_hits_stationary_variance() {
        let study = ErgodicStudy {
            m_max: 1,
            dt: 1.0 / 32.0,
            horizons: vec![50.0, 100.0],
            ensemble: 200,
            lattice_m: vec![4],
            ..ErgodicStudy::default()
        };
        let r = ergodic_limit_study(&study).unwrap();
        let h = HurstParam::new(0.35).unwrap();
        // |Z|₁² of mode (1,1) is 2 z²
        let target = 2.0 * stationary_mode_variance(h, 4.0);
        assert!((r.oracle - target).abs() < 1e-6 * target);
        assert!(r.ensemble.within(target, 4.0), "{:?} vs {target}", r.ensemble);
        assert!((r.averages[1].1 - target).abs() < 0.15 * target, "{:?}", r.averages);
    }

    #[test]
    fn flags_lattice_discrepancy() {
        let study = ErgodicStudy {
            m_max: 2,
            dt: 1.0 / 16.0,
            horizons: vec![10.0],
            ensemble: 10,
            lattice_m: vec![4, 64],
            ..ErgodicStudy::default()
        };
        let r = ergodic_limit_study(&study).unwrap();
        assert!(r.discrepancy);
        assert!(r.lattice_partial_sums[1].1 > r.display_bound);
    }

    #[test]
    fn rejects_rough_noise() {
        let study = ErgodicStudy {
            hurst: 0.2,
            ..ErgodicStudy::default()
        };
        assert!(ergodic_limit_study(&study).is_err());
    }
}
