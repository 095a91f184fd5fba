use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fbm::{uniform_grid, FbmPath, FgnSampler, HurstParam};
use crate::seed::mode_seed;
use crate::spectral::{modes, ModeIndex};

/// Independent scalar fBm paths, one per mode, on a common uniform grid.
///
/// Grid point `k` sits at physical time `origin + k·dt`. The paths start at
/// zero at the origin; only their increments enter the convolutions, so a
/// two-sided noise on `[origin, t_end]` is represented by shifting.
#[derive(Debug, Clone)]
pub struct NoiseRealization {
    pub hurst: HurstParam<f64>,
    pub m_max: usize,
    pub master_seed: u64,
    pub origin: f64,
    pub dt: f64,
    steps: usize,
    paths: Vec<Vec<f64>>,
}

impl NoiseRealization {
    /// Samples the paths for all modes `≤ m_max`; mode `(m, n)` uses
    /// `mode_seed(master_seed, m, n)`, so lower truncations share paths.
    pub fn generate(
        hurst: HurstParam<f64>,
        m_max: usize,
        origin: f64,
        t_end: f64,
        dt: f64,
        master_seed: u64,
    ) -> Result<Self> {
        let steps = Self::steps_for(origin, t_end, dt)?;
        let sampler = FgnSampler::new(steps, hurst)?;
        let list: Vec<ModeIndex> = modes(m_max).collect();
        let paths = list
            .par_iter()
            .map(|k| sampler.path(dt, mode_seed(master_seed, k.m, k.n)).values)
            .collect();
        Ok(Self {
            hurst,
            m_max,
            master_seed,
            origin,
            dt,
            steps,
            paths,
        })
    }

    /// Noise identically zero.
    pub fn zero(hurst: HurstParam<f64>, m_max: usize, origin: f64, t_end: f64, dt: f64) -> Result<Self> {
        let steps = Self::steps_for(origin, t_end, dt)?;
        Ok(Self {
            hurst,
            m_max,
            master_seed: 0,
            origin,
            dt,
            steps,
            paths: vec![vec![0.0; steps + 1]; m_max * m_max],
        })
    }

    fn steps_for(origin: f64, t_end: f64, dt: f64) -> Result<usize> {
        if !(dt > 0.0) || !(t_end > origin) {
            return Err(Error::domain(format!(
                "noise needs dt > 0 and t_end > origin, got dt = {dt}, [{origin}, {t_end}]"
            )));
        }
        let steps = ((t_end - origin) / dt).round() as usize;
        if ((steps as f64) * dt - (t_end - origin)).abs() > 1e-9 * (t_end - origin) {
            return Err(Error::domain("noise interval is not a whole number of steps"));
        }
        Ok(steps)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_end(&self) -> f64 {
        self.origin + self.steps as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.dt
    }

    /// Grid index of physical time `t`, if it is a grid point.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.origin) / self.dt;
        let k = x.round();
        if (x - k).abs() > 1e-6 || k < 0.0 || k as usize > self.steps {
            return Err(Error::domain(format!(
                "time {t} is not a grid point of the noise on [{}, {}] with dt = {}",
                self.origin,
                self.t_end(),
                self.dt
            )));
        }
        Ok(k as usize)
    }

    fn slot(&self, mode: ModeIndex) -> usize {
        assert!(mode.m <= self.m_max && mode.n <= self.m_max);
        (mode.m - 1) * self.m_max + (mode.n - 1)
    }

    pub fn values(&self, mode: ModeIndex) -> &[f64] {
        &self.paths[self.slot(mode)]
    }

    /// Values in storage (mode) order.
    pub fn all_values(&self) -> &[Vec<f64>] {
        &self.paths
    }

    /// Mode path as an [`FbmPath`] on local time `[0, t_end − origin]`.
    pub fn path(&self, mode: ModeIndex) -> FbmPath {
        FbmPath {
            times: uniform_grid(self.steps as f64 * self.dt, self.steps),
            values: self.values(mode).to_vec(),
            hurst: self.hurst,
            seed: mode_seed(self.master_seed, mode.m, mode.n),
        }
    }

    /// Every `stride`-th grid point; the coarse values are exact samples.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 || !self.steps.is_multiple_of(stride) {
            return Err(Error::domain(format!("stride {stride} does not divide {} steps", self.steps)));
        }
        Ok(Self {
            hurst: self.hurst,
            m_max: self.m_max,
            master_seed: self.master_seed,
            origin: self.origin,
            dt: self.dt * stride as f64,
            steps: self.steps / stride,
            paths: self.paths.iter().map(|p| p.iter().step_by(stride).copied().collect()).collect(),
        })
    }

    /// Same paths restricted to modes `≤ m_max`.
    pub fn truncated(&self, m_max: usize) -> Result<Self> {
        if m_max == 0 || m_max > self.m_max {
            return Err(Error::domain(format!("cannot truncate {} modes to {m_max}", self.m_max)));
        }
        let paths = modes(m_max).map(|k| self.values(k).to_vec()).collect();
        Ok(Self {
            m_max,
            paths,
            ..self.clone_meta()
        })
    }

    /// Paths restricted to `[t0, t1]` and re-based to zero at `t0`.
    pub fn window(&self, t0: f64, t1: f64) -> Result<Self> {
        let (a, b) = (self.index_of(t0)?, self.index_of(t1)?);
        if b <= a {
            return Err(Error::domain("empty noise window"));
        }
        let paths = self
            .paths
            .iter()
            .map(|p| p[a..=b].iter().map(|x| x - p[a]).collect())
            .collect();
        Ok(Self {
            origin: t0,
            steps: b - a,
            paths,
            ..self.clone_meta()
        })
    }

    fn clone_meta(&self) -> Self {
        Self {
            hurst: self.hurst,
            m_max: self.m_max,
            master_seed: self.master_seed,
            origin: self.origin,
            dt: self.dt,
            steps: self.steps,
            paths: Vec::new(),
        }
    }
}
