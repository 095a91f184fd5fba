//! Exact fBm sampling on a time grid.
//!
//! Uniform grids use circulant embedding of the fractional Gaussian noise
//! autocovariance (Davies-Harte). If the embedding has a negative eigenvalue,
//! or the grid is not uniform, the covariance matrix is factorized densely.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng};

use super::hurst::{fbm_covariance, HurstParam};

/// Scalar fBm sample on a grid starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub hurst: HurstParam<f64>,
    pub seed: u64,
}

impl FbmPath {
    pub fn t_final(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Step of a uniform grid.
    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Linear interpolation between grid values.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.times[0], self.t_final());
        if !(t >= lo && t <= hi * (1.0 + 1e-12)) {
            return Err(Error::domain(format!("time {t} outside path domain [{lo}, {hi}]")));
        }
        let i = self.times.partition_point(|&x| x <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = ((t - t0) / (t1 - t0)).min(1.0);
        Ok(self.values[i - 1] + w * (self.values[i] - self.values[i - 1]))
    }

    /// Index of the grid point equal to `t` (up to round-off), if any.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-9 * self.dt().abs().max(f64::MIN_POSITIVE);
        let i = self.times.partition_point(|&x| x < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }
}

/// `n + 1` equally spaced points on `[0, t_final]`.
pub fn uniform_grid(t_final: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_final * i as f64 / n as f64).collect()
}

fn is_uniform(grid: &[f64]) -> bool {
    let d0 = grid[1] - grid[0];
    grid.windows(2).all(|w| ((w[1] - w[0]) - d0).abs() <= 1e-9 * d0)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid[0] != 0.0 {
        return Err(Error::domain("fBm grid must start at 0 and have at least two points"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("fBm grid must be strictly increasing"));
    }
    Ok(())
}

enum Method {
    Circulant { sqrt_eig: Vec<f64>, fft: Arc<dyn Fft<f64>> },
    Dense { chol: DMatrix<f64> },
}

/// Reusable sampler of `n` unit-step fractional Gaussian noise increments.
pub struct FgnSampler {
    n: usize,
    hurst: HurstParam<f64>,
    method: Method,
}

impl std::fmt::Debug for FgnSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgnSampler")
            .field("n", &self.n)
            .field("hurst", &self.hurst)
            .field("circulant", &self.is_circulant())
            .finish()
    }
}

/// Autocovariance of unit-step fGn at lag `k`.
fn fgn_autocov(k: usize, h: f64) -> f64 {
    let k = k as f64;
    let p = 2.0 * h;
    0.5 * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).abs().powf(p))
}

impl FgnSampler {
    pub fn new(n: usize, hurst: HurstParam<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("need at least one increment"));
        }
        let h = hurst.value();
        let size = 2 * n;
        let mut c: Vec<Complex<f64>> = (0..size)
            .map(|k| {
                let lag = if k <= n { k } else { size - k };
                Complex::new(fgn_autocov(lag, h), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(size);
        fft.process(&mut c);
        let max = c.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
        let min = c.iter().fold(f64::INFINITY, |m, z| m.min(z.re));
        if min < -1e-10 * max {
            log::warn!(
                "circulant embedding of fGn has negative eigenvalue {min:e} (n = {n}, H = {h}); using dense factorization"
            );
            return Self::dense(n, hurst);
        }
        let sqrt_eig = c.iter().map(|z| (z.re.max(0.0) / size as f64).sqrt()).collect();
        Ok(Self {
            n,
            hurst,
            method: Method::Circulant { sqrt_eig, fft },
        })
    }

    /// Dense Cholesky factorization of the fGn covariance.
    pub fn dense(n: usize, hurst: HurstParam<f64>) -> Result<Self> {
        let h = hurst.value();
        let cov = DMatrix::from_fn(n, n, |i, j| fgn_autocov(i.abs_diff(j), h));
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::numerical("fGn covariance is not positive definite"))?
            .l();
        Ok(Self {
            n,
            hurst,
            method: Method::Dense { chol },
        })
    }

    pub fn is_circulant(&self) -> bool {
        matches!(self.method, Method::Circulant { .. })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hurst(&self) -> HurstParam<f64> {
        self.hurst
    }

    /// `n` unit-step fGn increments.
    pub fn sample_increments<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.method {
            Method::Circulant { sqrt_eig, fft } => {
                let mut w: Vec<Complex<f64>> = sqrt_eig
                    .iter()
                    .map(|&s| {
                        let a: f64 = rng.sample(StandardNormal);
                        let b: f64 = rng.sample(StandardNormal);
                        Complex::new(s * a, s * b)
                    })
                    .collect();
                fft.process(&mut w);
                w[..self.n].iter().map(|z| z.re).collect()
            }
            Method::Dense { chol } => {
                let z = DVector::from_fn(self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
                (chol * z).iter().copied().collect()
            }
        }
    }

    /// fBm path on `[0, n·dt]` from the stream seeded by `seed`.
    pub fn path(&self, dt: f64, seed: u64) -> FbmPath {
        let mut r = rng(seed);
        let inc = self.sample_increments(&mut r);
        let scale = dt.powf(self.hurst.value());
        let mut values = Vec::with_capacity(self.n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for x in inc {
            acc += scale * x;
            values.push(acc);
        }
        FbmPath {
            times: uniform_grid(dt * self.n as f64, self.n),
            values,
            hurst: self.hurst,
            seed,
        }
    }
}

/// Exact fBm sample with covariance `R` on `grid` (which must start at 0).
pub fn sample_fbm(grid: &[f64], hurst: HurstParam<f64>, seed: u64) -> Result<FbmPath> {
    validate_grid(grid)?;
    let n = grid.len() - 1;
    if is_uniform(grid) {
        let sampler = FgnSampler::new(n, hurst)?;
        let mut path = sampler.path(grid[n] / n as f64, seed);
        path.times = grid.to_vec();
        return Ok(path);
    }
    let cov = DMatrix::from_fn(n, n, |i, j| {
        fbm_covariance(grid[i + 1], grid[j + 1], hurst).expect("nonnegative grid")
    });
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::numerical("fBm covariance on grid is not positive definite"))?
        .l();
    let mut r = rng(seed);
    let z = DVector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal));
    let x = chol * z;
    let mut values = vec![0.0];
    values.extend(x.iter().copied());
    Ok(FbmPath {
        times: grid.to_vec(),
        values,
        hurst,
        seed,
    })
}

/// `count` independent paths on a uniform grid; sample `i` uses
/// `derive_seed(master_seed, i)`.
pub fn sample_fbm_ensemble(
    t_final: f64,
    steps: usize,
    hurst: HurstParam<f64>,
    master_seed: u64,
    count: usize,
) -> Result<Vec<FbmPath>> {
    let sampler = FgnSampler::new(steps, hurst)?;
    let dt = t_final / steps as f64;
    Ok((0..count)
        .into_par_iter()
        .map(|i| sampler.path(dt, derive_seed(master_seed, i as u64)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(x: f64) -> HurstParam<f64> {
        HurstParam::new(x).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        let g = uniform_grid(1.0, 256);
        let a = sample_fbm(&g, h(0.3), 42).unwrap();
        let b = sample_fbm(&g, h(0.3), 42).unwrap();
        let c = sample_fbm(&g, h(0.3), 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
        assert_eq!(a.values[0], 0.0);
    }

    #[test]
    fn embedding_is_nonnegative_for_rough_paths() {
        for &hh in &[0.26, 0.3, 0.35, 0.45, 0.5] {
            assert!(FgnSampler::new(1000, h(hh)).unwrap().is_circulant());
        }
    }

    #[test]
    fn dense_and_circulant_agree_in_law() {
        // both samplers reproduce the lag-one autocovariance
        let hh = 0.3;
        let n = 16;
        let circ = FgnSampler::new(n, h(hh)).unwrap();
        let dense = FgnSampler::dense(n, h(hh)).unwrap();
        let mut r = rng(9);
        let reps = 20000;
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..reps {
            let x = circ.sample_increments(&mut r);
            let y = dense.sample_increments(&mut r);
            a += x[3] * x[4];
            b += y[3] * y[4];
        }
        let want = fgn_autocov(1, hh);
        let se = 1.5 / (reps as f64).sqrt();
        assert!((a / reps as f64 - want).abs() < 4.0 * se);
        assert!((b / reps as f64 - want).abs() < 4.0 * se);
    }

    #[test]
    fn non_uniform_grid_uses_covariance() {
        let g = vec![0.0, 0.1, 0.15, 0.4, 1.0];
        let p = sample_fbm(&g, h(0.35), 5).unwrap();
        assert_eq!(p.values.len(), 5);
        assert_eq!(p, sample_fbm(&g, h(0.35), 5).unwrap());
        assert!(sample_fbm(&[0.1, 0.2], h(0.3), 1).is_err());
    }

    #[test]
    fn interpolation_and_lookup() {
        let p = sample_fbm(&uniform_grid(2.0, 8), h(0.4), 3).unwrap();
        assert_eq!(p.value_at(0.5).unwrap(), p.values[2]);
        assert_eq!(p.index_of(1.5), Some(6));
        assert_eq!(p.index_of(1.6), None);
        assert!(p.value_at(2.5).is_err());
    }
}
