use crate::error::{Error, Result};
use crate::fluid::FluidParams;
use crate::solver::{global_solve, Dynamics, Trajectory};
use crate::spectral::SpectralVelocityField;
use crate::stoch::{scaled_convolution_trajectory, NoiseRealization};

type Field = SpectralVelocityField<f64>;

/// Shortest admissible gap between the noise origin and a start time. The
/// slowest mode of `Z` then carries a start-up bias below `e^{−8}`.
pub const MIN_BURN_IN: f64 = 2.0;

/// The cocycle over one noise realization, with `Z` precomputed on the whole
/// noise grid.
#[derive(Debug, Clone)]
pub struct Cocycle {
    noise: NoiseRealization,
    dynamics: Dynamics,
    z: Vec<Field>,
}

impl Cocycle {
    pub fn new(noise: NoiseRealization, dynamics: Dynamics) -> Result<Self> {
        if noise.m_max != dynamics.m_max() {
            return Err(Error::domain(format!(
                "noise has {} modes per axis, dynamics {}",
                noise.m_max,
                dynamics.m_max()
            )));
        }
        let z = scaled_convolution_trajectory(&noise, dynamics.mu1())?;
        Ok(Self { noise, dynamics, z })
    }

    pub fn noise(&self) -> &NoiseRealization {
        &self.noise
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn dt(&self) -> f64 {
        self.noise.dt
    }

    /// `Z` at every node of the noise grid.
    pub fn z_path(&self) -> &[Field] {
        &self.z
    }

    /// `Z(θ_t ω)`.
    pub fn stationary_at(&self, t: f64) -> Result<&Field> {
        self.check_burn_in(t)?;
        Ok(&self.z[self.noise.index_of(t)?])
    }

    fn check_burn_in(&self, s: f64) -> Result<()> {
        if s - self.noise.origin < MIN_BURN_IN - 1e-12 {
            return Err(Error::domain(format!(
                "noise starts at {}, leaving less than {MIN_BURN_IN} of burn-in before {s}",
                self.noise.origin
            )));
        }
        Ok(())
    }

    /// Node range of `[s, s + t]`.
    fn span(&self, s: f64, t: f64) -> Result<(usize, usize)> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("cocycle time must be nonnegative, got {t}")));
        }
        self.check_burn_in(s)?;
        if s + t > self.noise.t_end() + 1e-9 * self.noise.dt {
            return Err(Error::domain(format!(
                "noise ends at {}, cannot reach {}",
                self.noise.t_end(),
                s + t
            )));
        }
        Ok((self.noise.index_of(s)?, self.noise.index_of(s + t)?))
    }

    /// The `v`-trajectory of `φ(·, θ_s ω, u₀)` on `[s, s + t]`.
    pub fn trajectory(&self, s: f64, t: f64, u0: &Field) -> Result<Trajectory> {
        let (i0, i1) = self.span(s, t)?;
        global_solve(u0, &self.z[i0..=i1], self.noise.time(i0), self.noise.dt, &self.dynamics)
    }

    /// `φ(t, θ_s ω, u₀)`.
    pub fn evaluate(&self, s: f64, t: f64, u0: &Field) -> Result<Field> {
        Ok(self.trajectory(s, t, u0)?.last().u())
    }

    /// Largest difference quotient of `φ(t, θ_s ω, ·)` between neighbours of
    /// `points` equispaced initial data on the segment from `a` to `b`.
    pub fn lipschitz_estimate(&self, s: f64, t: f64, a: &Field, b: &Field, points: usize) -> Result<f64> {
        let points = points.max(2);
        let step = &(b - a) * (1.0 / (points - 1) as f64);
        let images: Vec<Field> = (0..points)
            .map(|i| self.evaluate(s, t, &(a + &(&step * i as f64))))
            .collect::<Result<_>>()?;
        let gap = step.l2_norm();
        if gap == 0.0 {
            return Ok(0.0);
        }
        Ok(images
            .windows(2)
            .map(|w| (&w[1] - &w[0]).l2_norm() / gap)
            .fold(0.0, f64::max))
    }
}

/// `φ(t, ω, u₀)` with the noise's own dynamics parameters.
pub fn cocycle_evaluate(t: f64, noise: &NoiseRealization, u0: &Field, params: FluidParams) -> Result<Field> {
    let dynamics = Dynamics::new(noise.m_max, params)?;
    Cocycle::new(noise.clone(), dynamics)?.evaluate(0.0, t, u0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::HurstParam;
    use crate::seed::rng;

    fn cocycle(m: usize, seed: u64) -> Cocycle {
        let h = HurstParam::new(0.35).unwrap();
        let noise = NoiseRealization::generate(h, m, -2.0, 1.0, 1.0 / 256.0, seed).unwrap();
        Cocycle::new(noise, Dynamics::new(m, FluidParams::default()).unwrap()).unwrap()
    }

    #[test]
    fn identity_at_time_zero() {
        let c = cocycle(4, 1);
        let u0 = Field::random(4, 1.0, &mut rng(2));
        let u = c.evaluate(0.0, 0.0, &u0).unwrap();
        assert!((&u - &u0).max_abs() < 1e-15);
    }

    #[test]
    fn cocycle_property() {
        let c = cocycle(4, 3);
        let u0 = Field::random(4, 1.0, &mut rng(4));
        let (s, t) = (0.25, 0.5);
        let direct = c.evaluate(0.0, s + t, &u0).unwrap();
        let mid = c.evaluate(0.0, s, &u0).unwrap();
        let composed = c.evaluate(s, t, &mid).unwrap();
        assert!((&direct - &composed).l2_norm() < 1e-6);
    }

    #[test]
    fn continuity_in_initial_data() {
        let c = cocycle(4, 5);
        let a = Field::random(4, 1.0, &mut rng(6));
        let b = Field::random(4, 1.0, &mut rng(7));
        let l = c.lipschitz_estimate(0.0, 0.5, &a, &b, 10).unwrap();
        assert!(l.is_finite() && l > 0.0 && l <= 1.0, "{l}");
        let fa = c.evaluate(0.0, 0.5, &a).unwrap();
        let fb = c.evaluate(0.0, 0.5, &b).unwrap();
        assert!((&fa - &fb).l2_norm() <= l * (&a - &b).l2_norm() * 1.01);
    }

    #[test]
    fn coverage_errors() {
        let c = cocycle(2, 8);
        let u0 = Field::zeros(2);
        assert!(c.evaluate(-1.0, 0.5, &u0).is_err());
        assert!(c.evaluate(0.5, 1.0, &u0).is_err());
        assert!(c.evaluate(0.0, -0.1, &u0).is_err());
    }
}
