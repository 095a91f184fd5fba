//! The stationary fractional Ornstein-Uhlenbeck process, truncated at a burn-in.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{SpectralVelocityField, SURROGATE_LAMBDA1};

use super::convolution::{convolution_field, convolution_trajectory};
use super::noise::NoiseRealization;
use super::variance::stationary_mode_variance;

/// `Z(θ_t ω) ≈ ∫_{t−T}^t S(t−r) dB^H(r)` with `T` the burn-in.
#[derive(Debug, Clone, Serialize)]
pub struct FouSample {
    pub t: f64,
    pub field: SpectralVelocityField<f64>,
    pub burn_in: f64,
    /// `e^{−λ₁T}` times three stationary standard deviations of mode `(1,1)`:
    /// the size of the discarded part `S(T)Z(θ_{t−T}ω)` in its slowest mode.
    pub bias_bound: f64,
}

fn bias_bound(noise: &NoiseRealization, burn_in: f64) -> f64 {
    let l1 = SURROGATE_LAMBDA1;
    (-l1 * burn_in).exp() * 3.0 * stationary_mode_variance(noise.hurst, l1).sqrt()
}

/// Stationary sample at `t`, started from zero at the noise origin.
pub fn fou_sample(noise: &NoiseRealization, t: f64) -> Result<FouSample> {
    let burn_in = t - noise.origin;
    if !(burn_in > 0.0) {
        return Err(Error::domain(format!(
            "burn-in must be positive: noise starts at {}, sample at {t}",
            noise.origin
        )));
    }
    let z = convolution_field(noise, t)?;
    Ok(FouSample {
        t,
        field: z.field,
        burn_in,
        bias_bound: bias_bound(noise, burn_in),
    })
}

/// Samples at every grid point from `from` to the end of the noise.
pub fn fou_trajectory(noise: &NoiseRealization, from: f64) -> Result<Vec<FouSample>> {
    let start = noise.index_of(from)?;
    if start == 0 {
        return Err(Error::domain("trajectory must start after the noise origin"));
    }
    let fields = convolution_trajectory(noise)?;
    Ok(fields
        .into_iter()
        .enumerate()
        .skip(start)
        .map(|(k, field)| {
            let t = noise.time(k);
            FouSample {
                t,
                field,
                burn_in: t - noise.origin,
                bias_bound: bias_bound(noise, t - noise.origin),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::HurstParam;
    use crate::spectral::ModeIndex;

    #[test]
    fn longer_burn_in_barely_moves_the_sample() {
        let h = HurstParam::new(0.35).unwrap();
        let dt = 1.0 / 128.0;
        let long = NoiseRealization::generate(h, 3, -10.0, 0.0, dt, 5).unwrap();
        let short = long.window(-5.0, 0.0).unwrap();
        let a = fou_sample(&long, 0.0).unwrap();
        let b = fou_sample(&short, 0.0).unwrap();
        let diff = (&a.field - &b.field).l2_norm();
        assert!(diff < 1e-6 * a.field.l2_norm(), "{diff}");
        assert!(b.bias_bound < 1e-8);
        assert!(fou_sample(&long, -10.0).is_err());
    }

    #[test]
    fn trajectory_agrees_with_samples() {
        let h = HurstParam::new(0.35).unwrap();
        let noise = NoiseRealization::generate(h, 2, -1.0, 1.0, 0.0625, 2).unwrap();
        let tr = fou_trajectory(&noise, 0.0).unwrap();
        assert_eq!(tr.len(), 17);
        let s = fou_sample(&noise, 0.5).unwrap();
        let k = ModeIndex::new(1, 2);
        assert_eq!(tr[8].field.get(k), s.field.get(k));
    }
}
