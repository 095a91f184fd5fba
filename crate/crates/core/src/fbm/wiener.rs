use crate::error::{Error, Result};

use super::sampled::SampledFunction;
use super::sampler::FbmPath;

/// `∫₀^t φ dβ^H` along one sampled path, with `t` the right end of `φ`'s grid.
///
/// Step functions use the defining sum `Σ aᵢ(β(tᵢ₊₁) − β(tᵢ))`. Integrands
/// carrying a derivative use `φ(t)β(t) − ∫₀^t φ′(s)β(s) ds`, where the last
/// integral is exact for the linear interpolants of `φ′` and `β` on the path
/// grid. Other integrands are rejected.
pub fn wiener_integral_pathwise(phi: &SampledFunction<f64>, path: &FbmPath) -> Result<f64> {
    let (lo, t) = phi.domain();
    if lo != 0.0 {
        return Err(Error::domain("integrand must start at time 0"));
    }
    if t > path.t_final() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "integrand extends to {t}, beyond the path end {}",
            path.t_final()
        )));
    }
    if let Some((breaks, levels)) = phi.step_data() {
        let mut acc = 0.0;
        for (i, a) in levels.iter().enumerate() {
            acc += a * (path.value_at(breaks[i + 1])? - path.value_at(breaks[i])?);
        }
        return Ok(acc);
    }
    let Some(_) = phi.derivative() else {
        return Err(Error::domain(
            "pathwise integral needs a C¹ integrand with its derivative, or a step function",
        ));
    };
    let dphi = SampledFunction::new(phi.grid().to_vec(), phi.derivative().expect("checked").to_vec())?;
    let times = &path.times;
    let vals = &path.values;
    let mut integral = 0.0;
    for k in 0..times.len() - 1 {
        let (t0, t1) = (times[k], times[k + 1]);
        if t0 >= t {
            break;
        }
        let (b0, mut b1) = (vals[k], vals[k + 1]);
        let end = t1.min(t);
        if end < t1 {
            b1 = b0 + (b1 - b0) * (end - t0) / (t1 - t0);
        }
        let (a0, a1) = (dphi.eval(t0), dphi.eval(end));
        integral += (end - t0) / 6.0 * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1);
    }
    Ok(phi.eval(t) * path.value_at(t)? - integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{sample_fbm, uniform_grid, HurstParam};

    #[test]
    fn constant_integrand_telescopes() {
        let g = uniform_grid(1.0, 128);
        let path = sample_fbm(&g, HurstParam::new(0.3).unwrap(), 1).unwrap();
        let one = SampledFunction::smooth(g.clone(), |_| 1.0, |_| 0.0).unwrap();
        let v = wiener_integral_pathwise(&one, &path).unwrap();
        assert_eq!(v, path.values[128]);
    }

    #[test]
    fn step_integrand_uses_finite_sum() {
        let g = uniform_grid(1.0, 64);
        let path = sample_fbm(&g, HurstParam::new(0.35).unwrap(), 2).unwrap();
        let f = SampledFunction::step(vec![0.0, 0.5, 1.0], vec![1.0, -1.0]).unwrap();
        let v = wiener_integral_pathwise(&f, &path).unwrap();
        let want = path.values[32] - (path.values[64] - path.values[32]);
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn linear_integrand_is_exact_on_linear_path() {
        // with β linear between nodes, ∫φ dβ = Σ ∫ φ β′ ds exactly
        let g = uniform_grid(1.0, 16);
        let path = sample_fbm(&g, HurstParam::new(0.4).unwrap(), 3).unwrap();
        let f = SampledFunction::smooth(g.clone(), |s| 2.0 * s + 1.0, |_| 2.0).unwrap();
        let v = wiener_integral_pathwise(&f, &path).unwrap();
        let mut want = 0.0;
        for k in 0..16 {
            let mid = (g[k] + g[k + 1]) / 2.0;
            want += (2.0 * mid + 1.0) * (path.values[k + 1] - path.values[k]);
        }
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_plain_samples() {
        let g = uniform_grid(1.0, 8);
        let path = sample_fbm(&g, HurstParam::new(0.4).unwrap(), 3).unwrap();
        let f = SampledFunction::from_fn(g, |s| s).unwrap();
        assert!(wiener_integral_pathwise(&f, &path).is_err());
    }
}
