use crate::error::{Error, Result};

/// `(1/n) ∫₀^n f(t) dt` by the trapezoid rule on a uniform grid of step `dt`.
pub fn birkhoff_average(values: &[f64], dt: f64) -> Result<f64> {
    if values.len() < 2 || !(dt > 0.0) {
        return Err(Error::domain("time average needs two samples and a positive step"));
    }
    let n = values.len() - 1;
    let inner: f64 = values[1..n].iter().sum();
    let integral = dt * (inner + 0.5 * (values[0] + values[n]));
    Ok(integral / (n as f64 * dt))
}
