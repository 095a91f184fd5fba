use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// First eigenvalue of `A` in the surrogate model, `(1² + 1²)²`.
pub const SURROGATE_LAMBDA1: f64 = 4.0;

/// Mode `(m, n)` of the sine lattice, both indices starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub m: usize,
    pub n: usize,
}

impl ModeIndex {
    pub const fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    /// `m² + n²`, the Dirichlet-Laplacian surrogate eigenvalue.
    pub fn k2(self) -> usize {
        self.m * self.m + self.n * self.n
    }

    /// Eigenvalue of `A`, `(m² + n²)²`.
    pub fn eigenvalue<T: Real>(self) -> T {
        eigenvalue(self)
    }
}

/// Eigenvalue of `A` on mode `(m, n)`: `(m² + n²)²`.
pub fn eigenvalue<T: Real>(mode: ModeIndex) -> T {
    let k2 = T::of(mode.k2());
    k2 * k2
}

/// Divergence-free velocity stored as amplitudes on the orthonormal basis
/// `e_mn`, for `1 ≤ m, n ≤ m_max`, in row-major `(m, n)` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralVelocityField<T> {
    m_max: usize,
    coeffs: Vec<T>,
}

impl<T: Real> SpectralVelocityField<T> {
    pub fn zeros(m_max: usize) -> Self {
        assert!(m_max >= 1, "truncation must be at least 1");
        Self {
            m_max,
            coeffs: vec![T::zero(); m_max * m_max],
        }
    }

    pub fn from_coeffs(m_max: usize, coeffs: Vec<T>) -> Result<Self> {
        if m_max == 0 || coeffs.len() != m_max * m_max {
            return Err(Error::domain(format!(
                "expected {} coefficients for truncation {m_max}, got {}",
                m_max * m_max,
                coeffs.len()
            )));
        }
        Ok(Self { m_max, coeffs })
    }

    /// Field with a single unit amplitude on `mode`.
    pub fn basis(m_max: usize, mode: ModeIndex) -> Self {
        let mut f = Self::zeros(m_max);
        f.set(mode, T::one());
        f
    }

    /// Gaussian amplitudes scaled by `(m² + n²)^{-decay}`.
    pub fn random<R: Rng + ?Sized>(m_max: usize, decay: f64, rng: &mut R) -> Self {
        let mut f = Self::zeros(m_max);
        for mode in modes(m_max) {
            let g: f64 = rng.sample(StandardNormal);
            let w = (mode.k2() as f64).powf(-decay);
            f.set(mode, T::lit(g * w));
        }
        f
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    #[inline]
    fn index(&self, mode: ModeIndex) -> usize {
        debug_assert!(mode.m >= 1 && mode.n >= 1 && mode.m <= self.m_max && mode.n <= self.m_max);
        (mode.m - 1) * self.m_max + (mode.n - 1)
    }

    #[inline]
    pub fn get(&self, mode: ModeIndex) -> T {
        self.coeffs[self.index(mode)]
    }

    #[inline]
    pub fn set(&mut self, mode: ModeIndex, value: T) {
        let i = self.index(mode);
        self.coeffs[i] = value;
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> {
        modes(self.m_max)
    }

    /// `(mode, amplitude)` pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, T)> + '_ {
        modes(self.m_max).zip(self.coeffs.iter().copied())
    }

    /// Applies `f(mode, amplitude)` to every coefficient.
    pub fn map_modes(&self, mut f: impl FnMut(ModeIndex, T) -> T) -> Self {
        let coeffs = self.iter().map(|(k, c)| f(k, c)).collect();
        Self {
            m_max: self.m_max,
            coeffs,
        }
    }

    /// `L²` inner product (Parseval on the orthonormal basis).
    pub fn dot(&self, other: &Self) -> T {
        self.check_same(other);
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a * *b).sum()
    }

    pub fn l2_norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn l2_norm(&self) -> T {
        self.l2_norm_sq().sqrt()
    }

    /// `|A^alpha u|²`.
    pub fn norm_f_sq(&self, alpha: T) -> T {
        self.iter()
            .map(|(k, c)| eigenvalue::<T>(k).powf(alpha + alpha) * c * c)
            .sum()
    }

    /// `|A^alpha u|`.
    pub fn norm_f(&self, alpha: T) -> T {
        self.norm_f_sq(alpha).sqrt()
    }

    /// `|u|²_{H₀¹} = Σ (m² + n²) c²`.
    pub fn h1_norm_sq(&self) -> T {
        self.iter().map(|(k, c)| T::of(k.k2()) * c * c).sum()
    }

    /// `|u|²_V = Σ λ c²`.
    pub fn v_norm_sq(&self) -> T {
        self.iter().map(|(k, c)| eigenvalue::<T>(k) * c * c).sum()
    }

    /// `S(t) u = e^{-tA} u`.
    pub fn semigroup_apply(&self, t: T) -> Result<Self> {
        if !(t >= T::zero()) {
            return Err(Error::domain(format!("semigroup time must be nonnegative, got {t}")));
        }
        Ok(self.map_modes(|k, c| c * (-eigenvalue::<T>(k) * t).exp()))
    }

    /// `A^alpha u`.
    pub fn frac_power_apply(&self, alpha: T) -> Self {
        self.map_modes(|k, c| c * eigenvalue::<T>(k).powf(alpha))
    }

    /// `u + s v`, in place.
    pub fn axpy(&mut self, s: T, v: &Self) {
        self.check_same(v);
        for (a, b) in self.coeffs.iter_mut().zip(&v.coeffs) {
            *a = *a + s * *b;
        }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Zero-padded or truncated copy with a different truncation.
    pub fn resized(&self, m_max: usize) -> Self {
        let mut out = Self::zeros(m_max);
        for mode in modes(m_max.min(self.m_max)) {
            out.set(mode, self.get(mode));
        }
        out
    }

    pub fn cast<U: Real>(&self) -> SpectralVelocityField<U> {
        SpectralVelocityField {
            m_max: self.m_max,
            coeffs: self.coeffs.iter().map(|c| U::lit(c.to_f64_lossy())).collect(),
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.m_max, other.m_max, "fields with different truncations");
    }
}

/// All modes `1 ≤ m, n ≤ m_max` in storage order.
pub fn modes(m_max: usize) -> impl Iterator<Item = ModeIndex> {
    (1..=m_max).flat_map(move |m| (1..=m_max).map(move |n| ModeIndex::new(m, n)))
}

impl<T: Real> Add for &SpectralVelocityField<T> {
    type Output = SpectralVelocityField<T>;
    fn add(self, rhs: Self) -> Self::Output {
        let mut out = self.clone();
        out.axpy(T::one(), rhs);
        out
    }
}

impl<T: Real> Sub for &SpectralVelocityField<T> {
    type Output = SpectralVelocityField<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        let mut out = self.clone();
        out.axpy(-T::one(), rhs);
        out
    }
}

impl<T: Real> Mul<T> for &SpectralVelocityField<T> {
    type Output = SpectralVelocityField<T>;
    fn mul(self, s: T) -> Self::Output {
        self.map_modes(|_, c| c * s)
    }
}

impl<T: Real> Neg for &SpectralVelocityField<T> {
    type Output = SpectralVelocityField<T>;
    fn neg(self) -> Self::Output {
        self.map_modes(|_, c| -c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenvalues() {
        assert_eq!(eigenvalue::<f64>(ModeIndex::new(1, 1)), 4.0);
        assert_eq!(eigenvalue::<f64>(ModeIndex::new(1, 2)), 25.0);
        for m in 1..10 {
            for n in 1..10 {
                let l = eigenvalue::<f64>(ModeIndex::new(m, n));
                assert!(eigenvalue::<f64>(ModeIndex::new(m + 1, n)) >= l);
                assert!(eigenvalue::<f64>(ModeIndex::new(m, n + 1)) >= l);
            }
        }
    }

    #[test]
    fn semigroup_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = SpectralVelocityField::<f64>::random(6, 0.0, &mut rng);
        assert_eq!(u.semigroup_apply(0.0).unwrap(), u);
        let a = u.semigroup_apply(0.1).unwrap().semigroup_apply(0.2).unwrap();
        let b = u.semigroup_apply(0.3).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
        for t in [0.1, 1.0] {
            let s = u.semigroup_apply(t).unwrap();
            assert!(s.l2_norm() <= (-4.0 * t).exp() * u.l2_norm() * (1.0 + 1e-14));
        }
        assert!(u.semigroup_apply(-1.0).is_err());
    }

    #[test]
    fn fractional_powers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = SpectralVelocityField::<f64>::random(5, 0.5, &mut rng);
        assert_eq!(u.frac_power_apply(0.0), u);
        let e = SpectralVelocityField::<f64>::basis(3, ModeIndex::new(1, 1));
        assert_eq!(e.frac_power_apply(0.5).get(ModeIndex::new(1, 1)), 2.0);
        let back = u.frac_power_apply(0.5).frac_power_apply(-0.5);
        for (x, y) in back.coeffs().iter().zip(u.coeffs()) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
        // V-norm is norm_F at 1/2, H₀¹ at 1/4
        assert!((u.norm_f_sq(0.5) - u.v_norm_sq()).abs() <= 1e-12 * u.v_norm_sq());
        assert!((u.norm_f_sq(0.25) - u.h1_norm_sq()).abs() <= 1e-12 * u.h1_norm_sq());
    }

    #[test]
    fn resize_preserves_low_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = SpectralVelocityField::<f64>::random(4, 0.0, &mut rng);
        let w = u.resized(8).resized(4);
        assert_eq!(u, w);
    }

    #[test]
    fn single_precision_field() {
        let e = SpectralVelocityField::<f32>::basis(2, ModeIndex::new(2, 1));
        assert_eq!(e.v_norm_sq(), 25.0f32);
    }
}
