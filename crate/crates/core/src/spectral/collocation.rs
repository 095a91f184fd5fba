//! Collocation grid on `[0, π]²` and the sine/cosine transforms between
//! basis amplitudes and grid values.
//!
//! Nodes are `x_j = jπ/N`, `j = 0..=N`, with trapezoid weights. On this grid
//! the rule integrates `cos(kx)` exactly for `0 ≤ k < 2N`, so every product
//! of three fields truncated at `M` is integrated exactly once `2N > 3M`.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::field::{modes, SpectralVelocityField};

/// Trigonometric factor along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
}

/// Smallest dealiased interval count for truncation `m_max`.
pub fn dealiased_size(m_max: usize) -> usize {
    3 * m_max / 2 + 1
}

/// Scalar values on the `(N+1)²` grid, indexed `[i][j]` with `i` along `x₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridScalar<T> {
    side: usize,
    data: Vec<T>,
}

impl<T: Real> GridScalar<T> {
    pub fn zeros(side: usize) -> Self {
        Self {
            side,
            data: vec![T::zero(); side * side],
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.side + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.side + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Pointwise combination of two grids.
    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Self {
            side: self.side,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            side: self.side,
            data: self.data.iter().map(|a| f(*a)).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Velocity sampled on the collocation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationField<T> {
    pub u1: GridScalar<T>,
    pub u2: GridScalar<T>,
}

/// Grid, quadrature weights and trig tables for a truncation.
#[derive(Debug, Clone)]
pub struct CollocationGrid<T> {
    m_max: usize,
    intervals: usize,
    nodes: Vec<T>,
    weights: Vec<T>,
    // [k][j] for k = 0..=m_max
    sin_tab: Vec<T>,
    cos_tab: Vec<T>,
}

impl<T: Real> CollocationGrid<T> {
    /// Grid with `intervals` cells per side; requires `2·intervals > 3·m_max`.
    pub fn new(m_max: usize, intervals: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::domain("truncation must be at least 1"));
        }
        if 2 * intervals <= 3 * m_max {
            return Err(Error::domain(format!(
                "collocation grid with {intervals} intervals does not dealias truncation {m_max} (need 2N > 3M)"
            )));
        }
        Ok(Self::build(m_max, intervals))
    }

    /// Grid without the dealiasing requirement, for oracle comparisons.
    pub fn new_unchecked(m_max: usize, intervals: usize) -> Self {
        Self::build(m_max, intervals)
    }

    /// Smallest dealiased grid for `m_max`.
    pub fn dealiased(m_max: usize) -> Self {
        Self::build(m_max, dealiased_size(m_max))
    }

    fn build(m_max: usize, intervals: usize) -> Self {
        let side = intervals + 1;
        let h = T::PI() / T::of(intervals);
        let nodes: Vec<T> = (0..side).map(|j| T::of(j) * h).collect();
        let mut weights = vec![h; side];
        weights[0] = h * T::lit(0.5);
        weights[intervals] = h * T::lit(0.5);
        let mut sin_tab = vec![T::zero(); (m_max + 1) * side];
        let mut cos_tab = vec![T::zero(); (m_max + 1) * side];
        for k in 0..=m_max {
            for j in 0..side {
                // reduce k·j modulo 2N before scaling to keep the argument small
                let r = (k * j) % (2 * intervals);
                let arg = T::of(r) * h;
                sin_tab[k * side + j] = if r == 0 || r == intervals { T::zero() } else { arg.sin() };
                cos_tab[k * side + j] = arg.cos();
            }
        }
        Self {
            m_max,
            intervals,
            nodes,
            weights,
            sin_tab,
            cos_tab,
        }
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn side(&self) -> usize {
        self.intervals + 1
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    fn tab(&self, kind: Trig, k: usize, j: usize) -> T {
        let side = self.side();
        match kind {
            Trig::Sin => self.sin_tab[k * side + j],
            Trig::Cos => self.cos_tab[k * side + j],
        }
    }

    /// Basis normalization `2 / (π √(m² + n²))`.
    #[inline]
    pub fn kappa(m: usize, n: usize) -> T {
        T::lit(2.0) / (T::PI() * T::of(m * m + n * n).sqrt())
    }

    /// `F(x_i, y_j) = Σ_{m,n} a_mn X_m(x_i) Y_n(y_j)` for `a` in row-major `(m, n)` order.
    pub fn synthesize(&self, a: &[T], xk: Trig, yk: Trig) -> GridScalar<T> {
        let m_max = self.m_max;
        let side = self.side();
        debug_assert_eq!(a.len(), m_max * m_max);
        // tmp[m][j] = Σ_n a[m][n] Y_n(y_j)
        let mut tmp = vec![T::zero(); m_max * side];
        for m in 0..m_max {
            let row = &a[m * m_max..(m + 1) * m_max];
            for j in 0..side {
                let mut s = T::zero();
                for (n, c) in row.iter().enumerate() {
                    s = s + *c * self.tab(yk, n + 1, j);
                }
                tmp[m * side + j] = s;
            }
        }
        let mut out = GridScalar::zeros(side);
        for i in 0..side {
            for j in 0..side {
                let mut s = T::zero();
                for m in 0..m_max {
                    s = s + self.tab(xk, m + 1, i) * tmp[m * side + j];
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// `A_mn = Σ_{i,j} w_i w_j F_ij X_m(x_i) Y_n(y_j)`, the quadrature of `∫∫ F X_m Y_n`.
    pub fn analyze(&self, f: &GridScalar<T>, xk: Trig, yk: Trig) -> Vec<T> {
        let m_max = self.m_max;
        let side = self.side();
        // tmp[m][j] = Σ_i w_i X_m(x_i) F_ij
        let mut tmp = vec![T::zero(); m_max * side];
        for m in 0..m_max {
            for i in 0..side {
                let c = self.weights[i] * self.tab(xk, m + 1, i);
                if c == T::zero() {
                    continue;
                }
                for j in 0..side {
                    tmp[m * side + j] = tmp[m * side + j] + c * f.get(i, j);
                }
            }
        }
        let mut out = vec![T::zero(); m_max * m_max];
        for m in 0..m_max {
            for n in 0..m_max {
                let mut s = T::zero();
                for j in 0..side {
                    s = s + self.weights[j] * self.tab(yk, n + 1, j) * tmp[m * side + j];
                }
                out[m * m_max + n] = s;
            }
        }
        out
    }

    /// Quadrature of `∫∫ F`.
    pub fn integrate(&self, f: &GridScalar<T>) -> T {
        let side = self.side();
        let mut s = T::zero();
        for i in 0..side {
            let mut row = T::zero();
            for j in 0..side {
                row = row + self.weights[j] * f.get(i, j);
            }
            s = s + self.weights[i] * row;
        }
        s
    }

    /// Amplitudes `κ_mn c_mn` multiplied by `g(m, n)`, in storage order.
    fn weighted(&self, u: &SpectralVelocityField<T>, g: impl Fn(T, T) -> T) -> Vec<T> {
        self.check(u);
        u.iter()
            .map(|(k, c)| c * Self::kappa(k.m, k.n) * g(T::of(k.m), T::of(k.n)))
            .collect()
    }

    fn check(&self, u: &SpectralVelocityField<T>) {
        assert_eq!(u.m_max(), self.m_max, "field truncation does not match grid");
    }

    /// Velocity `u = ∇⊥ψ = (∂₂ψ, −∂₁ψ)` on the grid.
    pub fn velocity(&self, u: &SpectralVelocityField<T>) -> CollocationField<T> {
        let a1 = self.weighted(u, |_, n| n);
        let a2 = self.weighted(u, |m, _| -m);
        CollocationField {
            u1: self.synthesize(&a1, Trig::Sin, Trig::Cos),
            u2: self.synthesize(&a2, Trig::Cos, Trig::Sin),
        }
    }

    /// `[∂₁u₁, ∂₂u₁, ∂₁u₂, ∂₂u₂]` on the grid.
    pub fn velocity_gradient(&self, u: &SpectralVelocityField<T>) -> [GridScalar<T>; 4] {
        let d11 = self.weighted(u, |m, n| m * n);
        let d21 = self.weighted(u, |_, n| -n * n);
        let d12 = self.weighted(u, |m, _| m * m);
        let d11g = self.synthesize(&d11, Trig::Cos, Trig::Cos);
        let d22g = d11g.map(|v| -v);
        [
            d11g,
            self.synthesize(&d21, Trig::Sin, Trig::Sin),
            self.synthesize(&d12, Trig::Sin, Trig::Sin),
            d22g,
        ]
    }

    /// Leray projection of a grid vector field onto the truncated basis.
    ///
    /// Computes `(f, e_mn)` by quadrature. Since `e_mn = κ∇⊥φ` with
    /// `φ = sin mx₁ sin nx₂` vanishing on the boundary, this equals
    /// `κ(∂₁f₂ − ∂₂f₁, φ)`: the sine transform of the vorticity, rescaled to
    /// basis amplitudes. Gradient fields have zero vorticity and are discarded.
    pub fn project(&self, f: &CollocationField<T>) -> SpectralVelocityField<T> {
        let a1 = self.analyze(&f.u1, Trig::Sin, Trig::Cos);
        let a2 = self.analyze(&f.u2, Trig::Cos, Trig::Sin);
        let m_max = self.m_max;
        let coeffs = modes(m_max)
            .enumerate()
            .map(|(idx, k)| Self::kappa(k.m, k.n) * (T::of(k.n) * a1[idx] - T::of(k.m) * a2[idx]))
            .collect();
        SpectralVelocityField::from_coeffs(m_max, coeffs).expect("matching sizes")
    }

    /// Quadrature of `∫ f·g` for grid vector fields.
    pub fn inner(&self, f: &CollocationField<T>, g: &CollocationField<T>) -> T {
        let p = f.u1.zip_map(&g.u1, |a, b| a * b);
        let q = f.u2.zip_map(&g.u2, |a, b| a * b);
        self.integrate(&p.zip_map(&q, |a, b| a + b))
    }
}

#[cfg(test)]
mod tests {
    use super::super::field::ModeIndex;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn rejects_aliased_grid() {
        assert!(CollocationGrid::<f64>::new(8, 12).is_err());
        assert!(CollocationGrid::<f64>::new(8, 13).is_ok());
    }

    #[test]
    fn discrete_orthonormality() {
        for m_max in [4usize, 9, 16] {
            let g = CollocationGrid::<f64>::dealiased(m_max);
            let fields: Vec<_> = modes(m_max)
                .map(|k| g.velocity(&SpectralVelocityField::basis(m_max, k)))
                .collect();
            for (a, fa) in fields.iter().enumerate() {
                for (b, fb) in fields.iter().enumerate().skip(a) {
                    let v = g.inner(fa, fb);
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-10, "M={m_max} {a},{b}: {v}");
                }
            }
        }
    }

    #[test]
    fn velocity_matches_closed_form() {
        let g = CollocationGrid::<f64>::dealiased(5);
        let k = ModeIndex::new(2, 3);
        let v = g.velocity(&SpectralVelocityField::basis(5, k));
        let kap = 2.0 / (PI * 13f64.sqrt());
        for (i, &x) in g.nodes().iter().enumerate() {
            for (j, &y) in g.nodes().iter().enumerate() {
                let u1 = kap * 3.0 * (2.0 * x).sin() * (3.0 * y).cos();
                let u2 = -kap * 2.0 * (2.0 * x).cos() * (3.0 * y).sin();
                assert!((v.u1.get(i, j) - u1).abs() < 1e-12);
                assert!((v.u2.get(i, j) - u2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_on_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = CollocationGrid::<f64>::dealiased(8);
        let u = SpectralVelocityField::<f64>::random(8, 0.0, &mut rng);
        let v = g.velocity(&u);
        assert!((g.inner(&v, &v) - u.l2_norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent_and_kills_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 6;
        let g = CollocationGrid::<f64>::dealiased(m);
        let u = SpectralVelocityField::<f64>::random(m, 0.0, &mut rng);
        let p = g.project(&g.velocity(&u));
        assert!((&p - &u).max_abs() < 1e-10);
        let pp = g.project(&g.velocity(&p));
        assert!((&pp - &p).max_abs() < 1e-10);
        // ∇q for q = Σ b_pq cos px cos qy
        let side = g.side();
        let mut grad = CollocationField {
            u1: GridScalar::zeros(side),
            u2: GridScalar::zeros(side),
        };
        let b: Vec<(usize, usize, f64)> = vec![(1, 2, 0.7), (3, 1, -0.4), (2, 2, 1.1), (0, 3, 0.5)];
        for (i, &x) in g.nodes().iter().enumerate() {
            for (j, &y) in g.nodes().iter().enumerate() {
                let mut gx = 0.0;
                let mut gy = 0.0;
                for &(p, q, c) in &b {
                    gx -= c * p as f64 * (p as f64 * x).sin() * (q as f64 * y).cos();
                    gy -= c * q as f64 * (p as f64 * x).cos() * (q as f64 * y).sin();
                }
                grad.u1.set(i, j, gx);
                grad.u2.set(i, j, gy);
            }
        }
        assert!(g.project(&grad).max_abs() < 1e-10);
    }
}
