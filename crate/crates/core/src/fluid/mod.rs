//! Fluid nonlinearities on the spectral basis: rate of deformation, the forms
//! `a` and `b`, convection `B(u)` and the shear-dependent viscosity `N(u)`.
//!
//! Products are formed on the collocation grid. With `2N > 3M` every
//! trilinear integral of truncated fields is exact, so the identities of `b`
//! hold to round-off. The viscosity `μ(u)` is not polynomial; `N` uses its
//! own, finer grid whose quadrature error decays geometrically.

mod c1;
mod params;

pub use c1::{estimate_c1, trilinear_ratio, C1Estimate};
pub use params::FluidParams;

use crate::scalar::Real;
use crate::spectral::{
    dealiased_size, modes, CollocationField, CollocationGrid, GridScalar, SpectralVelocityField, Trig,
};

/// Components of `e(u) = ½(∇u + ∇uᵀ)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationField<T> {
    pub e11: GridScalar<T>,
    pub e12: GridScalar<T>,
    pub e22: GridScalar<T>,
}

impl<T: Real> DeformationField<T> {
    /// Pointwise `|e|² = e₁₁² + e₂₂² + 2e₁₂²`.
    pub fn norm_sq(&self) -> GridScalar<T> {
        let d = self.e11.zip_map(&self.e22, |a, b| a * a + b * b);
        d.zip_map(&self.e12, |s, c| s + (c + c) * c)
    }
}

/// `a(u, v) = ½ Σ λ c_u c_v`, i.e. `½(Δu, Δv)` on the surrogate basis.
pub fn a_form<T: Real>(u: &SpectralVelocityField<T>, v: &SpectralVelocityField<T>) -> T {
    assert_eq!(u.m_max(), v.m_max());
    u.iter()
        .zip(v.coeffs())
        .map(|((k, a), b)| k.eigenvalue::<T>() * a * *b)
        .sum::<T>()
        * T::lit(0.5)
}

/// Pseudospectral evaluator for one truncation and parameter set.
#[derive(Debug, Clone)]
pub struct FluidOps<T> {
    grid: CollocationGrid<T>,
    visc_grid: CollocationGrid<T>,
    params: FluidParams,
}

impl<T: Real> FluidOps<T> {
    /// Dealiased grid for `B`; the viscosity grid has twice as many cells.
    pub fn new(m_max: usize, params: FluidParams) -> crate::Result<Self> {
        params.validate()?;
        let n = dealiased_size(m_max);
        Ok(Self {
            grid: CollocationGrid::new(m_max, n)?,
            visc_grid: CollocationGrid::new(m_max, 2 * n)?,
            params,
        })
    }

    /// Explicit interval counts for the convection and viscosity grids.
    pub fn with_grids(m_max: usize, params: FluidParams, n_conv: usize, n_visc: usize) -> crate::Result<Self> {
        params.validate()?;
        Ok(Self {
            grid: CollocationGrid::new(m_max, n_conv)?,
            visc_grid: CollocationGrid::new(m_max, n_visc)?,
            params,
        })
    }

    pub fn grid(&self) -> &CollocationGrid<T> {
        &self.grid
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn m_max(&self) -> usize {
        self.grid.m_max()
    }

    fn deformation_on(grid: &CollocationGrid<T>, u: &SpectralVelocityField<T>) -> DeformationField<T> {
        let [d11, d21, d12, d22] = grid.velocity_gradient(u);
        DeformationField {
            e11: d11,
            e12: d21.zip_map(&d12, |a, b| (a + b) * T::lit(0.5)),
            e22: d22,
        }
    }

    /// `e(u)` on the dealiased grid.
    pub fn deformation_tensor(&self, u: &SpectralVelocityField<T>) -> DeformationField<T> {
        Self::deformation_on(&self.grid, u)
    }

    /// `b(u, v, w) = ∫ u_i ∂_i v_j w_j`.
    pub fn b_trilinear(
        &self,
        u: &SpectralVelocityField<T>,
        v: &SpectralVelocityField<T>,
        w: &SpectralVelocityField<T>,
    ) -> T {
        let g = &self.grid;
        let uu = g.velocity(u);
        let ww = g.velocity(w);
        let [d11, d21, d12, d22] = g.velocity_gradient(v);
        let side = g.side();
        let mut f = GridScalar::zeros(side);
        for i in 0..side {
            for j in 0..side {
                let (u1, u2) = (uu.u1.get(i, j), uu.u2.get(i, j));
                let c1 = u1 * d11.get(i, j) + u2 * d21.get(i, j);
                let c2 = u1 * d12.get(i, j) + u2 * d22.get(i, j);
                f.set(i, j, c1 * ww.u1.get(i, j) + c2 * ww.u2.get(i, j));
            }
        }
        g.integrate(&f)
    }

    /// `(u·∇)u` on the grid.
    pub fn convection_field(&self, u: &SpectralVelocityField<T>) -> CollocationField<T> {
        let g = &self.grid;
        let uu = g.velocity(u);
        let [d11, d21, d12, d22] = g.velocity_gradient(u);
        let side = g.side();
        let mut c = CollocationField {
            u1: GridScalar::zeros(side),
            u2: GridScalar::zeros(side),
        };
        for i in 0..side {
            for j in 0..side {
                let (u1, u2) = (uu.u1.get(i, j), uu.u2.get(i, j));
                c.u1.set(i, j, u1 * d11.get(i, j) + u2 * d21.get(i, j));
                c.u2.set(i, j, u1 * d12.get(i, j) + u2 * d22.get(i, j));
            }
        }
        c
    }

    /// `B(u) = P[(u·∇)u]`, so that `⟨B(u), w⟩ = b(u, u, w)`.
    pub fn b_op(&self, u: &SpectralVelocityField<T>) -> SpectralVelocityField<T> {
        self.grid.project(&self.convection_field(u))
    }

    /// Pointwise `μ(u) = 2μ₀(ε + |e|²)^{−α/2}` on the viscosity grid.
    pub fn viscosity(&self, u: &SpectralVelocityField<T>) -> GridScalar<T> {
        let e = Self::deformation_on(&self.visc_grid, u);
        self.viscosity_from(&e)
    }

    fn viscosity_from(&self, e: &DeformationField<T>) -> GridScalar<T> {
        let two_mu0 = T::lit(2.0 * self.params.mu0);
        let eps = T::lit(self.params.eps);
        let expo = T::lit(-0.5 * self.params.alpha);
        e.norm_sq().map(|s| two_mu0 * (eps + s).powf(expo))
    }

    /// `N(u)` with `⟨N(u), v⟩ = ∫ μ(u) e(u):e(v)`.
    ///
    /// Weak form of `−P div(μ(u) e(u))`: against `e_mn` the pairing is
    /// `κ[mn ∫μ(e₁₁ − e₂₂) cos cos + (m² − n²) ∫μ e₁₂ sin sin]`.
    pub fn n_op(&self, u: &SpectralVelocityField<T>) -> SpectralVelocityField<T> {
        let g = &self.visc_grid;
        let e = Self::deformation_on(g, u);
        let mu = self.viscosity_from(&e);
        let diag = mu.zip_map(&e.e11.zip_map(&e.e22, |a, b| a - b), |m, d| m * d);
        let off = mu.zip_map(&e.e12, |m, c| m * c);
        let p = g.analyze(&diag, Trig::Cos, Trig::Cos);
        let q = g.analyze(&off, Trig::Sin, Trig::Sin);
        let coeffs = modes(u.m_max())
            .enumerate()
            .map(|(idx, k)| {
                let (m, n) = (T::of(k.m), T::of(k.n));
                CollocationGrid::<T>::kappa(k.m, k.n) * (m * n * p[idx] + (m * m - n * n) * q[idx])
            })
            .collect();
        SpectralVelocityField::from_coeffs(u.m_max(), coeffs).expect("matching sizes")
    }

    /// `∫ μ(u) e(u):e(v)` by direct quadrature on the viscosity grid.
    pub fn n_pairing(&self, u: &SpectralVelocityField<T>, v: &SpectralVelocityField<T>) -> T {
        let g = &self.visc_grid;
        let eu = Self::deformation_on(g, u);
        let ev = Self::deformation_on(g, v);
        let mu = self.viscosity_from(&eu);
        let side = g.side();
        let mut f = GridScalar::zeros(side);
        for i in 0..side {
            for j in 0..side {
                let c = eu.e11.get(i, j) * ev.e11.get(i, j)
                    + eu.e22.get(i, j) * ev.e22.get(i, j)
                    + T::lit(2.0) * eu.e12.get(i, j) * ev.e12.get(i, j);
                f.set(i, j, mu.get(i, j) * c);
            }
        }
        g.integrate(&f)
    }

    /// `B(u) + N(u)`, the nonlinear drift of the evolution.
    pub fn nonlinear(&self, u: &SpectralVelocityField<T>) -> SpectralVelocityField<T> {
        let mut out = self.b_op(u);
        out.axpy(T::one(), &self.n_op(u));
        out
    }
}
