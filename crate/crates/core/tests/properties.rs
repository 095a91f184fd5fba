use bipolar_core::fbm::{fbm_covariance, sample_fbm, uniform_grid, HurstParam};
use bipolar_core::fluid::{FluidOps, FluidParams};
use bipolar_core::seed::rng;
use bipolar_core::spectral::{lattice_sum, ModeIndex};
use bipolar_core::stoch::convolution_series;
use bipolar_core::Field;
use proptest::prelude::*;

fn field(m: usize, seed: u64) -> Field {
    Field::random(m, 1.0, &mut rng(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn covariance_is_symmetric(t in 0.0f64..3.0, s in 0.0f64..3.0, h in 0.05f64..0.95) {
        let hh = HurstParam::new(h).unwrap();
        let a = fbm_covariance(t, s, hh).unwrap();
        let b = fbm_covariance(s, t, hh).unwrap();
        prop_assert_eq!(a, b);
        // Cauchy-Schwarz
        let bound = (fbm_covariance(t, t, hh).unwrap() * fbm_covariance(s, s, hh).unwrap()).sqrt();
        prop_assert!(a.abs() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), h in 0.1f64..0.9) {
        let grid = uniform_grid(1.0, 32);
        let hh = HurstParam::new(h).unwrap();
        let a = sample_fbm(&grid, hh, seed).unwrap();
        let b = sample_fbm(&grid, hh, seed).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn lattice_sums_increase_with_m(s in 0.5f64..3.0, m in 1usize..40) {
        prop_assert!(lattice_sum(s, m + 1) > lattice_sum(s, m));
    }

    #[test]
    fn eigenvalues_increase_along_rows(m in 1usize..50, n in 1usize..50) {
        let k = ModeIndex::new(m, n);
        prop_assert!(ModeIndex::new(m + 1, n).eigenvalue::<f64>() > k.eigenvalue::<f64>());
        prop_assert!(ModeIndex::new(m, n + 1).eigenvalue::<f64>() > k.eigenvalue::<f64>());
    }

    #[test]
    fn semigroup_property(seed in any::<u64>(), t in 0.0f64..0.05, s in 0.0f64..0.05) {
        let u = field(6, seed);
        let a = u.semigroup_apply(t + s).unwrap();
        let b = u.semigroup_apply(t).unwrap().semigroup_apply(s).unwrap();
        prop_assert!((&a - &b).max_abs() <= 1e-14 * u.max_abs().max(1.0));
    }

    #[test]
    fn convolution_is_linear_in_the_path(seed in any::<u64>(), c in -3.0f64..3.0, lambda in 0.0f64..500.0) {
        let grid = uniform_grid(1.0, 64);
        let hh = HurstParam::new(0.35).unwrap();
        let a = sample_fbm(&grid, hh, seed).unwrap().values;
        let b = sample_fbm(&grid, hh, seed.wrapping_add(1)).unwrap().values;
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + c * y).collect();
        let (za, zb, zm) = (
            convolution_series(&a, 1.0 / 64.0, lambda),
            convolution_series(&b, 1.0 / 64.0, lambda),
            convolution_series(&mix, 1.0 / 64.0, lambda),
        );
        for i in 0..za.len() {
            prop_assert!((zm[i] - za[i] - c * zb[i]).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn trilinear_form_is_antisymmetric(seed in any::<u64>()) {
        let ops = FluidOps::<f64>::new(6, FluidParams::default()).unwrap();
        let (u, v, w) = (field(6, seed), field(6, seed ^ 1), field(6, seed ^ 2));
        let scale = u.h1_norm_sq().sqrt() * v.h1_norm_sq().sqrt() * w.h1_norm_sq().sqrt();
        let sum = ops.b_trilinear(&u, &v, &w) + ops.b_trilinear(&u, &w, &v);
        prop_assert!(sum.abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn trilinear_form_is_linear_in_first_slot(seed in any::<u64>(), c in -2.0f64..2.0) {
        let ops = FluidOps::<f64>::new(6, FluidParams::default()).unwrap();
        let (u, u2, v, w) = (field(6, seed), field(6, seed ^ 3), field(6, seed ^ 1), field(6, seed ^ 2));
        let mixed = &u + &(&u2 * c);
        let lhs = ops.b_trilinear(&mixed, &v, &w);
        let rhs = ops.b_trilinear(&u, &v, &w) + c * ops.b_trilinear(&u2, &v, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn viscous_term_is_monotone(seed in any::<u64>(), a in 0.1f64..5.0) {
        let ops = FluidOps::<f64>::new(6, FluidParams::default()).unwrap();
        let u = &field(6, seed) * a;
        let v = field(6, seed ^ 7);
        // <N(u) − N(v), u − v> ≥ 0
        let d = &u - &v;
        let gap = ops.n_pairing(&u, &d) - ops.n_pairing(&v, &d);
        prop_assert!(gap >= -1e-12);
    }
}
