use std::f64::consts::PI;

use proptest::prelude::*;

use hydro_core::analysis::{besov_norm, lp_norm, NormSpec};
use hydro_core::field::{fluctuation, laplacian, mean_divergence, vertical_average, vertical_velocity_at};
use hydro_core::hydrostatic::{Projector, StokesOperator};
use hydro_core::nonlinear::NonlinearEvaluator;
use hydro_core::random::smooth_field;
use hydro_core::{BcVariant, Domain, DomainSpec, VelocityField};

fn bc() -> impl Strategy<Value = BcVariant> {
    prop::sample::select(BcVariant::ALL.to_vec())
}

fn domain(bc: BcVariant, nz: usize, h: f64) -> Domain {
    Domain::new(DomainSpec::new(8, 8, nz, h, bc)).unwrap()
}

fn kappa(bc: BcVariant, h: f64, m: usize) -> f64 {
    match bc {
        BcVariant::Empty => m as f64 * PI / h,
        BcVariant::Both => (m + 1) as f64 * PI / h,
        _ => (m as f64 + 0.5) * PI / h,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_round_trip(bc in bc(), nz in 4usize..10, seed in any::<u64>()) {
        let d = domain(bc, nz, 1.0);
        let mut v = smooth_field(&d, seed, 0.5);
        v.dealias();
        let w = VelocityField::from_grid(&d, &v.to_grid()).unwrap();
        prop_assert!(w.max_diff(&v) <= 1e-12 * v.max_abs_coeff());
    }

    #[test]
    fn projection_is_a_linear_idempotent_map_onto_the_constraint(bc in bc(), seed in any::<u64>(), a in -3.0f64..3.0) {
        let d = domain(bc, 6, 0.8);
        let pr = Projector::new(&d);
        let u = smooth_field(&d, seed, 0.75);
        let v = smooth_field(&d, seed ^ 1, 0.75);
        let pu = pr.project(&u).unwrap();
        prop_assert!(pr.project(&pu).unwrap().max_diff(&pu) <= 1e-13 * u.max_abs_coeff());
        let lhs = pr.project(&VelocityField::lincomb(a, &u, 1.0, &v)).unwrap();
        let rhs = VelocityField::lincomb(a, &pu, 1.0, &pr.project(&v).unwrap());
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12 * (1.0 + a.abs()) * u.max_abs_coeff().max(v.max_abs_coeff()));
        let md = mean_divergence(&pu).unwrap();
        prop_assert!(md.coeffs().iter().all(|c| c.norm() <= 1e-13 * u.max_abs_coeff()));
        // P is a contraction in L^2
        prop_assert!(pu.norm_l2() <= u.norm_l2() * (1.0 + 1e-14));
    }

    #[test]
    fn advection_is_bilinear(bc in bc(), seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let d = domain(bc, 5, 1.0);
        let ev = NonlinearEvaluator::new(&d);
        let pr = Projector::new(&d);
        let u = pr.project(&smooth_field(&d, seed, 1.0)).unwrap();
        let v = pr.project(&smooth_field(&d, seed ^ 2, 1.0)).unwrap();
        let w = pr.project(&smooth_field(&d, seed ^ 3, 1.0)).unwrap();
        let lhs = ev.advect(&VelocityField::lincomb(a, &u, b, &v), &w).unwrap();
        let rhs = VelocityField::lincomb(a, &ev.advect(&u, &w).unwrap(), b, &ev.advect(&v, &w).unwrap());
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12 * rhs.max_abs_coeff().max(1e-300));
        let lhs = ev.advect(&w, &VelocityField::lincomb(a, &u, b, &v)).unwrap();
        let rhs = VelocityField::lincomb(a, &ev.advect(&w, &u).unwrap(), b, &ev.advect(&w, &v).unwrap());
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12 * rhs.max_abs_coeff().max(1e-300));
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive(bc in bc(), seed in any::<u64>(), a in -4.0f64..4.0, p in 1.2f64..6.0) {
        let d = domain(bc, 6, 1.0);
        let u = smooth_field(&d, seed, 1.0);
        let v = smooth_field(&d, seed ^ 5, 1.0);
        let n = lp_norm(&u, p).unwrap();
        prop_assert!((lp_norm(&u.scaled(a), p).unwrap() - a.abs() * n).abs() <= 1e-12 * n.max(1e-300) * (1.0 + a.abs()));
        let s = VelocityField::lincomb(1.0, &u, 1.0, &v);
        prop_assert!(lp_norm(&s, p).unwrap() <= (n + lp_norm(&v, p).unwrap()) * (1.0 + 1e-12));
        let b = besov_norm(&u, 0.5, p, 2.0).unwrap();
        prop_assert!((besov_norm(&u.scaled(a), 0.5, p, 2.0).unwrap() - a.abs() * b).abs() <= 1e-12 * b * (1.0 + a.abs()));
        prop_assert!(besov_norm(&s, 0.5, p, 2.0).unwrap() <= (b + besov_norm(&v, 0.5, p, 2.0).unwrap()) * (1.0 + 1e-12));
    }

    #[test]
    fn norm_specs_print_and_parse_back(s in 0.0f64..3.0, p in 1.01f64..9.0, q in 1.01f64..9.0, which in 0usize..4) {
        let spec = match which {
            0 => NormSpec::lp(p),
            1 => NormSpec::sobolev(s),
            2 => NormSpec::besov(s, p, q),
            _ => NormSpec::time_weighted(s, q, 1.0),
        };
        prop_assert_eq!(spec.to_string().parse::<NormSpec>().unwrap(), spec);
    }

    #[test]
    fn fluctuation_has_no_mean_and_w_vanishes_at_the_bottom(bc in bc(), seed in any::<u64>(), h in 0.3f64..2.5) {
        let d = domain(bc, 6, h);
        let v = smooth_field(&d, seed, 1.0);
        let f = fluctuation(&v).unwrap();
        let bar = vertical_average(&f).unwrap();
        for c in bar.iter() {
            prop_assert!(c.coeffs().iter().all(|x| x.norm() <= 1e-13 * v.max_abs_coeff()));
        }
        prop_assert!(vertical_velocity_at(&v, -h).unwrap().iter().all(|w| *w == 0.0));
        let pv = Projector::new(&d).project(&v).unwrap();
        let top = vertical_velocity_at(&pv, 0.0).unwrap();
        prop_assert!(top.iter().all(|w| w.abs() <= 1e-10 * (1.0 + pv.norm_grad())));
    }

    #[test]
    fn modes_are_laplacian_eigenfunctions(bc in bc(), kx in -2i64..=2, ky in -2i64..=2, m in 0usize..6, h in 0.4f64..2.0) {
        let d = domain(bc, 6, h);
        let v = VelocityField::mode(&d, 1, kx, ky, m, 1.0);
        let want = v.scaled(-(4.0 * PI * PI * (kx * kx + ky * ky) as f64 + kappa(bc, h, m).powi(2)));
        let got = laplacian(&v).unwrap();
        prop_assert!(got.max_diff(&want) <= 1e-12 * want.max_abs_coeff().max(1.0));
    }

    #[test]
    fn semigroup_is_a_contraction(bc in bc(), seed in any::<u64>(), t in 0.0f64..0.2) {
        let d = domain(bc, 6, 1.0);
        let op = StokesOperator::new(&d);
        let v = Projector::new(&d).project(&smooth_field(&d, seed, 0.75)).unwrap();
        let s = op.apply_semigroup(&v, t).unwrap();
        prop_assert!(s.norm_l2() <= v.norm_l2() * (1.0 + 1e-13));
        // -A is nonnegative: <Av, v> <= 0
        prop_assert!(op.apply_stokes(&v).unwrap().dot(&v) <= 1e-12 * v.norm_grad().powi(2));
    }
}
