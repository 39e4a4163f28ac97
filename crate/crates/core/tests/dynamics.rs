use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use hydro_core::analysis::{apriori_ledger, energy_closure};
use hydro_core::hydrostatic::Projector;
use hydro_core::nonlinear::NonlinearEvaluator;
use hydro_core::random::smooth_field;
use hydro_core::stepper::{run, run_with_initial, taylor_green, HarmonicForcing, RunConfig, RunOptions, TrajectoryRecord, ZeroForcing};
use hydro_core::{BcVariant, Domain, DomainSpec, VelocityField};

fn cube(n: usize, bc: BcVariant) -> Domain {
    Domain::new(DomainSpec::cube(n, bc)).unwrap()
}

fn final_field(d: &Domain, v0: &VelocityField, dt: f64, t_end: f64, nonlinear: bool) -> VelocityField {
    let mut o = RunOptions::new(dt, t_end);
    o.nonlinear = nonlinear;
    o.snapshot_stride = usize::MAX;
    run_with_initial(d, v0.clone(), Arc::new(ZeroForcing), &o).unwrap().snapshots.pop().unwrap().v
}

#[test]
fn nonlinear_run_converges_at_second_order() {
    let d = cube(8, BcVariant::Upper);
    let v0 = Projector::new(&d).project(&smooth_field(&d, 12, 1.0)).unwrap().scaled(3.0);
    let a = final_field(&d, &v0, 4e-3, 0.1, true);
    let b = final_field(&d, &v0, 2e-3, 0.1, true);
    let c = final_field(&d, &v0, 1e-3, 0.1, true);
    let ratio = VelocityField::lincomb(1.0, &a, -1.0, &b).norm_l2() / VelocityField::lincomb(1.0, &b, -1.0, &c).norm_l2();
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
}

#[test]
fn linear_eigenmode_decays_at_its_eigenvalue() {
    for bc in BcVariant::ALL {
        let d = cube(8, bc);
        // k = (1, 0) in component 1 is transverse, so P leaves it alone
        let v0 = VelocityField::mode(&d, 1, 1, 0, 1, 1.0);
        let lam = 4.0 * PI * PI + match bc {
            BcVariant::Empty => PI * PI,
            BcVariant::Both => 4.0 * PI * PI,
            _ => (1.5 * PI).powi(2),
        };
        let t = 0.05;
        let mut errs = Vec::new();
        for dt in [1e-3, 5e-4] {
            let v = final_field(&d, &v0, dt, t, false);
            errs.push(VelocityField::lincomb(1.0, &v, -(-lam * t).exp(), &v0).norm_l2() / v0.norm_l2());
        }
        assert!(errs[0] < 1e-3, "{bc}: {errs:?}");
        assert!((3.5..=4.5).contains(&(errs[0] / errs[1])), "{bc}: {errs:?}");
    }
}

#[test]
fn energy_column_follows_exact_decay() {
    let d = cube(8, BcVariant::Empty);
    let v0 = VelocityField::mode(&d, 0, 0, 2, 0, 0.7);
    let lam = 16.0 * PI * PI;
    let mut o = RunOptions::new(1e-4, 0.02);
    o.snapshot_stride = 50;
    let rec = run_with_initial(&d, v0, Arc::new(ZeroForcing), &o).unwrap();
    let e = rec.column("energy").unwrap();
    for (t, e) in rec.times().iter().zip(&e) {
        let want = rec.energy0 * (-2.0 * lam * t).exp();
        assert!((e - want).abs() <= 1e-5 * rec.energy0, "t = {t}: {e} vs {want}");
    }
}

/// Copy coefficients onto a finer horizontal grid with the same vertical basis.
fn embed(v: &VelocityField, fine: &Domain) -> VelocityField {
    let c = v.domain();
    let mut out = VelocityField::zeros(fine);
    for comp in 0..2 {
        for m in 0..c.nmodes() {
            for p in 0..c.plane() {
                let (kx, ky) = c.k_of(p);
                let i = out.idx(comp, m, fine.index_of(kx, ky));
                out.coeffs_mut()[i] = v.coeffs()[v.idx(comp, m, p)];
            }
        }
    }
    out
}

#[test]
fn dealiased_products_match_a_finer_grid() {
    for bc in BcVariant::ALL {
        let coarse = Domain::new(DomainSpec::new(8, 8, 6, 1.0, bc)).unwrap();
        let fine = Domain::new(DomainSpec::new(16, 16, 6, 1.0, bc)).unwrap();
        let mut u = Projector::new(&coarse).project(&smooth_field(&coarse, 4, 0.5)).unwrap();
        let mut v = Projector::new(&coarse).project(&smooth_field(&coarse, 5, 0.5)).unwrap();
        u.dealias();
        v.dealias();
        let fc = NonlinearEvaluator::new(&coarse).advect(&u, &v).unwrap();
        let ff = NonlinearEvaluator::new(&fine).advect(&embed(&u, &fine), &embed(&v, &fine)).unwrap();
        let mut err = 0.0f64;
        for comp in 0..2 {
            for m in 0..coarse.nmodes() {
                for p in 0..coarse.plane() {
                    if coarse.in_mask(p) {
                        let (kx, ky) = coarse.k_of(p);
                        let a = fc.coeffs()[fc.idx(comp, m, p)];
                        let b = ff.coeffs()[ff.idx(comp, m, fine.index_of(kx, ky))];
                        err = err.max((a - b).norm());
                    }
                }
            }
        }
        assert!(err <= 1e-12 * ff.max_abs_coeff(), "{bc}: {err}");
    }
}

fn small_record(initial: &str, bc: BcVariant) -> TrajectoryRecord {
    run(&RunConfig {
        nx: 8,
        ny: 8,
        nz: 8,
        bc,
        initial: initial.into(),
        amplitude: 1.0,
        dt: 2e-3,
        t_end: 0.05,
        snapshot_stride: 5,
        ..RunConfig::default()
    })
    .unwrap()
}

#[test]
fn ledger_of_the_zero_solution_is_zero() {
    let rec = small_record("zero", BcVariant::Both);
    let l = apriori_ledger(&rec).unwrap();
    assert!(l.all_finite());
    assert!(l.rows.iter().all(|r| r.values.iter().all(|x| *x == 0.0)));
    assert_eq!(energy_closure(&rec).unwrap().max_abs, 0.0);
}

#[test]
fn ledger_of_a_decaying_eigenmode_decreases() {
    for bc in BcVariant::ALL {
        let rec = small_record("eigenmode", bc);
        let l = apriori_ledger(&rec).unwrap();
        assert!(l.all_finite() && l.flags.is_empty(), "{bc}: {:?}", l.flags);
        let e = l.columns.iter().position(|c| c == "energy").unwrap();
        let g = l.columns.iter().position(|c| c == "grad_v_l2").unwrap();
        for w in l.rows.windows(2) {
            assert!(w[1].values[e] < w[0].values[e] && w[1].values[g] < w[0].values[g], "{bc}");
        }
        assert!(l.running_max.iter().all(|m| *m < 1e6));
    }
}

#[test]
fn forced_energy_budget_closes() {
    let d = cube(8, BcVariant::Bottom);
    let f = Projector::new(&d).project(&smooth_field(&d, 8, 1.5)).unwrap();
    let f = f.scaled(5.0 / f.norm_l2());
    let forcing = HarmonicForcing { field: f, omega: 2.0 * PI };
    let v0 = taylor_green(&d, 1.0);
    let mut rs = Vec::new();
    for dt in [2e-3, 1e-3] {
        let mut o = RunOptions::new(dt, 0.2);
        o.snapshot_stride = (0.05 / dt) as usize;
        let rec = run_with_initial(&d, v0.clone(), Arc::new(forcing.clone()), &o).unwrap();
        let work = rec.column("work").unwrap();
        assert!(work.last().unwrap().abs() > 1e-3);
        rs.push(energy_closure(&rec).unwrap().max_abs);
    }
    assert!((3.0..=5.0).contains(&(rs[0] / rs[1])), "{rs:?}");
}

#[test]
fn zero_velocity_has_zero_advection_at_every_mode() {
    let d = cube(8, BcVariant::Empty);
    let z = VelocityField::zeros(&d);
    let v = smooth_field(&d, 1, 1.0);
    let f = NonlinearEvaluator::new(&d).advect(&z, &v).unwrap();
    assert!(f.coeffs().iter().all(|c| *c == Complex64::default()));
}
