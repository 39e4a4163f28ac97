//! Acceptance report: one PASS/FAIL line per criterion, measured against oracles written here.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;

use hydro_core::analysis::{
    analyticity_radius, apriori_ledger, fit_radius, generate_rough_data, smoothing_tracker, split_residual, time_derivative_record,
};
use hydro_core::field::{mean_divergence, vertical_average};
use hydro_core::hydrostatic::{project, spectrum, Projector, StokesOperator};
use hydro_core::nonlinear::{bilinear_estimate_probe, NonlinearEvaluator};
use hydro_core::random::smooth_field;
use hydro_core::stepper::{initial_condition, run_with_initial, taylor_green, RunConfig, RunOptions, TrajectoryRecord, ZeroForcing};
use hydro_core::{BcVariant, Domain, DomainSpec, VelocityField};

struct Outcome {
    pass: bool,
    detail: String,
}

fn cube(n: usize, bc: BcVariant) -> Domain {
    Domain::new(DomainSpec::cube(n, bc)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Vertical wavenumbers and zero-mean flags of the basis, from the boundary conditions alone.
fn vertical_modes(bc: BcVariant, h: f64, count: usize) -> Vec<(f64, bool)> {
    (0..count)
        .map(|i| match bc {
            BcVariant::Empty => (i as f64 * PI / h, i != 0),
            BcVariant::Both => ((i + 1) as f64 * PI / h, (i + 1) % 2 == 0),
            _ => ((i as f64 + 0.5) * PI / h, false),
        })
        .collect()
}

/// `4 pi^2 |k|^2 + kappa^2`, transverse for every mode, longitudinal where the mode has zero mean.
fn separable_oracle(bc: BcVariant, h: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for kx in -6i64..=6 {
        for ky in -6i64..=6 {
            for (kappa, zero_mean) in vertical_modes(bc, h, 48) {
                let l = 4.0 * PI * PI * (kx * kx + ky * ky) as f64 + kappa * kappa;
                out.push(l);
                if (kx == 0 && ky == 0) || zero_mean {
                    out.push(l);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.truncate(count);
    out
}

/// Positive roots of `tan x = x`, by bisection on `sin x - x cos x` between consecutive half-periods.
fn tan_roots(count: usize) -> Vec<f64> {
    let g = |x: f64| x.sin() - x * x.cos();
    (1..=count)
        .map(|j| {
            let (mut a, mut b) = (j as f64 * PI, (j as f64 + 0.5) * PI);
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if g(a) * g(c) <= 0.0 {
                    b = c;
                } else {
                    a = c;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Continuous-problem spectrum with the longitudinal constraint solved through the secular equation.
fn secular_oracle(bc: BcVariant, h: f64, count: usize) -> Vec<f64> {
    let roots = tan_roots(40);
    let nu: Vec<f64> = match bc {
        BcVariant::Empty => Vec::new(),
        // symmetric profiles: tan(s h / 2) = s h / 2
        BcVariant::Both => roots.iter().map(|x| (2.0 * x / h).powi(2)).collect(),
        _ => roots.iter().map(|x| (x / h).powi(2)).collect(),
    };
    let mut out = Vec::new();
    for kx in -6i64..=6 {
        for ky in -6i64..=6 {
            let k2 = 4.0 * PI * PI * (kx * kx + ky * ky) as f64;
            for (kappa, zero_mean) in vertical_modes(bc, h, 48) {
                out.push(k2 + kappa * kappa);
                if (kx == 0 && ky == 0) || zero_mean {
                    out.push(k2 + kappa * kappa);
                }
            }
            if kx != 0 || ky != 0 {
                out.extend(nu.iter().map(|n| k2 + n));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.truncate(count);
    out
}

fn criterion_spectrum() -> Outcome {
    let mut failing = Vec::new();
    let mut bound_ok = true;
    let mut secular_worst = 0.0f64;
    for bc in BcVariant::ALL {
        for h in [0.5, 1.0, 2.0] {
            let got = spectrum(bc, h, 50).unwrap().values();
            let want = separable_oracle(bc, h, 50);
            let worst = got.iter().zip(&want).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
            if worst > 1e-10 {
                failing.push(format!("{bc}/h={h}:{worst:.1e}"));
            }
            let s = got[0];
            if bc.has_dirichlet() {
                bound_ok &= s >= (PI / (2.0 * h)).powi(2).min(4.0 * PI * PI) * (1.0 - 1e-12);
            } else {
                bound_ok &= s.abs() < 1e-12;
            }
            let sec = secular_oracle(bc, h, 50);
            secular_worst = secular_worst.max(got.iter().zip(&sec).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max));
        }
    }
    Outcome {
        pass: failing.is_empty() && bound_ok,
        detail: format!(
            "separable-formula mismatches: [{}]; smallest-eigenvalue bound {}; max deviation from secular-equation spectrum {secular_worst:.1e}",
            failing.join(", "),
            if bound_ok { "holds" } else { "violated" }
        ),
    }
}

fn criterion_projection() -> Outcome {
    let mut idem = 0.0f64;
    let mut grad = 0.0f64;
    let mut div = 0.0f64;
    let mut orth = 0.0f64;
    for bc in BcVariant::ALL {
        let d = cube(16, bc);
        let pr = Projector::new(&d);
        let v = smooth_field(&d, 3, 0.75);
        let u = smooth_field(&d, 4, 0.75);
        let pv = pr.project(&v).unwrap();
        idem = idem.max(pr.project(&pv).unwrap().max_diff(&pv) / v.max_abs_coeff());
        // a horizontal gradient that is constant in z lies in the range of I - P only with Neumann
        // ends; the annihilated direction is grad phi times the projected unit profile
        let b = d.basis();
        let e: Vec<f64> = (0..d.nmodes()).map(|m| d.h() * b.mean(m) / b.norm(m)).collect();
        let mut g = VelocityField::zeros(&d);
        for (kx, ky, a) in [(1i64, 2i64, 0.3), (-3, 1, -0.7), (0, 4, 0.2)] {
            for (sx, sy, conj) in [(1, 1, false), (-1, -1, true)] {
                let p = d.index_of(sx * kx, sy * ky);
                let phi = if conj { Complex64::new(a, -0.1) } else { Complex64::new(a, 0.1) };
                for (m, &em) in e.iter().enumerate() {
                    let ix = g.idx(0, m, p);
                    let iy = g.idx(1, m, p);
                    g.coeffs_mut()[ix] += Complex64::new(0.0, 2.0 * PI * (sx * kx) as f64) * phi * em;
                    g.coeffs_mut()[iy] += Complex64::new(0.0, 2.0 * PI * (sy * ky) as f64) * phi * em;
                }
            }
        }
        grad = grad.max(pr.project(&g).unwrap().max_abs_coeff() / g.max_abs_coeff());
        let md = mean_divergence(&pv).unwrap();
        div = div.max(md.coeffs().iter().fold(0.0f64, |a, c| a.max(c.norm())) / v.max_abs_coeff());
        let pu = pr.project(&u).unwrap();
        let r = VelocityField::lincomb(1.0, &v, -1.0, &pv);
        // test-side L^2 product from the basis norms
        let mut dot = 0.0;
        for c in 0..2 {
            for m in 0..d.nmodes() {
                for p in 0..d.plane() {
                    let (x, y) = (r.coeffs()[r.idx(c, m, p)], pu.coeffs()[pu.idx(c, m, p)]);
                    dot += b.norm(m) * (x * y.conj()).re;
                }
            }
        }
        orth = orth.max(dot.abs() / (r.norm_l2() * pu.norm_l2()));
    }
    Outcome {
        pass: idem <= 1e-12 && grad <= 1e-12 && div <= 1e-14 && orth <= 1e-10,
        detail: format!("idempotence {idem:.1e}, gradient annihilation {grad:.1e}, div_H vbar {div:.1e}, orthogonality {orth:.1e}"),
    }
}

fn criterion_semigroup() -> Outcome {
    let mut worst_rate = 0.0f64;
    let mut worst_comp = 0.0f64;
    for bc in BcVariant::ALL {
        for h in [0.5, 1.0] {
            let d = Domain::new(DomainSpec::new(16, 16, 16, h, bc)).unwrap();
            let op = StokesOperator::new(&d);
            let mut v = project(&smooth_field(&d, 21, 0.5)).unwrap();
            if bc == BcVariant::Empty {
                // kernel: uniform translation (k = 0, m = 0)
                for c in 0..2 {
                    let i = v.idx(c, 0, 0);
                    v.coeffs_mut()[i] = Complex64::default();
                }
            }
            // smallest applicable eigenvalue: lowest k = 0 vertical mode or the first horizontal shell
            let lam = match bc {
                BcVariant::Empty => (PI / h).powi(2).min(4.0 * PI * PI),
                BcVariant::Both => (PI / h).powi(2),
                _ => (PI / (2.0 * h)).powi(2),
            };
            let (t1, t2) = (1.0, 2.0);
            let a = op.apply_semigroup(&v, t1).unwrap().norm_l2();
            let b = op.apply_semigroup(&v, t2).unwrap().norm_l2();
            worst_rate = worst_rate.max(rel((a / b).ln() / (t2 - t1), lam));
            let ts = op.apply_semigroup(&op.apply_semigroup(&v, 0.02).unwrap(), 0.05).unwrap();
            let t = op.apply_semigroup(&v, 0.07).unwrap();
            worst_comp = worst_comp.max(ts.max_diff(&t) / v.max_abs_coeff());
        }
    }
    Outcome {
        pass: worst_rate <= 0.02 && worst_comp <= 1e-12,
        detail: format!("decay-rate deviation {worst_rate:.1e}, composition {worst_comp:.1e}"),
    }
}

/// `||v||^2` from the coefficients, with the vertical norms written out per basis.
fn energy_of(v: &VelocityField, bc: BcVariant, h: f64) -> f64 {
    let d = v.domain();
    let mut s = 0.0;
    for c in 0..2 {
        for m in 0..d.nmodes() {
            let n = if bc == BcVariant::Empty && m == 0 { h } else { 0.5 * h };
            for p in 0..d.plane() {
                s += n * v.coeffs()[v.idx(c, m, p)].norm_sqr();
            }
        }
    }
    s
}

fn closure(rec: &TrajectoryRecord) -> f64 {
    let e0 = energy_of(&rec.snapshots[0].v, BcVariant::Empty, 1.0);
    let diss = rec.column("dissipation").unwrap();
    rec.snapshots.iter().zip(&diss).map(|(s, d)| (energy_of(&s.v, BcVariant::Empty, 1.0) + d - e0).abs()).fold(0.0, f64::max)
}

fn run(d: &Domain, v0: &VelocityField, dt: f64, t_end: f64, every: f64) -> TrajectoryRecord {
    let mut o = RunOptions::new(dt, t_end);
    o.snapshot_stride = ((every / dt).round() as usize).max(1);
    run_with_initial(d, v0.clone(), Arc::new(ZeroForcing), &o).unwrap()
}

fn smooth_data(d: &Domain, seed: u64, amp: f64) -> VelocityField {
    initial_condition(d, &RunConfig { initial: "smooth".into(), seed, amplitude: amp, ..RunConfig::default() }).unwrap()
}

fn criterion_energy() -> Outcome {
    let d = cube(16, BcVariant::Empty);
    let v0 = smooth_data(&d, 7, 0.5);
    let e0 = energy_of(&v0, BcVariant::Empty, 1.0);
    let r1 = closure(&run(&d, &v0, 1e-3, 0.5, 0.05));
    let r2 = closure(&run(&d, &v0, 5e-4, 0.5, 0.05));
    let ratio = r1 / r2;
    Outcome {
        pass: (3.0..=5.0).contains(&ratio) && r1 < 1e-6 * e0,
        detail: format!("residual {r1:.2e} at dt=1e-3 ({:.2e} of ||v0||^2), ratio under halving {ratio:.2}", r1 / e0),
    }
}

/// Barotropic advection on the 2D torus by direct convolution, followed by the 2D Leray projection.
fn torus_reference(d: &Domain, u: &[Vec<Complex64>; 2]) -> [Vec<Complex64>; 2] {
    let (kmx, kmy) = d.dealias_limits();
    let (kmx, kmy) = (kmx as i64, kmy as i64);
    let mut out = [vec![Complex64::default(); d.plane()], vec![Complex64::default(); d.plane()]];
    for ax in -kmx..=kmx {
        for ay in -kmy..=kmy {
            let pa = d.index_of(ax, ay);
            for bx in -kmx..=kmx {
                for by in -kmy..=kmy {
                    let (kx, ky) = (ax + bx, ay + by);
                    if kx.abs() > kmx || ky.abs() > kmy {
                        continue;
                    }
                    let pb = d.index_of(bx, by);
                    let s = (u[0][pa] * bx as f64 + u[1][pa] * by as f64) * Complex64::new(0.0, 2.0 * PI);
                    let pk = d.index_of(kx, ky);
                    out[0][pk] += s * u[0][pb];
                    out[1][pk] += s * u[1][pb];
                }
            }
        }
    }
    for p in 0..d.plane() {
        let (kx, ky) = d.k_of(p);
        if kx != 0 || ky != 0 {
            let l = (out[0][p] * kx as f64 + out[1][p] * ky as f64) / (kx * kx + ky * ky) as f64;
            out[0][p] -= l * kx as f64;
            out[1][p] -= l * ky as f64;
        }
    }
    out
}

fn criterion_nonlinearity() -> Outcome {
    let mut neutral = 0.0f64;
    let mut bilin = 0.0f64;
    for bc in BcVariant::ALL {
        let d = cube(16, bc);
        let ev = NonlinearEvaluator::new(&d);
        let v = project(&smooth_field(&d, 31, 0.75)).unwrap();
        let u = project(&smooth_field(&d, 32, 0.75)).unwrap();
        let f = ev.advect(&v, &v).unwrap();
        // |<F(v), v>| relative to ||F|| ||v||
        neutral = neutral.max(f.dot(&v).abs() / (f.norm_l2() * v.norm_l2()));
        let lhs = ev.advect(&VelocityField::lincomb(2.0, &v, -0.5, &u), &u).unwrap();
        let rhs = VelocityField::lincomb(2.0, &ev.advect(&v, &u).unwrap(), -0.5, &ev.advect(&u, &u).unwrap());
        bilin = bilin.max(lhs.max_diff(&rhs) / rhs.max_abs_coeff());
    }
    let d = cube(16, BcVariant::Empty);
    let mut v = project(&smooth_field(&d, 33, 0.5)).unwrap();
    for c in 0..2 {
        for m in 1..d.nmodes() {
            for p in 0..d.plane() {
                let i = v.idx(c, m, p);
                v.coeffs_mut()[i] = Complex64::default();
            }
        }
    }
    let bar = vertical_average(&v).unwrap();
    let r = torus_reference(&d, &[bar[0].coeffs().to_vec(), bar[1].coeffs().to_vec()]);
    let f = NonlinearEvaluator::new(&d).advect(&v, &v).unwrap();
    let scale = r.iter().flatten().fold(0.0f64, |a, c| a.max(c.norm()));
    let mut err = 0.0f64;
    for c in 0..2 {
        for m in 0..d.nmodes() {
            for p in 0..d.plane() {
                let want = if m == 0 { r[c][p] } else { Complex64::default() };
                err = err.max((f.coeffs()[f.idx(c, m, p)] - want).norm() / scale);
            }
        }
    }
    Outcome {
        pass: neutral <= 1e-8 && bilin <= 1e-12 && err <= 1e-10,
        detail: format!("neutrality {neutral:.1e}, bilinearity {bilin:.1e}, 2D torus reference {err:.1e}"),
    }
}

fn criterion_probe() -> Outcome {
    let a = bilinear_estimate_probe(&cube(8, BcVariant::Empty), 100, 0.0, 1000, 2.0).unwrap();
    let b = bilinear_estimate_probe(&cube(16, BcVariant::Empty), 100, 0.0, 1000, 2.0).unwrap();
    let spread = a.max.max(b.max) / a.max.min(b.max);
    Outcome { pass: spread < 3.0, detail: format!("max ratio {:.3e} at 8^3, {:.3e} at 16^3, spread {spread:.2}", a.max, b.max) }
}

fn criterion_apriori() -> Outcome {
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut notes = Vec::new();
    for bc in BcVariant::ALL {
        let d = cube(16, bc);
        let v0 = smooth_data(&d, 41, 5.0);
        let h1 = v0.sobolev_sq(1.0).sqrt();
        let mut o = RunOptions::new(2e-3, 1.0);
        o.snapshot_stride = 25;
        match run_with_initial(&d, v0, Arc::new(ZeroForcing), &o) {
            Ok(rec) => {
                let l = apriori_ledger(&rec).unwrap();
                let m = l.running_max.iter().copied().fold(0.0, f64::max);
                ok &= l.all_finite() && m < 1e6 && h1 <= 5.0 + 1e-9;
                worst = worst.max(m);
                notes.push(format!("{bc}:{m:.1}"));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{bc}: {e}"));
            }
        }
    }
    Outcome { pass: ok, detail: format!("largest running maxima [{}], overall {worst:.1}", notes.join(", ")) }
}

fn criterion_smoothing() -> Outcome {
    let mut rows = Vec::new();
    for n in [16, 32] {
        let d = cube(n, BcVariant::Empty);
        let rd = generate_rough_data(&d, 4.0, 4.0, 0.25, 51, 1.0).unwrap();
        let mut o = RunOptions::new(1e-4, 0.1);
        o.snapshot_stride = 100;
        o.geometric_levels = 6;
        let rec = run_with_initial(&d, rd.field.clone(), Arc::new(ZeroForcing), &o).unwrap();
        let s = smoothing_tracker(&rec, 0.5, 4.0, 4.0, 0.005).unwrap();
        let t = time_derivative_record(&rec).unwrap();
        rows.push((rd.besov, s.sup_weighted_av, s.av_initial, t.sup_t_vt));
    }
    let besov = rows[1].0 / rows[0].0;
    let sup = rows[1].1 / rows[0].1;
    let growth = rows[1].2 / rows[0].2;
    let tvt = rows[1].3;
    Outcome {
        pass: (0.95..=1.05).contains(&besov) && (0.8..=1.2).contains(&sup) && growth >= 2.0 && tvt.is_finite() && tvt < 1e6,
        detail: format!("Besov ratio {besov:.3}, sup t^(1/2)||Av|| ratio {sup:.3}, ||Av(0)|| growth {growth:.2}, sup t||v_t|| {tvt:.2e}"),
    }
}

fn criterion_analyticity() -> Outcome {
    let d = cube(32, BcVariant::Empty);
    let b = d.basis();
    let s0 = 0.04;
    let mut syn = VelocityField::zeros(&d);
    for m in 0..d.nmodes() {
        for p in 0..d.plane() {
            if d.in_mask(p) {
                let (kx, ky) = d.k_of(p);
                let xi = 2.0 * PI * ((kx * kx + ky * ky) as f64).sqrt() + m as f64 * PI;
                let i = syn.idx(1, m, p);
                syn.coeffs_mut()[i] = Complex64::from_polar((-s0 * xi).exp(), 0.3 * (kx - 2 * ky) as f64);
            }
        }
    }
    let syn_err = rel(fit_radius(&syn, 0.0).sigma, s0);
    // exact heat evolution: with Neumann ends P commutes with Delta, so each coefficient decays by exp(-lambda t)
    let v0 = generate_rough_data(&d, 4.0, 4.0, 0.25, 52, 1.0).unwrap().field;
    let times = [0.005, 0.01, 0.02, 0.04, 0.08];
    let mut pts = Vec::new();
    for &t in &times {
        let mut v = v0.clone();
        for c in 0..2 {
            for m in 0..d.nmodes() {
                for p in 0..d.plane() {
                    let l = d.k2(p) + b.kappa(m).powi(2);
                    let i = v.idx(c, m, p);
                    v.coeffs_mut()[i] *= (-l * t).exp();
                }
            }
        }
        pts.push((t.ln(), fit_radius(&v, t).sigma.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let dn = cube(16, BcVariant::Empty);
    let r0 = generate_rough_data(&dn, 4.0, 4.0, 0.25, 53, 5.0).unwrap().field;
    let rec = run(&dn, &r0, 1e-4, 0.2, 0.01);
    let late: Vec<f64> = analyticity_radius(&rec).iter().filter(|f| f.time >= 0.05).map(|f| if f.flagged { f64::NAN } else { f.sigma }).collect();
    let min = late.iter().copied().fold(f64::INFINITY, |a, s| if s.is_nan() || a.is_nan() { f64::NAN } else { a.min(s) });
    Outcome {
        pass: syn_err <= 0.02 && (0.4..=0.6).contains(&slope) && min > 0.0,
        detail: format!("synthetic radius error {syn_err:.1e}, linear-flow exponent {slope:.3}, nonlinear min sigma(t>=0.05) {min:.3}"),
    }
}

fn criterion_split() -> Outcome {
    let d = cube(16, BcVariant::Empty);
    let v0 = smooth_data(&d, 61, 3.0);
    let mut m = Vec::new();
    for dt in [1e-3, 5e-4] {
        let r = split_residual(&run(&d, &v0, dt, 0.1, 0.02)).unwrap();
        let inner: Vec<_> = r.iter().filter(|x| x.time > 0.0).collect();
        m.push((inner.iter().map(|x| x.bar).fold(0.0, f64::max), inner.iter().map(|x| x.tilde).fold(0.0, f64::max)));
    }
    let (rb, rt) = (m[0].0 / m[1].0, m[0].1 / m[1].1);
    let tg = run(&d, &taylor_green(&d, 2.0), 1e-3, 0.05, 0.01);
    let baro = split_residual(&tg).unwrap().iter().zip(&tg.snapshots).map(|(r, s)| r.tilde / s.vt_fd.norm_l2()).fold(0.0, f64::max);
    Outcome {
        pass: (3.0..=5.0).contains(&rb) && (3.0..=5.0).contains(&rt) && baro <= 1e-12,
        detail: format!("mean-equation ratio {rb:.2}, fluctuation-equation ratio {rt:.2}, barotropic fluctuation residual {baro:.1e}"),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, f64); 10] = [
        ("spectrum oracle", criterion_spectrum, 5.0),
        ("projection", criterion_projection, 5.0),
        ("semigroup stability", criterion_semigroup, 10.0),
        ("energy equality", criterion_energy, 60.0),
        ("nonlinearity", criterion_nonlinearity, 30.0),
        ("bilinear estimate probe", criterion_probe, 60.0),
        ("a priori ledger", criterion_apriori, 300.0),
        ("smoothing from critical data", criterion_smoothing, 600.0),
        ("analyticity proxy", criterion_analyticity, 120.0),
        ("split-system residual", criterion_split, 120.0),
    ];
    let mut passed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let ok = o.pass && secs <= *budget;
        passed += ok as usize;
        println!(
            "{} criterion {}: {name}: {} ({secs:.1}s of {budget:.0}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("{passed}/{} criteria passed", criteria.len());
}
