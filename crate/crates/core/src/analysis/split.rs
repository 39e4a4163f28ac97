//! Residuals of the barotropic / baroclinic splitting `v = vbar + vtilde`.
//!
//! The vertical mean obeys a 2D Navier-Stokes system driven by the mean of the fluctuation
//! fluxes; the fluctuation carries the remaining 3D dynamics. Each residual is formed from
//! `vbar`, `vtilde` and the recovered pressure directly, not from the full equation. With
//! Neumann ends both are consistent with the discrete scheme to roundoff; with a Dirichlet end
//! the constant is not in the vertical basis and a truncation error remains.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::{d_z, fluctuation, grad_h, laplacian, laplacian_h, vertical_average, SurfaceField, VelocityField};
use crate::nonlinear::NonlinearEvaluator;
use crate::stepper::{Snapshot, TrajectoryRecord};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SplitResidual {
    pub time: f64,
    /// `L^2(G)` norm of the mean-equation residual
    pub bar: f64,
    /// `L^2(Omega)` norm of the fluctuation-equation residual
    pub tilde: f64,
}

fn surface_l2(s: &[SurfaceField; 2]) -> f64 {
    (s[0].norm_l2().powi(2) + s[1].norm_l2().powi(2)).sqrt()
}

fn masked_forward(d: &Domain, values: &[f64]) -> Vec<Complex64> {
    let mut c = d.planes_forward(values);
    for (p, x) in c.iter_mut().enumerate() {
        if !d.in_mask(p) {
            *x = Complex64::default();
        }
    }
    c
}

/// `vbar . grad_H vbar`, dealiased.
fn mean_advection(d: &Domain, bar: &[SurfaceField; 2]) -> Result<[SurfaceField; 2]> {
    let u = [bar[0].to_grid(), bar[1].to_grid()];
    let mut out = Vec::with_capacity(2);
    for b in bar {
        let g = grad_h(b);
        let (gx, gy) = (g[0].to_grid(), g[1].to_grid());
        let prod: Vec<f64> = (0..d.plane()).map(|i| u[0][i] * gx[i] + u[1][i] * gy[i]).collect();
        out.push(SurfaceField::from_coeffs(d, masked_forward(d, &prod))?);
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// `(1/h) int (vtilde . grad_H vtilde + div_H vtilde vtilde) dz`, by Gauss-Legendre in z.
fn fluctuation_flux(ev: &NonlinearEvaluator, vt: &VelocityField) -> Result<[SurfaceField; 2]> {
    let d = ev.domain();
    let nd = ev.nodal(vt)?;
    let (plane, nq) = (d.plane(), d.nquad());
    let n = plane * nq;
    let w = d.quad_weights();
    let mut acc = [vec![0.0; plane], vec![0.0; plane]];
    for q in 0..nq {
        for i in 0..plane {
            let j = q * plane + i;
            let (u, v) = (nd.v[j], nd.v[n + j]);
            let div = nd.dx[j] + nd.dy[n + j];
            for (c, a) in acc.iter_mut().enumerate() {
                let k = c * n + j;
                a[i] += w[q] * (u * nd.dx[k] + v * nd.dy[k] + div * nd.v[k]);
            }
        }
    }
    let h = d.h();
    let mk = |a: &Vec<f64>| {
        let g: Vec<f64> = a.iter().map(|x| x / h).collect();
        SurfaceField::from_coeffs(d, masked_forward(d, &g))
    };
    Ok([mk(&acc[0])?, mk(&acc[1])?])
}

/// `(1/h) [d_z v]` between the bottom and the top, zero for Neumann ends.
fn boundary_flux(v: &VelocityField) -> Result<[SurfaceField; 2]> {
    let d = v.domain();
    let vz = d_z(v)?;
    let b = d.basis();
    let (h, plane) = (d.h(), d.plane());
    let jump: Vec<f64> = (0..b.len()).map(|m| (b.dual_value(m, 0.0) - b.dual_value(m, -h)) / h).collect();
    let mut out = [SurfaceField::zeros(d), SurfaceField::zeros(d)];
    for (comp, o) in out.iter_mut().enumerate() {
        for (m, &j) in jump.iter().enumerate() {
            if j == 0.0 {
                continue;
            }
            let c = o.coeffs_mut();
            for (p, x) in c.iter_mut().enumerate().take(plane) {
                *x += vz.coeffs()[vz.idx(comp, m, p)] * j;
            }
        }
    }
    Ok(out)
}

/// Residuals at one snapshot using the supplied time derivative.
pub fn split_residual_at(ev: &NonlinearEvaluator, snap: &Snapshot, vt: &VelocityField) -> Result<SplitResidual> {
    let v = &snap.v;
    let d = v.domain();
    if ev.domain() != d {
        return Err(Error::DimensionMismatch("evaluator and snapshot domains differ".into()));
    }
    let vtil = fluctuation(v)?;
    let vbar_field = VelocityField::lincomb(1.0, v, -1.0, &vtil);
    let bar = vertical_average(v)?;

    // mean equation
    let bar_t = vertical_average(vt)?;
    let f_bar = vertical_average(&snap.forcing)?;
    let adv = mean_advection(d, &bar)?;
    let flux = fluctuation_flux(ev, &vtil)?;
    let jump = boundary_flux(v)?;
    let gp = grad_h(&snap.pressure);
    let mut rbar = [SurfaceField::zeros(d), SurfaceField::zeros(d)];
    for c in 0..2 {
        let lap = laplacian_h(&bar[c]);
        let r = rbar[c].coeffs_mut();
        for p in 0..d.plane() {
            r[p] = bar_t[c].coeffs()[p] - lap.coeffs()[p] + gp[c].coeffs()[p] + adv[c].coeffs()[p] + flux[c].coeffs()[p]
                - f_bar[c].coeffs()[p]
                - jump[c].coeffs()[p];
        }
    }

    // fluctuation equation
    let mut r = vt.clone();
    r.axpy(-1.0, &laplacian(&vtil)?);
    r.axpy(1.0, &ev.advect_raw(&vtil, &vtil)?);
    r.axpy(1.0, &ev.advect_raw(&vbar_field, &vtil)?);
    r.axpy(1.0, &ev.advect_raw(&vtil, &vbar_field)?);
    r.axpy(-1.0, &snap.forcing);
    let rt = fluctuation(&r)?;
    Ok(SplitResidual { time: snap.time, bar: surface_l2(&rbar), tilde: rt.norm_l2() })
}

/// Residuals at every snapshot, with `v_t` taken from finite differences of the trajectory.
pub fn split_residual(record: &TrajectoryRecord) -> Result<Vec<SplitResidual>> {
    let ev = NonlinearEvaluator::new(&record.domain);
    record.snapshots.par_iter().map(|s| split_residual_at(&ev, s, &s.vt_fd)).collect()
}
