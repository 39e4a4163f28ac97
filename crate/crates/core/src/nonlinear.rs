//! Hydrostatic advection `F(v, v') = P(v . grad_H v' + w(v) d_z v')`.
//!
//! Products are formed pointwise on the horizontal grid (inputs truncated by the 2/3 rule) at
//! Gauss-Legendre levels in z, then projected back onto the vertical basis. The level count is
//! large enough that the Galerkin projection of cubic trigonometric products is exact.
//!
//! The Coriolis term `f0 k x v` would enter here as an extra zero-order product; it is not modeled.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Levels};
use crate::error::{Error, Result};
use crate::field::{d_h, d_z, w_coeffs, BasisTag, VelocityField};
use crate::hydrostatic::Projector;
use crate::random::smooth_field;

/// Values of a field and its derivatives at the product quadrature nodes, layout `(comp, q, iy, ix)`.
#[derive(Clone, Debug)]
pub struct Nodal {
    pub v: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub dz: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct NonlinearEvaluator {
    domain: Domain,
    projector: Projector,
}

fn masked(v: &VelocityField) -> VelocityField {
    if v.is_dealiased() {
        v.clone()
    } else {
        let mut m = v.clone();
        m.dealias();
        m
    }
}

impl NonlinearEvaluator {
    pub fn new(domain: &Domain) -> Self {
        NonlinearEvaluator { domain: domain.clone(), projector: Projector::new(domain) }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    fn check(&self, v: &VelocityField) -> Result<()> {
        v.require_primal()?;
        if v.domain() != &self.domain {
            return Err(Error::DimensionMismatch("evaluator and field domains differ".into()));
        }
        Ok(())
    }

    /// Field values at the quadrature nodes.
    pub fn values(&self, v: &VelocityField) -> Result<Vec<f64>> {
        self.check(v)?;
        let lv = match v.basis() {
            BasisTag::Primal => Levels::Quad,
            BasisTag::Dual => Levels::QuadDual,
        };
        self.domain.synthesize(v.coeffs(), lv)
    }

    /// Values and first derivatives at the quadrature nodes (input truncated to the mask).
    pub fn nodal(&self, v: &VelocityField) -> Result<Nodal> {
        self.check(v)?;
        let v = masked(v);
        let d = &self.domain;
        Ok(Nodal {
            v: d.synthesize(v.coeffs(), Levels::Quad)?,
            dx: d.synthesize(d_h(&v, 0)?.coeffs(), Levels::Quad)?,
            dy: d.synthesize(d_h(&v, 1)?.coeffs(), Levels::Quad)?,
            dz: d.synthesize(d_z(&v)?.coeffs(), Levels::QuadDual)?,
        })
    }

    /// `w(v)` at the quadrature nodes.
    pub fn w_nodal(&self, v: &VelocityField) -> Result<Vec<f64>> {
        self.check(v)?;
        let v = masked(v);
        self.domain.synthesize(&w_coeffs(&v), Levels::QuadAnti)
    }

    /// Galerkin projection of two-component nodal values, truncated to the mask.
    pub fn galerkin(&self, values: &[f64]) -> Result<VelocityField> {
        let mut out = VelocityField::from_coeffs(&self.domain, self.domain.project_quad(values)?)?;
        out.dealias();
        Ok(out)
    }

    /// `v . grad_H v' + w(v) d_z v'` at the nodes.
    pub fn convective_nodal(&self, v: &VelocityField, vp: &VelocityField) -> Result<Vec<f64>> {
        let a = self.values(&masked(v))?;
        let w = self.w_nodal(v)?;
        let b = self.nodal(vp)?;
        let n = w.len();
        let mut out = vec![0.0; 2 * n];
        for c in 0..2 {
            for i in 0..n {
                let j = c * n + i;
                out[j] = a[i] * b.dx[j] + a[n + i] * b.dy[j] + w[i] * b.dz[j];
            }
        }
        Ok(out)
    }

    /// Galerkin projection of the convective term, before the hydrostatic projection.
    pub fn advect_raw(&self, v: &VelocityField, vp: &VelocityField) -> Result<VelocityField> {
        self.galerkin(&self.convective_nodal(v, vp)?)
    }

    /// `F(v, v')`.
    pub fn advect(&self, v: &VelocityField, vp: &VelocityField) -> Result<VelocityField> {
        let mut r = self.advect_raw(v, vp)?;
        self.projector.project_in_place(&mut r);
        Ok(r)
    }

    /// `P div(u (x) v')` with `u = (v, w(v))`, built from projected fluxes instead of derivatives of `v'`.
    ///
    /// Agrees with [`NonlinearEvaluator::advect`] when `div_H vbar = 0`, so that `w` vanishes at both ends.
    pub fn advect_divergence_form(&self, v: &VelocityField, vp: &VelocityField) -> Result<VelocityField> {
        let d = &self.domain;
        let a = self.values(&masked(v))?;
        let w = self.w_nodal(v)?;
        let b = self.values(&masked(vp))?;
        let n = w.len();
        let mut fx = vec![0.0; 2 * n];
        let mut fy = vec![0.0; 2 * n];
        let mut fz = vec![0.0; 2 * n];
        for c in 0..2 {
            for i in 0..n {
                let j = c * n + i;
                fx[j] = a[i] * b[j];
                fy[j] = a[n + i] * b[j];
                fz[j] = w[i] * b[j];
            }
        }
        let cx = VelocityField::from_coeffs(d, d.project_quad(&fx)?)?;
        let cy = VelocityField::from_coeffs(d, d.project_quad(&fy)?)?;
        // <d_z g, phi_m> = -<g, d_z phi_m> since g = w v' vanishes at both ends
        let mut cz = d.project_quad_dual(&fz)?;
        let (nm, plane) = (d.nmodes(), d.plane());
        for c in 0..2 {
            for m in 0..nm {
                let f = -d.basis().derivative_factor(m);
                for p in 0..plane {
                    cz[(c * nm + m) * plane + p] *= f;
                }
            }
        }
        let mut out = d_h(&cx, 0)?;
        out.axpy(1.0, &d_h(&cy, 1)?);
        out.axpy(1.0, &VelocityField::from_coeffs(d, cz)?);
        out.dealias();
        self.projector.project_in_place(&mut out);
        Ok(out)
    }
}

/// Result of [`bilinear_estimate_probe`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeStats {
    pub resolution: usize,
    pub s: f64,
    /// `(seed, ratio)` per sampled pair
    pub samples: Vec<(u64, f64)>,
    pub max: f64,
    pub median: f64,
}

/// Ratio `||F(v,v')||_{H^s} / (||v||_{H^{s+3/2}} ||v'||_{H^{s+3/2}})`.
pub fn bilinear_ratio(ev: &NonlinearEvaluator, v: &VelocityField, vp: &VelocityField, s: f64) -> Result<f64> {
    let den = (v.sobolev_sq(s + 1.5) * vp.sobolev_sq(s + 1.5)).sqrt();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(ev.advect(v, vp)?.sobolev_sq(s).sqrt() / den)
}

/// Empirical size of the bilinear estimate over `samples` seeded solenoidal pairs.
///
/// Pair `i` uses seeds `seed + 2i` and `seed + 2i + 1`; coefficients decay like `(1+lambda)^(-gamma)`.
pub fn bilinear_estimate_probe(domain: &Domain, samples: usize, s: f64, seed: u64, gamma: f64) -> Result<ProbeStats> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let ev = NonlinearEvaluator::new(domain);
    let pr = Projector::new(domain);
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        let a = seed.wrapping_add(2 * i);
        let v = pr.project(&smooth_field(domain, a, gamma))?;
        let vp = pr.project(&smooth_field(domain, a.wrapping_add(1), gamma))?;
        out.push((a, bilinear_ratio(&ev, &v, &vp, s)?));
    }
    let mut r: Vec<f64> = out.iter().map(|x| x.1).collect();
    r.sort_by(f64::total_cmp);
    let median = if r.len() % 2 == 1 { r[r.len() / 2] } else { 0.5 * (r[r.len() / 2 - 1] + r[r.len() / 2]) };
    Ok(ProbeStats { resolution: domain.nx(), s, max: *r.last().unwrap_or(&0.0), median, samples: out })
}

/// `<F(v, v), v>` relative to `||v||_{H^1} ||v||_{L^4}^2`.
pub fn energy_neutrality(ev: &NonlinearEvaluator, v: &VelocityField) -> Result<f64> {
    let f = ev.advect(v, v)?;
    let l4 = crate::analysis::lp_norm(v, 4.0)?;
    let scale = v.sobolev_sq(1.0).sqrt() * l4 * l4;
    Ok(if scale == 0.0 { 0.0 } else { f.dot(v).abs() / scale })
}
