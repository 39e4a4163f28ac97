//! Velocity, surface and scalar fields with the basic calculus on the cylinder.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{Domain, Levels};
use crate::error::{Error, Result};

/// Which vertical family the coefficients of a [`VelocityField`] refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisTag {
    Primal,
    /// `d/dz` of the primal family (e.g. the output of [`d_z`]).
    Dual,
}

/// Horizontal velocity `(v1, v2)`, stored as spectral coefficients.
#[derive(Clone, Debug)]
pub struct VelocityField {
    domain: Domain,
    basis: BasisTag,
    coeffs: Vec<Complex64>,
}

fn finite(c: &[Complex64]) -> bool {
    c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl VelocityField {
    pub fn zeros(domain: &Domain) -> Self {
        VelocityField { domain: domain.clone(), basis: BasisTag::Primal, coeffs: vec![Complex64::default(); domain.spectral_len()] }
    }

    pub fn from_coeffs(domain: &Domain, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_basis(domain, BasisTag::Primal, coeffs)
    }

    pub fn with_basis(domain: &Domain, basis: BasisTag, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != domain.spectral_len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                domain.spectral_len(),
                coeffs.len()
            )));
        }
        if !finite(&coeffs) {
            return Err(Error::InvalidArgument("non-finite coefficients".into()));
        }
        Ok(VelocityField { domain: domain.clone(), basis, coeffs })
    }

    /// Grid values, component blocks `v1` then `v2`, each z-slowest.
    pub fn from_grid(domain: &Domain, values: &[f64]) -> Result<Self> {
        if values.len() != domain.grid_len() {
            return Err(Error::DimensionMismatch(format!("expected {} grid values, got {}", domain.grid_len(), values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite grid values".into()));
        }
        Self::from_coeffs(domain, domain.to_spectral(values)?)
    }

    /// Real-valued eigenfunction `amp * cos(2 pi k.x) phi_m(z) e_comp`.
    pub fn mode(domain: &Domain, comp: usize, kx: i64, ky: i64, m: usize, amp: f64) -> Self {
        let mut v = Self::zeros(domain);
        let p = domain.index_of(kx, ky);
        let q = domain.index_of(-kx, -ky);
        if p == q {
            let i = v.idx(comp, m, p);
            v.coeffs[i] += amp;
        } else {
            let (a, b) = (v.idx(comp, m, p), v.idx(comp, m, q));
            v.coeffs[a] += 0.5 * amp;
            v.coeffs[b] += 0.5 * amp;
        }
        v
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn idx(&self, comp: usize, m: usize, p: usize) -> usize {
        (comp * self.domain.nmodes() + m) * self.domain.plane() + p
    }

    /// Values on the collocation grid.
    pub fn to_grid(&self) -> Vec<f64> {
        let levels = match self.basis {
            BasisTag::Primal => Levels::Grid,
            BasisTag::Dual => Levels::GridDual,
        };
        self.domain.synthesize(&self.coeffs, levels).expect("field length is checked on construction")
    }

    pub fn conforms(&self, other: &VelocityField) -> Result<()> {
        if self.domain != other.domain {
            return Err(Error::DimensionMismatch("fields live on different domains".into()));
        }
        if self.basis != other.basis {
            return Err(Error::BasisMismatch("primal and dual fields mixed".into()));
        }
        Ok(())
    }

    pub fn require_primal(&self) -> Result<()> {
        if self.basis != BasisTag::Primal {
            return Err(Error::BasisMismatch("operation needs a primal-basis field".into()));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        finite(&self.coeffs)
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut v = self.clone();
        v.scale(a);
        v
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &VelocityField) {
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += d * a;
        }
    }

    pub fn lincomb(a: f64, x: &VelocityField, b: f64, y: &VelocityField) -> Self {
        let mut v = x.scaled(a);
        v.axpy(b, y);
        v
    }

    fn weights(&self, m: usize) -> f64 {
        match self.basis {
            BasisTag::Primal => self.domain.basis().norm(m),
            BasisTag::Dual => self.domain.basis().dual_norm(m),
        }
    }

    /// Weighted coefficient sum `sum_{comp,m,k} g(m,k) n_m Re(a conj b)`.
    pub fn weighted_dot(&self, other: &VelocityField, g: impl Fn(usize, usize) -> f64) -> f64 {
        let (nm, plane) = (self.domain.nmodes(), self.domain.plane());
        let mut s = 0.0;
        for comp in 0..2 {
            for m in 0..nm {
                let w = self.weights(m);
                let off = (comp * nm + m) * plane;
                for p in 0..plane {
                    let (a, b) = (self.coeffs[off + p], other.coeffs[off + p]);
                    s += g(m, p) * w * (a.re * b.re + a.im * b.im);
                }
            }
        }
        s
    }

    /// `L^2(Omega)` inner product.
    pub fn dot(&self, other: &VelocityField) -> f64 {
        self.weighted_dot(other, |_, _| 1.0)
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    /// `||grad v||_{L^2}` for a primal field.
    pub fn norm_grad(&self) -> f64 {
        let d = self.domain.clone();
        self.weighted_dot(self, |m, p| d.lambda(p, m)).max(0.0).sqrt()
    }

    /// `sum (1 + lambda)^s n |c|^2`, the squared `H^s` norm.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        let d = self.domain.clone();
        self.weighted_dot(self, |m, p| (1.0 + d.lambda(p, m)).powf(s))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }

    /// Zero every horizontal mode outside the 2/3-rule mask.
    pub fn dealias(&mut self) {
        let plane = self.domain.plane();
        let mask: Vec<bool> = (0..plane).map(|p| self.domain.in_mask(p)).collect();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !mask[i % plane] {
                *c = Complex64::default();
            }
        }
    }

    pub fn is_dealiased(&self) -> bool {
        let plane = self.domain.plane();
        self.coeffs.iter().enumerate().all(|(i, c)| self.domain.in_mask(i % plane) || c.norm() == 0.0)
    }

    /// Largest coefficient difference.
    pub fn max_diff(&self, other: &VelocityField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }
}

/// Scalar on the horizontal torus `G`, stored spectrally.
#[derive(Clone, Debug)]
pub struct SurfaceField {
    domain: Domain,
    coeffs: Vec<Complex64>,
}

impl SurfaceField {
    pub fn zeros(domain: &Domain) -> Self {
        SurfaceField { domain: domain.clone(), coeffs: vec![Complex64::default(); domain.plane()] }
    }

    pub fn from_coeffs(domain: &Domain, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != domain.plane() {
            return Err(Error::DimensionMismatch(format!("expected {} coefficients, got {}", domain.plane(), coeffs.len())));
        }
        Ok(SurfaceField { domain: domain.clone(), coeffs })
    }

    pub fn from_grid(domain: &Domain, values: &[f64]) -> Result<Self> {
        if values.len() != domain.plane() {
            return Err(Error::DimensionMismatch(format!("expected {} values, got {}", domain.plane(), values.len())));
        }
        Self::from_coeffs(domain, domain.planes_forward(values))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn to_grid(&self) -> Vec<f64> {
        self.domain.planes_inverse(&self.coeffs)
    }

    /// `L^2(G)` norm.
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_diff(&self, other: &SurfaceField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }
}

/// Scalar on the 3D collocation grid (`nz` levels, z slowest).
#[derive(Clone, Debug)]
pub struct ScalarField3D {
    domain: Domain,
    values: Vec<f64>,
}

impl ScalarField3D {
    pub fn from_values(domain: &Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.nz() * domain.plane() {
            return Err(Error::DimensionMismatch(format!("expected {} values, got {}", domain.nz() * domain.plane(), values.len())));
        }
        Ok(ScalarField3D { domain: domain.clone(), values })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// `2 pi i k` for a flat horizontal index.
pub(crate) fn ik(domain: &Domain, p: usize) -> (Complex64, Complex64) {
    let (kx, ky) = domain.k_of(p);
    (Complex64::new(0.0, 2.0 * PI * kx as f64), Complex64::new(0.0, 2.0 * PI * ky as f64))
}

/// Vertical mean coefficients `sum_m a_m c_m` of one component.
pub(crate) fn mean_coeffs(v: &VelocityField, comp: usize) -> Vec<Complex64> {
    let d = v.domain();
    let plane = d.plane();
    let mut out = vec![Complex64::default(); plane];
    for m in 0..d.nmodes() {
        let a = d.basis().mean(m);
        if a == 0.0 {
            continue;
        }
        let off = v.idx(comp, m, 0);
        for p in 0..plane {
            out[p] += v.coeffs[off + p] * a;
        }
    }
    out
}

/// `vbar = (1/h) int v dz`.
pub fn vertical_average(v: &VelocityField) -> Result<[SurfaceField; 2]> {
    v.require_primal()?;
    let d = v.domain();
    Ok([
        SurfaceField { domain: d.clone(), coeffs: mean_coeffs(v, 0) },
        SurfaceField { domain: d.clone(), coeffs: mean_coeffs(v, 1) },
    ])
}

/// Coefficients of the projection of the constant function 1 onto the vertical basis.
pub(crate) fn unit_profile(domain: &Domain) -> Vec<f64> {
    let b = domain.basis();
    (0..b.len()).map(|m| domain.h() * b.mean(m) / b.norm(m)).collect()
}

/// `vtilde = v - vbar`, realized inside the discrete space.
///
/// With Neumann ends the constant is a basis function and this just drops `m = 0`. Otherwise
/// `vbar` is removed along the projected unit profile, rescaled so the mean vanishes exactly.
pub fn fluctuation(v: &VelocityField) -> Result<VelocityField> {
    v.require_primal()?;
    let d = v.domain().clone();
    let e = unit_profile(&d);
    let emean: f64 = e.iter().enumerate().map(|(m, e)| e * d.basis().mean(m)).sum();
    let mut out = v.clone();
    for comp in 0..2 {
        let bar = mean_coeffs(v, comp);
        for (m, &em) in e.iter().enumerate() {
            if em == 0.0 {
                continue;
            }
            let off = out.idx(comp, m, 0);
            for (p, b) in bar.iter().enumerate() {
                out.coeffs[off + p] -= b * (em / emean);
            }
        }
    }
    Ok(out)
}

/// Spectral coefficients of `div_H v` in the primal basis (single component).
pub(crate) fn div_h_coeffs(v: &VelocityField) -> Vec<Complex64> {
    let d = v.domain();
    let (nm, plane) = (d.nmodes(), d.plane());
    let mut out = vec![Complex64::default(); nm * plane];
    for m in 0..nm {
        for p in 0..plane {
            let (ix, iy) = ik(d, p);
            out[m * plane + p] = ix * v.coeffs[v.idx(0, m, p)] + iy * v.coeffs[v.idx(1, m, p)];
        }
    }
    out
}

/// `w(v) = -int_{-h}^{z} div_H v`, evaluated with closed-form antiderivatives.
pub(crate) fn w_coeffs(v: &VelocityField) -> Vec<Complex64> {
    div_h_coeffs(v).into_iter().map(|c| -c).collect()
}

/// Vertical velocity on the collocation grid.
pub fn vertical_velocity(v: &VelocityField) -> Result<ScalarField3D> {
    v.require_primal()?;
    let d = v.domain();
    let values = d.synthesize(&w_coeffs(v), Levels::GridAnti)?;
    ScalarField3D::from_values(d, values)
}

/// `w(v)` at an arbitrary depth for every horizontal node.
pub fn vertical_velocity_at(v: &VelocityField, z: f64) -> Result<Vec<f64>> {
    v.require_primal()?;
    let d = v.domain();
    let (nm, plane) = (d.nmodes(), d.plane());
    let wc = w_coeffs(v);
    let mut level = vec![Complex64::default(); plane];
    for m in 0..nm {
        let phi = d.basis().antiderivative(m, z);
        for p in 0..plane {
            level[p] += wc[m * plane + p] * phi;
        }
    }
    Ok(d.planes_inverse(&level))
}

/// Horizontal divergence on the collocation grid.
pub fn div_h(v: &VelocityField) -> Result<ScalarField3D> {
    v.require_primal()?;
    let d = v.domain();
    ScalarField3D::from_values(d, d.synthesize(&div_h_coeffs(v), Levels::Grid)?)
}

pub fn grad_h(s: &SurfaceField) -> [SurfaceField; 2] {
    let d = s.domain();
    let mut gx = SurfaceField::zeros(d);
    let mut gy = SurfaceField::zeros(d);
    for p in 0..d.plane() {
        let (ix, iy) = ik(d, p);
        gx.coeffs[p] = ix * s.coeffs[p];
        gy.coeffs[p] = iy * s.coeffs[p];
    }
    [gx, gy]
}

/// `div_H` of a pair of surface fields.
pub fn div_h_surface(s: &[SurfaceField; 2]) -> SurfaceField {
    let d = s[0].domain();
    let mut out = SurfaceField::zeros(d);
    for p in 0..d.plane() {
        let (ix, iy) = ik(d, p);
        out.coeffs[p] = ix * s[0].coeffs[p] + iy * s[1].coeffs[p];
    }
    out
}

pub fn laplacian_h(s: &SurfaceField) -> SurfaceField {
    let d = s.domain();
    let mut out = s.clone();
    for p in 0..d.plane() {
        out.coeffs[p] *= -d.k2(p);
    }
    out
}

/// Horizontal derivative `d/dx_dir` of a primal field (`dir` 0 = x, 1 = y).
pub fn d_h(v: &VelocityField, dir: usize) -> Result<VelocityField> {
    v.require_primal()?;
    let d = v.domain();
    let mut out = v.clone();
    let plane = d.plane();
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        let k = ik(d, i % plane);
        *c *= if dir == 0 { k.0 } else { k.1 };
    }
    Ok(out)
}

/// `Delta v = (d_x^2 + d_y^2 + d_z^2) v`, diagonal in the basis.
pub fn laplacian(v: &VelocityField) -> Result<VelocityField> {
    v.require_primal()?;
    let d = v.domain();
    let (nm, plane) = (d.nmodes(), d.plane());
    let mut out = v.clone();
    for comp in 0..2 {
        for m in 0..nm {
            for p in 0..plane {
                let i = out.idx(comp, m, p);
                out.coeffs[i] *= -d.lambda(p, m);
            }
        }
    }
    Ok(out)
}

/// `d_z v`, returned in the dual basis.
pub fn d_z(v: &VelocityField) -> Result<VelocityField> {
    v.require_primal()?;
    let d = v.domain();
    let (nm, plane) = (d.nmodes(), d.plane());
    let mut out = v.clone();
    out.basis = BasisTag::Dual;
    for comp in 0..2 {
        for m in 0..nm {
            let f = d.basis().derivative_factor(m);
            for p in 0..plane {
                let i = out.idx(comp, m, p);
                out.coeffs[i] *= f;
            }
        }
    }
    Ok(out)
}

/// Hydrostatic divergence of the vertical mean, `div_H vbar`, as coefficients.
pub fn mean_divergence(v: &VelocityField) -> Result<SurfaceField> {
    Ok(div_h_surface(&vertical_average(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BcVariant, DomainSpec};
    use crate::random::smooth_field;

    fn dom(bc: BcVariant) -> Domain {
        Domain::new(DomainSpec::new(8, 8, 8, 1.3, bc)).unwrap()
    }

    #[test]
    fn average_of_constant_and_zero_mean_modes() {
        let d = dom(BcVariant::Empty);
        let c = VelocityField::from_grid(&d, &vec![1.5; d.grid_len()]).unwrap();
        let bar = vertical_average(&c).unwrap();
        assert!((bar[0].to_grid()[5] - 1.5).abs() < 1e-13);
        let m1 = VelocityField::mode(&d, 0, 0, 0, 1, 1.0);
        assert!(vertical_average(&m1).unwrap()[0].norm_l2() < 1e-15);
        // (z + h/2) e1 is odd about mid-depth
        let h = d.h();
        let mut g = vec![0.0; d.grid_len()];
        for j in 0..d.nz() {
            for p in 0..d.plane() {
                g[j * d.plane() + p] = d.grid().z[j] + 0.5 * h;
            }
        }
        let v = VelocityField::from_grid(&d, &g).unwrap();
        assert!(vertical_average(&v).unwrap()[0].norm_l2() < 1e-13);
    }

    #[test]
    fn fluctuation_has_zero_mean() {
        for bc in BcVariant::ALL {
            let d = dom(bc);
            let v = smooth_field(&d, 11, 1.5);
            let f = fluctuation(&v).unwrap();
            let bar = vertical_average(&f).unwrap();
            assert!(bar[0].norm_l2() + bar[1].norm_l2() <= 1e-12 * v.norm_l2(), "{bc}");
        }
        let d = dom(BcVariant::Empty);
        let m = VelocityField::mode(&d, 1, 1, 2, 3, 1.0);
        assert!(fluctuation(&m).unwrap().max_diff(&m) == 0.0);
    }

    #[test]
    fn w_of_barotropic_shear() {
        // v = (sin 2 pi x, 0) => w = -2 pi cos(2 pi x) (z + h)
        let d = dom(BcVariant::Empty);
        let h = d.h();
        let g = &d.grid();
        let mut vals = vec![0.0; d.grid_len()];
        for j in 0..d.nz() {
            for p in 0..d.plane() {
                vals[j * d.plane() + p] = (2.0 * PI * g.x[p % d.nx()]).sin();
            }
        }
        let v = VelocityField::from_grid(&d, &vals).unwrap();
        let w = vertical_velocity(&v).unwrap();
        for j in 0..d.nz() {
            for p in 0..d.plane() {
                let exact = -2.0 * PI * (2.0 * PI * g.x[p % d.nx()]).cos() * (g.z[j] + h);
                assert!((w.values()[j * d.plane() + p] - exact).abs() < 1e-12);
            }
        }
        let bottom = vertical_velocity_at(&v, -h).unwrap();
        assert!(bottom.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn w_derivative_matches_divergence() {
        for bc in BcVariant::ALL {
            let d = dom(bc);
            let v = smooth_field(&d, 5, 1.5);
            let div = div_h(&v).unwrap();
            let eps = 1e-5;
            for &j in &[1usize, 4, 6] {
                let z = d.grid().z[j];
                let up = vertical_velocity_at(&v, z + eps).unwrap();
                let dn = vertical_velocity_at(&v, z - eps).unwrap();
                for p in 0..d.plane() {
                    let dw = (up[p] - dn[p]) / (2.0 * eps);
                    assert!((dw + div.values()[j * d.plane() + p]).abs() < 1e-6 * (1.0 + div.max_abs()), "{bc}");
                }
            }
        }
    }

    #[test]
    fn laplacian_eigen_relation() {
        for bc in BcVariant::ALL {
            let d = dom(bc);
            let v = VelocityField::mode(&d, 0, 2, -1, 3, 1.0);
            let l = laplacian(&v).unwrap();
            let p = d.index_of(2, -1);
            let lam = d.lambda(p, 3);
            let mut expect = v.clone();
            expect.scale(-lam);
            assert!(l.max_diff(&expect) < 1e-12 * lam);
        }
    }

    #[test]
    fn d_z_of_barotropic_vanishes() {
        let d = dom(BcVariant::Empty);
        let v = VelocityField::mode(&d, 0, 1, 0, 0, 2.0);
        let dz = d_z(&v).unwrap();
        assert!(dz.to_grid().iter().all(|x| x.abs() < 1e-15));
        assert_eq!(dz.basis(), BasisTag::Dual);
        assert!(laplacian(&dz).is_err());
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let d = dom(BcVariant::Both);
        let mut phi = SurfaceField::zeros(&d);
        phi.coeffs_mut()[d.index_of(1, 2)] = Complex64::new(0.3, 0.1);
        phi.coeffs_mut()[d.index_of(-1, -2)] = Complex64::new(0.3, -0.1);
        let a = div_h_surface(&grad_h(&phi));
        let b = laplacian_h(&phi);
        assert!(a.max_diff(&b) < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let d = dom(BcVariant::Empty);
        assert!(matches!(VelocityField::from_grid(&d, &[0.0; 3]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(VelocityField::from_coeffs(&d, vec![]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn integration_by_parts_in_z() {
        // <d_z u, d_z s> = -<u, d_zz s>: u vanishes at Dirichlet ends, d_z s at Neumann ends
        for bc in BcVariant::ALL {
            let d = dom(bc);
            let u = smooth_field(&d, 2, 1.0);
            let s = smooth_field(&d, 3, 1.0);
            let mut szz = s.clone();
            for comp in 0..2 {
                for m in 0..d.nmodes() {
                    for p in 0..d.plane() {
                        let i = szz.idx(comp, m, p);
                        szz.coeffs[i] *= -d.basis().kappa(m).powi(2);
                    }
                }
            }
            let q = |v: &VelocityField, l| d.synthesize(v.coeffs(), l).unwrap();
            let (du, ds) = (q(&d_z(&u).unwrap(), Levels::QuadDual), q(&d_z(&s).unwrap(), Levels::QuadDual));
            let (ug, szzg) = (q(&u, Levels::Quad), q(&szz, Levels::Quad));
            let integrate = |a: &[f64], b: &[f64]| {
                let mut t = 0.0;
                for (i, (x, y)) in a.iter().zip(b).enumerate() {
                    t += x * y * d.quad_weights()[(i / d.plane()) % d.nquad()] * d.grid().wxy;
                }
                t
            };
            let (a, b) = (integrate(&du, &ds), integrate(&ug, &szzg));
            assert!((a + b).abs() < 1e-10 * (a.abs() + 1.0), "{bc}: {a} {b}");
        }
    }
}
