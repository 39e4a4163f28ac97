//! Hydrostatic Helmholtz projection, hydrostatic Stokes operator, its spectrum and semigroup.
//!
//! For `k != 0` write each vertical coefficient as `alpha_m khat + beta_m khat_perp`. The
//! constraint `div_H vbar = 0` reads `sum_m a_m alpha_m = 0` (`a_m` the basis means), so the
//! projection touches only `alpha`, and `-A` acts on `beta` by the symbol `lambda(k, m)` and on
//! `alpha` by the compression of `diag(lambda)` onto that hyperplane. The compression splits
//! as `4 pi^2 |k|^2 + nu_j` with `nu_j`, eigenvectors independent of `k`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{BcVariant, Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::field::{mean_coeffs, vertical_average, SurfaceField, VelocityField};

/// L^2-orthogonal projection onto hydrostatically solenoidal fields; pressure gauge `pi(0) = 0`.
#[derive(Clone, Debug)]
pub struct Projector {
    domain: Domain,
    /// `a_m / n_m / S`
    weight: Vec<f64>,
}

impl Projector {
    pub fn new(domain: &Domain) -> Self {
        let b = domain.basis();
        let s: f64 = (0..b.len()).map(|m| b.mean(m).powi(2) / b.norm(m)).sum();
        let weight = (0..b.len()).map(|m| b.mean(m) / b.norm(m) / s).collect();
        Projector { domain: domain.clone(), weight }
    }

    pub fn project_in_place(&self, v: &mut VelocityField) {
        let d = &self.domain;
        let bar = [mean_coeffs(v, 0), mean_coeffs(v, 1)];
        for p in 0..d.plane() {
            let (kx, ky) = d.k_of(p);
            if kx == 0 && ky == 0 {
                continue;
            }
            let (kx, ky) = (kx as f64, ky as f64);
            let l = (bar[0][p] * kx + bar[1][p] * ky) / (kx * kx + ky * ky);
            for (m, &w) in self.weight.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let (i0, i1) = (v.idx(0, m, p), v.idx(1, m, p));
                let c = v.coeffs_mut();
                c[i0] -= l * (kx * w);
                c[i1] -= l * (ky * w);
            }
        }
    }

    pub fn project(&self, v: &VelocityField) -> Result<VelocityField> {
        v.require_primal()?;
        if v.domain() != &self.domain {
            return Err(Error::DimensionMismatch("projector and field domains differ".into()));
        }
        let mut out = v.clone();
        self.project_in_place(&mut out);
        Ok(out)
    }
}

/// Project with a fresh [`Projector`].
pub fn project(v: &VelocityField) -> Result<VelocityField> {
    Projector::new(v.domain()).project(v)
}

/// Mean-zero surface pressure whose gradient is the part of `residual` removed by the projection.
pub fn recover_surface_pressure(residual: &VelocityField) -> Result<SurfaceField> {
    residual.require_primal()?;
    let d = residual.domain();
    let b = d.basis();
    let hs: f64 = d.h() * (0..b.len()).map(|m| b.mean(m).powi(2) / b.norm(m)).sum::<f64>();
    let bar = vertical_average(residual)?;
    let mut pi = SurfaceField::zeros(d);
    for p in 0..d.plane() {
        let (kx, ky) = d.k_of(p);
        if (kx == 0 && ky == 0) || !d.retained(p) {
            continue;
        }
        let l = bar[0].coeffs()[p] * kx as f64 + bar[1].coeffs()[p] * ky as f64;
        let k2 = (kx * kx + ky * ky) as f64;
        pi.coeffs_mut()[p] = Complex64::new(0.0, -1.0) * l / (2.0 * PI * k2 * hs);
    }
    Ok(pi)
}

/// Check `div_H vbar = 0` relative to the size of the horizontal gradient of `vbar`.
pub fn solenoidal_defect(v: &VelocityField) -> Result<f64> {
    let d = v.domain();
    let bar = vertical_average(v)?;
    let (mut div, mut grad) = (0.0, 0.0);
    for p in 0..d.plane() {
        let (kx, ky) = d.k_of(p);
        let (a, b) = (bar[0].coeffs()[p], bar[1].coeffs()[p]);
        div += (a * kx as f64 + b * ky as f64).norm_sqr();
        grad += (kx * kx + ky * ky) as f64 * (a.norm_sqr() + b.norm_sqr());
    }
    Ok(if grad == 0.0 { 0.0 } else { (div / grad).sqrt() })
}

/// `A = P Delta` restricted to hydrostatically solenoidal fields.
#[derive(Clone, Debug)]
pub struct StokesOperator {
    domain: Domain,
    coupled: Vec<usize>,
    sqrt_norm: Vec<f64>,
    /// eigenvectors of the compressed vertical operator, one column per `nu`
    evecs: DMatrix<f64>,
    nu: Vec<f64>,
    /// mode index dominating each eigenvector
    nu_label: Vec<usize>,
}

/// Tolerance for the solenoidality check in [`StokesOperator::apply_stokes`].
pub const SOLENOIDAL_TOL: f64 = 1e-8;

impl StokesOperator {
    pub fn new(domain: &Domain) -> Self {
        let b = domain.basis();
        let coupled: Vec<usize> = (0..b.len()).filter(|&m| b.mean(m) != 0.0).collect();
        let sqrt_norm: Vec<f64> = (0..b.len()).map(|m| b.norm(m).sqrt()).collect();
        let nc = coupled.len();
        let mut u: Vec<f64> = coupled.iter().map(|&m| b.mean(m) / sqrt_norm[m]).collect();
        let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= un);
        let q = DMatrix::from_fn(nc, nc, |i, j| if i == j { 1.0 } else { 0.0 } - u[i] * u[j]);
        let k = DMatrix::from_fn(nc, nc, |i, j| if i == j { b.kappa(coupled[i]).powi(2) } else { 0.0 });
        let uu = DMatrix::from_fn(nc, nc, |i, j| u[i] * u[j]);
        let mut h = &q * k * &q - uu;
        h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut keep: Vec<usize> = (0..nc).collect();
        // u itself is the eigenvector at -1; everything else lies on the constraint hyperplane
        if let Some(pos) = keep.iter().copied().min_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c])) {
            keep.retain(|&i| i != pos);
        }
        keep.sort_by(|&a, &c| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[c]));
        let evecs = DMatrix::from_fn(nc, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
        let nu: Vec<f64> = keep.iter().map(|&j| eig.eigenvalues[j]).collect();
        let nu_label = (0..keep.len())
            .map(|j| {
                let col = evecs.column(j);
                let i = (0..nc).max_by(|&a, &c| col[a].abs().total_cmp(&col[c].abs())).unwrap_or(0);
                coupled[i]
            })
            .collect();
        StokesOperator { domain: domain.clone(), coupled, sqrt_norm, evecs, nu, nu_label }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Eigenvalues `nu_j` of the constrained vertical block (shifted by `4 pi^2 |k|^2` per wavenumber).
    pub fn constrained_values(&self) -> &[f64] {
        &self.nu
    }

    fn check(&self, v: &VelocityField) -> Result<()> {
        v.require_primal()?;
        if v.domain() != &self.domain {
            return Err(Error::DimensionMismatch("operator and field domains differ".into()));
        }
        Ok(())
    }

    /// `f(-A) P v` through the spectral decomposition of `-A`.
    pub fn apply_fn(&self, v: &VelocityField, f: impl Fn(f64) -> f64 + Sync) -> Result<VelocityField> {
        self.check(v)?;
        let d = &self.domain;
        let (nm, plane) = (d.nmodes(), d.plane());
        let nc = self.coupled.len();
        let c = v.coeffs();
        let cols: Vec<Vec<Complex64>> = (0..plane)
            .into_par_iter()
            .map(|p| {
                let mut out = vec![Complex64::default(); 2 * nm];
                if !d.retained(p) {
                    return out;
                }
                let (kx, ky) = d.k_of(p);
                let k2 = d.k2(p);
                if kx == 0 && ky == 0 {
                    for m in 0..nm {
                        let g = f(d.lambda(p, m));
                        out[m] = c[m * plane + p] * g;
                        out[nm + m] = c[(nm + m) * plane + p] * g;
                    }
                    return out;
                }
                let kn = ((kx * kx + ky * ky) as f64).sqrt();
                let (ex, ey) = (kx as f64 / kn, ky as f64 / kn);
                let mut alpha = vec![Complex64::default(); nm];
                for m in 0..nm {
                    let (a, b) = (c[m * plane + p], c[(nm + m) * plane + p]);
                    alpha[m] = a * ex + b * ey;
                    let beta = (b * ex - a * ey) * f(d.lambda(p, m));
                    out[m] = -beta * ey;
                    out[nm + m] = beta * ex;
                }
                let mut anew: Vec<Complex64> = (0..nm).map(|m| alpha[m] * f(d.lambda(p, m))).collect();
                if nc > 0 {
                    let y: Vec<Complex64> = self.coupled.iter().map(|&m| alpha[m] * self.sqrt_norm[m]).collect();
                    let mut z = vec![Complex64::default(); nc];
                    for j in 0..self.nu.len() {
                        let col = self.evecs.column(j);
                        let mut s = Complex64::default();
                        for i in 0..nc {
                            s += y[i] * col[i];
                        }
                        s *= f(k2 + self.nu[j]);
                        for i in 0..nc {
                            z[i] += s * col[i];
                        }
                    }
                    for (i, &m) in self.coupled.iter().enumerate() {
                        anew[m] = z[i] / self.sqrt_norm[m];
                    }
                }
                for m in 0..nm {
                    out[m] += anew[m] * ex;
                    out[nm + m] += anew[m] * ey;
                }
                out
            })
            .collect();
        let mut res = VelocityField::zeros(d);
        let r = res.coeffs_mut();
        for (p, col) in cols.iter().enumerate() {
            for m in 0..nm {
                r[m * plane + p] = col[m];
                r[(nm + m) * plane + p] = col[nm + m];
            }
        }
        Ok(res)
    }

    /// `A v = P Delta v`; refuses inputs that are not hydrostatically solenoidal.
    pub fn apply_stokes(&self, v: &VelocityField) -> Result<VelocityField> {
        self.check(v)?;
        let defect = solenoidal_defect(v)?;
        if defect > SOLENOIDAL_TOL {
            return Err(Error::NotSolenoidal(defect));
        }
        Projector::new(&self.domain).project(&crate::field::laplacian(v)?)
    }

    /// `e^{tA} v0`.
    pub fn apply_semigroup(&self, v0: &VelocityField, t: f64) -> Result<VelocityField> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        self.apply_fn(v0, |l| (-l * t).exp())
    }

    /// `||A v||_{L^2}` for solenoidal `v`.
    pub fn norm_av(&self, v: &VelocityField) -> Result<f64> {
        Ok(self.apply_fn(v, |l| l)?.norm_l2())
    }

    /// Smallest eigenvalues of `-A`, with labels and multiplicities.
    pub fn spectrum(&self, count: usize) -> Result<SpectrumReport> {
        let d = &self.domain;
        let b = d.basis();
        let nm = b.len();
        let retained: Vec<usize> = (0..d.plane()).filter(|&p| d.retained(p)).collect();
        // the constraint removes one direction per nonzero wavenumber
        let total = 2 * nm * retained.len() - (retained.len() - 1);
        if count > total {
            return Err(Error::InvalidArgument(format!("count {count} exceeds the {total} retained eigenvalues")));
        }
        let mut entries = Vec::new();
        for &p in &retained {
            let (kx, ky) = d.k_of(p);
            let k2 = d.k2(p);
            for m in 0..nm {
                let lam = d.lambda(p, m);
                let mult = if (kx == 0 && ky == 0) || b.mean(m) == 0.0 { 2 } else { 1 };
                entries.push(SpectrumEntry { eigenvalue: lam, kx, ky, m: b.label(m), multiplicity: mult });
            }
            if kx != 0 || ky != 0 {
                for (j, &nu) in self.nu.iter().enumerate() {
                    entries.push(SpectrumEntry {
                        eigenvalue: k2 + nu,
                        kx,
                        ky,
                        m: b.label(self.nu_label[j]),
                        multiplicity: 1,
                    });
                }
            }
        }
        entries.sort_by(|a, c| {
            a.eigenvalue
                .total_cmp(&c.eigenvalue)
                .then((a.kx * a.kx + a.ky * a.ky).cmp(&(c.kx * c.kx + c.ky * c.ky)))
                .then(a.kx.cmp(&c.kx))
                .then(a.ky.cmp(&c.ky))
                .then(a.m.cmp(&c.m))
        });
        let mut acc = 0;
        let mut keep = 0;
        while acc < count && keep < entries.len() {
            acc += entries[keep].multiplicity;
            keep += 1;
        }
        entries.truncate(keep);
        let spec = d.spec();
        let kh = (spec.nx.min(spec.ny) / 2) as f64;
        let next_kappa = match b.family {
            crate::domain::BasisFamily::CosineNeumann | crate::domain::BasisFamily::SineDirichlet => {
                (b.label(nm - 1) + 1) as f64 * PI / d.h()
            }
            _ => (nm as f64 + 0.5) * PI / d.h(),
        };
        let complete_below = (4.0 * PI * PI * kh * kh).min(next_kappa * next_kappa);
        let smallest = entries.first().map(|e| e.eigenvalue).unwrap_or(f64::NAN);
        Ok(SpectrumReport { entries, smallest, complete_below, bc: d.bc(), h: d.h() })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub kx: i64,
    pub ky: i64,
    /// vertical mode label; for constrained eigenvectors, the dominant mode
    pub m: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    pub smallest: f64,
    /// eigenvalues below this bound are not affected by horizontal or vertical truncation
    pub complete_below: f64,
    pub bc: BcVariant,
    pub h: f64,
}

impl SpectrumReport {
    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.multiplicity)).collect()
    }
}

/// Domain used for standalone spectrum queries.
pub fn spectrum_domain(bc: BcVariant, h: f64) -> Result<Domain> {
    Domain::new(DomainSpec::new(16, 16, 64, h, bc))
}

/// Smallest `count` eigenvalues of `-A` for a boundary variant and depth.
pub fn spectrum(bc: BcVariant, h: f64, count: usize) -> Result<SpectrumReport> {
    StokesOperator::new(&spectrum_domain(bc, h)?).spectrum(count)
}
