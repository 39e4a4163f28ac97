//! Analyticity-radius proxy from the exponential decay of spectral coefficients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::VelocityField;
use crate::stepper::TrajectoryRecord;

/// Coefficients below this fraction of the largest one are ignored as floor noise.
pub const FIT_FLOOR: f64 = 1e-13;

/// Fewer active modes than this leave the fit flagged.
pub const MIN_ACTIVE: usize = 8;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RadiusFit {
    pub time: f64,
    /// decay rate `sigma` in `|c| ~ exp(-sigma xi)`, `xi = 2 pi |k| + kappa_m`
    pub sigma: f64,
    pub intercept: f64,
    pub active: usize,
    /// too few active modes or degenerate frequencies
    pub flagged: bool,
}

/// Least-squares fit of `log |c(k,m)|` against `-sigma (2 pi |k| + kappa_m)`.
pub fn fit_radius(v: &VelocityField, time: f64) -> RadiusFit {
    let d = v.domain();
    let b = d.basis();
    let mut pts = Vec::new();
    for m in 0..d.nmodes() {
        for p in 0..d.plane() {
            if !d.in_mask(p) {
                continue;
            }
            let (kx, ky) = d.k_of(p);
            if ky < 0 || (ky == 0 && kx < 0) {
                continue;
            }
            let a = v.coeffs()[v.idx(0, m, p)].norm_sqr() + v.coeffs()[v.idx(1, m, p)].norm_sqr();
            let xi = 2.0 * std::f64::consts::PI * ((kx * kx + ky * ky) as f64).sqrt() + b.kappa(m);
            pts.push((xi, a.sqrt()));
        }
    }
    let max = pts.iter().fold(0.0f64, |a, p| a.max(p.1));
    let act: Vec<(f64, f64)> = pts.into_iter().filter(|p| max > 0.0 && p.1 > FIT_FLOOR * max).map(|(x, c)| (x, c.ln())).collect();
    let n = act.len();
    let bad = RadiusFit { time, sigma: f64::NAN, intercept: f64::NAN, active: n, flagged: true };
    if n < MIN_ACTIVE {
        return bad;
    }
    let mx = act.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = act.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = act.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = act.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 1e-12 * n as f64 {
        return bad;
    }
    let slope = sxy / sxx;
    RadiusFit { time, sigma: -slope, intercept: my - slope * mx, active: n, flagged: false }
}

/// Radius estimate at every snapshot.
pub fn analyticity_radius(record: &TrajectoryRecord) -> Vec<RadiusFit> {
    record.snapshots.par_iter().map(|s| fit_radius(&s.v, s.time)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BcVariant, Domain, DomainSpec};
    use num_complex::Complex64;

    #[test]
    fn recovers_synthetic_radius() {
        let d = Domain::new(DomainSpec::cube(16, BcVariant::Bottom)).unwrap();
        let mut v = VelocityField::zeros(&d);
        let s0 = 0.07;
        for m in 0..d.nmodes() {
            for p in 0..d.plane() {
                if !d.in_mask(p) {
                    continue;
                }
                let (kx, ky) = d.k_of(p);
                let xi = 2.0 * std::f64::consts::PI * ((kx * kx + ky * ky) as f64).sqrt() + d.basis().kappa(m);
                let i = v.idx(0, m, p);
                v.coeffs_mut()[i] = Complex64::new((-s0 * xi).exp(), 0.0);
            }
        }
        let f = fit_radius(&v, 0.0);
        assert!(!f.flagged && (f.sigma - s0).abs() < 1e-10, "{f:?}");
    }

    #[test]
    fn zero_field_is_flagged() {
        let d = Domain::new(DomainSpec::cube(8, BcVariant::Empty)).unwrap();
        assert!(fit_radius(&VelocityField::zeros(&d), 0.0).flagged);
    }
}
