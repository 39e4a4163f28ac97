//! Norms, rough initial data and the diagnostic functionals evaluated on trajectories.

mod analyticity;
mod ledger;
mod rough;
mod smoothing;
mod split;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::VelocityField;

pub use analyticity::{analyticity_radius, fit_radius, RadiusFit};
pub use ledger::{apriori_ledger, energy_closure, AprioriLedger, EnergyClosure, LedgerRow};
pub use rough::{generate_rough_data, RoughData};
pub use smoothing::{smoothing_tracker, time_derivative_record, SmoothingStats, TimeDerivativeStats};
pub use split::{split_residual, split_residual_at, SplitResidual};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormFamily {
    Lp,
    Sobolev,
    Besov,
    TimeWeighted,
}

/// Norm selector: `L^p`, `H^{s,2}`, `B^s_{pq}`, or the time-weighted `L^q_mu(H^{s,2})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub family: NormFamily,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub mu: f64,
}

impl NormSpec {
    pub fn lp(p: f64) -> Self {
        NormSpec { family: NormFamily::Lp, p, q: 2.0, s: 0.0, mu: 1.0 }
    }

    pub fn sobolev(s: f64) -> Self {
        NormSpec { family: NormFamily::Sobolev, p: 2.0, q: 2.0, s, mu: 1.0 }
    }

    pub fn besov(s: f64, p: f64, q: f64) -> Self {
        NormSpec { family: NormFamily::Besov, p, q, s, mu: 1.0 }
    }

    /// `(int_0^T t^{(1-mu) q} ||v(t)||_{H^s}^q dt)^{1/q}`.
    pub fn time_weighted(s: f64, q: f64, mu: f64) -> Self {
        NormSpec { family: NormFamily::TimeWeighted, p: 2.0, q, s, mu }
    }

    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 1.0 && x.is_finite();
        if !open(self.p) {
            return Err(Error::InvalidArgument(format!("p must lie in (1, inf), got {}", self.p)));
        }
        if self.s < 0.0 || !self.s.is_finite() {
            return Err(Error::InvalidArgument(format!("s must be nonnegative, got {}", self.s)));
        }
        match self.family {
            NormFamily::Sobolev | NormFamily::TimeWeighted if self.p != 2.0 => {
                Err(Error::Unsupported(format!("Sobolev norms need p = 2, got p = {}", self.p)))
            }
            NormFamily::Besov | NormFamily::TimeWeighted if !open(self.q) => {
                Err(Error::InvalidArgument(format!("q must lie in (1, inf), got {}", self.q)))
            }
            NormFamily::TimeWeighted if !(self.mu > 1.0 / self.q && self.mu <= 1.0) => {
                Err(Error::InvalidArgument(format!("mu must lie in (1/q, 1], got {}", self.mu)))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            NormFamily::Lp => write!(f, "lp:{}", self.p),
            NormFamily::Sobolev => write!(f, "sobolev:{}", self.s),
            NormFamily::Besov => write!(f, "besov:{},{},{}", self.s, self.p, self.q),
            NormFamily::TimeWeighted => write!(f, "tw:{},{},{}", self.s, self.q, self.mu),
        }
    }
}

impl FromStr for NormSpec {
    type Err = Error;

    /// `lp:P`, `sobolev:S`, `besov:S,P,Q`, `tw:S,Q,MU`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse norm spec '{text}'"));
        let (name, args) = text.split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = args.split(',').map(|a| a.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
        let spec = match (name.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("lp", [p]) => NormSpec::lp(*p),
            ("sobolev" | "h", [s]) => NormSpec::sobolev(*s),
            ("besov" | "b", [s, p, q]) => NormSpec::besov(*s, *p, *q),
            ("tw" | "timeweighted", [s, q, mu]) => NormSpec::time_weighted(*s, *q, *mu),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `L^p` norm of pointwise Euclidean magnitudes on the collocation grid.
pub fn lp_of_grid(domain: &Domain, values: &[f64], comps: usize, p: f64) -> f64 {
    let g = domain.grid();
    let n = domain.nz() * domain.plane();
    let w = g.wxy * g.wz[0];
    let mut s = 0.0;
    for i in 0..n {
        let mut m2 = 0.0;
        for c in 0..comps {
            m2 += values[c * n + i] * values[c * n + i];
        }
        s += m2.powf(0.5 * p);
    }
    (s * w).powf(1.0 / p)
}

pub fn lp_norm(v: &VelocityField, p: f64) -> Result<f64> {
    Ok(lp_of_grid(v.domain(), &v.to_grid(), 2, p))
}

fn chi(r: f64) -> f64 {
    // smooth step: 1 on [0,1], 0 on [2,inf)
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let t = 2.0 - r;
    f(t) / (f(t) + f(1.0 - t))
}

/// Smooth dyadic multiplier of block `j` at frequency magnitude `xi`.
pub fn dyadic_multiplier(j: usize, xi: f64) -> f64 {
    if j == 0 {
        chi(xi / 2.0)
    } else {
        chi(xi / 2f64.powi(j as i32 + 1)) - chi(xi / 2f64.powi(j as i32))
    }
}

/// Largest frequency magnitude carried by the domain.
pub fn max_frequency(domain: &Domain) -> f64 {
    let kx = (domain.nx() / 2 - 1) as f64;
    let ky = (domain.ny() / 2 - 1) as f64;
    let kz = domain.basis().kappa(domain.nmodes() - 1);
    (4.0 * PI * PI * (kx * kx + ky * ky) + kz * kz).sqrt()
}

/// Number of dyadic blocks needed to cover every retained mode.
pub fn dyadic_blocks(domain: &Domain) -> usize {
    let xi = max_frequency(domain);
    let mut j = 0;
    while 2f64.powi(j as i32 + 1) < xi {
        j += 1;
    }
    j + 1
}

/// Littlewood-Paley block `Delta_j v`.
pub fn dyadic_block(v: &VelocityField, j: usize) -> VelocityField {
    let d = v.domain();
    let (nm, plane) = (d.nmodes(), d.plane());
    let mut out = v.clone();
    let c = out.coeffs_mut();
    for comp in 0..2 {
        for m in 0..nm {
            for p in 0..plane {
                let i = (comp * nm + m) * plane + p;
                c[i] *= dyadic_multiplier(j, d.lambda(p, m).sqrt());
            }
        }
    }
    out
}

/// `(sum_j (2^{js} ||Delta_j v||_p)^q)^{1/q}`.
pub fn besov_norm(v: &VelocityField, s: f64, p: f64, q: f64) -> Result<f64> {
    let d = v.domain();
    let blocks = dyadic_blocks(d);
    if blocks < 3 {
        return Err(Error::InvalidArgument(format!("only {blocks} dyadic blocks at this resolution; need 3")));
    }
    let mut acc = 0.0;
    for j in 0..blocks {
        let b = lp_norm(&dyadic_block(v, j), p)?;
        acc += (2f64.powf(j as f64 * s) * b).powf(q);
    }
    Ok(acc.powf(1.0 / q))
}

/// Norm of a single field; time-weighted norms need a trajectory (see [`time_weighted_norm`]).
pub fn norm(v: &VelocityField, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    v.require_primal()?;
    match spec.family {
        NormFamily::Lp => lp_norm(v, spec.p),
        NormFamily::Sobolev => Ok(v.sobolev_sq(spec.s).max(0.0).sqrt()),
        NormFamily::Besov => besov_norm(v, spec.s, spec.p, spec.q),
        NormFamily::TimeWeighted => Err(Error::Unsupported("time-weighted norms apply to trajectories".into())),
    }
}

/// Trapezoid rule for `int t^{(1-mu) q} g(t)^q dt` on sampled times, returned as the `q`-th root.
pub fn time_weighted_integral(times: &[f64], values: &[f64], q: f64, mu: f64) -> f64 {
    let f: Vec<f64> = times.iter().zip(values).map(|(t, g)| t.powf((1.0 - mu) * q) * g.powf(q)).collect();
    let mut s = 0.0;
    for i in 1..times.len() {
        s += 0.5 * (times[i] - times[i - 1]) * (f[i] + f[i - 1]);
    }
    s.powf(1.0 / q)
}

/// Time-weighted norm over the snapshots of a trajectory.
pub fn time_weighted_norm(record: &crate::stepper::TrajectoryRecord, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    if spec.family != NormFamily::TimeWeighted {
        return Err(Error::InvalidArgument("expected a time-weighted norm spec".into()));
    }
    let times: Vec<f64> = record.snapshots.iter().map(|s| s.time).collect();
    let vals: Vec<f64> = record.snapshots.iter().map(|s| s.v.sobolev_sq(spec.s).max(0.0).sqrt()).collect();
    Ok(time_weighted_integral(&times, &vals, spec.q, spec.mu))
}
