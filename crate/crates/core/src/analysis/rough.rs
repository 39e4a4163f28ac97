//! Random solenoidal data at the edge of a prescribed Besov regularity.

use serde::{Deserialize, Serialize};

use super::besov_norm;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::VelocityField;
use crate::hydrostatic::Projector;
use crate::random::spectral_random;

/// Margin above the critical coefficient decay.
pub const ROUGH_EPS: f64 = 0.05;

/// Modes with `lambda <= LOW_MODE_CUTOFF` fix the normalization, so the data agree across resolutions.
pub const LOW_MODE_CUTOFF: f64 = 64.0;

#[derive(Clone, Debug)]
pub struct RoughData {
    pub field: VelocityField,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    /// `B^{2 theta}_{pq}` estimate of the generated field
    pub besov: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Thresholds {
    lower: f64,
    upper: f64,
}

fn thresholds(p: f64) -> Thresholds {
    Thresholds { lower: 1.0 / (2.0 * p), upper: 0.5 + 1.0 / (2.0 * p) }
}

/// Random-phase data with `|c| ~ (1 + lambda)^{-(theta + 3/4 + eps/2)}`, projected.
///
/// The low-mode `L^2` norm is scaled to `amplitude`. Near the trace thresholds
/// `theta = 1/(2p)` and `1/2 + 1/(2p)` a warning is attached rather than an error.
pub fn generate_rough_data(domain: &Domain, p: f64, q: f64, theta: f64, seed: u64, amplitude: f64) -> Result<RoughData> {
    if !(p > 1.0 && p.is_finite()) || !(q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("p and q must lie in (1, inf), got p = {p}, q = {q}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {theta}")));
    }
    let mut warnings = Vec::new();
    let th = thresholds(p);
    for t in [th.lower, th.upper] {
        if (theta - t).abs() < 1e-9 {
            warnings.push(format!("theta = {theta} sits on the trace threshold {t}; boundary conditions are not characterized there"));
        }
    }
    let alpha = theta + 0.75 + 0.5 * ROUGH_EPS;
    let raw = spectral_random(domain, seed, |l| (1.0 + l).powf(-alpha));
    let mut v = Projector::new(domain).project(&raw)?;
    let d = domain.clone();
    let low = v.weighted_dot(&v, |m, pp| if d.lambda(pp, m) <= LOW_MODE_CUTOFF { 1.0 } else { 0.0 }).sqrt();
    if low > 0.0 {
        v.scale(amplitude / low);
    }
    let besov = besov_norm(&v, 2.0 * theta, p, q)?;
    Ok(RoughData { field: v, p, q, theta, besov, warnings })
}
