//! Parabolic smoothing diagnostics: weighted suprema of `||A v||` and `||v_t||`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydrostatic::StokesOperator;
use crate::stepper::{ForcingKind, TrajectoryRecord};

/// Weighted suprema are flagged unbounded above this value.
pub const BOUNDED_LIMIT: f64 = 1e8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothingStats {
    pub mu: f64,
    pub p: f64,
    pub q: f64,
    pub t_min: f64,
    pub times: Vec<f64>,
    /// `||A v(t)||_{L^2}`
    pub av: Vec<f64>,
    /// `t^{1-mu} ||A v(t)||`
    pub weighted_av: Vec<f64>,
    /// `t ||v_t(t)||`
    pub t_vt: Vec<f64>,
    /// `||A v||` at the first snapshot
    pub av_initial: f64,
    /// suprema over snapshot times in `[t_min, T]`
    pub sup_weighted_av: f64,
    pub sup_t_vt: f64,
    /// `(int t^{(1-mu) q} ||A v||^q dt)^{1/q}` over the same window
    pub lq_weighted_av: f64,
}

/// Weighted smoothing statistics over snapshots with `t >= t_min` (`t_min > 0` keeps the singular weight finite).
pub fn smoothing_tracker(record: &TrajectoryRecord, mu: f64, p: f64, q: f64, t_min: f64) -> Result<SmoothingStats> {
    if !(q > 1.0) || !(mu > 1.0 / q && mu <= 1.0) {
        return Err(Error::InvalidArgument(format!("need q > 1 and mu in (1/q, 1], got q = {q}, mu = {mu}")));
    }
    if record.snapshots.is_empty() {
        return Err(Error::InvalidArgument("record has no snapshots".into()));
    }
    let op = StokesOperator::new(&record.domain);
    let av: Vec<f64> = record.snapshots.par_iter().map(|s| op.norm_av(&s.v)).collect::<Result<_>>()?;
    let times: Vec<f64> = record.snapshots.iter().map(|s| s.time).collect();
    let weighted: Vec<f64> = times.iter().zip(&av).map(|(t, a)| t.powf(1.0 - mu) * a).collect();
    let t_vt: Vec<f64> = record.snapshots.iter().map(|s| s.time * s.vt.norm_l2()).collect();
    let inside: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= t_min && times[i] > 0.0).collect();
    let sup = |x: &[f64]| inside.iter().map(|&i| x[i]).fold(0.0, f64::max);
    let ts: Vec<f64> = inside.iter().map(|&i| times[i]).collect();
    let vs: Vec<f64> = inside.iter().map(|&i| av[i]).collect();
    Ok(SmoothingStats {
        mu,
        p,
        q,
        t_min,
        av_initial: av[0],
        sup_weighted_av: sup(&weighted),
        sup_t_vt: sup(&t_vt),
        lq_weighted_av: super::time_weighted_integral(&ts, &vs, q, mu),
        times,
        av,
        weighted_av: weighted,
        t_vt,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeDerivativeStats {
    pub times: Vec<f64>,
    pub vt_l2: Vec<f64>,
    pub t_vt_l2: Vec<f64>,
    /// `t ||A v_t||`, the `D(A)` proxy
    pub t_avt_l2: Vec<f64>,
    pub sup_t_vt: f64,
    pub sup_t_avt: f64,
    pub bounded: bool,
}

/// `||v_t||`, `t ||v_t||` and `t ||A v_t||` with `v_t` taken from the equation.
pub fn time_derivative_record(record: &TrajectoryRecord) -> Result<TimeDerivativeStats> {
    if let ForcingKind::TimeDependent { derivative: false } = record.forcing {
        return Err(Error::MissingForcingDerivative);
    }
    let op = StokesOperator::new(&record.domain);
    let times: Vec<f64> = record.snapshots.iter().map(|s| s.time).collect();
    let vt_l2: Vec<f64> = record.snapshots.iter().map(|s| s.vt.norm_l2()).collect();
    let avt: Vec<f64> = record.snapshots.par_iter().map(|s| op.norm_av(&s.vt)).collect::<Result<_>>()?;
    let t_vt_l2: Vec<f64> = times.iter().zip(&vt_l2).map(|(t, x)| t * x).collect();
    let t_avt_l2: Vec<f64> = times.iter().zip(&avt).map(|(t, x)| t * x).collect();
    let sup_t_vt = t_vt_l2.iter().copied().fold(0.0, f64::max);
    let sup_t_avt = t_avt_l2.iter().copied().fold(0.0, f64::max);
    let bounded = t_vt_l2.iter().chain(&t_avt_l2).all(|x| x.is_finite()) && sup_t_avt < BOUNDED_LIMIT;
    Ok(TimeDerivativeStats { times, vt_l2, t_vt_l2, t_avt_l2, sup_t_vt, sup_t_avt, bounded })
}
