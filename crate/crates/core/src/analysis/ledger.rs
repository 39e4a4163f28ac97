//! Energy closure and the running quantities of the global a priori estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lp_of_grid;
use crate::error::{Error, Result};
use crate::field::{d_h, d_z, fluctuation, grad_h, laplacian, vertical_average, VelocityField};
use crate::stepper::{ForcingKind, TrajectoryRecord};

/// Flag threshold for ledger entries.
pub const LEDGER_LIMIT: f64 = 1e6;

/// Instantaneous columns, then the time integrals, in this order.
pub const LEDGER_COLUMNS: [&str; 14] = [
    "vtilde_l4",
    "int_vtilde_grad_vtilde",
    "grad_vbar_l2",
    "int_grad_pressure",
    "vz_l2",
    "int_grad_vz",
    "grad_v_l2",
    "int_lap_v",
    "vt_l2",
    "vz_l3",
    "hess_v_l2",
    "energy",
    "int_grad_v",
    "bound",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerRow {
    pub time: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AprioriLedger {
    pub columns: Vec<String>,
    pub rows: Vec<LedgerRow>,
    pub running_max: Vec<f64>,
    /// overall bound `B`: the largest running maximum
    pub bound: f64,
    /// the `v_t` column is NaN because the forcing has no time derivative
    pub vt_omitted: bool,
    pub flags: Vec<String>,
}

impl AprioriLedger {
    pub fn all_finite(&self) -> bool {
        self.running_max.iter().enumerate().all(|(i, x)| x.is_finite() || (self.vt_omitted && i == 8))
    }
}

/// Pointwise quantities that do not need time integration.
struct Instant {
    vtilde_l4: f64,
    vtilde_grad_sq: f64,
    grad_vbar: f64,
    grad_pressure_sq: f64,
    vz_l2: f64,
    grad_vz_sq: f64,
    grad_v: f64,
    lap_v_sq: f64,
    vt_l2: f64,
    vz_l3: f64,
    hess_v: f64,
    energy: f64,
}

fn grad_values(v: &VelocityField) -> Result<[Vec<f64>; 3]> {
    Ok([d_h(v, 0)?.to_grid(), d_h(v, 1)?.to_grid(), d_z(v)?.to_grid()])
}

fn instant(s: &crate::stepper::Snapshot) -> Result<Instant> {
    let v = &s.v;
    let d = v.domain();
    let vt = fluctuation(v)?;
    let tv = vt.to_grid();
    let [gx, gy, gz] = grad_values(&vt)?;
    // | |vtilde| |grad vtilde| |^2 integrated on the grid
    let n = d.nz() * d.plane();
    let w = d.grid().wxy * d.grid().wz[0];
    let mut acc = 0.0;
    for i in 0..n {
        let mag = tv[i].powi(2) + tv[n + i].powi(2);
        let g: f64 = (0..2).map(|c| gx[c * n + i].powi(2) + gy[c * n + i].powi(2) + gz[c * n + i].powi(2)).sum();
        acc += mag * g;
    }
    let bar = vertical_average(v)?;
    let grad_vbar_sq: f64 = bar.iter().flat_map(grad_h).map(|g| g.norm_l2().powi(2)).sum();
    let grad_pressure_sq: f64 = grad_h(&s.pressure).iter().map(|g| g.norm_l2().powi(2)).sum();
    let vz = d_z(v)?;
    let dd = d.clone();
    let grad_vz_sq = vz.weighted_dot(&vz, |m, p| dd.lambda(p, m));
    let lap = laplacian(v)?;
    Ok(Instant {
        vtilde_l4: lp_of_grid(d, &tv, 2, 4.0),
        vtilde_grad_sq: acc * w,
        grad_vbar: grad_vbar_sq.sqrt(),
        grad_pressure_sq,
        vz_l2: vz.norm_l2(),
        grad_vz_sq,
        grad_v: v.norm_grad(),
        lap_v_sq: lap.norm_l2().powi(2),
        vt_l2: s.vt.norm_l2(),
        vz_l3: lp_of_grid(d, &vz.to_grid(), 2, 3.0),
        // for trigonometric bases the full Hessian norm equals ||Delta v||
        hess_v: lap.norm_l2(),
        energy: v.norm_l2().powi(2),
    })
}

/// Quantities of the a priori estimate at every snapshot, with trapezoid time integrals.
pub fn apriori_ledger(record: &TrajectoryRecord) -> Result<AprioriLedger> {
    if record.snapshots.is_empty() {
        return Err(Error::InvalidArgument("record has no snapshots".into()));
    }
    let vt_omitted = matches!(record.forcing, ForcingKind::TimeDependent { derivative: false });
    let inst: Vec<Instant> = record.snapshots.par_iter().map(instant).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(inst.len());
    let mut ints = [0.0f64; 4];
    let mut running_max = vec![0.0f64; LEDGER_COLUMNS.len()];
    for (i, q) in inst.iter().enumerate() {
        let t = record.snapshots[i].time;
        if i > 0 {
            let p = &inst[i - 1];
            let dt = t - record.snapshots[i - 1].time;
            ints[0] += 0.5 * dt * (p.vtilde_grad_sq + q.vtilde_grad_sq);
            ints[1] += 0.5 * dt * (p.grad_pressure_sq + q.grad_pressure_sq);
            ints[2] += 0.5 * dt * (p.grad_vz_sq + q.grad_vz_sq);
            ints[3] += 0.5 * dt * (p.lap_v_sq + q.lap_v_sq);
        }
        let int_grad_v = record
            .column("dissipation")
            .and_then(|c| c.get(i).copied())
            .map(|x| 0.5 * x)
            .unwrap_or(f64::NAN);
        let vt = if vt_omitted { f64::NAN } else { q.vt_l2 };
        let mut values = vec![
            q.vtilde_l4,
            ints[0],
            q.grad_vbar,
            ints[1],
            q.vz_l2,
            ints[2],
            q.grad_v,
            ints[3],
            vt,
            q.vz_l3,
            q.hess_v,
            q.energy,
            int_grad_v,
        ];
        let bound = values.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max);
        values.push(bound);
        for (j, (r, v)) in running_max.iter_mut().zip(&values).enumerate() {
            if vt_omitted && j == 8 {
                continue;
            }
            if !v.is_finite() {
                *r = f64::NAN;
            } else if r.is_finite() {
                *r = r.max(*v);
            }
        }
        rows.push(LedgerRow { time: t, values });
    }
    let mut flags = Vec::new();
    if vt_omitted {
        flags.push("vt_l2 omitted: forcing has no time derivative".to_string());
        running_max[8] = f64::NAN;
    }
    for (name, m) in LEDGER_COLUMNS.iter().zip(&running_max) {
        if name == &"vt_l2" && vt_omitted {
            continue;
        }
        if !m.is_finite() {
            flags.push(format!("{name} is not finite"));
        } else if *m > LEDGER_LIMIT {
            flags.push(format!("{name} reached {m:.3e}"));
        }
    }
    let bound = running_max[LEDGER_COLUMNS.len() - 1];
    Ok(AprioriLedger { columns: LEDGER_COLUMNS.iter().map(|s| s.to_string()).collect(), rows, running_max, bound, vt_omitted, flags })
}

/// `||v(t)||^2 + 2 int ||grad v||^2 - 2 int <f, v> - ||v_0||^2` along the record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnergyClosure {
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    pub energy0: f64,
    pub max_abs: f64,
}

impl EnergyClosure {
    pub fn relative(&self) -> f64 {
        if self.energy0 == 0.0 {
            self.max_abs
        } else {
            self.max_abs / self.energy0
        }
    }
}

pub fn energy_closure(record: &TrajectoryRecord) -> Result<EnergyClosure> {
    let residuals = record.column("energy_residual").ok_or_else(|| Error::InvalidArgument("record lacks energy columns".into()))?;
    let max_abs = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(EnergyClosure { times: record.times(), residuals, energy0: record.energy0, max_abs })
}
