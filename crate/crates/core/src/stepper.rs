//! CNAB2 time integration in the hydrostatically solenoidal space and trajectory recording.
//!
//! The Stokes part is advanced by Crank-Nicolson through the exact spectral calculus of `A`,
//! the advection and forcing by second-order Adams-Bashforth. The first step uses
//! Crank-Nicolson with a Heun predictor-corrector for the explicit part.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{generate_rough_data, norm, NormFamily, NormSpec};
use crate::domain::{BcVariant, Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::field::{laplacian, SurfaceField, VelocityField};
use crate::hydrostatic::{recover_surface_pressure, Projector, StokesOperator};
use crate::nonlinear::NonlinearEvaluator;
use crate::random::smooth_field;

/// Norm beyond which a run counts as blown up.
pub const BLOWUP_NORM: f64 = 1e12;

/// Time-dependent body force. Values are raw (not projected).
pub trait Forcing: Send + Sync {
    fn eval(&self, domain: &Domain, t: f64) -> VelocityField;

    /// `f_t`, when available.
    fn time_derivative(&self, _domain: &Domain, _t: f64) -> Option<VelocityField> {
        None
    }

    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroForcing;

impl Forcing for ZeroForcing {
    fn eval(&self, domain: &Domain, _t: f64) -> VelocityField {
        VelocityField::zeros(domain)
    }

    fn time_derivative(&self, domain: &Domain, _t: f64) -> Option<VelocityField> {
        Some(VelocityField::zeros(domain))
    }

    fn is_zero(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug)]
pub struct SteadyForcing(pub VelocityField);

impl Forcing for SteadyForcing {
    fn eval(&self, _domain: &Domain, _t: f64) -> VelocityField {
        self.0.clone()
    }

    fn time_derivative(&self, domain: &Domain, _t: f64) -> Option<VelocityField> {
        Some(VelocityField::zeros(domain))
    }
}

/// `f(t) = field * cos(omega t)`.
#[derive(Clone, Debug)]
pub struct HarmonicForcing {
    pub field: VelocityField,
    pub omega: f64,
}

impl Forcing for HarmonicForcing {
    fn eval(&self, _domain: &Domain, t: f64) -> VelocityField {
        self.field.scaled((self.omega * t).cos())
    }

    fn time_derivative(&self, _domain: &Domain, t: f64) -> Option<VelocityField> {
        Some(self.field.scaled(-self.omega * (self.omega * t).sin()))
    }
}

/// Piecewise-linear interpolation between sampled fields.
#[derive(Clone, Debug)]
pub struct SeriesForcing {
    pub times: Vec<f64>,
    pub fields: Vec<VelocityField>,
    /// expose the piecewise-constant slope as `f_t`
    pub derivative: bool,
}

impl SeriesForcing {
    pub fn new(times: Vec<f64>, fields: Vec<VelocityField>, derivative: bool) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::InvalidConfig("forcing series needs one field per time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("forcing series times must increase".into()));
        }
        Ok(SeriesForcing { times, fields, derivative })
    }

    fn bracket(&self, t: f64) -> (usize, f64) {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return (0, 0.0);
        }
        if t >= self.times[n - 1] {
            return (n - 2, 1.0);
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        (i, (t - self.times[i]) / (self.times[i + 1] - self.times[i]))
    }
}

impl Forcing for SeriesForcing {
    fn eval(&self, _domain: &Domain, t: f64) -> VelocityField {
        if self.times.len() == 1 {
            return self.fields[0].clone();
        }
        let (i, s) = self.bracket(t);
        VelocityField::lincomb(1.0 - s, &self.fields[i], s, &self.fields[i + 1])
    }

    fn time_derivative(&self, domain: &Domain, t: f64) -> Option<VelocityField> {
        if !self.derivative {
            return None;
        }
        if self.times.len() == 1 {
            return Some(VelocityField::zeros(domain));
        }
        let (i, _) = self.bracket(t);
        let h = self.times[i + 1] - self.times[i];
        Some(VelocityField::lincomb(1.0 / h, &self.fields[i + 1], -1.0 / h, &self.fields[i]))
    }
}

fn default_true() -> bool {
    true
}
fn default_initial() -> String {
    "smooth".into()
}
fn default_forcing() -> String {
    "zero".into()
}
fn default_amplitude() -> f64 {
    1.0
}
fn default_stride() -> usize {
    10
}
fn default_ratio() -> f64 {
    0.5
}
fn default_pq() -> f64 {
    2.0
}
fn default_mu() -> f64 {
    1.0
}
fn default_theta() -> f64 {
    0.5
}
fn default_h() -> f64 {
    1.0
}
fn default_n() -> usize {
    16
}

/// Flat run description, read from TOML or JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_n")]
    pub nx: usize,
    #[serde(default = "default_n")]
    pub ny: usize,
    #[serde(default = "default_n")]
    pub nz: usize,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub bc: BcVariant,
    /// `zero`, `smooth`, `taylor_green`, `eigenmode`, `rough`, or `file`
    #[serde(default = "default_initial")]
    pub initial: String,
    #[serde(default)]
    pub initial_file: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// size of the initial data (`H^1` norm for `smooth`, peak velocity otherwise)
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// target regularity `theta` of rough data
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// `zero`, `steady`, `harmonic`, or `series`
    #[serde(default = "default_forcing")]
    pub forcing: String,
    #[serde(default)]
    pub forcing_amplitude: f64,
    #[serde(default)]
    pub forcing_omega: f64,
    #[serde(default)]
    pub forcing_files: Vec<String>,
    #[serde(default)]
    pub forcing_times: Vec<f64>,
    #[serde(default)]
    pub forcing_derivative: bool,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// extra snapshots at `t_end * ratio^i`, `i = 1..=geometric_levels`
    #[serde(default)]
    pub geometric_levels: usize,
    #[serde(default = "default_ratio")]
    pub geometric_ratio: f64,
    #[serde(default)]
    pub norms: Vec<String>,
    #[serde(default = "default_pq")]
    pub p: f64,
    #[serde(default = "default_pq")]
    pub q: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nx: 16,
            ny: 16,
            nz: 16,
            h: 1.0,
            bc: BcVariant::Empty,
            initial: default_initial(),
            initial_file: None,
            seed: 0,
            amplitude: 1.0,
            theta: 0.5,
            forcing: default_forcing(),
            forcing_amplitude: 0.0,
            forcing_omega: 0.0,
            forcing_files: Vec::new(),
            forcing_times: Vec::new(),
            forcing_derivative: false,
            dt: 1e-3,
            t_end: 0.1,
            snapshot_stride: 10,
            geometric_levels: 0,
            geometric_ratio: 0.5,
            norms: Vec::new(),
            p: 2.0,
            q: 2.0,
            mu: 1.0,
            nonlinear: true,
        }
    }
}

impl RunConfig {
    pub fn domain_spec(&self) -> DomainSpec {
        DomainSpec::new(self.nx, self.ny, self.nz, self.h, self.bc)
    }

    /// Hard errors for invalid values; returns warnings for flagged-but-allowed combinations.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.domain_spec().validate()?;
        let mut warn = Vec::new();
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.dt > self.t_end {
            return Err(Error::InvalidConfig("dt exceeds t_end".into()));
        }
        if !(self.p > 1.0) || !(self.q > 1.0) {
            return Err(Error::InvalidConfig("p and q must exceed 1".into()));
        }
        if !(self.mu > 1.0 / self.q && self.mu <= 1.0) {
            return Err(Error::InvalidConfig(format!("mu must lie in (1/q, 1], got {}", self.mu)));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig("snapshot_stride must be positive".into()));
        }
        if !(self.geometric_ratio > 0.0 && self.geometric_ratio < 1.0) {
            return Err(Error::InvalidConfig("geometric_ratio must lie in (0, 1)".into()));
        }
        for n in &self.norms {
            n.parse::<NormSpec>()?;
        }
        if 1.0 / self.p + 1.0 / self.q > 1.0 {
            warn.push(format!("1/p + 1/q = {:.3} exceeds 1", 1.0 / self.p + 1.0 / self.q));
        }
        if self.mu < 1.0 / self.p + 1.0 / self.q {
            warn.push(format!("mu = {} is below the critical weight 1/p + 1/q", self.mu));
        }
        match self.initial.as_str() {
            "zero" | "smooth" | "taylor_green" | "eigenmode" | "rough" => {}
            "file" if self.initial_file.is_some() => {}
            "file" => return Err(Error::InvalidConfig("initial = \"file\" needs initial_file".into())),
            other => return Err(Error::InvalidConfig(format!("unknown initial data '{other}'"))),
        }
        match self.forcing.as_str() {
            "zero" | "steady" | "harmonic" => {}
            "series" if !self.forcing_files.is_empty() && self.forcing_files.len() == self.forcing_times.len() => {}
            "series" => return Err(Error::InvalidConfig("series forcing needs matching forcing_files and forcing_times".into())),
            other => return Err(Error::InvalidConfig(format!("unknown forcing '{other}'"))),
        }
        Ok(warn)
    }

    pub fn options(&self) -> Result<RunOptions> {
        let norms = self.norms.iter().map(|n| n.parse()).collect::<Result<Vec<NormSpec>>>()?;
        Ok(RunOptions {
            dt: self.dt,
            t_end: self.t_end,
            snapshot_stride: self.snapshot_stride,
            geometric_levels: self.geometric_levels,
            geometric_ratio: self.geometric_ratio,
            nonlinear: self.nonlinear,
            norms,
            p: self.p,
            q: self.q,
            mu: self.mu,
            keep_fields: true,
        })
    }
}

/// Built-in initial data. `file` sources are resolved by the caller.
pub fn initial_condition(domain: &Domain, cfg: &RunConfig) -> Result<VelocityField> {
    let pr = Projector::new(domain);
    match cfg.initial.as_str() {
        "zero" => Ok(VelocityField::zeros(domain)),
        "smooth" => {
            let mut v = pr.project(&smooth_field(domain, cfg.seed, 1.5))?;
            // drop the uniform translation, which only advects
            for m in 0..domain.nmodes() {
                if domain.lambda(0, m) == 0.0 {
                    for c in 0..2 {
                        let i = v.idx(c, m, 0);
                        v.coeffs_mut()[i] = num_complex::Complex64::default();
                    }
                }
            }
            let h1 = v.sobolev_sq(1.0).sqrt();
            Ok(if h1 > 0.0 { v.scaled(cfg.amplitude / h1) } else { v })
        }
        "taylor_green" => Ok(taylor_green(domain, cfg.amplitude)),
        "eigenmode" => Ok(VelocityField::mode(domain, 0, 0, 1, 1.min(domain.nmodes() - 1), cfg.amplitude)),
        "rough" => Ok(generate_rough_data(domain, cfg.p, cfg.q, cfg.theta, cfg.seed, cfg.amplitude)?.field),
        other => Err(Error::InvalidConfig(format!("initial data '{other}' must be supplied by the caller"))),
    }
}

/// `(sin 2 pi x cos 2 pi y, -cos 2 pi x sin 2 pi y)` times the lowest vertical mode.
pub fn taylor_green(domain: &Domain, amp: f64) -> VelocityField {
    let mut v = VelocityField::zeros(domain);
    let q = 0.25 * amp;
    let i = num_complex::Complex64::new(0.0, 1.0);
    for (kx, ky, sx, sy) in [(1i64, 1i64, 1.0, 1.0), (1, -1, 1.0, -1.0), (-1, 1, -1.0, 1.0), (-1, -1, -1.0, -1.0)] {
        let p = domain.index_of(kx, ky);
        // sin(a)cos(b) = (e^{i(a+b)} + e^{i(a-b)} - c.c.) / 4i
        let a = v.idx(0, 0, p);
        let b = v.idx(1, 0, p);
        v.coeffs_mut()[a] += -i * q * sx;
        v.coeffs_mut()[b] += i * q * sy;
    }
    v
}

/// Integration options independent of where the initial data and forcing come from.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub geometric_levels: usize,
    pub geometric_ratio: f64,
    pub nonlinear: bool,
    pub norms: Vec<NormSpec>,
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    /// store full fields in every snapshot
    pub keep_fields: bool,
}

impl RunOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        RunOptions {
            dt,
            t_end,
            snapshot_stride: 10,
            geometric_levels: 0,
            geometric_ratio: 0.5,
            nonlinear: true,
            norms: Vec::new(),
            p: 2.0,
            q: 2.0,
            mu: 1.0,
            keep_fields: true,
        }
    }

    pub fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }

    /// Steps at which snapshots are taken.
    pub fn schedule(&self) -> Vec<usize> {
        let n = self.steps();
        let mut s: Vec<usize> = (0..=n).step_by(self.snapshot_stride.max(1)).collect();
        s.push(n);
        for i in 1..=self.geometric_levels {
            let k = (n as f64 * self.geometric_ratio.powi(i as i32)).round() as usize;
            if k >= 1 {
                s.push(k);
            }
        }
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Solver state between steps.
#[derive(Clone, Debug)]
pub struct State {
    pub step: usize,
    pub time: f64,
    pub v: VelocityField,
    prev: Option<Explicit>,
}

impl State {
    pub fn new(v: VelocityField) -> Self {
        State { step: 0, time: 0.0, v, prev: None }
    }
}

/// Explicit terms at one time level.
#[derive(Clone, Debug)]
struct Explicit {
    /// `-F(v)`
    adv: VelocityField,
    /// `P f`
    pf: VelocityField,
}

/// Energy bookkeeping for one step.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepInfo {
    /// `2 dt ||grad v^{n+1/2}||^2`
    pub dissipation: f64,
    /// `2 dt <P f_*, v^{n+1/2}>` with the extrapolated forcing actually used
    pub work: f64,
}

/// One-step map `v^n -> v^{n+1}`.
pub struct Stepper {
    domain: Domain,
    op: StokesOperator,
    nl: NonlinearEvaluator,
    proj: Projector,
    forcing: Arc<dyn Forcing>,
    nonlinear: bool,
    dt: f64,
}

impl Stepper {
    pub fn new(domain: &Domain, dt: f64, forcing: Arc<dyn Forcing>, nonlinear: bool) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Ok(Stepper {
            domain: domain.clone(),
            op: StokesOperator::new(domain),
            nl: NonlinearEvaluator::new(domain),
            proj: Projector::new(domain),
            forcing,
            nonlinear,
            dt,
        })
    }

    pub fn operator(&self) -> &StokesOperator {
        &self.op
    }

    pub fn evaluator(&self) -> &NonlinearEvaluator {
        &self.nl
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Raw forcing at `t`, truncated to the mask.
    pub fn forcing_at(&self, t: f64) -> VelocityField {
        let mut f = self.forcing.eval(&self.domain, t);
        f.dealias();
        f
    }

    fn explicit(&self, v: &VelocityField, t: f64) -> Result<Explicit> {
        let adv = if self.nonlinear { self.nl.advect(v, v)?.scaled(-1.0) } else { VelocityField::zeros(&self.domain) };
        let pf = if self.forcing.is_zero() {
            VelocityField::zeros(&self.domain)
        } else {
            self.proj.project(&self.forcing_at(t))?
        };
        Ok(Explicit { adv, pf })
    }

    /// `R(dt A) v + dt S(dt A) n` with the Crank-Nicolson factors.
    fn cn(&self, v: &VelocityField, n: &VelocityField) -> Result<VelocityField> {
        let h = 0.5 * self.dt;
        let mut out = self.op.apply_fn(v, |l| (1.0 - h * l) / (1.0 + h * l))?;
        out.axpy(self.dt, &self.op.apply_fn(n, |l| 1.0 / (1.0 + h * l))?);
        Ok(out)
    }

    /// Advance one step; the state must be solenoidal and inside the dealiasing mask.
    pub fn step(&self, state: &mut State) -> Result<StepInfo> {
        let t = state.time;
        let cur = self.explicit(&state.v, t)?;
        let (nstar, fstar) = match &state.prev {
            None => {
                let mut n0 = cur.adv.clone();
                n0.axpy(1.0, &cur.pf);
                let pred = self.cn(&state.v, &n0)?;
                let e1 = self.explicit(&pred, t + self.dt)?;
                let adv = VelocityField::lincomb(0.5, &cur.adv, 0.5, &e1.adv);
                let pf = VelocityField::lincomb(0.5, &cur.pf, 0.5, &e1.pf);
                (adv, pf)
            }
            Some(prev) => (
                VelocityField::lincomb(1.5, &cur.adv, -0.5, &prev.adv),
                VelocityField::lincomb(1.5, &cur.pf, -0.5, &prev.pf),
            ),
        };
        let mut n = nstar;
        n.axpy(1.0, &fstar);
        let next = self.cn(&state.v, &n)?;
        let time = (state.step + 1) as f64 * self.dt;
        let norm = next.norm_l2();
        if !next.is_finite() || !norm.is_finite() || norm > BLOWUP_NORM {
            return Err(Error::Blowup { time });
        }
        let mid = VelocityField::lincomb(0.5, &state.v, 0.5, &next);
        let info = StepInfo { dissipation: 2.0 * self.dt * mid.norm_grad().powi(2), work: 2.0 * self.dt * fstar.dot(&mid) };
        state.v = next;
        state.prev = Some(cur);
        state.step += 1;
        state.time = time;
        Ok(info)
    }

    /// Equation-based `v_t = A v - F(v) + P f`, the raw advection and the recovered pressure.
    pub fn evaluate(&self, v: &VelocityField, t: f64) -> Result<(VelocityField, VelocityField, SurfaceField)> {
        let raw = if self.nonlinear { self.nl.advect_raw(v, v)? } else { VelocityField::zeros(&self.domain) };
        let f = self.forcing_at(t);
        let mut vt = self.op.apply_fn(v, |l| -l)?;
        let mut adv = raw.clone();
        self.proj.project_in_place(&mut adv);
        vt.axpy(-1.0, &adv);
        vt.axpy(1.0, &self.proj.project(&f)?);
        // the pressure gradient is what the projection strips from Delta v - B(v) + f
        let mut r = laplacian(v)?;
        r.axpy(-1.0, &raw);
        r.axpy(1.0, &f);
        let pi = recover_surface_pressure(&r)?;
        Ok((vt, raw, pi))
    }
}

/// Stored state at one snapshot time.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub v: VelocityField,
    /// `v_t` from the equation
    pub vt: VelocityField,
    /// `v_t` by second-order finite differences of the discrete trajectory
    pub vt_fd: VelocityField,
    pub pressure: SurfaceField,
    /// raw forcing (masked)
    pub forcing: VelocityField,
    pub forcing_dt: Option<VelocityField>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForcingKind {
    Zero,
    TimeDependent { derivative: bool },
}

/// Diagnostics and snapshots of one run.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub domain: Domain,
    pub dt: f64,
    pub t_end: f64,
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    pub nonlinear: bool,
    pub forcing: ForcingKind,
    /// first column is `time`
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub energy0: f64,
    pub warnings: Vec<String>,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Energy-equality residual at the final time.
    pub fn final_energy_residual(&self) -> f64 {
        self.column("energy_residual").and_then(|c| c.last().copied()).unwrap_or(f64::NAN)
    }
}

const BASE_COLUMNS: [&str; 8] = ["energy", "dissipation", "work", "energy_residual", "grad_l2", "av_l2", "vt_l2", "vt_fd_l2"];

/// Run from a config using built-in initial data and forcing.
pub fn run(cfg: &RunConfig) -> Result<TrajectoryRecord> {
    let warnings = cfg.validate()?;
    let domain = Domain::new(cfg.domain_spec())?;
    let v0 = initial_condition(&domain, cfg)?;
    let forcing = builtin_forcing(&domain, cfg)?;
    let mut rec = run_with_initial(&domain, v0, forcing, &cfg.options()?)?;
    rec.warnings.extend(warnings);
    Ok(rec)
}

/// Built-in forcing presets (`series` must be assembled by the caller).
pub fn builtin_forcing(domain: &Domain, cfg: &RunConfig) -> Result<Arc<dyn Forcing>> {
    let shape = || {
        let f = smooth_field(domain, cfg.seed.wrapping_add(1000), 1.5);
        let n = f.norm_l2();
        if n > 0.0 {
            f.scaled(cfg.forcing_amplitude / n)
        } else {
            f
        }
    };
    match cfg.forcing.as_str() {
        "zero" => Ok(Arc::new(ZeroForcing)),
        "steady" => Ok(Arc::new(SteadyForcing(shape()))),
        "harmonic" => Ok(Arc::new(HarmonicForcing { field: shape(), omega: cfg.forcing_omega })),
        other => Err(Error::InvalidConfig(format!("forcing '{other}' must be supplied by the caller"))),
    }
}

/// Integrate from `v0`, which is projected and truncated to the dealiasing mask first.
pub fn run_with_initial(domain: &Domain, v0: VelocityField, forcing: Arc<dyn Forcing>, opts: &RunOptions) -> Result<TrajectoryRecord> {
    if v0.domain() != domain {
        return Err(Error::DimensionMismatch("initial data lives on another domain".into()));
    }
    for n in &opts.norms {
        n.validate()?;
    }
    let kind = if forcing.is_zero() {
        ForcingKind::Zero
    } else {
        ForcingKind::TimeDependent { derivative: forcing.time_derivative(domain, 0.0).is_some() }
    };
    let stepper = Stepper::new(domain, opts.dt, forcing.clone(), opts.nonlinear)?;
    let mut v = Projector::new(domain).project(&v0)?;
    v.dealias();
    let nsteps = opts.steps();
    let schedule = opts.schedule();
    let wanted = |k: usize| schedule.binary_search(&k).is_ok();

    let mut columns: Vec<String> = std::iter::once("time".to_string()).chain(BASE_COLUMNS.iter().map(|s| s.to_string())).collect();
    for n in &opts.norms {
        columns.push(n.label());
    }
    for n in &opts.norms {
        if n.family != NormFamily::TimeWeighted {
            columns.push(format!("int[{}]", n.label()));
        }
    }
    let mut rec = TrajectoryRecord {
        domain: domain.clone(),
        dt: opts.dt,
        t_end: nsteps as f64 * opts.dt,
        p: opts.p,
        q: opts.q,
        mu: opts.mu,
        nonlinear: opts.nonlinear,
        forcing: kind,
        columns,
        rows: Vec::new(),
        snapshots: Vec::new(),
        energy0: v.norm_l2().powi(2),
        warnings: Vec::new(),
    };

    let mut state = State::new(v);
    let mut window: Vec<VelocityField> = vec![state.v.clone()];
    let (mut diss, mut work) = (vec![0.0], vec![0.0]);
    let mut acc: Vec<f64> = vec![0.0; opts.norms.len()];
    let mut last: Option<(f64, Vec<f64>)> = None;

    let mut record = |rec: &mut TrajectoryRecord, k: usize, v: &VelocityField, vt_fd: VelocityField, d: f64, w: f64| -> Result<()> {
        let t = k as f64 * opts.dt;
        let (vt, _raw, pressure) = stepper.evaluate(v, t)?;
        let e = v.norm_l2().powi(2);
        let av = stepper.operator().norm_av(v)?;
        let mut row = vec![t, e, d, w, e + d - w - rec.energy0, v.norm_grad(), av, vt.norm_l2(), vt_fd.norm_l2()];
        let mut vals = Vec::new();
        for n in &opts.norms {
            let val = if n.family == NormFamily::TimeWeighted {
                // running q-th root of the weighted integral is filled in below
                f64::NAN
            } else {
                norm(v, n)?
            };
            vals.push(val);
        }
        // trapezoid accumulation of t^{(1-mu) q} ||.||^q
        let weight = |t: f64, g: f64| t.powf((1.0 - opts.mu) * opts.q) * g.powf(opts.q);
        if let Some((t0, prev)) = &last {
            for (i, (a, b)) in prev.iter().zip(&vals).enumerate() {
                if a.is_finite() && b.is_finite() {
                    acc[i] += 0.5 * (t - t0) * (weight(*t0, *a) + weight(t, *b));
                }
            }
        }
        for (i, n) in opts.norms.iter().enumerate() {
            if n.family == NormFamily::TimeWeighted {
                vals[i] = 0.0;
            }
        }
        let sob: Vec<f64> = opts
            .norms
            .iter()
            .map(|n| if n.family == NormFamily::TimeWeighted { v.sobolev_sq(n.s).sqrt() } else { 0.0 })
            .collect();
        for (i, n) in opts.norms.iter().enumerate() {
            if n.family == NormFamily::TimeWeighted {
                let g = sob[i];
                if let Some((t0, _)) = &last {
                    let prev_g = rec.snapshots.last().map(|s| s.v.sobolev_sq(n.s).sqrt()).unwrap_or(0.0);
                    let wq = |t: f64, g: f64| t.powf((1.0 - n.mu) * n.q) * g.powf(n.q);
                    acc[i] += 0.5 * (t - t0) * (wq(*t0, prev_g) + wq(t, g));
                }
                vals[i] = acc[i].powf(1.0 / n.q);
            }
        }
        row.extend(vals.iter().copied());
        for (i, n) in opts.norms.iter().enumerate() {
            if n.family != NormFamily::TimeWeighted {
                row.push(acc[i]);
            }
        }
        last = Some((t, vals));
        rec.rows.push(row);
        let forcing_dt = forcing.time_derivative(domain, t).map(|mut f| {
            f.dealias();
            f
        });
        rec.snapshots.push(Snapshot {
            step: k,
            time: t,
            v: v.clone(),
            vt,
            vt_fd,
            pressure,
            forcing: stepper.forcing_at(t),
            forcing_dt,
        });
        Ok(())
    };

    let inv = 1.0 / (2.0 * opts.dt);
    let mut pending_first = wanted(0);
    if nsteps == 1 {
        let info = stepper.step(&mut state)?;
        diss.push(info.dissipation);
        work.push(info.work);
        let fd = VelocityField::lincomb(1.0 / opts.dt, &state.v, -1.0 / opts.dt, &window[0]);
        record(&mut rec, 0, &window[0], fd.clone(), 0.0, 0.0)?;
        record(&mut rec, 1, &state.v, fd, info.dissipation, info.work)?;
        finish(&mut rec, opts);
        return Ok(rec);
    }
    for i in 0..nsteps {
        let info = stepper.step(&mut state)?;
        diss.push(diss[i] + info.dissipation);
        work.push(work[i] + info.work);
        window.push(state.v.clone());
        if window.len() > 3 {
            window.remove(0);
        }
        // window holds v^{i-1}, v^i, v^{i+1} (or v^0, v^1 after the first step)
        if i == 1 && pending_first {
            let fd = VelocityField::lincomb(-3.0 * inv, &window[0], 4.0 * inv, &window[1]);
            let fd = VelocityField::lincomb(1.0, &fd, -inv, &window[2]);
            record(&mut rec, 0, &window[0].clone(), fd, 0.0, 0.0)?;
            pending_first = false;
        }
        if i >= 1 && wanted(i) {
            let fd = VelocityField::lincomb(inv, &window[2], -inv, &window[0]);
            record(&mut rec, i, &window[1].clone(), fd, diss[i], work[i])?;
        }
    }
    if wanted(nsteps) {
        let n = window.len();
        let fd = VelocityField::lincomb(3.0 * inv, &window[n - 1], -4.0 * inv, &window[n - 2]);
        let fd = VelocityField::lincomb(1.0, &fd, inv, &window[n - 3]);
        record(&mut rec, nsteps, &state.v.clone(), fd, diss[nsteps], work[nsteps])?;
    }
    finish(&mut rec, opts);
    Ok(rec)
}

fn finish(rec: &mut TrajectoryRecord, opts: &RunOptions) {
    if !opts.keep_fields {
        rec.snapshots.clear();
    }
}
