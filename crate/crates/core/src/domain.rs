//! Cylinder geometry `(0,1)^2 x (-h,0)`, vertical bases, collocation grids and transforms.
//!
//! Horizontal directions are periodic and handled by complex FFTs; the vertical direction
//! uses a trigonometric basis chosen per boundary-condition variant. Spectral data is stored
//! as `((comp * M + m) * ny + iy) * nx + ix`, grid data as `((comp * nz + j) * ny + iy) * nx + ix`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DMatrixView};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which parts of the top/bottom boundary carry Dirichlet conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BcVariant {
    /// Neumann on top and bottom.
    #[default]
    #[serde(alias = "neumann")]
    Empty,
    /// Dirichlet on the surface `z = 0`, Neumann at the bottom.
    Upper,
    /// Dirichlet at the bottom `z = -h`, Neumann on the surface.
    Bottom,
    /// Dirichlet on both.
    #[serde(alias = "dirichlet")]
    Both,
}

impl BcVariant {
    pub const ALL: [BcVariant; 4] = [BcVariant::Empty, BcVariant::Upper, BcVariant::Bottom, BcVariant::Both];

    pub fn has_dirichlet(self) -> bool {
        self != BcVariant::Empty
    }

    pub fn name(self) -> &'static str {
        match self {
            BcVariant::Empty => "neumann",
            BcVariant::Upper => "upper",
            BcVariant::Bottom => "bottom",
            BcVariant::Both => "both",
        }
    }
}

impl fmt::Display for BcVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BcVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "empty" | "neumann" | "none" => Ok(BcVariant::Empty),
            "upper" | "top" | "surface" => Ok(BcVariant::Upper),
            "bottom" => Ok(BcVariant::Bottom),
            "both" | "dirichlet" => Ok(BcVariant::Both),
            other => Err(Error::InvalidArgument(format!("unknown boundary variant '{other}'"))),
        }
    }
}

/// Geometry and resolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub lx: f64,
    pub ly: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub bc: BcVariant,
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec { lx: 1.0, ly: 1.0, h: 1.0, nx: 16, ny: 16, nz: 16, bc: BcVariant::Empty }
    }
}

impl DomainSpec {
    pub fn new(nx: usize, ny: usize, nz: usize, h: f64, bc: BcVariant) -> Self {
        DomainSpec { lx: 1.0, ly: 1.0, h, nx, ny, nz, bc }
    }

    /// `n x n x n` grid with unit depth.
    pub fn cube(n: usize, bc: BcVariant) -> Self {
        DomainSpec::new(n, n, n, 1.0, bc)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx % 2 != 0 || self.ny % 2 != 0 {
            return Err(Error::InvalidDomain(format!("nx, ny must be even (got {}x{})", self.nx, self.ny)));
        }
        if self.nx < 4 || self.ny < 4 {
            return Err(Error::InvalidDomain("nx, ny must be at least 4".into()));
        }
        if self.nz < 4 {
            return Err(Error::InvalidDomain(format!("nz must be at least 4 (got {})", self.nz)));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidDomain(format!("depth must be positive (got {})", self.h)));
        }
        if self.lx != 1.0 || self.ly != 1.0 {
            return Err(Error::InvalidDomain("horizontal periods are fixed to 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

impl Trig {
    fn swap(self) -> Trig {
        match self {
            Trig::Cos => Trig::Sin,
            Trig::Sin => Trig::Cos,
        }
    }

    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos => x.cos(),
            Trig::Sin => x.sin(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFamily {
    CosineNeumann,
    SineDirichlet,
    QuarterWaveMixed { dirichlet_top: bool },
}

/// Vertical basis in `zeta = z + h`: `cos(kappa zeta)` or `sin(kappa zeta)`.
///
/// The dual basis (`d/dz` of the primal) swaps cos and sin with the same `kappa`.
#[derive(Clone, Debug)]
pub struct VerticalBasis {
    pub family: BasisFamily,
    pub h: f64,
    kind: Trig,
    kappa: Vec<f64>,
    label: Vec<usize>,
    mean: Vec<f64>,
    norm: Vec<f64>,
    dual_norm: Vec<f64>,
}

impl VerticalBasis {
    pub fn new(bc: BcVariant, h: f64, n: usize) -> Self {
        let (family, kind, shift, first) = match bc {
            BcVariant::Empty => (BasisFamily::CosineNeumann, Trig::Cos, 0.0, 0),
            BcVariant::Both => (BasisFamily::SineDirichlet, Trig::Sin, 0.0, 1),
            BcVariant::Upper => (BasisFamily::QuarterWaveMixed { dirichlet_top: true }, Trig::Cos, 0.5, 0),
            BcVariant::Bottom => (BasisFamily::QuarterWaveMixed { dirichlet_top: false }, Trig::Sin, 0.5, 0),
        };
        let label: Vec<usize> = (first..first + n).collect();
        let kappa: Vec<f64> = label.iter().map(|&m| (m as f64 + shift) * PI / h).collect();
        // exact means, written so that vanishing means are exactly zero
        let mean = label
            .iter()
            .map(|&m| match bc {
                BcVariant::Empty => {
                    if m == 0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                BcVariant::Both => {
                    if m % 2 == 1 {
                        2.0 / (m as f64 * PI)
                    } else {
                        0.0
                    }
                }
                BcVariant::Upper => {
                    let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                    s / ((m as f64 + 0.5) * PI)
                }
                BcVariant::Bottom => 1.0 / ((m as f64 + 0.5) * PI),
            })
            .collect();
        let norm = kappa.iter().map(|&k| if k == 0.0 { h } else { 0.5 * h }).collect();
        let dual_norm = kappa.iter().map(|&k| if k == 0.0 { 0.0 } else { 0.5 * h }).collect();
        VerticalBasis { family, h, kind, kappa, label, mean, norm, dual_norm }
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn kind(&self) -> Trig {
        self.kind
    }

    pub fn dual_kind(&self) -> Trig {
        self.kind.swap()
    }

    /// Vertical wavenumber of mode `i`.
    pub fn kappa(&self, i: usize) -> f64 {
        self.kappa[i]
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappa
    }

    /// Conventional mode label (`m` in `cos(m pi zeta / h)` etc).
    pub fn label(&self, i: usize) -> usize {
        self.label[i]
    }

    /// `(1/h) int phi_i dz`.
    pub fn mean(&self, i: usize) -> f64 {
        self.mean[i]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    /// `int phi_i^2 dz`.
    pub fn norm(&self, i: usize) -> f64 {
        self.norm[i]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norm
    }

    /// `int psi_i^2 dz` for the dual function `psi_i`.
    pub fn dual_norm(&self, i: usize) -> f64 {
        self.dual_norm[i]
    }

    pub fn value(&self, i: usize, z: f64) -> f64 {
        self.kind.eval(self.kappa[i] * (z + self.h))
    }

    pub fn dual_value(&self, i: usize, z: f64) -> f64 {
        self.kind.swap().eval(self.kappa[i] * (z + self.h))
    }

    /// `d/dz phi_i = derivative_factor(i) * psi_i`.
    pub fn derivative_factor(&self, i: usize) -> f64 {
        match self.kind {
            Trig::Cos => -self.kappa[i],
            Trig::Sin => self.kappa[i],
        }
    }

    /// `int_{-h}^{z} phi_i`, in closed form.
    pub fn antiderivative(&self, i: usize, z: f64) -> f64 {
        let k = self.kappa[i];
        let zeta = z + self.h;
        if k == 0.0 {
            return zeta;
        }
        match self.kind {
            Trig::Cos => (k * zeta).sin() / k,
            Trig::Sin => (1.0 - (k * zeta).cos()) / k,
        }
    }
}

/// Collocation nodes: uniform periodic in x, y and half-offset uniform in z.
#[derive(Clone, Debug)]
pub struct Grid {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// z quadrature weights (`h / nz` each).
    pub wz: Vec<f64>,
    /// area of one horizontal cell.
    pub wxy: f64,
}

impl Grid {
    fn new(spec: &DomainSpec) -> Self {
        let dz = spec.h / spec.nz as f64;
        Grid {
            x: (0..spec.nx).map(|i| i as f64 / spec.nx as f64).collect(),
            y: (0..spec.ny).map(|i| i as f64 / spec.ny as f64).collect(),
            z: (0..spec.nz).map(|j| -spec.h + (j as f64 + 0.5) * dz).collect(),
            wz: vec![dz; spec.nz],
            wxy: 1.0 / (spec.nx * spec.ny) as f64,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Number of Gauss-Legendre levels used to evaluate cubic products of `nz` vertical modes.
pub fn product_levels(nz: usize) -> usize {
    (0.75 * PI * nz as f64).ceil() as usize + 24
}

/// Which vertical table to synthesize with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Levels {
    /// primal basis at the collocation grid
    Grid,
    /// dual basis at the collocation grid
    GridDual,
    /// antiderivative of the primal basis at the collocation grid
    GridAnti,
    /// primal basis at the product quadrature nodes
    Quad,
    QuadDual,
    QuadAnti,
}

struct Inner {
    spec: DomainSpec,
    basis: VerticalBasis,
    grid: Grid,
    quad_z: Vec<f64>,
    quad_w: Vec<f64>,
    kmax_x: usize,
    kmax_y: usize,
    fx: Arc<dyn Fft<f64>>,
    fx_inv: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    fy_inv: Arc<dyn Fft<f64>>,
    // transposed tables (levels_in x levels_out), applied as X * T
    synth: [DMatrix<f64>; 6],
    grid_analysis: DMatrix<f64>,
    quad_analysis: DMatrix<f64>,
    quad_dual_analysis: DMatrix<f64>,
}

/// Immutable, cheaply cloneable domain with grids and transform plans.
#[derive(Clone)]
pub struct Domain(Arc<Inner>);

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain").field("spec", &self.0.spec).finish()
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

fn table(nodes: &[f64], m: usize, f: impl Fn(usize, f64) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(m, nodes.len(), |i, j| f(i, nodes[j]))
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        spec.validate()?;
        let basis = VerticalBasis::new(spec.bc, spec.h, spec.nz);
        let grid = Grid::new(&spec);
        let nq = product_levels(spec.nz);
        let (gx, gw) = gauss_legendre(nq);
        let quad_z: Vec<f64> = gx.iter().map(|&t| -spec.h + 0.5 * spec.h * (t + 1.0)).collect();
        let quad_w: Vec<f64> = gw.iter().map(|&w| 0.5 * spec.h * w).collect();
        let m = basis.len();
        let b = &basis;
        let synth = [
            table(&grid.z, m, |i, z| b.value(i, z)),
            table(&grid.z, m, |i, z| b.dual_value(i, z)),
            table(&grid.z, m, |i, z| b.antiderivative(i, z)),
            table(&quad_z, m, |i, z| b.value(i, z)),
            table(&quad_z, m, |i, z| b.dual_value(i, z)),
            table(&quad_z, m, |i, z| b.antiderivative(i, z)),
        ];
        // the primal columns are orthogonal on the midpoint grid, so the inverse is a scaled transpose
        let colnorm: Vec<f64> =
            (0..m).map(|i| grid.z.iter().map(|&z| b.value(i, z).powi(2)).sum::<f64>()).collect();
        let grid_analysis = DMatrix::from_fn(grid.z.len(), m, |j, i| b.value(i, grid.z[j]) / colnorm[i]);
        let quad_analysis =
            DMatrix::from_fn(quad_z.len(), m, |q, i| quad_w[q] * b.value(i, quad_z[q]) / b.norm(i));
        let quad_dual_analysis =
            DMatrix::from_fn(quad_z.len(), m, |q, i| quad_w[q] * b.dual_value(i, quad_z[q]) / b.norm(i));
        let mut planner = FftPlanner::new();
        let inner = Inner {
            fx: planner.plan_fft_forward(spec.nx),
            fx_inv: planner.plan_fft_inverse(spec.nx),
            fy: planner.plan_fft_forward(spec.ny),
            fy_inv: planner.plan_fft_inverse(spec.ny),
            kmax_x: spec.nx.div_ceil(3) - 1,
            kmax_y: spec.ny.div_ceil(3) - 1,
            spec,
            basis,
            grid,
            quad_z,
            quad_w,
            synth,
            grid_analysis,
            quad_analysis,
            quad_dual_analysis,
        };
        Ok(Domain(Arc::new(inner)))
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.0.spec
    }

    pub fn basis(&self) -> &VerticalBasis {
        &self.0.basis
    }

    pub fn grid(&self) -> &Grid {
        &self.0.grid
    }

    pub fn bc(&self) -> BcVariant {
        self.0.spec.bc
    }

    pub fn h(&self) -> f64 {
        self.0.spec.h
    }

    pub fn nx(&self) -> usize {
        self.0.spec.nx
    }

    pub fn ny(&self) -> usize {
        self.0.spec.ny
    }

    pub fn nz(&self) -> usize {
        self.0.spec.nz
    }

    /// Number of vertical modes.
    pub fn nmodes(&self) -> usize {
        self.0.basis.len()
    }

    pub fn plane(&self) -> usize {
        self.0.spec.nx * self.0.spec.ny
    }

    /// Length of a two-component spectral array.
    pub fn spectral_len(&self) -> usize {
        2 * self.nmodes() * self.plane()
    }

    /// Length of a two-component grid array.
    pub fn grid_len(&self) -> usize {
        2 * self.nz() * self.plane()
    }

    pub fn quad_nodes(&self) -> &[f64] {
        &self.0.quad_z
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.0.quad_w
    }

    pub fn nquad(&self) -> usize {
        self.0.quad_z.len()
    }

    /// Signed integer wavenumber of FFT index `i` out of `n` (Nyquist maps to `+n/2`).
    pub fn wavenumber(i: usize, n: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Integer wavenumber pair of a flat horizontal index.
    pub fn k_of(&self, p: usize) -> (i64, i64) {
        let nx = self.nx();
        (Self::wavenumber(p % nx, nx), Self::wavenumber(p / nx, self.ny()))
    }

    /// Flat horizontal index of an integer wavenumber pair.
    pub fn index_of(&self, kx: i64, ky: i64) -> usize {
        let (nx, ny) = (self.nx() as i64, self.ny() as i64);
        (ky.rem_euclid(ny) * nx + kx.rem_euclid(nx)) as usize
    }

    /// False on the Nyquist lines, which are never populated.
    pub fn retained(&self, p: usize) -> bool {
        let (nx, ny) = (self.nx(), self.ny());
        p % nx != nx / 2 && p / nx != ny / 2
    }

    /// 2/3-rule dealiasing mask.
    pub fn in_mask(&self, p: usize) -> bool {
        let (kx, ky) = self.k_of(p);
        kx.unsigned_abs() as usize <= self.0.kmax_x && ky.unsigned_abs() as usize <= self.0.kmax_y
    }

    pub fn dealias_limits(&self) -> (usize, usize) {
        (self.0.kmax_x, self.0.kmax_y)
    }

    /// `4 pi^2 |k|^2` for a flat horizontal index.
    pub fn k2(&self, p: usize) -> f64 {
        let (kx, ky) = self.k_of(p);
        4.0 * PI * PI * (kx * kx + ky * ky) as f64
    }

    /// Stokes symbol `lambda(k, m) = 4 pi^2 |k|^2 + kappa_m^2`.
    pub fn lambda(&self, p: usize, m: usize) -> f64 {
        self.k2(p) + self.0.basis.kappa(m).powi(2)
    }

    fn fft2(&self, buf: &mut [Complex64], col: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>, inverse: bool) {
        let (nx, ny) = (self.nx(), self.ny());
        let (fx, fy) = if inverse { (&self.0.fx_inv, &self.0.fy_inv) } else { (&self.0.fx, &self.0.fy) };
        let need = fx.get_inplace_scratch_len().max(fy.get_inplace_scratch_len());
        if scratch.len() < need {
            scratch.resize(need, Complex64::default());
        }
        fx.process_with_scratch(buf, scratch);
        col.resize(ny, Complex64::default());
        for ix in 0..nx {
            for iy in 0..ny {
                col[iy] = buf[iy * nx + ix];
            }
            fy.process_with_scratch(col, scratch);
            for iy in 0..ny {
                buf[iy * nx + ix] = col[iy];
            }
        }
    }

    /// Forward 2D FFT of real planes, normalized so that `u = sum c_k e^{2 pi i k.x}`; Nyquist lines zeroed.
    pub fn planes_forward(&self, real: &[f64]) -> Vec<Complex64> {
        let plane = self.plane();
        let scale = 1.0 / plane as f64;
        let mut out = vec![Complex64::default(); real.len()];
        out.par_chunks_mut(plane).zip(real.par_chunks(plane)).for_each_init(
            || (Vec::new(), Vec::new()),
            |(col, scratch), (o, r)| {
                for (a, &b) in o.iter_mut().zip(r) {
                    *a = Complex64::new(b, 0.0);
                }
                self.fft2(o, col, scratch, false);
                for (p, a) in o.iter_mut().enumerate() {
                    *a = if self.retained(p) { *a * scale } else { Complex64::default() };
                }
            },
        );
        out
    }

    /// Inverse of [`Domain::planes_forward`], returning the real part.
    pub fn planes_inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let plane = self.plane();
        let mut out = vec![0.0; spec.len()];
        out.par_chunks_mut(plane).zip(spec.par_chunks(plane)).for_each_init(
            || (Vec::new(), Vec::new(), Vec::new()),
            |(buf, col, scratch), (o, s)| {
                buf.clear();
                buf.extend_from_slice(s);
                self.fft2(buf, col, scratch, true);
                for (a, b) in o.iter_mut().zip(buf.iter()) {
                    *a = b.re;
                }
            },
        );
        out
    }

    /// Apply a vertical table: `input` holds `blocks` stacks of `lin` planes, output has `lout` planes per block.
    fn vertical(&self, t: &DMatrix<f64>, input: &[f64], blocks: usize) -> Vec<f64> {
        let plane = self.plane();
        let (lin, lout) = (t.nrows(), t.ncols());
        debug_assert_eq!(input.len(), blocks * lin * plane);
        let mut out = Vec::with_capacity(blocks * lout * plane);
        for b in 0..blocks {
            let x = DMatrixView::from_slice(&input[b * lin * plane..(b + 1) * lin * plane], plane, lin);
            let y = x * t;
            out.extend_from_slice(y.as_slice());
        }
        out
    }

    fn check(&self, len: usize, per_comp: usize, what: &str) -> Result<usize> {
        if per_comp == 0 || len % per_comp != 0 {
            return Err(Error::DimensionMismatch(format!("{what}: length {len} is not a multiple of {per_comp}")));
        }
        Ok(len / per_comp)
    }

    /// Grid values (`comps` stacked) to spectral coefficients in the primal basis.
    pub fn to_spectral(&self, grid: &[f64]) -> Result<Vec<Complex64>> {
        let comps = self.check(grid.len(), self.nz() * self.plane(), "to_spectral")?;
        let levels = self.vertical(&self.0.grid_analysis, grid, comps);
        Ok(self.planes_forward(&levels))
    }

    /// Spectral coefficients to values on the chosen vertical levels.
    pub fn synthesize(&self, spec: &[Complex64], levels: Levels) -> Result<Vec<f64>> {
        let comps = self.check(spec.len(), self.nmodes() * self.plane(), "synthesize")?;
        let t = match levels {
            Levels::Grid => &self.0.synth[0],
            Levels::GridDual => &self.0.synth[1],
            Levels::GridAnti => &self.0.synth[2],
            Levels::Quad => &self.0.synth[3],
            Levels::QuadDual => &self.0.synth[4],
            Levels::QuadAnti => &self.0.synth[5],
        };
        let planes = self.planes_inverse(spec);
        Ok(self.vertical(t, &planes, comps))
    }

    /// Primal-basis synthesis on the collocation grid.
    pub fn from_spectral(&self, spec: &[Complex64]) -> Result<Vec<f64>> {
        self.synthesize(spec, Levels::Grid)
    }

    /// Galerkin projection of values at the quadrature nodes onto the primal basis.
    pub fn project_quad(&self, values: &[f64]) -> Result<Vec<Complex64>> {
        let comps = self.check(values.len(), self.nquad() * self.plane(), "project_quad")?;
        let levels = self.vertical(&self.0.quad_analysis, values, comps);
        Ok(self.planes_forward(&levels))
    }

    /// `<g, psi_m> / n_m` for values at the quadrature nodes (`psi_m` the dual functions).
    pub fn project_quad_dual(&self, values: &[f64]) -> Result<Vec<Complex64>> {
        let comps = self.check(values.len(), self.nquad() * self.plane(), "project_quad_dual")?;
        let levels = self.vertical(&self.0.quad_dual_analysis, values, comps);
        Ok(self.planes_forward(&levels))
    }
}
