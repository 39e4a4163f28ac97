use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use hydro_core::analysis::{analyticity_radius, apriori_ledger, generate_rough_data, norm, NormSpec};
use hydro_core::hydrostatic::{spectrum, Projector};
use hydro_core::stepper::{builtin_forcing, initial_condition, run_with_initial, Forcing, RunConfig, SeriesForcing};
use hydro_core::verify::{run_suite, Suite, SuiteReport};
use hydro_core::{BcVariant, Domain, DomainSpec};

use crate::config::{load_config, ConfigError};
use crate::io::{append_diag, csv_table, format_value, read_field, write_field, IoError};

#[derive(Debug, Parser)]
#[command(name = "hydro", version, about = "Pseudo-spectral primitive equations: runs, spectra, norms and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a configured run; writes diagnostics.csv, ledger.csv, radius.csv, summary.json and snapshots.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// skip writing field snapshots
        #[arg(long)]
        no_snapshots: bool,
    },
    /// Smallest eigenvalues of the hydrostatic Stokes operator.
    Spectrum {
        #[arg(long, default_value = "neumann")]
        bc: String,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// directory for spectrum.csv; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the hydrostatic Helmholtz projection to a snapshot.
    Project { input: PathBuf, output: PathBuf },
    /// Evaluate norms of a snapshot: lp:P, sobolev:S, besov:S,P,Q.
    Norms {
        input: PathBuf,
        #[arg(required = true)]
        specs: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite; exits nonzero if any check fails.
    Verify {
        /// suite name, or `all`
        suite: String,
        #[arg(long, default_value_t = 16)]
        res: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded rough initial data for the critical Besov class `B^{2/p}_{pq}`; writes rough.bin and rough.json.
    Roughdata {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        res: usize,
        #[arg(long, default_value = "neumann")]
        bc: String,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] hydro_core::Error),
    #[error("{0}")]
    Argument(String),
    #[error("{0}")]
    Output(String),
    #[error("suite {0} failed: {1}")]
    Verification(String, String),
}

impl CliError {
    /// Stable token for the one-line error report.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(ConfigError::NotFound(_)) => "config_not_found",
            CliError::Config(_) => "bad_config",
            CliError::Io(_) => "io",
            CliError::Core(hydro_core::Error::InvalidConfig(_)) => "bad_config",
            CliError::Core(hydro_core::Error::Blowup { .. }) => "blowup",
            CliError::Core(_) => "solver",
            CliError::Argument(_) => "bad_argument",
            CliError::Output(_) => "io",
            CliError::Verification(..) => "verification_failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(..) => 3,
            CliError::Argument(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn out_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Output(format!("{}: {e}", path.display()))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(out_err(dir))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(out_err(path))
}

fn parse_bc(s: &str) -> CliResult<BcVariant> {
    s.parse().map_err(|e: hydro_core::Error| CliError::Argument(e.to_string()))
}

/// Runs `cmd` and returns what should go to stdout.
pub fn execute(cmd: Command) -> CliResult<String> {
    match cmd {
        Command::Run { config, out, no_snapshots } => run(&config, &out, !no_snapshots),
        Command::Spectrum { bc, h, count, out } => {
            let bc = parse_bc(&bc)?;
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Argument(format!("depth must be positive, got {h}")));
            }
            if count == 0 {
                return Err(CliError::Argument("count must be positive".into()));
            }
            let rep = spectrum(bc, h, count)?;
            let mut rows = Vec::new();
            for e in &rep.entries {
                for _ in 0..e.multiplicity {
                    if rows.len() < count {
                        rows.push(vec![rows.len().to_string(), format_value(e.eigenvalue), e.kx.to_string(), e.ky.to_string(), e.m.to_string()]);
                    }
                }
            }
            let text = csv_table(&["index", "eigenvalue", "kx", "ky", "m"], rows);
            emit(out.as_deref(), "spectrum.csv", text)
        }
        Command::Project { input, output } => {
            let (h, v) = read_field(&input)?;
            let pv = Projector::new(v.domain()).project(&v)?;
            write_field(&output, &pv, h.time, h.dt)?;
            Ok(String::new())
        }
        Command::Norms { input, specs, out } => {
            let specs = specs
                .iter()
                .map(|s| s.parse::<NormSpec>().map_err(|e| CliError::Argument(e.to_string())))
                .collect::<CliResult<Vec<_>>>()?;
            if let Some(tw) = specs.iter().find(|s| s.family == hydro_core::analysis::NormFamily::TimeWeighted) {
                return Err(CliError::Argument(format!("{tw} needs a trajectory; list it under `norms` in a run config")));
            }
            let (_, v) = read_field(&input)?;
            let rows = specs.iter().map(|s| Ok(vec![s.label(), format_value(norm(&v, s)?)])).collect::<CliResult<Vec<_>>>()?;
            emit(out.as_deref(), "norms.csv", csv_table(&["norm", "value"], rows))
        }
        Command::Verify { suite, res, seed, out } => verify(&suite, res, seed, out.as_deref()),
        Command::Roughdata { p, q, theta, seed, out, res, bc, amplitude } => {
            let bc = parse_bc(&bc)?;
            let spec = DomainSpec::new(res, res, res, 1.0, bc);
            spec.validate().map_err(|e| CliError::Argument(e.to_string()))?;
            let d = Domain::new(spec)?;
            let rd = generate_rough_data(&d, p, q, theta, seed, amplitude)?;
            ensure_dir(&out)?;
            write_field(&out.join("rough.bin"), &rd.field, 0.0, 0.0)?;
            #[derive(Serialize)]
            struct Meta<'a> {
                p: f64,
                q: f64,
                theta: f64,
                seed: u64,
                besov_s: f64,
                besov: f64,
                warnings: &'a [String],
            }
            let meta = Meta { p, q, theta, seed, besov_s: 2.0 / p, besov: rd.besov, warnings: &rd.warnings };
            write_text(&out.join("rough.json"), &(serde_json::to_string_pretty(&meta).expect("plain data") + "\n"))?;
            let mut s = format!("besov[{},{},{}] = {}\n", 2.0 / p, p, q, format_value(rd.besov));
            for w in &rd.warnings {
                let _ = writeln!(s, "warning: {w}");
            }
            Ok(s)
        }
    }
}

fn emit(out: Option<&Path>, name: &str, text: String) -> CliResult<String> {
    match out {
        Some(dir) => {
            ensure_dir(dir)?;
            write_text(&dir.join(name), &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn verify(name: &str, res: usize, seed: u64, out: Option<&Path>) -> CliResult<String> {
    let suites: Vec<Suite> = if name.eq_ignore_ascii_case("all") {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse().map_err(|e: hydro_core::Error| CliError::Argument(e.to_string()))?]
    };
    if res < 4 || res % 2 != 0 {
        return Err(CliError::Argument(format!("resolution must be an even number >= 4, got {res}")));
    }
    let mut text = String::new();
    let mut reports: Vec<SuiteReport> = Vec::new();
    for s in suites {
        let rep = run_suite(s, res, seed)?;
        for c in &rep.checks {
            let _ = writeln!(text, "{} {}/{}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, rep.suite, c.name, format_value(c.value), c.condition);
        }
        reports.push(rep);
    }
    if let Some(dir) = out {
        ensure_dir(dir)?;
        for r in &reports {
            write_text(&dir.join(format!("verify_{}.json", r.suite)), &(serde_json::to_string_pretty(r).expect("plain data") + "\n"))?;
        }
    }
    let failed: Vec<String> = reports.iter().flat_map(|r| r.failures().into_iter().map(move |c| format!("{}/{}", r.suite, c.name))).collect();
    if failed.is_empty() {
        Ok(text)
    } else {
        print!("{text}");
        Err(CliError::Verification(name.to_string(), failed.join(" ")))
    }
}

fn run(config: &Path, out: &Path, snapshots: bool) -> CliResult<String> {
    let cfg: RunConfig = load_config(config)?;
    let warnings = cfg.validate()?;
    let domain = Domain::new(cfg.domain_spec())?;
    let load = |p: &str| -> CliResult<_> {
        let (_, v) = read_field(Path::new(p))?;
        if v.domain().spec() != domain.spec() {
            return Err(CliError::Argument(format!("{p}: grid {:?} does not match the configured domain", v.domain().spec())));
        }
        Ok(v)
    };
    let v0 = match cfg.initial.as_str() {
        "file" => load(cfg.initial_file.as_deref().expect("validated"))?,
        _ => initial_condition(&domain, &cfg)?,
    };
    let forcing: Arc<dyn Forcing> = match cfg.forcing.as_str() {
        "series" => {
            let fields = cfg.forcing_files.iter().map(|p| load(p)).collect::<CliResult<Vec<_>>>()?;
            Arc::new(SeriesForcing::new(cfg.forcing_times.clone(), fields, cfg.forcing_derivative)?)
        }
        _ => builtin_forcing(&domain, &cfg)?,
    };
    ensure_dir(out)?;
    let mut rec = run_with_initial(&domain, v0, forcing, &cfg.options()?)?;
    rec.warnings.extend(warnings);

    let diag = out.join("diagnostics.csv");
    if diag.exists() {
        fs::remove_file(&diag).map_err(out_err(&diag))?;
    }
    for r in &rec.rows {
        append_diag(&diag, &rec.columns, r)?;
    }
    let ledger = apriori_ledger(&rec)?;
    let lpath = out.join("ledger.csv");
    let lcols: Vec<String> = std::iter::once("time".to_string()).chain(ledger.columns.iter().cloned()).collect();
    let lrows = ledger.rows.iter().map(|r| std::iter::once(r.time).chain(r.values.iter().copied()).map(format_value).collect());
    write_text(&lpath, &csv_table(&lcols, lrows))?;
    let radius = analyticity_radius(&rec);
    let rrows = radius.iter().map(|f| vec![format_value(f.time), format_value(f.sigma), f.active.to_string(), (f.flagged as u8).to_string()]);
    write_text(&out.join("radius.csv"), &csv_table(&["time", "sigma", "active", "flagged"], rrows))?;
    if snapshots {
        let dir = out.join("snapshots");
        ensure_dir(&dir)?;
        for s in &rec.snapshots {
            write_field(&dir.join(format!("step_{:08}.bin", s.step)), &s.v, s.time, rec.dt)?;
        }
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        domain: DomainSpec,
        dt: f64,
        t_end: f64,
        snapshots: usize,
        energy0: f64,
        final_energy_residual: f64,
        ledger_bound: f64,
        ledger_running_max: &'a [f64],
        ledger_flags: &'a [String],
        warnings: &'a [String],
    }
    let summary = Summary {
        domain: *domain.spec(),
        dt: rec.dt,
        t_end: rec.t_end,
        snapshots: rec.snapshots.len(),
        energy0: rec.energy0,
        final_energy_residual: rec.final_energy_residual(),
        ledger_bound: ledger.bound,
        ledger_running_max: &ledger.running_max,
        ledger_flags: &ledger.flags,
        warnings: &rec.warnings,
    };
    write_text(&out.join("summary.json"), &(serde_json::to_string_pretty(&summary).expect("plain data") + "\n"))?;
    let mut s = String::new();
    for w in rec.warnings.iter().chain(&ledger.flags) {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s, "{} steps to t = {}, energy residual {}", (rec.t_end / rec.dt).round(), rec.t_end, format_value(rec.final_energy_residual()));
    Ok(s)
}
