//! The `phasekit` command line.
//!
//! Exit codes: 0 success, 1 invalid configuration or I/O failure, 2 numerical
//! abort, 3 threshold violation.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockenc::OracleTable;
use crate::blockenc::ParityPair;
use crate::error::{Error, Result};
use crate::phasefn::log_log_slope;
use crate::phasefn::{
    build_g_p, convergence_sweep, degree_for_epsilon, fourier_coeffs, write_convergence_csv,
    SmoothingSpec, DEFAULT_DEGREE_CAP,
};
use crate::sampler::{
    exact_distribution, max_element_error, query_scaling_sweep, sample, separation_instance,
    tv_distance, write_sweep_csv, BudgetMode, Pipeline, DEFAULT_ETA,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_THRESHOLD: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "phasekit",
    version,
    about = "Phase extraction by quantum signal processing, simulated"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; data goes to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Smoothness order of the target phase function.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Smoothing half-width around ±π.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Completion headroom.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// X-rotation angles (rotation sequences only).
    Angles,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier truncation of g_p with its certified error.
    Fourier {
        /// Truncation degree; chosen from --eps when omitted.
        #[arg(long)]
        d: Option<usize>,
        /// Comma-separated degrees for a convergence table instead.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
    },
    /// Rotation sequences for both parity blocks of a truncation.
    Angles {
        #[arg(long)]
        d: Option<usize>,
    },
    /// Run the sampler and report counts, queries and TV distances.
    Sample,
    /// Query-count sweep over eps and N on the separation family.
    Sweep,
    /// Block-encoded state before and after amplification, no sampling.
    Simulate,
}

/// What a successful run prints and whether configured thresholds held.
#[derive(Debug)]
pub struct Outcome {
    pub summary: String,
    pub thresholds_met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub tv_exact: Option<f64>,
    pub tv_empirical: Option<f64>,
    pub max_element_error: Option<f64>,
    /// Sweep only: largest allowed log-log slope of queries against 1/eps.
    pub max_slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Separation,
    File,
}

/// Configuration for `sample` and `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub oracle: OracleKind,
    pub oracle_path: Option<PathBuf>,
    pub eps: f64,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub n_samples: u64,
    #[serde(default)]
    pub mode: BudgetMode,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// Configuration for `sweep`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_p")]
    pub p: usize,
    pub eps: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(default = "default_samples")]
    pub n_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn default_p() -> usize {
    1
}

fn default_samples() -> u64 {
    10_000
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

/// Oracle files hold either a bare array of values or `{values, bits}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum OracleFile {
    Values(Vec<f64>),
    Table { values: Vec<f64>, bits: u32 },
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::param("config", format!("{}: {e}", path.display())))
}

fn require_config(common: &CommonArgs) -> Result<&Path> {
    common
        .config
        .as_deref()
        .ok_or_else(|| Error::param("config", "this command needs --config <path>"))
}

impl SampleConfig {
    fn load(common: &CommonArgs) -> Result<Self> {
        let mut cfg: SampleConfig = read_json(require_config(common)?)?;
        if let Some(seed) = common.seed {
            cfg.seed = seed;
        }
        if let Some(p) = common.p {
            cfg.p = p;
        }
        if let Some(eps) = common.eps {
            cfg.eps = eps;
        }
        if let Some(eta) = common.eta {
            cfg.eta = eta;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::param("config.n_samples", "must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::param("config.eps", "must be positive and finite"));
        }
        if self.p == 0 {
            return Err(Error::param("config.p", "must be at least 1"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::param("config.eta", "must be in (0, 1)"));
        }
        match self.oracle {
            OracleKind::Separation if self.n.is_none() => Err(Error::param(
                "config.N",
                "required for the separation oracle",
            )),
            OracleKind::File if self.oracle_path.is_none() => Err(Error::param(
                "config.oracle_path",
                "required for a file oracle",
            )),
            _ => Ok(()),
        }
    }

    fn table(&self, base: &Path) -> Result<OracleTable> {
        match self.oracle {
            OracleKind::Separation => separation_instance(self.n.unwrap_or(0)),
            OracleKind::File => {
                let rel = self.oracle_path.as_deref().unwrap_or(Path::new(""));
                let path = base
                    .parent()
                    .map(|b| b.join(rel))
                    .unwrap_or(rel.to_path_buf());
                let table = match read_json::<OracleFile>(&path)? {
                    OracleFile::Values(values) => OracleTable::new(values, 52)?,
                    OracleFile::Table { values, bits } => OracleTable::new(values, bits)?,
                };
                if let Some(n) = self.n {
                    if n != table.len() {
                        return Err(Error::param(
                            "config.N",
                            format!("{n} does not match the {} oracle values", table.len()),
                        ));
                    }
                }
                Ok(table)
            }
        }
    }

    fn pipeline(&self, base: &Path) -> Result<Pipeline> {
        Pipeline::build(self.table(base)?, self.eps, self.p, self.mode, self.eta)
    }
}

fn spec_from(common: &CommonArgs) -> Result<SmoothingSpec> {
    SmoothingSpec::new(common.p.unwrap_or(1), common.delta.unwrap_or(PI / 2.0))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Serialize)]
struct CoeffRow {
    k: i64,
    re: f64,
    im: f64,
    sup_error: f64,
}

#[derive(Serialize)]
struct FourierReport<'a> {
    p: usize,
    delta: f64,
    d: usize,
    sup_error: f64,
    poly: &'a crate::LaurentPoly,
}

fn cmd_fourier(
    common: &CommonArgs,
    d: Option<usize>,
    sweep: Option<Vec<usize>>,
) -> Result<Outcome> {
    let spec = spec_from(common)?;
    if let Some(degrees) = sweep {
        let rows = convergence_sweep(spec, &degrees);
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf)?;
        emit(common.out.as_deref(), &buf)?;
        return Ok(Outcome {
            summary: format!(
                "fourier sweep: {} rows (p={}, delta={})",
                rows.len(),
                spec.p(),
                spec.delta()
            ),
            thresholds_met: true,
        });
    }
    let trunc = match (d, common.eps) {
        (Some(d), _) => fourier_coeffs(&build_g_p(spec), d),
        (None, Some(eps)) => degree_for_epsilon(spec, eps, DEFAULT_DEGREE_CAP)?.1,
        (None, None) => return Err(Error::param("d", "give --d or --eps")),
    };
    let bytes = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let d = trunc.degree as i64;
            for k in -d..=d {
                let c = trunc.poly.coeff(k);
                w.serialize(CoeffRow {
                    k,
                    re: c.re,
                    im: c.im,
                    sup_error: trunc.sup_error,
                })?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
        Format::Json => to_json(&FourierReport {
            p: spec.p(),
            delta: spec.delta(),
            d: trunc.degree,
            sup_error: trunc.sup_error,
            poly: &trunc.poly,
        })?,
        Format::Angles => return Err(Error::param("format", "angles applies to `angles` only")),
    };
    emit(common.out.as_deref(), &bytes)?;
    Ok(Outcome {
        summary: format!(
            "fourier: p={} delta={} d={} sup_error={:e}",
            spec.p(),
            spec.delta(),
            trunc.degree,
            trunc.sup_error
        ),
        thresholds_met: true,
    })
}

#[derive(Serialize)]
struct AnglesReport<'a> {
    p: usize,
    delta: f64,
    d: usize,
    eta: f64,
    sup_error: f64,
    scale: f64,
    residual: f64,
    even: &'a crate::synthesis::RotationSequence,
    odd: &'a crate::synthesis::RotationSequence,
}

#[derive(Serialize)]
struct XAngles {
    even: Vec<f64>,
    odd: Vec<f64>,
}

fn cmd_angles(common: &CommonArgs, d: Option<usize>) -> Result<Outcome> {
    let spec = spec_from(common)?;
    let eta = common.eta.unwrap_or(DEFAULT_ETA);
    let trunc = match (d, common.eps) {
        (Some(d), _) => fourier_coeffs(&build_g_p(spec), d),
        (None, Some(eps)) => degree_for_epsilon(spec, eps, DEFAULT_DEGREE_CAP)?.1,
        (None, None) => return Err(Error::param("d", "give --d or --eps")),
    };
    let pair = ParityPair::synthesize(&trunc, eta)?;
    let bytes = match common.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&AnglesReport {
            p: spec.p(),
            delta: spec.delta(),
            d: trunc.degree,
            eta,
            sup_error: trunc.sup_error,
            scale: pair.scale,
            residual: pair.residual,
            even: &pair.seq0,
            odd: &pair.seq1,
        })?,
        Format::Angles => to_json(&XAngles {
            even: pair.seq0.x_angles(1e-8)?,
            odd: pair.seq1.x_angles(1e-8)?,
        })?,
        Format::Csv => {
            return Err(Error::param(
                "format",
                "rotation sequences are written as json or angles",
            ))
        }
    };
    emit(common.out.as_deref(), &bytes)?;
    Ok(Outcome {
        summary: format!(
            "angles: d={} factors={}+{} residual={:e}",
            trunc.degree,
            pair.seq0.len(),
            pair.seq1.len(),
            pair.residual
        ),
        thresholds_met: true,
    })
}

fn check(value: f64, limit: Option<f64>) -> bool {
    limit.is_none_or(|l| value <= l)
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    budget: &'a crate::sampler::ErrorBudget,
    budget_holds: bool,
    report: &'a crate::sampler::SampleReport,
    thresholds: Thresholds,
    thresholds_met: bool,
}

fn cmd_sample(common: &CommonArgs) -> Result<Outcome> {
    let cfg = SampleConfig::load(common)?;
    let base = require_config(common)?;
    let pipeline = cfg.pipeline(base)?;
    let report = sample(&pipeline, cfg.n_samples, cfg.seed)?;
    let t = cfg.thresholds;
    let met = pipeline.budget.holds()
        && check(report.tv_exact, t.tv_exact)
        && check(report.tv_empirical, t.tv_empirical)
        && check(report.max_element_error, t.max_element_error);
    let bytes = to_json(&SampleOutput {
        budget: &pipeline.budget,
        budget_holds: pipeline.budget.holds(),
        report: &report,
        thresholds: t,
        thresholds_met: met,
    })?;
    emit(common.out.as_deref(), &bytes)?;
    Ok(Outcome {
        summary: format!(
            "sample: N={} d={} k={} trials={} queries={} tv_exact={:e} tv_empirical={:e}",
            pipeline.table.len(),
            pipeline.budget.d,
            report.amplification_iterations,
            report.trials,
            report.oracle_queries,
            report.tv_exact,
            report.tv_empirical
        ),
        thresholds_met: met,
    })
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    budget: &'a crate::sampler::ErrorBudget,
    success_probability: f64,
    amplified_success_probability: f64,
    amplification_iterations: usize,
    success_amplitudes: Vec<Complex64>,
    distribution: Vec<f64>,
    target: Vec<f64>,
    max_element_error: f64,
    tv_exact: f64,
    queries: crate::blockenc::QueryCount,
    synthesis_residual: f64,
}

fn cmd_simulate(common: &CommonArgs) -> Result<Outcome> {
    let cfg = SampleConfig::load(common)?;
    let pipeline = cfg.pipeline(require_config(common)?)?;
    let q = exact_distribution(&pipeline)?;
    let target = pipeline.table.target_distribution()?;
    let max_err = max_element_error(&q, &target)?;
    let tv = tv_distance(&q, &target)?;
    let t = cfg.thresholds;
    let met =
        pipeline.budget.holds() && check(tv, t.tv_exact) && check(max_err, t.max_element_error);
    let bytes = to_json(&SimulateOutput {
        budget: &pipeline.budget,
        success_probability: pipeline.initial.success_probability(),
        amplified_success_probability: pipeline.amplified.success_probability(),
        amplification_iterations: pipeline.plan.iterations,
        success_amplitudes: pipeline.initial.success_amplitudes(),
        distribution: q,
        target,
        max_element_error: max_err,
        tv_exact: tv,
        queries: pipeline.queries,
        synthesis_residual: pipeline.pair.residual,
    })?;
    emit(common.out.as_deref(), &bytes)?;
    Ok(Outcome {
        summary: format!(
            "simulate: N={} P00={:.6} amplified={:.6} max_element_error={:e}",
            pipeline.table.len(),
            pipeline.initial.success_probability(),
            pipeline.amplified.success_probability(),
            max_err
        ),
        thresholds_met: met,
    })
}

fn cmd_sweep(common: &CommonArgs) -> Result<Outcome> {
    let mut cfg: SweepConfig = read_json(require_config(common)?)?;
    if let Some(p) = common.p {
        cfg.p = p;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(eta) = common.eta {
        cfg.eta = eta;
    }
    if cfg.eps.is_empty() || cfg.n.is_empty() {
        return Err(Error::param(
            "config.eps",
            "sweep needs at least one eps and one N",
        ));
    }
    if cfg.n_samples == 0 {
        return Err(Error::param("config.n_samples", "must be at least 1"));
    }
    let rows = query_scaling_sweep(cfg.p, &cfg.eps, &cfg.n, cfg.n_samples, cfg.seed, cfg.eta)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    emit(common.out.as_deref(), &buf)?;

    let mut worst = f64::NEG_INFINITY;
    if cfg.eps.len() >= 2 {
        for &n in &cfg.n {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| (1.0 / r.eps, r.queries as f64))
                .unzip();
            worst = worst.max(log_log_slope(&xs, &ys));
        }
    }
    let met = cfg.thresholds.max_slope.is_none_or(|m| worst <= m);
    Ok(Outcome {
        summary: format!(
            "sweep: {} rows, query slope in 1/eps {worst:.3}",
            rows.len()
        ),
        thresholds_met: met,
    })
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let common = &cli.common;
    if let Some(eps) = common.eps {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::param("eps", "must be positive and finite"));
        }
    }
    match cli.command {
        Command::Fourier { d, sweep } => cmd_fourier(common, d, sweep),
        Command::Angles { d } => cmd_angles(common, d),
        Command::Sample => cmd_sample(common),
        Command::Sweep => cmd_sweep(common),
        Command::Simulate => cmd_simulate(common),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical_abort() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let to_file = cli.common.out.is_some();
    match run(cli) {
        Ok(outcome) => {
            if to_file {
                println!("{}", outcome.summary);
            } else {
                eprintln!("{}", outcome.summary);
            }
            if outcome.thresholds_met {
                EXIT_OK
            } else {
                eprintln!("threshold violated");
                EXIT_THRESHOLD
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
