//! Command-line front end: single evaluations, σ sweeps, the validation
//! suite, and bit-reset reports.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bounds::{sandwich_report_flagged, BoundReport, CSV_HEADER};
use crate::distributions::{DiscreteLattice, GaussianDensity, MixtureDensity};
use crate::entropy::{
    deficit_direct, discrete_entropy, gaussian_entropy, mc_entropy, mixture_entropy, EntropyMethod,
    EntropyValue, McConfig,
};
use crate::error::{Error, Result};
use crate::format::{csv_num, json_num, json_opt};
use crate::landauer::{reset_report, BitMemoryModel, ResetReport};
use crate::numerics::quadrature::QuadratureConfig;
use crate::validate::{run_checks, ValidateOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;

const AFTER_HELP: &str = "\
Distribution JSON (--dist, inline or a file path):
  {\"support\": [k1, ...], \"probs\": [p1, ...]}   {\"bernoulli\": p}   {\"uniform_support\": n}

CSV columns:
  sweep:    sigma,delta,delta_err,lemma1,lemma3,lemma4,thm1,bern_lb,bigsig_lb,ok
  landauer: mu,sigma,p1,h_before,h_after,delta_h,ideal,deficit,envelope
  entropy:  sigma,H,h,h_sum,h_sum_err,delta_direct,delta_direct_err,delta_identity,delta_identity_err
Absent bounds are left empty. Numbers carry 15 significant digits; entropies are in nats.

Exit codes: 0 success, 1 failed validation check, 2 invalid arguments, 3 quadrature did not converge.";

#[derive(Debug, Parser)]
#[command(
    name = "mixent",
    version,
    about = "Entropy of Gaussian + lattice mixtures and bounds on the entropy deficit",
    after_help = AFTER_HELP
)]
pub struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout ("-" means stdout).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(
        long,
        global = true,
        env = "MIXENT_QUAD_ABS_TOL",
        default_value_t = 1e-12
    )]
    pub quad_abs_tol: f64,

    #[arg(
        long,
        global = true,
        env = "MIXENT_QUAD_REL_TOL",
        default_value_t = 1e-10
    )]
    pub quad_rel_tol: f64,

    #[arg(
        long,
        global = true,
        env = "MIXENT_QUAD_MAX_SUBDIVISIONS",
        default_value_t = 2000
    )]
    pub quad_max_subdivisions: usize,

    /// Monte Carlo sample count (0 skips Monte Carlo).
    #[arg(long, global = true)]
    pub mc_samples: Option<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// H(Z), h(X), h(X+Z) and the deficit by both routes.
    Entropy(EntropyArgs),
    /// Deficit and every applicable bound over a range of σ.
    Sweep(SweepArgs),
    /// Run the numerical validation suite; exits 1 if any check fails.
    Validate(ValidateArgs),
    /// Entropy change of resetting a two-well bit memory.
    Landauer(LandauerArgs),
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub sigma: f64,
    /// Discrete law as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub dist: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub sigma_start: f64,
    #[arg(long)]
    pub sigma_end: f64,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Space σ linearly instead of logarithmically.
    #[arg(long)]
    pub linear: bool,
    #[arg(long, default_value = r#"{"bernoulli":0.5}"#)]
    pub dist: String,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Smaller grids and fewer Monte Carlo samples.
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Args)]
pub struct LandauerArgs {
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub p1: f64,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

/// Parameters of a σ sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub sigma_start: f64,
    pub sigma_end: f64,
    pub steps: usize,
    pub log_spacing: bool,
    pub z: DiscreteLattice,
    pub quad: QuadratureConfig,
    pub mc_samples: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_start > 0.0 && self.sigma_start <= self.sigma_end)
            || !self.sigma_end.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "need 0 < sigma_start ≤ sigma_end, got [{}, {}]",
                self.sigma_start, self.sigma_end
            )));
        }
        if self.steps < 1 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        self.quad.validate()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.sigma_start];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / n;
                if self.log_spacing {
                    self.sigma_start * (self.sigma_end / self.sigma_start).powf(t)
                } else {
                    self.sigma_start + (self.sigma_end - self.sigma_start) * t
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub report: BoundReport,
    pub mc: Option<EntropyValue>,
}

/// Computes one report per σ; rows come back in σ order regardless of how
/// the work was scheduled.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.sigmas()
        .par_iter()
        .map(|&s| {
            let report = sandwich_report_flagged(&spec.z, s, &spec.quad)?;
            let mc = if spec.mc_samples > 0 {
                let m = MixtureDensity::new(GaussianDensity::new(s)?, spec.z.clone());
                Some(mc_entropy(&m, &McConfig::new(spec.mc_samples, spec.seed)?)?)
            } else {
                None
            };
            Ok(SweepRow { report, mc })
        })
        .collect()
}

/// Failure of a subcommand, carrying the exit status to use.
#[derive(Debug)]
pub struct CliFailure {
    pub code: u8,
    pub message: String,
}

impl CliFailure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: EXIT_CHECK_FAILED,
            message: format!("output error: {e}"),
        }
    }
}

fn usage_or_convergence(e: Error) -> CliFailure {
    let code = if e.is_non_convergence() {
        EXIT_NON_CONVERGENCE
    } else {
        EXIT_USAGE
    };
    CliFailure {
        code,
        message: e.to_string(),
    }
}

fn quad_config(cli: &Cli) -> std::result::Result<QuadratureConfig, CliFailure> {
    QuadratureConfig::new(
        cli.quad_abs_tol,
        cli.quad_rel_tol,
        cli.quad_max_subdivisions,
    )
    .map_err(CliFailure::usage)
}

/// Reads `--dist`: inline JSON if it looks like an object, otherwise a path.
pub fn load_dist(arg: &str) -> Result<DiscreteLattice> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return DiscreteLattice::from_json(trimmed);
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| Error::InvalidDistribution(format!("cannot read {arg}: {e}")))?;
    DiscreteLattice::from_json(&text)
}

/// Runs a parsed command, writing results to `out` and warnings to `err`.
/// Returns the process exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Entropy(a) => cmd_entropy(cli, a, out, err),
        Command::Sweep(a) => cmd_sweep(cli, a, out, err),
        Command::Validate(a) => cmd_validate(cli, a, out),
        Command::Landauer(a) => cmd_landauer(cli, a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Turns a non-convergence into its partial estimate and clears `converged`.
fn keep_partial(
    r: Result<EntropyValue>,
    method: EntropyMethod,
    converged: &mut bool,
) -> Result<EntropyValue> {
    match r {
        Err(Error::NonConvergence {
            value, abs_error, ..
        }) => {
            *converged = false;
            Ok(EntropyValue {
                nats: value,
                method,
                abs_error,
            })
        }
        other => other,
    }
}

fn entropy_json(e: &EntropyValue) -> Value {
    json!({
        "nats": json_num(e.nats),
        "abs_error": json_num(e.abs_error),
        "method": e.method,
    })
}

fn cmd_entropy(
    cli: &Cli,
    a: &EntropyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<u8, CliFailure> {
    let quad = quad_config(cli)?;
    let z = load_dist(&a.dist).map_err(CliFailure::usage)?;
    let g = GaussianDensity::new(a.sigma).map_err(CliFailure::usage)?;
    let mixture = MixtureDensity::new(g, z.clone());

    let mut converged = true;
    let h_z = discrete_entropy(&z);
    let h_x = gaussian_entropy(&g);
    let h_sum = keep_partial(
        mixture_entropy(&mixture, &quad),
        EntropyMethod::Quadrature,
        &mut converged,
    )
    .map_err(usage_or_convergence)?;
    let direct = keep_partial(
        deficit_direct(&z, g, &quad),
        EntropyMethod::Quadrature,
        &mut converged,
    )
    .map_err(usage_or_convergence)?;
    let identity = EntropyValue {
        nats: h_z.nats + h_x.nats - h_sum.nats,
        method: EntropyMethod::Identity,
        abs_error: h_sum.abs_error,
    };
    let mc = match cli.mc_samples {
        Some(n) if n > 0 => {
            let cfg = McConfig::new(n, cli.seed).map_err(CliFailure::usage)?;
            Some(mc_entropy(&mixture, &cfg).map_err(CliFailure::usage)?)
        }
        _ => None,
    };

    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut doc = json!({
                "sigma": json_num(a.sigma),
                "dist": z,
                "H": entropy_json(&h_z),
                "h": entropy_json(&h_x),
                "h_sum": entropy_json(&h_sum),
                "delta_direct": entropy_json(&direct),
                "delta_identity": entropy_json(&identity),
                "converged": converged,
            });
            if let Some(m) = &mc {
                doc["h_sum_mc"] = entropy_json(m);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Csv => {
            writeln!(
                out,
                "sigma,H,h,h_sum,h_sum_err,delta_direct,delta_direct_err,delta_identity,delta_identity_err"
            )?;
            let row = [
                a.sigma,
                h_z.nats,
                h_x.nats,
                h_sum.nats,
                h_sum.abs_error,
                direct.nats,
                direct.abs_error,
                identity.nats,
                identity.abs_error,
            ]
            .map(csv_num)
            .join(",");
            writeln!(out, "{row}")?;
        }
        Format::Text => {
            let line = |name: &str, e: &EntropyValue| {
                format!(
                    "{name:<16} {:>22} ± {}",
                    csv_num(e.nats),
                    csv_num(e.abs_error)
                )
            };
            writeln!(out, "{:<16} {:>22}", "sigma", csv_num(a.sigma))?;
            writeln!(out, "{:<16} {}", "dist", z.to_json())?;
            writeln!(out, "{}", line("H(Z)", &h_z))?;
            writeln!(out, "{}", line("h(X)", &h_x))?;
            writeln!(out, "{}", line("h(X+Z)", &h_sum))?;
            writeln!(out, "{}", line("delta direct", &direct))?;
            writeln!(out, "{}", line("delta identity", &identity))?;
            if let Some(m) = &mc {
                writeln!(out, "{}", line("h(X+Z) mc", m))?;
            }
        }
    }

    if converged {
        Ok(EXIT_OK)
    } else {
        writeln!(
            err,
            "warning: quadrature did not converge; estimates above are partial"
        )?;
        Ok(EXIT_NON_CONVERGENCE)
    }
}

fn report_json(row: &SweepRow) -> Value {
    let r = &row.report;
    let mut v = json!({
        "sigma": json_num(r.sigma),
        "z": r.z_descriptor,
        "delta": json_num(r.delta_quadrature),
        "delta_err": json_num(r.delta_error),
        "lemma1": json_num(r.lemma1_numeric_ub),
        "lemma1_err": json_num(r.lemma1_error),
        "lemma3": json_num(r.lemma3_term),
        "lemma4": json_opt(r.lemma4_term),
        "thm1": json_opt(r.theorem1_ub),
        "bern_lb": json_opt(r.bernoulli_lb),
        "bigsig_lb": json_opt(r.big_sigma_lb),
        "converged": r.converged,
        "sandwich_ok": r.sandwich_ok,
        "ok": r.ok(),
    });
    if let Some(m) = &row.mc {
        v["h_sum_mc"] = entropy_json(m);
    }
    v
}

fn cmd_sweep(
    cli: &Cli,
    a: &SweepArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<u8, CliFailure> {
    let spec = SweepSpec {
        sigma_start: a.sigma_start,
        sigma_end: a.sigma_end,
        steps: a.steps,
        log_spacing: !a.linear,
        z: load_dist(&a.dist).map_err(CliFailure::usage)?,
        quad: quad_config(cli)?,
        mc_samples: cli.mc_samples.unwrap_or(0),
        seed: cli.seed,
    };
    let rows = run_sweep(&spec).map_err(usage_or_convergence)?;

    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in &rows {
                writeln!(out, "{}", row.report.csv_row())?;
            }
        }
        Format::Json => {
            let doc: Vec<Value> = rows.iter().map(report_json).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Text => {
            let cols: Vec<&str> = CSV_HEADER.split(',').collect();
            let header: Vec<String> = cols.iter().map(|c| format!("{c:>22}")).collect();
            writeln!(out, "{}", header.join(" "))?;
            for row in &rows {
                let cells: Vec<String> = row
                    .report
                    .csv_row()
                    .split(',')
                    .map(|c| format!("{c:>22}"))
                    .collect();
                writeln!(out, "{}", cells.join(" "))?;
            }
        }
    }

    if rows.iter().all(|r| r.report.converged) {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "warning: some rows did not converge (ok = false)")?;
        Ok(EXIT_NON_CONVERGENCE)
    }
}

fn cmd_validate(
    cli: &Cli,
    a: &ValidateArgs,
    out: &mut dyn Write,
) -> std::result::Result<u8, CliFailure> {
    let default_samples = if a.quick { 200_000 } else { 1_000_000 };
    let opts = ValidateOptions {
        quick: a.quick,
        quad: quad_config(cli)?,
        mc_samples: cli
            .mc_samples
            .filter(|&n| n >= 2)
            .unwrap_or(default_samples),
        seed: cli.seed,
    };
    let outcomes = run_checks(&opts);
    let all = outcomes.iter().all(|c| c.passed);

    match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let doc: Vec<Value> = outcomes
                .iter()
                .map(|c| json!({"check": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        }
        Format::Csv => {
            writeln!(out, "check,passed,detail")?;
            for c in &outcomes {
                writeln!(
                    out,
                    "{},{},\"{}\"",
                    c.name,
                    c.passed,
                    c.detail.replace('"', "'")
                )?;
            }
        }
        Format::Text => {
            for c in &outcomes {
                let status = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{status}  {:<26} {}", c.name, c.detail)?;
            }
            let passed = outcomes.iter().filter(|c| c.passed).count();
            writeln!(out, "{passed}/{} checks passed", outcomes.len())?;
        }
    }
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_landauer(
    cli: &Cli,
    a: &LandauerArgs,
    out: &mut dyn Write,
) -> std::result::Result<u8, CliFailure> {
    let model = BitMemoryModel::new(a.mu, a.sigma, a.p1).map_err(CliFailure::usage)?;
    let quad = quad_config(cli)?;
    let report = reset_report(&model, &quad).map_err(usage_or_convergence)?;
    let report = if a.bits { report.in_bits() } else { report };
    let unit = if a.bits { "bits" } else { "nats" };

    match cli.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(out, "{}", landauer_json(&report, unit))?,
        Format::Csv => {
            writeln!(out, "{}", ResetReport::CSV_HEADER)?;
            writeln!(out, "{}", report.csv_row())?;
        }
        Format::Text => {
            let fields = ResetReport::CSV_HEADER.split(',');
            let row = report.csv_row();
            for (k, v) in fields.zip(row.split(',')) {
                writeln!(out, "{k:<10} {v}")?;
            }
            writeln!(out, "{:<10} {unit}", "units")?;
        }
    }
    Ok(EXIT_OK)
}

fn landauer_json(r: &ResetReport, unit: &str) -> String {
    let doc = json!({
        "mu": json_num(r.model.mu),
        "sigma": json_num(r.model.sigma),
        "p1": json_num(r.model.p1),
        "units": unit,
        "h_before": json_num(r.h_before),
        "h_before_quadrature": json_num(r.h_before_quadrature),
        "h_before_quadrature_err": json_num(r.h_before_quadrature_error),
        "h_after": json_num(r.h_after),
        "delta_h": json_num(r.delta_h),
        "ideal": json_num(r.ideal),
        "deficit": json_num(r.deficit_correction),
        "deficit_err": json_num(r.deficit_error),
        "envelope": json_opt(r.thm1_envelope),
    });
    serde_json::to_string_pretty(&doc).expect("json")
}
