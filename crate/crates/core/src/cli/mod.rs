//! The `ftgap` command line: `eval`, `scan`, `painleve` and `validate`.
//!
//! Everything is reachable through [`run`], which takes the argument list, an
//! environment lookup and the two output streams and returns the exit status,
//! so the binary is a one-line wrapper.

mod cache;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

pub use cache::{load_or_build_pii, load_or_build_pv, CacheOutcome};
pub use config::{OutputFormat, Overrides, RunConfig, CACHE_DIR_ENV, CONFIG_ENV};

use crate::asymptotics::{classify_regime, regime_prediction, Regime, RegimeReport};
use crate::error::{Error, Result};
use crate::fredholm::{gap_log_det_with, TruthOptions};
use crate::painleve::{PainleveIITable, SigmaPVTable};
use crate::validation::{axis, run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

/// `auto` computes the quadrature truth by itself up to this x ...
pub const AUTO_TRUTH_MAX_X: f64 = 6.0;
/// ... and this node count.
pub const AUTO_TRUTH_MAX_NODES: usize = 400;

#[derive(Debug, Parser)]
#[command(name = "ftgap", version, about = "Finite-temperature sine-kernel gap probabilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Nyström nodes for the quadrature truth.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Truncation tolerance of the Fermi weight.
    #[arg(long, global = true)]
    eps: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Directory of cached Painlevé tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// log D(x, s) by quadrature or by one of the asymptotic expansions.
    Eval(EvalArgs),
    /// Regime, prediction and optional truth over an (x, s) grid.
    Scan(ScanArgs),
    /// Builds or loads a Painlevé table and summarises its accuracy.
    Painleve(PainleveArgs),
    /// Runs validation checks and prints a JSON report.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Nyström quadrature.
    Quad,
    /// The expansion of the classified regime.
    Auto,
    /// No-gap expansion.
    Thm1,
    /// One-gap expansion.
    Thm2,
    /// Transition expansion with log F_TW.
    Thm3,
    /// Sine-kernel determinant through sigma-PV.
    Thm4,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Quad => "quad",
            Method::Auto => "auto",
            Method::Thm1 => "thm1",
            Method::Thm2 => "thm2",
            Method::Thm3 => "thm3",
            Method::Thm4 => "thm4",
        }
    }

    /// Names the method and regime on precondition failures.
    fn explain(self, regime: Regime, e: Error) -> Error {
        match e {
            Error::Regime(msg) => Error::Regime(format!("{} ({regime} expansion): {msg}", self.name())),
            e if e.is_precondition() => Error::Regime(format!("{} ({regime} expansion): {e}", self.name())),
            e => e,
        }
    }

    /// The regime whose formula the method forces, if any.
    fn forced_regime(self) -> Option<Regime> {
        match self {
            Method::Thm1 => Some(Regime::NoGap),
            Method::Thm2 => Some(Regime::OneGap),
            Method::Thm3 => Some(Regime::Transition),
            Method::Thm4 => Some(Regime::PainleveV),
            Method::Quad | Method::Auto => None,
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    s: f64,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Also compute the quadrature truth.
    #[arg(long)]
    with_truth: bool,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// a:b:step, or a single value.
    #[arg(long, allow_hyphen_values = true)]
    x_range: String,
    #[arg(long, allow_hyphen_values = true)]
    s_range: String,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    #[arg(long)]
    with_truth: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    Pii,
    Pv,
}

#[derive(Debug, Args)]
struct PainleveArgs {
    #[arg(value_enum)]
    which: TableKind,
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Grid nodes of the requested table.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// pde, smallx, equivalence, limits, regimes, painleve or all.
    #[arg(long, default_value = "all")]
    suite: Suite,
}

/// 17 significant digits, locale independent.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Exit status for an error that stopped a command.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match execute(cli, env, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "ftgap: error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write) -> Result<i32> {
    let mut overrides = Overrides { nodes: cli.nodes, eps: cli.eps, cache_dir: cli.cache_dir, format: cli.format, ..Default::default() };
    if let Command::Painleve(p) = &cli.command {
        match p.which {
            TableKind::Pii => {
                overrides.pii_t_min = p.t_min;
                overrides.pii_t_max = p.t_max;
                overrides.pii_n = p.n;
            }
            TableKind::Pv => {
                overrides.pv_tau_max = p.tau_max;
                overrides.pv_n = p.n;
            }
        }
    }
    let cfg = RunConfig::resolve(&overrides, env)?;
    match cli.command {
        Command::Eval(a) => {
            let record = cmd_eval(&cfg, a.x, a.s, a.method, a.with_truth)?;
            write_eval(&cfg, &record, out)?;
            Ok(EXIT_OK)
        }
        Command::Scan(a) => {
            let (xs, ss) = (parse_range("x", &a.x_range)?, parse_range("s", &a.s_range)?);
            let rows = cmd_scan(&cfg, &xs, &ss, a.method, a.with_truth)?;
            write_scan(&cfg, &rows, out)?;
            Ok(EXIT_OK)
        }
        Command::Painleve(p) => {
            let summary = match p.which {
                TableKind::Pii => pii_summary(&cfg)?,
                TableKind::Pv => pv_summary(&cfg)?,
            };
            write_summary(&cfg, &summary, out)?;
            Ok(EXIT_OK)
        }
        Command::Validate(v) => {
            let report = cmd_validate(&cfg, v.suite)?;
            serde_json::to_writer_pretty(&mut *out, &report).map_err(std::io::Error::from)?;
            writeln!(out)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_VALIDATION })
        }
    }
}

/// `a:b:step` or a single value `a`.
pub fn parse_range(what: &str, text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |p: &str| {
        p.trim().parse::<f64>().map_err(|_| Error::invalid(format!("--{what}-range: cannot parse '{p}' in '{text}'")))
    };
    match parts.as_slice() {
        [a] => Ok(vec![num(a)?]),
        [a, b, step] => axis(num(a)?, num(b)?, num(step)?),
        _ => Err(Error::invalid(format!("--{what}-range expects a:b:step, got '{text}'"))),
    }
}

fn truth_options(cfg: &RunConfig) -> TruthOptions {
    TruthOptions { nodes: cfg.nodes, eps: cfg.eps, ..TruthOptions::default() }
}

/// Painlevé tables, built only when some point needs them.
#[derive(Default)]
struct Tables {
    pii: Option<PainleveIITable>,
    pv: Option<SigmaPVTable>,
}

impl Tables {
    fn for_regimes(cfg: &RunConfig, regimes: impl IntoIterator<Item = Regime>) -> Result<Self> {
        let mut t = Tables::default();
        for r in regimes {
            if r == Regime::Transition && t.pii.is_none() {
                t.pii = Some(load_or_build_pii(cfg)?.0);
            }
            if r == Regime::PainleveV && t.pv.is_none() {
                t.pv = Some(load_or_build_pv(cfg)?.0);
            }
        }
        Ok(t)
    }

    fn predict(&self, regime: Regime, x: f64, s: f64) -> Result<f64> {
        regime_prediction(regime, x, s, self.pii.as_ref(), self.pv.as_ref())
    }
}

/// One `eval` result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub x: f64,
    pub s: f64,
    pub method: Method,
    /// The method's value of log D.
    pub log_d: f64,
    pub regime: Regime,
    pub l: Option<f64>,
    pub y: Option<f64>,
    pub truth: Option<f64>,
    /// log_d − truth, for the expansion methods.
    pub residual: Option<f64>,
}

/// Evaluates log D at (x, s) with `method`.
pub fn cmd_eval(cfg: &RunConfig, x: f64, s: f64, method: Method, with_truth: bool) -> Result<EvalRecord> {
    if !(x.is_finite() && x >= 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("need finite x >= 0 and finite s, got x = {x}, s = {s}")));
    }
    let report = classify_regime(x, s);
    let truth = || gap_log_det_with(x, s, &truth_options(cfg)).map(|r| r.log_det);
    let (log_d, truth) = match method {
        Method::Quad => (truth()?, None),
        _ => {
            let regime = method.forced_regime().unwrap_or(report.regime);
            let tables = Tables::for_regimes(cfg, [regime])?;
            let value = tables.predict(regime, x, s).map_err(|e| method.explain(regime, e))?;
            let cheap = x <= AUTO_TRUTH_MAX_X && cfg.nodes <= AUTO_TRUTH_MAX_NODES;
            let want = with_truth || (method == Method::Auto && cheap);
            (value, if want { Some(truth()?) } else { None })
        }
    };
    Ok(EvalRecord {
        x,
        s,
        method,
        log_d,
        regime: report.regime,
        l: report.l,
        y: report.y,
        truth,
        residual: truth.map(|t| log_d - t),
    })
}

fn write_eval(cfg: &RunConfig, r: &EvalRecord, out: &mut dyn Write) -> Result<()> {
    match cfg.output_format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, r).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "x,s,method,log_d,regime,l,y,truth,residual")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                num(r.x),
                num(r.s),
                r.method.name(),
                num(r.log_d),
                r.regime,
                opt(r.l),
                opt(r.y),
                opt(r.truth),
                opt(r.residual)
            )?;
        }
    }
    Ok(())
}

/// One report per grid point in s-major order. Per-point failures land in
/// the report's error field.
pub fn cmd_scan(cfg: &RunConfig, xs: &[f64], ss: &[f64], method: Method, with_truth: bool) -> Result<Vec<RegimeReport>> {
    if xs.is_empty() || ss.is_empty() {
        return Err(Error::invalid("scan ranges must be nonempty"));
    }
    let points: Vec<(f64, f64)> = ss.iter().flat_map(|&s| xs.iter().map(move |&x| (x, s))).collect();
    let target = |x: f64, s: f64| method.forced_regime().unwrap_or(classify_regime(x, s).regime);
    let tables = match method {
        Method::Quad => Tables::default(),
        _ => Tables::for_regimes(cfg, points.iter().map(|&(x, s)| target(x, s)))?,
    };
    let opts = truth_options(cfg);
    let compute_truth = with_truth || method == Method::Quad;
    Ok(points
        .par_iter()
        .map(|&(x, s)| {
            let mut report = classify_regime(x, s);
            let mut errors = Vec::new();
            if method != Method::Quad {
                let regime = target(x, s);
                match tables.predict(regime, x, s).map_err(|e| method.explain(regime, e)) {
                    Ok(v) => report.prediction = Some(v),
                    Err(e) => errors.push(e.to_string()),
                }
            }
            if compute_truth {
                match gap_log_det_with(x, s, &opts) {
                    Ok(t) => report = report.with_truth(t.log_det),
                    Err(e) => errors.push(format!("truth: {e}")),
                }
            }
            if !errors.is_empty() {
                report = report.with_error(errors.join("; "));
            }
            report
        })
        .collect())
}

/// Header of the scan CSV.
pub const SCAN_HEADER: &str = "x,s,l,y,regime,prediction,truth,residual,error";

fn write_scan(cfg: &RunConfig, rows: &[RegimeReport], out: &mut dyn Write) -> Result<()> {
    match cfg.output_format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "{SCAN_HEADER}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    num(r.x),
                    num(r.s),
                    opt(r.l),
                    opt(r.y),
                    r.regime,
                    opt(r.prediction),
                    opt(r.truth),
                    opt(r.residual),
                    csv_field(r.error.as_deref().unwrap_or(""))
                )?;
            }
        }
    }
    Ok(())
}

/// Accuracy figures of a Painlevé table and where it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableSummary {
    pub kind: &'static str,
    pub cache_hit: bool,
    pub cache_file: PathBuf,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    /// Largest residual of the discretised equation.
    pub max_residual: f64,
    /// pii: |u(t_max)/Ai(t_max) − 1|
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_u_mismatch: Option<f64>,
    /// pii: |u′(t_max)/Ai′(t_max) − 1|
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_du_mismatch: Option<f64>,
    /// pii: |u(t_min)/√(−t_min/2) − 1|
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_mismatch: Option<f64>,
    /// pv: |v(τ_max) + τ_max² + 1/4|
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_mismatch: Option<f64>,
}

pub fn pii_summary(cfg: &RunConfig) -> Result<TableSummary> {
    let (table, outcome) = load_or_build_pii(cfg)?;
    let (ru, rdu) = table.right_boundary_mismatch()?;
    Ok(TableSummary {
        kind: "pii",
        cache_hit: outcome.hit,
        cache_file: outcome.path,
        lo: table.t_min(),
        hi: table.t_max(),
        n: table.len(),
        max_residual: table.max_discrete_residual(),
        right_u_mismatch: Some(ru),
        right_du_mismatch: Some(rdu),
        left_mismatch: Some(table.left_boundary_mismatch()),
        tail_mismatch: None,
    })
}

pub fn pv_summary(cfg: &RunConfig) -> Result<TableSummary> {
    let (table, outcome) = load_or_build_pv(cfg)?;
    let hi = table.tau_max();
    let tail = table.v[table.len() - 1] + hi * hi + 0.25;
    Ok(TableSummary {
        kind: "pv",
        cache_hit: outcome.hit,
        cache_file: outcome.path,
        lo: table.tau_min(),
        hi,
        n: table.len(),
        max_residual: table.max_residual(),
        right_u_mismatch: None,
        right_du_mismatch: None,
        left_mismatch: None,
        tail_mismatch: Some(tail.abs()),
    })
}

fn write_summary(cfg: &RunConfig, s: &TableSummary, out: &mut dyn Write) -> Result<()> {
    match cfg.output_format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, s).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "key,value")?;
            writeln!(out, "kind,{}", s.kind)?;
            writeln!(out, "cache_hit,{}", s.cache_hit)?;
            writeln!(out, "cache_file,{}", csv_field(&s.cache_file.to_string_lossy()))?;
            writeln!(out, "lo,{}", num(s.lo))?;
            writeln!(out, "hi,{}", num(s.hi))?;
            writeln!(out, "n,{}", s.n)?;
            writeln!(out, "max_residual,{}", num(s.max_residual))?;
            let optional = [
                ("right_u_mismatch", s.right_u_mismatch),
                ("right_du_mismatch", s.right_du_mismatch),
                ("left_mismatch", s.left_mismatch),
                ("tail_mismatch", s.tail_mismatch),
            ];
            for (k, v) in optional {
                if let Some(v) = v {
                    writeln!(out, "{k},{}", num(v))?;
                }
            }
        }
    }
    Ok(())
}

/// The JSON document printed by `validate`.
#[derive(Debug, Clone, Serialize)]
pub struct ValidateOutput {
    pub suite: &'static str,
    pub passed: bool,
    pub failed: usize,
    /// Failed checks that could not be evaluated at all.
    pub infrastructure_failures: usize,
    pub checks: Vec<crate::validation::Check>,
}

pub fn cmd_validate(cfg: &RunConfig, suite: Suite) -> Result<ValidateOutput> {
    let (pii, _) = load_or_build_pii(cfg)?;
    let (pv, _) = load_or_build_pv(cfg)?;
    let report = run_suite(suite, &pii, &pv);
    Ok(ValidateOutput {
        suite: report.suite,
        passed: report.passed,
        failed: report.checks.iter().filter(|c| !c.passed).count(),
        infrastructure_failures: report.checks.iter().filter(|c| c.error.is_some()).count(),
        checks: report.checks,
    })
}
