//! The `nctorus` command-line tool. Reports go to stdout as JSON, summaries
//! to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::Element;
use crate::error::Error;
use crate::phases::{LatticePoint, ThetaData, ThetaSpec};
use crate::spectral::{
    build_truncation, cstar_inverse_norm, neumann_invert, opnorm_estimate, spectral_radius_l1v,
    ROW_CAP,
};
use crate::structure::{average_error, average_error_bound, simplicity_with_box, DEFAULT_HEURISTIC_BOX};
use crate::suites::run_all;
use crate::weights::{grs_profile, Weight};

/// Trials per randomized suite in `check`.
const CHECK_TRIALS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "nctorus", version, about = "Twisted convolution algebras on Z^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed of the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress the summary on stderr.
    #[arg(long)]
    pub json_only: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized identity suites for the configured theta and weight.
    Check(Common),
    /// Degeneracy of the cocycle and the resulting simplicity verdict.
    Simplicity {
        #[command(flatten)]
        common: Common,
        /// Search box for float-mode configurations.
        #[arg(long = "box", default_value_t = DEFAULT_HEURISTIC_BOX)]
        search_box: i64,
    },
    /// Neumann-series inversion of an element.
    Invert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: PathBuf,
    },
    /// Spectral radius of `δ_x` in the weighted algebra and in the C*-algebra.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Lattice point, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
    /// Distance of the averages `J_m(f)` from the centralizer projection.
    Average {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        element: PathBuf,
        /// Generator index, 1-based.
        #[arg(long)]
        j: usize,
        /// Averaging lengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 1000])]
        m: Vec<u64>,
    },
    /// Profile `v(kx)^{1/k}` and the GRS verdict of the configured weight.
    Grs {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_inversion_tol")]
    pub inversion_tol: f64,
    #[serde(default = "default_opnorm_tol")]
    pub opnorm_tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default = "default_truncation_n")]
    pub truncation_n: i64,
}

fn default_inversion_tol() -> f64 {
    1e-10
}
fn default_opnorm_tol() -> f64 {
    1e-10
}
fn default_max_terms() -> usize {
    200
}
fn default_truncation_n() -> i64 {
    8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            inversion_tol: default_inversion_tol(),
            opnorm_tol: default_opnorm_tol(),
            max_terms: default_max_terms(),
            truncation_n: default_truncation_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub theta: ThetaSpec,
    #[serde(default = "Weight::one")]
    pub weight: Weight,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub theta: Arc<ThetaData>,
    pub weight: Weight,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl RunConfig {
    pub fn load(self) -> Result<Loaded, Error> {
        let theta: ThetaData = self.theta.try_into()?;
        self.weight.validate()?;
        let t = &self.tolerances;
        if !(t.inversion_tol > 0.0 && t.opnorm_tol > 0.0) || t.max_terms == 0 || t.truncation_n <= 0 {
            return Err(Error::Config("all tolerances must be positive".into()));
        }
        let side = 2 * t.truncation_n as u128 + 1;
        let rows = side.checked_pow(theta.n() as u32).unwrap_or(u128::MAX);
        if rows > ROW_CAP as u128 {
            return Err(Error::Config(format!(
                "truncation_n = {} gives {rows} rows, above the cap of {ROW_CAP}",
                t.truncation_n
            )));
        }
        Ok(Loaded {
            theta: Arc::new(theta),
            weight: self.weight,
            tolerances: self.tolerances,
            seed: self.seed,
        })
    }
}

/// Usage and parse problems exit with 2, domain errors with 1.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

struct Outcome {
    report: Value,
    summary: String,
    /// Set by `check` when a suite fails.
    failed: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_config(common: &Common) -> Result<Loaded, Failure> {
    let text = read(&common.config)?;
    let cfg: RunConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", common.config.display())))?;
    let mut loaded = cfg
        .load()
        .map_err(|e| Failure::Usage(format!("{}: {e}", common.config.display())))?;
    if let Some(seed) = common.seed {
        loaded.seed = seed;
    }
    Ok(loaded)
}

fn load_element(theta: &Arc<ThetaData>, path: &Path) -> Result<Element, Failure> {
    let text = read(path)?;
    Element::from_json(theta.clone(), &text).map_err(|e| match e {
        Error::DimensionMismatch { .. } => Failure::Domain(e),
        other => Failure::Usage(format!("{}: {other}", path.display())),
    })
}

fn parse_point(text: &str) -> Result<LatticePoint, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map(LatticePoint)
        .map_err(|e| Failure::Usage(format!("bad lattice point {text:?}: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn cmd_check(c: &Loaded) -> Result<Outcome, Failure> {
    let report = run_all(c.theta.clone(), &c.weight, c.seed, CHECK_TRIALS)?;
    let failing: Vec<&str> = report.suites.iter().filter(|s| !s.passed()).map(|s| s.name).collect();
    let summary = if failing.is_empty() {
        format!("all {} suites passed (seed {})", report.suites.len(), c.seed)
    } else {
        format!("failing suites: {}", failing.join(", "))
    };
    Ok(Outcome {
        failed: !report.passed,
        report: to_value(&report),
        summary,
    })
}

fn cmd_simplicity(c: &Loaded, search_box: i64) -> Result<Outcome, Failure> {
    let v = simplicity_with_box(&c.theta, search_box)?;
    let summary = match v.simple {
        Some(true) => "nondegenerate cocycle: the algebra is simple".to_string(),
        Some(false) => format!(
            "degenerate cocycle (central δ_m at m = {}): not simple",
            v.degeneracy.witness.as_ref().map_or("?".into(), |m| m.to_string())
        ),
        None => "float-mode angles: undecidable, heuristic result only".to_string(),
    };
    Ok(Outcome {
        report: to_value(&v),
        summary,
        failed: false,
    })
}

fn cmd_invert(c: &Loaded, f: &Element) -> Result<Outcome, Failure> {
    let t = &c.tolerances;
    let inv = neumann_invert(f, t.inversion_tol, t.max_terms, &c.weight)?;
    let cstar = match cstar_inverse_norm(f, t.truncation_n) {
        Ok(r) => to_value(&r),
        Err(e) => json!({"error": e.to_string()}),
    };
    let summary = format!(
        "{} terms, l1 residual {:.3e}, weighted residual {:.3e}{}",
        inv.terms_used,
        inv.residual_l1,
        inv.residual_weighted,
        if inv.diverged_weighted { ", weighted series diverges" } else { "" }
    );
    let mut report = to_value(&inv);
    report["cstar_inverse_norm"] = cstar;
    Ok(Outcome {
        report,
        summary,
        failed: false,
    })
}

fn cmd_spectrum(c: &Loaded, x: &LatticePoint, n_max: usize) -> Result<Outcome, Failure> {
    Error::check_dim(c.theta.n(), x.dim())?;
    if x.is_zero() {
        return Err(Error::InvalidInput("spectrum needs x != 0".into()).into());
    }
    let profile = grs_profile(&c.weight, x, n_max)?;
    let radius = spectral_radius_l1v(c.theta.clone(), &c.weight, x, n_max)?;
    let n = c.tolerances.truncation_n.max(x.max_abs() as i64 + 2);
    let delta = Element::delta(c.theta.clone(), x.clone())?;
    let cstar = opnorm_estimate(&build_truncation(&delta, n)?, c.tolerances.opnorm_tol)?;
    let l1v_radius = radius.sequence.last().copied().unwrap_or(f64::NAN);
    let verdict = &radius.verdict;
    let dichotomy = match verdict.holds() {
        Some(true) => "spectral radius 1 in both algebras",
        Some(false) => "spectral radius exceeds 1 in the weighted algebra but equals 1 in C*",
        None => "no analytic verdict for this weight",
    };
    let summary = format!(
        "weighted radius ≈ {l1v_radius:.6}, C*-norm in [{:.9}, {:.9}]: {dichotomy}",
        cstar.lower_bound, cstar.upper_bound
    );
    Ok(Outcome {
        report: json!({
            "x": x,
            "grs_profile": profile,
            "spectral_radius_l1v": radius,
            "cstar_norm": cstar,
            "dichotomy": dichotomy,
        }),
        summary,
        failed: false,
    })
}

/// Least-squares slope and intercept of `log err` against `log m`.
fn fit_rate(ms: &[u64], errs: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = ms
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > 0.0)
        .map(|(m, e)| ((*m as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    Some((slope, (my - slope * mx).exp()))
}

fn cmd_average(f: &Element, j: usize, ms: &[u64]) -> Result<Outcome, Failure> {
    if ms.is_empty() {
        return Err(Failure::Usage("--m needs at least one length".into()));
    }
    let mut rows = Vec::with_capacity(ms.len());
    let mut errs = Vec::with_capacity(ms.len());
    for &m in ms {
        let err = average_error(f, j, m)?;
        let bound = average_error_bound(f, j, m)?;
        errs.push(err);
        rows.push(json!({"m": m, "error_l1": err, "bound": bound, "within_bound": err <= bound}));
    }
    let rate = fit_rate(ms, &errs);
    let summary = match rate {
        Some((slope, _)) => format!("error decays like m^{slope:.3}"),
        None => "error vanishes or cannot be fitted".to_string(),
    };
    Ok(Outcome {
        report: json!({
            "j": j,
            "averages": rows,
            "rate": rate.map(|(exponent, constant)| json!({"exponent": exponent, "constant": constant})),
        }),
        summary,
        failed: false,
    })
}

fn cmd_grs(c: &Loaded, x: &LatticePoint, n_max: usize) -> Result<Outcome, Failure> {
    Error::check_dim(c.theta.n(), x.dim())?;
    let profile = grs_profile(&c.weight, x, n_max)?;
    let summary = format!("{}: {:?}", profile.weight, profile.verdict);
    Ok(Outcome {
        report: to_value(&profile),
        summary,
        failed: false,
    })
}

fn dispatch(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Check(common) => cmd_check(&load_config(common)?),
        Command::Simplicity { common, search_box } => {
            cmd_simplicity(&load_config(common)?, *search_box)
        }
        Command::Invert { common, element } => {
            let c = load_config(common)?;
            let f = load_element(&c.theta, element)?;
            cmd_invert(&c, &f)
        }
        Command::Spectrum { common, point, n_max } => {
            let c = load_config(common)?;
            cmd_spectrum(&c, &parse_point(point)?, *n_max)
        }
        Command::Average { common, element, j, m } => {
            let c = load_config(common)?;
            let f = load_element(&c.theta, element)?;
            cmd_average(&f, *j, m)
        }
        Command::Grs { common, point, n_max } => {
            let c = load_config(common)?;
            cmd_grs(&c, &parse_point(point)?, *n_max)
        }
    }
}

fn json_only(cmd: &Command) -> bool {
    match cmd {
        Command::Check(c) => c.json_only,
        Command::Simplicity { common, .. }
        | Command::Invert { common, .. }
        | Command::Spectrum { common, .. }
        | Command::Average { common, .. }
        | Command::Grs { common, .. } => common.json_only,
    }
}

fn print(v: &Value) {
    // a closed pipe is not worth a panic
    let text = serde_json::to_string_pretty(v).unwrap_or_else(|_| "null".into());
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub fn run(cli: Cli) -> ExitCode {
    let quiet = json_only(&cli.command);
    match dispatch(&cli.command) {
        Ok(outcome) => {
            print(&outcome.report);
            if !quiet {
                eprintln!("{}", outcome.summary);
            }
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Domain(e)) => {
            print(&json!({"error": e.to_string(), "kind": format!("{e:?}")}));
            if !quiet {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

pub fn main() -> ExitCode {
    run(Cli::parse())
}
