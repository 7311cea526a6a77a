//! Command-line front end. Every subcommand prints one JSON object (with a
//! `provenance` member) or a CSV table, and maps failures to exit codes:
//! 0 success, 1 failed validation, 2 usage, 3 numerical, 4 I/O.

use crate::error::Error;
use crate::inversion::{default_grid, invert_density_with, log_grid, InversionMethod, InversionOptions};
use crate::moments::{mean_asymptotic, mean_exact, mean_via_transform, MeanRegime};
use crate::params::ModelParams;
use crate::simulate::{mc_passage, write_samples, McConfig};
use crate::spectral::{default_formula, regime_warning, theta_max, theta_max_asym, ThetaFormula};
use crate::transforms::laplace;
use crate::validation::{run_all, run_criterion, ValidationOptions, ValidationReport, CRITERIA};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubcommandKind {
    Transform,
    Mean,
    ThetaMax,
    Density,
    Simulate,
    Asymptotic,
    Validate,
}

impl SubcommandKind {
    pub fn name(self) -> &'static str {
        match self {
            SubcommandKind::Transform => "transform",
            SubcommandKind::Mean => "mean",
            SubcommandKind::ThetaMax => "theta-max",
            SubcommandKind::Density => "density",
            SubcommandKind::Simulate => "simulate",
            SubcommandKind::Asymptotic => "asymptotic",
            SubcommandKind::Validate => "validate",
        }
    }
}

/// Closed-form approximations selectable with `asymptotic --formula`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaName {
    /// Mean, large level with positive drift.
    MeanLargeLevel,
    /// Mean, strongly negative drift.
    MeanUndercapacity,
    /// Mean, small drift with `βb = O(1)`.
    MeanTransition,
    /// `θ_max`, fixed negative drift, large level.
    ThetaNegativeDrift,
    /// `θ_max`, zero drift, large level.
    ThetaZeroDrift,
    /// `θ_max`, fixed positive drift, large level.
    ThetaPositiveDrift,
    /// `θ_max`, small drift with `βb` fixed.
    ThetaGammaScaling,
    /// `θ_max`, strongly negative drift.
    ThetaStrongUndercapacity,
    /// `θ_max`, strongly positive drift.
    ThetaStrongOvercapacity,
    /// `θ_max`, small level with strongly negative drift.
    ThetaSmallLevel,
}

impl FormulaName {
    fn theta(self) -> Option<ThetaFormula> {
        Some(match self {
            FormulaName::ThetaNegativeDrift => ThetaFormula::LargeLevelNegativeDrift,
            FormulaName::ThetaZeroDrift => ThetaFormula::LargeLevelZeroDrift,
            FormulaName::ThetaPositiveDrift => ThetaFormula::LargeLevelPositiveDrift,
            FormulaName::ThetaGammaScaling => ThetaFormula::GammaScaling,
            FormulaName::ThetaStrongUndercapacity => ThetaFormula::StrongUndercapacity,
            FormulaName::ThetaStrongOvercapacity => ThetaFormula::StrongOvercapacity,
            FormulaName::ThetaSmallLevel => ThetaFormula::SmallLevel,
            _ => return None,
        })
    }

    fn mean(self) -> Option<MeanRegime> {
        Some(match self {
            FormulaName::MeanLargeLevel => MeanRegime::LargeLevel,
            FormulaName::MeanUndercapacity => MeanRegime::Undercapacity,
            FormulaName::MeanTransition => MeanRegime::Transition,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Talbot,
    EulerSummation,
    ResidueTail,
}

#[derive(Debug, Parser)]
#[command(name = "hwfpt", version, about = "First-passage times of the Halfin-Whitt diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Drift offset beta.
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    /// Target level b > 0.
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    /// Start point x < b.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    x: f64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the result here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Laplace transform E[exp(-theta T)] at complex theta.
    Transform {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_negative_numbers = true)]
        theta_re: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        theta_im: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact mean and its transform-derivative cross-check.
    Mean {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dominant singularity of the transform.
    ThetaMax {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Passage-time density and CDF on a log-spaced grid.
    Density {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_negative_numbers = true)]
        t_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t_max: Option<f64>,
        #[arg(long)]
        t_points: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodName>,
        #[arg(long)]
        nodes: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo passage times.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n_paths: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        dt: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, allow_negative_numbers = true)]
        t_cap: Option<f64>,
        /// Detect crossings between grid points.
        #[arg(long)]
        bridge: bool,
        /// Write every passage time, one per line.
        #[arg(long)]
        raw_dump: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// A closed-form approximation next to the numerical value.
    Asymptotic {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        formula: FormulaName,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the cross-oracle suite and print a pass/fail table.
    Validate {
        #[arg(long)]
        seed: Option<u64>,
        /// Smaller Monte Carlo runs.
        #[arg(long)]
        quick: bool,
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// A fully parsed invocation. Options hold only flags given explicitly,
/// in canonical text form, so `parse(to_argv())` reproduces the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub subcommand: SubcommandKind,
    pub params: Option<ModelParams>,
    pub options: BTreeMap<String, String>,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

impl RunSpec {
    /// Parses `argv` (program name first).
    pub fn parse<I, S>(argv: I) -> Result<RunSpec, clap::Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv)?;
        let mut options = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                options.insert(k.to_string(), v);
            }
        };
        let s = |v: Option<f64>| v.map(|x| x.to_string());
        let (subcommand, model, out) = match cli.command {
            Command::Transform { model, theta_re, theta_im, out } => {
                put("theta-re", s(theta_re));
                put("theta-im", s(theta_im));
                (SubcommandKind::Transform, Some(model), out)
            }
            Command::Mean { model, out } => (SubcommandKind::Mean, Some(model), out),
            Command::ThetaMax { model, out } => (SubcommandKind::ThetaMax, Some(model), out),
            Command::Density { model, t_min, t_max, t_points, method, nodes, out } => {
                put("t-min", s(t_min));
                put("t-max", s(t_max));
                put("t-points", t_points.map(|v| v.to_string()));
                put("method", method.map(value_name));
                put("nodes", nodes.map(|v| v.to_string()));
                (SubcommandKind::Density, Some(model), out)
            }
            Command::Simulate { model, n_paths, dt, seed, t_cap, bridge, raw_dump, out } => {
                put("n-paths", n_paths.map(|v| v.to_string()));
                put("dt", s(dt));
                put("seed", seed.map(|v| v.to_string()));
                put("t-cap", s(t_cap));
                put("bridge", bridge.then(|| "true".to_string()));
                put("raw-dump", raw_dump.map(|p| p.to_string_lossy().into_owned()));
                (SubcommandKind::Simulate, Some(model), out)
            }
            Command::Asymptotic { model, formula, out } => {
                put("formula", Some(value_name(formula)));
                (SubcommandKind::Asymptotic, Some(model), out)
            }
            Command::Validate { seed, quick, criterion, out } => {
                put("seed", seed.map(|v| v.to_string()));
                put("quick", quick.then(|| "true".to_string()));
                put("criterion", criterion.map(|v| v.to_string()));
                (SubcommandKind::Validate, None, out)
            }
        };
        Ok(RunSpec {
            subcommand,
            params: model.map(|m| ModelParams { beta: m.beta, b: m.b, x: m.x }),
            options,
            output_format: out.format,
            output_path: out.output,
        })
    }

    /// The canonical command line for this spec.
    pub fn to_argv(&self) -> Vec<String> {
        let mut v = vec!["hwfpt".to_string(), self.subcommand.name().to_string()];
        if let Some(p) = self.params {
            for (k, x) in [("--beta", p.beta), ("--b", p.b), ("--x", p.x)] {
                v.push(k.to_string());
                v.push(x.to_string());
            }
        }
        for (k, val) in &self.options {
            v.push(format!("--{k}"));
            if val != "true" || !matches!(k.as_str(), "bridge" | "quick") {
                v.push(val.clone());
            }
        }
        v.push("--format".to_string());
        v.push(value_name(self.output_format));
        if let Some(p) = &self.output_path {
            v.push("--output".to_string());
            v.push(p.to_string_lossy().into_owned());
        }
        v
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Option<T> {
        self.options.get(key).and_then(|s| s.parse().ok())
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Option<T> {
        self.options.get(key).and_then(|s| T::from_str(s, false).ok())
    }

    fn seed(&self) -> Option<u64> {
        match self.subcommand {
            SubcommandKind::Simulate => Some(self.get("seed").unwrap_or(DEFAULT_SEED)),
            SubcommandKind::Validate => Some(self.get("seed").unwrap_or(ValidationOptions::default().seed)),
            _ => None,
        }
    }
}

/// Seed used by `simulate` when none is given.
pub const DEFAULT_SEED: u64 = 1;
/// Paths used by `simulate` when none are given.
pub const DEFAULT_PATHS: usize = 10_000;
/// Points on the `density` grid when none are given.
pub const DEFAULT_POINTS: usize = 201;

/// A result ready for either output format.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub warnings: Vec<String>,
    pub passed: bool,
    /// Human-readable summary printed by `validate`.
    pub summary: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

fn table(header: &[&str], rows: Vec<Vec<Cell>>) -> (Vec<String>, Vec<Vec<Cell>>) {
    (header.iter().map(|s| s.to_string()).collect(), rows)
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serialises")
}

/// Failures of a run, before they become exit codes.
#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Numerical(Error),
    Io(std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn checked_params(spec: &RunSpec) -> Result<ModelParams, RunError> {
    let p = spec.params.ok_or_else(|| RunError::Usage("--beta and --b are required".into()))?;
    p.validate().map_err(|e| RunError::Usage(format!("--beta/--b/--x: {e}")))?;
    Ok(p)
}

/// Computes the result of `spec` without writing anything.
pub fn execute(spec: &RunSpec) -> Result<Rendered, RunError> {
    let mut warnings = Vec::new();
    let mut passed = true;
    let mut summary = None;
    let (json, (header, rows)) = match spec.subcommand {
        SubcommandKind::Transform => {
            let p = checked_params(spec)?;
            let theta = Complex64::new(spec.get("theta-re").unwrap_or(0.0), spec.get("theta-im").unwrap_or(0.0));
            let l = laplace(theta, p)?;
            let v = l.to_complex();
            let json = json!({
                "theta_re": theta.re, "theta_im": theta.im,
                "value_re": v.re, "value_im": v.im,
                "mantissa_re": l.value.re, "mantissa_im": l.value.im, "log_scale": l.log_scale,
            });
            let row = vec![Cell::Num(theta.re), Cell::Num(theta.im), Cell::Num(v.re), Cell::Num(v.im), Cell::Num(l.log_scale)];
            (json, table(&["theta_re", "theta_im", "value_re", "value_im", "log_scale"], vec![row]))
        }
        SubcommandKind::Mean => {
            let p = checked_params(spec)?;
            let exact = mean_exact(p)?;
            let deriv = mean_via_transform(p)?;
            let gap = if exact.value == 0.0 { 0.0 } else { ((deriv.value - exact.value) / exact.value).abs() };
            let json = json!({
                "exact": exact.value, "exact_method": exact.method,
                "transform_derivative": deriv.value, "relative_gap": gap,
            });
            let method = to_json(&exact.method).as_str().unwrap_or_default().to_string();
            let row = vec![Cell::Num(exact.value), Cell::Text(method), Cell::Num(deriv.value), Cell::Num(gap)];
            (json, table(&["exact", "exact_method", "transform_derivative", "relative_gap"], vec![row]))
        }
        SubcommandKind::ThetaMax => {
            let p = checked_params(spec)?;
            let r = theta_max(p)?;
            let f = default_formula(&p);
            let asym = theta_max_asym(p, f).ok();
            let json = json!({
                "theta_max": r.theta_max, "residual": r.residual, "bracket": [r.bracket.0, r.bracket.1],
                "iterations": r.iterations, "seed_source": r.seed_source,
                "asymptotic": asym, "asymptotic_formula": f,
            });
            let source = to_json(&r.seed_source).as_str().unwrap_or_default().to_string();
            let fname = to_json(&f).as_str().unwrap_or_default().to_string();
            let row = vec![
                Cell::Num(r.theta_max),
                Cell::Num(r.residual),
                Cell::Num(r.bracket.0),
                Cell::Num(r.bracket.1),
                Cell::Int(r.iterations as u64),
                Cell::Text(source),
                Cell::Num(asym.unwrap_or(f64::NAN)),
                Cell::Text(fname),
            ];
            let h = ["theta_max", "residual", "bracket_lo", "bracket_hi", "iterations", "seed_source", "asymptotic", "asymptotic_formula"];
            (json, table(&h, vec![row]))
        }
        SubcommandKind::Density => {
            let p = checked_params(spec)?;
            let n = spec.get("t-points").unwrap_or(DEFAULT_POINTS);
            if n < 2 {
                return Err(RunError::Usage("--t-points must be at least 2".into()));
            }
            let (lo, hi) = match (spec.get::<f64>("t-min"), spec.get::<f64>("t-max")) {
                (Some(a), Some(b)) => (a, b),
                (a, b) => {
                    let g = default_grid(p, 3)?;
                    (a.unwrap_or(g[0]), b.unwrap_or(g[2]))
                }
            };
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(RunError::Usage(format!("--t-min/--t-max: need 0 < t-min < t-max, got {lo}, {hi}")));
            }
            let method = match spec.get_enum::<MethodName>("method").unwrap_or(MethodName::Talbot) {
                MethodName::Talbot => InversionMethod::Talbot,
                MethodName::EulerSummation => InversionMethod::EulerSummation,
                MethodName::ResidueTail => InversionMethod::ResidueTail,
            };
            let nodes = spec.get("nodes").unwrap_or(InversionOptions::default().nodes);
            let grid = log_grid(lo, hi, n);
            let c = invert_density_with(p, &grid, InversionOptions { method, nodes, check_doubling: true })?;
            if c.clipped > 0 {
                warnings.push(format!("{} values in (-1e-8, 0) were set to zero", c.clipped));
            }
            let rows = (0..grid.len()).map(|i| vec![Cell::Num(c.t_grid[i]), Cell::Num(c.density[i]), Cell::Num(c.cdf[i])]).collect();
            (to_json(&c), table(&["t", "density", "cdf"], rows))
        }
        SubcommandKind::Simulate => {
            let p = checked_params(spec)?;
            let mut cfg = McConfig::new(p, spec.get("n-paths").unwrap_or(DEFAULT_PATHS), spec.seed().unwrap_or(DEFAULT_SEED))
                .map_err(|e| RunError::Usage(format!("--n-paths: {e}")))?;
            if let Some(dt) = spec.get("dt") {
                cfg.step.dt = dt;
            }
            cfg.step.bridge = spec.options.contains_key("bridge");
            if let Some(t) = spec.get("t-cap") {
                cfg.t_cap = t;
            }
            cfg.validate().map_err(|e| RunError::Usage(format!("--dt/--t-cap: {e}")))?;
            let dump: Option<PathBuf> = spec.get("raw-dump");
            cfg.keep_samples = dump.is_some();
            let mut s = mc_passage(cfg)?;
            if let Some(path) = dump {
                write_samples(&path, s.samples.as_deref().unwrap_or_default())?;
                s.samples = None;
            }
            if let Some(w) = s.cap_warning {
                warnings.push(format!("{} of {} paths reached t_cap = {}", w.n_capped, s.n_paths, w.t_cap));
            }
            let q = s.quantiles;
            let row = vec![
                Cell::Num(s.mean),
                Cell::Num(s.stderr),
                Cell::Num(q.p5),
                Cell::Num(q.p25),
                Cell::Num(q.p50),
                Cell::Num(q.p75),
                Cell::Num(q.p95),
                Cell::Int(s.n_paths as u64),
                Cell::Int(s.n_capped as u64),
            ];
            let h = ["mean", "stderr", "p5", "p25", "p50", "p75", "p95", "n_paths", "n_capped"];
            let mut json = to_json(&s);
            json.as_object_mut().expect("summary is an object").remove("samples");
            (json, table(&h, vec![row]))
        }
        SubcommandKind::Asymptotic => {
            let p = checked_params(spec)?;
            let name: FormulaName =
                spec.get_enum("formula").ok_or_else(|| RunError::Usage("--formula is required".into()))?;
            let (value, reference) = if let Some(f) = name.theta() {
                if let Some(w) = regime_warning(&p, f) {
                    warnings.push(w);
                }
                (theta_max_asym(p, f)?, theta_max(p)?.theta_max)
            } else {
                let r = name.mean().expect("every formula is a mean or a root");
                (mean_asymptotic(p, r)?.value, mean_exact(p)?.value)
            };
            let gap = ((value - reference) / reference).abs();
            let json = json!({ "formula": name, "value": value, "reference": reference, "relative_gap": gap });
            let row = vec![Cell::Text(value_name(name)), Cell::Num(value), Cell::Num(reference), Cell::Num(gap)];
            (json, table(&["formula", "value", "reference", "relative_gap"], vec![row]))
        }
        SubcommandKind::Validate => {
            let opts = ValidationOptions { seed: spec.seed().unwrap_or_default(), quick: spec.options.contains_key("quick") };
            let report = match spec.get::<usize>("criterion") {
                Some(id) if (1..=CRITERIA).contains(&id) => {
                    ValidationReport { options: opts, criteria: vec![run_criterion(id, opts)] }
                }
                Some(id) => return Err(RunError::Usage(format!("--criterion: no criterion {id} (1 to {CRITERIA})"))),
                None => run_all(opts),
            };
            passed = report.passed();
            summary = Some(report.table());
            let rows = report
                .criteria
                .iter()
                .map(|c| vec![Cell::Int(c.id as u64), Cell::Text(c.title.clone()), Cell::Text(c.passed.to_string())])
                .collect();
            (to_json(&report), table(&["criterion", "title", "passed"], rows))
        }
    };
    let mut json = json;
    if !warnings.is_empty() {
        json["warnings"] = to_json(&warnings);
    }
    json["provenance"] = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": spec.to_argv().join(" "),
        "seed": spec.seed(),
    });
    Ok(Rendered { json, header, rows, warnings, passed, summary })
}

impl Rendered {
    /// The CSV text: header row, one line per row, UNIX newlines.
    pub fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialise");
        s.push('\n');
        s
    }

    pub fn text(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.json_text(),
            OutputFormat::Csv => self.csv(),
        }
    }
}

/// Runs one invocation, writing results and diagnostics to the given
/// streams. Returns the exit code.
pub fn run_with_io<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let spec = match RunSpec::parse(argv) {
        Ok(s) => s,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let rendered = match execute(&spec) {
        Ok(r) => r,
        Err(RunError::Usage(m)) => {
            let _ = writeln!(stderr, "usage error: {m}");
            return EXIT_USAGE;
        }
        Err(RunError::Numerical(e)) => {
            let _ = writeln!(stderr, "{}: {}", e.name(), e);
            return EXIT_NUMERICAL;
        }
        Err(RunError::Io(e)) => {
            let _ = writeln!(stderr, "IoError: {e}");
            return EXIT_IO;
        }
    };
    for w in &rendered.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let body = rendered.text(spec.output_format);
    let written = if let Some(table) = &rendered.summary {
        stdout.write_all(table.as_bytes()).and_then(|_| match &spec.output_path {
            Some(path) => std::fs::write(path, &body),
            None => Ok(()),
        })
    } else {
        match &spec.output_path {
            Some(path) => std::fs::write(path, &body),
            None => stdout.write_all(body.as_bytes()),
        }
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "IoError: {e}");
        return EXIT_IO;
    }
    if rendered.passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION_FAILED
    }
}

/// Runs one invocation against the process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_io(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with_io(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn transform_is_normalised() {
        let (code, out, _) = run_capture(&["hwfpt", "transform", "--beta", "1", "--b", "2", "--x", "-1", "--theta-re", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["value_re"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(v["provenance"]["version"], env!("CARGO_PKG_VERSION"));
        assert!(v["provenance"]["seed"].is_null());
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let (code, _, err) = run_capture(&["hwfpt", "mean", "--beta", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--b"));
        let (code, _, err) = run_capture(&["hwfpt", "mean", "--beta", "1", "--b", "1", "--x", "2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--x"));
        let (code, _, err) = run_capture(&["hwfpt", "asymptotic", "--beta", "1", "--b", "1", "--formula", "nope"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--formula"));
    }

    #[test]
    fn numerical_errors_exit_three() {
        let (code, _, err) =
            run_capture(&["hwfpt", "asymptotic", "--beta", "1", "--b", "2", "--formula", "mean-undercapacity"]);
        assert_eq!(code, EXIT_NUMERICAL);
        assert!(err.starts_with("RegimeError"));
    }

    #[test]
    fn io_errors_exit_four() {
        let (code, _, err) =
            run_capture(&["hwfpt", "mean", "--beta", "1", "--b", "1", "--output", "/nonexistent-dir/x.json"]);
        assert_eq!(code, EXIT_IO);
        assert!(err.starts_with("IoError"));
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let (code, out, _) = run_capture(&["hwfpt", "mean", "--beta", "1", "--b", "1", "--format", "csv"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), "exact,exact_method,transform_derivative,relative_gap");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let exact = mean_exact(ModelParams::new(1.0, 1.0, 0.0).unwrap()).unwrap().value;
        assert_eq!(row[0].parse::<f64>().unwrap(), exact);
        assert_eq!(row[1], "exact");
        assert!(!out.contains('\r'));
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e3..1e3f64, any::<f64>().prop_filter("finite", |x| x.is_finite())]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn argv_round_trips(
            sub in 0usize..7,
            beta in finite(), b in finite(), x in finite(),
            a in proptest::option::of(finite()), c in proptest::option::of(finite()),
            n in proptest::option::of(1usize..1_000_000), seed in proptest::option::of(any::<u64>()),
            flag in any::<bool>(), csv in any::<bool>(), out in proptest::option::of("[a-z]{1,8}\\.out"),
            formula in 0usize..10,
        ) {
            let mut argv: Vec<String> = vec!["hwfpt".into()];
            let name = ["transform", "mean", "theta-max", "density", "simulate", "asymptotic", "validate"][sub];
            argv.push(name.into());
            if name != "validate" {
                argv.extend(["--beta".into(), beta.to_string(), "--b".into(), b.to_string(), "--x".into(), x.to_string()]);
            }
            let mut opt = |k: &str, v: Option<String>| if let Some(v) = v { argv.push(format!("--{k}")); argv.push(v); };
            match name {
                "transform" => { opt("theta-re", a.map(|v| v.to_string())); opt("theta-im", c.map(|v| v.to_string())); }
                "density" => { opt("t-min", a.map(|v| v.to_string())); opt("t-max", c.map(|v| v.to_string())); opt("t-points", n.map(|v| v.to_string())); }
                "simulate" => { opt("dt", a.map(|v| v.to_string())); opt("n-paths", n.map(|v| v.to_string())); opt("seed", seed.map(|v| v.to_string())); }
                "asymptotic" => {
                    let f = FormulaName::value_variants()[formula];
                    opt("formula", Some(value_name(f)));
                }
                "validate" => { opt("seed", seed.map(|v| v.to_string())); opt("criterion", n.map(|v| v.to_string())); }
                _ => {}
            }
            if flag && name == "simulate" { argv.push("--bridge".into()); }
            if flag && name == "validate" { argv.push("--quick".into()); }
            if csv { argv.push("--format".into()); argv.push("csv".into()); }
            if let Some(o) = out { argv.push("--output".into()); argv.push(o); }
            let spec = RunSpec::parse(&argv).unwrap();
            let again = RunSpec::parse(spec.to_argv()).unwrap();
            prop_assert_eq!(&spec, &again);
            prop_assert_eq!(spec.to_argv(), again.to_argv());
        }
    }
}
