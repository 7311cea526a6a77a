//! The cross-oracle suite: every analytic result checked against an
//! independent computation, a closed form or Monte Carlo.
//!
//! Reports contain no timings, so the same options always render the same
//! text.

use crate::error::Result;
use crate::inversion::{default_grid, invert_density, limit_law};
use crate::moments::{mean_asymptotic, mean_exact, mean_via_transform, MeanRegime};
use crate::params::ModelParams;
use crate::simulate::{
    cycle_mean_check, hitting_prob_check, ks_distance, ks_p_value, mc_passage, path_rng, McConfig, StepOptions,
};
use crate::special::{airy_ai_first_zero, pcf, pcf_by_quadrature, pcf_dz};
use crate::spectral::{beta_zero_root, eta_solve, omega_solve, theta_max, theta_max_asym, ThetaFormula};
use crate::transforms::{laplace, ode_residual};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const CRITERIA: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Monte Carlo sizes cut fifty-fold; tolerances unchanged.
    pub quick: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { seed: 20_240_601, quick: false }
    }
}

impl ValidationOptions {
    fn paths(&self, full: usize) -> usize {
        if self.quick {
            (full / 50).max(200)
        } else {
            full
        }
    }

    fn seed_for(&self, criterion: usize, k: u64) -> u64 {
        self.seed.wrapping_add(1_000 * criterion as u64 + k)
    }
}

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub limit: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Set when a computation failed outright.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub options: ValidationOptions,
    pub criteria: Vec<CriterionReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// Fixed-width pass/fail table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&c.line());
            out.push('\n');
            for k in &c.checks {
                let mark = if k.passed { "ok  " } else { "FAIL" };
                let _ = writeln!(out, "      {mark} {:<52} {:>24.16e}  {}", k.label, k.value, k.limit);
            }
            if let Some(e) = &c.error {
                let _ = writeln!(out, "      error: {e}");
            }
        }
        let n = self.criteria.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{n}/{} criteria passed", self.criteria.len());
        out
    }
}

impl CriterionReport {
    /// `criterion  7: PASS  title`.
    pub fn line(&self) -> String {
        format!("criterion {:>2}: {}  {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.title)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn below(&mut self, label: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Check { label: label.into(), value, limit: format!("< {limit:e}"), passed: value < limit });
    }

    fn above(&mut self, label: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Check { label: label.into(), value, limit: format!("> {limit:e}"), passed: value > limit });
    }

    fn exact(&mut self, label: impl Into<String>, value: f64, want: f64) {
        self.0.push(Check { label: label.into(), value, limit: format!("== {want:e}"), passed: value == want });
    }

    fn flag(&mut self, label: impl Into<String>, ok: bool) {
        self.0.push(Check { label: label.into(), value: ok as u8 as f64, limit: "== 1".into(), passed: ok });
    }

    /// Each entry strictly below the previous one.
    fn decreasing(&mut self, label: &str, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            let ok = i == 0 || *v < values[i - 1];
            let limit = if i == 0 { "first".to_string() } else { format!("< {:e}", values[i - 1]) };
            self.0.push(Check { label: format!("{label} [{i}]"), value: *v, limit, passed: ok });
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn params(beta: f64, b: f64, x: f64) -> Result<ModelParams> {
    ModelParams::new(beta, b, x)
}

/// The 27-point parameter grid `β ∈ {−2, 0.5, 2}`, `b ∈ {0.5, 2, 5}`,
/// `x ∈ {−1, 0, b/2}`.
pub fn standard_grid() -> Vec<ModelParams> {
    let mut g = Vec::with_capacity(27);
    for beta in [-2.0, 0.5, 2.0] {
        for b in [0.5, 2.0, 5.0] {
            for x in [-1.0, 0.0, b / 2.0] {
                g.push(ModelParams { beta, b, x });
            }
        }
    }
    g
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "transform normalisation at theta = 0",
        2 => "mean: exact, transform derivative and Monte Carlo",
        3 => "transform and its x-derivative continuous at x = 0",
        4 => "transform solves the backward equation",
        5 => "dominant singularity against its asymptotic formulas",
        6 => "zero-drift equation and general spectral function agree",
        7 => "omega and eta solvers",
        8 => "density inversion",
        9 => "exponential limit law",
        10 => "regenerative identities at level zero",
        11 => "special functions",
        12 => "asymptotic means",
        13 => "validation report is deterministic",
        _ => "unknown criterion",
    }
}

/// Runs one criterion (1 to 13).
pub fn run_criterion(id: usize, opts: ValidationOptions) -> CriterionReport {
    let mut c = Checks(Vec::new());
    let outcome = match id {
        1 => normalisation(&mut c),
        2 => mean_triangle(&mut c, opts),
        3 => interface(&mut c),
        4 => backward_equation(&mut c, opts),
        5 => spectral(&mut c),
        6 => zero_drift(&mut c),
        7 => scaled_roots(&mut c),
        8 => inversion(&mut c, opts),
        9 => limit_law_check(&mut c, opts),
        10 => regenerative(&mut c, opts),
        11 => special_functions(&mut c),
        12 => asymptotic_means(&mut c),
        13 => determinism(&mut c, opts),
        _ => Err(crate::Error::Domain(format!("no criterion {id}"))),
    };
    let error = outcome.err().map(|e| e.to_string());
    let passed = error.is_none() && !c.0.is_empty() && c.0.iter().all(|k| k.passed);
    CriterionReport { id, title: title(id).to_string(), passed, checks: c.0, error }
}

/// Runs every criterion in order.
pub fn run_all(opts: ValidationOptions) -> ValidationReport {
    ValidationReport { options: opts, criteria: (1..=CRITERIA).map(|i| run_criterion(i, opts)).collect() }
}

fn normalisation(c: &mut Checks) -> Result<()> {
    let mut worst = 0.0f64;
    for p in standard_grid() {
        let l = laplace(Complex64::new(0.0, 0.0), p)?.to_complex();
        worst = worst.max((l - 1.0).norm());
    }
    c.below("max |L(0) - 1| over 27 grid points", worst, 1e-10);
    Ok(())
}

fn mean_triangle(c: &mut Checks, opts: ValidationOptions) -> Result<()> {
    let mut worst = 0.0f64;
    for p in standard_grid() {
        worst = worst.max(rel(mean_via_transform(p)?.value, mean_exact(p)?.value));
    }
    c.below("max rel gap exact vs transform derivative", worst, 1e-6);
    for (k, (beta, b, x)) in [(1.0, 2.0, 0.0), (1.0, 2.0, -1.0), (-1.0, 1.0, 0.5)].into_iter().enumerate() {
        let p = params(beta, b, x)?;
        let mut cfg = McConfig::new(p, opts.paths(100_000), opts.seed_for(2, k as u64))?;
        cfg.step = StepOptions { dt: 1e-3, bridge: true };
        let s = mc_passage(cfg)?;
        let z = (s.mean - mean_exact(p)?.value) / s.stderr;
        c.below(format!("|MC - exact| / stderr at ({beta}, {b}, {x})"), z.abs(), 3.0);
    }
    Ok(())
}

fn interface(c: &mut Checks) -> Result<()> {
    let h = 1e-4;
    let mut jump = 0.0f64;
    let mut djump = 0.0f64;
    for p in standard_grid().into_iter().filter(|p| p.x == 0.0) {
        for theta in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 1.0), Complex64::new(3.0, -2.0)] {
            let l = |x: f64| laplace(theta, p.with_x(x)).map(|v| v.to_complex());
            let l0 = l(0.0)?;
            jump = jump.max((l(-1e-9)? - l0).norm());
            let right = (-3.0 * l0 + 4.0 * l(h)? - l(2.0 * h)?) / (2.0 * h);
            let left = (3.0 * l0 - 4.0 * l(-h)? + l(-2.0 * h)?) / (2.0 * h);
            djump = djump.max((right - left).norm() / right.norm().max(1.0));
        }
    }
    c.below("max |L(0-) - L(0)|", jump, 1e-6);
    c.below("max rel jump of dL/dx at 0", djump, 1e-6);
    Ok(())
}

fn backward_equation(c: &mut Checks, opts: ValidationOptions) -> Result<()> {
    let mut rng = path_rng(opts.seed_for(4, 0), 0);
    for _ in 0..5 {
        let theta = Complex64::new(rng.random_range(0.1..3.0), rng.random_range(-2.0..2.0));
        let beta = rng.random_range(-2.0..2.0);
        let b = rng.random_range(0.5..4.0);
        let p = params(beta, b, 0.0)?;
        let grid = [-2.0, -1.0, -0.3, 0.2 * b, 0.5 * b, 0.8 * b];
        let r = ode_residual(theta, p, &grid)?;
        c.below(format!("residual at theta={theta:.3}, beta={beta:.3}, b={b:.3}"), r, 1e-5);
    }
    Ok(())
}

fn spectral(c: &mut Checks) -> Result<()> {
    let cases = [
        (0.0, 20.0, ThetaFormula::LargeLevelZeroDrift, 0.01),
        (1.0, 10.0, ThetaFormula::LargeLevelPositiveDrift, 0.05),
        (-1.0, 15.0, ThetaFormula::LargeLevelNegativeDrift, 0.01),
        (-40.0, 1.0 / 40f64.powf(1.0 / 3.0), ThetaFormula::SmallLevel, 0.02),
    ];
    for (beta, b, f, tol) in cases {
        let p = params(beta, b, 0.0)?;
        let r = theta_max(p)?;
        c.below(format!("root residual at ({beta}, {b:.4})"), r.residual, 1e-12);
        c.below(format!("{f:?} rel gap at ({beta}, {b:.4})"), rel(theta_max_asym(p, f)?, r.theta_max), tol);
    }
    let trends = [
        (1.0, [6.0, 9.0, 12.0], ThetaFormula::LargeLevelPositiveDrift),
        (-1.0, [8.0, 12.0, 16.0], ThetaFormula::LargeLevelNegativeDrift),
        (0.0, [6.0, 9.0, 12.0], ThetaFormula::LargeLevelZeroDrift),
    ];
    for (beta, bs, f) in trends {
        let mut gaps = Vec::new();
        for b in bs {
            let p = params(beta, b, 0.0)?;
            gaps.push(rel(theta_max_asym(p, f)?, theta_max(p)?.theta_max));
        }
        c.decreasing(&format!("{f:?} gap over b = {bs:?}"), &gaps);
    }
    Ok(())
}

fn zero_drift(c: &mut Checks) -> Result<()> {
    for b in [5.0, 10.0, 20.0] {
        let a = beta_zero_root(b)?;
        let n = theta_max(params(0.0, b, 0.0)?)?.theta_max;
        c.below(format!("|zero-drift root - spectral root| at b = {b}"), (a - n).abs(), 1e-10);
    }
    Ok(())
}

fn scaled_roots(c: &mut Checks) -> Result<()> {
    let w0 = omega_solve(1e-6)?.omega_or_eta;
    c.below("|omega(1e-6) - pi^2/4|", (w0 - PI * PI / 4.0).abs(), 1e-5);
    c.exact("omega(2)", omega_solve(2.0)?.omega_or_eta, 0.0);
    c.below("|eta(1e-4) + 2.338|", (eta_solve(1e-4)?.omega_or_eta + 2.338).abs(), 1e-3);
    let lead = -(2f64.powf(2.0 / 3.0)) * PI * PI / 2500.0;
    c.below("eta(50) rel gap to -2^(2/3) pi^2 / B*^2", rel(eta_solve(50.0)?.omega_or_eta, lead), 0.05);
    Ok(())
}

/// Linear interpolation of `ys` over increasing `xs`, clamped at the ends.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    let i = xs.partition_point(|&v| v < x);
    if i >= xs.len() {
        return ys[ys.len() - 1];
    }
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + w * (ys[i] - ys[i - 1])
}

fn inversion(c: &mut Checks, opts: ValidationOptions) -> Result<()> {
    let p = params(1.0, 2.0, 0.0)?;
    let grid = default_grid(p, 401)?;
    // node doubling is enforced inside invert_density
    let curve = invert_density(p, &grid)?;
    c.flag("node doubling within 1e-6 relative", true);
    c.below("|mass - 1|", (curve.mass() - 1.0).abs(), 1e-3);
    c.below("rel gap of mean from density", rel(curve.mean(), mean_exact(p)?.value), 1e-3);
    let mut cfg = McConfig::new(p, opts.paths(100_000), opts.seed_for(8, 0))?;
    cfg.step = StepOptions { dt: 1e-3, bridge: true };
    cfg.keep_samples = true;
    let s = mc_passage(cfg)?;
    let samples = s.samples.unwrap_or_default();
    let ks = ks_distance(&samples, |t| if t < grid[0] { 0.0 } else { interpolate(&grid, &curve.cdf, t) });
    c.below("KS distance inverted CDF vs Monte Carlo", ks, 0.01);
    Ok(())
}

fn limit_law_check(c: &mut Checks, opts: ValidationOptions) -> Result<()> {
    let mut dists = Vec::new();
    for (k, b) in [3.0, 4.0, 5.0].into_iter().enumerate() {
        let p = params(1.0, b, 0.0)?;
        let rate = limit_law(p)?.scale;
        let mut cfg = McConfig::new(p, opts.paths(10_000), opts.seed_for(9, k as u64))?;
        cfg.step = StepOptions { dt: 1e-3, bridge: true };
        cfg.keep_samples = true;
        let scaled: Vec<f64> = mc_passage(cfg)?.samples.unwrap_or_default().iter().map(|t| t * rate).collect();
        let d = ks_distance(&scaled, |s| -(-s).exp_m1());
        if b == 4.0 {
            c.above("Exp(1) KS p-value at b = 4", ks_p_value(d, scaled.len()), 0.01);
        }
        dists.push(d);
    }
    c.decreasing("KS distance over b = [3, 4, 5]", &dists);
    let p = params(1.0, 10.0, 0.0)?;
    let th = theta_max(p)?.theta_max.abs();
    c.below("rel gap C e^(-beta b) vs |theta_max| at b = 10", rel(limit_law(p)?.scale, th), 0.05);
    Ok(())
}

fn regenerative(c: &mut Checks, opts: ValidationOptions) -> Result<()> {
    let step = StepOptions { dt: 1e-3, bridge: true };
    let p = params(1.0, 2.0, 0.0)?;
    let mut rates = Vec::new();
    for (k, y) in [1.0, 0.5].into_iter().enumerate() {
        let h = hitting_prob_check(y, p, opts.paths(100_000), opts.seed_for(10, 2 * k as u64), step)?;
        let t = cycle_mean_check(y, 1.0, opts.paths(10_000), opts.seed_for(10, 2 * k as u64 + 1), step)?;
        if y == 1.0 {
            c.below("|hitting fraction - a(b)| / stderr at y = 1", h.z_score().abs(), 3.0);
            c.below("|cycle mean - E[T1]| / stderr at y = 1", t.z_score().abs(), 3.0);
        }
        let r = h.estimate / t.estimate;
        let se = r * ((h.stderr / h.estimate).powi(2) + (t.stderr / t.estimate).powi(2)).sqrt();
        rates.push((r, se));
    }
    let (r1, s1) = rates[0];
    let (r2, s2) = rates[1];
    c.below("|rate(1) - rate(0.5)| / combined stderr", (r1 - r2).abs() / (s1 * s1 + s2 * s2).sqrt(), 3.0);
    Ok(())
}

fn special_functions(c: &mut Checks) -> Result<()> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for re in [-15.0, -7.5, -2.3, -0.5, 0.0, 0.7, 1.0, 3.3, 8.0, 12.5] {
        for im in [0.0, 3.0] {
            for z in [-10.0, -3.0, -0.5, 0.0, 0.8, 2.0, 5.0, 9.0, 15.0, 30.0] {
                let nu = Complex64::new(re, im);
                let d = pcf(nu, z)?.to_scaled();
                let dp = pcf_dz(nu, z)?.to_scaled();
                let dm = pcf(nu - 1.0, z)?.to_scaled();
                let r = dp.add(d.mul_c(Complex64::new(z / 2.0, 0.0))).sub(dm.mul_c(nu));
                worst = worst.max((r.ln_norm() - d.ln_norm().max(0.0)).exp());
                count += 1;
            }
        }
    }
    c.below(format!("max recurrence residual over {count} points"), worst, 1e-10);
    let mut worst = 0.0f64;
    for nu in [Complex64::new(-0.5, 0.0), Complex64::new(-1.3, 2.0), Complex64::new(-2.7, -1.0), Complex64::new(-4.0, 0.5)] {
        for z in [-2.0, 0.0, 1.5, 4.0] {
            let want = pcf_by_quadrature(nu, z)?;
            worst = worst.max((pcf(nu, z)?.to_complex() - want).norm() / want.norm());
        }
    }
    c.below("max rel gap to quadrature for Re nu < 0", worst, 1e-8);
    c.below("|first Airy zero + 2.338|", (airy_ai_first_zero() + 2.338).abs(), 1e-3);
    Ok(())
}

fn asymptotic_means(c: &mut Checks) -> Result<()> {
    let gap = |beta: f64, b: f64, x: f64, r: MeanRegime| -> Result<f64> {
        let p = params(beta, b, x)?;
        Ok(rel(mean_asymptotic(p, r)?.value, mean_exact(p)?.value))
    };
    c.below("large-level rel error at (1, 12, 0)", gap(1.0, 12.0, 0.0, MeanRegime::LargeLevel)?, 1e-3);
    let trend: Vec<f64> =
        [6.0, 9.0, 12.0].iter().map(|&b| gap(1.0, b, 0.0, MeanRegime::LargeLevel)).collect::<Result<_>>()?;
    c.decreasing("large-level rel error over b = [6, 9, 12]", &trend);
    c.below("undercapacity rel error at (-50, 5, -10)", gap(-50.0, 5.0, -10.0, MeanRegime::Undercapacity)?, 0.05);
    c.below("transition rel error at (0.02, 100, 0)", gap(0.02, 100.0, 0.0, MeanRegime::Transition)?, 0.02);
    Ok(())
}

fn determinism(c: &mut Checks, opts: ValidationOptions) -> Result<()> {
    let quick = ValidationOptions { quick: true, ..opts };
    let render = || {
        ValidationReport { options: quick, criteria: (1..CRITERIA).map(|i| run_criterion(i, quick)).collect() }.table()
    };
    let a = render();
    let b = render();
    c.flag("two quick runs render identical reports", a == b);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_27_points() {
        let g = standard_grid();
        assert_eq!(g.len(), 27);
        assert!(g.iter().all(|p| p.validate().is_ok()));
    }

    #[test]
    fn table_lists_every_check() {
        let r = run_criterion(1, ValidationOptions::default());
        assert!(r.passed, "{r:?}");
        let report = ValidationReport { options: ValidationOptions::default(), criteria: vec![r] };
        let t = report.table();
        assert!(t.starts_with("criterion  1: PASS"));
        assert!(t.contains("1/1 criteria passed"));
    }

    #[test]
    fn unknown_criterion_fails() {
        let r = run_criterion(14, ValidationOptions::default());
        assert!(!r.passed);
        assert!(r.error.is_some());
    }

    #[test]
    fn interpolation_clamps() {
        let xs = [1.0, 2.0, 4.0];
        let ys = [0.0, 1.0, 3.0];
        assert_eq!(interpolate(&xs, &ys, 0.5), 0.0);
        assert_eq!(interpolate(&xs, &ys, 3.0), 2.0);
        assert_eq!(interpolate(&xs, &ys, 9.0), 3.0);
    }
}
