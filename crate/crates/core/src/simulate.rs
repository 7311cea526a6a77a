//! Monte Carlo passage times by Euler–Maruyama, and the regenerative
//! identities of the process at level zero.
//!
//! Every path draws from its own ChaCha8 stream, keyed by the run seed and
//! the path index, so results do not depend on how rayon schedules work.

use crate::error::{Error, Result};
use crate::moments::mean_exact;
use crate::params::ModelParams;
use crate::special::gaussian_tail_integral;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{InverseGaussian, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const DEFAULT_DT: f64 = 1e-3;

/// Fraction of capped paths above which a summary carries a warning.
pub const CAP_WARN_FRACTION: f64 = 1e-3;

/// Time step and crossing detection shared by all samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    pub dt: f64,
    /// Also count a crossing of the level between two grid points, with the
    /// Brownian-bridge probability `exp(−(b − X_k)(b − X_{k+1})/dt)`.
    pub bridge: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { dt: DEFAULT_DT, bridge: false }
    }
}

impl StepOptions {
    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Domain(format!("time step dt = {} must be positive", self.dt)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub params: ModelParams,
    pub n_paths: usize,
    pub step: StepOptions,
    pub seed: u64,
    /// Longest simulated time per path.
    pub t_cap: f64,
    /// Keep the individual passage times in the summary.
    pub keep_samples: bool,
}

impl McConfig {
    /// Default step, no bridge, and `t_cap` at 50 times the exact mean
    /// (`5·10⁴` when the mean cannot be evaluated).
    pub fn new(params: ModelParams, n_paths: usize, seed: u64) -> Result<Self> {
        let cfg = McConfig {
            params,
            n_paths,
            step: StepOptions::default(),
            seed,
            t_cap: 50.0 * cap_reference(params),
            keep_samples: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.step.validate()?;
        if self.n_paths == 0 {
            return Err(Error::Domain("n_paths must be at least 1".into()));
        }
        let floor = 10.0 * cap_reference(self.params);
        if !(self.t_cap >= floor) {
            return Err(Error::Domain(format!("t_cap = {} is below 10 x mean = {floor}", self.t_cap)));
        }
        Ok(())
    }
}

fn cap_reference(params: ModelParams) -> f64 {
    match mean_exact(params) {
        Ok(m) if m.value.is_finite() && m.value > 0.0 => m.value,
        _ => 1e3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapWarning {
    pub n_capped: usize,
    pub fraction: f64,
    pub t_cap: f64,
}

/// Statistics of the absorbed paths; capped paths are only counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub mean: f64,
    pub stderr: f64,
    pub quantiles: Quantiles,
    pub n_paths: usize,
    pub n_capped: usize,
    pub cap_warning: Option<CapWarning>,
    pub samples: Option<Vec<f64>>,
}

/// A Monte Carlo estimate next to the closed form it checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub estimate: f64,
    pub stderr: f64,
    pub expected: f64,
}

impl CheckResult {
    /// Distance from the closed form in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.expected) / self.stderr
    }
}

/// The generator for path `index` of a run with `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One passage time to `b` from `params.x`. A crossing at step `k` is
/// reported at `(k − 1/2)·dt`.
pub fn sample_passage<R: Rng + ?Sized>(params: ModelParams, step: StepOptions, t_cap: f64, rng: &mut R) -> Result<f64> {
    let ModelParams { beta, b, x } = params;
    let dt = step.dt;
    let sd = (2.0 * dt).sqrt();
    let bridge_zone = 20.0 * dt;
    let max_steps = (t_cap / dt).ceil() as u64;
    let mut cur = x;
    for k in 1..=max_steps {
        let drift = if cur > 0.0 { -beta } else { -cur - beta };
        let z: f64 = rng.sample(StandardNormal);
        let next = cur + drift * dt + sd * z;
        if next >= b {
            return Ok((k as f64 - 0.5) * dt);
        }
        if step.bridge {
            let g = (b - cur) * (b - next);
            if g < bridge_zone && rng.random::<f64>() < (-g / dt).exp() {
                return Ok((k as f64 - 0.5) * dt);
            }
        }
        cur = next;
    }
    Err(Error::CapExceeded { t_cap })
}

/// Sum by recursive halving, independent of how the values were produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Sample mean and standard error `sd/√n`.
pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = pairwise_sum(v) / n;
    if v.len() < 2 {
        return (mean, f64::NAN);
    }
    let dev: Vec<f64> = v.iter().map(|s| (s - mean) * (s - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (h - i as f64) * (sorted[j] - sorted[i])
}

/// Independent replications of [`sample_passage`].
pub fn mc_passage(config: McConfig) -> Result<McSummary> {
    config.validate()?;
    let McConfig { params, n_paths, step, seed, t_cap, keep_samples } = config;
    let outcomes: Vec<Result<f64>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| sample_passage(params, step, t_cap, &mut path_rng(seed, i)))
        .collect();
    let mut samples = Vec::with_capacity(n_paths);
    let mut n_capped = 0;
    for o in outcomes {
        match o {
            Ok(t) => samples.push(t),
            Err(Error::CapExceeded { .. }) => n_capped += 1,
            Err(e) => return Err(e),
        }
    }
    let (mean, stderr) = if samples.is_empty() { (f64::NAN, f64::NAN) } else { mean_stderr(&samples) };
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    let quantiles = Quantiles {
        p5: quantile(&sorted, 0.05),
        p25: quantile(&sorted, 0.25),
        p50: quantile(&sorted, 0.5),
        p75: quantile(&sorted, 0.75),
        p95: quantile(&sorted, 0.95),
    };
    let fraction = n_capped as f64 / n_paths as f64;
    let cap_warning = (fraction >= CAP_WARN_FRACTION).then_some(CapWarning { n_capped, fraction, t_cap });
    Ok(McSummary {
        mean,
        stderr,
        quantiles,
        n_paths,
        n_capped,
        cap_warning,
        samples: keep_samples.then_some(samples),
    })
}

/// One passage time per line, in shortest round-trip decimal form.
pub fn write_samples(path: &Path, samples: &[f64]) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for s in samples {
        writeln!(out, "{s}")?;
    }
    out.flush()
}

/// `(e^{βy} − 1)/(e^{βb} − 1)`, the chance that Brownian motion with drift
/// `−β` and variance 2 started at `y` reaches `b` before 0.
pub fn hitting_prob(y: f64, beta: f64, b: f64) -> f64 {
    if beta == 0.0 {
        y / b
    } else {
        (beta * y).exp_m1() / (beta * b).exp_m1()
    }
}

/// Fraction of paths from `y` that reach `b` before 0 under the constant
/// drift `−β` of the upper region.
pub fn hitting_prob_check(y: f64, params: ModelParams, n: usize, seed: u64, step: StepOptions) -> Result<CheckResult> {
    step.validate()?;
    let ModelParams { beta, b, .. } = params;
    if !(y > 0.0 && y < b) || !(beta.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("start y = {y} must lie in (0, {b})")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let hits: Vec<bool> = (0..n as u64)
        .into_par_iter()
        .map(|i| strip_exit(y, beta, b, step, &mut path_rng(seed, i)))
        .collect::<Result<_>>()?;
    let p = hits.iter().filter(|h| **h).count() as f64 / n as f64;
    Ok(CheckResult { estimate: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), expected: hitting_prob(y, beta, b) })
}

/// Whether the upper-region walk from `y` leaves `(0, b)` at `b`.
fn strip_exit<R: Rng + ?Sized>(y: f64, beta: f64, b: f64, step: StepOptions, rng: &mut R) -> Result<bool> {
    let dt = step.dt;
    let sd = (2.0 * dt).sqrt();
    let zone = 20.0 * dt;
    let max_steps = (1e6 * (b * b / 2.0 + 1.0) / dt).min(1e12) as u64;
    let mut cur = y;
    for _ in 0..max_steps {
        let next = cur - beta * dt + sd * rng.sample::<f64, _>(StandardNormal);
        if next >= b {
            return Ok(true);
        }
        if next <= 0.0 {
            return Ok(false);
        }
        if step.bridge {
            let gb = (b - cur) * (b - next);
            let g0 = cur * next;
            if gb.min(g0) < zone {
                let u: f64 = rng.random();
                let pb = (-gb / dt).exp();
                if u < pb {
                    return Ok(true);
                }
                if u < pb + (-g0 / dt).exp() {
                    return Ok(false);
                }
            }
        }
        cur = next;
    }
    Err(Error::Convergence(format!("walk from {y} did not leave (0, {b})")))
}

/// `E[T₁] = (e^{βy} − 1)(1/β² + (1/β)∫_0^∞ e^{βu−u²/2} du)`, the mean time to
/// climb from 0 to `y` and fall back to 0.
pub fn cycle_mean(y: f64, beta: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("level y = {y} must be positive")));
    }
    if !(beta > 0.0) {
        return Err(Error::Regime(format!("the return to 0 is not certain for beta = {beta} <= 0")));
    }
    let i = gaussian_tail_integral(beta)?;
    Ok((beta * y).exp_m1() * (1.0 / (beta * beta) + i / beta))
}

/// Mean cycle length: an Euler passage from 0 to `y`, followed by the exact
/// inverse Gaussian time for the drift `−β` walk to fall from `y` to 0.
pub fn cycle_mean_check(y: f64, beta: f64, n: usize, seed: u64, step: StepOptions) -> Result<CheckResult> {
    let expected = cycle_mean(y, beta)?;
    step.validate()?;
    if n < 2 {
        return Err(Error::Domain("n must be at least 2".into()));
    }
    let up = ModelParams::new(beta, y, 0.0)?;
    let t_cap = 50.0 * cap_reference(up);
    let down = InverseGaussian::new(y / beta, y * y / 2.0)
        .map_err(|e| Error::Domain(format!("return-time law for y = {y}, beta = {beta}: {e}")))?;
    let times: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let climb = sample_passage(up, step, t_cap, &mut rng)?;
            Ok(climb + rng.sample(down))
        })
        .collect::<Result<_>>()?;
    let (estimate, stderr) = mean_stderr(&times);
    Ok(CheckResult { estimate, stderr, expected })
}

/// `sup |F_n − F|` between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &t)| {
            let f = cdf(t);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the one-sample Kolmogorov–Smirnov statistic `d`
/// with Stephens' finite-`n` adjustment.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lam = (sn + 0.12 + 0.11 / sn) * d;
    if lam < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lam * lam).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
