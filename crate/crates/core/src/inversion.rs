//! Numerical inversion of the transform into the passage-time density and
//! CDF, and the large-time exponential approximations.
//!
//! The default method integrates along the parabola `z(u) = μ(1 + iu)²`,
//! which encloses the negative real axis where every singularity of the
//! transform sits, with the trapezoid rule in `u`. With `N` nodes per half
//! contour, `μ = πN/(12t)` and step `3/N` the discretisation error is about
//! `exp(−2πN/3)`, well below rounding for the default `N = 32`.

use crate::error::{Error, Result};
use crate::moments::mean_exact;
use crate::params::ModelParams;
use crate::scaled::Scaled;
use crate::special::gaussian_tail_integral;
use crate::spectral::theta_max;
use crate::transforms::laplace;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionMethod {
    /// Parabolic (Talbot-class) deformed Bromwich contour.
    Talbot,
    /// Abate–Whitt Fourier series with Euler summation.
    EulerSummation,
    /// Single-exponential tail from the dominant singularity.
    ResidueTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionOptions {
    pub method: InversionMethod,
    /// Contour nodes per half contour (Talbot only).
    pub nodes: usize,
    /// Repeat with twice the nodes and fail on disagreement.
    pub check_doubling: bool,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions { method: InversionMethod::Talbot, nodes: 32, check_doubling: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub t_grid: Vec<f64>,
    pub density: Vec<f64>,
    pub cdf: Vec<f64>,
    pub method: InversionMethod,
    pub node_count: usize,
    /// Values in `(−1e−8, 0)` that were set to zero.
    pub clipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitLawParams {
    /// `C = (1/β² + (1/β) ∫_0^∞ e^{βu−u²/2} du)^{−1}`.
    pub rate_constant: f64,
    /// `C e^{−βb}`, the rate of the limiting exponential.
    pub scale: f64,
}

const CLIP: f64 = 1e-8;

/// Density and CDF at one time with the parabolic contour sized for `n`
/// nodes, sampled `refine` times more finely. Refining keeps the contour,
/// and with it the `exp(μt)` rounding amplification, unchanged.
fn contour_point(params: ModelParams, t: f64, n: usize, refine: usize) -> Result<(f64, f64)> {
    let mu = PI * n as f64 / (12.0 * t);
    let h = 3.0 / (n * refine) as f64;
    let mut dens = 0.0;
    let mut cdf = 0.0;
    for k in 0..=n * refine {
        let u = k as f64 * h;
        let w = Complex64::new(1.0, u);
        let z = mu * w * w;
        let dz = Complex64::new(0.0, 2.0 * mu) * w;
        let l = laplace(z, params)?.to_scaled();
        let g = (l * Scaled::exp_of(z * t)).mul_c(dz);
        let gd = g.to_c();
        let gc = (g / Scaled::from_c(z)).to_c();
        let wgt = if k == 0 { 1.0 } else { 2.0 };
        dens += wgt * gd.im;
        cdf += wgt * gc.im;
    }
    let s = h / (2.0 * PI);
    Ok((s * dens, s * cdf))
}

/// Abate–Whitt with `A = 18.4`, 15 plain terms and Euler averaging over 11.
fn euler_point(params: ModelParams, t: f64) -> Result<(f64, f64)> {
    const A: f64 = 18.4;
    const N: usize = 15;
    const M: usize = 11;
    let a = A / (2.0 * t);
    let pref = (A / 2.0).exp() / t;
    let term = |k: usize| -> Result<(f64, f64)> {
        let z = Complex64::new(a, k as f64 * PI / t);
        let l = laplace(z, params)?.to_complex();
        Ok((l.re, (l / z).re))
    };
    let (l0, c0) = term(0)?;
    let mut partial = Vec::with_capacity(N + M + 1);
    let (mut sd, mut sc) = (0.5 * l0, 0.5 * c0);
    partial.push((sd, sc));
    for k in 1..=N + M {
        let (ld, lc) = term(k)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sd += sign * ld;
        sc += sign * lc;
        partial.push((sd, sc));
    }
    let (mut d, mut c) = (0.0, 0.0);
    let mut binom = 1.0;
    for j in 0..=M {
        if j > 0 {
            binom *= (M - j + 1) as f64 / j as f64;
        }
        let (pd, pc) = partial[N + j];
        d += binom * pd;
        c += binom * pc;
    }
    let norm = 2f64.powi(M as i32);
    Ok((pref * d / norm, pref * c / norm))
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Domain("time grid must be non-empty and positive".into()));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be increasing".into()));
    }
    Ok(())
}

/// Density and CDF of the passage time on `t_grid` with default options.
pub fn invert_density(params: ModelParams, t_grid: &[f64]) -> Result<DensityCurve> {
    invert_density_with(params, t_grid, InversionOptions::default())
}

pub fn invert_density_with(params: ModelParams, t_grid: &[f64], opts: InversionOptions) -> Result<DensityCurve> {
    params.validate()?;
    check_grid(t_grid)?;
    if opts.nodes < 4 {
        return Err(Error::Domain(format!("node count {} too small", opts.nodes)));
    }
    let raw: Vec<(f64, f64)> = match opts.method {
        InversionMethod::Talbot => {
            t_grid.par_iter().map(|&t| contour_point(params, t, opts.nodes, 1)).collect::<Result<_>>()?
        }
        InversionMethod::EulerSummation => t_grid.par_iter().map(|&t| euler_point(params, t)).collect::<Result<_>>()?,
        InversionMethod::ResidueTail => {
            let law = residue_tail_params(params)?;
            t_grid.iter().map(|&t| (law.density(t), 1.0 - law.survival(t))).collect()
        }
    };
    if opts.method == InversionMethod::Talbot && opts.check_doubling {
        let fine: Vec<(f64, f64)> =
            t_grid.par_iter().map(|&t| contour_point(params, t, opts.nodes, 2)).collect::<Result<_>>()?;
        let peak = raw.iter().map(|r| r.0.abs()).fold(0.0, f64::max);
        for (i, (a, b)) in raw.iter().zip(&fine).enumerate() {
            let tol_d = 1e-6 * a.0.abs() + 1e-12 * peak;
            let tol_c = 1e-6 * a.1.abs() + 1e-12;
            if (a.0 - b.0).abs() > tol_d || (a.1 - b.1).abs() > tol_c {
                return Err(Error::Convergence(format!(
                    "node doubling changed the result at t = {}: density {} vs {}, cdf {} vs {}",
                    t_grid[i], a.0, b.0, a.1, b.1
                )));
            }
        }
    }
    let mut clipped = 0;
    let mut density = Vec::with_capacity(raw.len());
    let mut cdf = Vec::with_capacity(raw.len());
    for (i, &(d, c)) in raw.iter().enumerate() {
        if d < -CLIP || c < -CLIP || c > 1.0 + CLIP {
            return Err(Error::Convergence(format!("inversion noise beyond 1e-8 at t = {}: {d}, {c}", t_grid[i])));
        }
        if d < 0.0 {
            clipped += 1;
        }
        if c < 0.0 {
            clipped += 1;
        }
        density.push(d.max(0.0));
        cdf.push(c.max(0.0));
    }
    Ok(DensityCurve {
        t_grid: t_grid.to_vec(),
        density,
        cdf,
        method: opts.method,
        node_count: if opts.method == InversionMethod::Talbot { opts.nodes } else { 0 },
        clipped,
    })
}

/// `n` log-uniform times from `t_min` to `t_max`.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

impl DensityCurve {
    /// `∫ g(t) P(t) dt` over the grid: Simpson in `ln t` on an odd-length
    /// log-uniform grid, trapezoid in `t` otherwise.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let t = &self.t_grid;
        let n = t.len();
        if n < 2 {
            return 0.0;
        }
        let r = t[1] / t[0];
        let log_uniform = n % 2 == 1 && t.windows(2).all(|w| ((w[1] / w[0]) / r - 1.0).abs() < 1e-9);
        if log_uniform {
            let h = r.ln();
            let f = |i: usize| g(t[i]) * self.density[i] * t[i];
            let mut s = f(0) + f(n - 1);
            for i in 1..n - 1 {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
            }
            s * h / 3.0
        } else {
            (1..n).map(|i| 0.5 * (t[i] - t[i - 1]) * (g(t[i]) * self.density[i] + g(t[i - 1]) * self.density[i - 1])).sum()
        }
    }

    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|t| t)
    }
}

/// Exponential tail of the density, `|θ_max| w e^{−|θ_max| t}` with
/// `w = 1 − e^{(x−b)β}`; the remaining mass `e^{(x−b)β}` is an atom of the
/// limit at scaled time zero (see [`early_mass`]). Meaningful for
/// `t |θ_max| > 1`.
#[derive(Debug, Clone, Copy)]
struct TailLaw {
    rate: f64,
    weight: f64,
}

impl TailLaw {
    fn density(&self, t: f64) -> f64 {
        self.rate * self.weight * (-self.rate * t).exp()
    }

    fn survival(&self, t: f64) -> f64 {
        self.weight * (-self.rate * t).exp()
    }
}

fn residue_tail_params(params: ModelParams) -> Result<TailLaw> {
    if !(params.beta > 0.0) {
        return Err(Error::Regime(format!("the exponential tail needs beta > 0, got {}", params.beta)));
    }
    let rate = theta_max(params)?.theta_max.abs();
    Ok(TailLaw { rate, weight: 1.0 - early_mass(params) })
}

/// Large-time density `|θ_max|(1 − e^{(x−b)β}) e^{−|θ_max| t}` for `β > 0`.
pub fn tail_density(params: ModelParams, t: f64) -> Result<f64> {
    params.validate()?;
    Ok(residue_tail_params(params)?.density(t))
}

/// Weight `e^{(x−b)β}` of the early-passage atom in the scaled limit.
pub fn early_mass(params: ModelParams) -> f64 {
    ((params.x - params.b) * params.beta).exp()
}

/// Constants of the exponential limit law of `C e^{−βb} τ_b`.
pub fn limit_law(params: ModelParams) -> Result<LimitLawParams> {
    let beta = params.beta;
    if !(beta > 0.0) {
        return Err(Error::Regime(format!("the limit law needs beta > 0, got {beta}")));
    }
    let c = 1.0 / (1.0 / (beta * beta) + gaussian_tail_integral(beta)? / beta);
    Ok(LimitLawParams { rate_constant: c, scale: c * (-beta * params.b).exp() })
}

/// A log-uniform grid covering the bulk of the passage-time law:
/// `[1e−3, 20] × E[τ]` with `n` (odd) points.
pub fn default_grid(params: ModelParams, n: usize) -> Result<Vec<f64>> {
    let m = mean_exact(params)?.value;
    let n = if n % 2 == 0 { n + 1 } else { n };
    Ok(log_grid(1e-3 * m, 20.0 * m, n))
}
