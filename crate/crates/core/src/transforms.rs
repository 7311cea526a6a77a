//! Laplace transforms `E[exp(−θT)]` of the first passage time `T` to `b`.
//!
//! With `w = β² + 4θ`, `C_ℓ(w) = cosh(ℓ√w/2)` and `S_ℓ(w) = sinh(ℓ√w/2)/√w`
//! are even in `√w`, so nothing below depends on a square-root branch.
//! Writing `F_ℓ = D_{−θ}(−β) C_ℓ − 2 D'_{−θ}(−β) S_ℓ`,
//!
//! * `M(θ) = F_b / D_{−θ}(−β)`,
//! * `x < 0`: `L = D_{−θ}(−β−x) exp(−β(b−x)/2 + x²/4) / F_b`,
//! * `0 ≤ x ≤ b`: `L = exp(β(x−b)/2) F_x / F_b`.
//!
//! The last line is the two-sinh form of the transform with the common
//! factor `S_b` cancelled, which keeps it finite where `S_b` vanishes.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::scaled::Scaled;
use crate::special::pcf::{pcf_unnormalised, pcf_with_derivative};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A transform value `value * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformEval {
    pub theta: Complex64,
    pub value: Complex64,
    pub log_scale: f64,
}

impl TransformEval {
    fn from_scaled(theta: Complex64, s: Scaled) -> Self {
        let v = s.to_c();
        if v.re.is_finite() && v.im.is_finite() && (v.norm() == 0.0 || v.norm() > 1e-150) {
            TransformEval { theta, value: v, log_scale: 0.0 }
        } else {
            let (value, log_scale) = s.canonical();
            TransformEval { theta, value, log_scale }
        }
    }

    pub fn to_scaled(self) -> Scaled {
        Scaled::new(self.value, self.log_scale)
    }

    /// The value collapsed to a plain complex number (may under/overflow).
    pub fn to_complex(self) -> Complex64 {
        self.value * self.log_scale.exp()
    }
}

/// `(C_ℓ(w), S_ℓ(w))`.
pub(crate) fn even_pair(ell: f64, w: Complex64) -> (Scaled, Scaled) {
    let t = w * (ell * ell / 4.0);
    if t.norm() <= 1.0 {
        let mut c = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(1.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 1..30 {
            let k = k as f64;
            term *= t / ((2.0 * k - 1.0) * (2.0 * k));
            c += term;
            let add = term / (2.0 * k + 1.0);
            s += add;
            if add.norm() < 1e-18 {
                break;
            }
        }
        return (Scaled::from_c(c), Scaled::from_c(s * (ell / 2.0)));
    }
    let half = w.sqrt() * 0.5;
    let u = half * ell.abs();
    let grow = Scaled::exp_of(u);
    let back = (-2.0 * u).exp();
    let c = grow.mul_c((1.0 + back) * 0.5);
    let s = grow.mul_c((1.0 - back) / (4.0 * half) * ell.signum());
    (c, s)
}

/// `D_{−θ}(−β) C_ℓ − 2 D'_{−θ}(−β) S_ℓ` together with the modulus scale
/// `|D C_ℓ| + 2|D' S_ℓ|` used to judge whether it vanishes.
pub(crate) fn f_ell(d: Scaled, dp: Scaled, ell: f64, w: Complex64) -> (Scaled, f64) {
    let (c, s) = even_pair(ell, w);
    let a = d * c;
    let bterm = (dp * s).scale(2.0);
    let scale = a.ln_norm().max(bterm.ln_norm());
    (a.sub(bterm), scale)
}

fn check_theta(theta: Complex64) -> Result<()> {
    if !(theta.re.is_finite() && theta.im.is_finite()) {
        return Err(Error::Domain(format!("theta = {theta} is not finite")));
    }
    Ok(())
}

/// `(D_{−θ}, D'_{−θ})` at `zs` up to a common factor, which every transform
/// cancels. Away from `θ = 0, −1, −2, …` the solution grows to the left, so
/// the cheap unnormalised sweep is safe there.
fn solution_at(theta: Complex64, zs: &[f64]) -> Result<Vec<(Scaled, Scaled)>> {
    let left = zs.iter().fold(0.0f64, |m, &z| m.min(z));
    if theta.im.abs() >= 1.0 || theta.re >= 0.5 || left >= -1.0 {
        pcf_unnormalised(-theta, zs)
    } else {
        pcf_with_derivative(-theta, zs)
    }
}

fn pole_check(f: Scaled, scale: f64, theta: Complex64) -> Result<()> {
    if f.is_zero() || f.ln_norm() - scale < (1e-280f64).ln() {
        return Err(Error::Pole(format!("theta = {theta} is on the spectrum")));
    }
    Ok(())
}

/// `M(θ; β, b) = cosh(b√w/2) − (2D'_{−θ}(−β)/D_{−θ}(−β)) sinh(b√w/2)/√w`.
pub fn big_m(theta: Complex64, params: ModelParams) -> Result<Complex64> {
    check_theta(theta)?;
    let v = solution_at(theta, &[-params.beta])?;
    let (d, dp) = v[0];
    if d.is_zero() || d.ln_norm() - dp.ln_norm() < -644.0 {
        return Err(Error::Pole(format!("D_(-theta)(-beta) vanishes at theta = {theta}")));
    }
    let w = params.beta * params.beta + 4.0 * theta;
    let (f, _) = f_ell(d, dp, params.b, w);
    let m = (f / d).to_c();
    if !(m.re.is_finite() && m.im.is_finite()) {
        return Err(Error::Overflow(format!("M overflows at theta = {theta}")));
    }
    Ok(m)
}

/// Transform for a start point `x < 0`.
pub fn laplace_neg(theta: Complex64, params: ModelParams) -> Result<TransformEval> {
    check_theta(theta)?;
    let ModelParams { beta, b, x } = params;
    if !(x < 0.0) {
        return Err(Error::Domain(format!("laplace_neg needs x < 0, got {x}")));
    }
    let v = solution_at(theta, &[-beta, -beta - x])?;
    let (d, dp) = v[0];
    let dx = v[1].0;
    let w = beta * beta + 4.0 * theta;
    let (f, scale) = f_ell(d, dp, b, w);
    pole_check(f, scale, theta)?;
    let pref = Scaled::exp_of(Complex64::new(-beta * (b - x) / 2.0 + x * x / 4.0, 0.0));
    Ok(TransformEval::from_scaled(theta, dx * pref / f))
}

/// Transform for a start point `0 ≤ x ≤ b`; exactly 1 at `x = b`.
pub fn laplace_pos(theta: Complex64, params: ModelParams) -> Result<TransformEval> {
    check_theta(theta)?;
    let ModelParams { beta, b, x } = params;
    if !(0.0..=b).contains(&x) {
        return Err(Error::Domain(format!("laplace_pos needs 0 <= x <= b, got x = {x}")));
    }
    if x == b {
        return Ok(TransformEval { theta, value: Complex64::new(1.0, 0.0), log_scale: 0.0 });
    }
    let v = solution_at(theta, &[-beta])?;
    let (d, dp) = v[0];
    let w = beta * beta + 4.0 * theta;
    let (fb, scale) = f_ell(d, dp, b, w);
    pole_check(fb, scale, theta)?;
    let (fx, _) = f_ell(d, dp, x, w);
    let pref = Scaled::exp_of(Complex64::new(beta * (x - b) / 2.0, 0.0));
    Ok(TransformEval::from_scaled(theta, fx * pref / fb))
}

/// `E[exp(−θT)]`, dispatching on the sign of `x` (`x = 0` is handled by
/// [`laplace_pos`]).
pub fn laplace(theta: Complex64, params: ModelParams) -> Result<TransformEval> {
    if params.x < 0.0 {
        laplace_neg(theta, params)
    } else {
        laplace_pos(theta, params)
    }
}

/// Largest `|Q'' + A(x)Q' − θQ| / max(1, |Q|)` over `x_grid` for
/// `Q(x) = laplace(θ)` at start point `x`, by central differences with
/// step `1e−4`.
pub fn ode_residual(theta: Complex64, params: ModelParams, x_grid: &[f64]) -> Result<f64> {
    ode_residual_with_step(theta, params, x_grid, 1e-4)
}

/// [`ode_residual`] with an explicit difference step.
pub fn ode_residual_with_step(theta: Complex64, params: ModelParams, x_grid: &[f64], h: f64) -> Result<f64> {
    let q = |x: f64| laplace(theta, params.with_x(x)).map(|e| e.to_complex());
    ode_residual_of(q, theta, params, x_grid, h)
}

/// The residual of an arbitrary candidate `q(x)`.
pub fn ode_residual_of<F>(q: F, theta: Complex64, params: ModelParams, x_grid: &[f64], h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut worst: f64 = 0.0;
    for &x in x_grid {
        if x.abs() < 1e-3 || x + h >= params.b {
            return Err(Error::Domain(format!("grid point {x} too close to 0 or b")));
        }
        let (lo, mid, hi) = (q(x - h)?, q(x)?, q(x + h)?);
        let d1 = (hi - lo) / (2.0 * h);
        let d2 = (hi - 2.0 * mid + lo) / (h * h);
        let r = (d2 + params.drift(x) * d1 - theta * mid).norm() / mid.norm().max(1.0);
        worst = worst.max(r);
    }
    Ok(worst)
}
