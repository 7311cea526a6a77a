//! The dominant singularity `θ_max` of the transform: the largest negative
//! zero of `D_{−θ}(−β) M(θ; β, b)`, located numerically, and its asymptotic
//! approximations in the various level/drift regimes.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special::airy::bisect;
use crate::special::gamma::rgamma_scaled;
use crate::special::pcf::pcf_with_derivative;
use crate::special::{airy_ai, airy_ai_dx, airy_ai_first_zero, gamma_fn, gaussian_tail_integral, pcf_log_ratio};
use crate::transforms::f_ell;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// How the bracket around `θ_max` was first obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Scan,
    LargeLevelNegativeDrift,
    LargeLevelZeroDrift,
    LargeLevelPositiveDrift,
    StrongUndercapacity,
    StrongOvercapacity,
    SmallLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub theta_max: f64,
    /// `|F̂(θ_max)|` for the normalised spectral function.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub seed_source: SeedSource,
}

/// Closed-form approximations to `θ_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaFormula {
    /// `β < 0` fixed, `b → ∞`: `−β²/4 − (π²/b²)[1 + (2/b) D/D']` at order `β²/4`.
    LargeLevelNegativeDrift,
    /// `β = 0`, `b → ∞`: `−(π²/4b²)(1 − √(2π)/b)`.
    LargeLevelZeroDrift,
    /// `β > 0` fixed, `b → ∞`: `−β² e^{−βb} / (1 + β ∫_0^∞ e^{βu−u²/2} du)`.
    LargeLevelPositiveDrift,
    /// `β → 0`, `b → ∞`, `γ = βb` fixed: `−(γ²/4 + ω(γ))/b²`.
    GammaScaling,
    /// `β → −∞`, `b → ∞`: `−β²/4 − (π²/b²)[1 + (2/b)(2/−β)^{1/3} Ai(0)/Ai'(0)]`.
    StrongUndercapacity,
    /// `β → ∞`, `b → ∞`: `−β e^{−bβ − β²/2} / √(2π)`.
    StrongOvercapacity,
    /// `b → 0`, `β → −∞`, `B* = b(−β)^{1/3}` fixed: `−β²/4 + (−β/2)^{2/3} η(B*)`.
    SmallLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    GammaScaling,
    AiryScaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledRoot {
    pub omega_or_eta: f64,
    pub scaling: Scaling,
}

/// The spectral function `F(θ) = D_{−θ}(−β) C_b(w) − 2 D'_{−θ}(−β) S_b(w)`
/// divided by the positive scale `max(|D C_b|, 2|D' S_b|)`, so the result
/// lies in `[−2, 2]` and keeps the sign of `F`.
pub fn spectral_fn(theta: f64, params: ModelParams) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Domain(format!("theta = {theta} is not finite")));
    }
    let th = Complex64::new(theta, 0.0);
    let v = pcf_with_derivative(-th, &[-params.beta])?;
    let (d, dp) = v[0];
    let w = params.beta * params.beta + 4.0 * th;
    let (f, scale) = f_ell(d, dp, params.b, w);
    if f.is_zero() {
        return Ok(0.0);
    }
    Ok((f.mant * (f.exp - scale).exp()).re)
}

fn scan_step(p: &ModelParams) -> f64 {
    (PI * PI / (4.0 * p.b * p.b)).min(0.5 * (p.beta.abs() / 2.0).powf(2.0 / 3.0).max(1.0))
}

/// Where a cold scan may start: `F > 0` on `[start, 0]`. For `β < −√2` the
/// order stays below the turning point there, `D` is positive and
/// decreasing, and both terms of `F` are positive.
fn scan_start(p: &ModelParams) -> f64 {
    let s = -p.beta * p.beta / 4.0 + 0.5;
    if p.beta < 0.0 && s < 0.0 {
        s
    } else {
        0.0
    }
}

struct Refined {
    theta: f64,
    residual: f64,
    iterations: usize,
}

/// Illinois false position on a bracket `lo < hi` with `F(lo) < 0 < F(hi)`.
fn refine(p: &ModelParams, mut lo: f64, mut flo: f64, mut hi: f64, mut fhi: f64) -> Result<Refined> {
    let mut side = 0i8;
    let mut it = 0;
    while it < 400 {
        it += 1;
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
        let mut m = (lo * fhi - hi * flo) / (fhi - flo);
        if !(m > lo && m < hi) || it % 8 == 0 {
            m = 0.5 * (lo + hi);
        }
        let fm = spectral_fn(m, *p)?;
        if fm == 0.0 {
            return Ok(Refined { theta: m, residual: 0.0, iterations: it });
        }
        if fm < 0.0 {
            lo = m;
            flo = fm;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = m;
            fhi = fm;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    let theta = 0.5 * (lo + hi);
    let residual = spectral_fn(theta, *p)?.abs();
    Ok(Refined { theta, residual, iterations: it })
}

/// Sign check on 100 points of `(θ, 0)`.
fn dominant(p: &ModelParams, theta: f64) -> Result<bool> {
    for k in 1..=100 {
        let t = theta * (1.0 - k as f64 / 100.5);
        if spectral_fn(t, *p)? <= 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn finish(p: &ModelParams, lo: f64, flo: f64, hi: f64, fhi: f64, seed_source: SeedSource) -> Result<RootResult> {
    let r = refine(p, lo, flo, hi, fhi)?;
    Ok(RootResult { theta_max: r.theta, residual: r.residual, bracket: (lo, hi), iterations: r.iterations, seed_source })
}

/// Cold downward scan: geometric from `−1e−30` (or from just above
/// `−β²/4` for strongly negative `β`) until the step reaches the local
/// root spacing, then linear, down to `−β²/4 − 1000`.
pub fn theta_max_scan(params: ModelParams) -> Result<RootResult> {
    params.validate()?;
    let step = scan_step(&params);
    let floor = -params.beta * params.beta / 4.0 - 1e3;
    let start = scan_start(&params);
    let mut hi = if start < 0.0 { start } else { -1e-30 };
    let mut fhi = spectral_fn(hi, params)?;
    if fhi <= 0.0 {
        return Err(Error::NoRoot(format!("spectral function is {fhi} at the scan start {hi}")));
    }
    let mut geometric = start == 0.0;
    while hi > floor {
        let lo = if geometric && hi.abs() * 0.3 < step { hi * 1.3 } else { hi - step };
        geometric = geometric && lo.abs() * 0.3 < step;
        let flo = spectral_fn(lo, params)?;
        if flo <= 0.0 {
            if flo == 0.0 {
                return Ok(RootResult {
                    theta_max: lo,
                    residual: 0.0,
                    bracket: (lo, hi),
                    iterations: 0,
                    seed_source: SeedSource::Scan,
                });
            }
            return finish(&params, lo, flo, hi, fhi, SeedSource::Scan);
        }
        hi = lo;
        fhi = flo;
    }
    Err(Error::NoRoot(format!(
        "no sign change of the spectral function between 0 and {floor} for beta = {}, b = {}",
        params.beta, params.b
    )))
}

/// Bracket expansion around an approximate root; falls back to the cold
/// scan if no sign change turns up or the root found is not the largest.
pub fn theta_max_seeded(params: ModelParams, seed: f64, source: SeedSource) -> Result<RootResult> {
    params.validate()?;
    if seed.is_finite() && seed < 0.0 {
        let mut half = (1e-3 * seed.abs()).min(0.05 * scan_step(&params));
        for _ in 0..40 {
            let hi = (seed + half).min(0.5 * seed);
            let lo = seed - half;
            let (flo, fhi) = (spectral_fn(lo, params)?, spectral_fn(hi, params)?);
            if flo < 0.0 && fhi > 0.0 {
                let r = finish(&params, lo, flo, hi, fhi, source)?;
                if dominant(&params, r.theta_max)? {
                    return Ok(r);
                }
                break;
            }
            if half > seed.abs() {
                break;
            }
            half *= 2.0;
        }
    }
    let r = theta_max_scan(params)?;
    if !dominant(&params, r.theta_max)? {
        return Err(Error::NoRoot(format!("scan root {} is not the largest", r.theta_max)));
    }
    Ok(r)
}

/// The asymptotic formula used to seed [`theta_max`].
pub fn default_formula(params: &ModelParams) -> ThetaFormula {
    let ModelParams { beta, b, .. } = *params;
    if beta == 0.0 {
        ThetaFormula::LargeLevelZeroDrift
    } else if beta > 0.0 {
        ThetaFormula::LargeLevelPositiveDrift
    } else if b * (-beta).powf(1.0 / 3.0) < 3.0 {
        ThetaFormula::SmallLevel
    } else {
        ThetaFormula::LargeLevelNegativeDrift
    }
}

fn source_of(f: ThetaFormula) -> SeedSource {
    match f {
        ThetaFormula::LargeLevelNegativeDrift => SeedSource::LargeLevelNegativeDrift,
        ThetaFormula::LargeLevelZeroDrift | ThetaFormula::GammaScaling => SeedSource::LargeLevelZeroDrift,
        ThetaFormula::LargeLevelPositiveDrift => SeedSource::LargeLevelPositiveDrift,
        ThetaFormula::StrongUndercapacity => SeedSource::StrongUndercapacity,
        ThetaFormula::StrongOvercapacity => SeedSource::StrongOvercapacity,
        ThetaFormula::SmallLevel => SeedSource::SmallLevel,
    }
}

/// Largest negative zero of the spectral function, seeded from the
/// applicable asymptotic formula and verified by a 100-point sign scan.
pub fn theta_max(params: ModelParams) -> Result<RootResult> {
    params.validate()?;
    let formula = default_formula(&params);
    match theta_max_asym(params, formula) {
        Ok(seed) => theta_max_seeded(params, seed, source_of(formula)),
        Err(_) => theta_max_seeded(params, f64::NAN, SeedSource::Scan),
    }
}

/// Closed-form approximation of `θ_max`. Formulas are evaluable outside
/// their regime; see [`regime_warning`].
pub fn theta_max_asym(params: ModelParams, formula: ThetaFormula) -> Result<f64> {
    let ModelParams { beta, b, .. } = params;
    let pi2 = PI * PI;
    Ok(match formula {
        ThetaFormula::LargeLevelNegativeDrift => {
            let ratio = pcf_log_ratio(Complex64::new(-beta * beta / 4.0, 0.0), beta)?;
            if ratio.re == 0.0 {
                return Err(Error::Pole("D' vanishes at order beta^2/4".into()));
            }
            -beta * beta / 4.0 - pi2 / (b * b) * (1.0 + 2.0 / b / ratio.re)
        }
        ThetaFormula::LargeLevelZeroDrift => -pi2 / (4.0 * b * b) * (1.0 - (2.0 * PI).sqrt() / b),
        ThetaFormula::LargeLevelPositiveDrift => {
            let tail = gaussian_tail_integral(beta)?;
            -beta * beta * (-beta * b).exp() / (1.0 + beta * tail)
        }
        ThetaFormula::GammaScaling => {
            let gamma = beta * b;
            -(gamma * gamma / 4.0 + omega_solve(gamma)?.omega_or_eta) / (b * b)
        }
        ThetaFormula::StrongUndercapacity => {
            let ratio = airy_ai(0.0)? / airy_ai_dx(0.0)?;
            -beta * beta / 4.0 - pi2 / (b * b) * (1.0 + 2.0 / b * (2.0 / -beta).powf(1.0 / 3.0) * ratio)
        }
        ThetaFormula::StrongOvercapacity => -beta / (2.0 * PI).sqrt() * (-b * beta - beta * beta / 2.0).exp(),
        ThetaFormula::SmallLevel => {
            if beta >= 0.0 {
                return Err(Error::Domain(format!("small-level formula needs beta < 0, got {beta}")));
            }
            let eta = eta_solve(b * (-beta).powf(1.0 / 3.0))?.omega_or_eta;
            -beta * beta / 4.0 + (-beta / 2.0).powf(2.0 / 3.0) * eta
        }
    })
}

/// A note when a formula is used far from the regime it describes.
pub fn regime_warning(params: &ModelParams, formula: ThetaFormula) -> Option<String> {
    let ModelParams { beta, b, .. } = *params;
    let bad = match formula {
        ThetaFormula::LargeLevelNegativeDrift => !(beta < 0.0 && b >= 5.0),
        ThetaFormula::LargeLevelZeroDrift => !(beta == 0.0 && b >= 5.0),
        ThetaFormula::LargeLevelPositiveDrift => !(beta > 0.0 && beta * b >= 3.0),
        ThetaFormula::GammaScaling => !(beta > 0.0 && beta.abs() <= 0.5 && b >= 10.0),
        ThetaFormula::StrongUndercapacity => !(beta <= -5.0),
        ThetaFormula::StrongOvercapacity => !(beta >= 3.0),
        ThetaFormula::SmallLevel => !(beta <= -5.0 && b <= 1.0),
    };
    bad.then(|| format!("{formula:?} approximation used outside its regime (beta = {beta}, b = {b})"))
}

/// `tan(√ω)/√ω`, continued through `ω < 0` as `tanh(√−ω)/√−ω`.
fn tan_ratio(omega: f64) -> f64 {
    if omega.abs() < 1e-3 {
        1.0 + omega / 3.0 + 2.0 * omega.powi(2) / 15.0 + 17.0 * omega.powi(3) / 315.0 + 62.0 * omega.powi(4) / 2835.0
    } else if omega > 0.0 {
        let s = omega.sqrt();
        s.tan() / s
    } else {
        let s = (-omega).sqrt();
        s.tanh() / s
    }
}

/// Root of `tan(√ω)/√ω = 2/γ` on the branch through `ω = 0`, which lies in
/// `(−∞, π²/4)` and increases from `ω(0⁺) = π²/4` through `ω(2) = 0`.
pub fn omega_solve(gamma: f64) -> Result<ScaledRoot> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    let done = |w: f64| ScaledRoot { omega_or_eta: w, scaling: Scaling::GammaScaling };
    if gamma == 2.0 {
        return Ok(done(0.0));
    }
    let target = 2.0 / gamma;
    let lo = -(gamma / 2.0 + 1.0).powi(2) - 1.0;
    let hi = PI * PI / 4.0;
    if !(tan_ratio(lo) < target) {
        return Err(Error::Convergence(format!("omega bracket fails for gamma = {gamma}")));
    }
    let w = bisect(|w| if w >= hi { 1.0 } else { tan_ratio(w) - target }, lo, hi);
    Ok(done(w))
}

/// `x cot x`.
fn x_cot(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 3.0
    } else {
        x / x.tan()
    }
}

/// Largest root `η` of `√−η cot(B* 2^{−1/3} √−η) = Ai'(η)/Ai(η)`. It lies
/// in `(max(r₀, −(π/B')²), 0)` with `B' = B* 2^{−1/3}` and `r₀` the first
/// zero of `Ai`; the difference of the two sides increases across it.
pub fn eta_solve(b_star: f64) -> Result<ScaledRoot> {
    if !(b_star > 0.0 && b_star.is_finite()) {
        return Err(Error::Domain(format!("B* = {b_star} must be positive")));
    }
    let bp = b_star * 2f64.powf(-1.0 / 3.0);
    let r0 = airy_ai_first_zero();
    let lo = r0.max(-(PI / bp).powi(2));
    let g = |eta: f64| -> f64 {
        if eta <= lo {
            return -1.0;
        }
        if eta >= 0.0 {
            return 1.0;
        }
        let s = (-eta).sqrt();
        let lhs = x_cot(bp * s) / bp;
        match (airy_ai(eta), airy_ai_dx(eta)) {
            (Ok(a), Ok(ap)) => lhs - ap / a,
            _ => f64::NAN,
        }
    };
    let eta = bisect(g, lo, 0.0);
    if !(eta.is_finite() && eta < 0.0) {
        return Err(Error::Convergence(format!("eta solver failed for B* = {b_star}")));
    }
    Ok(ScaledRoot { omega_or_eta: eta, scaling: Scaling::AiryScaling })
}

/// Residual `tan(b√−θ)/√−θ + Γ(θ/2)/(√2 Γ((θ+1)/2))` of the zero-drift root
/// equation for `θ < 0`.
pub fn beta_zero_eq(theta: f64, b: f64) -> Result<f64> {
    if !(theta < 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!("need theta < 0 and b > 0, got theta = {theta}, b = {b}")));
    }
    let s = (-theta).sqrt();
    let g = gamma_fn(Complex64::new(theta / 2.0, 0.0))?;
    let rg = rgamma_scaled(Complex64::new((theta + 1.0) / 2.0, 0.0)).to_c();
    Ok((b * s).tan() / s + (g * rg).re / 2f64.sqrt())
}

/// The root of [`beta_zero_eq`] between the first tangent pole
/// `−π²/(4b²)` and 0, which is `θ_max` at `β = 0`.
pub fn beta_zero_root(b: f64) -> Result<f64> {
    let pole = -PI * PI / (4.0 * b * b);
    let lo = pole * (1.0 - 1e-12);
    let hi = pole * 1e-9;
    let f = |t: f64| beta_zero_eq(t, b).unwrap_or(f64::NAN);
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(Error::NoRoot(format!("no sign change of the zero-drift equation for b = {b}")));
    }
    Ok(bisect(|t| -f(t), lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::airy_ai_dx_first_zero;

    fn p(beta: f64, b: f64) -> ModelParams {
        ModelParams::new(beta, b, 0.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn positive_at_origin() {
        for &(beta, b) in &[(1.0, 2.0), (3.0, 5.0), (-2.0, 1.0), (0.0, 4.0)] {
            let f = spectral_fn(0.0, p(beta, b)).unwrap();
            let want = (-beta * b / 2.0).exp() / (beta * b / 2.0).cosh();
            assert!(f > 0.0);
            if beta > 0.0 {
                // the normalised function carries an absolute rounding error
                assert!((f - want).abs() < 1e-14, "beta={beta} f={f}");
            }
        }
    }

    #[test]
    fn independent_of_root_branch() {
        use crate::special::{pcf, pcf_dz};
        let pr = p(0.7, 3.0);
        for &theta in &[-0.3, -0.05, 0.4] {
            let th = Complex64::new(theta, 0.0);
            let d = pcf(-th, -pr.beta).unwrap().to_complex();
            let dp = pcf_dz(-th, -pr.beta).unwrap().to_complex();
            let r = (pr.beta * pr.beta + 4.0 * th).sqrt();
            let direct = |r: Complex64| d * (pr.b / 2.0 * r).cosh() - 2.0 * dp * (pr.b / 2.0 * r).sinh() / r;
            let (a, b) = (direct(r), direct(-r));
            assert!((a - b).norm() < 1e-14 * a.norm());
            let f = spectral_fn(theta, pr).unwrap();
            assert_eq!(f.signum(), a.re.signum());
        }
    }

    #[test]
    fn zero_drift_root() {
        let r = theta_max(p(0.0, 10.0)).unwrap();
        assert!(r.residual < 1e-12);
        let d = 0.01 * r.theta_max.abs();
        let lo = spectral_fn(r.theta_max - d, p(0.0, 10.0)).unwrap();
        let hi = spectral_fn(r.theta_max + d, p(0.0, 10.0)).unwrap();
        assert!(lo < 0.0 && hi > 0.0);
        // roots from an arbitrary-precision solve of the same equation
        let r20 = theta_max(p(0.0, 20.0)).unwrap();
        assert!(rel(r20.theta_max, -0.005_461_839_244_400_455_5) < 1e-12);
        let a = theta_max_asym(p(0.0, 20.0), ThetaFormula::LargeLevelZeroDrift).unwrap();
        assert!((a + PI * PI / 1600.0 * (1.0 - (2.0 * PI).sqrt() / 20.0)).abs() < 1e-16);
        assert_eq!(r20.seed_source, SeedSource::LargeLevelZeroDrift);
    }

    #[test]
    fn positive_drift_root() {
        let r = theta_max(p(1.0, 10.0)).unwrap();
        let a = theta_max_asym(p(1.0, 10.0), ThetaFormula::LargeLevelPositiveDrift).unwrap();
        assert!(rel(a, r.theta_max) < 0.05, "{a} vs {}", r.theta_max);
    }

    #[test]
    fn negative_drift_root() {
        let r = theta_max(p(-1.0, 15.0)).unwrap();
        assert!(rel(r.theta_max, -0.280_380_466_618_929_82) < 1e-12);
        let a = theta_max_asym(p(-1.0, 15.0), ThetaFormula::LargeLevelNegativeDrift).unwrap();
        assert!(rel(a, -0.275_758_597_484_001_34) < 1e-12, "{a}");
    }

    #[test]
    fn seeded_matches_cold_scan() {
        for pr in [p(0.0, 20.0), p(1.0, 6.0), p(-1.0, 8.0), p(-30.0, 2.0), p(2.0, 1.0)] {
            let seeded = theta_max(pr).unwrap();
            let cold = theta_max_scan(pr).unwrap();
            assert!(rel(seeded.theta_max, cold.theta_max) < 1e-12, "{pr:?}");
            assert!(dominant(&pr, cold.theta_max).unwrap());
        }
    }

    #[test]
    fn gaps_shrink_with_level() {
        let fams: [(f64, [f64; 3], ThetaFormula); 3] = [
            (1.0, [6.0, 9.0, 12.0], ThetaFormula::LargeLevelPositiveDrift),
            (-1.0, [8.0, 12.0, 16.0], ThetaFormula::LargeLevelNegativeDrift),
            (0.0, [6.0, 9.0, 12.0], ThetaFormula::LargeLevelZeroDrift),
        ];
        for (beta, bs, f) in fams {
            let gaps: Vec<f64> = bs
                .iter()
                .map(|&b| {
                    let n = theta_max(p(beta, b)).unwrap().theta_max;
                    rel(theta_max_asym(p(beta, b), f).unwrap(), n)
                })
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "beta={beta}: {gaps:?}");
        }
    }

    #[test]
    fn overcapacity_formula_value() {
        let a = theta_max_asym(p(4.0, 4.0), ThetaFormula::StrongOvercapacity).unwrap();
        let want = -4.0 / (2.0 * PI).sqrt() * (-16.0f64).exp() * (-8.0f64).exp();
        assert!(rel(a, want) < 1e-14);
    }

    #[test]
    fn undercapacity_formula_near_root() {
        let pr = p(-30.0, 2.0);
        let a = theta_max_asym(pr, ThetaFormula::StrongUndercapacity).unwrap();
        let n = theta_max(pr).unwrap().theta_max;
        assert!(rel(a, n) < 0.02, "{a} vs {n}");
    }

    #[test]
    fn gamma_scaling_near_root() {
        let pr = p(0.1, 20.0);
        assert_eq!(theta_max_asym(pr, ThetaFormula::GammaScaling).unwrap(), -1.0 / 400.0);
        assert!(rel(theta_max(pr).unwrap().theta_max, -0.002_071_875_823_066_926_2) < 1e-12);
        // fixed γ = βb = 2, growing level
        let gaps: Vec<f64> = [20.0, 80.0, 320.0]
            .iter()
            .map(|&b| {
                let pr = p(2.0 / b, b);
                rel(theta_max_asym(pr, ThetaFormula::GammaScaling).unwrap(), theta_max(pr).unwrap().theta_max)
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 0.02, "{gaps:?}");
    }

    #[test]
    fn small_level_near_root() {
        let beta = -40.0;
        let pr = p(beta, 1.0 / 40f64.powf(1.0 / 3.0));
        let a = theta_max_asym(pr, ThetaFormula::SmallLevel).unwrap();
        let n = theta_max(pr).unwrap().theta_max;
        assert!(rel(a, n) < 0.02, "{a} vs {n}");
    }

    #[test]
    fn omega_branch() {
        assert_eq!(omega_solve(2.0).unwrap().omega_or_eta, 0.0);
        assert!((omega_solve(1e-9).unwrap().omega_or_eta - PI * PI / 4.0).abs() < 1e-6);
        let w4 = omega_solve(4.0).unwrap().omega_or_eta;
        assert!(w4 < 0.0);
        let s = (-w4).sqrt();
        assert!((s.tanh() / s - 0.5).abs() < 1e-12);
        assert!(omega_solve(1.0).unwrap().omega_or_eta > 0.0);
        assert!(omega_solve(3.0).unwrap().omega_or_eta < 0.0);
        assert!((omega_solve(1.999_999).unwrap().omega_or_eta).abs() < 1e-5);
    }

    #[test]
    fn eta_limits() {
        let r0 = airy_ai_first_zero();
        assert!((r0 + 2.338_107_410_459_767).abs() < 1e-12);
        assert!((eta_solve(1e-3).unwrap().omega_or_eta - r0).abs() < 1e-3);
        // two-term large-B* expansion, consistent with the large-level
        // undercapacity formula
        let ratio = airy_ai(0.0).unwrap() / airy_ai_dx(0.0).unwrap();
        let lead = |bs: f64| -(2f64.powf(2.0 / 3.0)) * PI * PI / (bs * bs);
        let big = eta_solve(50.0).unwrap().omega_or_eta;
        let two_term = lead(50.0) * (1.0 + 2.0 * 2f64.powf(1.0 / 3.0) * ratio / 50.0);
        assert!(rel(big, two_term) < 5e-3, "{big} vs {two_term}");
        assert!(rel(eta_solve(500.0).unwrap().omega_or_eta, lead(500.0)) < 0.01);
        let rs = airy_ai_dx_first_zero();
        let bs = 0.5 * PI * 2f64.powf(1.0 / 3.0) / (-rs).sqrt();
        assert!((eta_solve(bs).unwrap().omega_or_eta - rs).abs() < 1e-10);
    }

    #[test]
    fn zero_drift_equation_agrees() {
        let r = theta_max(p(0.0, 10.0)).unwrap().theta_max;
        assert!(beta_zero_eq(r, 10.0).unwrap().abs() < 1e-8);
        let root = beta_zero_root(20.0).unwrap();
        let n = theta_max(p(0.0, 20.0)).unwrap().theta_max;
        assert!((root - n).abs() < 1e-10);
        // near 0⁻ the right side behaves like −(2/θ)/(√2 √π)
        let t = -1e-7;
        let g = beta_zero_eq(t, 1.0).unwrap() - (1.0 * (-t).sqrt()).tan() / (-t).sqrt();
        assert!(rel(g, 2.0 / t / (2.0 * PI).sqrt()) < 1e-5);
        assert!(matches!(beta_zero_eq(-2.0, 1.0), Err(Error::Pole(_))));
    }
}
