//! Mean first passage times: closed forms, a transform-derivative
//! cross-check and the three asymptotic regimes.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quad::{integrate, QuadTol};
use crate::special::gaussian_tail_integral;
use crate::transforms::laplace;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMethod {
    Exact,
    TransformDerivative,
    AsymptoticLargeLevel,
    AsymptoticUndercapacity,
    AsymptoticTransition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanResult {
    pub value: f64,
    pub method: MeanMethod,
}

/// Asymptotic regimes of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanRegime {
    /// Large level: `b → ∞`, `b − x → ∞`, `β > 0`.
    LargeLevel,
    /// Strong undercapacity: `β → −∞` with `x, b = O(|β|)`.
    Undercapacity,
    /// Transition: `β → 0⁺` with `βb = O(1)`.
    Transition,
}

/// Below this `|β|` the closed forms are replaced by the transform derivative.
pub const SMALL_BETA: f64 = 1e-4;

fn check_closed(p: &ModelParams) -> Result<()> {
    if !(p.beta.is_finite() && p.b.is_finite() && p.x.is_finite()) || p.b <= 0.0 || p.x > p.b {
        return Err(Error::Domain(format!("invalid parameters beta={}, b={}, x={}", p.beta, p.b, p.x)));
    }
    Ok(())
}

/// `(e^y − 1 − y) / y²`.
fn phi2(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 3..20 {
            term *= y / k as f64;
            sum += term;
        }
        sum
    } else {
        (y.exp_m1() - y) / (y * y)
    }
}

/// `∫_0^∞ e^{βu − u²/2} (e^{ux} − 1)/u du`, truncated at `40 + 10|β|`.
fn kink_integral(beta: f64, x: f64) -> Result<f64> {
    let f = |u: f64| {
        let g = (beta * u - u * u / 2.0).exp();
        if u == 0.0 {
            x
        } else {
            g * (u * x).exp_m1() / u
        }
    };
    // geometric panels from the integrand's width 1/(1+|β|), so that a
    // narrow peak at the origin is never skipped
    let top = 40.0 + 10.0 * beta.abs();
    let tol = QuadTol { abs: 1e-16, rel: 1e-13, max_intervals: 4000 };
    let mut lo = 0.0;
    let mut hi = 1.0 / (1.0 + beta.abs());
    let mut sum = 0.0;
    while lo < top {
        sum += integrate(f, lo, hi.min(top), tol)?;
        lo = hi;
        hi *= 2.0;
    }
    Ok(sum)
}

/// Exact mean. Routes `|β| < 1e−4` to [`mean_via_transform`].
pub fn mean_exact(params: ModelParams) -> Result<MeanResult> {
    check_closed(&params)?;
    let ModelParams { beta, b, x } = params;
    if x == b {
        return Ok(MeanResult { value: 0.0, method: MeanMethod::Exact });
    }
    if beta.abs() < SMALL_BETA {
        return mean_via_transform(params);
    }
    if beta * b > 700.0 {
        return Err(Error::Overflow(format!("exp(beta b) overflows for beta b = {}", beta * b)));
    }
    let tail = gaussian_tail_integral(beta)?;
    let value = if x >= 0.0 {
        // (x−b)/β + (e^{βb} − e^{βx})(1/β² + I/β), rearranged so nothing
        // cancels when β(b−x) is small
        let d = b - x;
        let e_d = (beta * d).exp_m1();
        d * d * phi2(beta * d) + (beta * x).exp_m1() * e_d / (beta * beta) + (beta * x).exp() * e_d * tail / beta
    } else {
        b * b * phi2(beta * b) + (beta * b).exp_m1() * tail / beta - kink_integral(beta, x)?
    };
    Ok(MeanResult { value, method: MeanMethod::Exact })
}

/// `−dL/dθ` at `θ = 0` by a Richardson-extrapolated central difference.
pub fn mean_via_transform(params: ModelParams) -> Result<MeanResult> {
    check_closed(&params)?;
    if params.x == params.b {
        return Ok(MeanResult { value: 0.0, method: MeanMethod::TransformDerivative });
    }
    let l = |t: f64| laplace(Complex64::new(t, 0.0), params).map(|e| e.to_complex().re);
    let diff = |h: f64| -> Result<f64> { Ok((l(-h)? - l(h)?) / (2.0 * h)) };

    // Scale the step so that h·E[T] is near 1e−3. The one-sided quotient
    // (1 − L(h))/h only evaluates θ > 0, where no singularity can sit, and
    // approaches E[T] from below.
    let mut h = 1e-3;
    for _ in 0..40 {
        let m = (1.0 - l(h)?) / h;
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Convergence(format!("transform derivative is {m} at step {h}")));
        }
        let next = 1e-3 / m;
        let done = next >= 0.5 * h;
        h = next.min(h);
        if done {
            break;
        }
    }
    let (d1, d2, d4) = (diff(h)?, diff(h / 2.0)?, diff(h / 4.0)?);
    let r1 = (4.0 * d2 - d1) / 3.0;
    let r2 = (4.0 * d4 - d2) / 3.0;
    if (r1 - r2).abs() > 1e-6 * r2.abs() {
        return Err(Error::Convergence(format!("Richardson estimates {r1} and {r2} disagree")));
    }
    Ok(MeanResult { value: r2, method: MeanMethod::TransformDerivative })
}

/// Asymptotic mean in the given regime. Calls outside
/// `βb > 3, β(b−x) > 0` (large level), `β < −10, |x|, b ≤ 2|β|`
/// (undercapacity) or `0 < βb < 3, b ≥ 20` (transition) are refused.
///
/// In the large-level regime the factor `1 − e^{−β(b−x)}` is applied when
/// `β(b−x) < 10`, and for `β ≥ 6` the Gaussian tail integral is replaced by
/// its leading term, giving `√(2π) β⁻¹ e^{βb + β²/2}`.
pub fn mean_asymptotic(params: ModelParams, regime: MeanRegime) -> Result<MeanResult> {
    params.validate()?;
    let ModelParams { beta, b, x } = params;
    let refuse = |why: &str| Err(Error::Regime(format!("{why} (beta={beta}, b={b}, x={x})")));
    match regime {
        MeanRegime::LargeLevel => {
            if !(beta * b > 3.0 && beta * (b - x) > 0.0) {
                return refuse("large-level regime needs beta b > 3 and beta (b - x) > 0");
            }
            if beta * b > 700.0 {
                return Err(Error::Overflow(format!("exp(beta b) overflows for beta b = {}", beta * b)));
            }
            let mut value = if beta >= 6.0 {
                (2.0 * std::f64::consts::PI).sqrt() / beta * (beta * b + beta * beta / 2.0).exp()
            } else {
                (beta * b).exp() * (1.0 / (beta * beta) + gaussian_tail_integral(beta)? / beta)
            };
            if beta * (b - x) < 10.0 {
                value *= -(-beta * (b - x)).exp_m1();
            }
            Ok(MeanResult { value, method: MeanMethod::AsymptoticLargeLevel })
        }
        MeanRegime::Undercapacity => {
            if !(beta < -10.0 && x.abs() <= 2.0 * beta.abs() && b <= 2.0 * beta.abs()) {
                return refuse("undercapacity regime needs beta < -10 and |x|, b <= 2|beta|");
            }
            let value = if x >= 0.0 {
                (b - x) / -beta
            } else {
                if 1.0 + x / beta <= 0.0 {
                    return refuse("start point below -|beta| leaves the undercapacity formula undefined");
                }
                b / -beta + (x / beta).ln_1p()
            };
            Ok(MeanResult { value, method: MeanMethod::AsymptoticUndercapacity })
        }
        MeanRegime::Transition => {
            if !(beta * b > 0.0 && beta * b < 3.0 && b >= 20.0) {
                return refuse("transition regime needs 0 < beta b < 3 and b >= 20");
            }
            let value = if x >= 0.0 {
                ((beta * b).exp() - (beta * x).exp() + beta * (x - b)) / (beta * beta)
            } else {
                b * b * phi2(beta * b)
            };
            Ok(MeanResult { value, method: MeanMethod::AsymptoticTransition })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(beta: f64, b: f64, x: f64) -> ModelParams {
        ModelParams::new_closed(beta, b, x).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn zero_at_level() {
        assert_eq!(mean_exact(p(1.0, 2.0, 2.0)).unwrap().value, 0.0);
        assert_eq!(mean_via_transform(p(1.0, 2.0, 2.0)).unwrap().value, 0.0);
    }

    #[test]
    fn both_closed_forms_agree_at_origin() {
        let (beta, b) = (1.0, 2.0);
        let tail = gaussian_tail_integral(beta).unwrap();
        let from_pos = (0.0 - b) / beta + ((beta * b).exp() - 1.0) * (1.0 / (beta * beta) + tail / beta);
        let from_neg = ((beta * b).exp() - 1.0 - beta * b) / (beta * beta) + ((beta * b).exp() - 1.0) / beta * tail;
        assert!(rel(from_pos, from_neg) < 1e-12);
        let m = mean_exact(p(beta, b, 0.0)).unwrap().value;
        assert!(rel(m, from_pos) < 1e-12);
        let just_below = mean_exact(p(beta, b, -1e-13)).unwrap().value;
        assert!(rel(just_below, m) < 1e-12);
    }

    #[test]
    fn reference_point() {
        let tail = gaussian_tail_integral(1.0).unwrap();
        let want = -1.0 + (std::f64::consts::E - 1.0) * (1.0 + tail);
        assert!(rel(mean_exact(p(1.0, 1.0, 0.0)).unwrap().value, want) < 1e-13);
    }

    #[test]
    fn transform_derivative_agrees() {
        for &beta in &[-2.0, 0.5, 2.0] {
            for &b in &[0.5, 2.0, 5.0] {
                for x in [-1.0, 0.0, b / 2.0] {
                    let e = mean_exact(p(beta, b, x)).unwrap().value;
                    let t = mean_via_transform(p(beta, b, x)).unwrap().value;
                    assert!(rel(t, e) < 1e-6, "beta={beta} b={b} x={x}: {t} vs {e}");
                }
            }
        }
        let z = mean_exact(p(0.0, 1.0, 0.5)).unwrap();
        assert_eq!(z.method, MeanMethod::TransformDerivative);
        assert!(z.value > 0.0 && z.value.is_finite());
    }

    #[test]
    fn smooth_through_small_beta() {
        let below = mean_exact(p(0.99e-4, 1.0, 0.5)).unwrap().value;
        let above = mean_exact(p(1.01e-4, 1.0, 0.5)).unwrap().value;
        assert!(rel(below, above) < 1e-5);
    }

    #[test]
    fn decreasing_and_positive_in_start() {
        for &(beta, b) in &[(1.0, 2.0), (-1.5, 3.0)] {
            let xs: Vec<f64> = (0..50).map(|k| -4.0 + (b + 4.0) * k as f64 / 50.0).collect();
            let ms: Vec<f64> = xs.iter().map(|&x| mean_exact(p(beta, b, x)).unwrap().value).collect();
            assert!(ms.iter().all(|&m| m > 0.0));
            assert!(ms.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn large_level_regime() {
        let exact = mean_exact(p(1.0, 12.0, 0.0)).unwrap().value;
        let large = mean_asymptotic(p(1.0, 12.0, 0.0), MeanRegime::LargeLevel).unwrap();
        assert_eq!(large.method, MeanMethod::AsymptoticLargeLevel);
        assert!((exact / large.value - 1.0).abs() < 1e-4);
        let errs: Vec<f64> = [6.0, 9.0, 12.0]
            .iter()
            .map(|&b| {
                let e = mean_exact(p(1.0, b, 0.0)).unwrap().value;
                rel(mean_asymptotic(p(1.0, b, 0.0), MeanRegime::LargeLevel).unwrap().value, e)
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn undercapacity_regime() {
        let pr = p(-50.0, 5.0, -10.0);
        let a = mean_asymptotic(pr, MeanRegime::Undercapacity).unwrap().value;
        assert!((a - (0.1 + 1.2f64.ln())).abs() < 1e-15);
        assert!(rel(a, mean_exact(pr).unwrap().value) < 0.05);
    }

    #[test]
    fn regime_thresholds() {
        assert!(matches!(mean_asymptotic(p(1.0, 2.0, 0.0), MeanRegime::LargeLevel), Err(Error::Regime(_))));
        assert!(matches!(mean_asymptotic(p(-5.0, 2.0, 0.0), MeanRegime::Undercapacity), Err(Error::Regime(_))));
        assert!(matches!(mean_asymptotic(p(0.5, 10.0, 0.0), MeanRegime::Transition), Err(Error::Regime(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn positive_and_decreasing_in_start(beta in -3.0..3.0f64, b in 0.2..5.0f64, u in 0.0..1.0f64, v in 0.0..1.0f64) {
                let (lo, hi) = (-2.0 + (b + 2.0) * u.min(v) * 0.999, -2.0 + (b + 2.0) * u.max(v) * 0.999);
                prop_assume!(hi - lo > 1e-6);
                let m_lo = mean_exact(p(beta, b, lo)).unwrap().value;
                let m_hi = mean_exact(p(beta, b, hi)).unwrap().value;
                prop_assert!(m_hi > 0.0);
                prop_assert!(m_lo > m_hi);
            }
        }
    }
}
