//! Scaled complementary error function and the Gaussian tail integral
//! `∫_0^∞ exp(βu - u²/2) du`.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `exp(x²) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 0.5 {
        // Maclaurin series of erf; erfc stays above 0.47 here
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        for n in 1..40 {
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return x2.exp() * (1.0 - 2.0 / PI.sqrt() * sum);
    }
    // Laplace continued fraction, evaluated bottom-up
    let terms = if x < 1.0 { 1200 } else if x < 2.0 { 250 } else { 80 };
    let mut tail = x;
    for k in (1..=terms).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    1.0 / (PI.sqrt() * tail)
}

/// `∫_0^∞ exp(βu − u²/2) du = sqrt(π/2) erfcx(−β/√2)`.
pub fn gaussian_tail_integral(beta: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} is not finite")));
    }
    let t = -beta * FRAC_1_SQRT_2;
    if t < 0.0 && t * t > 700.0 {
        return Err(Error::Overflow(format!("exp(beta^2/2) overflows for beta = {beta}")));
    }
    Ok((PI / 2.0).sqrt() * erfcx(t))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x * FRAC_1_SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadTol};

    fn direct(beta: f64) -> f64 {
        let tol = QuadTol { abs: 1e-300, rel: 1e-13, max_intervals: 4000 };
        integrate(|u| (beta * u - u * u / 2.0).exp(), 0.0, 40.0 + beta.max(0.0) * 2.0, tol).unwrap()
    }

    #[test]
    fn zero_is_half_gaussian() {
        let v = gaussian_tail_integral(0.0).unwrap();
        assert!((v - (PI / 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature_on_grid() {
        for i in 0..=40 {
            let beta = -10.0 + 0.5 * i as f64;
            let a = gaussian_tail_integral(beta).unwrap();
            let b = direct(beta);
            assert!((a - b).abs() <= 1e-10 * b, "beta={beta} closed={a} quad={b}");
        }
    }

    #[test]
    fn large_negative_beta_asymptote() {
        let v = gaussian_tail_integral(-10.0).unwrap();
        assert!((v * 10.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn erfcx_reference_values() {
        // arbitrary-precision evaluations of exp(x^2) erfc(x)
        let cases = [
            (-3.0, 16_205.988_853_999_586_625),
            (-0.7, 2.738_702_102_561_316_772_7),
            (0.2, 0.809_019_519_901_580_735_52),
            (0.5, 0.615_690_344_192_925_874_87),
            (0.9, 0.456_531_651_323_117_038_61),
            (1.5, 0.321_585_416_454_317_502_35),
            (3.0, 0.179_001_151_181_389_950_42),
            (5.0, 0.110_704_637_733_068_626_37),
            (12.0, 0.046_854_221_014_893_762_62),
        ];
        for (x, want) in cases {
            let got = erfcx(x);
            assert!((got / want - 1.0).abs() < 2e-15, "erfcx({x}) = {got}");
        }
    }

    #[test]
    fn overflow_and_domain() {
        assert!(matches!(gaussian_tail_integral(39.0), Err(Error::Overflow(_))));
        assert!(matches!(gaussian_tail_integral(41.0), Err(Error::Overflow(_))));
        assert!(matches!(gaussian_tail_integral(f64::NAN), Err(Error::Domain(_))));
        let far = gaussian_tail_integral(-400.0).unwrap();
        assert!((far * 400.0 - 1.0).abs() < 1e-5);
    }
}
