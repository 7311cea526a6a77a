//! Complex Gamma function (Lanczos, g = 671/128, 14 terms) with reflection.

use crate::error::{Error, Result};
use crate::scaled::Scaled;
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G_SHIFT: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `ln Γ(z)` for `Re z >= 0.5` (principal branch of the series, not of log).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let tmp = z + LANCZOS_G_SHIFT;
    let tmp = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = Complex64::new(LANCZOS_C0, 0.0);
    let mut y = z;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + (ser * SQRT_2PI / z).ln()
}

/// `sin(pi z)` with exact argument reduction on the real part, so integers
/// give exact zeros.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let w = Complex64::new(z.re - n, z.im) * PI;
    let s = w.sin();
    if n.rem_euclid(2.0) == 1.0 {
        -s
    } else {
        s
    }
}

pub fn cos_pi(z: Complex64) -> Complex64 {
    sin_pi(z + 0.5)
}

/// `sin(pi z)` as a scaled number; safe for large `|Im z|`.
pub fn sin_pi_scaled(z: Complex64) -> Scaled {
    let n = z.re.round();
    let r = z.re - n;
    let sign = if n.rem_euclid(2.0) == 1.0 { -1.0 } else { 1.0 };
    let w = Complex64::new(r, z.im) * PI;
    if w.im.abs() < 30.0 {
        return Scaled::from_c(w.sin() * sign);
    }
    // sin w = e^{-iw} (e^{2iw} - 1) / (2i) for Im w > 0, conjugate otherwise
    let half_i = Complex64::new(0.0, 0.5);
    if w.im > 0.0 {
        let tail = Complex64::new(1.0, 0.0) - (Complex64::i() * w * 2.0).exp();
        Scaled::exp_of(-Complex64::i() * w).mul_c(tail * half_i * sign)
    } else {
        let wc = w.conj();
        let tail = Complex64::new(1.0, 0.0) - (Complex64::i() * wc * 2.0).exp();
        Scaled::exp_of(-Complex64::i() * wc).mul_c(tail * half_i * sign).conj()
    }
}

pub fn cos_pi_scaled(z: Complex64) -> Scaled {
    sin_pi_scaled(z + 0.5)
}

/// `ln Γ(z)` on the whole plane minus the poles; the imaginary part is only
/// meaningful modulo `2π`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(format!("Gamma pole at z = {}", z.re)));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        let s = sin_pi_scaled(z);
        let ln_s = s.mant.ln() + s.exp;
        Ok(Complex64::new(PI.ln(), 0.0) - ln_s - ln_gamma_right(Complex64::new(1.0, 0.0) - z))
    }
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Γ(z). Relative error is close to machine precision for moderate `|z|`.
pub fn gamma_fn(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(Error::Pole(format!("Gamma pole at z = {}", z.re)));
    }
    if z.re >= 0.5 {
        return Ok(ln_gamma_right(z).exp());
    }
    let one_minus = Complex64::new(1.0, 0.0) - z;
    Ok(PI / (sin_pi(z) * ln_gamma_right(one_minus).exp()))
}

/// `1/Γ(z)` as a scaled number; entire, exactly zero at the poles of Γ.
pub fn rgamma_scaled(z: Complex64) -> Scaled {
    if is_pole(z) {
        return Scaled::ZERO;
    }
    if z.re >= 0.5 {
        return Scaled::exp_of(-ln_gamma_right(z));
    }
    let g = Scaled::exp_of(ln_gamma_right(Complex64::new(1.0, 0.0) - z));
    (g * sin_pi_scaled(z)).scale(1.0 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    // Stirling series after shifting the argument up by `n`; independent of
    // the Lanczos coefficients.
    fn ln_gamma_stirling(z: Complex64) -> Complex64 {
        let mut shift = Complex64::new(0.0, 0.0);
        let mut w = z;
        while w.norm() < 40.0 {
            shift += w.ln();
            w += 1.0;
        }
        let w2 = w * w;
        let series = 1.0 / (12.0 * w) - 1.0 / (360.0 * w * w2) + 1.0 / (1260.0 * w * w2 * w2)
            - 1.0 / (1680.0 * w * w2 * w2 * w2)
            + 1.0 / (1188.0 * w * w2 * w2 * w2 * w2);
        (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
    }

    #[test]
    fn half_integer_and_factorials() {
        let g = gamma_fn(c(0.5)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-15);
        let mut fact = 1.0;
        for n in 1..20 {
            let g = gamma_fn(c(n as f64)).unwrap();
            assert!((g.re - fact).abs() <= 2e-14 * fact, "n={n}");
            fact *= n as f64;
        }
    }

    #[test]
    fn agrees_with_stirling_on_disk() {
        for i in 0..60 {
            let r = 0.7 + 49.0 * (i as f64 / 59.0);
            let ang = -1.4 + 2.8 * ((i * 7 % 60) as f64 / 59.0);
            let z = Complex64::from_polar(r, ang);
            let a = gamma_fn(z).unwrap();
            let b = ln_gamma_stirling(z).exp();
            assert!((a - b).norm() <= 1e-12 * b.norm(), "z={z} a={a} b={b}");
        }
    }

    #[test]
    fn reflection_region() {
        for &x in &[-0.5, -1.5, -2.25, -7.3, -20.7] {
            let a = gamma_fn(c(x)).unwrap();
            let b = PI / (sin_pi(c(x)) * gamma_fn(c(1.0 - x)).unwrap());
            assert!((a - b).norm() <= 1e-13 * b.norm());
        }
        let g = gamma_fn(c(-0.5)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        assert!(matches!(gamma_fn(c(0.0)), Err(Error::Pole(_))));
        assert!(matches!(gamma_fn(c(-3.0)), Err(Error::Pole(_))));
        assert!(rgamma_scaled(c(-4.0)).is_zero());
    }

    #[test]
    fn small_argument_asymptotes() {
        let th = 1e-6;
        let g = gamma_fn(c(th / 2.0)).unwrap().re;
        assert!((g * th / 2.0 - 1.0).abs() < 1e-5);
        let g = gamma_fn(c(0.5)).unwrap().re;
        assert!((g - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_matches_for_large_imaginary_parts() {
        let z = Complex64::new(-3.3, 400.0);
        let r = rgamma_scaled(z);
        let lg = ln_gamma(z).unwrap();
        assert!((r.ln_norm() + lg.re).abs() < 1e-9 * lg.re.abs());
    }

    #[test]
    fn sin_pi_exact_zeros_and_large_imag() {
        assert_eq!(sin_pi(c(7.0)).norm(), 0.0);
        let z = Complex64::new(0.3, 15.0);
        let a = sin_pi_scaled(z).to_c();
        let b = (z * PI).sin();
        assert!((a - b).norm() <= 1e-12 * b.norm());
    }
}
