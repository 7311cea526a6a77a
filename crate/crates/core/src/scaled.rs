//! Complex numbers carried as `mantissa * exp(exponent)`.
//!
//! Parabolic cylinder values and hyperbolic factors routinely leave the
//! range of `f64`; products and ratios are formed on the mantissas while the
//! exponents are added, and only the final result is collapsed.

use num_complex::Complex64;
use std::ops::{Div, Mul, Neg};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub exp: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mant: Complex64 { re: 0.0, im: 0.0 }, exp: 0.0 };
    pub const ONE: Scaled = Scaled { mant: Complex64 { re: 1.0, im: 0.0 }, exp: 0.0 };

    pub fn new(mant: Complex64, exp: f64) -> Self {
        let a = mant.norm();
        if a == 0.0 || !a.is_finite() {
            return Scaled { mant, exp: if a == 0.0 { 0.0 } else { exp } };
        }
        if (1e-64..1e64).contains(&a) {
            Scaled { mant, exp }
        } else {
            Scaled { mant: mant / a, exp: exp + a.ln() }
        }
    }

    pub fn from_c(z: Complex64) -> Self {
        Scaled::new(z, 0.0)
    }

    pub fn from_real(x: f64) -> Self {
        Scaled::new(Complex64::new(x, 0.0), 0.0)
    }

    /// `exp(lz)` without overflow.
    pub fn exp_of(lz: Complex64) -> Self {
        Scaled { mant: Complex64::from_polar(1.0, lz.im), exp: lz.re }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.norm() == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.re.is_finite() && self.mant.im.is_finite() && self.exp.is_finite()
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_norm(&self) -> f64 {
        self.mant.norm().ln() + self.exp
    }

    pub fn conj(self) -> Self {
        Scaled { mant: self.mant.conj(), exp: self.exp }
    }

    pub fn scale(self, f: f64) -> Self {
        Scaled::new(self.mant * f, self.exp)
    }

    pub fn mul_c(self, c: Complex64) -> Self {
        Scaled::new(self.mant * c, self.exp)
    }

    /// Collapse to an ordinary complex number (may overflow or underflow).
    pub fn to_c(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mant * self.exp.exp()
    }

    /// Mantissa/exponent split with `|mant| in [1, e)`, or `(0, 0)`.
    pub fn canonical(self) -> (Complex64, f64) {
        let a = self.mant.norm();
        if a == 0.0 {
            return (Complex64::new(0.0, 0.0), 0.0);
        }
        let total = a.ln() + self.exp;
        let k = total.floor();
        (self.mant / a * (total - k).exp(), k)
    }

    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let e = self.exp.max(other.exp);
        Scaled::new(self.mant * (self.exp - e).exp() + other.mant * (other.exp - e).exp(), e)
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(-other)
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { mant: -self.mant, exp: self.exp }
    }
}
