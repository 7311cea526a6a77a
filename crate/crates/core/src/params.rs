use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Drift offset `beta`, target level `b > 0` and start point `x < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub b: f64,
    pub x: f64,
}

impl ModelParams {
    pub fn new(beta: f64, b: f64, x: f64) -> Result<Self> {
        let p = ModelParams { beta, b, x };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`ModelParams::new`] but allows `x == b` (a passage time of zero).
    pub fn new_closed(beta: f64, b: f64, x: f64) -> Result<Self> {
        let p = ModelParams { beta, b, x };
        if !(beta.is_finite() && b.is_finite() && x.is_finite()) || b <= 0.0 || x > b {
            return Err(Error::Domain(format!("invalid parameters beta={beta}, b={b}, x={x}")));
        }
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.b.is_finite() && self.x.is_finite()) {
            return Err(Error::Domain("parameters must be finite".into()));
        }
        if self.b <= 0.0 {
            return Err(Error::Domain(format!("level b = {} must be positive", self.b)));
        }
        if self.x >= self.b {
            return Err(Error::Domain(format!("start x = {} must lie below b = {}", self.x, self.b)));
        }
        Ok(())
    }

    pub fn with_x(&self, x: f64) -> Self {
        ModelParams { x, ..*self }
    }

    /// Drift of the diffusion; the `x < 0` branch is used at exactly zero.
    pub fn drift(&self, x: f64) -> f64 {
        if x > 0.0 {
            -self.beta
        } else {
            -x - self.beta
        }
    }
}
