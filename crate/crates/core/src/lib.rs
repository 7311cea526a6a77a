//! First-passage times of the Halfin-Whitt diffusion
//! `dX = A(X) dt + √2 dW`, `A(x) = −β` for `x > 0` and `−x − β` for `x < 0`,
//! to a level `b > 0`.

pub mod cli;
pub mod error;
pub mod params;
pub mod quad;
pub mod simulate;
pub mod scaled;
pub mod special;
pub mod spectral;
pub mod inversion;
pub mod moments;
pub mod transforms;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::ModelParams;

/// Complex scalar used for the Laplace variable and transform values.
pub type ComplexScalar = Complex64;
