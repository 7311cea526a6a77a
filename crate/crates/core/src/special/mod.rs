//! Special functions: parabolic cylinder, Gamma, Airy and Gaussian tails.

pub mod airy;
pub mod erf;
pub mod gamma;
pub mod pcf;

pub use airy::{airy_ai, airy_ai_dx, airy_ai_dx_first_zero, airy_ai_first_zero};
pub use erf::{gaussian_tail_integral, normal_cdf};
pub use gamma::gamma_fn;
pub use pcf::{pcf, pcf_by_quadrature, pcf_dz, pcf_log_ratio, PcfValue};
