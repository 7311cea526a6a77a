//! Parabolic cylinder functions, Airy functions and the Gaussian tail integral.

use hwfpt::special::{airy_ai, airy_ai_first_zero, gamma_fn, gaussian_tail_integral, pcf, pcf_by_quadrature, pcf_dz};
use hwfpt::Complex64;

fn main() -> hwfpt::Result<()> {
    for (nu, z) in [(0.0, 1.0), (-0.5, 2.0), (2.0, -3.0)] {
        let nu = Complex64::new(nu, 0.0);
        println!("D_{}({z}) = {:.15e}", nu.re, pcf(nu, z)?.value.re);
    }

    // Deep in the oscillatory region the value is returned with a separate log scale.
    let nu = Complex64::new(-300.0, 900.0);
    let d = pcf(nu, -5.0)?;
    let dz = pcf_dz(nu, -5.0)?;
    println!("D_nu(-5) = ({:.6e}) * exp({:.3}),  D'/D = {:.6}", d.value, d.log_scale, dz.value / d.value * (dz.log_scale - d.log_scale).exp());

    let nu = Complex64::new(-1.3, 0.4);
    println!("series vs integral at nu = {nu}: {:.15e} / {:.15e}", pcf(nu, 0.7)?.value, pcf_by_quadrature(nu, 0.7)?);

    println!("Gamma(1/2)^2 = {:.15}", gamma_fn(Complex64::new(0.5, 0.0))?.norm_sqr());
    println!("Ai(0) = {:.15},  first zero of Ai = {:.15}", airy_ai(0.0)?, airy_ai_first_zero());
    for beta in [-5.0, 0.0, 5.0] {
        println!("int_0^inf exp(beta u - u^2/2) du at beta = {beta}: {:.15e}", gaussian_tail_integral(beta)?);
    }
    Ok(())
}
