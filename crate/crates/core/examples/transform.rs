//! Laplace transform E[exp(-theta T)] on both sides of the interface at 0.

use hwfpt::transforms::{laplace, ode_residual};
use hwfpt::{Complex64, ModelParams};

fn main() -> hwfpt::Result<()> {
    let p = ModelParams::new(1.0, 2.0, -1.0)?;
    for theta in [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(1.0, 3.0), Complex64::new(40.0, -25.0)] {
        let l = laplace(theta, p)?;
        println!("theta = {theta:>8}:  L = {:.12e}  (log scale {:.3})", l.value, l.log_scale);
    }

    println!("\nacross x = 0 at theta = 1+i:");
    let theta = Complex64::new(1.0, 1.0);
    for x in [-1e-6, 0.0, 1e-6] {
        println!("  x = {x:>6e}: {:.12e}", laplace(theta, p.with_x(x))?.to_complex());
    }

    let xs: Vec<f64> = (0..9).map(|i| -2.0 + 0.45 * i as f64).collect();
    println!("\nmax backward-equation residual on [-2, 1.6]: {:.2e}", ode_residual(theta, p, &xs)?);
    Ok(())
}
