//! The dominant singularity theta_max and the closed forms that approximate it.

use hwfpt::spectral::{beta_zero_root, default_formula, eta_solve, omega_solve, theta_max, theta_max_asym, ThetaFormula};
use hwfpt::ModelParams;

fn main() -> hwfpt::Result<()> {
    for (beta, b) in [(0.0, 20.0), (1.0, 10.0), (-1.0, 15.0), (-40.0, 0.2924), (3.0, 4.0)] {
        let p = ModelParams::new(beta, b, 0.0)?;
        let r = theta_max(p)?;
        let f = default_formula(&p);
        let a = theta_max_asym(p, f)?;
        println!(
            "beta={beta:>6} b={b:>7}: theta_max={:>22.15e}  residual={:.1e}  {f:?}={a:.6e} ({:.2}%)",
            r.theta_max,
            r.residual,
            100.0 * ((a - r.theta_max) / r.theta_max).abs()
        );
    }
    // Small drift with beta*b fixed: the gamma scaling improves as b grows.
    for b in [20.0, 80.0, 320.0] {
        let p = ModelParams::new(2.0 / b, b, 0.0)?;
        let r = theta_max(p)?.theta_max;
        let a = theta_max_asym(p, ThetaFormula::GammaScaling)?;
        println!("beta*b=2, b={b:>5}: theta_max={r:.10e}  gamma scaling {:.2}% off", 100.0 * ((a - r) / r).abs());
    }
    println!("\nzero drift, b = 10: {:.15e}", beta_zero_root(10.0)?);
    println!("omega(1)  = {:.12}", omega_solve(1.0)?.omega_or_eta);
    println!("eta(1)    = {:.12}", eta_solve(1.0)?.omega_or_eta);
    Ok(())
}
