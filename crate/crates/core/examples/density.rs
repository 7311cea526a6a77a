//! Passage-time density and CDF by numerical Laplace inversion.

use hwfpt::inversion::{default_grid, invert_density, invert_density_with, limit_law, tail_density, InversionMethod, InversionOptions};
use hwfpt::moments::mean_exact;
use hwfpt::ModelParams;

fn main() -> hwfpt::Result<()> {
    let p = ModelParams::new(1.0, 2.0, 0.0)?;
    let grid = default_grid(p, 401)?;
    let c = invert_density(p, &grid)?;
    println!("mass = {:.10}, mean = {:.10} (exact {:.10})", c.mass(), c.mean(), mean_exact(p)?.value);

    let euler = invert_density_with(p, &grid, InversionOptions { method: InversionMethod::EulerSummation, ..Default::default() })?;
    let worst = c.density.iter().zip(&euler.density).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |contour - Euler| = {worst:.2e}");

    println!("\n{:>12} {:>14} {:>14} {:>14}", "t", "density", "cdf", "tail");
    for i in (0..grid.len()).step_by(40) {
        let t = grid[i];
        println!("{t:>12.4e} {:>14.6e} {:>14.8} {:>14.6e}", c.density[i], c.cdf[i], tail_density(p, t)?);
    }

    let law = limit_law(ModelParams::new(1.0, 10.0, 0.0)?)?;
    println!("\nb = 10: C = {:.10}, C exp(-beta b) = {:.6e}", law.rate_constant, law.scale);
    Ok(())
}
