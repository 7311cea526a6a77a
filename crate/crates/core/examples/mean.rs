//! Exact mean passage time, cross-checked by differentiating the transform.

use hwfpt::moments::{mean_exact, mean_via_transform};
use hwfpt::ModelParams;

fn main() -> hwfpt::Result<()> {
    println!("{:>6} {:>6} {:>6} {:>22} {:>22} {:>10}", "beta", "b", "x", "exact", "d/dtheta L", "rel gap");
    for (beta, b, x) in [(1.0, 1.0, 0.0), (1.0, 5.0, 0.0), (0.0, 2.0, 0.0), (-1.0, 1.0, 0.5), (-2.0, 5.0, -1.0), (2.0, 0.5, 0.25)] {
        let p = ModelParams::new(beta, b, x)?;
        let e = mean_exact(p)?.value;
        let d = mean_via_transform(p)?.value;
        println!("{beta:>6} {b:>6} {x:>6} {e:>22.15e} {d:>22.15e} {:>10.2e}", ((d - e) / e).abs());
    }
    Ok(())
}
