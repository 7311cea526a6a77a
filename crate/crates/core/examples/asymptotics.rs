//! Closed-form approximations of the mean against the exact value.

use hwfpt::moments::{mean_asymptotic, mean_exact, MeanRegime};
use hwfpt::ModelParams;

fn main() -> hwfpt::Result<()> {
    let cases = [
        (MeanRegime::LargeLevel, [(1.0, 6.0, 0.0), (1.0, 9.0, 0.0), (1.0, 12.0, 0.0)]),
        (MeanRegime::Undercapacity, [(-20.0, 2.0, -4.0), (-50.0, 5.0, -10.0), (-200.0, 20.0, -40.0)]),
        (MeanRegime::Transition, [(0.1, 20.0, 0.0), (0.02, 100.0, 0.0), (0.002, 1000.0, 0.0)]),
    ];
    for (regime, points) in cases {
        println!("{regime:?}");
        for (beta, b, x) in points {
            let p = ModelParams::new(beta, b, x)?;
            let a = mean_asymptotic(p, regime)?.value;
            let e = mean_exact(p)?.value;
            println!("  ({beta}, {b}, {x}): approx {a:.8e}  exact {e:.8e}  rel err {:.2e}", ((a - e) / e).abs());
        }
    }
    Ok(())
}
