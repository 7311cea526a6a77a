//! Level-zero cycle identities: hitting probability of b before 0 and mean cycle length.

use hwfpt::simulate::{cycle_mean, cycle_mean_check, hitting_prob, hitting_prob_check, StepOptions};
use hwfpt::ModelParams;

fn main() -> hwfpt::Result<()> {
    let p = ModelParams::new(1.0, 2.0, 0.0)?;
    let step = StepOptions { dt: 1e-3, bridge: true };
    for y in [1.0, 0.5] {
        let h = hitting_prob_check(y, p, 20_000, 1, step)?;
        let t = cycle_mean_check(y, p.beta, 5_000, 2, step)?;
        println!("y = {y}");
        println!("  P(hit b before 0) = {:.5} +- {:.5}   formula {:.5}", h.estimate, h.stderr, hitting_prob(y, p.beta, p.b));
        println!("  E[cycle]          = {:.4} +- {:.4}   formula {:.4}", t.estimate, t.stderr, cycle_mean(y, p.beta)?);
        println!("  crossing rate     = {:.5}", h.estimate / t.estimate);
    }
    Ok(())
}
