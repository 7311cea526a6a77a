//! Euler-Maruyama passage times, with and without Brownian-bridge crossing checks.

use hwfpt::moments::mean_exact;
use hwfpt::simulate::{mc_passage, McConfig, StepOptions};
use hwfpt::ModelParams;

fn main() -> hwfpt::Result<()> {
    let p = ModelParams::new(1.0, 2.0, 0.0)?;
    let exact = mean_exact(p)?.value;
    for (dt, bridge) in [(1e-2, false), (1e-2, true), (1e-3, true)] {
        let mut cfg = McConfig::new(p, 20_000, 7)?;
        cfg.step = StepOptions { dt, bridge };
        let s = mc_passage(cfg)?;
        println!(
            "dt={dt:<6} bridge={bridge:<5}  mean={:.4} +- {:.4}  (exact {exact:.4})  median={:.3}  capped={}",
            s.mean, s.stderr, s.quantiles.p50, s.n_capped
        );
    }
    Ok(())
}
