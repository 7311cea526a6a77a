//! Runs the cross-oracle suite in its quick profile and prints the report.
//! Pass a criterion number to run just that one at full size.

use hwfpt::validation::{run_all, run_criterion, ValidationOptions, ValidationReport};

fn main() {
    let report = match std::env::args().nth(1).and_then(|a| a.parse().ok()) {
        Some(id) => {
            let opts = ValidationOptions::default();
            ValidationReport { options: opts, criteria: vec![run_criterion(id, opts)] }
        }
        None => run_all(ValidationOptions { quick: true, ..Default::default() }),
    };
    print!("{}", report.table());
}
