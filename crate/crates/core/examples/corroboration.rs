// Exact search versus exhaustive enumeration on random pre-loaded networks.

use eon_dpp::corroborate::{corroborate, exact_search, CorroborationSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = CorroborationSpec { searches: 500, seed: 3, ..CorroborationSpec::default() };
    let report = corroborate(&spec, &exact_search)?;
    println!(
        "{} searches: {} agree, {} mismatch, {} over budget; exact found {}, heuristic found {}",
        spec.searches,
        report.agreements,
        report.mismatches,
        report.budget_exceeded,
        report.exact_found,
        report.heuristic_found
    );
    assert!(report.is_clean());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
