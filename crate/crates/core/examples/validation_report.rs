//! Runs a validation suite (default: all) and prints one line per check.
//!
//! `cargo run --release --example validation_report -- smallx`

use ftgap::painleve::{hm_solve, pv_sigma_solve, PII_DEFAULT_N, PII_DEFAULT_WINDOW, PV_DEFAULT_N, PV_DEFAULT_TAU_MAX};
use ftgap::validation::{run_suite, Suite};

fn main() -> ftgap::Result<()> {
    let suite: Suite = std::env::args().nth(1).as_deref().unwrap_or("all").parse()?;
    let pii = hm_solve(PII_DEFAULT_WINDOW.0, PII_DEFAULT_WINDOW.1, PII_DEFAULT_N)?;
    let pv = pv_sigma_solve(PV_DEFAULT_TAU_MAX, PV_DEFAULT_N)?;
    let report = run_suite(suite, &pii, &pv);
    for c in &report.checks {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        let note = c.error.as_deref().unwrap_or("");
        println!("{verdict} [{}] {}: observed {:.3e}, tolerance {:.1e} {note}", c.suite, c.name, c.observed, c.tolerance);
    }
    println!("{}: {}", report.suite, if report.passed { "all checks passed" } else { "failures" });
    Ok(())
}
