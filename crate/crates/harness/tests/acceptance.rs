//! Full-scale verification run: every suite at its default configuration,
//! one PASS/FAIL line per suite. Exits non-zero if any suite fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use learnaug_harness::{run_suite, ExperimentConfig, SUITES};

/// Each suite is meant to finish within this budget on a laptop.
const BUDGET: Duration = Duration::from_secs(300);

fn main() -> ExitCode {
    let mut failed = 0;
    println!("running {} acceptance suites", SUITES.len());
    for info in SUITES {
        let start = Instant::now();
        let outcome = run_suite(&ExperimentConfig::new(info.id));
        let elapsed = start.elapsed();
        match outcome {
            Ok(report) => {
                let ok = report.passed() && elapsed <= BUDGET;
                failed += !ok as usize;
                println!(
                    "{} {:<20} {} checks, {} records, {:.1}s — {}",
                    if ok { "PASS" } else { "FAIL" },
                    info.id,
                    report.checks.len(),
                    report.records.len(),
                    elapsed.as_secs_f64(),
                    info.summary
                );
                for c in report.failures() {
                    println!("     failed [{}] {}: {} vs {} (slack {}·{:.4})", c.formula, c.name, c.lhs, c.rhs, c.slack, c.stderr);
                }
                for e in &report.errors {
                    println!("     error: {e}");
                }
                if elapsed > BUDGET {
                    println!("     over the {}s budget", BUDGET.as_secs());
                }
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {:<20} could not run: {e}", info.id);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", SUITES.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
