//! Runs every acceptance criterion and prints one pass/fail line for each.
//! Exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use bcklab::suite::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    println!(
        "\nrunning {} acceptance criteria (seed {})",
        CRITERIA.len(),
        cfg.seed
    );
    for (n, _) in CRITERIA {
        let t0 = Instant::now();
        let report = run_criterion(n, &cfg);
        println!("{}  [{:.1}s]", report.line(), t0.elapsed().as_secs_f64());
        if !report.pass {
            failed += 1;
            for c in report.checks.iter().filter(|c| !c.pass) {
                println!(
                    "        failed check {}: metric {:e}, tolerance {:e}",
                    c.name, c.metric, c.tolerance
                );
            }
        }
    }
    println!(
        "\nacceptance: {} passed; {failed} failed; finished in {:.1}s\n",
        CRITERIA.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
