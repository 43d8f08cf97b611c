//! Acceptance criteria: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;

use bosegas::verify::{run_checks, VerifyConfig};

fn main() -> ExitCode {
    let mut config = VerifyConfig::default();
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--seed" => {
                if let Some(s) = args.next().and_then(|s| s.parse().ok()) {
                    config.seed = s;
                }
            }
            a if !a.starts_with('-') => config.filter = Some(a.to_string()),
            _ => {}
        }
    }
    println!("acceptance suite, seed {}", config.seed);
    let results = run_checks(&config);
    let mut failed = 0;
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let slow = if r.seconds > r.budget_seconds { " [over budget]" } else { "" };
        println!(
            "{verdict} criterion {:>2} {:<26} {:>7.2}s (budget {}s){slow}  {}",
            r.id, r.name, r.seconds, r.budget_seconds, r.detail
        );
        failed += usize::from(!r.passed);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
