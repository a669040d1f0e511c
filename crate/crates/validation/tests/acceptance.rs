//! One PASS/FAIL line per acceptance criterion; fails if any criterion does.

use std::process::ExitCode;
use std::time::Instant;

fn main() -> ExitCode {
    let start = Instant::now();
    let results = schumpeter_validation::run_all();
    for c in &results {
        println!("{c}");
    }
    let failed = results.iter().filter(|c| !c.passed()).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.0?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
