//! Acceptance criteria A1 to A13, one line per criterion.
//!
//! Runs without the libtest harness so every line is printed even when a criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use soler_core::verify::{run_criterion, Suite};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in Suite::All.criteria() {
        let start = Instant::now();
        let line = match run_criterion(id) {
            Ok(result) => {
                if !result.pass {
                    failed.push(id);
                }
                result.summary_line()
            }
            Err(e) => {
                failed.push(id);
                format!("FAIL {id} | error: {e}")
            }
        };
        println!("{line} [{:.2}s]", start.elapsed().as_secs_f64());
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} failing: {}",
            failed.len(),
            failed.join(", ")
        );
        ExitCode::FAILURE
    }
}
