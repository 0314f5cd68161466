//! Acceptance gate: one line per criterion, nonzero exit if an unexpected
//! criterion fails. Criteria in `KNOWN_FAILURES` still print FAIL.

use std::process::ExitCode;

use weyl_lab::suite::{run_criterion, SuiteConfig, Status, CRITERIA, KNOWN_FAILURES};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let mut unexpected = Vec::new();
    for id in 1..=CRITERIA {
        let line = match run_criterion(id, &cfg) {
            Ok(o) => {
                println!("{o} [{:.1} s]", o.seconds);
                o.status
            }
            Err(e) => {
                println!("criterion {id:>2} FAIL error: {e}");
                Status::Fail
            }
        };
        if line == Status::Fail && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria met except the documented {KNOWN_FAILURES:?}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {unexpected:?}");
        ExitCode::FAILURE
    }
}
