//! Runs every acceptance criterion and prints one line per criterion.
//! Exits nonzero if a criterion fails without a documented reason.

use std::process::ExitCode;

use steenrod_core::verify::{run_all, DEFAULT_SEED};

fn main() -> ExitCode {
    let results = run_all(DEFAULT_SEED);
    for r in &results {
        println!("{}", r.line());
        if let (false, Some(why)) = (r.pass, r.known_divergence) {
            println!("       {why}");
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let unexpected = results.iter().filter(|r| r.unexpected_failure()).count();
    println!("acceptance: {passed}/{} passed, {unexpected} unexpected failures", results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
