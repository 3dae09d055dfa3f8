use rfharvest::validation::{run_criterion, ValidationContext};
use std::process::ExitCode;

fn main() -> ExitCode {
    let ctx = ValidationContext::default();
    let mut failed = 0;
    for id in 1..=9 {
        let r = run_criterion(id, &ctx);
        println!(
            "criterion {} {}: {} (measured {:.3e}, threshold {:.3e}) {}",
            r.id,
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.measured,
            r.threshold,
            r.detail
        );
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
