//! The `verify` subcommand: run the operator identity suites and report
//! one pass/fail line per identity.

use ode_invariants::opverify::{
    verify_all, verify_commutators, verify_diff_ops, verify_inheritance,
    verify_scaling_weights, SuiteReport,
};

use crate::input::CliError;
use crate::{Suite, VerifyArgs};

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    let suites: Vec<SuiteReport> = match args.suite {
        Suite::Commutators => vec![verify_commutators()],
        Suite::Inheritance => vec![verify_inheritance(args.seed)],
        Suite::Zweight => vec![verify_scaling_weights()],
        Suite::Diffops => vec![verify_diff_ops(args.seed)],
        Suite::All => verify_all(args.seed),
    };

    let mut passed = 0usize;
    let mut failed = 0usize;
    for suite in &suites {
        println!("suite {}", suite.name);
        let mut suite_passed = 0usize;
        let mut suite_failed = 0usize;
        for line in &suite.lines {
            let verdict = if line.passed { "PASS" } else { "FAIL" };
            if line.detail.is_empty() {
                println!("  {verdict}  {}", line.label);
            } else {
                println!("  {verdict}  {}  ({})", line.label, line.detail);
            }
            if line.passed {
                suite_passed += 1;
            } else {
                suite_failed += 1;
            }
        }
        println!("  {suite_passed} passed, {suite_failed} failed");
        passed += suite_passed;
        failed += suite_failed;
    }
    println!("total: {passed} passed, {failed} failed");
    if failed > 0 {
        return Err(CliError::CheckFailed);
    }
    Ok(())
}
