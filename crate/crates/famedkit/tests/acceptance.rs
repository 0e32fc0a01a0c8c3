//! Desk-scale acceptance suite. Each criterion runs at its stated tolerance
//! and prints one pass/fail line (run with `--nocapture` to see the detail
//! lines while the suite is green).

use famedkit::accept::{self, Criterion};

fn report(c: Criterion) {
    println!("{}: {} ({} ms)", c.id, if c.passed { "PASS" } else { "FAIL" }, c.millis);
    for d in &c.details {
        println!("    {d}");
    }
    assert!(c.passed, "{} failed:\n{}", c.id, c.details.join("\n"));
}

#[test]
fn a1_exact_golden_matrices() {
    report(accept::a1_exact_golden_matrices());
}

#[test]
fn a2_special_function_identities() {
    report(accept::a2_special_functions());
}

#[test]
fn a3_partition_volume_limit() {
    report(accept::a3_volume_limit());
}

#[test]
fn a4_one_loop_prefactor() {
    report(accept::a4_one_loop_prefactor());
}

#[test]
fn a5_jones_function() {
    report(accept::a5_jones_function());
}

#[test]
fn a6_angle_structure_optimization() {
    report(accept::a6_volume_maximization());
}

#[test]
fn a7_property_suites() {
    report(accept::a7_property_suites());
}
