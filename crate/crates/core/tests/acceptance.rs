//! Acceptance suite: every stated criterion runs at its pinned tolerance
//! and prints one pass/fail line. The CLI-level criterion lives in the
//! cli crate's acceptance test.

use omega_calc::verify::{run_all, CheckReport};
use std::sync::OnceLock;
use std::time::Instant;

fn reports() -> &'static [CheckReport] {
    static REPORTS: OnceLock<Vec<CheckReport>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        let start = Instant::now();
        let reports = run_all(0);
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs() < 60,
            "verification suites took {elapsed:?}, budget is 60s"
        );
        reports
    })
}

fn find(check: &str) -> &'static CheckReport {
    reports()
        .iter()
        .find(|r| r.check == check)
        .unwrap_or_else(|| panic!("no check named {check}"))
}

/// Asserts a check passed at exactly the pinned tolerance and prints the
/// per-criterion line.
fn criterion(number: u32, label: &str, check: &str, tolerance: f64) {
    let report = find(check);
    let pass = report.passed() && report.tolerance == tolerance;
    println!(
        "{} criterion {number} ({label}): {}/{} cases failed, {} skipped, max error {:.3e} (tol {:.1e})",
        if pass { "PASS" } else { "FAIL" },
        report.failures,
        report.cases,
        report.skipped,
        report.max_error,
        report.tolerance,
    );
    assert!(
        report.passed(),
        "criterion {number} ({label}): {} failures, max error {:e}",
        report.failures,
        report.max_error
    );
    assert_eq!(
        report.tolerance, tolerance,
        "criterion {number} ({label}): tolerance drifted from the stated value"
    );
}

#[test]
fn criterion_01_leibniz_rules() {
    criterion(1, "Leibniz rule I", "leibniz-rule-1", 1e-10);
    criterion(1, "Leibniz rule II", "leibniz-rule-2", 1e-10);
    for check in ["leibniz-rule-1", "leibniz-rule-2"] {
        let r = find(check);
        assert!(
            r.cases - r.skipped >= 300,
            "{check}: too few evaluated cases ({} of {})",
            r.cases - r.skipped,
            r.cases
        );
    }
}

#[test]
fn criterion_02_chain_rule() {
    criterion(2, "chain rule quotient identity", "chain-rule-quotient", 1e-12);
    let r = find("chain-rule-quotient");
    assert_eq!(r.cases, 500);
    assert!(r.cases - r.skipped >= 300, "too many degenerate skips");
}

#[test]
fn criterion_03_derivative_axioms() {
    criterion(3, "D x = 1 and D c = 0", "derivative-axioms", 1e-14);
    // four operator kinds at twenty points each
    assert_eq!(find("derivative-axioms").cases, 80);
}

#[test]
fn criterion_04_q_specialization() {
    criterion(4, "dilation derivative of x^n", "q-specialization", 1e-11);
}

#[test]
fn criterion_05_bracket_identity() {
    criterion(5, "bracket-number identity", "bracket-identity", 1e-11);
}

#[test]
fn criterion_06_inverse_round_trip() {
    criterion(6, "D . D^-1 = I", "inverse-round-trip", 1e-8);
    let divergence = find("inverse-divergence-detected");
    println!(
        "{} criterion 6 (expanding dilation reports divergence)",
        if divergence.passed() { "PASS" } else { "FAIL" }
    );
    assert!(divergence.passed());
}

#[test]
fn criterion_07_eigenfunction_residual() {
    criterion(7, "|D E - E| in contraction region", "eigen-residual", 1e-6);
    assert_eq!(find("eigen-residual").cases, 40, "10 points per operator");
    criterion(7, "product vs series agreement", "representation-agreement", 1e-5);
}

#[test]
fn criterion_08_scaled_and_invariance_identities() {
    criterion(8, "translation eigenvalue 1+h", "translation-eigenvalue", 1e-8);
    criterion(8, "reciprocal dilation identity", "q-reciprocal", 1e-6);
    criterion(8, "invariant product", "product-invariance", 1e-6);
    criterion(8, "h-periodic function derivative", "periodic-invariance", 1e-12);
}

#[test]
fn criterion_09_limits() {
    criterion(9, "classical-derivative recovery, O(lambda)", "classical-limit-ratio", 0.5);
    criterion(9, "two-parameter mu -> 0 limit, O(mu)", "mu-limit", 0.5);
    criterion(9, "identity recovery at tiny lambda", "identity-limit", 1e-8);
}

#[test]
fn criterion_10_mobius() {
    criterion(10, "composite matrix entries and det 1", "composite-entries", 1e-12);
    criterion(10, "matrix vs operator action", "action-agreement", 1e-12);
    assert_eq!(find("action-agreement").cases, 200);
    criterion(10, "matrix action group closure", "matrix-group-closure", 1e-12);
    criterion(10, "operator composition group law", "operator-group-law", 1e-12);
    let witness = find("composition-order-witness");
    println!(
        "{} criterion 10 (composition order witness: difference {:.3e})",
        if witness.passed() { "PASS" } else { "FAIL" },
        witness.max_error
    );
    assert!(witness.passed());
}
