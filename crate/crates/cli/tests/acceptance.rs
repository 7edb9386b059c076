//! CLI acceptance: `verify --suite all --seed 0` exits 0 on a correct
//! build, and every injected sign error flips at least one suite to
//! failure (nonzero exit).

use std::process::Command;

fn omega_calc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_omega-calc"))
        .args(args)
        .env_remove("OMEGA_CALC_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_11_verify_all_exits_zero() {
    let output = omega_calc(&["verify", "--suite", "all", "--seed", "0"]);
    let pass = output.status.code() == Some(0);
    println!(
        "{} criterion 11 (verify --suite all --seed 0 exits 0)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        pass,
        "stdout:\n{}",
        String::from_utf8_lossy(&output.stdout)
    );
    // every record is a pass with zero failures
    for line in String::from_utf8_lossy(&output.stdout).lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["diagnostics"]["pass"], serde_json::json!(true), "{line}");
    }
}

#[test]
fn criterion_11_mutations_flip_a_suite() {
    // one full run with a mutated formula must exit nonzero
    let output = omega_calc(&[
        "verify",
        "--suite",
        "all",
        "--seed",
        "0",
        "--mutate",
        "derivative-sign",
    ]);
    assert_eq!(output.status.code(), Some(1));

    // each remaining mutation flips its targeted suite
    let targeted = [
        ("chain-inner-sign", "chain"),
        ("bracket-sign", "leibniz"),
        ("inverse-term-sign", "inverse"),
        ("eigen-factor-sign", "eigen"),
        ("mobius-entry-sign", "mobius"),
        ("mu-limit-sign", "limits"),
    ];
    for (mutation, suite) in targeted {
        let output = omega_calc(&["verify", "--suite", suite, "--seed", "0", "--mutate", mutation]);
        let flipped = output.status.code() == Some(1);
        println!(
            "{} criterion 11 (mutation {mutation} flips suite {suite})",
            if flipped { "PASS" } else { "FAIL" }
        );
        assert!(flipped, "mutation {mutation} went undetected in suite {suite}");
    }
}
