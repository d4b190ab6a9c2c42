//! End-to-end tests of the `daegeo` binary: exit codes, stdout phrasing,
//! report emission, determinism, and the tamper-detection loop.

use serde_json::{json, Value};
use std::path::Path;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn daegeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daegeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("binary exits normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch_path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn load_report(path: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report file exists"))
        .expect("report parses")
}

#[test]
fn consistent_integrator_prints_the_full_basis_and_exits_zero() {
    let out = daegeo(&["consistent", &fixture("integrator.json")]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.contains("dimension 1 of 1"),
        "unexpected stdout: {text}"
    );
    assert!(
        text.contains("generator 1: [1]"),
        "unexpected stdout: {text}"
    );
}

#[test]
fn consistent_twin_reports_the_empty_set_and_exits_one() {
    let out = daegeo(&["consistent", &fixture("transfer_twin_1.json")]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("no consistent subset"));
}

#[test]
fn bisim_twins_fail_with_the_empty_subset_phrase() {
    let out = daegeo(&[
        "bisim",
        &fixture("transfer_twin_1.json"),
        &fixture("transfer_twin_2.json"),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not bisimilar: consistent subsets empty"));
}

#[test]
fn bisim_over_a_prime_field_gives_the_same_negative() {
    let out = daegeo(&[
        "bisim",
        &fixture("transfer_twin_1.json"),
        &fixture("transfer_twin_2.json"),
        "--field",
        "gf:5",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not bisimilar: consistent subsets empty"));
}

#[test]
fn bisim_integrator_against_disturbed_partner_succeeds() {
    let out = daegeo(&[
        "bisim",
        &fixture("integrator.json"),
        &fixture("integrator_disturbed.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bisimilar: certified by a relation of dimension 2"));
}

#[test]
fn regular_and_transfer_agree_on_the_twin_pair() {
    assert_eq!(
        code(&daegeo(&["regular", &fixture("transfer_twin_1.json")])),
        0
    );
    assert_eq!(
        code(&daegeo(&["regular", &fixture("transfer_twin_2.json")])),
        0
    );
    let out = daegeo(&[
        "transfer-eq",
        &fixture("transfer_twin_1.json"),
        &fixture("transfer_twin_2.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("agree at all 9 sample points"));
}

#[test]
fn differing_transfers_exit_one_with_a_witness() {
    let out = daegeo(&[
        "transfer-eq",
        &fixture("integrator.json"),
        &fixture("transfer_twin_1.json"),
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(
        text.contains("transfer functions differ"),
        "unexpected stdout: {text}"
    );
    assert!(
        text.contains("witness: at s ="),
        "unexpected stdout: {text}"
    );
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = scratch_path(&dir, "r1.json");
    let r2 = scratch_path(&dir, "r2.json");
    let args = |path: &str| {
        vec![
            "bisim".to_string(),
            fixture("transfer_twin_1.json"),
            fixture("transfer_twin_2.json"),
            "--json".to_string(),
            path.to_string(),
        ]
    };
    let out1 = daegeo(&args(&r1).iter().map(String::as_str).collect::<Vec<_>>());
    let out2 = daegeo(&args(&r2).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&out1), 1);
    assert_eq!(stdout(&out1), stdout(&out2), "stdout must be reproducible");
    let mut v1 = load_report(&r1);
    let mut v2 = load_report(&r2);
    v1["timing_ms"] = json!(0);
    v2["timing_ms"] = json!(0);
    assert_eq!(
        serde_json::to_string(&v1).unwrap(),
        serde_json::to_string(&v2).unwrap(),
        "reports must be byte-identical after clearing the timing field"
    );
}

#[test]
fn emitted_reports_reverify_and_detect_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let report = scratch_path(&dir, "bisim.json");
    let out = daegeo(&[
        "bisim",
        &fixture("integrator.json"),
        &fixture("integrator_disturbed.json"),
        "--json",
        &report,
    ]);
    assert_eq!(code(&out), 0);

    let check = daegeo(&["check", &report]);
    assert_eq!(code(&check), 0);
    assert!(stdout(&check).contains("report intact"));

    let mut tampered = load_report(&report);
    tampered["certificate"]["relation"]["basis"][0][0] = json!("9");
    let tampered_path = scratch_path(&dir, "tampered.json");
    std::fs::write(
        &tampered_path,
        serde_json::to_string_pretty(&tampered).unwrap(),
    )
    .unwrap();
    let check = daegeo(&["check", &tampered_path]);
    assert_eq!(code(&check), 1);
    assert!(stdout(&check).contains("report tampered"));
}

#[test]
fn prime_field_reports_also_reverify() {
    let dir = tempfile::tempdir().unwrap();
    let report = scratch_path(&dir, "gf.json");
    let out = daegeo(&[
        "consistent",
        &fixture("integrator_disturbed.json"),
        "--field",
        "gf:3",
        "--json",
        &report,
    ]);
    assert_eq!(code(&out), 0);
    let check = daegeo(&["check", &report]);
    assert_eq!(code(&check), 0, "stderr: {}", stderr(&check));
}

#[test]
fn simulate_reports_carry_no_certificate_and_cannot_be_checked() {
    let dir = tempfile::tempdir().unwrap();
    let report = scratch_path(&dir, "sim.json");
    let out = daegeo(&[
        "simulate",
        &fixture("integrator.json"),
        "--step",
        "0.01",
        "--json",
        &report,
    ]);
    assert_eq!(code(&out), 0);
    let check = daegeo(&["check", &report]);
    assert_eq!(code(&check), 2);
    assert!(stderr(&check).contains("no certificate"));
}

#[test]
fn validate_passes_on_the_disturbed_integrator_pair() {
    let dir = tempfile::tempdir().unwrap();
    let report = scratch_path(&dir, "validate.json");
    let out = daegeo(&[
        "validate",
        &fixture("integrator.json"),
        &fixture("integrator_disturbed.json"),
        "--step",
        "0.01",
        "--trials",
        "2",
        "--json",
        &report,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("validated over 2 trials"),
        "unexpected stdout: {text}"
    );
    let value = load_report(&report);
    assert!(value["metrics"]["max_relation_distance"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn validate_on_non_bisimilar_systems_is_a_clean_negative() {
    let out = daegeo(&[
        "validate",
        &fixture("transfer_twin_1.json"),
        &fixture("transfer_twin_2.json"),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("nothing to validate"));
}

#[test]
fn abstraction_emits_the_reduced_system_and_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let h_path = scratch_path(&dir, "h.json");
    std::fs::write(&h_path, "[[1, 0]]").unwrap();
    let report = scratch_path(&dir, "abstract.json");
    let out = daegeo(&[
        "abstract",
        &fixture("integrator_disturbed.json"),
        &h_path,
        "--json",
        &report,
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("2 state variables reduced to 1"));
    let check = daegeo(&["check", &report]);
    assert_eq!(code(&check), 0, "stderr: {}", stderr(&check));
}

#[test]
fn field_flag_is_rejected_where_it_makes_no_sense() {
    let out = daegeo(&["regular", &fixture("integrator.json"), "--field", "gf:5"]);
    assert_eq!(code(&out), 2, "clap must reject --field on regular");
}

#[test]
fn unknown_fields_exit_two_listing_the_supported_ones() {
    let out = daegeo(&["consistent", &fixture("integrator.json"), "--field", "gf:4"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("supported"));
}

#[test]
fn iteration_caps_trip_as_a_diagnostic_exit() {
    let out = daegeo(&[
        "consistent",
        &fixture("transfer_twin_1.json"),
        "--max-iter",
        "0",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("exceeding the cap"));
}

#[test]
fn unreadable_and_malformed_inputs_exit_two() {
    let out = daegeo(&["consistent", "/nonexistent/system.json"]);
    assert_eq!(code(&out), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = scratch_path(&dir, "bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = daegeo(&["consistent", &bad]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("not valid JSON"));
}

#[test]
fn simulating_an_inconsistent_system_is_a_diagnostic_failure() {
    let out = daegeo(&["simulate", &fixture("transfer_twin_1.json")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_accepts_exact_initial_states() {
    let out = daegeo(&[
        "simulate",
        &fixture("integrator.json"),
        "--x0",
        "1/2",
        "--step",
        "0.01",
        "--signal",
        "zero",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("final output: [0.5"));
}
