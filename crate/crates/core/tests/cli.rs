use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(args)
        .env("QSS_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn run_example_prints_chain_and_secrets() {
    let out = qss(&["run-example"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let labels = ["(6,1,3)", "(4,6,1)", "(6,5,0)", "(5,6,1)", "(2,4,6)"];
    let mut at = 0;
    for l in labels {
        at += text[at..]
            .find(l)
            .unwrap_or_else(|| panic!("{l} missing after byte {at}:\n{text}"));
    }
    assert!(text.contains("secrets (2,4,6) verified [true, true, true]"));
}

#[test]
fn run_example_tamper_and_bad_modulus() {
    let out = qss(&["run-example", "--tamper", "P2.s=+1"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("verification failed"));
    let out = qss(&["run-example", "--d", "6"]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an odd prime"));
    // the example matrix uses 6 = -1 mod 7; over F_11 it no longer realizes the structure
    let out = qss(&["run-example", "--d", "11"]);
    assert_eq!(code(&out), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not realize"));
}

#[test]
fn run_exit_codes() {
    for (file, expected) in [
        ("example.json", 0),
        ("honest.json", 0),
        ("three_members.json", 0),
        ("tampered.json", 2),
        ("intercept_resend.json", 3),
        ("entangle.json", 3),
        ("unauthorized.json", 64),
    ] {
        let out = qss(&["run", "--scenario", &scenario(file)]);
        assert_eq!(code(&out), expected, "{file}");
    }
    let out = qss(&["run", "--scenario", &scenario("unauthorized.json")]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not authorized"));
    assert_eq!(code(&qss(&["run", "--scenario", "/nonexistent.json"])), 64);
    assert_eq!(
        code(&qss(&[
            "run",
            "--scenario",
            &scenario("honest.json"),
            "--tamper",
            "P9.s"
        ])),
        64
    );
    assert_eq!(
        code(&qss(&[
            "run",
            "--scenario",
            &scenario("honest.json"),
            "--eve",
            "intercept_resend"
        ])),
        3
    );
}

#[test]
fn trace_is_jsonl_and_reproducible() {
    let a = qss(&["run", "--scenario", &scenario("honest.json"), "--seed", "17"]);
    let b = qss(&["run", "--scenario", &scenario("honest.json"), "--seed", "17"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = qss(&["run", "--scenario", &scenario("honest.json"), "--seed", "18"]);
    assert_ne!(a.stdout, c.stdout);

    let records: Vec<Value> = stdout(&a).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let seqs: Vec<u64> = records.iter().map(|r| r["seq"].as_u64().unwrap()).collect();
    assert!(seqs.windows(2).all(|w| w[0] < w[1]));
    for r in &records {
        let mut keys: Vec<&String> = r.as_object().unwrap().keys().collect();
        keys.sort();
        assert_eq!(keys, ["actor", "kind", "payload", "seq"]);
    }
    let last = records.last().unwrap();
    assert_eq!(last["kind"], "verification");
    assert_eq!(last["payload"]["accepted"], true);
}

#[test]
fn aborted_trace_ends_at_failed_check() {
    let out = qss(&["run", "--scenario", &scenario("intercept_resend.json")]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["kind"], "decoy_check");
    assert_eq!(last["payload"]["outcome"]["passed"], false);
    assert!(!text.contains("\"measurement\"") && !text.contains("\"verification\""));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.jsonl");
    let to_file = qss(&[
        "run",
        "--scenario",
        &scenario("example.json"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&to_file), 0);
    assert!(to_file.stdout.is_empty());
    let to_stdout = qss(&["run", "--scenario", &scenario("example.json")]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn trials_batch_reports_worst_outcome() {
    let out = qss(&[
        "run",
        "--scenario",
        &scenario("intercept_resend.json"),
        "--trials",
        "1000",
    ]);
    assert_eq!(code(&out), 3);
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1000);
    let aborted = lines.iter().filter(|l| l["exit"] == 3).count();
    assert!(aborted as f64 / 1000.0 >= 0.999, "{aborted}");

    let out = qss(&["run", "--scenario", &scenario("honest.json"), "--trials", "50"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_theorem1_modes() {
    assert_eq!(code(&qss(&["verify-theorem1", "--d", "3", "--mode", "exhaustive"])), 0);
    let out = qss(&["verify-theorem1", "--d", "5"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("d=5 cases=9375"));
    let out = qss(&["verify-theorem1", "--d", "7", "--mode", "sample", "--trials", "500"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("cases=500"));
    assert_eq!(code(&qss(&["verify-theorem1", "--d", "3,6"])), 64);
    // an impossible tolerance turns the sweep into a failure
    assert_eq!(code(&qss(&["verify-theorem1", "--d", "3", "--tol", "0"])), 2);
}

#[test]
fn audit_msp_outcomes() {
    let out = qss(&["audit-msp", "--scenario", &scenario("example.json")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("result: valid"));
    assert_eq!(
        code(&qss(&["audit-msp", "--scenario", &scenario("row3_zeroed.json")])),
        2
    );
    assert_eq!(
        code(&qss(&["audit-msp", "--scenario", &scenario("single_set.json")])),
        0
    );
    assert_eq!(
        code(&qss(&["audit-msp", "--scenario", &scenario("too_large.json")])),
        65
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&qss(&["audit-msp", "--scenario", bad.to_str().unwrap()])), 64);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&qss(&[])), 64);
    assert_eq!(code(&qss(&["frobnicate"])), 64);
    assert_eq!(code(&qss(&["run"])), 64);
    assert_eq!(code(&qss(&["run-example", "--eve", "martian"])), 64);
    assert_eq!(code(&qss(&["--help"])), 0);
}

#[test]
fn debug_logging_goes_to_stderr() {
    let out = Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(["run", "--scenario", &scenario("example.json")])
        .env("QSS_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("DEBUG"));
    let quiet = qss(&["run", "--scenario", &scenario("example.json")]);
    assert_eq!(out.stdout, quiet.stdout);
    assert!(quiet.stderr.is_empty());
}
