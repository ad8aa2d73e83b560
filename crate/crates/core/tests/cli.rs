use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-exp"))
        .args(args)
        .current_dir(dir)
        .env_remove("PADIC_EXP_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn decide_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["decide", "-e", "x1*x1 = 6", "--out", "sat.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let doc = std::fs::read_to_string(dir.path().join("sat.json")).unwrap();
    assert!(doc.contains("\"verdict\": \"sat\""));

    let out = cli(&["verify", "sat.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "accepted");

    let tampered = doc.replace("\"det_valuation\": 0", "\"det_valuation\": 1");
    assert_ne!(tampered, doc);
    std::fs::write(dir.path().join("bad.json"), tampered).unwrap();
    let out = cli(&["verify", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("rejected"));
}

#[test]
fn verdict_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["decide", "-e", "x1*x1 + 5 = 0"], dir.path()).status.code(), Some(1));
    let tiny = ["decide", "-e", "x1*x1 = 6", "--budget-steps", "1", "--budget-level", "0"];
    assert_eq!(cli(&tiny, dir.path()).status.code(), Some(2));
}

#[test]
fn errors_exit_above_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["decide", "-e", "x1 + = 2"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 6"));
    assert_eq!(cli(&["decide", "-e", "x1 = 0", "--prime", "4"], dir.path()).status.code(), Some(3));
    std::fs::write(dir.path().join("junk.json"), "{}").unwrap();
    assert_eq!(cli(&["verify", "junk.json"], dir.path()).status.code(), Some(5));
}

#[test]
fn config_file_in_working_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("padic-exp.conf"), "prime = 7\nprecision = 6\n").unwrap();
    let out = cli(&["eval", "-e", "E(x1)", "--at", "x1=1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("(mod 7^6)"), "{}", stdout(&out));
    let out = cli(&["eval", "-e", "x1", "--at", "x1=3", "--prime", "5", "--precision", "2"], dir.path());
    assert!(stdout(&out).starts_with("3 (mod 5^2), valuation 0"), "{}", stdout(&out));
}

#[test]
fn lift_and_no_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["lift", "-e", "x1*x1 = 6", "--center", "1", "--target", "12"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("v(det J) = 0"));
    let out = cli(&["no-root", "-e", "x1*x1 + 5 = 0", "--ball", "0,0"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("level 1"), "{}", stdout(&out));
}
