use std::process::Command as Proc;

use iquantum::{run, Command, RunConfig};

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_iquantum"))
}

#[test]
fn iseq_report_is_deterministic() {
    let cfg = RunConfig::with_diagram("A3", "diagram");
    let a = run(Command::Iseq, &cfg).to_json();
    let b = run(Command::Iseq, &cfg).to_json();
    assert_eq!(a, b);
    assert!(run(Command::Iseq, &cfg).passed);
}

#[test]
fn invalid_involution_exits_with_error() {
    let out = bin().args(["--format", "json", "iseq", "--diagram", "A4", "--tau", "diagram"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "InvalidInvolution");
}

#[test]
fn braid_pass_exits_zero() {
    let out = bin().args(["verify-braid", "--diagram", "A2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn count_mismatch_exits_one() {
    let out = bin().args(["count-indec", "--diagram", "A2", "--expect", "8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = std::env::temp_dir().join(format!("iquantum-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(&path, "diagram = \"A2\"\nbogus = 1\n").unwrap();
    let out = bin().args(["--config", path.to_str().unwrap(), "iseq"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
