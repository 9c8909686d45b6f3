//! Black-box checks of the binary: exit codes, the machine-readable error
//! body, and config file precedence.

use std::process::Command;

fn spectra() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectra"))
}

#[test]
fn usage_errors_exit_two_with_error_json() {
    let out = spectra().args(["markov-word", "2,x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["exit"], 2);
    assert!(v["error"]["message"].as_str().unwrap().contains("digit"));
}

#[test]
fn budget_overruns_exit_one() {
    let out = spectra()
        .args(["sum", "gauss:4", "gauss:4", "--level", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"]["exit"], 1);
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let out = spectra().arg(flag).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{flag}");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn config_file_applies_between_defaults_and_flags() {
    let dir = std::env::temp_dir().join(format!("spectra-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "# comment\ntol=1e-3\nformat=csv\nlevel=2\n").unwrap();
    let out = spectra()
        .args([
            "--config",
            path.to_str().unwrap(),
            "--level",
            "3",
            "dim",
            "middle_third",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // the file supplied tol and csv format; the explicit flag won on level
    assert!(
        text.starts_with("# tol=1/1000 level=3"),
        "unexpected header: {text}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn golden_ratio_end_to_end() {
    let out = spectra()
        .args(["lagrange", "[1;(1)]", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("value,2.2360679"), "unexpected body: {text}");
}
