use std::path::Path;
use std::process::{Command, Output};

const SCENARIO: &str = r#"
name = "branch"
method = "semiclassical"
[params]
eta = 4.0
kappa_a = 1.0
kappa_b = 1.0
kappa_c = 2.0
pump = { kind = "coherent", mu = 1.0 }
[scan]
parameter = "epsilon"
start = 0.5
stop = 3.0
points = 6
"#;

fn pairlaser(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairlaser"))
        .args(args)
        .env("PAIRLASER_OUT", out)
        .env("PAIRLASER_THREADS", "1")
        .output()
        .unwrap()
}

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, SCENARIO).unwrap();
    let out = pairlaser(&["validate", good.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("semiclassical"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, SCENARIO.replace("\"epsilon\"", "\"gamma\"").replace("eta = 4.0", "eta = -1.0")).unwrap();
    let out = pairlaser(&["validate", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gamma") && err.contains("eta"), "{err}");
}

#[test]
fn run_writes_identical_tables_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, SCENARIO).unwrap();
    for (sub, fmt, file) in [("a", "csv", "branch.csv"), ("b", "csv", "branch.csv"), ("c", "json", "branch.json")] {
        let out_dir = dir.path().join(sub);
        let out = pairlaser(&["run", cfg.to_str().unwrap(), "--format", fmt], &out_dir);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out_dir.join(file).exists());
    }
    let a = std::fs::read(dir.path().join("a/branch.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/branch.csv")).unwrap();
    assert_eq!(a, b);
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("c/branch.json")).unwrap()).unwrap();
    assert_eq!(json["scan_values"].as_array().unwrap().len(), 6);
}

#[test]
fn missing_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pairlaser(&["run", "/nonexistent/s.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
