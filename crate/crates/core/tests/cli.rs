use std::path::PathBuf;
use std::process::{Command, Output};

fn problem(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let Output { status, stdout, .. } = Command::new(env!("CARGO_BIN_EXE_stochsym")).args(args).output().unwrap();
    (status.code().unwrap(), String::from_utf8(stdout).unwrap())
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_example1() {
    let (code, out) = run(&["check", path_str(&problem("example1.toml"))]);
    assert_eq!(code, 0, "{out}");
    for section in ["INPUT", "RESIDUALS", "VERDICT"] {
        assert!(out.lines().any(|l| l == section), "missing {section}");
    }
    assert!(out.contains("symmetry: yes (symbolic)"));
}

#[test]
fn reduce_example2() {
    let (code, out) = run(&["reduce", path_str(&problem("example2.toml"))]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("drift = exp(-t)\n"), "{out}");
    assert!(out.contains("noise = 1\n"), "{out}");
}

#[test]
fn non_symmetry_has_witness() {
    let (code, out) = run(&["check", path_str(&problem("not_symmetry.toml"))]);
    assert_eq!(code, 1);
    assert!(out.contains("symmetry: no"));
    assert!(out.contains("witness: noise[0][0]"), "{out}");
}

#[test]
fn tau_and_unal() {
    assert_eq!(run(&["tau-check", path_str(&problem("tau_drift.toml"))]).0, 1);
    assert_eq!(run(&["tau-check", path_str(&problem("example1.toml"))]).0, 0);
    assert_eq!(run(&["unal", path_str(&problem("example1.toml"))]).0, 0);
    assert_eq!(run(&["unal", path_str(&problem("not_symmetry.toml"))]).0, 1);
}

#[test]
fn solve_and_convert() {
    let (code, out) = run(&["solve", path_str(&problem("example1.toml"))]);
    assert_eq!(code, 0);
    assert!(out.contains("variance x(0.25) = 0.25"), "{out}");
    let (code, out) = run(&["convert", path_str(&problem("example1.toml"))]);
    assert_eq!(code, 0);
    assert!(out.contains("calculus: stratonovich\n  drift[0] = exp(-y)\n"), "{out}");
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [("check", "example1.toml"), ("check", "not_symmetry.toml"), ("reduce", "example2.toml")] {
        let first = dir.path().join(format!("{cmd}-{file}.json"));
        let second = dir.path().join("again.json");
        let (c1, _) = run(&[cmd, path_str(&problem(file)), "--quiet", "--json", path_str(&first)]);
        let (c2, out) = run(&[cmd, path_str(&first), "--json", path_str(&second)]);
        assert_eq!(c1, c2);
        assert!(!out.is_empty());
        let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
        let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&second).unwrap()).unwrap();
        assert_eq!(a, b, "{cmd} {file}");
        assert!(a["verdict"].is_string());
    }
}

#[test]
fn quiet_prints_nothing() {
    let (code, out) = run(&["check", path_str(&problem("example1.toml")), "--quiet"]);
    assert_eq!((code, out.as_str()), (0, ""));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[variables]\nstate = [\"x\"]\ntime = \"t\"\nwiener = [\"w\"]\n[sde]\ncalculus = \"ito\"\ndrift = [\"x +\"]\nnoise = [[\"1\"]]\n").unwrap();
    assert_eq!(run(&["check", path_str(&bad)]).0, 2);
    assert_eq!(run(&["check", "/no/such/file.toml"]).0, 2);

    // every field is a symmetry of dx = 0, but exp(-x^2) has no antiderivative here
    let cap = dir.path().join("cap.toml");
    std::fs::write(
        &cap,
        "[variables]\nstate = [\"x\"]\ntime = \"t\"\nwiener = [\"w\"]\n[sde]\ncalculus = \"ito\"\ndrift = [\"0\"]\nnoise = [[\"0\"]]\n[symmetry]\nphi = [\"exp(x^2)\"]\n",
    )
    .unwrap();
    assert_eq!(run(&["reduce", path_str(&cap)]).0, 3);
}
