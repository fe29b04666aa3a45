use std::ffi::{CStr, CString};
use std::ptr;

use stochsym_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    stochsym_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = stochsym_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_string()
}

const EXAMPLE2: &str = r#"
[variables]
state = ["y"]
time = "t"
wiener = ["w"]

[sde]
calculus = "ito"
drift = ["exp(-t)*(1+y^2)^2/(8*y^3) * (-4*y^2 + exp(t)*(3*y^4 + 2*y^2 - 1))"]
noise = [["-(1+y^2)^2/(2*y)"]]

[symmetry]
phi = ["-(1+y^2)^2/(2*y)"]
"#;

#[test]
fn expressions() {
    unsafe {
        let mut e = ptr::null_mut();
        let st = stochsym_expr_parse(c("x*x + exp(log(x))").as_ptr(), c("x").as_ptr(), c("t").as_ptr(), c("w").as_ptr(), &mut e);
        assert_eq!(st, StochsymStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(stochsym_expr_to_string(e, &mut s), StochsymStatus::Ok);
        assert_eq!(take(s), "x + x^2");

        let mut d = ptr::null_mut();
        assert_eq!(stochsym_expr_diff(e, c("x").as_ptr(), &mut d), StochsymStatus::Ok);
        let name = c("x");
        let names = [name.as_ptr()];
        let mut v = 0.0;
        assert_eq!(stochsym_expr_eval(d, names.as_ptr(), [1.5].as_ptr(), 1, &mut v), StochsymStatus::Ok);
        assert_eq!(v, 4.0);
        assert_eq!(stochsym_expr_eval(d, ptr::null(), ptr::null(), 0, &mut v), StochsymStatus::EvalError);
        assert!(last_error().contains('x'));

        assert_eq!(stochsym_expr_diff(e, c("q").as_ptr(), &mut d), StochsymStatus::InvalidInput);
        stochsym_expr_free(d);
        stochsym_expr_free(e);

        let st = stochsym_expr_parse(c("x +").as_ptr(), c("x").as_ptr(), c("t").as_ptr(), c("w").as_ptr(), &mut e);
        assert_eq!(st, StochsymStatus::ParseError);
        assert!(last_error().contains("syntax"));
        let st = stochsym_expr_parse(ptr::null(), c("x").as_ptr(), c("t").as_ptr(), c("w").as_ptr(), &mut e);
        assert_eq!(st, StochsymStatus::NullPointer);
    }
}

#[test]
fn reduce_through_handles() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(stochsym_problem_from_toml(c(EXAMPLE2).as_ptr(), ptr::null(), &mut p), StochsymStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(stochsym_run(p, c("reduce").as_ptr(), &mut r), StochsymStatus::Ok);
        assert_eq!(stochsym_report_verdict(r), 0);
        assert!(take(stochsym_report_text(r)).contains("drift = exp(-t)\n"));
        let json: serde_json::Value = serde_json::from_str(&take(stochsym_report_json(r))).unwrap();
        assert_eq!(json["result"]["noise"], "1");
        stochsym_report_free(r);

        assert_eq!(stochsym_run(p, c("check").as_ptr(), &mut r), StochsymStatus::Ok);
        assert!(take(stochsym_report_text(r)).contains("symmetry: yes (symbolic)"));
        stochsym_report_free(r);

        assert_eq!(stochsym_run(p, c("bogus").as_ptr(), &mut r), StochsymStatus::InvalidInput);
        assert_eq!(stochsym_run(p, c("tau-check").as_ptr(), &mut r), StochsymStatus::InvalidInput);
        assert!(last_error().contains("tau"));
        stochsym_problem_free(p);
    }
}

#[test]
fn options_and_errors() {
    unsafe {
        let mut p = ptr::null_mut();
        let opts = StochsymOptions { seed: 9, tol: 1e-8, samples: 16 };
        assert_eq!(stochsym_problem_from_toml(c(EXAMPLE2).as_ptr(), &opts, &mut p), StochsymStatus::Ok);
        let mut r = ptr::null_mut();
        // 16 samples is below the zero tester's minimum
        assert_eq!(stochsym_run(p, c("check").as_ptr(), &mut r), StochsymStatus::Ok);
        assert_eq!(stochsym_report_verdict(r), 2);
        stochsym_report_free(r);
        stochsym_problem_free(p);

        assert_eq!(stochsym_problem_from_toml(c("[sde]").as_ptr(), ptr::null(), &mut p), StochsymStatus::ParseError);
        assert_eq!(stochsym_problem_load(c("/no/such.toml").as_ptr(), ptr::null(), &mut p), StochsymStatus::InvalidInput);

        let cap = "[variables]\nstate = [\"x\"]\ntime = \"t\"\nwiener = [\"w\"]\n[sde]\ncalculus = \"ito\"\ndrift = [\"0\"]\nnoise = [[\"0\"]]\n[symmetry]\nphi = [\"exp(x^2)\"]\n";
        assert_eq!(stochsym_problem_from_toml(c(cap).as_ptr(), ptr::null(), &mut p), StochsymStatus::Ok);
        assert_eq!(stochsym_run(p, c("reduce").as_ptr(), &mut r), StochsymStatus::Capability);
        stochsym_problem_free(p);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/stochsym.h")).unwrap();
    for name in [
        "stochsym_last_error",
        "stochsym_string_free",
        "stochsym_expr_parse",
        "stochsym_expr_eval",
        "stochsym_problem_from_toml",
        "stochsym_run",
        "stochsym_report_json",
        "typedef struct StochsymProblem StochsymProblem;",
        "STOCHSYM_STATUS_CAPABILITY = 5",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libstochsym_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let have_cc = std::process::Command::new(&cc).arg("--version").output().is_ok_and(|o| o.status.success());
    if !lib.exists() || !have_cc {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = std::process::Command::new(&cc)
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout.contains("error: syntax error"), "{stdout}");
}
