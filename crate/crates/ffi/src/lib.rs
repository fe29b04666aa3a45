//! C interface to stochsym.
//!
//! Every function returns a [`StochsymStatus`]. On failure a message is available from
//! [`stochsym_last_error`] until the next call on the same thread. Handles are opaque and
//! must be released with their `_free` function; strings returned to the caller must be
//! released with [`stochsym_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use stochsym::cli::{execute, CliError, Command, Options, Problem, ProblemFile};
use stochsym::expr::{differentiate, parse, simplify, Expr, VarSpace};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StochsymStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidInput = 4,
    Capability = 5,
    EvalError = 6,
    Panic = 7,
}

/// A canonical expression together with the variables it was parsed against.
pub struct StochsymExpr {
    expr: Expr,
    space: VarSpace,
}

pub struct StochsymProblem {
    problem: Problem,
}

pub struct StochsymReport {
    code: i32,
    text: String,
    json: String,
}

/// Zero-test and seeding overrides; negative or zero fields keep the file's values.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct StochsymOptions {
    pub seed: i64,
    pub tol: f64,
    pub samples: i64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: StochsymStatus, msg: impl Into<String>) -> StochsymStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> StochsymStatus) -> StochsymStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            fail(StochsymStatus::Panic, msg)
        }
    }
}

unsafe fn cstr<'a>(p: *const c_char, what: &str) -> Result<&'a str, StochsymStatus> {
    if p.is_null() {
        return Err(fail(StochsymStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(StochsymStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn owned(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn split_names(csv: &str) -> Vec<String> {
    csv.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message for the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn stochsym_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stochsym_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and simplify `text`. `states` and `wiener` are comma-separated names.
///
/// # Safety
/// String arguments must be valid NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_expr_parse(
    text: *const c_char,
    states: *const c_char,
    time: *const c_char,
    wiener: *const c_char,
    out: *mut *mut StochsymExpr,
) -> StochsymStatus {
    guard(|| {
        if out.is_null() {
            return fail(StochsymStatus::NullPointer, "out is null");
        }
        let src = try_status!(cstr(text, "text"));
        let states = split_names(try_status!(cstr(states, "states")));
        let time = try_status!(cstr(time, "time"));
        let wiener = split_names(try_status!(cstr(wiener, "wiener")));
        let space = match VarSpace::new(&states, time, &wiener) {
            Ok(s) => s,
            Err(e) => return fail(StochsymStatus::InvalidInput, e.to_string()),
        };
        match parse(src, &space) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(StochsymExpr { expr: simplify(&e), space }));
                StochsymStatus::Ok
            }
            Err(e) => fail(StochsymStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochsym_expr_free(e: *mut StochsymExpr) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Canonical printed form; free with `stochsym_string_free`.
///
/// # Safety
/// `e` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_expr_to_string(e: *const StochsymExpr, out: *mut *mut c_char) -> StochsymStatus {
    guard(|| {
        if e.is_null() || out.is_null() {
            return fail(StochsymStatus::NullPointer, "null argument");
        }
        *out = owned(&(*e).expr.to_string());
        StochsymStatus::Ok
    })
}

/// ∂e/∂var as a new handle.
///
/// # Safety
/// `e` must be a live handle, `var` a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_expr_diff(
    e: *const StochsymExpr,
    var: *const c_char,
    out: *mut *mut StochsymExpr,
) -> StochsymStatus {
    guard(|| {
        if e.is_null() || out.is_null() {
            return fail(StochsymStatus::NullPointer, "null argument");
        }
        let var = try_status!(cstr(var, "var"));
        let e = &*e;
        if !e.space.contains(var) {
            return fail(StochsymStatus::InvalidInput, format!("`{var}` is not a declared variable"));
        }
        *out = Box::into_raw(Box::new(StochsymExpr { expr: differentiate(&e.expr, var), space: e.space.clone() }));
        StochsymStatus::Ok
    })
}

/// Evaluate at `names[i] = values[i]`.
///
/// # Safety
/// `names` and `values` must each hold `len` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_expr_eval(
    e: *const StochsymExpr,
    names: *const *const c_char,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> StochsymStatus {
    guard(|| {
        if e.is_null() || out.is_null() || (len > 0 && (names.is_null() || values.is_null())) {
            return fail(StochsymStatus::NullPointer, "null argument");
        }
        let mut point = Vec::with_capacity(len);
        for i in 0..len {
            let name = try_status!(cstr(*names.add(i), "name"));
            point.push((name, *values.add(i)));
        }
        match (*e).expr.eval_with(&point) {
            Ok(v) => {
                *out = v;
                StochsymStatus::Ok
            }
            Err(err) => fail(StochsymStatus::EvalError, err.to_string()),
        }
    })
}

fn cli_status(e: &CliError) -> StochsymStatus {
    match e {
        CliError::Capability(_) => StochsymStatus::Capability,
        CliError::Format(_) => StochsymStatus::ParseError,
        _ => StochsymStatus::InvalidInput,
    }
}

unsafe fn options(o: *const StochsymOptions) -> Options {
    let Some(o) = o.as_ref() else { return Options::default() };
    Options {
        seed: (o.seed >= 0).then_some(o.seed as u64),
        tol: (o.tol > 0.0).then_some(o.tol),
        samples: (o.samples > 0).then_some(o.samples as usize),
    }
}

fn build(file: Result<ProblemFile, CliError>, opts: &Options, out: *mut *mut StochsymProblem) -> StochsymStatus {
    match file.and_then(|f| Problem::new(f, opts)) {
        Ok(problem) => {
            unsafe { *out = Box::into_raw(Box::new(StochsymProblem { problem })) };
            StochsymStatus::Ok
        }
        Err(e) => fail(cli_status(&e), e.to_string()),
    }
}

/// Problem from TOML text; `opts` may be null.
///
/// # Safety
/// `toml` must be a valid string, `opts` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_problem_from_toml(
    toml: *const c_char,
    opts: *const StochsymOptions,
    out: *mut *mut StochsymProblem,
) -> StochsymStatus {
    guard(|| {
        if out.is_null() {
            return fail(StochsymStatus::NullPointer, "out is null");
        }
        let src = try_status!(cstr(toml, "toml"));
        build(ProblemFile::from_toml(src), &options(opts), out)
    })
}

/// Problem from a TOML file or a JSON report; `opts` may be null.
///
/// # Safety
/// `path` must be a valid string, `opts` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_problem_load(
    path: *const c_char,
    opts: *const StochsymOptions,
    out: *mut *mut StochsymProblem,
) -> StochsymStatus {
    guard(|| {
        if out.is_null() {
            return fail(StochsymStatus::NullPointer, "out is null");
        }
        let path = try_status!(cstr(path, "path"));
        build(ProblemFile::load(Path::new(path)), &options(opts), out)
    })
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochsym_problem_free(p: *mut StochsymProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Run a command ("convert", "check", "determining", "reduce", "solve",
/// "verify-change", "tau-check", "unal") and return its report.
///
/// # Safety
/// `p` must be a live handle, `command` a valid string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stochsym_run(
    p: *const StochsymProblem,
    command: *const c_char,
    out: *mut *mut StochsymReport,
) -> StochsymStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return fail(StochsymStatus::NullPointer, "null argument");
        }
        let name = try_status!(cstr(command, "command"));
        let Some(cmd) = Command::from_name(name) else {
            return fail(StochsymStatus::InvalidInput, format!("unknown command `{name}`"));
        };
        match execute(cmd, &(*p).problem) {
            Ok(r) => {
                let json = serde_json::to_string_pretty(&r.json).unwrap_or_default();
                *out = Box::into_raw(Box::new(StochsymReport { code: r.code, text: r.text, json }));
                StochsymStatus::Ok
            }
            Err(e) => fail(cli_status(&e), e.to_string()),
        }
    })
}

/// The command-line exit code for this report: 0 positive verdict, 1 negative.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochsym_report_verdict(r: *const StochsymReport) -> i32 {
    r.as_ref().map_or(-1, |r| r.code)
}

/// Text report; free with `stochsym_string_free`.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochsym_report_text(r: *const StochsymReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| owned(&r.text))
}

/// JSON report; free with `stochsym_string_free`.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochsym_report_json(r: *const StochsymReport) -> *mut c_char {
    r.as_ref().map_or(ptr::null_mut(), |r| owned(&r.json))
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stochsym_report_free(r: *mut StochsymReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
