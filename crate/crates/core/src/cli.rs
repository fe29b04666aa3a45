//! Command-line driver: problem files in, text and JSON reports out.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{parse, simplify, Domains, Expr, Interval, VarSpace, ZeroConfig, ZeroVerdict};
use crate::kozlov::{explicit_solution, fresh_state_name, reduce_scalar, KozlovError, ReducedSde, TimeIntegral};
use crate::mc::{change_consistency_test, ConvergenceReport, McConfig};
use crate::sde::{AnySde, Calculus, Sde};
use crate::symmetry::{
    assess, check_tau_condition, determining_system, verify_unal_identity, FieldKind, Overall,
    SymmetryError, SymmetryReport, TauCandidate, VectorField,
};
use crate::transform::{transform_ito, transform_strat, verify_symmetry_preserved, CoordinateChange, PreservationError};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variables {
    pub state: Vec<String>,
    pub time: String,
    pub wiener: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeBlock {
    pub calculus: Calculus,
    pub drift: Vec<String>,
    pub noise: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryBlock {
    pub phi: Vec<String>,
    #[serde(default)]
    pub random: bool,
}

pub type DomainTable = BTreeMap<String, [f64; 2]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeBlock {
    /// Names of the new state variables; fresh names are chosen when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<String>>,
    pub forward: Vec<String>,
    pub inverse: Vec<String>,
    #[serde(default)]
    pub domain: DomainTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauBlock {
    pub expr: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Simulation clipping domain, also the default for `x0`.
    #[serde(default, skip_serializing_if = "DomainTable::is_empty")]
    pub domain: DomainTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Initial state for simulations and explicit solutions, in the original chart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Sampling intervals for zero tests.
    #[serde(default, skip_serializing_if = "DomainTable::is_empty")]
    pub sample: DomainTable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Variables,
    pub sde: SdeBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change: Option<ChangeBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauBlock>,
    #[serde(default)]
    pub numeric: NumericBlock,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid problem file: {0}")]
    Format(String),
    #[error("{what}: {msg}")]
    Invalid { what: String, msg: String },
    #[error("problem file has no [{0}] block")]
    Missing(&'static str),
    #[error("{0}")]
    Capability(String),
}

impl CliError {
    fn invalid(what: impl Into<String>, msg: impl ToString) -> CliError {
        CliError::Invalid { what: what.into(), msg: msg.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Capability(_) => 3,
            _ => 2,
        }
    }
}

impl ProblemFile {
    pub fn from_toml(text: &str) -> Result<ProblemFile, CliError> {
        toml::from_str(text).map_err(|e| CliError::Format(e.to_string()))
    }

    /// A TOML problem file, or a JSON report written by `--json` (its `input` member).
    pub fn load(path: &Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        if path.extension().is_some_and(|e| e == "json") {
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Format(e.to_string()))?;
            let input = v.get("input").cloned().unwrap_or(v);
            return serde_json::from_value(input).map_err(|e| CliError::Format(e.to_string()));
        }
        ProblemFile::from_toml(&text)
    }
}

fn domains(table: &DomainTable) -> Result<Domains, CliError> {
    let mut d = Domains::new();
    for (var, [lo, hi]) in table {
        if !(lo < hi) {
            return Err(CliError::invalid(format!("domain of `{var}`"), format!("[{lo}, {hi}] is empty")));
        }
        d.set(var, Interval::new(*lo, *hi));
    }
    Ok(d)
}

fn expr(text: &str, space: &VarSpace, what: &str) -> Result<Expr, CliError> {
    parse(text, space).map(|e| simplify(&e)).map_err(|e| CliError::invalid(what, e))
}

/// The problem file with expressions parsed and dimensions checked.
pub struct Problem {
    pub file: ProblemFile,
    pub space: VarSpace,
    pub sde: AnySde,
    pub field: Option<VectorField>,
    pub zero: ZeroConfig,
}

/// Overrides from the command line.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
}

impl Problem {
    pub fn new(file: ProblemFile, opts: &Options) -> Result<Problem, CliError> {
        let v = &file.variables;
        let space = VarSpace::new(&v.state, &v.time, &v.wiener).map_err(|e| CliError::invalid("variables", e))?;
        let drift = file
            .sde
            .drift
            .iter()
            .enumerate()
            .map(|(i, s)| expr(s, &space, &format!("sde.drift[{i}]")))
            .collect::<Result<_, _>>()?;
        let noise = file
            .sde
            .noise
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(k, s)| expr(s, &space, &format!("sde.noise[{i}][{k}]"))).collect()
            })
            .collect::<Result<_, _>>()?;
        let sde = AnySde::new(file.sde.calculus, space.clone(), drift, noise).map_err(|e| CliError::invalid("sde", e))?;
        let field = match &file.symmetry {
            None => None,
            Some(b) => {
                let phi = b
                    .phi
                    .iter()
                    .enumerate()
                    .map(|(i, s)| expr(s, &space, &format!("symmetry.phi[{i}]")))
                    .collect::<Result<_, _>>()?;
                let kind = if b.random { FieldKind::Random } else { FieldKind::Deterministic };
                Some(VectorField::new(space.clone(), phi, kind).map_err(|e| CliError::invalid("symmetry", e))?)
            }
        };
        let mut zero = ZeroConfig::default();
        zero.domains = domains(&file.numeric.sample)?;
        if let Some(tol) = opts.tol.or(file.numeric.tol) {
            zero.tol = tol;
        }
        if let Some(n) = opts.samples {
            zero.samples = n;
        }
        if let Some(seed) = opts.seed.or(file.numeric.seed) {
            zero.seed = seed;
        }
        Ok(Problem { file, space, sde, field, zero })
    }

    fn field(&self) -> Result<&VectorField, CliError> {
        self.field.as_ref().ok_or(CliError::Missing("symmetry"))
    }

    fn change(&self) -> Result<CoordinateChange, CliError> {
        let b = self.file.change.as_ref().ok_or(CliError::Missing("change"))?;
        let names = match &b.state {
            Some(n) => n.clone(),
            None => {
                let mut names: Vec<String> = Vec::new();
                let mut sp = self.space.clone();
                for _ in self.space.states() {
                    let name = fresh_state_name(&sp);
                    let mut all = sp.states().to_vec();
                    all.push(name.clone());
                    sp = sp.with_states(&all).map_err(|e| CliError::invalid("change.state", e))?;
                    names.push(name);
                }
                names
            }
        };
        let new_space = self.space.with_states(&names).map_err(|e| CliError::invalid("change.state", e))?;
        let forward = b
            .forward
            .iter()
            .enumerate()
            .map(|(i, s)| expr(s, &self.space, &format!("change.forward[{i}]")))
            .collect::<Result<_, _>>()?;
        let inverse = b
            .inverse
            .iter()
            .enumerate()
            .map(|(i, s)| expr(s, &new_space, &format!("change.inverse[{i}]")))
            .collect::<Result<_, _>>()?;
        let domain = self.zero.domains.merged(&domains(&b.domain)?);
        CoordinateChange::new(self.space.clone(), names, forward, inverse, domain, &self.zero)
            .map_err(|e| CliError::invalid("change", e))
    }

    fn mc_config(&self) -> Result<McConfig, CliError> {
        let n = &self.file.numeric;
        let mut cfg = McConfig::standard(self.zero.seed, n.horizon.unwrap_or(0.25));
        if let Some(dt) = &n.dt {
            cfg.dts = dt.clone();
        }
        if let Some(p) = n.paths {
            cfg.paths = p;
        }
        cfg.x0 = n.x0.clone();
        cfg.clip = domains(&n.domain)?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Rewrite the equation in the other calculus.
    Convert,
    /// Decide whether the symmetry block is a symmetry.
    Check,
    /// Print the determining equations for the symmetry block.
    Determining,
    /// Reduce a scalar equation to one with time-only coefficients.
    Reduce,
    /// Reduce and integrate.
    Solve,
    /// Transform the equation and symmetry, and validate the change by simulation.
    VerifyChange,
    /// Evaluate the acceptability condition for a time component.
    TauCheck,
    /// Check that the Ito Laplacian of the field equals its Σ operator.
    Unal,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Convert => "convert",
            Command::Check => "check",
            Command::Determining => "determining",
            Command::Reduce => "reduce",
            Command::Solve => "solve",
            Command::VerifyChange => "verify-change",
            Command::TauCheck => "tau-check",
            Command::Unal => "unal",
        }
    }

    pub const ALL: [Command; 8] = [
        Command::Convert,
        Command::Check,
        Command::Determining,
        Command::Reduce,
        Command::Solve,
        Command::VerifyChange,
        Command::TauCheck,
        Command::Unal,
    ];

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Parser, Debug)]
#[command(name = "stochsym", version, about = "Lie-point symmetries of stochastic differential equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Problem file (TOML, or a JSON report from --json).
    #[arg(global = true)]
    pub problem: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Zero-test tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Zero-test sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Write a machine-readable report here.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// No text report.
    #[arg(long, global = true)]
    pub quiet: bool,
}

/// Text and JSON renderings of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

struct Builder {
    text: String,
    json: serde_json::Map<String, Value>,
}

impl Builder {
    fn new(cmd: Command, problem: &Problem) -> Builder {
        let mut b = Builder { text: String::new(), json: serde_json::Map::new() };
        b.json.insert("command".into(), json!(cmd.name()));
        b.json.insert("input".into(), serde_json::to_value(&problem.file).expect("problem file serializes"));
        b.section("INPUT");
        let v = &problem.file.variables;
        b.line(format!("state: {}   time: {}   wiener: {}", v.state.join(", "), v.time, v.wiener.join(", ")));
        b.sde(problem.sde.as_dyn());
        if let Some(x) = &problem.field {
            let kind = match x.kind() {
                FieldKind::Deterministic => "deterministic",
                FieldKind::Random => "random",
            };
            b.line(format!("field ({kind}):"));
            for (i, p) in x.phi().iter().enumerate() {
                b.line(format!("  phi[{i}] = {p}"));
            }
        }
        b
    }

    fn section(&mut self, name: &str) {
        if !self.text.is_empty() {
            self.text.push('\n');
        }
        self.text.push_str(name);
        self.text.push('\n');
    }

    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.text, "  {}", s.as_ref());
    }

    fn sde(&mut self, sde: &dyn Sde) {
        self.line(format!("calculus: {}", sde.calculus().name()));
        for (i, f) in sde.drift().iter().enumerate() {
            self.line(format!("drift[{i}] = {f}"));
        }
        for (i, row) in sde.noise().iter().enumerate() {
            for (k, s) in row.iter().enumerate() {
                self.line(format!("noise[{i}][{k}] = {s}"));
            }
        }
    }

    fn set(&mut self, key: &str, v: Value) {
        self.json.insert(key.into(), v);
    }

    fn finish(mut self, code: i32) -> Report {
        self.json.insert("exit_code".into(), json!(code));
        Report { code, text: self.text, json: Value::Object(self.json) }
    }
}

fn sde_json(sde: &dyn Sde) -> Value {
    json!({
        "calculus": sde.calculus(),
        "state": sde.space().states(),
        "drift": sde.drift().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "noise": sde.noise().iter().map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn verdict_text(v: &ZeroVerdict) -> String {
    match v {
        ZeroVerdict::SymbolicZero => "symbolic zero".into(),
        ZeroVerdict::NumericZero { samples, max_abs, .. } => format!("numeric zero ({samples} samples, max |r| = {max_abs:e})"),
        ZeroVerdict::NonZero { witness, value } => format!("nonzero: {value:e} at {}", point(witness)),
    }
}

fn point(w: &BTreeMap<String, f64>) -> String {
    let parts: Vec<String> = w.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    format!("({})", parts.join(", "))
}

fn residuals(b: &mut Builder, report: &SymmetryReport, key: &str) {
    let mut rows = Vec::new();
    for r in &report.residuals {
        let outcome = match &r.outcome {
            Ok(v) => verdict_text(v),
            Err(e) => format!("undecided: {e}"),
        };
        b.line(format!("{} = {}", r.label, r.expr));
        b.line(format!("    {outcome}"));
        rows.push(json!({
            "label": r.label,
            "expr": r.expr.to_string(),
            "verdict": match &r.outcome { Ok(v) => serde_json::to_value(v).unwrap(), Err(e) => json!({"kind": "Error", "message": e.to_string()}) },
        }));
    }
    b.set(key, Value::Array(rows));
}

fn symmetry_line(report: &SymmetryReport) -> String {
    match report.overall {
        Overall::Symmetry => format!("symmetry: yes ({})", report.method()),
        Overall::NotSymmetry => "symmetry: no".into(),
        Overall::Inconclusive => "symmetry: undecided (residuals could not be sampled)".into(),
    }
}

fn overall_code(o: Overall) -> i32 {
    match o {
        Overall::Symmetry => 0,
        Overall::NotSymmetry => 1,
        Overall::Inconclusive => 2,
    }
}

fn kozlov_error(e: KozlovError) -> CliError {
    if e.is_capability() {
        CliError::Capability(e.to_string())
    } else {
        CliError::invalid("reduce", e)
    }
}

fn convergence(b: &mut Builder, r: &ConvergenceReport) {
    b.line(format!("paths: {}   excluded: {}", r.paths, r.excluded));
    b.line("dt            mean max discrepancy");
    for l in &r.levels {
        b.line(format!("{:<13e} {:e}", l.dt, l.mean_discrepancy));
    }
    match r.slope {
        Some(s) => b.line(format!("slope: {s:.4}   monotone: {}", r.monotone)),
        None => b.line("slope: none (all discrepancies zero)"),
    }
    b.line(format!("consistency: {}", if r.passed { "pass" } else { "fail" }));
    b.set("numeric", serde_json::to_value(r).unwrap());
}

/// Run `cmd` on a parsed problem.
pub fn execute(cmd: Command, problem: &Problem) -> Result<Report, CliError> {
    let mut b = Builder::new(cmd, problem);
    let code = match cmd {
        Command::Convert => {
            let other: Box<dyn Sde> = match &problem.sde {
                AnySde::Ito(s) => Box::new(crate::sde::ito_to_stratonovich(s)),
                AnySde::Strat(s) => Box::new(crate::sde::stratonovich_to_ito(s)),
            };
            b.section("RESULT");
            b.sde(other.as_ref());
            b.set("result", sde_json(other.as_ref()));
            0
        }
        Command::Check => {
            let sys = determining_system(&problem.sde, problem.field()?).map_err(|e| CliError::invalid("check", e))?;
            let report = assess(&sys, &problem.zero);
            b.section("RESIDUALS");
            residuals(&mut b, &report, "residuals");
            b.section("VERDICT");
            b.line(symmetry_line(&report));
            if let Some(f) = report.first_failure() {
                if let Ok(ZeroVerdict::NonZero { witness, value }) = &f.outcome {
                    // a residual free of some variables is nonzero wherever those sit
                    let mut at = witness.clone();
                    for v in problem.space.all_names() {
                        let mid = problem.zero.domains.get(&v).midpoint();
                        at.entry(v).or_insert(mid);
                    }
                    b.line(format!("witness: {} = {value:e} at {}", f.label, point(&at)));
                    b.set("witness", json!({"residual": f.label, "value": value, "point": at}));
                }
            }
            b.set("verdict", json!(report.overall));
            overall_code(report.overall)
        }
        Command::Determining => {
            let sys = determining_system(&problem.sde, problem.field()?).map_err(|e| CliError::invalid("determining", e))?;
            b.section("RESIDUALS");
            let mut rows = Vec::new();
            for (label, e) in sys.residuals() {
                b.line(format!("{label} = {e}"));
                rows.push(json!({"label": label, "expr": e.to_string()}));
            }
            b.set("residuals", Value::Array(rows));
            0
        }
        Command::Reduce | Command::Solve => {
            let ito = problem.sde.to_ito();
            let r = reduce_scalar(&ito, problem.field()?, &problem.zero);
            let r = match r {
                Err(KozlovError::NotSymmetry(report)) => {
                    b.section("RESIDUALS");
                    residuals(&mut b, &report, "residuals");
                    b.section("VERDICT");
                    b.line(symmetry_line(&report));
                    b.set("verdict", json!(report.overall));
                    return Ok(b.finish(1));
                }
                other => other.map_err(kozlov_error)?,
            };
            reduced(&mut b, &r);
            if cmd == Command::Solve {
                solve(&mut b, problem, &r)?;
            }
            0
        }
        Command::VerifyChange => verify_change(&mut b, problem)?,
        Command::TauCheck => {
            let tau_text = &problem.file.tau.as_ref().ok_or(CliError::Missing("tau"))?.expr;
            let tau = expr(tau_text, &problem.space, "tau.expr")?;
            let check = check_tau_condition(&problem.sde.to_ito(), &TauCandidate { tau: tau.clone() }, &problem.zero)
                .map_err(|e| CliError::invalid("tau-check", e))?;
            b.line(format!("tau = {tau}"));
            b.section("RESIDUALS");
            for (i, e) in check.expressions.iter().enumerate() {
                b.line(format!("tau[{i}] = {e}"));
            }
            b.set("residuals", json!(check.expressions.iter().map(|e| e.to_string()).collect::<Vec<_>>()));
            b.section("VERDICT");
            b.line(format!("tau condition: {}", verdict_text(&check.verdict)));
            b.set("verdict", serde_json::to_value(&check.verdict).unwrap());
            if check.verdict.is_zero() { 0 } else { 1 }
        }
        Command::Unal => {
            let ito = problem.sde.to_ito();
            let x = problem.field()?;
            match verify_unal_identity(&ito, x, &problem.zero) {
                Ok(v) => {
                    let diffs = crate::symmetry::unal_difference(&ito, x).map_err(|e| CliError::invalid("unal", e))?;
                    b.section("RESIDUALS");
                    for (i, d) in diffs.iter().enumerate() {
                        b.line(format!("laplacian - sigma [{i}] = {d}"));
                    }
                    b.set("residuals", json!(diffs.iter().map(|e| e.to_string()).collect::<Vec<_>>()));
                    b.section("VERDICT");
                    b.line(format!("identity: {}", verdict_text(&v)));
                    b.set("verdict", serde_json::to_value(&v).unwrap());
                    if v.is_zero() { 0 } else { 1 }
                }
                Err(SymmetryError::ConstraintNotSatisfied { label, verdict }) => {
                    b.section("VERDICT");
                    b.line(format!("precondition fails: {label} is {}", verdict_text(&verdict)));
                    b.set("verdict", json!({"precondition": label, "verdict": verdict}));
                    1
                }
                Err(e) => return Err(CliError::invalid("unal", e)),
            }
        }
    };
    Ok(b.finish(code))
}

fn reduced(b: &mut Builder, r: &ReducedSde) {
    let ch = &r.change;
    b.section("RESULT");
    let s = &r.space.states()[0];
    b.line(format!("{s} = {}", ch.forward()[0]));
    b.line(format!("{} = {}", ch.space().states()[0], ch.inverse()[0]));
    b.line(format!("drift = {}", r.drift_t));
    b.line(format!("noise = {}", r.noise_t));
    b.line(format!("d{s} = ({}) dt + ({}) d{}", r.drift_t, r.noise_t, r.space.wiener()[0]));
    if let Some(at) = &r.pinned_state {
        b.line(format!("note: coefficients were state-free only numerically; evaluated at {s} = {at}"));
    }
    b.set(
        "result",
        json!({
            "state": s,
            "forward": ch.forward()[0].to_string(),
            "inverse": ch.inverse()[0].to_string(),
            "drift": r.drift_t.to_string(),
            "noise": r.noise_t.to_string(),
            "pinned_state": r.pinned_state.as_ref().map(|n| n.to_string()),
        }),
    );
    b.section("VERDICT");
    b.line("reduction: yes");
    b.set("verdict", json!("reduced"));
}

fn solve(b: &mut Builder, problem: &Problem, r: &ReducedSde) -> Result<(), CliError> {
    let old = &problem.space.states()[0];
    let x0 = match &problem.file.numeric.x0 {
        Some(v) if v.len() == 1 => v[0],
        Some(v) => return Err(CliError::invalid("numeric.x0", format!("expected 1 entry, got {}", v.len()))),
        None => domains(&problem.file.numeric.domain)?.get(old).midpoint(),
    };
    let mut slots: Vec<String> = problem.space.states().to_vec();
    slots.push(problem.space.time().to_string());
    let fwd = crate::expr::Compiled::new(&r.change.forward()[0], &slots).map_err(|e| CliError::invalid("solve", e))?;
    let s0 = fwd.eval(&[x0, 0.0]).map_err(|e| CliError::invalid("solve", e))?;
    let sol = explicit_solution(r, s0, 0.0);
    let horizon = problem.file.numeric.horizon.unwrap_or(1.0);
    let s = &r.space.states()[0];
    b.section("SOLUTION");
    b.line(format!("{old}(0) = {x0}  =>  {s}(0) = {s0}"));
    b.line(sol.describe(s));
    b.line(format!("{old} = {}", r.change.inverse()[0]));
    b.section("NUMERIC");
    b.line(format!("mean {s}({horizon}) = {}", sol.mean(horizon)));
    b.line(format!("variance {s}({horizon}) = {}", sol.variance(horizon)));
    let sym = |t: &TimeIntegral| match t {
        TimeIntegral::Symbolic(e) => json!(e.to_string()),
        TimeIntegral::Quadrature => json!("quadrature"),
    };
    b.set(
        "solution",
        json!({
            "x0": x0, "s0": s0, "describe": sol.describe(s),
            "drift_integral": sym(&sol.drift_integral), "variance_integral": sym(&sol.variance_integral),
            "horizon": horizon, "mean": sol.mean(horizon), "variance": sol.variance(horizon),
        }),
    );
    Ok(())
}

fn verify_change(b: &mut Builder, problem: &Problem) -> Result<i32, CliError> {
    let ch = problem.change()?;
    let mut code = 0;
    b.section("RESULT");
    for (i, (f, g)) in ch.forward().iter().zip(ch.inverse()).enumerate() {
        b.line(format!("{} = {f}", ch.new_space().states()[i]));
        b.line(format!("{} = {g}", ch.space().states()[i]));
    }
    let ito = problem.sde.to_ito();
    let transformed: Box<dyn Sde> = match &problem.sde {
        AnySde::Ito(s) => Box::new(transform_ito(s, &ch).map_err(|e| CliError::invalid("transform", e))?),
        AnySde::Strat(s) => Box::new(transform_strat(s, &ch).map_err(|e| CliError::invalid("transform", e))?),
    };
    b.line("transformed equation:");
    b.sde(transformed.as_ref());
    b.set("result", sde_json(transformed.as_ref()));
    if let Some(x) = &problem.field {
        match verify_symmetry_preserved(&ito, x, &ch, &problem.zero) {
            Ok((before, after)) => {
                b.section("RESIDUALS");
                residuals(b, &after, "residuals");
                b.section("VERDICT");
                b.line(format!("before: {}", symmetry_line(&before)));
                b.line(format!("after: {}", symmetry_line(&after)));
                b.set("verdict", json!("preserved"));
            }
            Err(PreservationError::Precondition(before)) => {
                b.section("RESIDUALS");
                residuals(b, &before, "residuals");
                b.section("VERDICT");
                b.line(format!("before: {}", symmetry_line(&before)));
                b.set("verdict", json!("not_a_symmetry"));
                code = 1;
            }
            Err(PreservationError::NotPreserved { after, .. }) => {
                b.section("RESIDUALS");
                residuals(b, &after, "residuals");
                b.section("VERDICT");
                b.line(format!("after: {}", symmetry_line(&after)));
                b.set("verdict", json!("not_preserved"));
                code = 1;
            }
            Err(e) => return Err(CliError::invalid("verify-change", e)),
        }
    } else {
        b.section("VERDICT");
        b.line("change: verified inverse pair");
        b.set("verdict", json!("verified"));
    }
    b.section("NUMERIC");
    let cfg = problem.mc_config()?;
    let r = change_consistency_test(&ito, &ch, &cfg).map_err(|e| CliError::invalid("numeric", e))?;
    convergence(b, &r);
    if !r.passed {
        code = code.max(1);
    }
    Ok(code)
}

/// Parse arguments, run, print; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let Some(path) = &cli.problem else {
        eprintln!("error: a problem file is required");
        return 2;
    };
    let opts = Options { seed: cli.seed, tol: cli.tol, samples: cli.samples };
    let result = ProblemFile::load(path).and_then(|f| Problem::new(f, &opts)).and_then(|p| execute(cli.command, &p));
    match result {
        Ok(report) => {
            if !cli.quiet {
                print!("{}", report.text);
            }
            if let Some(out) = &cli.json {
                let text = serde_json::to_string_pretty(&report.json).expect("report serializes");
                if let Err(e) = std::fs::write(out, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", out.display());
                    return 2;
                }
            }
            report.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
