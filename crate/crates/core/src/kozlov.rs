//! Reduction of a scalar Ito SDE with a simple symmetry to dy = f̂(t) dt + σ̂(t) dw.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::expr::{
    differentiate, integrate_univariate, is_zero, simplify, substitute, Domains, Expr, Number, VarSpace, ZeroConfig,
    ZeroTestError, ZeroVerdict,
};
use crate::sde::{ItoSde, Sde};
use crate::symmetry::{check_symmetry, SymmetryError, SymmetryReport, VectorField};
use crate::transform::{invert_scalar, transform_ito, CoordinateChange, TransformError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KozlovError {
    #[error("reduction is implemented for scalar equations only (got {0} states)")]
    NotScalar(usize),
    #[error("the symmetry generator vanishes identically")]
    ZeroField,
    #[error("no integration rule for 1/phi = {integrand}")]
    NoIntegrationRule { integrand: String },
    #[error("no closed-form inverse for {forward} on the validity domain")]
    NoClosedFormInverse { forward: String },
    #[error("the field is not a symmetry of the equation")]
    NotSymmetry(Box<SymmetryReport>),
    #[error("reduced {entry} still depends on the state: {expr} ({verdict:?})")]
    StateDependent { entry: &'static str, expr: String, verdict: ZeroVerdict },
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

impl KozlovError {
    /// True for missing integration or inversion rules, as opposed to bad input.
    pub fn is_capability(&self) -> bool {
        matches!(self, KozlovError::NoIntegrationRule { .. } | KozlovError::NoClosedFormInverse { .. })
    }
}

/// First unused name among x, y, z, u, v, then x1, x2, ...
pub fn fresh_state_name(space: &VarSpace) -> String {
    ["x", "y", "z", "u", "v"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..).map(|i| format!("x{i}")))
        .find(|s| !space.contains(s))
        .expect("infinitely many candidates")
}

/// x = ∫ dy / φ (constant 0) with a closed-form inverse verified on `domain`.
pub fn kozlov_change(x: &VectorField, domain: &Domains, cfg: &ZeroConfig) -> Result<CoordinateChange, KozlovError> {
    let space = x.space();
    if space.n() != 1 {
        return Err(KozlovError::NotScalar(space.n()));
    }
    let phi = &x.phi()[0];
    if phi.is_zero_literal() {
        return Err(KozlovError::ZeroField);
    }
    let y = &space.states()[0];
    let integrand = simplify(&Expr::recip(phi.clone()));
    let forward = integrate_univariate(&integrand, y)
        .ok_or_else(|| KozlovError::NoIntegrationRule { integrand: integrand.to_string() })?;
    let new = fresh_state_name(space);
    let cfg = cfg.clone().with_domains(cfg.domains.merged(domain));
    invert_scalar(space, &new, &forward, domain, &cfg)
        .ok_or_else(|| KozlovError::NoClosedFormInverse { forward: forward.to_string() })
}

/// The reduced equation and how it was obtained.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSde {
    pub space: VarSpace,
    pub drift_t: Expr,
    pub noise_t: Expr,
    pub change: CoordinateChange,
    /// Set when a coefficient was state-free only numerically and was evaluated at a
    /// fixed state value to remove the syntactic dependence.
    pub pinned_state: Option<Number>,
}

impl ReducedSde {
    pub fn as_sde(&self) -> ItoSde {
        ItoSde::new(self.space.clone(), vec![self.drift_t.clone()], vec![vec![self.noise_t.clone()]])
            .expect("reduced coefficients depend on t only")
    }
}

/// Rational near the midpoint of `[lo, hi]`, on a 1/64 grid when that grid hits the interval.
fn rational_midpoint(lo: f64, hi: f64) -> Number {
    let mid = 0.5 * (lo + hi);
    let k = (mid * 64.0).round() as i64;
    let r = Number::ratio(k, 64);
    if (lo..=hi).contains(&r.to_f64()) {
        r
    } else {
        Number::Decimal(mid)
    }
}

/// Check the symmetry, change to x = ∫ dy/φ and confirm the coefficients are state-free.
pub fn reduce_scalar(sde: &ItoSde, x: &VectorField, cfg: &ZeroConfig) -> Result<ReducedSde, KozlovError> {
    let space = sde.space();
    if space.n() != 1 || space.m() != 1 {
        return Err(KozlovError::NotScalar(space.n()));
    }
    let report = check_symmetry(&sde.clone().into(), x, cfg)?;
    if !report.is_symmetry() {
        return Err(KozlovError::NotSymmetry(Box::new(report)));
    }
    let domain = cfg.domains.clone();
    let change = kozlov_change(x, &domain, cfg)?;
    let reduced = transform_ito(sde, &change)?;
    let new_space = change.new_space();
    let s = new_space.states()[0].clone();
    let new_domain = change.new_domain()?;
    let zcfg = cfg.clone().with_domains(cfg.domains.merged(&new_domain));
    let mut pinned_state = None;
    let mut finish = |entry: &'static str, e: &Expr| -> Result<Expr, KozlovError> {
        if !e.depends_on(&s) {
            return Ok(e.clone());
        }
        let verdict = is_zero(&differentiate(e, &s), &zcfg)?;
        if !verdict.is_zero() {
            return Err(KozlovError::StateDependent { entry, expr: e.to_string(), verdict });
        }
        let iv = new_domain.get(&s);
        let at = rational_midpoint(iv.lo, iv.hi);
        pinned_state = Some(at.clone());
        Ok(substitute(e, &BTreeMap::from([(s.clone(), Expr::num(at))])))
    };
    let drift_t = finish("drift", &reduced.drift()[0])?;
    let noise_t = finish("noise", &reduced.noise()[0][0])?;
    Ok(ReducedSde { space: new_space, drift_t, noise_t, change, pinned_state })
}

/// How a time integral was evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeIntegral {
    /// Antiderivative G with G(t0) = 0.
    Symbolic(Expr),
    /// No rule applied; evaluated by composite Simpson quadrature.
    Quadrature,
}

/// x(t) = x0 + ∫_{t0}^t f̂ ds + ∫_{t0}^t σ̂ dw, the last term Gaussian with
/// variance ∫_{t0}^t σ̂² ds.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitSolution {
    pub time: String,
    pub x0: f64,
    pub t0: f64,
    pub drift_t: Expr,
    pub noise_t: Expr,
    pub drift_integral: TimeIntegral,
    pub variance_integral: TimeIntegral,
}

const SIMPSON_INTERVALS: usize = 2048;

fn integral_from(e: &Expr, t: &str, t0: f64) -> TimeIntegral {
    let Some(g) = integrate_univariate(e, t) else { return TimeIntegral::Quadrature };
    let start = if t0.fract() == 0.0 && t0.abs() < 1e15 { Expr::int(t0 as i64) } else { Expr::num(Number::Decimal(t0)) };
    let at_start = substitute(&g, &BTreeMap::from([(t.to_string(), start)]));
    match at_start.as_number() {
        Some(v) if v.to_f64().is_finite() => TimeIntegral::Symbolic(simplify(&Expr::sub(g, at_start))),
        _ => TimeIntegral::Quadrature,
    }
}

fn simpson(e: &Expr, t: &str, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = SIMPSON_INTERVALS;
    let h = (b - a) / n as f64;
    let f = |s: f64| e.eval_with(&[(t, s)]).unwrap_or(f64::NAN);
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

impl ExplicitSolution {
    fn eval_integral(&self, which: &TimeIntegral, integrand: &Expr, t: f64) -> f64 {
        match which {
            TimeIntegral::Symbolic(g) => g.eval_with(&[(self.time.as_str(), t)]).unwrap_or(f64::NAN),
            TimeIntegral::Quadrature => simpson(integrand, &self.time, self.t0, t),
        }
    }

    /// E[x(t)] = x0 + ∫ f̂.
    pub fn mean(&self, t: f64) -> f64 {
        self.x0 + self.eval_integral(&self.drift_integral, &self.drift_t, t)
    }

    /// Var[x(t)] = ∫ σ̂².
    pub fn variance(&self, t: f64) -> f64 {
        let sq = simplify(&Expr::pow(self.noise_t.clone(), Expr::int(2)));
        self.eval_integral(&self.variance_integral, &sq, t)
    }

    /// Path on the grid t0 + j·dt driven by the given increments:
    /// x0 + ∫ f̂ + Σ σ̂(t_k) Δw_k.
    pub fn sample(&self, dt: f64, increments: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(increments.len() + 1);
        out.push(self.x0);
        let mut stoch = 0.0;
        for (k, dw) in increments.iter().enumerate() {
            let tk = self.t0 + k as f64 * dt;
            stoch += self.noise_t.eval_with(&[(self.time.as_str(), tk)]).unwrap_or(f64::NAN) * dw;
            let t = tk + dt;
            out.push(self.mean(t) + stoch);
        }
        out
    }

    /// Human-readable form, e.g. `x(t) = 0 + (1 - exp(-t)) + ∫ 1 dw`.
    pub fn describe(&self, state: &str) -> String {
        let drift = match &self.drift_integral {
            TimeIntegral::Symbolic(g) => format!("({g})"),
            TimeIntegral::Quadrature => format!("∫_{}^{} ({}) ds [quadrature]", self.t0, self.time, self.drift_t),
        };
        let noise = if self.noise_t.free_vars().is_empty() {
            format!("{}*(w({}) - w({}))", self.noise_t, self.time, self.t0)
        } else {
            format!("∫_{}^{} ({}) dw", self.t0, self.time, self.noise_t)
        };
        format!("{state}({}) = {} + {drift} + {noise}", self.time, self.x0)
    }
}

pub fn explicit_solution(r: &ReducedSde, x0: f64, t0: f64) -> ExplicitSolution {
    let time = r.space.time().to_string();
    let sq = simplify(&Expr::pow(r.noise_t.clone(), Expr::int(2)));
    ExplicitSolution {
        drift_integral: integral_from(&r.drift_t, &time, t0),
        variance_integral: integral_from(&sq, &time, t0),
        time,
        x0,
        t0,
        drift_t: r.drift_t.clone(),
        noise_t: r.noise_t.clone(),
    }
}
