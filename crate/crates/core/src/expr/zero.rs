//! Probabilistic zero-equivalence testing.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simplify::terms_of;
use super::{simplify, Expr};

/// Closed sampling interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Default per-variable sampling interval; keeps clear of the poles and branch
/// points of `exp(-2y)`, `1/y` and `log` in the worked examples.
pub const DEFAULT_INTERVAL: Interval = Interval::new(0.3, 2.0);

/// Per-variable sampling intervals; variables without an entry use the default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Domains {
    map: BTreeMap<String, Interval>,
    default: Option<Interval>,
}

impl Domains {
    pub fn new() -> Self {
        Domains::default()
    }

    pub fn with(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.set(var, Interval::new(lo, hi));
        self
    }

    pub fn set(&mut self, var: &str, iv: Interval) {
        self.map.insert(var.to_string(), iv);
    }

    pub fn with_default(mut self, iv: Interval) -> Self {
        self.default = Some(iv);
        self
    }

    pub fn get(&self, var: &str) -> Interval {
        self.map.get(var).copied().or(self.default).unwrap_or(DEFAULT_INTERVAL)
    }

    pub fn explicit(&self, var: &str) -> Option<Interval> {
        self.map.get(var).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&String, &Interval)> {
        self.map.iter()
    }

    /// Entries of `other` override entries of `self`.
    pub fn merged(&self, other: &Domains) -> Domains {
        let mut out = self.clone();
        for (k, v) in &other.map {
            out.map.insert(k.clone(), *v);
        }
        if other.default.is_some() {
            out.default = other.default;
        }
        out
    }
}

/// Settings for [`is_zero`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroConfig {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub domains: Domains,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        ZeroConfig { tol: 1e-9, samples: 32, seed: 0x5eed_0001, domains: Domains::new() }
    }
}

impl ZeroConfig {
    pub fn with_domains(mut self, domains: Domains) -> Self {
        self.domains = domains;
        self
    }
}

/// Outcome of a zero test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ZeroVerdict {
    /// Simplification produced the literal 0.
    SymbolicZero,
    /// Every sampled value was within tolerance.
    NumericZero { samples: usize, tol: f64, max_abs: f64 },
    /// A sample point where the value exceeds tolerance.
    NonZero { witness: BTreeMap<String, f64>, value: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self, ZeroVerdict::SymbolicZero)
    }

    /// Conjunction: the first nonzero verdict wins, then numeric over symbolic.
    pub fn and(self, other: ZeroVerdict) -> ZeroVerdict {
        match (&self, &other) {
            (ZeroVerdict::NonZero { .. }, _) => self,
            (_, ZeroVerdict::NonZero { .. }) => other,
            (ZeroVerdict::NumericZero { max_abs: a, .. }, ZeroVerdict::NumericZero { max_abs: b, .. }) => {
                if a >= b {
                    self
                } else {
                    other
                }
            }
            (ZeroVerdict::NumericZero { .. }, _) => self,
            (_, ZeroVerdict::NumericZero { .. }) => other,
            _ => self,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ZeroVerdict::SymbolicZero => "symbolic zero",
            ZeroVerdict::NumericZero { .. } => "numeric zero",
            ZeroVerdict::NonZero { .. } => "nonzero",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("at least 32 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("only {found} of {wanted} sample points were inside the expression's domain")]
    SamplingExhausted { found: usize, wanted: usize },
}

/// Decide whether `e` vanishes identically.
///
/// Returns `SymbolicZero` if simplification yields literal 0. Otherwise samples the free
/// variables uniformly from their domains, skipping points where evaluation fails (up
/// to ten times the requested budget), and compares `|e|` against `tol` scaled by
/// `max(1, sum of |term|)` so that cancellation between large terms is judged relatively.
pub fn is_zero(e: &Expr, cfg: &ZeroConfig) -> Result<ZeroVerdict, ZeroTestError> {
    if cfg.samples < 32 {
        return Err(ZeroTestError::TooFewSamples(cfg.samples));
    }
    let e = simplify(e);
    if e.is_zero_literal() {
        return Ok(ZeroVerdict::SymbolicZero);
    }
    numeric_zero(&e, cfg)
}

/// The sampling half of [`is_zero`], applied to `e` as given (no simplification).
///
/// Useful where the simplifier's positivity assumptions must not be trusted, such as
/// checking which branch of an inverse map is correct.
pub fn numeric_zero(e: &Expr, cfg: &ZeroConfig) -> Result<ZeroVerdict, ZeroTestError> {
    if cfg.samples < 32 {
        return Err(ZeroTestError::TooFewSamples(cfg.samples));
    }
    let vars: Vec<String> = e.free_vars().into_iter().collect();
    let terms = terms_of(e);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut found = 0;
    let mut max_abs = 0.0f64;
    let budget = cfg.samples * 10;
    let mut point = HashMap::new();
    for _ in 0..budget {
        point.clear();
        for v in &vars {
            let iv = cfg.domains.get(v);
            let x = if iv.width() > 0.0 { rng.random_range(iv.lo..=iv.hi) } else { iv.lo };
            point.insert(v.clone(), x);
        }
        let Ok(value) = e.eval_at(&point) else { continue };
        let mut scale = 1.0f64;
        let mut scale_ok = true;
        if terms.len() > 1 {
            let mut s = 0.0;
            for t in &terms {
                match t.eval_at(&point) {
                    Ok(v) => s += v.abs(),
                    Err(_) => {
                        scale_ok = false;
                        break;
                    }
                }
            }
            if scale_ok {
                scale = scale.max(s);
            }
        }
        if !scale_ok {
            continue;
        }
        found += 1;
        if value.abs() > cfg.tol * scale {
            return Ok(ZeroVerdict::NonZero {
                witness: point.iter().map(|(k, v)| (k.clone(), *v)).collect(),
                value,
            });
        }
        max_abs = max_abs.max(value.abs());
        if found == cfg.samples {
            return Ok(ZeroVerdict::NumericZero { samples: found, tol: cfg.tol, max_abs });
        }
    }
    Err(ZeroTestError::SamplingExhausted { found, wanted: cfg.samples })
}
