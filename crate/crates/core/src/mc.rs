//! Euler–Maruyama simulation and pathwise consistency checks.
//!
//! Noise for path `i` comes from a ChaCha stream keyed by `mix(seed, i)`, so results
//! do not depend on the order in which paths are processed. Increments are drawn once
//! at the finest step and coarser levels are formed by summing adjacent pairs, which
//! makes every level an exact aggregation of the finest one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{Compiled, Domains, EvalError};
use crate::sde::{ItoSde, Sde};
use crate::symmetry::VectorField;
use crate::transform::{transform_ito, CoordinateChange, TransformError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("need at least {min_levels} dt levels and {min_paths} paths, got {levels} and {paths}")]
    TooSmall { levels: usize, paths: usize, min_levels: usize, min_paths: usize },
    #[error("dt levels must be the finest step times distinct powers of two; {0} is not")]
    BadLevels(f64),
    #[error("horizon {horizon} is not a whole number of steps of size {dt}")]
    BadHorizon { horizon: f64, dt: f64 },
    #[error("initial state has {got} components, expected {want}")]
    BadInitialState { got: usize, want: usize },
    #[error("the initial state maps to a non-finite value")]
    BadStart,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("cannot compile expression: {0}")]
    Compile(#[from] EvalError),
}

pub const MIN_LEVELS: usize = 4;
pub const MIN_PATHS: usize = 200;

/// splitmix64 finalizer applied to the pair (seed, index).
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Increments Δw^k_j for one path; `dw[j * m + k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WienerIncrements {
    pub m: usize,
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub path: u64,
    pub dw: Vec<f64>,
}

impl WienerIncrements {
    pub fn step(&self, j: usize) -> &[f64] {
        &self.dw[j * self.m..(j + 1) * self.m]
    }

    /// Doubled step: each new increment is the sum of two adjacent ones.
    pub fn coarsen(&self) -> WienerIncrements {
        let steps = self.steps / 2;
        let mut dw = Vec::with_capacity(steps * self.m);
        for j in 0..steps {
            for k in 0..self.m {
                dw.push(self.dw[2 * j * self.m + k] + self.dw[(2 * j + 1) * self.m + k]);
            }
        }
        WienerIncrements { dt: self.dt * 2.0, steps, dw, ..self.clone() }
    }

    /// Cumulative w^k at each grid point, starting from 0.
    pub fn cumulative(&self) -> Vec<Vec<f64>> {
        let mut w = vec![0.0; self.m];
        let mut out = Vec::with_capacity(self.steps + 1);
        out.push(w.clone());
        for j in 0..self.steps {
            for (k, d) in self.step(j).iter().enumerate() {
                w[k] += d;
            }
            out.push(w.clone());
        }
        out
    }
}

/// `steps` standard normal draws per process, scaled by √dt.
pub fn generate_wiener(m: usize, dt: f64, steps: usize, seed: u64, path: u64) -> WienerIncrements {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, path));
    let scale = dt.sqrt();
    let dw = (0..steps * m)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * scale
        })
        .collect();
    WienerIncrements { m, dt, steps, seed, path, dw }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathStatus {
    Complete,
    /// First grid index with a non-finite state or coefficient.
    Diverged { index: usize },
    /// First grid index outside the clipping domain.
    LeftDomain { index: usize },
}

/// A simulated trajectory `x[j][i]` at times `t0 + j dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub t0: f64,
    pub dt: f64,
    pub x: Vec<Vec<f64>>,
    pub status: PathStatus,
}

/// Drift and noise compiled over slots (states..., time).
struct CompiledSde {
    n: usize,
    m: usize,
    drift: Vec<Compiled>,
    noise: Vec<Vec<Compiled>>,
    bounds: Vec<(f64, f64)>,
}

impl CompiledSde {
    fn new(sde: &ItoSde, clip: Option<&Domains>) -> Result<Self, EvalError> {
        let space = sde.space();
        let mut slots: Vec<String> = space.states().to_vec();
        slots.push(space.time().to_string());
        let drift = sde.drift().iter().map(|e| Compiled::new(e, &slots)).collect::<Result<_, _>>()?;
        let noise = sde
            .noise()
            .iter()
            .map(|row| row.iter().map(|e| Compiled::new(e, &slots)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let bounds = space
            .states()
            .iter()
            .map(|s| match clip.and_then(|d| d.explicit(s)) {
                Some(iv) => (iv.lo, iv.hi),
                None => (f64::NEG_INFINITY, f64::INFINITY),
            })
            .collect();
        Ok(CompiledSde { n: space.n(), m: space.m(), drift, noise, bounds })
    }

    fn run(&self, x0: &[f64], t0: f64, noise: &WienerIncrements) -> Path {
        let (n, m) = (self.n, self.m);
        let dt = noise.dt;
        let mut x = Vec::with_capacity(noise.steps + 1);
        x.push(x0.to_vec());
        let mut slots = vec![0.0; n + 1];
        let mut status = PathStatus::Complete;
        for j in 0..noise.steps {
            let cur = &x[j];
            slots[..n].copy_from_slice(cur);
            slots[n] = t0 + j as f64 * dt;
            let dw = noise.step(j);
            let mut next = cur.clone();
            let mut ok = true;
            for i in 0..n {
                let mut inc = match self.drift[i].eval(&slots) {
                    Ok(f) => f * dt,
                    Err(_) => f64::NAN,
                };
                for k in 0..m {
                    inc += match self.noise[i][k].eval(&slots) {
                        Ok(s) => s * dw[k],
                        Err(_) => f64::NAN,
                    };
                }
                next[i] += inc;
                ok &= next[i].is_finite();
            }
            if !ok {
                status = PathStatus::Diverged { index: j + 1 };
                break;
            }
            if next.iter().zip(&self.bounds).any(|(v, (lo, hi))| v < lo || v > hi) {
                x.push(next);
                status = PathStatus::LeftDomain { index: j + 1 };
                break;
            }
            x.push(next);
        }
        Path { t0, dt, x, status }
    }
}

/// x_{j+1} = x_j + f(x_j, t_j) dt + σ(x_j, t_j) Δw_j, stopping at the first non-finite
/// state or, when `clip` names a state, the first exit from its interval.
pub fn simulate_euler_maruyama(
    sde: &ItoSde,
    x0: &[f64],
    t0: f64,
    noise: &WienerIncrements,
    clip: Option<&Domains>,
) -> Result<Path, McError> {
    if x0.len() != sde.space().n() {
        return Err(McError::BadInitialState { got: x0.len(), want: sde.space().n() });
    }
    Ok(CompiledSde::new(sde, clip)?.run(x0, t0, noise))
}

/// Settings shared by the consistency tests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McConfig {
    /// Step sizes; each must be the smallest one times a power of two.
    pub dts: Vec<f64>,
    pub paths: usize,
    pub seed: u64,
    pub horizon: f64,
    pub t0: f64,
    /// Initial state in the original chart; the midpoint of the clipping domain if absent.
    pub x0: Option<Vec<f64>>,
    /// Paths leaving these state intervals are excluded.
    pub clip: Domains,
}

impl McConfig {
    /// dt = 2^-6 ... 2^-12, 200 paths.
    pub fn standard(seed: u64, horizon: f64) -> McConfig {
        McConfig {
            dts: (6..=12).map(|k| 2f64.powi(-k)).collect(),
            paths: MIN_PATHS,
            seed,
            horizon,
            t0: 0.0,
            x0: None,
            clip: Domains::new(),
        }
    }

    /// (level, coarsening factor as a power of two) sorted from coarse to fine.
    fn levels(&self) -> Result<(f64, usize, Vec<(f64, u32)>), McError> {
        if self.dts.len() < MIN_LEVELS || self.paths < MIN_PATHS {
            return Err(McError::TooSmall {
                levels: self.dts.len(),
                paths: self.paths,
                min_levels: MIN_LEVELS,
                min_paths: MIN_PATHS,
            });
        }
        let finest = self.dts.iter().copied().fold(f64::INFINITY, f64::min);
        let mut out = Vec::new();
        for &dt in &self.dts {
            let r = (dt / finest).log2().round();
            if !(dt > 0.0) || (finest * 2f64.powf(r) - dt).abs() > 1e-12 * dt {
                return Err(McError::BadLevels(dt));
            }
            out.push((dt, r as u32));
        }
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out.dedup_by(|a, b| a.1 == b.1);
        let steps = (self.horizon / finest).round();
        let coarsest = out[0].1;
        if steps < 1.0 || (steps * finest - self.horizon).abs() > 1e-9 * self.horizon || steps as usize % (1usize << coarsest) != 0 {
            return Err(McError::BadHorizon { horizon: self.horizon, dt: out[0].0 });
        }
        Ok((finest, steps as usize, out))
    }

    fn start(&self, space_states: &[String]) -> Vec<f64> {
        match &self.x0 {
            Some(x) => x.clone(),
            None => space_states.iter().map(|s| self.clip.get(s).midpoint()).collect(),
        }
    }
}

/// Mean discrepancy at one step size.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelStat {
    pub dt: f64,
    pub mean_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Coarse to fine.
    pub levels: Vec<LevelStat>,
    /// Least-squares slope of log(mean discrepancy) against log(dt); absent when every
    /// discrepancy is exactly zero.
    pub slope: Option<f64>,
    pub monotone: bool,
    pub exact_zero: bool,
    pub paths: usize,
    pub excluded: usize,
    pub passed: bool,
}

/// Neumaier-compensated sum, in the given order.
fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn fit_slope(levels: &[LevelStat]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        levels.iter().filter(|l| l.mean_discrepancy > 0.0).map(|l| (l.dt.ln(), l.mean_discrepancy.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Slope band for Euler–Maruyama strong order one half.
pub const SLOPE_BAND: (f64, f64) = (0.3, 0.7);
/// Largest tolerated fraction of excluded paths.
pub const MAX_EXCLUDED: f64 = 0.1;

/// Per-path discrepancies by level, or `None` if the path was excluded at any level.
type PathOutcome = Option<Vec<f64>>;

fn aggregate(outcomes: &[PathOutcome], levels: &[(f64, u32)], paths: usize) -> (Vec<LevelStat>, usize) {
    let kept: Vec<&Vec<f64>> = outcomes.iter().flatten().collect();
    let excluded = paths - kept.len();
    let stats = levels
        .iter()
        .enumerate()
        .map(|(l, (dt, _))| {
            let mean = if kept.is_empty() {
                f64::NAN
            } else {
                compensated_sum(kept.iter().map(|d| d[l])) / kept.len() as f64
            };
            LevelStat { dt: *dt, mean_discrepancy: mean }
        })
        .collect();
    (stats, excluded)
}

fn increments_by_level(fine: WienerIncrements, levels: &[(f64, u32)]) -> Vec<WienerIncrements> {
    // levels run coarse to fine; build fine to coarse by repeated pairing.
    let max = levels.iter().map(|l| l.1).max().unwrap_or(0);
    let mut ladder = vec![fine];
    for _ in 0..max {
        let next = ladder.last().unwrap().coarsen();
        ladder.push(next);
    }
    levels.iter().map(|(_, r)| ladder[*r as usize].clone()).collect()
}

/// Simulate `sde` and `transform_ito(sde, ch)` with the same noise, map the first
/// through the forward map and report the pathwise discrepancy per step size.
pub fn change_consistency_test(sde: &ItoSde, ch: &CoordinateChange, cfg: &McConfig) -> Result<ConvergenceReport, McError> {
    let (finest, steps, levels) = cfg.levels()?;
    let target = transform_ito(sde, ch)?;
    let space = sde.space();
    let n = space.n();
    let mut slots: Vec<String> = space.states().to_vec();
    slots.push(space.time().to_string());
    let forward: Vec<Compiled> = ch.forward().iter().map(|e| Compiled::new(e, &slots)).collect::<Result<_, _>>()?;
    let map = |x: &[f64], t: f64| -> Vec<f64> {
        let mut v = x.to_vec();
        v.push(t);
        forward.iter().map(|f| f.eval(&v).unwrap_or(f64::NAN)).collect()
    };
    let x0 = cfg.start(space.states());
    if x0.len() != n {
        return Err(McError::BadInitialState { got: x0.len(), want: n });
    }
    let y0 = map(&x0, cfg.t0);
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(McError::BadStart);
    }
    let original = CompiledSde::new(sde, Some(&cfg.clip))?;
    let transformed = CompiledSde::new(&target, None)?;
    let outcomes: Vec<PathOutcome> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|p| {
            let fine = generate_wiener(space.m(), finest, steps, cfg.seed, p);
            let mut out = Vec::with_capacity(levels.len());
            for noise in increments_by_level(fine, &levels) {
                let a = original.run(&x0, cfg.t0, &noise);
                let b = transformed.run(&y0, cfg.t0, &noise);
                if a.status != PathStatus::Complete || b.status != PathStatus::Complete {
                    return None;
                }
                let mut worst = 0.0f64;
                for (j, (xa, xb)) in a.x.iter().zip(&b.x).enumerate() {
                    let mapped = map(xa, cfg.t0 + j as f64 * noise.dt);
                    for (u, v) in mapped.iter().zip(xb) {
                        let d = (u - v).abs();
                        if !d.is_finite() {
                            return None;
                        }
                        worst = worst.max(d);
                    }
                }
                out.push(worst);
            }
            Some(out)
        })
        .collect();
    let (stats, excluded) = aggregate(&outcomes, &levels, cfg.paths);
    Ok(judge_convergence(stats, cfg.paths, excluded))
}

fn judge_convergence(levels: Vec<LevelStat>, paths: usize, excluded: usize) -> ConvergenceReport {
    let exact_zero = levels.iter().all(|l| l.mean_discrepancy == 0.0);
    let monotone = levels.windows(2).all(|w| w[1].mean_discrepancy < w[0].mean_discrepancy);
    let slope = fit_slope(&levels);
    let excluded_ok = (excluded as f64) <= MAX_EXCLUDED * paths as f64;
    let passed = excluded_ok
        && (exact_zero || (monotone && slope.is_some_and(|s| (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&s))));
    ConvergenceReport { levels, slope, monotone, exact_zero, paths, excluded, passed }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowReport {
    pub epsilon: f64,
    pub convergence: ConvergenceReport,
    /// Mean discrepancy at the finest step.
    pub finest_discrepancy: f64,
    /// 10 ε².
    pub threshold: f64,
    pub passed: bool,
}

/// Treat x ↦ x + εφ(x, t, w) as a change of coordinates that should map solutions of
/// `sde` to solutions of the same equation: simulate from x0 and from x0 + εφ(x0) with
/// shared noise and compare the displaced first path with the second. Passes when the
/// mean discrepancy at the finest step is at most 10 ε².
pub fn flow_invariance_test(
    sde: &ItoSde,
    x: &VectorField,
    epsilon: f64,
    cfg: &McConfig,
) -> Result<FlowReport, McError> {
    let (finest, steps, levels) = cfg.levels()?;
    let space = sde.space();
    let (n, m) = (space.n(), space.m());
    let mut slots: Vec<String> = space.states().to_vec();
    slots.push(space.time().to_string());
    slots.extend(space.wiener().iter().cloned());
    let phi: Vec<Compiled> = x.phi().iter().map(|e| Compiled::new(e, &slots)).collect::<Result<_, _>>()?;
    let shift = |state: &[f64], t: f64, w: &[f64]| -> Vec<f64> {
        let mut v = state.to_vec();
        v.push(t);
        v.extend_from_slice(w);
        state.iter().zip(&phi).map(|(s, p)| s + epsilon * p.eval(&v).unwrap_or(f64::NAN)).collect()
    };
    let x0 = cfg.start(space.states());
    if x0.len() != n {
        return Err(McError::BadInitialState { got: x0.len(), want: n });
    }
    let x1 = shift(&x0, cfg.t0, &vec![0.0; m]);
    if x1.iter().any(|v| !v.is_finite()) {
        return Err(McError::BadStart);
    }
    let compiled = CompiledSde::new(sde, Some(&cfg.clip))?;
    let outcomes: Vec<PathOutcome> = (0..cfg.paths as u64)
        .into_par_iter()
        .map(|p| {
            let fine = generate_wiener(m, finest, steps, cfg.seed, p);
            let mut out = Vec::with_capacity(levels.len());
            for noise in increments_by_level(fine, &levels) {
                let a = compiled.run(&x0, cfg.t0, &noise);
                let b = compiled.run(&x1, cfg.t0, &noise);
                if a.status != PathStatus::Complete || b.status != PathStatus::Complete {
                    return None;
                }
                let w = noise.cumulative();
                let mut worst = 0.0f64;
                for (j, (xa, xb)) in a.x.iter().zip(&b.x).enumerate() {
                    let moved = shift(xa, cfg.t0 + j as f64 * noise.dt, &w[j]);
                    for (u, v) in moved.iter().zip(xb) {
                        let d = (u - v).abs();
                        if !d.is_finite() {
                            return None;
                        }
                        worst = worst.max(d);
                    }
                }
                out.push(worst);
            }
            Some(out)
        })
        .collect();
    let (stats, excluded) = aggregate(&outcomes, &levels, cfg.paths);
    let finest_discrepancy = stats.last().map(|l| l.mean_discrepancy).unwrap_or(f64::NAN);
    let threshold = 10.0 * epsilon * epsilon;
    let convergence = judge_convergence(stats, cfg.paths, excluded);
    let excluded_ok = (excluded as f64) <= MAX_EXCLUDED * cfg.paths as f64;
    let passed = excluded_ok && finest_discrepancy <= threshold;
    Ok(FlowReport { epsilon, convergence, finest_discrepancy, threshold, passed })
}

/// Terminal values of `sde` started at `x0`, one per path, for law checks.
pub fn terminal_values(sde: &ItoSde, x0: &[f64], t0: f64, dt: f64, steps: usize, paths: usize, seed: u64) -> Result<Vec<Vec<f64>>, McError> {
    let compiled = CompiledSde::new(sde, None)?;
    let m = sde.space().m();
    Ok((0..paths as u64)
        .into_par_iter()
        .map(|p| {
            let path = compiled.run(x0, t0, &generate_wiener(m, dt, steps, seed, p));
            path.x.last().cloned().unwrap_or_default()
        })
        .collect())
}

/// Sample mean and variance (n − 1 denominator) with compensated sums.
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    let var = compensated_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    (mean, var)
}
