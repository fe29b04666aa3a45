//! Simple changes of coordinates x̃ = F(x, t) and their action on SDEs and fields.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{
    differentiate, numeric_zero, simplify, substitute, Domains, Expr, Func, Interval, Node, Number, SpaceError, VarSpace,
    ZeroConfig, ZeroTestError, ZeroVerdict,
};
use crate::sde::{ItoSde, Sde, SdeError, StratSde};
use crate::symmetry::{check_symmetry, SymmetryError, SymmetryReport, VectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransformError {
    #[error("expected {want} map components, got {got}")]
    Length { got: usize, want: usize },
    #[error("{which} map component {index} references `{var}`, which is not allowed there")]
    ForeignVariable { which: &'static str, index: usize, var: String },
    #[error("{which} composition is not the identity: {verdict:?}")]
    NotInverse { which: &'static str, verdict: ZeroVerdict },
    #[error("old-chart variable `{var}` survives elimination in {entry}")]
    Elimination { entry: String, var: String },
    #[error("the change is declared over different variables than its input")]
    SpaceMismatch,
    #[error("the image of the validity domain is degenerate or not finite")]
    BadDomain,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Sde(#[from] SdeError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

/// Forward map x̃^i(x, t), inverse x^i(x̃, t) and the old-chart validity domain.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateChange {
    space: VarSpace,
    new_states: Vec<String>,
    forward: Vec<Expr>,
    inverse: Vec<Expr>,
    domain: Domains,
}

const IMAGE_SAMPLES: usize = 2048;

impl CoordinateChange {
    /// Validates variable usage and both composition identities on the domain.
    pub fn new(
        space: VarSpace,
        new_states: Vec<String>,
        forward: Vec<Expr>,
        inverse: Vec<Expr>,
        domain: Domains,
        cfg: &ZeroConfig,
    ) -> Result<Self, TransformError> {
        let ch = CoordinateChange::unchecked(space, new_states, forward, inverse, domain)?;
        ch.verify(cfg)?;
        Ok(ch)
    }

    /// Validates variable usage only.
    pub fn unchecked(
        space: VarSpace,
        new_states: Vec<String>,
        forward: Vec<Expr>,
        inverse: Vec<Expr>,
        domain: Domains,
    ) -> Result<Self, TransformError> {
        let n = space.n();
        for (len, _) in [(new_states.len(), ()), (forward.len(), ()), (inverse.len(), ())] {
            if len != n {
                return Err(TransformError::Length { got: len, want: n });
            }
        }
        let new_space = space.with_states(&new_states)?;
        let forward: Vec<Expr> = forward.iter().map(simplify).collect();
        let inverse: Vec<Expr> = inverse.iter().map(simplify).collect();
        let allowed = |e: &Expr, sp: &VarSpace, which: &'static str, index: usize| -> Result<(), TransformError> {
            for var in e.free_vars() {
                if !(sp.states().contains(&var) || sp.time() == var) {
                    return Err(TransformError::ForeignVariable { which, index, var });
                }
            }
            Ok(())
        };
        for (i, e) in forward.iter().enumerate() {
            allowed(e, &space, "forward", i)?;
        }
        for (i, e) in inverse.iter().enumerate() {
            allowed(e, &new_space, "inverse", i)?;
        }
        Ok(CoordinateChange { space, new_states, forward, inverse, domain })
    }

    pub fn identity(space: VarSpace, domain: Domains) -> Self {
        let ids: Vec<Expr> = space.states().iter().map(|s| Expr::var(s)).collect();
        CoordinateChange { new_states: space.states().to_vec(), forward: ids.clone(), inverse: ids, space, domain }
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn new_space(&self) -> VarSpace {
        self.space.with_states(&self.new_states).expect("validated at construction")
    }

    pub fn forward(&self) -> &[Expr] {
        &self.forward
    }

    pub fn inverse(&self) -> &[Expr] {
        &self.inverse
    }

    pub fn domain(&self) -> &Domains {
        &self.domain
    }

    pub fn is_identity(&self) -> bool {
        self.new_states == self.space.states()
            && self.forward.iter().zip(self.space.states()).all(|(f, s)| f.as_var() == Some(s))
    }

    fn old_to_new(&self) -> BTreeMap<String, Expr> {
        self.space.states().iter().cloned().zip(self.inverse.iter().cloned()).collect()
    }

    fn new_to_old(&self) -> BTreeMap<String, Expr> {
        self.new_states.iter().cloned().zip(self.forward.iter().cloned()).collect()
    }

    /// Box containing the image of the validity domain under the forward map,
    /// with the time interval carried over.
    pub fn new_domain(&self) -> Result<Domains, TransformError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a6e_5eed);
        let mut vars: Vec<String> = self.space.states().to_vec();
        vars.push(self.space.time().to_string());
        let n = self.space.n();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        let mut point = HashMap::new();
        for s in 0..IMAGE_SAMPLES {
            point.clear();
            for (j, v) in vars.iter().enumerate() {
                let iv = self.domain.get(v);
                // Include the corners of a one-dimensional domain exactly.
                let x = if n == 1 && j == 0 && s < 2 {
                    if s == 0 {
                        iv.lo
                    } else {
                        iv.hi
                    }
                } else if iv.width() > 0.0 {
                    rng.random_range(iv.lo..=iv.hi)
                } else {
                    iv.lo
                };
                point.insert(v.clone(), x);
            }
            for i in 0..n {
                if let Ok(y) = self.forward[i].eval_at(&point) {
                    if y.is_finite() {
                        lo[i] = lo[i].min(y);
                        hi[i] = hi[i].max(y);
                    }
                }
            }
        }
        let mut out = Domains::new();
        for i in 0..n {
            if !(lo[i].is_finite() && hi[i].is_finite() && hi[i] > lo[i]) {
                return Err(TransformError::BadDomain);
            }
            out.set(&self.new_states[i], Interval::new(lo[i], hi[i]));
        }
        out.set(self.space.time(), self.domain.get(self.space.time()));
        Ok(out)
    }

    /// Checks forward∘inverse on the image domain and inverse∘forward on the domain.
    pub fn verify(&self, cfg: &ZeroConfig) -> Result<(), TransformError> {
        let new_domain = self.new_domain()?;
        let o2n = self.old_to_new();
        let n2o = self.new_to_old();
        for i in 0..self.space.n() {
            // Raw composition: simplification assumes positive bases and would hide
            // a wrong branch of an even root.
            let fi = Expr::sub(self.forward[i].replace_vars(&o2n), Expr::var(&self.new_states[i]));
            let verdict = numeric_zero(&fi, &cfg.clone().with_domains(cfg.domains.merged(&new_domain)))?;
            if !verdict.is_zero() {
                return Err(TransformError::NotInverse { which: "forward after inverse", verdict });
            }
            let if_ = Expr::sub(self.inverse[i].replace_vars(&n2o), Expr::var(&self.space.states()[i]));
            let verdict = numeric_zero(&if_, &cfg.clone().with_domains(cfg.domains.merged(&self.domain)))?;
            if !verdict.is_zero() {
                return Err(TransformError::NotInverse { which: "inverse after forward", verdict });
            }
        }
        Ok(())
    }

    /// The reverse change, valid on the image domain.
    pub fn inverted(&self) -> Result<CoordinateChange, TransformError> {
        Ok(CoordinateChange {
            space: self.new_space(),
            new_states: self.space.states().to_vec(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            domain: self.new_domain()?,
        })
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CoordinateChange) -> Result<CoordinateChange, TransformError> {
        if next.space != self.new_space() {
            return Err(TransformError::SpaceMismatch);
        }
        let forward = next.forward.iter().map(|e| substitute(e, &self.new_to_old())).collect();
        let inverse = self.inverse.iter().map(|e| substitute(e, &next.old_to_new())).collect();
        CoordinateChange::unchecked(self.space.clone(), next.new_states.clone(), forward, inverse, self.domain.clone())
    }

    /// Rewrite an old-chart expression in new-chart variables.
    fn to_new_chart(&self, e: &Expr, entry: &str) -> Result<Expr, TransformError> {
        let out = substitute(e, &self.old_to_new());
        for var in out.free_vars() {
            if self.space.states().contains(&var) && !self.new_states.contains(&var) {
                return Err(TransformError::Elimination { entry: entry.to_string(), var });
            }
        }
        Ok(out)
    }

    /// ∂x̃^i/∂x^j
    fn jacobian(&self) -> Vec<Vec<Expr>> {
        self.forward.iter().map(|f| self.space.states().iter().map(|x| differentiate(f, x)).collect()).collect()
    }

    fn new_noise(&self, noise: &[Vec<Expr>], jac: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
        let m = self.space.m();
        jac.iter()
            .map(|row| {
                (0..m)
                    .map(|k| {
                        let terms = row.iter().zip(noise).map(|(d, s)| Expr::mul(vec![d.clone(), s[k].clone()])).collect();
                        simplify(&Expr::add(terms))
                    })
                    .collect()
            })
            .collect()
    }

    fn first_order_drift(&self, drift: &[Expr], jac: &[Vec<Expr>], i: usize) -> Vec<Expr> {
        let mut terms = vec![differentiate(&self.forward[i], self.space.time())];
        for (d, f) in jac[i].iter().zip(drift) {
            terms.push(Expr::mul(vec![d.clone(), f.clone()]));
        }
        terms
    }

    fn rewrite_all(&self, drift: Vec<Expr>, noise: Vec<Vec<Expr>>) -> Result<(Vec<Expr>, Vec<Vec<Expr>>), TransformError> {
        let drift = drift
            .iter()
            .enumerate()
            .map(|(i, e)| self.to_new_chart(e, &format!("drift[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let noise = noise
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(k, e)| self.to_new_chart(e, &format!("noise[{i}][{k}]")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((drift, noise))
    }
}

/// Ito formula: f̃ = ∂_t x̃ + ∂_j x̃ f^j + ½ ∂_j∂_k x̃ Σ_l σ^j_l σ^k_l, σ̃ = ∂_j x̃ σ^j_k.
pub fn transform_ito(sde: &ItoSde, ch: &CoordinateChange) -> Result<ItoSde, TransformError> {
    if sde.space() != ch.space() {
        return Err(TransformError::SpaceMismatch);
    }
    let states = ch.space.states();
    let jac = ch.jacobian();
    let noise = sde.noise();
    let mut drift = Vec::with_capacity(states.len());
    for i in 0..states.len() {
        let mut terms = ch.first_order_drift(sde.drift(), &jac, i);
        for j in 0..states.len() {
            for (k, xk) in states.iter().enumerate() {
                let d2 = differentiate(&jac[i][j], xk);
                if d2.is_zero_literal() {
                    continue;
                }
                let cov: Vec<Expr> =
                    (0..ch.space.m()).map(|l| Expr::mul(vec![noise[j][l].clone(), noise[k][l].clone()])).collect();
                terms.push(Expr::mul(vec![Expr::ratio(1, 2), d2, Expr::add(cov)]));
            }
        }
        drift.push(simplify(&Expr::add(terms)));
    }
    let (drift, noise) = ch.rewrite_all(drift, ch.new_noise(noise, &jac))?;
    Ok(ItoSde::new(ch.new_space(), drift, noise)?)
}

/// Chain rule: b̃ = ∂_t x̃ + ∂_j x̃ b^j, σ̃ = ∂_j x̃ σ^j_k.
pub fn transform_strat(sde: &StratSde, ch: &CoordinateChange) -> Result<StratSde, TransformError> {
    if sde.space() != ch.space() {
        return Err(TransformError::SpaceMismatch);
    }
    let jac = ch.jacobian();
    let drift = (0..ch.space.n()).map(|i| simplify(&Expr::add(ch.first_order_drift(sde.drift(), &jac, i)))).collect();
    let (drift, noise) = ch.rewrite_all(drift, ch.new_noise(sde.noise(), &jac))?;
    Ok(StratSde::new(ch.new_space(), drift, noise)?)
}

/// φ̃^i = ∂_j x̃^i φ^j in new-chart variables.
pub fn pushforward(x: &VectorField, ch: &CoordinateChange) -> Result<VectorField, TransformError> {
    if x.space() != ch.space() {
        return Err(TransformError::SpaceMismatch);
    }
    let jac = ch.jacobian();
    let phi = jac
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let terms = row.iter().zip(x.phi()).map(|(d, p)| Expr::mul(vec![d.clone(), p.clone()])).collect();
            ch.to_new_chart(&simplify(&Expr::add(terms)), &format!("phi[{i}]"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VectorField::new(ch.new_space(), phi, x.kind())?)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreservationError {
    #[error("the field is not a symmetry of the input equation")]
    Precondition(Box<SymmetryReport>),
    #[error("symmetry lost under the change of coordinates; this indicates a defect in the transformation code")]
    NotPreserved { before: Box<SymmetryReport>, after: Box<SymmetryReport> },
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

/// Checks X on `sde`, transforms both, and checks again in the new chart.
pub fn verify_symmetry_preserved(
    sde: &ItoSde,
    x: &VectorField,
    ch: &CoordinateChange,
    cfg: &ZeroConfig,
) -> Result<(SymmetryReport, SymmetryReport), PreservationError> {
    let old_cfg = cfg.clone().with_domains(cfg.domains.merged(ch.domain()));
    let before = check_symmetry(&sde.clone().into(), x, &old_cfg)?;
    if !before.is_symmetry() {
        return Err(PreservationError::Precondition(Box::new(before)));
    }
    let new_sde = transform_ito(sde, ch)?;
    let new_x = pushforward(x, ch)?;
    let new_cfg = cfg.clone().with_domains(cfg.domains.merged(&ch.new_domain()?));
    let after = check_symmetry(&new_sde.into(), &new_x, &new_cfg)?;
    if !after.is_symmetry() {
        return Err(PreservationError::NotPreserved { before: Box::new(before), after: Box::new(after) });
    }
    Ok((before, after))
}

/// Closed-form inverses of `f(old) = new` obtained by peeling invertible outer
/// operations; every branch of an even power is returned.
pub fn inverse_candidates(f: &Expr, old: &str, new: &str) -> Vec<Expr> {
    peel(&simplify(f), Expr::var(new), old).into_iter().map(|e| simplify(&e)).collect()
}

fn peel(f: &Expr, r: Expr, v: &str) -> Vec<Expr> {
    if f.as_var() == Some(v) {
        return vec![r];
    }
    match f.node() {
        Node::Add(ts) => {
            let (dep, rest): (Vec<&Expr>, Vec<&Expr>) = ts.iter().partition(|t| t.depends_on(v));
            if dep.len() != 1 {
                return vec![];
            }
            peel(dep[0], Expr::sub(r, Expr::add(rest.into_iter().cloned().collect())), v)
        }
        Node::Mul(fs) => {
            let (dep, rest): (Vec<&Expr>, Vec<&Expr>) = fs.iter().partition(|t| t.depends_on(v));
            if dep.len() != 1 {
                return vec![];
            }
            peel(dep[0], Expr::div(r, Expr::mul(rest.into_iter().cloned().collect())), v)
        }
        Node::Pow(b, x) if !x.depends_on(v) => {
            let root = Expr::pow(r, Expr::recip(x.clone()));
            let even = match x.as_number() {
                Some(Number::Rational(q)) => q.numer() % 2u8 == 0u8.into(),
                _ => false,
            };
            let mut out = peel(b, root.clone(), v);
            if even {
                out.extend(peel(b, Expr::neg(root), v));
            }
            out
        }
        Node::Pow(b, x) if !b.depends_on(v) => peel(x, Expr::div(Expr::log(r), Expr::log(b.clone())), v),
        Node::Neg(a) => peel(a, Expr::neg(r), v),
        Node::Func(Func::Exp, a) => peel(a, Expr::log(r), v),
        Node::Func(Func::Log, a) => peel(a, Expr::exp(r), v),
        Node::Func(Func::Sqrt, a) => peel(a, Expr::pow(r, Expr::int(2)), v),
        _ => vec![],
    }
}

/// Scalar change with forward `f(old, t)` whose inverse is found in closed form and
/// verified on `domain`; `None` when no candidate inverse verifies.
pub fn invert_scalar(
    space: &VarSpace,
    new: &str,
    forward: &Expr,
    domain: &Domains,
    cfg: &ZeroConfig,
) -> Option<CoordinateChange> {
    let old = &space.states()[0];
    inverse_candidates(forward, old, new).into_iter().find_map(|inv| {
        CoordinateChange::new(space.clone(), vec![new.to_string()], vec![forward.clone()], vec![inv], domain.clone(), cfg)
            .ok()
    })
}

/// Invertible maps y = ψ(u) used to disguise an integrable base equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    Identity,
    /// y = a u + b
    Affine,
    /// y = exp(a u + b)
    Exp,
    /// y = log(a u + b)
    Log,
    /// y = a (u + b)^2 on u + b > 0
    Square,
    /// y = (1/u − a)^(1/2), i.e. u = 1/(a + y^2)
    Mobius,
}

impl MapKind {
    pub const ALL: [MapKind; 6] =
        [MapKind::Identity, MapKind::Affine, MapKind::Exp, MapKind::Log, MapKind::Square, MapKind::Mobius];
}

/// A catalog entry with concrete rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrambleMap {
    pub kind: MapKind,
    pub a: Number,
    pub b: Number,
}

fn draw_ratio(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Number {
    Number::ratio(rng.random_range(lo..=hi), den)
}

impl ScrambleMap {
    /// Coefficients drawn from small rationals; `a` is never 0.
    pub fn random(kind: MapKind, seed: u64) -> ScrambleMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sign = if rng.random_bool(0.5) { 1 } else { -1 };
        let (a, b) = match kind {
            MapKind::Identity => (Number::one(), Number::zero()),
            MapKind::Affine | MapKind::Exp | MapKind::Log => {
                (draw_ratio(&mut rng, 2, 8, 4).mul(&Number::int(sign)), draw_ratio(&mut rng, -4, 4, 4))
            }
            MapKind::Square => (draw_ratio(&mut rng, 2, 8, 4), draw_ratio(&mut rng, 1, 4, 4)),
            MapKind::Mobius => (draw_ratio(&mut rng, 2, 8, 4), Number::zero()),
        };
        ScrambleMap { kind, a, b }
    }

    /// ψ(u)
    pub fn forward(&self, u: &str) -> Expr {
        let (a, b, u) = (Expr::num(self.a.clone()), Expr::num(self.b.clone()), Expr::var(u));
        let lin = Expr::add(vec![Expr::mul(vec![a.clone(), u.clone()]), b.clone()]);
        simplify(&match self.kind {
            MapKind::Identity => u,
            MapKind::Affine => lin,
            MapKind::Exp => Expr::exp(lin),
            MapKind::Log => Expr::log(lin),
            MapKind::Square => Expr::mul(vec![a, Expr::pow(Expr::add(vec![u, b]), Expr::int(2))]),
            MapKind::Mobius => Expr::pow(Expr::sub(Expr::recip(u), a), Expr::ratio(1, 2)),
        })
    }

    /// ψ⁻¹(y)
    pub fn inverse(&self, y: &str) -> Expr {
        let (a, b, y) = (Expr::num(self.a.clone()), Expr::num(self.b.clone()), Expr::var(y));
        simplify(&match self.kind {
            MapKind::Identity => y,
            MapKind::Affine => Expr::div(Expr::sub(y, b), a),
            MapKind::Exp => Expr::div(Expr::sub(Expr::log(y), b), a),
            MapKind::Log => Expr::div(Expr::sub(Expr::exp(y), b), a),
            MapKind::Square => Expr::sub(Expr::pow(Expr::div(y, a), Expr::ratio(1, 2)), b),
            MapKind::Mobius => Expr::recip(Expr::add(vec![a, Expr::pow(y, Expr::int(2))])),
        })
    }
}

/// Sampling interval of the disguised state.
pub const SCRAMBLED_DOMAIN: Interval = Interval::new(0.3, 2.0);

/// A disguised equation, the symmetry it admits by construction, and the change used.
#[derive(Clone, Debug, PartialEq)]
pub struct ScrambledInstance {
    pub sde: ItoSde,
    pub field: VectorField,
    pub change: CoordinateChange,
    pub map: ScrambleMap,
}

/// Disguise `dy = f̂(t) dt + σ̂(t) dw` under y ↦ ψ(y) drawn from the catalog.
///
/// The disguised state is named `y`, or `x` when the base state is already `y`; it
/// ranges over [`SCRAMBLED_DOMAIN`]. The returned field is the pushforward of ∂_u.
pub fn make_scrambled_instance(base: &ItoSde, kind: MapKind, seed: u64) -> Result<ScrambledInstance, TransformError> {
    scramble_with(base, &ScrambleMap::random(kind, seed))
}

pub fn scramble_with(base: &ItoSde, map: &ScrambleMap) -> Result<ScrambledInstance, TransformError> {
    let space = base.space();
    if space.n() != 1 {
        return Err(TransformError::Length { got: space.n(), want: 1 });
    }
    let u = &space.states()[0];
    for (entry, e) in [("drift", &base.drift()[0]), ("noise", &base.noise()[0][0])] {
        if e.depends_on(u) {
            return Err(TransformError::ForeignVariable { which: entry, index: 0, var: u.clone() });
        }
    }
    let y = if map.kind == MapKind::Identity {
        u.clone()
    } else if u == "y" {
        "x".to_string()
    } else {
        "y".to_string()
    };
    let inverse = map.inverse(&y);
    let mut base_domain = Domains::new();
    if map.kind != MapKind::Identity {
        // Base-chart domain: image of the disguised domain under ψ⁻¹.
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in 0..=256 {
            let yv = SCRAMBLED_DOMAIN.lo + SCRAMBLED_DOMAIN.width() * s as f64 / 256.0;
            let uv = inverse.eval_with(&[(y.as_str(), yv)]).map_err(|_| TransformError::BadDomain)?;
            if !uv.is_finite() {
                return Err(TransformError::BadDomain);
            }
            lo = lo.min(uv);
            hi = hi.max(uv);
        }
        base_domain.set(u, Interval::new(lo, hi));
    } else {
        base_domain.set(u, SCRAMBLED_DOMAIN);
    }
    let change = CoordinateChange::new(
        space.clone(),
        vec![y],
        vec![map.forward(u)],
        vec![inverse],
        base_domain,
        &ZeroConfig::default(),
    )?;
    let sde = transform_ito(base, &change)?;
    let unit = VectorField::deterministic(space.clone(), vec![Expr::one()])?;
    let field = pushforward(&unit, &change)?;
    Ok(ScrambledInstance { sde, field, change, map: map.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::sde::ito_to_stratonovich;

    fn sp(x: &str) -> VarSpace {
        VarSpace::new(&[x], "t", &["w"]).unwrap()
    }

    fn e(text: &str, space: &VarSpace) -> Expr {
        simplify(&parse(text, space).unwrap())
    }

    fn change(old: &str, new: &str, fwd: &str, inv: &str, lo: f64, hi: f64) -> CoordinateChange {
        CoordinateChange::new(
            sp(old),
            vec![new.into()],
            vec![e(fwd, &sp(old))],
            vec![e(inv, &sp(new))],
            Domains::new().with(old, lo, hi),
            &ZeroConfig::default(),
        )
        .unwrap()
    }

    fn ex1() -> ItoSde {
        let s = sp("y");
        ItoSde::new(s.clone(), vec![e("exp(-y) - 1/2*exp(-2*y)", &s)], vec![vec![e("exp(-y)", &s)]]).unwrap()
    }

    #[test]
    fn example_one_under_exp() {
        let ch = change("y", "x", "exp(y)", "log(x)", 0.3, 2.0);
        let out = transform_ito(&ex1(), &ch).unwrap();
        assert_eq!(out.drift(), &[Expr::one()]);
        assert_eq!(out.noise(), &[vec![Expr::one()]]);
        let strat = transform_strat(&ito_to_stratonovich(&ex1()), &ch).unwrap();
        assert_eq!(strat.drift(), &[Expr::one()]);
        let x = VectorField::deterministic(sp("y"), vec![e("exp(-y)", &sp("y"))]).unwrap();
        assert_eq!(pushforward(&x, &ch).unwrap().phi(), &[Expr::one()]);
    }

    #[test]
    fn square_map_on_brownian_motion() {
        let s = sp("x");
        let bm = ItoSde::new(s.clone(), vec![Expr::zero()], vec![vec![Expr::one()]]).unwrap();
        let ch = change("x", "z", "x^2", "sqrt(z)", 0.3, 2.0);
        let out = transform_ito(&bm, &ch).unwrap();
        let sz = sp("z");
        assert_eq!(out.drift(), &[Expr::one()]);
        assert_eq!(out.noise(), &[vec![e("2*sqrt(z)", &sz)]]);
    }

    #[test]
    fn rejects_wrong_inverse() {
        let r = CoordinateChange::new(
            sp("y"),
            vec!["x".into()],
            vec![e("exp(y)", &sp("y"))],
            vec![e("log(x) + 1", &sp("x"))],
            Domains::new(),
            &ZeroConfig::default(),
        );
        assert!(matches!(r, Err(TransformError::NotInverse { .. })));
    }

    #[test]
    fn identity_and_inversion() {
        let id = CoordinateChange::identity(sp("y"), Domains::new());
        assert_eq!(transform_ito(&ex1(), &id).unwrap(), ex1());
        let ch = change("y", "x", "exp(y)", "log(x)", 0.3, 2.0);
        let back = ch.inverted().unwrap();
        let x = VectorField::deterministic(sp("y"), vec![e("exp(-y)", &sp("y"))]).unwrap();
        assert_eq!(pushforward(&pushforward(&x, &ch).unwrap(), &back).unwrap(), x);
        assert_eq!(transform_ito(&transform_ito(&ex1(), &ch).unwrap(), &back).unwrap(), ex1());
    }

    #[test]
    fn closed_form_inverses() {
        let s = sp("y");
        let cfg = ZeroConfig::default();
        let dom = Domains::new().with("y", 0.3, 2.0);
        let ch = invert_scalar(&s, "x", &e("1/(1+y^2)", &s), &dom, &cfg).unwrap();
        assert_eq!(ch.inverse(), &[e("(1/x - 1)^(1/2)", &sp("x"))]);
        let ch = invert_scalar(&s, "x", &e("exp(y)", &s), &dom, &cfg).unwrap();
        assert_eq!(ch.inverse(), &[e("log(x)", &sp("x"))]);
        let neg = Domains::new().with("y", -2.0, -0.3);
        let ch = invert_scalar(&s, "x", &e("3*y^2", &s), &neg, &cfg).unwrap();
        assert_eq!(ch.inverse(), &[e("-(x/3)^(1/2)", &sp("x"))]);
        assert!(invert_scalar(&s, "x", &e("y*exp(y)", &s), &dom, &cfg).is_none());
    }

    #[test]
    fn scrambles_preserve_symmetry() {
        let s = sp("u");
        let base = ItoSde::new(s.clone(), vec![e("exp(-t)", &s)], vec![vec![e("1 + t/2", &s)]]).unwrap();
        let unit = VectorField::deterministic(s.clone(), vec![Expr::one()]).unwrap();
        for (i, kind) in MapKind::ALL.into_iter().enumerate() {
            let inst = make_scrambled_instance(&base, kind, 7 + i as u64).unwrap();
            verify_symmetry_preserved(&base, &unit, &inst.change, &ZeroConfig::default())
                .unwrap_or_else(|err| panic!("{kind:?}: {err}"));
        }
    }
}
