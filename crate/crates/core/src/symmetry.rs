//! Determining equations for simple Lie-point symmetries, the one-form
//! (Lie-derivative) check, the Σ operator and the time-component condition.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{differentiate, is_zero, simplify, Expr, VarSpace, ZeroConfig, ZeroTestError, ZeroVerdict};
use crate::sde::{ito_laplacian, rho, AnySde, Calculus, ItoSde, ItoStratBridge, Sde, StratSde};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// φ = φ(x, t)
    Deterministic,
    /// φ = φ(x, t, w)
    Random,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("vector field has {got} components but there are {want} state variables")]
    FieldLength { got: usize, want: usize },
    #[error("deterministic field component {index} depends on Wiener variable `{var}`")]
    RandomComponent { index: usize, var: String },
    #[error("field component {index} references unknown variable `{var}`")]
    UnknownVariable { index: usize, var: String },
    #[error("the SDE and the vector field are declared over different variables")]
    SpaceMismatch,
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
    #[error("noise condition {label} does not hold, so the identity is not claimed: {verdict:?}")]
    ConstraintNotSatisfied { label: String, verdict: ZeroVerdict },
}

/// Simple symmetry generator X = φ^i ∂/∂x^i.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    space: VarSpace,
    phi: Vec<Expr>,
    kind: FieldKind,
}

impl VectorField {
    pub fn new(space: VarSpace, phi: Vec<Expr>, kind: FieldKind) -> Result<Self, SymmetryError> {
        if phi.len() != space.n() {
            return Err(SymmetryError::FieldLength { got: phi.len(), want: space.n() });
        }
        let phi: Vec<Expr> = phi.iter().map(simplify).collect();
        for (index, p) in phi.iter().enumerate() {
            for var in p.free_vars() {
                if !space.contains(&var) {
                    return Err(SymmetryError::UnknownVariable { index, var });
                }
                if kind == FieldKind::Deterministic && space.wiener().contains(&var) {
                    return Err(SymmetryError::RandomComponent { index, var });
                }
            }
        }
        Ok(VectorField { space, phi, kind })
    }

    pub fn deterministic(space: VarSpace, phi: Vec<Expr>) -> Result<Self, SymmetryError> {
        VectorField::new(space, phi, FieldKind::Deterministic)
    }

    pub fn random(space: VarSpace, phi: Vec<Expr>) -> Result<Self, SymmetryError> {
        VectorField::new(space, phi, FieldKind::Random)
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn phi(&self) -> &[Expr] {
        &self.phi
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Same components, other kind (fails for Wiener-dependent components made deterministic).
    pub fn with_kind(&self, kind: FieldKind) -> Result<Self, SymmetryError> {
        VectorField::new(self.space.clone(), self.phi.clone(), kind)
    }
}

/// Residuals of the n drift and n·m noise determining equations.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub calculus: Calculus,
    pub drift_residuals: Vec<Expr>,
    pub noise_residuals: Vec<Vec<Expr>>,
}

impl DeterminingSystem {
    /// n + n·m.
    pub fn count(&self) -> usize {
        self.drift_residuals.len() + self.noise_residuals.iter().map(Vec::len).sum::<usize>()
    }

    /// Labelled residuals, drift first.
    pub fn residuals(&self) -> Vec<(String, &Expr)> {
        let mut out: Vec<(String, &Expr)> =
            self.drift_residuals.iter().enumerate().map(|(i, e)| (format!("drift[{i}]"), e)).collect();
        for (i, row) in self.noise_residuals.iter().enumerate() {
            for (k, e) in row.iter().enumerate() {
                out.push((format!("noise[{i}][{k}]"), e));
            }
        }
        out
    }
}

fn check_spaces(sde: &dyn Sde, x: &VectorField) -> Result<(), SymmetryError> {
    if sde.space() != x.space() {
        return Err(SymmetryError::SpaceMismatch);
    }
    Ok(())
}

/// Σ_j v^j ∂_j e
fn along(v: &[Expr], e: &Expr, space: &VarSpace) -> Expr {
    let terms = space
        .states()
        .iter()
        .zip(v)
        .filter(|(_, c)| !c.is_zero_literal())
        .map(|(xj, c)| Expr::mul(vec![c.clone(), differentiate(e, xj)]))
        .collect();
    Expr::add(terms)
}

/// ∂̂_kφ^i + σ^j_k∂_jφ^i − φ^j∂_jσ^i_k
fn noise_residuals(sde: &dyn Sde, phi: &[Expr]) -> Vec<Vec<Expr>> {
    let space = sde.space();
    let noise = sde.noise();
    (0..space.n())
        .map(|i| {
            space
                .wiener()
                .iter()
                .enumerate()
                .map(|(k, wk)| {
                    let col: Vec<Expr> = noise.iter().map(|r| r[k].clone()).collect();
                    simplify(&Expr::add(vec![
                        differentiate(&phi[i], wk),
                        along(&col, &phi[i], space),
                        Expr::neg(along(phi, &noise[i][k], space)),
                    ]))
                })
                .collect()
        })
        .collect()
}

/// ∂_tφ^i + f^j∂_jφ^i − φ^j∂_jf^i, the first-order part shared by both calculi.
fn transport(sde: &dyn Sde, phi: &[Expr], i: usize) -> Expr {
    let space = sde.space();
    Expr::add(vec![
        differentiate(&phi[i], space.time()),
        along(sde.drift(), &phi[i], space),
        Expr::neg(along(phi, &sde.drift()[i], space)),
    ])
}

/// Drift residuals ∂_tφ + f^j∂_jφ − φ^j∂_jf + ½Δφ and the noise residuals.
pub fn determining_system_ito(sde: &ItoSde, x: &VectorField) -> Result<DeterminingSystem, SymmetryError> {
    check_spaces(sde, x)?;
    let phi = x.phi();
    let drift_residuals = (0..sde.space().n())
        .map(|i| {
            let half_lap = Expr::mul(vec![Expr::ratio(1, 2), ito_laplacian(&phi[i], sde)]);
            simplify(&Expr::add(vec![transport(sde, phi, i), half_lap]))
        })
        .collect();
    Ok(DeterminingSystem { calculus: Calculus::Ito, drift_residuals, noise_residuals: noise_residuals(sde, phi) })
}

/// Drift residuals ∂_tφ + b^j∂_jφ − φ^j∂_jb and the noise residuals.
pub fn determining_system_strat(sde: &StratSde, x: &VectorField) -> Result<DeterminingSystem, SymmetryError> {
    check_spaces(sde, x)?;
    let phi = x.phi();
    let drift_residuals = (0..sde.space().n()).map(|i| simplify(&transport(sde, phi, i))).collect();
    Ok(DeterminingSystem {
        calculus: Calculus::Stratonovich,
        drift_residuals,
        noise_residuals: noise_residuals(sde, phi),
    })
}

pub fn determining_system(sde: &AnySde, x: &VectorField) -> Result<DeterminingSystem, SymmetryError> {
    match sde {
        AnySde::Ito(s) => determining_system_ito(s, x),
        AnySde::Strat(s) => determining_system_strat(s, x),
    }
}

/// Coefficients of dt and each ∘dw^k in L_X(ω^i) restricted to ω = 0, where
/// ω^i = dx^i − b^i dt − σ^i_k ∘dw^k on coordinates (t, x, w).
///
/// Uses L_X ω = d(ι_X ω) + ι_X dω componentwise:
/// (L_X ω)_A = ∂_A(X^B a_B) + X^B (∂_B a_A − ∂_A a_B).
pub fn lie_derivative_residuals(sde: &StratSde, x: &VectorField) -> Result<DeterminingSystem, SymmetryError> {
    check_spaces(sde, x)?;
    let space = sde.space();
    let (n, m) = (space.n(), space.m());
    let mut coords: Vec<String> = vec![space.time().to_string()];
    coords.extend(space.states().iter().cloned());
    coords.extend(space.wiener().iter().cloned());
    // X^A: no time or Wiener components for a simple field.
    let mut field = vec![Expr::zero(); coords.len()];
    for j in 0..n {
        field[1 + j] = x.phi()[j].clone();
    }
    let mut drift_residuals = Vec::with_capacity(n);
    let mut noise = Vec::with_capacity(n);
    for i in 0..n {
        let mut form = vec![Expr::zero(); coords.len()];
        form[0] = Expr::neg(sde.drift()[i].clone());
        form[1 + i] = Expr::one();
        for k in 0..m {
            form[1 + n + k] = Expr::neg(sde.noise()[i][k].clone());
        }
        let contraction =
            simplify(&Expr::add(field.iter().zip(&form).map(|(a, b)| Expr::mul(vec![a.clone(), b.clone()])).collect()));
        let lie: Vec<Expr> = coords
            .iter()
            .enumerate()
            .map(|(a, za)| {
                let mut terms = vec![differentiate(&contraction, za)];
                for (b, zb) in coords.iter().enumerate() {
                    if field[b].is_zero_literal() {
                        continue;
                    }
                    let curl = Expr::sub(differentiate(&form[a], zb), differentiate(&form[b], za));
                    terms.push(Expr::mul(vec![field[b].clone(), curl]));
                }
                simplify(&Expr::add(terms))
            })
            .collect();
        // Restrict to ω = 0: dx^j = b^j dt + σ^j_k ∘dw^k.
        let dt = (0..n).map(|j| Expr::mul(vec![lie[1 + j].clone(), sde.drift()[j].clone()]));
        drift_residuals.push(simplify(&Expr::add(std::iter::once(lie[0].clone()).chain(dt).collect())));
        noise.push(
            (0..m)
                .map(|k| {
                    let dx = (0..n).map(|j| Expr::mul(vec![lie[1 + j].clone(), sde.noise()[j][k].clone()]));
                    simplify(&Expr::add(std::iter::once(lie[1 + n + k].clone()).chain(dx).collect()))
                })
                .collect(),
        );
    }
    Ok(DeterminingSystem { calculus: Calculus::Stratonovich, drift_residuals, noise_residuals: noise })
}

/// Σ(φ)^i = 2[φ^j∂_jρ^i − ρ^j∂_jφ^i].
pub fn sigma_operator(x: &VectorField, bridge: &ItoStratBridge) -> Vec<Expr> {
    let space = x.space();
    let phi = x.phi();
    (0..space.n())
        .map(|i| {
            let inner = Expr::sub(along(phi, &bridge.rho[i], space), along(&bridge.rho, &phi[i], space));
            simplify(&Expr::mul(vec![Expr::int(2), inner]))
        })
        .collect()
}

/// Verdict of one residual; `Err` when the zero test could not gather enough samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualCheck {
    pub label: String,
    pub expr: Expr,
    pub outcome: Result<ZeroVerdict, ZeroTestError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Symmetry,
    NotSymmetry,
    /// Some residual could not be sampled and none was found nonzero.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub calculus: Calculus,
    pub residuals: Vec<ResidualCheck>,
    pub overall: Overall,
}

impl SymmetryReport {
    pub fn is_symmetry(&self) -> bool {
        self.overall == Overall::Symmetry
    }

    /// "symbolic" when every residual simplified to 0, "numeric" otherwise.
    pub fn method(&self) -> &'static str {
        if self.residuals.iter().all(|r| matches!(r.outcome, Ok(ZeroVerdict::SymbolicZero))) {
            "symbolic"
        } else {
            "numeric"
        }
    }

    /// First residual with a nonzero verdict.
    pub fn first_failure(&self) -> Option<&ResidualCheck> {
        self.residuals.iter().find(|r| matches!(r.outcome, Ok(ZeroVerdict::NonZero { .. })))
    }
}

/// Zero-test every residual, recording sampling failures instead of returning them.
pub fn assess(system: &DeterminingSystem, cfg: &ZeroConfig) -> SymmetryReport {
    let residuals: Vec<ResidualCheck> = system
        .residuals()
        .into_par_iter()
        .map(|(label, e)| ResidualCheck { label, expr: e.clone(), outcome: is_zero(e, cfg) })
        .collect();
    let overall = if residuals.iter().any(|r| matches!(r.outcome, Ok(ZeroVerdict::NonZero { .. }))) {
        Overall::NotSymmetry
    } else if residuals.iter().all(|r| r.outcome.is_ok()) {
        Overall::Symmetry
    } else {
        Overall::Inconclusive
    };
    SymmetryReport { calculus: system.calculus, residuals, overall }
}

/// Build the determining system for either calculus and zero-test it.
pub fn check_symmetry(sde: &AnySde, x: &VectorField, cfg: &ZeroConfig) -> Result<SymmetryReport, SymmetryError> {
    let report = assess(&determining_system(sde, x)?, cfg);
    if let Some(err) = report.residuals.iter().find_map(|r| r.outcome.clone().err()) {
        return Err(err.into());
    }
    Ok(report)
}

/// Δφ^i − Σ(φ)^i on the set where the noise conditions hold.
///
/// Every Wiener derivative of φ inside Δ is replaced using
/// ∂̂_kφ^i = R^i_k := φ^p∂_pσ^i_k − σ^p_k∂_pφ^i and, differentiating that relation,
/// ∂̂_k R^i_k = R^p_k∂_pσ^i_k − σ^p_k∂_pR^i_k.
pub fn unal_difference(sde: &ItoSde, x: &VectorField) -> Result<Vec<Expr>, SymmetryError> {
    check_spaces(sde, x)?;
    let space = sde.space();
    let (n, m) = (space.n(), space.m());
    let phi = x.phi();
    let noise = sde.noise();
    let column = |k: usize| -> Vec<Expr> { noise.iter().map(|r| r[k].clone()).collect() };
    let r: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|k| simplify(&Expr::sub(along(phi, &noise[i][k], space), along(&column(k), &phi[i], space))))
                .collect()
        })
        .collect();
    let sigma = sigma_operator(x, &rho(sde));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut terms = Vec::new();
        for k in 0..m {
            let col = column(k);
            let rk: Vec<Expr> = (0..n).map(|p| r[p][k].clone()).collect();
            // ∂̂_k∂̂_k φ^i
            terms.push(along(&rk, &noise[i][k], space));
            terms.push(Expr::neg(along(&col, &r[i][k], space)));
            // σσ∂∂φ
            for (j, xj) in space.states().iter().enumerate() {
                let dj = differentiate(&phi[i], xj);
                for (l, xl) in space.states().iter().enumerate() {
                    terms.push(Expr::mul(vec![noise[j][k].clone(), noise[l][k].clone(), differentiate(&dj, xl)]));
                }
            }
            // 2σ∂∂̂φ
            terms.push(Expr::mul(vec![Expr::int(2), along(&col, &r[i][k], space)]));
        }
        terms.push(Expr::neg(sigma[i].clone()));
        out.push(simplify(&Expr::add(terms)));
    }
    Ok(out)
}

/// Checks Δφ = Σφ for a field satisfying the noise conditions; errors if it does not.
pub fn verify_unal_identity(sde: &ItoSde, x: &VectorField, cfg: &ZeroConfig) -> Result<ZeroVerdict, SymmetryError> {
    check_spaces(sde, x)?;
    for (i, row) in noise_residuals(sde, x.phi()).iter().enumerate() {
        for (k, e) in row.iter().enumerate() {
            let verdict = is_zero(e, cfg)?;
            if !verdict.is_zero() {
                return Err(SymmetryError::ConstraintNotSatisfied { label: format!("noise[{i}][{k}]"), verdict });
            }
        }
    }
    let mut verdict = ZeroVerdict::SymbolicZero;
    for d in unal_difference(sde, x)? {
        verdict = verdict.and(is_zero(&d, cfg)?);
    }
    Ok(verdict)
}

/// Candidate time component τ(x, t, w) of a non-simple generator.
#[derive(Clone, Debug, PartialEq)]
pub struct TauCandidate {
    pub tau: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauCheck {
    /// One expression per state index.
    pub expressions: Vec<Expr>,
    pub verdict: ZeroVerdict,
}

/// σ^k_p σ^i_p ∂_k(∂_tτ + f^j∂_jτ + ½σ^m_qσ^j_q∂_m∂_jτ) for each i.
pub fn check_tau_condition(sde: &ItoSde, tau: &TauCandidate, cfg: &ZeroConfig) -> Result<TauCheck, SymmetryError> {
    let space = sde.space();
    let noise = sde.noise();
    let states = space.states();
    let tau = simplify(&tau.tau);
    let mut inner = vec![differentiate(&tau, space.time()), along(sde.drift(), &tau, space)];
    for q in 0..space.m() {
        for (mi, xm) in states.iter().enumerate() {
            let dm = differentiate(&tau, xm);
            for (j, xj) in states.iter().enumerate() {
                inner.push(Expr::mul(vec![
                    Expr::ratio(1, 2),
                    noise[mi][q].clone(),
                    noise[j][q].clone(),
                    differentiate(&dm, xj),
                ]));
            }
        }
    }
    let g = simplify(&Expr::add(inner));
    let mut expressions = Vec::with_capacity(space.n());
    let mut verdict = ZeroVerdict::SymbolicZero;
    for i in 0..space.n() {
        let mut terms = Vec::new();
        for (k, xk) in states.iter().enumerate() {
            let dg = differentiate(&g, xk);
            for p in 0..space.m() {
                terms.push(Expr::mul(vec![noise[k][p].clone(), noise[i][p].clone(), dg.clone()]));
            }
        }
        let e = simplify(&Expr::add(terms));
        verdict = verdict.and(is_zero(&e, cfg)?);
        expressions.push(e);
    }
    Ok(TauCheck { expressions, verdict })
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

    fn ito(x: &str, f: &str, s: &str) -> ItoSde {
        let space = sp(x);
        ItoSde::new(space.clone(), vec![e(f, &space)], vec![vec![e(s, &space)]]).unwrap()
    }

    fn strat(x: &str, b: &str, s: &str) -> StratSde {
        let space = sp(x);
        StratSde::new(space.clone(), vec![e(b, &space)], vec![vec![e(s, &space)]]).unwrap()
    }

    fn field(x: &str, phi: &str, kind: FieldKind) -> VectorField {
        let space = sp(x);
        VectorField::new(space.clone(), vec![e(phi, &space)], kind).unwrap()
    }

    #[test]
    fn example_one_residuals() {
        let sde = ito("y", "exp(-y) - 1/2*exp(-2*y)", "exp(-y)");
        let x = field("y", "exp(-y)", FieldKind::Deterministic);
        let sys = determining_system_ito(&sde, &x).unwrap();
        assert_eq!(sys.count(), 2);
        assert_eq!(sys.drift_residuals, vec![Expr::zero()]);
        assert_eq!(sys.noise_residuals, vec![vec![Expr::zero()]]);
        // the two halves of the drift residual
        let space = sp("y");
        let f = &sde.drift()[0];
        let phi = &x.phi()[0];
        let first_order = simplify(&Expr::sub(
            Expr::mul(vec![f.clone(), differentiate(phi, "y")]),
            Expr::mul(vec![phi.clone(), differentiate(f, "y")]),
        ));
        assert_eq!(first_order, e("-1/2*exp(-3*y)", &space));
    }

    #[test]
    fn random_field_smoke() {
        let sde = ito("x", "0", "1");
        let x = field("x", "x - w", FieldKind::Random);
        let sys = determining_system_ito(&sde, &x).unwrap();
        assert_eq!(sys.drift_residuals, vec![Expr::zero()]);
        assert_eq!(sys.noise_residuals, vec![vec![Expr::zero()]]);
        assert!(VectorField::deterministic(sp("x"), vec![e("x - w", &sp("x"))]).is_err());
    }

    #[test]
    fn strat_paths_agree() {
        let cases = [("y", "exp(-y)", "exp(-y)", "exp(-y)"), ("x", "x", "1", "x"), ("x", "0", "2", "3")];
        for (v, b, s, phi) in cases {
            let sde = strat(v, b, s);
            let x = field(v, phi, FieldKind::Deterministic);
            assert_eq!(determining_system_strat(&sde, &x).unwrap(), lie_derivative_residuals(&sde, &x).unwrap());
        }
        let sys = lie_derivative_residuals(&strat("x", "x", "1"), &field("x", "x", FieldKind::Deterministic)).unwrap();
        assert_eq!(sys.drift_residuals, vec![Expr::zero()]);
        assert_eq!(sys.noise_residuals, vec![vec![Expr::one()]]);
    }

    #[test]
    fn check_reports() {
        let cfg = ZeroConfig::default();
        let ex1 = AnySde::Ito(ito("y", "exp(-y) - 1/2*exp(-2*y)", "exp(-y)"));
        let r = check_symmetry(&ex1, &field("y", "exp(-y)", FieldKind::Deterministic), &cfg).unwrap();
        assert!(r.is_symmetry());
        assert_eq!(r.method(), "symbolic");

        let ex2 = AnySde::Ito(ito(
            "y",
            "exp(-t)*(1+y^2)^2/(8*y^3) * (-4*y^2 + exp(t)*(3*y^4 + 2*y^2 - 1))",
            "-(1+y^2)^2/(2*y)",
        ));
        let r = check_symmetry(&ex2, &field("y", "-(1+y^2)^2/(2*y)", FieldKind::Deterministic), &cfg).unwrap();
        assert!(r.is_symmetry(), "{r:?}");

        let bm = AnySde::Ito(ito("x", "0", "1"));
        let r = check_symmetry(&bm, &field("x", "x", FieldKind::Deterministic), &cfg).unwrap();
        assert_eq!(r.overall, Overall::NotSymmetry);
        let fail = r.first_failure().unwrap();
        assert_eq!(fail.label, "noise[0][0]");
        assert!(matches!(fail.outcome, Ok(ZeroVerdict::NonZero { value, .. }) if value == -1.0 || value == 1.0));
    }

    #[test]
    fn sigma_and_unal() {
        let cfg = ZeroConfig::default();
        let space = sp("x");
        let sde = ito("x", "0", "x^2");
        let x = field("x", "x^2", FieldKind::Deterministic);
        assert_eq!(sigma_operator(&x, &rho(&sde)), vec![e("2*x^4", &space)]);
        assert_eq!(ito_laplacian(&x.phi()[0], &sde), e("2*x^4", &space));
        assert_eq!(verify_unal_identity(&sde, &x, &cfg).unwrap(), ZeroVerdict::SymbolicZero);

        let lin = ito("x", "0", "x");
        let xl = field("x", "x", FieldKind::Deterministic);
        assert_eq!(sigma_operator(&xl, &rho(&lin)), vec![Expr::zero()]);
        assert!(verify_unal_identity(&lin, &xl, &cfg).unwrap().is_zero());

        let bm = ito("x", "0", "1");
        assert!(verify_unal_identity(&bm, &field("x", "x - w", FieldKind::Random), &cfg).unwrap().is_zero());
        assert!(matches!(
            verify_unal_identity(&bm, &field("x", "x", FieldKind::Deterministic), &cfg),
            Err(SymmetryError::ConstraintNotSatisfied { .. })
        ));
    }

    #[test]
    fn ito_and_strat_drift_residuals_match_on_constraint_set() {
        let sde = ito("y", "exp(-y) - 1/2*exp(-2*y)", "exp(-y)");
        let x = field("y", "exp(-y)", FieldKind::Deterministic);
        let a = determining_system_ito(&sde, &x).unwrap();
        let b = determining_system_strat(&ito_to_stratonovich(&sde), &x).unwrap();
        assert_eq!(a.drift_residuals, b.drift_residuals);
    }

    #[test]
    fn tau_condition() {
        let cfg = ZeroConfig::default();
        let space = sp("x");
        let sde = ito("x", "x", "1");
        let t2 = TauCandidate { tau: e("t^2", &space) };
        assert_eq!(check_tau_condition(&sde, &t2, &cfg).unwrap().verdict, ZeroVerdict::SymbolicZero);
        let zero = TauCandidate { tau: Expr::zero() };
        assert_eq!(check_tau_condition(&sde, &zero, &cfg).unwrap().verdict, ZeroVerdict::SymbolicZero);
        let tx = check_tau_condition(&sde, &TauCandidate { tau: e("x", &space) }, &cfg).unwrap();
        assert_eq!(tx.expressions, vec![Expr::one()]);
        assert!(!tx.verdict.is_zero());
    }
}
