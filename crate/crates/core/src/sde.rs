//! Ito and Stratonovich SDEs, the drift correction and the Ito Laplacian.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{differentiate, simplify, Expr, VarSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Calculus {
    Ito,
    Stratonovich,
}

impl Calculus {
    pub fn name(self) -> &'static str {
        match self {
            Calculus::Ito => "ito",
            Calculus::Stratonovich => "stratonovich",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SdeError {
    #[error("drift has {got} entries but there are {want} state variables")]
    DriftLength { got: usize, want: usize },
    #[error("noise matrix must be {rows}x{cols}; row {row} has {got} entries")]
    NoiseShape { rows: usize, cols: usize, row: usize, got: usize },
    #[error("noise matrix has {got} rows but there are {want} state variables")]
    NoiseRows { got: usize, want: usize },
    #[error("{entry} depends on Wiener variable `{var}`")]
    WienerDependence { entry: String, var: String },
    #[error("{entry} references `{var}`, which is not a state or time variable")]
    UnknownVariable { entry: String, var: String },
}

/// Drift vector and noise matrix over `(x, t)`, in canonical form.
#[derive(Clone, Debug, PartialEq)]
struct Coefficients {
    space: VarSpace,
    drift: Vec<Expr>,
    noise: Vec<Vec<Expr>>,
}

impl Coefficients {
    fn new(space: VarSpace, drift: Vec<Expr>, noise: Vec<Vec<Expr>>) -> Result<Self, SdeError> {
        let (n, m) = (space.n(), space.m());
        if drift.len() != n {
            return Err(SdeError::DriftLength { got: drift.len(), want: n });
        }
        if noise.len() != n {
            return Err(SdeError::NoiseRows { got: noise.len(), want: n });
        }
        for (i, row) in noise.iter().enumerate() {
            if row.len() != m {
                return Err(SdeError::NoiseShape { rows: n, cols: m, row: i, got: row.len() });
            }
        }
        let drift: Vec<Expr> = drift.iter().map(simplify).collect();
        let noise: Vec<Vec<Expr>> = noise.iter().map(|r| r.iter().map(simplify).collect()).collect();
        let entries = drift
            .iter()
            .enumerate()
            .map(|(i, e)| (format!("drift[{i}]"), e))
            .chain(noise.iter().enumerate().flat_map(|(i, r)| {
                r.iter().enumerate().map(move |(k, e)| (format!("noise[{i}][{k}]"), e))
            }));
        for (entry, e) in entries {
            for var in e.free_vars() {
                if space.wiener().contains(&var) {
                    return Err(SdeError::WienerDependence { entry, var });
                }
                if !space.states().contains(&var) && space.time() != var {
                    return Err(SdeError::UnknownVariable { entry, var });
                }
            }
        }
        Ok(Coefficients { space, drift, noise })
    }
}

/// Common read access to both SDE kinds.
pub trait Sde {
    fn space(&self) -> &VarSpace;
    fn drift(&self) -> &[Expr];
    fn noise(&self) -> &[Vec<Expr>];
    fn calculus(&self) -> Calculus;
}

macro_rules! sde_type {
    ($(#[$doc:meta])* $name:ident, $calc:expr) => {
        $(#[$doc])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name(Coefficients);

        impl $name {
            /// Validates dimensions and variable usage; entries are simplified.
            pub fn new(space: VarSpace, drift: Vec<Expr>, noise: Vec<Vec<Expr>>) -> Result<Self, SdeError> {
                Coefficients::new(space, drift, noise).map($name)
            }
        }

        impl Sde for $name {
            fn space(&self) -> &VarSpace {
                &self.0.space
            }
            fn drift(&self) -> &[Expr] {
                &self.0.drift
            }
            fn noise(&self) -> &[Vec<Expr>] {
                &self.0.noise
            }
            fn calculus(&self) -> Calculus {
                $calc
            }
        }
    };
}

sde_type!(
    /// `dx^i = f^i(x,t) dt + σ^i_k(x,t) dw^k`.
    ItoSde,
    Calculus::Ito
);
sde_type!(
    /// `dx^i = b^i(x,t) dt + σ^i_k(x,t) ∘ dw^k`.
    StratSde,
    Calculus::Stratonovich
);

/// Either kind, as read from a problem file.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySde {
    Ito(ItoSde),
    Strat(StratSde),
}

impl AnySde {
    pub fn new(calculus: Calculus, space: VarSpace, drift: Vec<Expr>, noise: Vec<Vec<Expr>>) -> Result<Self, SdeError> {
        Ok(match calculus {
            Calculus::Ito => AnySde::Ito(ItoSde::new(space, drift, noise)?),
            Calculus::Stratonovich => AnySde::Strat(StratSde::new(space, drift, noise)?),
        })
    }

    pub fn as_dyn(&self) -> &dyn Sde {
        match self {
            AnySde::Ito(s) => s,
            AnySde::Strat(s) => s,
        }
    }

    /// The Ito form, converting if necessary.
    pub fn to_ito(&self) -> ItoSde {
        match self {
            AnySde::Ito(s) => s.clone(),
            AnySde::Strat(s) => stratonovich_to_ito(s),
        }
    }

    pub fn to_strat(&self) -> StratSde {
        match self {
            AnySde::Ito(s) => ito_to_stratonovich(s),
            AnySde::Strat(s) => s.clone(),
        }
    }
}

impl From<ItoSde> for AnySde {
    fn from(s: ItoSde) -> Self {
        AnySde::Ito(s)
    }
}

impl From<StratSde> for AnySde {
    fn from(s: StratSde) -> Self {
        AnySde::Strat(s)
    }
}

/// The drift correction between the two calculi.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoStratBridge {
    pub rho: Vec<Expr>,
}

/// ρ^i = ½ Σ_{j,k} σ^j_k ∂_j σ^i_k.
pub fn rho(sde: &dyn Sde) -> ItoStratBridge {
    let space = sde.space();
    let noise = sde.noise();
    let rho = (0..space.n())
        .map(|i| {
            let mut terms = Vec::new();
            for k in 0..space.m() {
                for (j, xj) in space.states().iter().enumerate() {
                    let d = differentiate(&noise[i][k], xj);
                    if d.is_zero_literal() || noise[j][k].is_zero_literal() {
                        continue;
                    }
                    terms.push(Expr::mul(vec![noise[j][k].clone(), d]));
                }
            }
            simplify(&Expr::mul(vec![Expr::ratio(1, 2), Expr::add(terms)]))
        })
        .collect();
    ItoStratBridge { rho }
}

fn shift_drift(sde: &dyn Sde, sign: i64) -> (VarSpace, Vec<Expr>, Vec<Vec<Expr>>) {
    let bridge = rho(sde);
    let drift = sde
        .drift()
        .iter()
        .zip(&bridge.rho)
        .map(|(d, r)| simplify(&Expr::add(vec![d.clone(), Expr::mul(vec![Expr::int(sign), r.clone()])])))
        .collect();
    (sde.space().clone(), drift, sde.noise().to_vec())
}

/// b = f − ρ; noise copied.
pub fn ito_to_stratonovich(sde: &ItoSde) -> StratSde {
    let (space, drift, noise) = shift_drift(sde, -1);
    StratSde::new(space, drift, noise).expect("conversion preserves validity")
}

/// f = b + ρ; noise copied.
pub fn stratonovich_to_ito(sde: &StratSde) -> ItoSde {
    let (space, drift, noise) = shift_drift(sde, 1);
    ItoSde::new(space, drift, noise).expect("conversion preserves validity")
}

/// Ito Laplacian of a scalar `phi(x, t, w)`:
/// Σ_k [ ∂̂_k∂̂_k φ + Σ_{j,l} σ^j_k σ^l_k ∂_j∂_l φ + 2 Σ_j σ^j_k ∂_j∂̂_k φ ].
pub fn ito_laplacian(phi: &Expr, sde: &ItoSde) -> Expr {
    let space = sde.space();
    let noise = sde.noise();
    let states = space.states();
    let mut terms = Vec::new();
    for (k, wk) in space.wiener().iter().enumerate() {
        let dw = differentiate(phi, wk);
        terms.push(differentiate(&dw, wk));
        for (j, xj) in states.iter().enumerate() {
            if noise[j][k].is_zero_literal() {
                continue;
            }
            let dj = differentiate(phi, xj);
            for (l, xl) in states.iter().enumerate() {
                if noise[l][k].is_zero_literal() {
                    continue;
                }
                terms.push(Expr::mul(vec![noise[j][k].clone(), noise[l][k].clone(), differentiate(&dj, xl)]));
            }
            terms.push(Expr::mul(vec![Expr::int(2), noise[j][k].clone(), differentiate(&dw, xj)]));
        }
    }
    simplify(&Expr::add(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn space1(x: &str) -> VarSpace {
        VarSpace::new(&[x], "t", &["w"]).unwrap()
    }

    fn e(text: &str, space: &VarSpace) -> Expr {
        simplify(&parse(text, space).unwrap())
    }

    fn ito1(x: &str, f: &str, s: &str) -> ItoSde {
        let sp = space1(x);
        ItoSde::new(sp.clone(), vec![e(f, &sp)], vec![vec![e(s, &sp)]]).unwrap()
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&ito1("y", "0", "exp(-y)")).rho, vec![e("-1/2*exp(-2*y)", &space1("y"))]);
        assert_eq!(rho(&ito1("x", "x", "3")).rho, vec![Expr::zero()]);
        assert_eq!(rho(&ito1("x", "0", "x^2")).rho, vec![e("x^3", &space1("x"))]);
    }

    #[test]
    fn conversion_examples() {
        let sp = space1("y");
        let ex1 = ito1("y", "exp(-y) - 1/2*exp(-2*y)", "exp(-y)");
        let strat = ito_to_stratonovich(&ex1);
        assert_eq!(strat.drift(), &[e("exp(-y)", &sp)]);
        assert_eq!(strat.noise(), ex1.noise());
        assert_eq!(stratonovich_to_ito(&strat), ex1);

        let sx = space1("x");
        let s = ito_to_stratonovich(&ito1("x", "0", "x"));
        assert_eq!(s.drift(), &[e("-x/2", &sx)]);
        let back = stratonovich_to_ito(&StratSde::new(sx.clone(), vec![e("-x/2", &sx)], vec![vec![e("x", &sx)]]).unwrap());
        assert_eq!(back.drift(), &[Expr::zero()]);
    }

    #[test]
    fn laplacian_examples() {
        let sp = VarSpace::new(&["y"], "t", &["w"]).unwrap();
        let ex1 = ito1("y", "0", "exp(-y)");
        assert_eq!(ito_laplacian(&e("exp(-y)", &sp), &ex1), e("exp(-3*y)", &sp));
        assert_eq!(ito_laplacian(&e("w^2", &sp), &ex1), Expr::int(2));
        let sx = space1("x");
        assert_eq!(ito_laplacian(&e("x - w", &sx), &ito1("x", "0", "1")), Expr::zero());
    }

    #[test]
    fn validation() {
        let sp = space1("x");
        assert!(matches!(
            ItoSde::new(sp.clone(), vec![e("w", &sp)], vec![vec![Expr::one()]]),
            Err(SdeError::WienerDependence { .. })
        ));
        assert!(matches!(ItoSde::new(sp.clone(), vec![], vec![vec![Expr::one()]]), Err(SdeError::DriftLength { .. })));
        assert!(matches!(
            ItoSde::new(sp.clone(), vec![Expr::one()], vec![vec![Expr::one(), Expr::one()]]),
            Err(SdeError::NoiseShape { .. })
        ));
    }
}
