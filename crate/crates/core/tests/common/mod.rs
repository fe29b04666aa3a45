//! Seeded random corpora shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stochsym::expr::{parse, simplify, Expr, VarSpace};
use stochsym::sde::{ItoSde, StratSde};
use stochsym::symmetry::{FieldKind, VectorField};

pub fn e(text: &str, space: &VarSpace) -> Expr {
    simplify(&parse(text, space).unwrap_or_else(|err| panic!("{text}: {err}")))
}

fn coef(rng: &mut ChaCha8Rng) -> String {
    let num = rng.random_range(1..=7) * if rng.random_bool(0.3) { -1 } else { 1 };
    let den = rng.random_range(1..=4);
    format!("({num}/{den})")
}

/// Smooth on (0.3, 2) in every state and in t, w.
const STATE_ATOMS: &[&str] = &[
    "{v}", "{v}^2", "exp(-{v})", "exp({v}/2)", "1 + {v}^2", "sqrt({v})", "1/{v}", "log({v})", "sin({v})",
    "{v}*t", "exp(-t)*{v}", "cos(t)*{v}^2", "{v}^3",
];
const TIME_ATOMS: &[&str] = &["1", "t", "exp(-t)", "1 + t^2", "cos(t)"];
const WIENER_ATOMS: &[&str] = &["{w}", "{w}*{v}", "exp({w})*{v}", "{w}^2", "sin({w})*{v}^2"];

fn atom(rng: &mut ChaCha8Rng, vars: &[String]) -> String {
    if rng.random_bool(0.2) {
        return TIME_ATOMS[rng.random_range(0..TIME_ATOMS.len())].to_string();
    }
    let v = &vars[rng.random_range(0..vars.len())];
    STATE_ATOMS[rng.random_range(0..STATE_ATOMS.len())].replace("{v}", v)
}

fn combo(rng: &mut ChaCha8Rng, vars: &[String], terms: usize) -> String {
    (0..terms).map(|_| format!("{}*({})", coef(rng), atom(rng, vars))).collect::<Vec<_>>().join(" + ")
}

fn space_for(rng: &mut ChaCha8Rng) -> VarSpace {
    match rng.random_range(0..4) {
        0 => VarSpace::new(&["x", "y"], "t", &["w1", "w2"]).unwrap(),
        1 => VarSpace::new(&["x", "y"], "t", &["w"]).unwrap(),
        _ => VarSpace::new(&["x"], "t", &["w"]).unwrap(),
    }
}

/// A random SDE as text; every fifth instance has constant noise.
pub struct RawSde {
    pub space: VarSpace,
    pub drift: Vec<Expr>,
    pub noise: Vec<Vec<Expr>>,
    pub constant_noise: bool,
}

fn raw_sde(rng: &mut ChaCha8Rng, index: usize) -> RawSde {
    let space = space_for(rng);
    let vars = space.states().to_vec();
    let constant_noise = index % 5 == 0;
    let drift = (0..space.n()).map(|_| e(&combo(rng, &vars, 2), &space)).collect();
    let noise = (0..space.n())
        .map(|_| {
            (0..space.m())
                .map(|_| {
                    if constant_noise {
                        e(&coef(rng), &space)
                    } else if rng.random_bool(0.2) {
                        Expr::zero()
                    } else {
                        let terms = rng.random_range(1..=2);
                        e(&combo(rng, &vars, terms), &space)
                    }
                })
                .collect()
        })
        .collect();
    RawSde { space, drift, noise, constant_noise }
}

pub fn ito_corpus(seed: u64, count: usize) -> Vec<(ItoSde, bool)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let r = raw_sde(&mut rng, i);
            (ItoSde::new(r.space, r.drift, r.noise).unwrap(), r.constant_noise)
        })
        .collect()
}

pub fn random_field(rng: &mut ChaCha8Rng, space: &VarSpace, kind: FieldKind) -> VectorField {
    let vars = space.states().to_vec();
    let phi = (0..space.n())
        .map(|_| {
            let mut text = combo(rng, &vars, 2);
            if kind == FieldKind::Random {
                let w = &space.wiener()[rng.random_range(0..space.m())];
                let v = &vars[rng.random_range(0..vars.len())];
                let a = WIENER_ATOMS[rng.random_range(0..WIENER_ATOMS.len())].replace("{w}", w).replace("{v}", v);
                text = format!("{text} + {}*({a})", coef(rng));
            }
            e(&text, space)
        })
        .collect();
    VectorField::new(space.clone(), phi, kind).unwrap()
}

/// Stratonovich equations with fields, alternating deterministic and random kinds.
pub fn strat_pairs(seed: u64, count: usize) -> Vec<(StratSde, VectorField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let r = raw_sde(&mut rng, i);
            let kind = if i % 2 == 0 { FieldKind::Deterministic } else { FieldKind::Random };
            let x = random_field(&mut rng, &r.space, kind);
            (StratSde::new(r.space, r.drift, r.noise).unwrap(), x)
        })
        .collect()
}

/// (σ, ∫ dx/σ) pairs with closed-form primitives.
const NOISE_WITH_PRIMITIVE: &[(&str, &str)] = &[
    ("{v}", "log({v})"),
    ("{v}^2", "-1/{v}"),
    ("exp({v})", "-exp(-{v})"),
    ("sqrt({v})", "2*sqrt({v})"),
    ("1", "{v}"),
    ("1 + {v}", "log(1 + {v})"),
];
const PROFILES: &[&str] = &["{z}", "{z}^2", "exp({z})", "1", "1 + {z}^2"];

/// Pairs whose noise conditions hold by construction: diagonal noise σ^i_i(x^i) and
/// φ^i = σ^i_i h_i(w^i − S_i(x^i)) with S_i' = 1/σ^i_i.
pub fn noise_compatible_pairs(seed: u64, count: usize) -> Vec<(ItoSde, VectorField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let space = if i % 3 == 2 {
                VarSpace::new(&["x", "y"], "t", &["w1", "w2"]).unwrap()
            } else {
                VarSpace::new(&["x"], "t", &["w"]).unwrap()
            };
            let vars = space.states().to_vec();
            let n = space.n();
            let mut noise = vec![vec![Expr::zero(); n]; n];
            let mut phi = Vec::new();
            let random = i % 2 == 1;
            for (k, v) in vars.iter().enumerate() {
                let (s, prim) = NOISE_WITH_PRIMITIVE[rng.random_range(0..NOISE_WITH_PRIMITIVE.len())];
                let c = coef(&mut rng);
                let sigma = format!("{c}*({})", s.replace("{v}", v));
                let z = format!("({} - ({})/{c})", space.wiener()[k], prim.replace("{v}", v));
                let h = if random { PROFILES[rng.random_range(0..PROFILES.len())].replace("{z}", &z) } else { "1".into() };
                noise[k][k] = e(&sigma, &space);
                phi.push(e(&format!("{}*({sigma})*({h})", coef(&mut rng)), &space));
            }
            let drift = (0..n).map(|_| e(&combo(&mut rng, &vars, 2), &space)).collect();
            let kind = if random { FieldKind::Random } else { FieldKind::Deterministic };
            (ItoSde::new(space.clone(), drift, noise).unwrap(), VectorField::new(space, phi, kind).unwrap())
        })
        .collect()
}

/// Reduced equations du = f̂(t) dt + σ̂(t) dw.
pub fn reduced_bases(seed: u64, count: usize) -> Vec<ItoSde> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = VarSpace::new(&["u"], "t", &["w"]).unwrap();
    (0..count)
        .map(|_| {
            let f = format!("{}*({})", coef(&mut rng), TIME_ATOMS[rng.random_range(0..TIME_ATOMS.len())]);
            let s = format!("{}*({})", coef(&mut rng), TIME_ATOMS[rng.random_range(0..TIME_ATOMS.len())]);
            ItoSde::new(space.clone(), vec![e(&f, &space)], vec![vec![e(&s, &space)]]).unwrap()
        })
        .collect()
}
