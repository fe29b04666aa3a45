//! Table-driven antiderivatives in one variable.
//!
//! Covered shapes (other variables act as parameters):
//! polynomials and Laurent monomials `v^n`; `exp(a v + b)` times a polynomial
//! (by parts); `sin`/`cos` of a linear argument; `(a + b v)^k`; `v (a + b v^2)^k`.
//! Every result is differentiated back and compared with the integrand before it is
//! returned; a candidate that fails the check is discarded.

use super::simplify::{add, factors_of, laurent_coeffs, mul, pow, split_coeff, terms_of};
use super::{differentiate, is_zero, simplify, Expr, Func, Node, Number, ZeroConfig};

/// Antiderivative of `e` with respect to `v` (constant of integration 0), or `None`
/// when no rule applies.
pub fn integrate_univariate(e: &Expr, v: &str) -> Option<Expr> {
    let e = simplify(e);
    let f = antiderivative(&e, v)?;
    let residual = simplify(&Expr::sub(differentiate(&f, v), e.clone()));
    if residual.is_zero_literal() {
        return Some(f);
    }
    match is_zero(&residual, &ZeroConfig::default()) {
        Ok(verdict) if verdict.is_zero() => Some(f),
        _ => None,
    }
}

fn antiderivative(e: &Expr, v: &str) -> Option<Expr> {
    if !e.depends_on(v) {
        return Some(mul(vec![e.clone(), Expr::var(v)]));
    }
    let terms = terms_of(e);
    if terms.len() > 1 {
        let parts: Option<Vec<Expr>> = terms.iter().map(|t| antiderivative(t, v)).collect();
        return Some(add(parts?));
    }
    let (c, m) = split_coeff(e);
    let m = m?;
    let mut constant = vec![Expr::num(c)];
    let mut dependent = Vec::new();
    for f in factors_of(&m) {
        if f.depends_on(v) {
            dependent.push(f);
        } else {
            constant.push(f);
        }
    }
    let core = integrate_factors(&dependent, v)?;
    constant.push(core);
    Some(mul(constant))
}

/// Exponent of `v` in a factor that is `v` or `v^n` with numeric `n`.
fn power_of_var(f: &Expr, v: &str) -> Option<Number> {
    match f.node() {
        Node::Var(name) if &**name == v => Some(Number::one()),
        Node::Pow(b, x) if b.as_var() == Some(v) => x.as_number().cloned(),
        _ => None,
    }
}

/// `(a, b)` with `arg = a*v + b`, `a` nonzero and free of `v`.
fn linear_parts(arg: &Expr, v: &str) -> Option<(Expr, Expr)> {
    let cs = laurent_coeffs(arg, v)?;
    if cs.keys().any(|k| *k != 0 && *k != 1) {
        return None;
    }
    let a = cs.get(&1)?.clone();
    let b = cs.get(&0).cloned().unwrap_or_else(Expr::zero);
    Some((a, b))
}

fn integrate_factors(fs: &[Expr], v: &str) -> Option<Expr> {
    match fs {
        [f] => integrate_single(f, v),
        [a, b] => integrate_pair(a, b, v).or_else(|| integrate_pair(b, a, v)),
        _ => None,
    }
}

fn integrate_single(f: &Expr, v: &str) -> Option<Expr> {
    if let Some(n) = power_of_var(f, v) {
        let var = Expr::var(v);
        if n == Number::int(-1) {
            return Some(Expr::log(var));
        }
        let n1 = n.add(&Number::one());
        return Some(mul(vec![Expr::num(n1.recip()?), pow(var, Expr::num(n1))]));
    }
    match f.node() {
        Node::Func(Func::Exp, arg) => {
            let (a, _) = linear_parts(arg, v)?;
            Some(mul(vec![f.clone(), pow(a, Expr::int(-1))]))
        }
        Node::Func(Func::Sin, arg) => {
            let (a, _) = linear_parts(arg, v)?;
            Some(mul(vec![Expr::int(-1), Expr::func(Func::Cos, arg.clone()), pow(a, Expr::int(-1))]))
        }
        Node::Func(Func::Cos, arg) => {
            let (a, _) = linear_parts(arg, v)?;
            Some(mul(vec![Expr::func(Func::Sin, arg.clone()), pow(a, Expr::int(-1))]))
        }
        Node::Pow(base, k) => {
            // (a + b v)^k
            let (b, _) = linear_parts(base, v)?;
            let k = k.as_number()?;
            integrate_power_of_inner(base, k, b)
        }
        _ => None,
    }
}

/// ∫ u^k du scaled by 1/scale, where du = scale dv.
fn integrate_power_of_inner(inner: &Expr, k: &Number, scale: Expr) -> Option<Expr> {
    let inv = pow(scale, Expr::int(-1));
    if *k == Number::int(-1) {
        return Some(mul(vec![Expr::log(inner.clone()), inv]));
    }
    let k1 = k.add(&Number::one());
    Some(mul(vec![Expr::num(k1.recip()?), pow(inner.clone(), Expr::num(k1)), inv]))
}

fn integrate_pair(a: &Expr, b: &Expr, v: &str) -> Option<Expr> {
    // v^n * exp(alpha v + beta), n a positive integer: by parts.
    if let (Some(n), Node::Func(Func::Exp, arg)) = (power_of_var(a, v), b.node()) {
        let n = n.as_i64().filter(|n| *n > 0)?;
        let (alpha, _) = linear_parts(arg, v)?;
        return Some(poly_times_exp(n, &alpha, b, v));
    }
    // v * (p + q v^2)^k
    if let (Some(n), Node::Pow(base, k)) = (power_of_var(a, v), b.node()) {
        if n != Number::one() {
            return None;
        }
        let k = k.as_number()?;
        let cs = laurent_coeffs(base, v)?;
        if cs.keys().all(|e| *e == 0 || *e == 2) {
            let q = cs.get(&2)?.clone();
            return integrate_power_of_inner(base, k, mul(vec![Expr::int(2), q]));
        }
        // An expanded power (p + q v^2)^d.
        let (inner, d) = binomial_root(&cs, v)?;
        let q = laurent_coeffs(&inner, v)?.get(&2)?.clone();
        return integrate_power_of_inner(&inner, &k.mul(&Number::int(d)), mul(vec![Expr::int(2), q]));
    }
    None
}

/// `(p + q v^2, d)` when the polynomial with coefficients `cs` equals `(p + q v^2)^d`
/// for numeric `p`, `q` and some d ≥ 2.
fn binomial_root(cs: &std::collections::BTreeMap<i64, Expr>, v: &str) -> Option<(Expr, i64)> {
    let top = *cs.keys().next_back()?;
    if *cs.keys().next()? != 0 || top % 2 != 0 || top < 4 {
        return None;
    }
    let d = top / 2;
    let root = |c: &Expr| -> Vec<Number> {
        let Some(n) = c.as_number() else { return vec![] };
        let Some(r) = n.pow(&Number::ratio(1, d)).or_else(|| {
            // odd roots of negative numbers
            (d % 2 == 1 && n.is_negative()).then(|| n.neg().pow(&Number::ratio(1, d)).map(|r| r.neg())).flatten()
        }) else {
            return vec![];
        };
        if d % 2 == 0 {
            vec![r.clone(), r.neg()]
        } else {
            vec![r]
        }
    };
    let target = add(cs.iter().map(|(k, c)| mul(vec![c.clone(), pow(Expr::var(v), Expr::int(*k))])).collect());
    for p in root(&cs[&0]) {
        for q in root(&cs[&top]) {
            let inner = add(vec![Expr::num(p.clone()), mul(vec![Expr::num(q), pow(Expr::var(v), Expr::int(2))])]);
            if pow(inner.clone(), Expr::int(d)) == target {
                return Some((inner, d));
            }
        }
    }
    None
}

/// ∫ v^n e dv with e = exp(alpha v + beta):
/// v^n e / alpha - (n / alpha) ∫ v^(n-1) e dv.
fn poly_times_exp(n: i64, alpha: &Expr, e: &Expr, v: &str) -> Expr {
    let inv = pow(alpha.clone(), Expr::int(-1));
    let mut terms = Vec::new();
    let mut coeff = Expr::one();
    let mut k = n;
    loop {
        terms.push(mul(vec![coeff.clone(), pow(Expr::var(v), Expr::int(k)), e.clone(), inv.clone()]));
        if k == 0 {
            break;
        }
        coeff = mul(vec![Expr::int(-k), coeff, inv.clone()]);
        k -= 1;
    }
    add(terms)
}
