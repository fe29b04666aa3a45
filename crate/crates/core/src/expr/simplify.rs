//! Canonicalizing rewrite pass.
//!
//! Canonical trees satisfy:
//! - no `Neg` nodes; sums and products are flat;
//! - a sum holds at most one numeric term (first) and its monomials are distinct and sorted;
//! - a product holds at most one numeric coefficient (first, never 0 or 1 unless alone),
//!   at most one `exp` factor, and every other factor is `base` or `base^exponent`
//!   with pairwise distinct bases;
//! - positive integer powers of sums are expanded and products are distributed over sums;
//! - a sum raised to a negative or fractional power has its positive rational content
//!   pulled out, so `(2 + 2*y^2)^-1` becomes `1/2*(1 + y^2)^-1`.
//!
//! Sums whose terms share a denominator `(p)^-k` are combined over that denominator and
//! the numerator is divided by `p` exactly where possible; the combined form is kept only
//! when this cancels something.
//!
//! Power and logarithm laws (`(a^p)^q = a^(p q)`, `(a b)^q = a^q b^q`,
//! `log(a b) = log a + log b`) are applied as if every base were positive, matching the
//! positive default sampling domain.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use super::{Expr, Func, Node, Number};

const MAX_EXPANSION_TERMS: usize = 20_000;

/// Bring `e` into canonical form. Idempotent and evaluation-preserving on the
/// domain where every base of a fractional power is positive.
pub fn simplify(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Var(_) => e.clone(),
        Node::Neg(a) => mul(vec![Expr::int(-1), simplify(a)]),
        Node::Add(ts) => add(ts.iter().map(simplify).collect()),
        Node::Mul(fs) => mul(fs.iter().map(simplify).collect()),
        Node::Pow(b, x) => {
            let x = simplify(x);
            if x.as_number().is_some() {
                // Push numeric exponents through raw powers and products first, so
                // `1/(a*(1+y)^2)` keeps `(1+y)^-2` rather than inverting an expanded sum.
                match b.node() {
                    Node::Pow(b2, x2) => return simplify(&Expr::pow(b2.clone(), Expr::mul(vec![x2.clone(), x]))),
                    Node::Mul(fs) => return mul(fs.iter().map(|f| simplify(&Expr::pow(f.clone(), x.clone()))).collect()),
                    Node::Func(Func::Sqrt, a) => {
                        return simplify(&Expr::pow(a.clone(), Expr::mul(vec![Expr::ratio(1, 2), x])))
                    }
                    _ => {}
                }
            }
            pow(simplify(b), x)
        }
        Node::Func(f, a) => func(*f, simplify(a)),
    }
}

/// Split a canonical term into numeric coefficient and monomial (`None` for a pure number).
pub(crate) fn split_coeff(t: &Expr) -> (Number, Option<Expr>) {
    match t.node() {
        Node::Num(n) => (n.clone(), None),
        Node::Mul(fs) => match fs[0].node() {
            Node::Num(c) => {
                let rest = &fs[1..];
                let m = if rest.len() == 1 { rest[0].clone() } else { Expr::mul(rest.to_vec()) };
                (c.clone(), Some(m))
            }
            _ => (Number::one(), Some(t.clone())),
        },
        _ => (Number::one(), Some(t.clone())),
    }
}

fn make_term(c: Number, m: Option<Expr>) -> Expr {
    match m {
        None => Expr::num(c),
        Some(m) if c.is_one() => m,
        Some(m) => match m.node() {
            Node::Mul(fs) => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::num(c));
                v.extend(fs.iter().cloned());
                Expr::mul(v)
            }
            _ => Expr::mul(vec![Expr::num(c), m]),
        },
    }
}

/// Terms of a canonical expression viewed as a sum.
pub(crate) fn terms_of(e: &Expr) -> Vec<Expr> {
    match e.node() {
        Node::Add(ts) => ts.clone(),
        _ if e.is_zero_literal() => vec![],
        _ => vec![e.clone()],
    }
}

/// Factors of a canonical monomial (coefficient included if present).
pub(crate) fn factors_of(e: &Expr) -> Vec<Expr> {
    match e.node() {
        Node::Mul(fs) => fs.clone(),
        _ => vec![e.clone()],
    }
}

/// Flatten and collect like terms; no denominator handling.
fn add_collect(terms: Vec<Expr>) -> Vec<Expr> {
    let mut constant = Number::zero();
    let mut monos: BTreeMap<Expr, Number> = BTreeMap::new();
    let push = |t: &Expr, constant: &mut Number, monos: &mut BTreeMap<Expr, Number>| {
        let (c, m) = split_coeff(t);
        match m {
            None => *constant = constant.add(&c),
            Some(m) => {
                let slot = monos.entry(m).or_insert_with(Number::zero);
                *slot = slot.add(&c);
            }
        }
    };
    for t in &terms {
        match t.node() {
            Node::Add(inner) => {
                for i in inner {
                    push(i, &mut constant, &mut monos);
                }
            }
            _ => push(t, &mut constant, &mut monos),
        }
    }
    let mut out = Vec::with_capacity(monos.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::num(constant));
    }
    for (m, c) in monos {
        if !c.is_zero() {
            out.push(make_term(c, Some(m)));
        }
    }
    out
}

fn build_sum(mut terms: Vec<Expr>) -> Expr {
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::add(terms),
    }
}

/// Canonical sum of canonical terms.
pub(crate) fn add(terms: Vec<Expr>) -> Expr {
    let collected = add_collect(terms);
    if collected.len() < 2 {
        return build_sum(collected);
    }
    build_sum(cancel_denominators(collected))
}

/// Sum-bases appearing with negative integer exponents, with the largest such exponent.
fn sum_denominators(terms: &[Expr]) -> BTreeMap<Expr, i64> {
    let mut out = BTreeMap::new();
    for t in terms {
        for f in factors_of(t) {
            if let Node::Pow(b, x) = f.node() {
                if let (Node::Add(_), Some(k)) = (b.node(), x.as_number().and_then(|n| n.as_i64())) {
                    if k < 0 {
                        let slot = out.entry(b.clone()).or_insert(0);
                        *slot = (*slot).max(-k);
                    }
                }
            }
        }
    }
    out
}

fn cancel_denominators(mut terms: Vec<Expr>) -> Vec<Expr> {
    let dens = sum_denominators(&terms);
    for (base, k) in dens {
        // Earlier rounds may have removed this base already.
        let current = sum_denominators(&terms);
        let Some(&k_now) = current.get(&base) else { continue };
        let k = k.min(k_now);
        // Raw power so that `mul` merges exponents instead of expanding the sum.
        let scale = Expr::pow(base.clone(), Expr::int(k));
        let numer_terms: Vec<Expr> = terms.iter().map(|t| mul(vec![t.clone(), scale.clone()])).collect();
        let numer = build_sum(add_collect(numer_terms));
        if numer.is_zero_literal() {
            return vec![];
        }
        let mut left = k;
        let mut q = numer;
        while left > 0 {
            match exact_div(&q, &base) {
                Some(next) => {
                    q = next;
                    left -= 1;
                }
                None => break,
            }
        }
        if left == k {
            continue;
        }
        let rest = pow(base.clone(), Expr::int(-left));
        let new_terms: Vec<Expr> = terms_of(&q).into_iter().map(|t| mul(vec![t, rest.clone()])).collect();
        terms = add_collect(new_terms);
        if terms.is_empty() {
            return terms;
        }
    }
    terms
}

/// Coefficients of `e` as a Laurent polynomial in `v`, each coefficient free of `v`.
pub(crate) fn laurent_coeffs(e: &Expr, v: &str) -> Option<BTreeMap<i64, Expr>> {
    let mut acc: BTreeMap<i64, Vec<Expr>> = BTreeMap::new();
    for t in terms_of(e) {
        let mut deg = 0i64;
        let mut rest = Vec::new();
        for f in factors_of(&t) {
            match f.node() {
                Node::Var(name) if &**name == v => deg += 1,
                Node::Pow(b, x) if b.as_var() == Some(v) => {
                    deg += x.as_number()?.as_i64()?;
                }
                _ => {
                    if f.depends_on(v) {
                        return None;
                    }
                    rest.push(f);
                }
            }
        }
        acc.entry(deg).or_default().push(mul(rest));
    }
    let out: BTreeMap<i64, Expr> = acc
        .into_iter()
        .map(|(k, cs)| (k, add(cs)))
        .filter(|(_, c)| !c.is_zero_literal())
        .collect();
    Some(out)
}

fn monomial(c: Expr, v: &str, k: i64) -> Expr {
    mul(vec![c, pow(Expr::var(v), Expr::int(k))])
}

/// Exact division of canonical `n` by canonical sum `d`, if some variable of `d` makes
/// both polynomial with a numeric leading coefficient in `d` and zero remainder.
fn exact_div(n: &Expr, d: &Expr) -> Option<Expr> {
    for v in d.free_vars() {
        if let Some(q) = exact_div_in(n, d, &v) {
            return Some(q);
        }
    }
    None
}

fn exact_div_in(n: &Expr, d: &Expr, v: &str) -> Option<Expr> {
    let dc = laurent_coeffs(d, v)?;
    let (&dlo, _) = dc.iter().next()?;
    let (&dhi, lead) = dc.iter().next_back()?;
    let deg = dhi - dlo;
    if deg == 0 {
        return None;
    }
    let lead_inv = lead.as_number()?.recip()?;
    let nc = laurent_coeffs(n, v)?;
    if nc.is_empty() {
        return Some(Expr::zero());
    }
    let (&nlo, _) = nc.iter().next()?;
    let (&nhi, _) = nc.iter().next_back()?;
    if nhi - nlo > 256 {
        return None;
    }
    // Work with d0 = d / v^dlo (polynomial with nonzero constant term) and n as-is.
    let mut rem = nc;
    let mut quot: BTreeMap<i64, Expr> = BTreeMap::new();
    loop {
        let Some((&top, top_c)) = rem.iter().next_back() else { break };
        let low = *rem.keys().next().unwrap();
        if top - deg < low {
            return None;
        }
        let qk = top - dhi;
        let qc = mul(vec![top_c.clone(), Expr::num(lead_inv.clone())]);
        for (&dk, dcoef) in &dc {
            let k = qk + dk;
            let sub = mul(vec![Expr::int(-1), qc.clone(), dcoef.clone()]);
            let cur = rem.remove(&k).unwrap_or_else(Expr::zero);
            let next = add(vec![cur, sub]);
            if !next.is_zero_literal() {
                rem.insert(k, next);
            }
        }
        if rem.contains_key(&top) {
            // Leading term failed to cancel symbolically.
            return None;
        }
        quot.insert(qk, qc);
    }
    Some(add(quot.into_iter().map(|(k, c)| monomial(c, v, k)).collect()))
}

fn rational_content(terms: &[Expr]) -> Option<BigRational> {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for t in terms {
        let (c, _) = split_coeff(t);
        let r = c.as_rational()?;
        num_gcd = num_gcd.gcd(r.numer());
        den_lcm = den_lcm.lcm(r.denom());
    }
    if num_gcd.is_zero() {
        return None;
    }
    Some(BigRational::new(num_gcd, den_lcm))
}

/// Canonical product of canonical factors.
pub(crate) fn mul(factors: Vec<Expr>) -> Expr {
    let mut pending = factors;
    for _ in 0..16 {
        let mut coeff = Number::one();
        let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        let mut exp_args: Vec<Expr> = Vec::new();
        let mut stack = pending;
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Num(n) => coeff = coeff.mul(n),
                Node::Mul(inner) => stack.extend(inner.iter().cloned()),
                Node::Pow(b, x) => bases.entry(b.clone()).or_default().push(x.clone()),
                Node::Func(Func::Exp, a) => exp_args.push(a.clone()),
                _ => bases.entry(f.clone()).or_default().push(Expr::one()),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        let mut out: Vec<Expr> = Vec::new();
        let mut again = false;
        for (b, xs) in bases {
            let merged = xs.len() > 1;
            let x = if merged { add(xs) } else { xs.into_iter().next().unwrap() };
            let p = pow(b, x);
            match p.node() {
                Node::Num(n) => coeff = coeff.mul(n),
                Node::Mul(_) => {
                    out.push(p);
                    again = true;
                }
                Node::Func(Func::Exp, _) => {
                    out.push(p);
                    again = true;
                }
                _ => out.push(p),
            }
        }
        if exp_args.len() > 1 || exp_args.first().is_some_and(|a| !is_canonical_exp_arg(a)) {
            let e = func(Func::Exp, add(exp_args));
            match e.node() {
                Node::Num(n) => coeff = coeff.mul(n),
                Node::Func(Func::Exp, _) => out.push(e),
                _ => {
                    out.push(e);
                    again = true;
                }
            }
        } else if let Some(a) = exp_args.pop() {
            out.push(Expr::exp(a));
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if again {
            out.push(Expr::num(coeff));
            pending = out;
            continue;
        }
        // Distribute over the first sum factor.
        if let Some(pos) = out.iter().position(|f| matches!(f.node(), Node::Add(_))) {
            let sum = out.remove(pos);
            let Node::Add(ts) = sum.node() else { unreachable!() };
            let mut rest = out;
            rest.push(Expr::num(coeff));
            let total_terms = ts.len();
            if total_terms > MAX_EXPANSION_TERMS {
                rest.push(sum.clone());
                return finish_product(rest);
            }
            let parts: Vec<Expr> = ts
                .iter()
                .map(|t| {
                    let mut v = rest.clone();
                    v.push(t.clone());
                    mul(v)
                })
                .collect();
            return add(parts);
        }
        out.push(Expr::num(coeff));
        return finish_product(out);
    }
    finish_product(pending)
}

fn is_canonical_exp_arg(a: &Expr) -> bool {
    // Arguments produced by `func(Exp, ..)` never carry log terms or vanish.
    !a.is_zero_literal() && !has_log_term(a)
}

fn has_log_term(a: &Expr) -> bool {
    terms_of(a).iter().any(|t| {
        let (_, m) = split_coeff(t);
        matches!(m.as_ref().map(|m| m.node()), Some(Node::Func(Func::Log, _)))
    })
}

/// Assemble an already-merged factor list into a canonical product node.
fn finish_product(factors: Vec<Expr>) -> Expr {
    let mut coeff = Number::one();
    let mut rest = Vec::new();
    for f in factors {
        match f.node() {
            Node::Num(n) => coeff = coeff.mul(n),
            _ => rest.push(f),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    rest.sort_by(factor_order);
    if rest.is_empty() {
        return Expr::num(coeff);
    }
    if coeff.is_one() && rest.len() == 1 {
        return rest.pop().unwrap();
    }
    let mut v = Vec::with_capacity(rest.len() + 1);
    if !coeff.is_one() {
        v.push(Expr::num(coeff));
    }
    v.extend(rest);
    Expr::mul(v)
}

fn factor_base(f: &Expr) -> &Expr {
    match f.node() {
        Node::Pow(b, _) => b,
        _ => f,
    }
}

fn factor_order(a: &Expr, b: &Expr) -> std::cmp::Ordering {
    let ea = matches!(a.node(), Node::Func(Func::Exp, _));
    let eb = matches!(b.node(), Node::Func(Func::Exp, _));
    ea.cmp(&eb).then_with(|| factor_base(a).cmp(factor_base(b))).then_with(|| a.cmp(b))
}

/// Multiply two canonical sums term by term.
fn product_of_sums(a: &Expr, b: &Expr) -> Expr {
    let ta = terms_of(a);
    let tb = terms_of(b);
    let mut parts = Vec::with_capacity(ta.len() * tb.len());
    for x in &ta {
        for y in &tb {
            parts.push(mul(vec![x.clone(), y.clone()]));
        }
    }
    add(parts)
}

fn expand_power(sum: &Expr, k: u32) -> Expr {
    let mut acc = sum.clone();
    for _ in 1..k {
        if terms_of(&acc).len() * terms_of(sum).len() > MAX_EXPANSION_TERMS {
            return Expr::pow(sum.clone(), Expr::int(k as i64));
        }
        acc = product_of_sums(&acc, sum);
    }
    acc
}

/// Canonical power of canonical operands.
pub(crate) fn pow(base: Expr, exp: Expr) -> Expr {
    if exp.is_zero_literal() {
        return Expr::one();
    }
    if exp.is_one_literal() {
        return base;
    }
    if let (Some(b), Some(x)) = (base.as_number(), exp.as_number()) {
        if let Some(v) = b.pow(x) {
            return Expr::num(v);
        }
        if b.is_one() {
            return Expr::one();
        }
        if let Some(r) = prime_radicals(b, x) {
            return r;
        }
        return Expr::pow(base, exp);
    }
    if base.is_one_literal() {
        return Expr::one();
    }
    if base.is_zero_literal() {
        if exp.as_number().is_some_and(|n| n.is_positive()) {
            return Expr::zero();
        }
        return Expr::pow(base, exp);
    }
    match base.node() {
        Node::Pow(b2, x2) => pow(b2.clone(), mul(vec![x2.clone(), exp])),
        Node::Func(Func::Exp, a) => func(Func::Exp, mul(vec![a.clone(), exp])),
        Node::Func(Func::Sqrt, a) => pow(a.clone(), mul(vec![Expr::ratio(1, 2), exp])),
        Node::Mul(fs) => {
            let int_exp = exp.as_number().is_some_and(|n| n.is_integer());
            let coeff_ok = match fs[0].node() {
                Node::Num(c) => c.is_positive(),
                _ => true,
            };
            if int_exp || coeff_ok {
                mul(fs.iter().map(|f| pow(f.clone(), exp.clone())).collect())
            } else {
                Expr::pow(base, exp)
            }
        }
        Node::Add(ts) => {
            let Some(x) = exp.as_number() else { return Expr::pow(base, exp) };
            if let Some(k) = x.as_i64() {
                if k > 0 && k <= 64 {
                    return expand_power(&base, k as u32);
                }
            }
            // Pull out the common monomial, so that (y^-1 + y)^-1 becomes y*(1 + y^2)^-1.
            if let Some((mono, rest)) = monomial_content(ts) {
                return mul(vec![pow(mono, exp.clone()), pow(rest, exp)]);
            }
            // Pull out rational content (and the sign, for integer exponents).
            if let Some(mut content) = rational_content(ts) {
                let (first_c, _) = split_coeff(&ts[0]);
                if x.is_integer() && first_c.is_negative() {
                    content = -content;
                }
                if !content.is_one() {
                    let inv = Number::Rational(content.recip());
                    let scaled: Vec<Expr> = ts.iter().map(|t| mul(vec![t.clone(), Expr::num(inv.clone())])).collect();
                    let prim = add(scaled);
                    let c = pow(Expr::num(Number::Rational(content)), exp.clone());
                    return mul(vec![c, pow(prim, exp)]);
                }
            }
            Expr::pow(base, exp)
        }
        _ => Expr::pow(base, exp),
    }
}

/// Prime factorization by trial division; `None` past 10^12.
fn factorize(n: &BigInt) -> Option<Vec<(u64, i64)>> {
    let mut n = n.to_u64().filter(|&v| v > 0 && v <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    Some(out)
}

/// b^x for positive rational b and non-integer rational x, as a rational times prime
/// powers with exponents in (0, 1): 2^(-1/2) becomes 1/2*2^(1/2), 12^(1/2) becomes
/// 2*3^(1/2).
fn prime_radicals(b: &Number, x: &Number) -> Option<Expr> {
    let (Number::Rational(b), Number::Rational(x)) = (b, x) else { return None };
    if !b.is_positive() || x.is_integer() {
        return None;
    }
    let mut coeff = BigRational::one();
    let mut radicals = Vec::new();
    for (n, sign) in [(b.numer(), 1), (b.denom(), -1)] {
        for (p, e) in factorize(n)? {
            let total = x * BigRational::from_integer(BigInt::from(e * sign));
            let whole = total.floor();
            let frac = &total - &whole;
            let k = whole.to_integer().to_i32()?;
            let pb = BigRational::from_integer(BigInt::from(p));
            coeff *= if k >= 0 { num::pow(pb.clone(), k as usize) } else { num::pow(pb.recip(), (-k) as usize) };
            if !frac.is_zero() {
                radicals.push(Expr::pow(Expr::num(Number::int(p as i64)), Expr::num(Number::Rational(frac))));
            }
        }
    }
    if coeff.is_one() && radicals.len() == 1 {
        return radicals.pop();
    }
    radicals.push(Expr::num(Number::Rational(coeff)));
    Some(mul(radicals))
}

/// Variable powers shared by every term, with the smallest exponent each; returns the
/// monomial and the quotient sum, or `None` if there is no common factor.
fn monomial_content(ts: &[Expr]) -> Option<(Expr, Expr)> {
    let powers = |t: &Expr| -> BTreeMap<Expr, BigRational> {
        let mut out = BTreeMap::new();
        for f in factors_of(t) {
            match f.node() {
                Node::Var(_) => {
                    out.insert(f.clone(), BigRational::one());
                }
                Node::Pow(b, x) if matches!(b.node(), Node::Var(_)) => {
                    if let Some(Number::Rational(r)) = x.as_number() {
                        out.insert(b.clone(), r.clone());
                    }
                }
                _ => {}
            }
        }
        out
    };
    let mut common = powers(&ts[0]);
    for t in &ts[1..] {
        let p = powers(t);
        common.retain(|v, _| p.contains_key(v));
        for (v, e) in common.iter_mut() {
            if p[v] < *e {
                *e = p[v].clone();
            }
        }
    }
    common.retain(|_, e| !e.is_zero());
    if common.is_empty() {
        return None;
    }
    let mono = mul(common.iter().map(|(v, e)| pow(v.clone(), Expr::num(Number::Rational(e.clone())))).collect());
    let inv = mul(common.into_iter().map(|(v, e)| pow(v, Expr::num(Number::Rational(-e)))).collect());
    let rest = add(ts.iter().map(|t| mul(vec![t.clone(), inv.clone()])).collect());
    Some((mono, rest))
}

/// Canonical function application on a canonical argument.
pub(crate) fn func(f: Func, arg: Expr) -> Expr {
    if let Some(Number::Decimal(d)) = arg.as_number() {
        let v = match f {
            Func::Exp => d.exp(),
            Func::Log => d.ln(),
            Func::Sqrt => d.sqrt(),
            Func::Sin => d.sin(),
            Func::Cos => d.cos(),
        };
        if v.is_finite() {
            return Expr::num(Number::Decimal(v));
        }
        return Expr::func(f, arg);
    }
    match f {
        Func::Sqrt => pow(arg, Expr::ratio(1, 2)),
        Func::Exp => {
            if arg.is_zero_literal() {
                return Expr::one();
            }
            if let Node::Func(Func::Log, u) = arg.node() {
                return u.clone();
            }
            // exp(c*log(u) + rest) = u^c * exp(rest)
            let mut factors = Vec::new();
            let mut rest = Vec::new();
            for t in terms_of(&arg) {
                let (c, m) = split_coeff(&t);
                match m.as_ref().map(|m| m.node()) {
                    Some(Node::Func(Func::Log, u)) => factors.push(pow(u.clone(), Expr::num(c))),
                    _ => rest.push(t),
                }
            }
            if factors.is_empty() {
                return Expr::exp(arg);
            }
            let rest = add(rest);
            if !rest.is_zero_literal() {
                factors.push(Expr::exp(rest));
            }
            mul(factors)
        }
        Func::Log => match arg.node() {
            Node::Num(n) if n.is_one() => Expr::zero(),
            Node::Func(Func::Exp, u) => u.clone(),
            Node::Pow(b, x) if x.as_number().is_some() => mul(vec![x.clone(), func(Func::Log, b.clone())]),
            Node::Mul(fs) if !matches!(fs[0].node(), Node::Num(c) if c.is_negative()) => {
                add(fs.iter().map(|f| func(Func::Log, f.clone())).collect())
            }
            _ => Expr::log(arg),
        },
        Func::Sin => {
            if arg.is_zero_literal() {
                Expr::zero()
            } else {
                Expr::func(f, arg)
            }
        }
        Func::Cos => {
            if arg.is_zero_literal() {
                Expr::one()
            } else {
                Expr::func(f, arg)
            }
        }
    }
}
