//! Printing in the parser's own grammar, so that printed output re-parses.

use std::fmt;

use super::{Expr, Node, Number};

// Binding strength of the printed form of each node.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn number_prec(n: &Number) -> u8 {
    match n {
        Number::Rational(r) if !r.is_integer() => PRODUCT,
        _ if n.is_negative() => UNARY,
        _ => ATOM,
    }
}

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(n) => number_prec(n),
        Node::Var(_) | Node::Func(_, _) => ATOM,
        Node::Add(_) => SUM,
        Node::Mul(fs) => {
            if fs.first().and_then(|f| f.as_number()).is_some_and(|c| c.is_negative()) {
                UNARY
            } else {
                PRODUCT
            }
        }
        Node::Pow(_, x) => {
            if is_sqrt(x) {
                ATOM
            } else if is_reciprocal(x) {
                PRODUCT
            } else {
                POWER
            }
        }
        Node::Neg(_) => UNARY,
    }
}

fn is_sqrt(x: &Expr) -> bool {
    x.as_number() == Some(&Number::ratio(1, 2))
}

fn is_reciprocal(x: &Expr) -> bool {
    x.as_number() == Some(&Number::int(-1))
}

fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if prec(e) < min {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

/// Negated copy of a term for printing `a - b`, when the term is visibly negative.
fn negated_term(t: &Expr) -> Option<Expr> {
    match t.node() {
        Node::Num(n) if n.is_negative() => Some(Expr::num(n.neg())),
        Node::Mul(fs) => {
            let c = fs.first()?.as_number()?;
            if !c.is_negative() {
                return None;
            }
            let c = c.neg();
            let mut rest: Vec<Expr> = fs[1..].to_vec();
            if c.is_one() {
                if rest.len() == 1 {
                    return rest.pop();
                }
            } else {
                rest.insert(0, Expr::num(c));
            }
            Some(Expr::mul(rest))
        }
        Node::Neg(a) => Some(a.clone()),
        _ => None,
    }
}

/// Exponent for the denominator part of a product, if the factor is `b^(-k)`.
fn denominator_factor(f: &Expr) -> Option<Expr> {
    let Node::Pow(b, x) = f.node() else { return None };
    let n = x.as_number()?;
    if !n.is_negative() {
        return None;
    }
    let k = n.neg();
    Some(if k.is_one() { b.clone() } else { Expr::pow(b.clone(), Expr::num(k)) })
}

fn write_product(f: &mut fmt::Formatter<'_>, fs: &[Expr]) -> fmt::Result {
    let mut coeff: Option<Number> = None;
    let mut rest = fs;
    if let Some(c) = fs.first().and_then(|e| e.as_number()) {
        coeff = Some(c.clone());
        rest = &fs[1..];
    }
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for x in rest {
        match denominator_factor(x) {
            Some(d) => denom.push(d),
            None => numer.push(x),
        }
    }
    // A fractional coefficient in front of a quotient: 3/(2*b) rather than 3/2/b.
    if let (Some(Number::Rational(r)), false) = (&coeff, denom.is_empty()) {
        if !r.is_integer() {
            denom.insert(0, Expr::num(Number::Rational(r.denom().clone().into())));
            coeff = Some(Number::Rational(r.numer().clone().into()));
        }
    }
    let mut first = true;
    if let Some(c) = &coeff {
        if c.is_negative() && c.neg().is_one() && !numer.is_empty() {
            write!(f, "-")?;
        } else if !(c.is_one() && !numer.is_empty()) {
            write!(f, "{}", c)?;
            first = false;
        }
    }
    if numer.is_empty() && first {
        write!(f, "1")?;
        first = false;
    }
    for x in numer {
        if !first {
            write!(f, "*")?;
        }
        wrap(f, x, POWER)?;
        first = false;
    }
    match denom.len() {
        0 => Ok(()),
        1 => {
            write!(f, "/")?;
            wrap(f, &denom[0], POWER)
        }
        _ => {
            write!(f, "/(")?;
            for (i, d) in denom.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                wrap(f, d, POWER)?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(n) => write!(f, "{}", n),
            Node::Var(v) => write!(f, "{}", v),
            Node::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        wrap(f, t, SUM)?;
                        continue;
                    }
                    match negated_term(t) {
                        Some(neg) => {
                            write!(f, " - ")?;
                            wrap(f, &neg, PRODUCT)?;
                        }
                        None => {
                            write!(f, " + ")?;
                            wrap(f, t, SUM + 1)?;
                        }
                    }
                }
                Ok(())
            }
            Node::Mul(fs) => write_product(f, fs),
            Node::Pow(b, x) => {
                if is_sqrt(x) {
                    return write!(f, "sqrt({})", b);
                }
                if is_reciprocal(x) {
                    write!(f, "1/")?;
                    return wrap(f, b, POWER + 1);
                }
                wrap(f, b, ATOM)?;
                write!(f, "^")?;
                wrap(f, x, ATOM)
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, UNARY)
            }
            Node::Func(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}
