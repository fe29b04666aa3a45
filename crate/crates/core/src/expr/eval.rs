use std::collections::HashMap;

use thiserror::Error;

use super::{Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("domain error: {0}")]
    Domain(&'static str),
}

fn apply(f: Func, a: f64) -> Result<f64, EvalError> {
    match f {
        Func::Exp => Ok(a.exp()),
        Func::Log if a <= 0.0 => Err(EvalError::Domain("log of non-positive value")),
        Func::Log => Ok(a.ln()),
        Func::Sqrt if a < 0.0 => Err(EvalError::Domain("sqrt of negative value")),
        Func::Sqrt => Ok(a.sqrt()),
        Func::Sin => Ok(a.sin()),
        Func::Cos => Ok(a.cos()),
    }
}

fn power(b: f64, x: f64) -> Result<f64, EvalError> {
    if b == 0.0 && x < 0.0 {
        return Err(EvalError::Domain("division by zero"));
    }
    if b < 0.0 && x.fract() != 0.0 {
        return Err(EvalError::Domain("fractional power of negative value"));
    }
    if x == -1.0 {
        return Ok(1.0 / b);
    }
    if x == 2.0 {
        return Ok(b * b);
    }
    if x.fract() == 0.0 && x.abs() <= 64.0 {
        return Ok(b.powi(x as i32));
    }
    if x == 0.5 {
        return Ok(b.sqrt());
    }
    Ok(b.powf(x))
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain("non-finite value"))
    }
}

impl Expr {
    /// Evaluate with variables looked up through `lookup`.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Num(n) => n.to_f64(),
            Node::Var(name) => lookup(name).ok_or_else(|| EvalError::Unbound(name.to_string()))?,
            Node::Add(ts) => {
                let mut s = 0.0;
                for t in ts {
                    s += t.eval(lookup)?;
                }
                s
            }
            Node::Mul(fs) => {
                let mut p = 1.0;
                for f in fs {
                    p *= f.eval(lookup)?;
                }
                p
            }
            Node::Pow(b, x) => power(b.eval(lookup)?, x.eval(lookup)?)?,
            Node::Neg(a) => -a.eval(lookup)?,
            Node::Func(f, a) => apply(*f, a.eval(lookup)?)?,
        };
        finite(v)
    }

    /// Evaluate at a point given as a name → value map.
    pub fn eval_at(&self, point: &HashMap<String, f64>) -> Result<f64, EvalError> {
        self.eval(&|n| point.get(n).copied())
    }

    /// Evaluate at a point given as `(name, value)` pairs.
    pub fn eval_with(&self, point: &[(&str, f64)]) -> Result<f64, EvalError> {
        self.eval(&|n| point.iter().find(|(k, _)| *k == n).map(|(_, v)| *v))
    }
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Slot(usize),
    Add(usize),
    Mul(usize),
    Pow,
    Neg,
    Func(Func),
}

/// An expression flattened to postfix form over positional variable slots, for hot loops.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
}

impl Compiled {
    /// Compile `e` with variable `slots[i]` read from `values[i]` at evaluation time.
    pub fn new(e: &Expr, slots: &[String]) -> Result<Compiled, EvalError> {
        let mut ops = Vec::new();
        emit(e, slots, &mut ops)?;
        Ok(Compiled { ops })
    }

    pub fn eval(&self, values: &[f64]) -> Result<f64, EvalError> {
        let mut stack: Vec<f64> = Vec::with_capacity(16);
        for op in &self.ops {
            match op {
                Op::Const(c) => stack.push(*c),
                Op::Slot(i) => stack.push(values[*i]),
                Op::Add(k) => {
                    let at = stack.len() - k;
                    let s: f64 = stack[at..].iter().sum();
                    stack.truncate(at);
                    stack.push(s);
                }
                Op::Mul(k) => {
                    let at = stack.len() - k;
                    let p: f64 = stack[at..].iter().product();
                    stack.truncate(at);
                    stack.push(p);
                }
                Op::Pow => {
                    let x = stack.pop().unwrap();
                    let b = stack.pop().unwrap();
                    stack.push(power(b, x)?);
                }
                Op::Neg => {
                    let a = stack.pop().unwrap();
                    stack.push(-a);
                }
                Op::Func(f) => {
                    let a = stack.pop().unwrap();
                    stack.push(apply(*f, a)?);
                }
            }
        }
        finite(stack.pop().unwrap_or(f64::NAN))
    }
}

fn emit(e: &Expr, slots: &[String], ops: &mut Vec<Op>) -> Result<(), EvalError> {
    match e.node() {
        Node::Num(n) => ops.push(Op::Const(n.to_f64())),
        Node::Var(name) => {
            let i = slots.iter().position(|s| **s == **name).ok_or_else(|| EvalError::Unbound(name.to_string()))?;
            ops.push(Op::Slot(i));
        }
        Node::Add(ts) => {
            for t in ts {
                emit(t, slots, ops)?;
            }
            ops.push(Op::Add(ts.len()));
        }
        Node::Mul(fs) => {
            for f in fs {
                emit(f, slots, ops)?;
            }
            ops.push(Op::Mul(fs.len()));
        }
        Node::Pow(b, x) => {
            emit(b, slots, ops)?;
            emit(x, slots, ops)?;
            ops.push(Op::Pow);
        }
        Node::Neg(a) => {
            emit(a, slots, ops)?;
            ops.push(Op::Neg);
        }
        Node::Func(f, a) => {
            emit(a, slots, ops)?;
            ops.push(Op::Func(*f));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, simplify, VarSpace};

    fn s(text: &str) -> Expr {
        let space = VarSpace::new(&["x", "y"], "t", &["w"]).unwrap();
        simplify(&parse(text, &space).unwrap())
    }

    #[test]
    fn point_values() {
        assert_eq!(s("exp(-y)").eval_with(&[("y", 0.0)]).unwrap(), 1.0);
        assert_eq!(s("exp(-y) - 1/2*exp(-2*y)").eval_with(&[("y", 0.0)]).unwrap(), 0.5);
        assert_eq!(s("1/(1+y^2)").eval_with(&[("y", 1.0)]).unwrap(), 0.5);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(s("log(x)").eval_with(&[("x", 0.0)]), Err(EvalError::Domain(_))));
        assert!(matches!(s("1/x").eval_with(&[("x", 0.0)]), Err(EvalError::Domain(_))));
        assert!(matches!(s("sqrt(x)").eval_with(&[("x", -1.0)]), Err(EvalError::Domain(_))));
        assert_eq!(s("x+y").eval_with(&[("x", 1.0)]), Err(EvalError::Unbound("y".into())));
    }

    #[test]
    fn compiled_matches_tree() {
        let e = s("x^2*exp(-y)/(1+y^2) - sqrt(x)*cos(t)");
        let slots: Vec<String> = ["x", "y", "t"].iter().map(|s| s.to_string()).collect();
        let c = Compiled::new(&e, &slots).unwrap();
        for (x, y, t) in [(0.4, 1.1, 0.3), (1.9, -0.7, 2.0)] {
            let a = c.eval(&[x, y, t]).unwrap();
            let b = e.eval_with(&[("x", x), ("y", y), ("t", t)]).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
