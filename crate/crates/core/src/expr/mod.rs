//! Symbolic expressions over named variables.
//!
//! [`Expr`] is an immutable, reference-counted tree. Trees built by the parser or
//! by the raw constructors are arbitrary; [`simplify`] maps them to a canonical
//! form in which sums are flat lists of monomials and products are flat lists of
//! merged powers. All symbolic code paths in the crate work on canonical trees.

mod diff;
mod eval;
mod integrate;
mod number;
mod parse;
mod print;
mod simplify;
mod space;
mod zero;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use diff::differentiate;
pub use eval::{Compiled, EvalError};
pub use integrate::integrate_univariate;
pub use number::Number;
pub use parse::{parse, ParseError};
pub use simplify::simplify;
pub use space::{SpaceError, VarSpace};
pub use zero::{is_zero, numeric_zero, Domains, Interval, ZeroConfig, ZeroTestError, ZeroVerdict, DEFAULT_INTERVAL};

/// Unary functions understood by the parser and evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    pub const ALL: [Func; 5] = [Func::Exp, Func::Log, Func::Sqrt, Func::Sin, Func::Cos];
}

/// Node kinds. The derived ordering is the canonical ordering used to sort
/// the operands of sums and products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Num(Number),
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, Expr),
    Neg(Expr),
    Func(Func, Expr),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr({})", self)
    }
}

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn num(n: Number) -> Expr {
        Expr::from_node(Node::Num(n))
    }

    pub fn int(v: i64) -> Expr {
        Expr::num(Number::int(v))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::num(Number::ratio(num, den))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Arc::from(name)))
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::from_node(Node::Add(terms))
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::from_node(Node::Mul(factors))
    }

    pub fn pow(base: Expr, exp: Expr) -> Expr {
        Expr::from_node(Node::Pow(base, exp))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::from_node(Node::Neg(e))
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        Expr::from_node(Node::Func(f, arg))
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::func(Func::Exp, arg)
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::func(Func::Log, arg)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::mul(vec![a, Expr::pow(b, Expr::int(-1))])
    }

    pub fn recip(a: Expr) -> Expr {
        Expr::pow(a, Expr::int(-1))
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self.node() {
            Node::Num(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    /// True for the literal rational zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(self.node(), Node::Num(n) if n.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        matches!(self.node(), Node::Num(n) if n.is_one())
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Var(_) => vec![],
            Node::Add(v) | Node::Mul(v) => v.iter().collect(),
            Node::Pow(b, e) => vec![b, e],
            Node::Neg(a) | Node::Func(_, a) => vec![a],
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Node::Var(v) = self.node() {
            out.insert(v.to_string());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        match self.node() {
            Node::Var(v) => &**v == var,
            _ => self.children().iter().any(|c| c.depends_on(var)),
        }
    }

    pub fn depends_on_any<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> bool {
        vars.into_iter().any(|v| self.depends_on(v))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Rebuild this node with new children (same kind and arity).
    fn with_children(&self, kids: Vec<Expr>) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Var(_) => self.clone(),
            Node::Add(_) => Expr::add(kids),
            Node::Mul(_) => Expr::mul(kids),
            Node::Pow(_, _) => {
                let mut it = kids.into_iter();
                Expr::pow(it.next().unwrap(), it.next().unwrap())
            }
            Node::Neg(_) => Expr::neg(kids.into_iter().next().unwrap()),
            Node::Func(f, _) => Expr::func(*f, kids.into_iter().next().unwrap()),
        }
    }

    /// Simultaneous substitution without simplification.
    pub fn replace_vars(&self, bindings: &BTreeMap<String, Expr>) -> Expr {
        match self.node() {
            Node::Var(v) => bindings.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Node::Num(_) => self.clone(),
            _ => {
                let kids = self.children().into_iter().map(|c| c.replace_vars(bindings)).collect();
                self.with_children(kids)
            }
        }
    }
}

/// Simultaneous substitution followed by simplification.
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Expr {
    simplify(&e.replace_vars(bindings))
}

/// Convenience: simplify(a - b).
pub fn difference(a: &Expr, b: &Expr) -> Expr {
    simplify(&Expr::sub(a.clone(), b.clone()))
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}
