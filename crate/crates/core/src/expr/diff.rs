use super::{simplify, Expr, Func, Node};

/// Exact partial derivative of `e` with respect to `var`, simplified.
pub fn differentiate(e: &Expr, var: &str) -> Expr {
    if !e.depends_on(var) {
        return Expr::zero();
    }
    simplify(&raw(e, var))
}

fn raw(e: &Expr, v: &str) -> Expr {
    if !e.depends_on(v) {
        return Expr::zero();
    }
    match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Var(name) => {
            if &**name == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(ts) => Expr::add(ts.iter().map(|t| raw(t, v)).collect()),
        Node::Neg(a) => Expr::neg(raw(a, v)),
        Node::Mul(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                if !f.depends_on(v) {
                    continue;
                }
                let mut prod: Vec<Expr> = fs.clone();
                prod[i] = raw(f, v);
                terms.push(Expr::mul(prod));
            }
            Expr::add(terms)
        }
        Node::Pow(b, x) => {
            if !x.depends_on(v) {
                // x * b^(x-1) * b'
                Expr::mul(vec![
                    x.clone(),
                    Expr::pow(b.clone(), Expr::add(vec![x.clone(), Expr::int(-1)])),
                    raw(b, v),
                ])
            } else {
                // b^x * (x' log b + x b'/b)
                Expr::mul(vec![
                    e.clone(),
                    Expr::add(vec![
                        Expr::mul(vec![raw(x, v), Expr::log(b.clone())]),
                        Expr::mul(vec![x.clone(), raw(b, v), Expr::recip(b.clone())]),
                    ]),
                ])
            }
        }
        Node::Func(f, a) => {
            let da = raw(a, v);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Log => Expr::recip(a.clone()),
                Func::Sqrt => Expr::mul(vec![Expr::ratio(1, 2), Expr::pow(a.clone(), Expr::ratio(-1, 2))]),
                Func::Sin => Expr::func(Func::Cos, a.clone()),
                Func::Cos => Expr::neg(Expr::func(Func::Sin, a.clone())),
            };
            Expr::mul(vec![outer, da])
        }
    }
}
