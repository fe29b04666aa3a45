use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

/// A numeric literal: exact rational, or a decimal that entered through the parser.
///
/// Any arithmetic that touches a decimal produces a decimal.
#[derive(Clone, Debug)]
pub enum Number {
    Rational(BigRational),
    Decimal(f64),
}

impl Number {
    pub fn int(v: i64) -> Self {
        Number::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Number::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Number::int(0)
    }

    pub fn one() -> Self {
        Number::int(1)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Decimal(d) => *d == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Decimal(d) => *d == 1.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Decimal(d) => *d < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Number::Rational(r) => r.is_positive(),
            Number::Decimal(d) => *d > 0.0,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Number::Rational(r) => Some(r),
            Number::Decimal(_) => None,
        }
    }

    /// Integer value if this is an exact integer that fits in i64.
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Number::Rational(r) if r.is_integer() => r.to_integer().to_i64(),
            _ => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Number::Rational(r) if r.is_integer())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Decimal(d) => *d,
        }
    }

    pub fn add(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => Number::Rational(a + b),
            _ => Number::Decimal(self.to_f64() + other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Number) -> Number {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => Number::Rational(a * b),
            _ => Number::Decimal(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Number {
        match self {
            Number::Rational(r) => Number::Rational(-r),
            Number::Decimal(d) => Number::Decimal(-d),
        }
    }

    pub fn abs(&self) -> Number {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Number> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Number::Rational(r) => Number::Rational(r.recip()),
            Number::Decimal(d) => Number::Decimal(1.0 / d),
        })
    }

    /// `self^exp` when the result is exactly representable (or decimal).
    ///
    /// Rational bases with rational exponents succeed only for perfect powers.
    pub fn pow(&self, exp: &Number) -> Option<Number> {
        match (self, exp) {
            (Number::Rational(b), Number::Rational(e)) => rational_pow(b, e),
            _ => {
                let v = self.to_f64().powf(exp.to_f64());
                v.is_finite().then_some(Number::Decimal(v))
            }
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Number::Rational(_) => 0,
            Number::Decimal(_) => 1,
        }
    }
}

fn rational_pow(base: &BigRational, exp: &BigRational) -> Option<Number> {
    if exp.is_integer() {
        let e = exp.to_integer().to_i32()?;
        if base.is_zero() && e < 0 {
            return None;
        }
        if e.unsigned_abs() > 4096 {
            return None;
        }
        return Some(Number::Rational(num::pow::Pow::pow(base, e)));
    }
    if base.is_negative() {
        return None;
    }
    let q = exp.denom().to_u32()?;
    let p = exp.numer().to_i32()?;
    let num_root = exact_root(base.numer(), q)?;
    let den_root = exact_root(base.denom(), q)?;
    let root = BigRational::new(num_root, den_root);
    if root.is_zero() && p < 0 {
        return None;
    }
    Some(Number::Rational(num::pow::Pow::pow(&root, p)))
}

fn exact_root(v: &BigInt, q: u32) -> Option<BigInt> {
    let r = v.nth_root(q);
    (num::pow::Pow::pow(&r, q) == *v).then_some(r)
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Number {}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Number {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a.cmp(b),
            (Number::Decimal(a), Number::Decimal(b)) => a.total_cmp(b),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl Hash for Number {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Number::Rational(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Number::Decimal(d) => {
                1u8.hash(state);
                d.to_bits().hash(state);
            }
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Number::Decimal(d) => {
                if d.fract() == 0.0 && d.abs() < 1e15 {
                    write!(f, "{:.1}", d)
                } else {
                    write!(f, "{}", d)
                }
            }
        }
    }
}
