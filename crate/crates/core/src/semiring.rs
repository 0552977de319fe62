//! Semirings used as weight domains for automata and formulas.
//!
//! A [`Semiring`] is a value-level description of one of the supported
//! algebras. Weights are carried as [`Weight`] payloads whose shape depends on
//! the semiring: booleans, non-negative reals (possibly extended with
//! `+inf`/`-inf`) or probability/cost pairs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A weight payload. Which variant is valid depends on the semiring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Bool(bool),
    Real(f64),
    /// Probability-like mass `p` together with an expected cost `v`.
    Pair(f64, f64),
}

impl Weight {
    /// The real payload. Panics for non-real weights.
    pub fn as_real(self) -> f64 {
        match self {
            Weight::Real(x) => x,
            other => panic!("expected a real weight, found {other:?}"),
        }
    }

    pub fn as_bool(self) -> bool {
        match self {
            Weight::Bool(b) => b,
            other => panic!("expected a boolean weight, found {other:?}"),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Weight::Bool(b) => f.write_str(if b { "1" } else { "0" }),
            Weight::Real(x) => write_real(f, x),
            Weight::Pair(p, v) => {
                f.write_str("(")?;
                write_real(f, p)?;
                f.write_str(",")?;
                write_real(f, v)?;
                f.write_str(")")
            }
        }
    }
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x == f64::INFINITY {
        f.write_str("inf")
    } else if x == f64::NEG_INFINITY {
        f.write_str("-inf")
    } else {
        // `{}` on f64 prints the shortest representation that parses back exactly.
        write!(f, "{x}")
    }
}

/// Result of comparing two weights under a semiring's (partial) order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Comparison operator of a formula threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    pub const ALL: [Cmp; 5] = [Cmp::Lt, Cmp::Le, Cmp::Eq, Cmp::Ge, Cmp::Gt];

    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// How the infinite sum of powers of a restricted transition matrix is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureStrategy {
    /// `sum_{k=0}^{n} R^k` is already the full closure.
    FiniteSum,
    /// `(I - R)^{-1}` over the reals after removing trap states.
    LinearSolve,
    /// Finite sum, saturated to `+inf` wherever a positive cycle is reachable.
    PositiveCycle,
    /// No closure available; only finite bounds can be checked.
    None,
}

/// Structural properties of a semiring that gate checker algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SemiringFlags {
    pub ordered: bool,
    pub order_preserving: bool,
    pub idempotent: bool,
    pub commutative: bool,
    pub zero_is_infimum: bool,
    pub closure: ClosureStrategy,
}

/// The supported semirings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Semiring {
    /// `({0,1}, or, and, 0, 1)`
    Boolean,
    /// `(R+, +, *, 0, 1)`
    Prob,
    /// `(R+ u {-inf, inf}, max, +, -inf, 0)`
    MaxPlus,
    /// `(R+ u {inf}, min, +, inf, 0)` with the inverse order.
    MinPlus,
    /// `(R+ u {inf}, max, min, 0, inf)`
    MaxMin,
    /// Pairs `(p, v)` of mass and expected cost.
    Expectation,
}

impl Semiring {
    pub const ALL: [Semiring; 6] = [
        Semiring::Boolean,
        Semiring::Prob,
        Semiring::MaxPlus,
        Semiring::MinPlus,
        Semiring::MaxMin,
        Semiring::Expectation,
    ];

    /// Looks a semiring up by its identifier.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "boolean" => Ok(Semiring::Boolean),
            "prob" => Ok(Semiring::Prob),
            "maxplus" => Ok(Semiring::MaxPlus),
            "minplus" => Ok(Semiring::MinPlus),
            "maxmin" => Ok(Semiring::MaxMin),
            "expectation" => Ok(Semiring::Expectation),
            other => Err(Error::UnknownSemiring(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Semiring::Boolean => "boolean",
            Semiring::Prob => "prob",
            Semiring::MaxPlus => "maxplus",
            Semiring::MinPlus => "minplus",
            Semiring::MaxMin => "maxmin",
            Semiring::Expectation => "expectation",
        }
    }

    pub fn flags(self) -> SemiringFlags {
        let total = |idempotent, closure| SemiringFlags {
            ordered: true,
            order_preserving: true,
            idempotent,
            commutative: true,
            zero_is_infimum: true,
            closure,
        };
        match self {
            Semiring::Boolean => total(true, ClosureStrategy::FiniteSum),
            Semiring::Prob => total(false, ClosureStrategy::LinearSolve),
            Semiring::MaxPlus => total(true, ClosureStrategy::PositiveCycle),
            Semiring::MinPlus => total(true, ClosureStrategy::FiniteSum),
            Semiring::MaxMin => total(true, ClosureStrategy::FiniteSum),
            Semiring::Expectation => SemiringFlags {
                ordered: false,
                order_preserving: false,
                idempotent: false,
                commutative: true,
                zero_is_infimum: false,
                closure: ClosureStrategy::None,
            },
        }
    }

    /// Whether threshold checks may stop as soon as a running sum passes the
    /// threshold: accumulated sums can only grow in such semirings.
    pub fn allows_early_exit(self) -> bool {
        let f = self.flags();
        f.order_preserving && f.zero_is_infimum
    }

    pub fn zero(self) -> Weight {
        match self {
            Semiring::Boolean => Weight::Bool(false),
            Semiring::Prob | Semiring::MaxMin => Weight::Real(0.0),
            Semiring::MaxPlus => Weight::Real(f64::NEG_INFINITY),
            Semiring::MinPlus => Weight::Real(f64::INFINITY),
            Semiring::Expectation => Weight::Pair(0.0, 0.0),
        }
    }

    pub fn one(self) -> Weight {
        match self {
            Semiring::Boolean => Weight::Bool(true),
            Semiring::Prob => Weight::Real(1.0),
            Semiring::MaxPlus | Semiring::MinPlus => Weight::Real(0.0),
            Semiring::MaxMin => Weight::Real(f64::INFINITY),
            Semiring::Expectation => Weight::Pair(1.0, 0.0),
        }
    }

    pub fn is_zero(self, w: Weight) -> bool {
        w == self.zero()
    }

    pub fn plus(self, a: Weight, b: Weight) -> Weight {
        match self {
            Semiring::Boolean => Weight::Bool(a.as_bool() || b.as_bool()),
            Semiring::Prob => Weight::Real(a.as_real() + b.as_real()),
            Semiring::MaxPlus | Semiring::MaxMin => Weight::Real(a.as_real().max(b.as_real())),
            Semiring::MinPlus => Weight::Real(a.as_real().min(b.as_real())),
            Semiring::Expectation => {
                let (p1, v1) = pair(a);
                let (p2, v2) = pair(b);
                let p = p1 + p2;
                if p == 0.0 {
                    // 0/0 = 0
                    Weight::Pair(0.0, 0.0)
                } else {
                    Weight::Pair(p, (p1 * v1 + p2 * v2) / p)
                }
            }
        }
    }

    pub fn times(self, a: Weight, b: Weight) -> Weight {
        match self {
            Semiring::Boolean => Weight::Bool(a.as_bool() && b.as_bool()),
            Semiring::Prob => Weight::Real(a.as_real() * b.as_real()),
            Semiring::MaxPlus => {
                let (x, y) = (a.as_real(), b.as_real());
                if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
                    Weight::Real(f64::NEG_INFINITY)
                } else {
                    Weight::Real(x + y)
                }
            }
            Semiring::MinPlus => {
                let (x, y) = (a.as_real(), b.as_real());
                if x == f64::INFINITY || y == f64::INFINITY {
                    Weight::Real(f64::INFINITY)
                } else {
                    Weight::Real(x + y)
                }
            }
            Semiring::MaxMin => Weight::Real(a.as_real().min(b.as_real())),
            Semiring::Expectation => {
                let (p1, v1) = pair(a);
                let (p2, v2) = pair(b);
                canonical_pair(p1 * p2, v1 + v2)
            }
        }
    }

    /// `⊕` over an iterator, starting from `0̄`.
    pub fn sum<I: IntoIterator<Item = Weight>>(self, items: I) -> Weight {
        items
            .into_iter()
            .fold(self.zero(), |acc, w| self.plus(acc, w))
    }

    /// `⊗` over an iterator, starting from `1̄`.
    pub fn product<I: IntoIterator<Item = Weight>>(self, items: I) -> Weight {
        items
            .into_iter()
            .fold(self.one(), |acc, w| self.times(acc, w))
    }

    /// Compares `a` with `b` under the semiring order.
    pub fn compare(self, a: Weight, b: Weight) -> WeightOrder {
        use std::cmp::Ordering;
        let from_ord = |o: Option<Ordering>| match o {
            Some(Ordering::Less) => WeightOrder::Less,
            Some(Ordering::Equal) => WeightOrder::Equal,
            Some(Ordering::Greater) => WeightOrder::Greater,
            None => WeightOrder::Incomparable,
        };
        match self {
            Semiring::Boolean => from_ord(Some(a.as_bool().cmp(&b.as_bool()))),
            Semiring::Prob | Semiring::MaxPlus | Semiring::MaxMin => {
                from_ord(a.as_real().partial_cmp(&b.as_real()))
            }
            // x >= y iff x = min(x, y)
            Semiring::MinPlus => from_ord(b.as_real().partial_cmp(&a.as_real())),
            Semiring::Expectation => {
                let (p1, v1) = pair(a);
                let (p2, v2) = pair(b);
                if p1 == p2 && v1 == v2 {
                    WeightOrder::Equal
                } else if p1 >= p2 && v1 <= v2 {
                    WeightOrder::Greater
                } else if p1 <= p2 && v1 >= v2 {
                    WeightOrder::Less
                } else {
                    WeightOrder::Incomparable
                }
            }
        }
    }

    /// Evaluates `w ⋈ p`. Incomparable pairs fail every relation except `=`,
    /// which falls back to payload equality.
    pub fn compare_weight(self, cmp: Cmp, w: Weight, p: Weight) -> bool {
        let order = self.compare(w, p);
        match cmp {
            Cmp::Lt => order == WeightOrder::Less,
            Cmp::Le => matches!(order, WeightOrder::Less | WeightOrder::Equal),
            Cmp::Eq => order == WeightOrder::Equal || w == p,
            Cmp::Ge => matches!(order, WeightOrder::Greater | WeightOrder::Equal),
            Cmp::Gt => order == WeightOrder::Greater,
        }
    }

    /// Supremum in the sense `sup(a,b) = a` if `a > b`, else `b`.
    pub fn sup(self, a: Weight, b: Weight) -> Weight {
        if self.compare(a, b) == WeightOrder::Greater {
            a
        } else {
            b
        }
    }

    /// Infimum in the sense `inf(a,b) = a` if `a < b`, else `b`.
    pub fn inf(self, a: Weight, b: Weight) -> Weight {
        if self.compare(a, b) == WeightOrder::Less {
            a
        } else {
            b
        }
    }

    /// Equality up to an absolute tolerance on finite real components.
    pub fn approx_eq(self, a: Weight, b: Weight, tol: f64) -> bool {
        fn close(x: f64, y: f64, tol: f64) -> bool {
            x == y || (x.is_finite() && y.is_finite() && (x - y).abs() <= tol)
        }
        match (a, b) {
            (Weight::Bool(x), Weight::Bool(y)) => x == y,
            (Weight::Real(x), Weight::Real(y)) => close(x, y, tol),
            (Weight::Pair(p1, v1), Weight::Pair(p2, v2)) => close(p1, p2, tol) && close(v1, v2, tol),
            _ => false,
        }
    }

    /// Checks that `w` is a valid payload of this semiring.
    pub fn validate(self, w: Weight) -> Result<()> {
        let ok = match (self, w) {
            (Semiring::Boolean, Weight::Bool(_)) => true,
            (Semiring::Prob, Weight::Real(x)) => x.is_finite() && x >= 0.0,
            (Semiring::MaxPlus, Weight::Real(x)) => !x.is_nan() && (x >= 0.0 || x == f64::NEG_INFINITY),
            (Semiring::MinPlus | Semiring::MaxMin, Weight::Real(x)) => !x.is_nan() && x >= 0.0,
            (Semiring::Expectation, Weight::Pair(p, v)) => {
                p.is_finite() && v.is_finite() && p >= 0.0 && v >= 0.0 && (p > 0.0 || v == 0.0)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidWeight {
                literal: w.to_string(),
                semiring: self.name(),
            })
        }
    }

    /// Parses a weight literal: `0|1|true|false` for booleans, decimal or
    /// `n/d` reals, `inf`/`-inf`, and `(p,v)` pairs.
    pub fn parse_weight(self, text: &str) -> Result<Weight> {
        let text = text.trim();
        let invalid = || Error::InvalidWeight {
            literal: text.to_string(),
            semiring: self.name(),
        };
        let w = match self {
            Semiring::Boolean => match text {
                "1" | "true" => Weight::Bool(true),
                "0" | "false" => Weight::Bool(false),
                _ => return Err(invalid()),
            },
            Semiring::Expectation => {
                let inner = text
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(invalid)?;
                let (p, v) = inner.split_once(',').ok_or_else(invalid)?;
                let p = parse_real(p).ok_or_else(invalid)?;
                let v = parse_real(v).ok_or_else(invalid)?;
                if !(p.is_finite() && v.is_finite() && p >= 0.0 && v >= 0.0) {
                    return Err(invalid());
                }
                canonical_pair(p, v)
            }
            _ => Weight::Real(parse_real(text).ok_or_else(invalid)?),
        };
        self.validate(w).map_err(|_| invalid())?;
        Ok(w)
    }
}

impl FromStr for Semiring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Semiring::from_name(s)
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn pair(w: Weight) -> (f64, f64) {
    match w {
        Weight::Pair(p, v) => (p, v),
        other => panic!("expected an expectation pair, found {other:?}"),
    }
}

/// Pairs with zero mass carry no cost: they all collapse onto `0̄ = (0,0)`.
fn canonical_pair(p: f64, v: f64) -> Weight {
    if p == 0.0 {
        Weight::Pair(0.0, 0.0)
    } else {
        Weight::Pair(p, v)
    }
}

/// Parses `inf`, `-inf`, decimals and `n/d` fractions. Rejects NaN.
fn parse_real(text: &str) -> Option<f64> {
    let text = text.trim();
    let x = match text {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => {
            if let Some((num, den)) = text.split_once('/') {
                let num = parse_decimal(num)?;
                let den = parse_decimal(den)?;
                if den == 0.0 {
                    return None;
                }
                num / den
            } else {
                parse_decimal(text)?
            }
        }
    };
    // normalise -0.0 so payload equality stays predictable
    Some(if x == 0.0 { 0.0 } else { x })
}

fn parse_decimal(text: &str) -> Option<f64> {
    let text = text.trim();
    let starts_ok = text
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || c == '.' || c == '-' || c == '+');
    if !starts_ok {
        return None;
    }
    let x: f64 = text.parse().ok()?;
    x.is_finite().then_some(x)
}
