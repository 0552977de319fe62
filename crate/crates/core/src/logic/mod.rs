//! CTL$ formulas: syntax tree, printing, parsing, and comparison rewriting.

mod parser;

use std::fmt;

use crate::semiring::{Cmp, Semiring, Weight};

pub use parser::{ctl_compat, parse_formula};

/// Step bound of an until operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn is_infinite(self) -> bool {
        matches!(self, Bound::Infinite)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(t) => write!(f, "{t}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `[a]{⋈p}.φ`
    Diamond {
        label: String,
        cmp: Cmp,
        threshold: Weight,
        body: Box<Formula>,
    },
    /// `φ₁ U{⋈p, t} φ₂`
    Until {
        left: Box<Formula>,
        cmp: Cmp,
        threshold: Weight,
        bound: Bound,
        right: Box<Formula>,
    },
    /// `φ₁ AU{⋈p, t} φ₂`
    AllUntil {
        left: Box<Formula>,
        cmp: Cmp,
        threshold: Weight,
        bound: Bound,
        right: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn diamond(label: &str, cmp: Cmp, threshold: Weight, body: Formula) -> Formula {
        Formula::Diamond {
            label: label.to_string(),
            cmp,
            threshold,
            body: Box::new(body),
        }
    }

    pub fn until(left: Formula, cmp: Cmp, threshold: Weight, bound: Bound, right: Formula) -> Formula {
        Formula::Until {
            left: Box::new(left),
            cmp,
            threshold,
            bound,
            right: Box::new(right),
        }
    }

    pub fn all_until(left: Formula, cmp: Cmp, threshold: Weight, bound: Bound, right: Formula) -> Formula {
        Formula::AllUntil {
            left: Box::new(left),
            cmp,
            threshold,
            bound,
            right: Box::new(right),
        }
    }

    /// Inductive formula length: 1 for atoms, +1 per operator, binary
    /// operators take the maximum of their operands.
    pub fn leng(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Diamond { body: f, .. } => f.leng() + 1,
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => a.leng().max(b.leng()) + 1,
            Formula::Until { left, right, .. } | Formula::AllUntil { left, right, .. } => {
                left.leng().max(right.leng()) + 1
            }
        }
    }

    /// Whether the root is a diamond or until operator.
    pub fn is_temporal(&self) -> bool {
        matches!(
            self,
            Formula::Diamond { .. } | Formula::Until { .. } | Formula::AllUntil { .. }
        )
    }

    /// Thresholds carried by the formula, outermost first.
    pub fn thresholds(&self) -> Vec<Weight> {
        let mut out = Vec::new();
        self.collect_thresholds(&mut out);
        out
    }

    fn collect_thresholds(&self, out: &mut Vec<Weight>) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(f) => f.collect_thresholds(out),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.collect_thresholds(out);
                b.collect_thresholds(out);
            }
            Formula::Diamond { threshold, body, .. } => {
                out.push(*threshold);
                body.collect_thresholds(out);
            }
            Formula::Until {
                left,
                threshold,
                right,
                ..
            }
            | Formula::AllUntil {
                left,
                threshold,
                right,
                ..
            } => {
                out.push(*threshold);
                left.collect_thresholds(out);
                right.collect_thresholds(out);
            }
        }
    }
}

/// Rewrites every comparison `<`, `≤`, `=` into boolean combinations of
/// `>` and `≥`:
///
/// * `X≤ = ¬X>`
/// * `X= = X≥ ∧ ¬X>`
/// * `X< = ¬(X= ∨ X>)`
///
/// For `AU` the table applies to the embedded until weight, and the
/// universal part is kept as `φ₁ AU{≥0̄, t} φ₂`.
pub fn normalize_cmp(f: &Formula, semiring: Semiring) -> Formula {
    let rec = |g: &Formula| Box::new(normalize_cmp(g, semiring));
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::Not(rec(g)),
        Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
        Formula::And(a, b) => Formula::And(rec(a), rec(b)),
        Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
        Formula::Diamond {
            label,
            cmp,
            threshold,
            body,
        } => {
            let body = normalize_cmp(body, semiring);
            expand_cmp(*cmp, |c| Formula::diamond(label, c, *threshold, body.clone()))
        }
        Formula::Until {
            left,
            cmp,
            threshold,
            bound,
            right,
        } => {
            let (l, r) = (normalize_cmp(left, semiring), normalize_cmp(right, semiring));
            expand_cmp(*cmp, |c| Formula::until(l.clone(), c, *threshold, *bound, r.clone()))
        }
        Formula::AllUntil {
            left,
            cmp,
            threshold,
            bound,
            right,
        } => {
            let (l, r) = (normalize_cmp(left, semiring), normalize_cmp(right, semiring));
            if matches!(cmp, Cmp::Gt | Cmp::Ge) {
                return Formula::all_until(l, *cmp, *threshold, *bound, r);
            }
            let weight_part = expand_cmp(*cmp, |c| Formula::until(l.clone(), c, *threshold, *bound, r.clone()));
            let universal = Formula::all_until(l, Cmp::Ge, semiring.zero(), *bound, r);
            Formula::and(weight_part, universal)
        }
    }
}

fn expand_cmp(cmp: Cmp, make: impl Fn(Cmp) -> Formula) -> Formula {
    let eq = || Formula::and(make(Cmp::Ge), Formula::not(make(Cmp::Gt)));
    match cmp {
        Cmp::Gt | Cmp::Ge => make(cmp),
        Cmp::Le => Formula::not(make(Cmp::Gt)),
        Cmp::Eq => eq(),
        Cmp::Lt => Formula::not(Formula::or(eq(), make(Cmp::Gt))),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Diamond {
                label,
                cmp,
                threshold,
                body,
            } => write!(f, "[{label}]{{{cmp}{threshold}}}.{body}"),
            Formula::Until {
                left,
                cmp,
                threshold,
                bound,
                right,
            } => write!(f, "({left} U{{{cmp}{threshold}, {bound}}} {right})"),
            Formula::AllUntil {
                left,
                cmp,
                threshold,
                bound,
                right,
            } => write!(f, "({left} AU{{{cmp}{threshold}, {bound}}} {right})"),
        }
    }
}
