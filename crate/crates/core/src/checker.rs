//! Bottom-up CTL$ model checking.

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::linalg::{inverse_of_identity_minus, StateSet, WMatrix, WVector};
use crate::logic::{normalize_cmp, Bound, Formula};
use crate::semiring::{ClosureStrategy, Cmp, Semiring, Weight};

/// Row sums of a restricted probability matrix at or above `1 - TRAP_TOL`
/// count as stochastic.
pub const TRAP_TOL: f64 = 1e-9;

/// Weights computed through the linear solve that lie within this distance
/// of the threshold are compared as equal to it.
pub const SOLVE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mark {
    True,
    False,
    Undefined,
}

impl Mark {
    fn from_bool(b: bool) -> Mark {
        if b {
            Mark::True
        } else {
            Mark::False
        }
    }
}

/// Work counters collected during a check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub mat_vec_products: usize,
}

impl CheckStats {
    fn absorb(&mut self, other: CheckStats) {
        self.mat_vec_products += other.mat_vec_products;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SatResult {
    pub marks: Vec<Mark>,
    /// Per-state weight of the root operator, when it is a diamond or until
    /// and the weight was fully accumulated.
    pub weights: Option<Vec<Weight>>,
    pub formula: Option<Formula>,
    pub stats: CheckStats,
}

impl SatResult {
    fn new(marks: Vec<Mark>) -> Self {
        SatResult {
            marks,
            weights: None,
            formula: None,
            stats: CheckStats::default(),
        }
    }

    pub fn holds(&self, x: usize) -> bool {
        self.marks[x] == Mark::True
    }

    pub fn sat_set(&self) -> StateSet {
        StateSet::from_bits(self.marks.iter().map(|m| *m == Mark::True).collect())
    }

    /// Every state with `α(x) ≠ 0̄` satisfies the formula.
    pub fn holds_initially(&self, a: &WeightedAutomaton) -> bool {
        a.initial_states().iter().all(|x| self.holds(x))
    }
}

/// Closure `N = ⊕_{k≥0} M[P,P]^k` over `P = Φ₁ ∧ ¬Φ₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureMatrix {
    pub matrix: WMatrix,
    pub strategy: ClosureStrategy,
    /// States whose rows were zeroed as traps (probabilities only).
    pub trapped: StateSet,
}

/// Checks `φ` in every state of `a`.
pub fn check(a: &WeightedAutomaton, f: &Formula) -> Result<SatResult> {
    let s = a.semiring();
    for p in f.thresholds() {
        s.validate(p)?;
    }
    let normalized = normalize_cmp(f, s);
    let mut stats = CheckStats::default();
    let sat = eval(a, &normalized, &mut stats)?;
    let weights = root_weights(a, f, &mut stats)?;
    Ok(SatResult {
        marks: sat.bits().iter().map(|&b| Mark::from_bool(b)).collect(),
        weights,
        formula: Some(f.clone()),
        stats,
    })
}

fn eval(a: &WeightedAutomaton, f: &Formula, stats: &mut CheckStats) -> Result<StateSet> {
    let n = a.n();
    Ok(match f {
        Formula::True => StateSet::full(n),
        Formula::False => StateSet::empty(n),
        Formula::Atom(name) => a.prop_states(name),
        Formula::Not(g) => eval(a, g, stats)?.complement(),
        Formula::Or(l, r) => eval(a, l, stats)?.union(&eval(a, r, stats)?),
        Formula::And(l, r) => eval(a, l, stats)?.intersection(&eval(a, r, stats)?),
        Formula::Implies(l, r) => eval(a, l, stats)?.complement().union(&eval(a, r, stats)?),
        Formula::Diamond {
            label,
            cmp,
            threshold,
            body,
        } => {
            let sat = eval(a, body, stats)?;
            check_diamond(a, label, *cmp, *threshold, &sat)?.sat_set()
        }
        Formula::Until {
            left,
            cmp,
            threshold,
            bound,
            right,
        } => {
            let (s1, s2) = (eval(a, left, stats)?, eval(a, right, stats)?);
            let r = match bound {
                Bound::Finite(t) => check_until_finite(a, &s1, &s2, *cmp, *threshold, *t)?,
                Bound::Infinite => check_until_infinite(a, &s1, &s2, *cmp, *threshold)?,
            };
            stats.absorb(r.stats);
            r.sat_set()
        }
        Formula::AllUntil {
            left,
            cmp,
            threshold,
            bound,
            right,
        } => {
            let (s1, s2) = (eval(a, left, stats)?, eval(a, right, stats)?);
            let r = check_au(a, &s1, &s2, *cmp, *threshold, *bound)?;
            stats.absorb(r.stats);
            r.sat_set()
        }
    })
}

fn root_weights(a: &WeightedAutomaton, f: &Formula, stats: &mut CheckStats) -> Result<Option<Vec<Weight>>> {
    let s = a.semiring();
    let mut scratch = CheckStats::default();
    let mut sub = |g: &Formula| eval(a, &normalize_cmp(g, s), &mut scratch);
    let w = match f {
        Formula::Diamond { label, body, .. } => {
            let sat = sub(body)?;
            Some(diamond_weights(a, label, &sat)?)
        }
        Formula::Until {
            left, bound, right, ..
        }
        | Formula::AllUntil {
            left, bound, right, ..
        } => {
            let (s1, s2) = (sub(left)?, sub(right)?);
            let (w, st) = until_weights(a, &s1, &s2, *bound)?;
            stats.absorb(st);
            Some(w)
        }
        _ => None,
    };
    Ok(w)
}

fn semiring_of(a: &WeightedAutomaton) -> Semiring {
    a.semiring()
}

/// `w(x) = ⊕_{y ∈ sat} M_a(x,y)`.
pub fn diamond_weights(a: &WeightedAutomaton, label: &str, sat: &StateSet) -> Result<Vec<Weight>> {
    let l = a.require_label(label)?;
    let m = a.matrix(l);
    Ok((0..a.n()).map(|x| m.row_sum_over(x, sat)).collect())
}

/// `x ⊨ [a]{⋈p}.Φ` iff `⊕_{y ∈ sat} M_a(x,y) ⋈ p`.
pub fn check_diamond(a: &WeightedAutomaton, label: &str, cmp: Cmp, p: Weight, sat: &StateSet) -> Result<SatResult> {
    let s = semiring_of(a);
    let l = a.require_label(label)?;
    let m = a.matrix(l);
    let early = early_exit(s, cmp);
    let marks = (0..a.n())
        .map(|x| {
            let mut acc = s.zero();
            for &(y, w) in m.row(x) {
                if !sat.contains(y) {
                    continue;
                }
                acc = s.plus(acc, w);
                if early && s.compare_weight(cmp, acc, p) {
                    return Mark::True;
                }
            }
            Mark::from_bool(s.compare_weight(cmp, acc, p))
        })
        .collect();
    Ok(SatResult::new(marks))
}

fn early_exit(s: Semiring, cmp: Cmp) -> bool {
    s.allows_early_exit() && matches!(cmp, Cmp::Gt | Cmp::Ge)
}

/// The `Φ₁ ∧ ¬Φ₂` region.
fn pending(s1: &StateSet, s2: &StateSet) -> StateSet {
    s1.difference(s2)
}

/// `M[P, Φ₂] · b[Φ₂]`.
fn first_step(a: &WeightedAutomaton, p: &StateSet, s2: &StateSet) -> Result<WVector> {
    let m = a.summed_matrix().restrict(p, s2);
    WMatrix::mat_vec(&m, &a.final_weights().restrict(s2))
}

/// Assembles per-state until weights from `u` over `P`.
fn assemble(a: &WeightedAutomaton, s2: &StateSet, p: &StateSet, u: &WVector) -> Vec<Weight> {
    let s = semiring_of(a);
    let (init, fin) = (a.initial(), a.final_weights());
    (0..a.n())
        .map(|x| {
            if s2.contains(x) {
                s.times(init.get(x), fin.get(x))
            } else if p.contains(x) {
                s.times(init.get(x), u.get(x))
            } else {
                s.zero()
            }
        })
        .collect()
}

/// Fully accumulated until weights:
///
/// * `Φ₂` states: `a(x) ⊗ b(x)`
/// * `Φ₁ ∧ ¬Φ₂` states: `a(x) ⊗ (⊕_{k<t} M[P,P]^k M[P,Φ₂] b[Φ₂])(x)`
/// * all others: `0̄`
pub fn until_weights(
    a: &WeightedAutomaton,
    s1: &StateSet,
    s2: &StateSet,
    bound: Bound,
) -> Result<(Vec<Weight>, CheckStats)> {
    let p = pending(s1, s2);
    let mut stats = CheckStats::default();
    let u = match bound {
        Bound::Finite(0) => WVector::zeros(a.semiring(), a.n()),
        Bound::Finite(t) => {
            let mut v = first_step(a, &p, s2)?;
            stats.mat_vec_products += 1;
            let mpp = a.summed_matrix().restrict(&p, &p);
            let mut u = v.clone();
            for _ in 1..t {
                v = WMatrix::mat_vec(&mpp, &v)?;
                stats.mat_vec_products += 1;
                if v.is_zero() {
                    break;
                }
                u = u.plus(&v)?;
            }
            u
        }
        Bound::Infinite => {
            let n = closure(a, s1, s2)?;
            let v = first_step(a, &p, s2)?;
            stats.mat_vec_products += 2;
            WMatrix::mat_vec(&n.matrix, &v)?
        }
    };
    Ok((assemble(a, s2, &p, &u), stats))
}

/// Bounded until with step bound `t`, iterating `v ← M[P,P]·v` and stopping
/// as soon as `v` vanishes. On order-preserving semirings with `0̄` as
/// infimum a state is marked as soon as its partial sum meets the threshold.
pub fn check_until_finite(
    a: &WeightedAutomaton,
    s1: &StateSet,
    s2: &StateSet,
    cmp: Cmp,
    p: Weight,
    t: u64,
) -> Result<SatResult> {
    let s = semiring_of(a);
    let n = a.n();
    let pend = pending(s1, s2);
    let (init, fin) = (a.initial(), a.final_weights());
    let mut marks = vec![Mark::Undefined; n];
    for x in 0..n {
        if s2.contains(x) {
            marks[x] = Mark::from_bool(s.compare_weight(cmp, s.times(init.get(x), fin.get(x)), p));
        } else if !pend.contains(x) || t == 0 {
            marks[x] = Mark::from_bool(s.compare_weight(cmp, s.zero(), p));
        }
    }
    let mut result = SatResult::new(marks);
    if t == 0 {
        result.weights = Some(assemble(a, s2, &pend, &WVector::zeros(s, n)));
        return Ok(result);
    }

    let early = early_exit(s, cmp);
    let mpp = a.summed_matrix().restrict(&pend, &pend);
    let mut v = first_step(a, &pend, s2)?;
    result.stats.mat_vec_products += 1;
    let mut u = v.clone();
    let mut complete = true;
    let mut step = 1;
    loop {
        if early {
            for x in pend.iter() {
                if result.marks[x] == Mark::Undefined && s.compare_weight(cmp, s.times(init.get(x), u.get(x)), p) {
                    result.marks[x] = Mark::True;
                }
            }
        }
        if step == t {
            break;
        }
        if pend.iter().all(|x| result.marks[x] != Mark::Undefined) {
            complete = false;
            break;
        }
        v = WMatrix::mat_vec(&mpp, &v)?;
        result.stats.mat_vec_products += 1;
        if v.is_zero() {
            break;
        }
        u = u.plus(&v)?;
        step += 1;
    }
    for x in pend.iter() {
        if result.marks[x] == Mark::Undefined {
            let w = s.times(init.get(x), u.get(x));
            result.marks[x] = Mark::from_bool(s.compare_weight(cmp, w, p));
        }
    }
    if complete {
        result.weights = Some(assemble(a, s2, &pend, &u));
    }
    Ok(result)
}

/// Computes the closure over `P = Φ₁ ∧ ¬Φ₂` with the semiring's strategy.
pub fn closure(a: &WeightedAutomaton, s1: &StateSet, s2: &StateSet) -> Result<ClosureMatrix> {
    let s = semiring_of(a);
    let n = a.n();
    let p = pending(s1, s2);
    let m = a.summed_matrix().restrict(&p, &p);
    let strategy = s.flags().closure;
    let none = StateSet::empty(n);
    let matrix = match strategy {
        ClosureStrategy::FiniteSum => m.power_sum(n as u64).restrict(&p, &p),
        ClosureStrategy::LinearSolve => {
            let trapped = traps(&m, &p)?;
            let inv = inverse_of_identity_minus(&m.zero_rows(&trapped))?;
            return Ok(ClosureMatrix {
                matrix: inv.restrict(&p, &p),
                strategy,
                trapped,
            });
        }
        ClosureStrategy::PositiveCycle => positive_cycle_closure(&m, &p),
        ClosureStrategy::None => return Err(unbounded_unsupported(s)),
    };
    Ok(ClosureMatrix {
        matrix,
        strategy,
        trapped: none,
    })
}

fn unbounded_unsupported(s: Semiring) -> Error {
    Error::Unsupported(format!(
        "the {} semiring has no closure, so until formulas can only be checked for finite step bounds",
        s.name()
    ))
}

/// Greatest set `X ⊆ P` whose rows restricted to `X` are stochastic.
fn traps(m: &WMatrix, p: &StateSet) -> Result<StateSet> {
    for x in p.iter() {
        let total = m.row_sum_over(x, p).as_real();
        if total > 1.0 + TRAP_TOL {
            return Err(Error::Unsupported(format!(
                "row {x} of the restricted matrix sums to {total}, so it is not substochastic"
            )));
        }
    }
    let mut x_set = p.clone();
    loop {
        let drop: Vec<usize> = x_set
            .iter()
            .filter(|&x| m.row_sum_over(x, &x_set).as_real() < 1.0 - TRAP_TOL)
            .collect();
        if drop.is_empty() {
            return Ok(x_set);
        }
        for x in drop {
            x_set.remove(x);
        }
    }
}

/// Strongly connected components of the graph of `m` restricted to `within`,
/// as a component id per state (`usize::MAX` outside).
fn scc_ids(m: &WMatrix, within: &StateSet) -> Vec<usize> {
    let n = m.dim();
    let succ = |x: usize| m.row(x).iter().map(|&(y, _)| y).filter(|&y| within.contains(y));

    // Kosaraju: finishing order on the graph, then components on the reverse.
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in within.iter() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![(root, succ(root).collect::<Vec<_>>())];
        while let Some((x, next)) = stack.last_mut() {
            if let Some(y) = next.pop() {
                if !seen[y] {
                    seen[y] = true;
                    let ys = succ(y).collect();
                    stack.push((y, ys));
                }
            } else {
                order.push(*x);
                stack.pop();
            }
        }
    }
    let mut pred = vec![Vec::new(); n];
    for x in within.iter() {
        for y in succ(x) {
            pred[y].push(x);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next_id = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let mut stack = vec![root];
        comp[root] = next_id;
        while let Some(x) = stack.pop() {
            for &y in &pred[x] {
                if comp[y] == usize::MAX {
                    comp[y] = next_id;
                    stack.push(y);
                }
            }
        }
        next_id += 1;
    }
    comp
}

fn positive_cycle_closure(m: &WMatrix, p: &StateSet) -> WMatrix {
    let s = m.semiring();
    let n = m.dim();
    let comp = scc_ids(m, p);
    let positive: StateSet = StateSet::from_bits(
        (0..n)
            .map(|x| {
                comp[x] != usize::MAX
                    && p.iter().any(|y| {
                        comp[y] == comp[x]
                            && m.row(y)
                                .iter()
                                .any(|&(z, w)| comp[z] == comp[x] && s.compare_weight(Cmp::Gt, w, s.one()))
                    })
            })
            .collect(),
    );
    let finite = m.power_sum(n as u64).restrict(p, p);
    if positive.is_empty() {
        return finite;
    }
    let reach = |x: usize| {
        let mut seen = StateSet::empty(n);
        let mut stack = vec![x];
        seen.insert(x);
        while let Some(y) = stack.pop() {
            for &(z, _) in m.row(y) {
                if p.contains(z) && !seen.contains(z) {
                    seen.insert(z);
                    stack.push(z);
                }
            }
        }
        seen
    };
    let reachable: Vec<StateSet> = (0..n).map(|x| if p.contains(x) { reach(x) } else { StateSet::empty(n) }).collect();
    let mut triples: Vec<(usize, usize, Weight)> = finite.triples().collect();
    for x in p.iter() {
        for c in positive.iter().filter(|&c| reachable[x].contains(c)) {
            for y in reachable[c].iter() {
                triples.push((x, y, Weight::Real(f64::INFINITY)));
            }
        }
    }
    WMatrix::from_triples(s, n, triples).expect("valid max/plus weights")
}

/// Unbounded until through the closure matrix: `u = N · M[P,Φ₂] · b[Φ₂]`.
pub fn check_until_infinite(a: &WeightedAutomaton, s1: &StateSet, s2: &StateSet, cmp: Cmp, p: Weight) -> Result<SatResult> {
    let s = semiring_of(a);
    let (weights, stats) = until_weights(a, s1, s2, Bound::Infinite)?;
    let snap = s.flags().closure == ClosureStrategy::LinearSolve;
    let marks = weights
        .iter()
        .map(|&w| {
            let w = if snap && (w.as_real() - p.as_real()).abs() <= SOLVE_TOL {
                p
            } else {
                w
            };
            Mark::from_bool(s.compare_weight(cmp, w, p))
        })
        .collect();
    Ok(SatResult {
        marks,
        weights: Some(weights),
        formula: None,
        stats,
    })
}

/// `Φ₁ AU{⋈p, t} Φ₂`: the until verdict, and no path from `x` of length at
/// most `min(t, n)` may leave `Φ₁` before `Φ₂` or stay in `Φ₁ ∧ ¬Φ₂` for
/// the whole horizon. For `t = 0` this is the until verdict alone.
pub fn check_au(
    a: &WeightedAutomaton,
    s1: &StateSet,
    s2: &StateSet,
    cmp: Cmp,
    p: Weight,
    bound: Bound,
) -> Result<SatResult> {
    let s = semiring_of(a);
    if !s.allows_early_exit() {
        return Err(Error::Unsupported(format!(
            "all-until needs an order-preserving semiring with 0̄ as infimum, which {} is not",
            s.name()
        )));
    }
    let mut result = match bound {
        Bound::Finite(t) => check_until_finite(a, s1, s2, cmp, p, t)?,
        Bound::Infinite => check_until_infinite(a, s1, s2, cmp, p)?,
    };
    if bound == Bound::Finite(0) {
        return Ok(result);
    }
    let n = a.n();
    let horizon = match bound {
        Bound::Finite(t) => (t as usize).min(n),
        Bound::Infinite => n,
    };
    let pend = pending(s1, s2);
    let bad = s1.union(s2).complement();
    let m = a.summed_matrix();
    let preds_in = |targets: &StateSet| {
        StateSet::from_indices(
            n,
            pend.iter().filter(|&x| m.row(x).iter().any(|&(y, _)| targets.contains(y))),
        )
    };

    // escape: a path through P that steps into ¬Φ₁ ∧ ¬Φ₂ within the horizon
    let mut frontier = preds_in(&bad);
    let mut escape = frontier.clone();
    // survive: a path of `horizon` steps that never leaves P
    let mut survive = pend.clone();
    for step in 0..horizon {
        survive = preds_in(&survive);
        result.stats.mat_vec_products += 1;
        if step + 1 < horizon {
            frontier = preds_in(&frontier);
            escape = escape.union(&frontier);
            result.stats.mat_vec_products += 1;
        }
    }
    for x in 0..n {
        if bad.contains(x) || escape.contains(x) || survive.contains(x) {
            result.marks[x] = Mark::False;
        }
    }
    Ok(result)
}
