//! Shared generators and brute-force oracles for integration tests.
#![allow(dead_code)]

pub mod suites;

use rand::seq::SliceRandom;
use rand::Rng;
use wamc_core::automaton::AutomatonBuilder;
use wamc_core::logic::{Bound, Formula};
use wamc_core::{parse_automaton, Cmp, Semiring, StateSet, Weight, WeightedAutomaton};

pub const DRIVE_BOOL: &str = include_str!("../../fixtures/drive_bool.wa");
pub const DRIVE_BOOL_AGG: &str = include_str!("../../fixtures/drive_bool_agg.wa");
pub const DRIVE_PROB: &str = include_str!("../../fixtures/drive_prob.wa");
pub const DRIVE_PROB_AGG: &str = include_str!("../../fixtures/drive_prob_agg.wa");
pub const DRIVE_MAXPLUS: &str = include_str!("../../fixtures/drive_maxplus.wa");
pub const DRIVE_MAXPLUS_AGG: &str = include_str!("../../fixtures/drive_maxplus_agg.wa");

pub fn load(text: &str) -> WeightedAutomaton {
    parse_automaton(text).expect("fixture parses")
}

pub const ORACLE_SEMIRINGS: [Semiring; 5] = [
    Semiring::Boolean,
    Semiring::Prob,
    Semiring::MaxPlus,
    Semiring::MinPlus,
    Semiring::MaxMin,
];

/// A random non-`0̄` weight; probabilities are multiples of 1/16.
pub fn random_weight<R: Rng>(rng: &mut R, s: Semiring) -> Weight {
    match s {
        Semiring::Boolean => Weight::Bool(true),
        Semiring::Prob => Weight::Real(rng.gen_range(1..=16) as f64 / 16.0),
        Semiring::MaxPlus | Semiring::MinPlus => Weight::Real(rng.gen_range(0..10) as f64),
        Semiring::MaxMin => Weight::Real(rng.gen_range(1..10) as f64),
        Semiring::Expectation => Weight::Pair(rng.gen_range(1..=8) as f64 / 8.0, rng.gen_range(0..5) as f64),
    }
}

/// Sixteenths summing to at most one, one per arc.
fn substochastic_row<R: Rng>(rng: &mut R, arcs: usize) -> Vec<f64> {
    let mut units = vec![1u32; arcs];
    let budget = rng.gen_range(arcs as u32..=16.max(arcs as u32));
    for _ in arcs as u32..budget {
        let i = rng.gen_range(0..arcs);
        units[i] += 1;
    }
    units.into_iter().map(|u| u as f64 / 16.0).collect()
}

pub struct RandomSpec {
    pub n: usize,
    pub labels: usize,
    pub density: f64,
}

/// A random automaton with propositions drawn from `{p, q}`. Probability
/// rows are substochastic over all labels together.
pub fn random_automaton<R: Rng>(rng: &mut R, s: Semiring, spec: &RandomSpec) -> WeightedAutomaton {
    let names: Vec<String> = (0..spec.n).map(|i| format!("s{i}")).collect();
    let labels: Vec<String> = (0..spec.labels).map(|i| format!("a{i}")).collect();
    let mut b = AutomatonBuilder::new(s);
    for x in &names {
        b.state(x).unwrap();
    }
    for l in &labels {
        b.label(l).unwrap();
    }
    for x in &names {
        let arcs: Vec<(&String, &String)> = labels
            .iter()
            .flat_map(|l| names.iter().map(move |y| (l, y)))
            .filter(|_| rng.gen_bool(spec.density))
            .collect();
        let weights: Vec<Weight> = if s == Semiring::Prob && !arcs.is_empty() {
            substochastic_row(rng, arcs.len()).into_iter().map(Weight::Real).collect()
        } else {
            arcs.iter().map(|_| random_weight(rng, s)).collect()
        };
        for ((l, y), w) in arcs.into_iter().zip(weights) {
            b.transition(x, l, y, w).unwrap();
        }
        if rng.gen_bool(0.6) {
            b.initial(x, random_weight(rng, s)).unwrap();
        }
        if rng.gen_bool(0.4) {
            b.final_weight(x, random_weight(rng, s)).unwrap();
        }
        for p in ["p", "q"] {
            if rng.gen_bool(0.5) {
                b.prop(x, p).unwrap();
            }
        }
    }
    b.build().unwrap()
}

/// Splits each state of `base` into 1 to 3 copies so that every copy is
/// bisimilar to its origin. Idempotent semirings send each arc to a random
/// nonempty subset of the target's copies; probabilities are halved
/// between two copies or kept on one.
pub fn inflate<R: Rng>(rng: &mut R, base: &WeightedAutomaton) -> WeightedAutomaton {
    let s = base.semiring();
    let copies: Vec<usize> = (0..base.n()).map(|_| rng.gen_range(1..=3)).collect();
    let name = |x: usize, i: usize| format!("{}_{i}", base.state_name(x));
    let mut b = AutomatonBuilder::new(s);
    let mut order: Vec<(usize, usize)> = (0..base.n()).flat_map(|x| (0..copies[x]).map(move |i| (x, i))).collect();
    order.shuffle(rng);
    for &(x, i) in &order {
        b.state(&name(x, i)).unwrap();
    }
    for l in base.labels() {
        b.label(l).unwrap();
    }
    for &(x, i) in &order {
        let src = name(x, i);
        b.initial(&src, base.initial().get(x)).unwrap();
        b.final_weight(&src, base.final_weights().get(x)).unwrap();
        for p in base.props(x) {
            b.prop(&src, p).unwrap();
        }
        for (l, label) in base.labels().iter().enumerate() {
            for &(y, w) in base.matrix(l).row(x) {
                let k = copies[y];
                if s.flags().idempotent {
                    let forced = rng.gen_range(0..k);
                    for j in 0..k {
                        if j == forced || rng.gen_bool(0.5) {
                            b.transition(&src, label, &name(y, j), w).unwrap();
                        }
                    }
                } else if k >= 2 && rng.gen_bool(0.5) {
                    let half = Weight::Real(w.as_real() / 2.0);
                    let (j1, j2) = (rng.gen_range(0..k), rng.gen_range(0..k));
                    if j1 == j2 {
                        b.transition(&src, label, &name(y, j1), w).unwrap();
                    } else {
                        b.transition(&src, label, &name(y, j1), half).unwrap();
                        b.transition(&src, label, &name(y, j2), half).unwrap();
                    }
                } else {
                    let j = rng.gen_range(0..k);
                    b.transition(&src, label, &name(y, j), w).unwrap();
                }
            }
        }
    }
    b.build().unwrap()
}

/// Threshold pool per semiring, used for generated formulas.
pub fn thresholds(s: Semiring) -> Vec<Weight> {
    let r = |xs: &[f64]| xs.iter().map(|&x| Weight::Real(x)).collect();
    match s {
        Semiring::Boolean => vec![Weight::Bool(false), Weight::Bool(true)],
        Semiring::Prob => r(&[0.0, 0.05, 0.3, 0.6, 1.0]),
        Semiring::MaxPlus => r(&[f64::NEG_INFINITY, 0.0, 3.0, 7.0, 12.0]),
        Semiring::MinPlus => r(&[f64::INFINITY, 0.0, 2.0, 5.0, 9.0]),
        Semiring::MaxMin => r(&[0.0, 2.0, 5.0, 8.0, f64::INFINITY]),
        Semiring::Expectation => vec![Weight::Pair(0.0, 0.0), Weight::Pair(0.25, 2.0), Weight::Pair(0.5, 1.0)],
    }
}

/// Random formula of depth at most `depth` over the automaton's
/// propositions and labels. `unbounded` allows `inf` step bounds.
pub fn random_formula<R: Rng>(rng: &mut R, a: &WeightedAutomaton, depth: usize, unbounded: bool) -> Formula {
    let mut atoms: Vec<String> = (0..a.n()).flat_map(|x| a.props(x).iter().cloned()).collect();
    atoms.sort();
    atoms.dedup();
    atoms.push("true".into());
    gen_formula(rng, a, &atoms, depth, unbounded)
}

fn gen_formula<R: Rng>(rng: &mut R, a: &WeightedAutomaton, atoms: &[String], depth: usize, unbounded: bool) -> Formula {
    let s = a.semiring();
    let leaf = |rng: &mut R| {
        let name = atoms.choose(rng).unwrap();
        if name == "true" {
            Formula::True
        } else {
            Formula::atom(name)
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    let cmp = *Cmp::ALL.choose(rng).unwrap();
    let p = *thresholds(s).choose(rng).unwrap();
    let bound = if unbounded && rng.gen_bool(0.3) {
        Bound::Infinite
    } else {
        Bound::Finite(rng.gen_range(0..=4))
    };
    let sub = |rng: &mut R| {
        let d = rng.gen_range(0..depth);
        gen_formula(rng, a, atoms, d, unbounded)
    };
    match rng.gen_range(0..7) {
        0 => leaf(rng),
        1 => Formula::not(sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::and(sub(rng), sub(rng)),
        4 => {
            let label = a.labels().choose(rng).unwrap().clone();
            Formula::diamond(&label, cmp, p, sub(rng))
        }
        5 => Formula::until(sub(rng), cmp, p, bound, sub(rng)),
        _ => Formula::all_until(sub(rng), cmp, p, bound, sub(rng)),
    }
}

/// Brute-force until weight from `x` with step bound `t`: the `⊕` over
/// explicit paths that stay in `Φ₁ ∧ ¬Φ₂` before reaching `Φ₂` within `t`
/// steps, each weighted `α(x) ⊗ ∏T ⊗ β(end)`.
pub fn brute_until_weight(a: &WeightedAutomaton, s1: &StateSet, s2: &StateSet, x: usize, t: u64) -> Weight {
    let s = a.semiring();
    let alpha = a.initial().get(x);
    if s2.contains(x) {
        return s.times(alpha, a.final_weights().get(x));
    }
    if !s1.contains(x) {
        return s.zero();
    }
    let mut total = s.zero();
    walk(a, s1, s2, x, 0, t, alpha, &mut total);
    total
}

#[allow(clippy::too_many_arguments)]
fn walk(a: &WeightedAutomaton, s1: &StateSet, s2: &StateSet, at: usize, depth: u64, t: u64, acc: Weight, total: &mut Weight) {
    if depth == t {
        return;
    }
    let s = a.semiring();
    for l in 0..a.labels().len() {
        for &(y, w) in a.matrix(l).row(at) {
            let next = s.times(acc, w);
            if s2.contains(y) {
                *total = s.plus(*total, s.times(next, a.final_weights().get(y)));
            } else if s1.contains(y) {
                walk(a, s1, s2, y, depth + 1, t, next, total);
            }
        }
    }
}

/// Whether every path from `x` of length up to `horizon` reaches `Φ₂`
/// through `Φ₁ ∧ ¬Φ₂` states, or ends early. A path that leaves `Φ₁` first
/// or is still pending after `horizon` steps is a counterexample.
pub fn brute_all_paths_ok(a: &WeightedAutomaton, s1: &StateSet, s2: &StateSet, x: usize, horizon: u64) -> bool {
    if s2.contains(x) {
        return true;
    }
    if !s1.contains(x) {
        return false;
    }
    if horizon == 0 {
        return false;
    }
    (0..a.labels().len()).all(|l| {
        a.matrix(l)
            .row(x)
            .iter()
            .all(|&(y, _)| brute_all_paths_ok(a, s1, s2, y, horizon - 1))
    })
}

/// Same semantics as above for the whole automaton, with the unbounded
/// horizon cut at `n`.
pub fn brute_au(
    a: &WeightedAutomaton,
    s1: &StateSet,
    s2: &StateSet,
    cmp: Cmp,
    p: Weight,
    bound: Bound,
    until_weight: impl Fn(usize) -> Weight,
) -> Vec<bool> {
    let s = a.semiring();
    (0..a.n())
        .map(|x| {
            let u = s.compare_weight(cmp, until_weight(x), p);
            match bound {
                Bound::Finite(0) => u,
                Bound::Finite(t) => u && brute_all_paths_ok(a, s1, s2, x, t),
                Bound::Infinite => u && brute_all_paths_ok(a, s1, s2, x, a.n() as u64),
            }
        })
        .collect()
}

pub fn weights_match(s: Semiring, a: Weight, b: Weight) -> bool {
    match s {
        Semiring::Prob | Semiring::Expectation => s.approx_eq(a, b, 1e-9),
        _ => a == b,
    }
}

/// Random subsets for `Φ₁` and `Φ₂`.
pub fn random_sets<R: Rng>(rng: &mut R, n: usize) -> (StateSet, StateSet) {
    let s1 = StateSet::from_bits((0..n).map(|_| rng.gen_bool(0.7)).collect());
    let s2 = StateSet::from_bits((0..n).map(|_| rng.gen_bool(0.3)).collect());
    (s1, s2)
}
