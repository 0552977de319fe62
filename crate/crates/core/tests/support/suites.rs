//! Randomized checks returning every mismatch found, so callers can assert
//! emptiness or report counts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wamc_core::bisim::{minimize, DEFAULT_TOL};
use wamc_core::checker::{check_au, check_until_finite, diamond_weights, until_weights, SOLVE_TOL};
use wamc_core::logic::{Bound, Formula};
use wamc_core::{check, ClosureStrategy, Cmp, Semiring, StateSet, Weight, WeightedAutomaton};

use super::*;

/// Engine until weights and verdicts for `t ≤ 5` against path enumeration,
/// and all-until verdicts against the explicit two-condition check.
pub fn oracle_mismatches(seed: u64, per_semiring: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in ORACLE_SEMIRINGS {
        for case in 0..per_semiring {
            let spec = RandomSpec {
                n: rng.gen_range(1..=6),
                labels: rng.gen_range(1..=3),
                density: 0.2,
            };
            let a = random_automaton(&mut rng, s, &spec);
            let (s1, s2) = random_sets(&mut rng, a.n());
            for t in 0..=5u64 {
                let (engine, _) = until_weights(&a, &s1, &s2, Bound::Finite(t)).unwrap();
                let brute: Vec<Weight> = (0..a.n()).map(|x| brute_until_weight(&a, &s1, &s2, x, t)).collect();
                for x in 0..a.n() {
                    if !weights_match(s, engine[x], brute[x]) {
                        out.push(format!("{s} case {case} t={t} state {x}: U weight {} vs {}", engine[x], brute[x]));
                    }
                }
                let cmp = *[Cmp::Gt, Cmp::Ge].choose(&mut rng).unwrap();
                let p = *thresholds(s).choose(&mut rng).unwrap();
                let u = check_until_finite(&a, &s1, &s2, cmp, p, t).unwrap();
                let au = check_au(&a, &s1, &s2, cmp, p, Bound::Finite(t)).unwrap();
                let au_brute = brute_au(&a, &s1, &s2, cmp, p, Bound::Finite(t), |x| brute[x]);
                for x in 0..a.n() {
                    if u.holds(x) != s.compare_weight(cmp, brute[x], p) {
                        out.push(format!("{s} case {case} t={t} state {x}: U verdict {cmp}{p}"));
                    }
                    if au.holds(x) != au_brute[x] {
                        out.push(format!("{s} case {case} t={t} state {x}: AU verdict {cmp}{p}"));
                    }
                }
            }
        }
    }
    out
}

fn snap(a: &WeightedAutomaton, bound: Bound, w: Weight, p: Weight) -> Weight {
    let s = a.semiring();
    if bound.is_infinite() && s.flags().closure == ClosureStrategy::LinearSolve && (w.as_real() - p.as_real()).abs() <= SOLVE_TOL {
        p
    } else {
        w
    }
}

/// Verdicts of formulas with every comparison operator, checked through the
/// rewriting, against comparing the operator's weight directly.
pub fn rewrite_mismatches(seed: u64, per_semiring: usize) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut checked = 0;
    let (p_atom, q_atom) = (Formula::atom("p"), Formula::atom("q"));
    let bounds = [
        Bound::Finite(0),
        Bound::Finite(1),
        Bound::Finite(2),
        Bound::Finite(3),
        Bound::Finite(4),
        Bound::Infinite,
    ];
    for s in ORACLE_SEMIRINGS {
        for case in 0..per_semiring {
            let spec = RandomSpec {
                n: rng.gen_range(3..=5),
                labels: rng.gen_range(1..=2),
                density: 0.3,
            };
            let a = random_automaton(&mut rng, s, &spec);
            let (s1, s2) = (a.prop_states("p"), a.prop_states("q"));
            for cmp in Cmp::ALL {
                for p in thresholds(s) {
                    for label in a.labels() {
                        let w = diamond_weights(&a, label, &s2).unwrap();
                        let f = Formula::diamond(label, cmp, p, q_atom.clone());
                        let r = check(&a, &f).unwrap();
                        for x in 0..a.n() {
                            checked += 1;
                            if r.holds(x) != s.compare_weight(cmp, w[x], p) {
                                out.push(format!("{s} case {case} state {x}: {f}"));
                            }
                        }
                    }
                    for bound in bounds {
                        let (u, _) = until_weights(&a, &s1, &s2, bound).unwrap();
                        let horizon = match bound {
                            Bound::Finite(t) => t,
                            Bound::Infinite => a.n() as u64,
                        };
                        let f = Formula::until(p_atom.clone(), cmp, p, bound, q_atom.clone());
                        let g = Formula::all_until(p_atom.clone(), cmp, p, bound, q_atom.clone());
                        let (rf, rg) = (check(&a, &f).unwrap(), check(&a, &g).unwrap());
                        for x in 0..a.n() {
                            checked += 2;
                            let direct = s.compare_weight(cmp, snap(&a, bound, u[x], p), p);
                            if rf.holds(x) != direct {
                                out.push(format!("{s} case {case} state {x}: {f}"));
                            }
                            let universal = bound == Bound::Finite(0) || brute_all_paths_ok(&a, &s1, &s2, x, horizon);
                            if rg.holds(x) != (direct && universal) {
                                out.push(format!("{s} case {case} state {x}: {g}"));
                            }
                        }
                    }
                }
            }
        }
    }
    (checked, out)
}

/// The models used for the preservation property: the driving-test
/// fixtures in their semiring, plus random models with bisimilar copies.
pub fn preservation_models(rng: &mut ChaCha8Rng, s: Semiring, inflated: usize) -> Vec<WeightedAutomaton> {
    let mut models = match s {
        Semiring::Boolean => vec![load(DRIVE_BOOL), load(DRIVE_BOOL_AGG)],
        Semiring::Prob => vec![load(DRIVE_PROB), load(DRIVE_PROB_AGG)],
        Semiring::MaxPlus => vec![load(DRIVE_MAXPLUS), load(DRIVE_MAXPLUS_AGG)],
        _ => Vec::new(),
    };
    for _ in 0..inflated {
        let spec = RandomSpec {
            n: rng.gen_range(2..=4),
            labels: rng.gen_range(1..=2),
            density: 0.35,
        };
        let base = random_automaton(rng, s, &spec);
        models.push(inflate(rng, &base));
    }
    models
}

pub struct PreservationReport {
    pub models: usize,
    pub formulas: usize,
    pub comparisons: usize,
    pub mismatches: Vec<String>,
}

/// Per-state verdicts on each model against the class verdicts on its
/// quotient by the largest bisimulation.
pub fn preservation_mismatches(seed: u64, s: Semiring, formulas: usize, inflated: usize) -> PreservationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let models = preservation_models(&mut rng, s, inflated);
    let mut report = PreservationReport {
        models: models.len(),
        formulas: 0,
        comparisons: 0,
        mismatches: Vec::new(),
    };
    for (m, a) in models.iter().enumerate() {
        let (q, part) = minimize(a, DEFAULT_TOL).unwrap();
        for _ in 0..formulas {
            let f = random_formula(&mut rng, a, 3, s.flags().closure != ClosureStrategy::None);
            report.formulas += 1;
            let (ra, rq) = (check(a, &f).unwrap(), check(&q, &f).unwrap());
            for x in 0..a.n() {
                report.comparisons += 1;
                if ra.holds(x) != rq.holds(part.class_of(x)) {
                    report
                        .mismatches
                        .push(format!("{s} model {m} state {}: {f}", a.state_name(x)));
                }
            }
        }
    }
    report
}

/// Sets `{x : u_t(x) ⋈ p}` for increasing `t`.
pub fn sat_sets_over_t(a: &WeightedAutomaton, s1: &StateSet, s2: &StateSet, cmp: Cmp, p: Weight, ts: &[u64]) -> Vec<StateSet> {
    ts.iter()
        .map(|&t| check_until_finite(a, s1, s2, cmp, p, t).unwrap().sat_set())
        .collect()
}
