//! Workload generators for benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wamc_core::{AutomatonBuilder, Semiring, Weight, WeightedAutomaton};

/// A random sparse automaton with `n` states and about `out_degree`
/// successors per state and label. Probability rows sum to 0.9 over all
/// labels, so unbounded until is always solvable. Half the states carry
/// `p`, a tenth carry `q`.
pub fn sparse_model(seed: u64, s: Semiring, n: usize, labels: usize, out_degree: usize) -> WeightedAutomaton {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = AutomatonBuilder::new(s);
    for x in 0..n {
        b.state(&format!("s{x}")).unwrap();
    }
    for l in 0..labels {
        b.label(&format!("a{l}")).unwrap();
    }
    for x in 0..n {
        let mut arcs = Vec::new();
        for l in 0..labels {
            for _ in 0..out_degree {
                let y = rng.gen_range(0..n);
                if !arcs.contains(&(l, y)) {
                    arcs.push((l, y));
                }
            }
        }
        let share = 0.9 / arcs.len() as f64;
        for (l, y) in arcs {
            let w = match s {
                Semiring::Boolean => Weight::Bool(true),
                Semiring::Prob => Weight::Real(share),
                Semiring::Expectation => Weight::Pair(share, rng.gen_range(0..5) as f64),
                _ => Weight::Real(rng.gen_range(1..10) as f64),
            };
            b.transition_by_index(x, l, y, w).unwrap();
        }
        let name = format!("s{x}");
        if x % 2 == 0 {
            b.prop(&name, "p").unwrap();
        }
        if x % 10 == 3 {
            b.prop(&name, "q").unwrap();
        }
    }
    b.initial("s0", s.one()).unwrap();
    b.final_all(s.one()).unwrap();
    b.build().unwrap()
}

/// `copies` disjoint bisimilar copies of a ring of `len` states, for
/// benchmarking minimization.
pub fn replicated_ring(s: Semiring, len: usize, copies: usize) -> WeightedAutomaton {
    let mut b = AutomatonBuilder::new(s);
    b.label("a").unwrap();
    for c in 0..copies {
        for i in 0..len {
            let name = format!("r{c}_{i}");
            b.state(&name).unwrap();
            if i == 0 {
                b.prop(&name, "goal").unwrap();
            }
        }
    }
    let w = match s {
        Semiring::Boolean => Weight::Bool(true),
        Semiring::Prob => Weight::Real(0.5),
        Semiring::Expectation => Weight::Pair(0.5, 1.0),
        _ => Weight::Real(2.0),
    };
    for c in 0..copies {
        for i in 0..len {
            b.transition(&format!("r{c}_{i}"), "a", &format!("r{c}_{}", (i + 1) % len), w).unwrap();
        }
    }
    b.build().unwrap()
}
