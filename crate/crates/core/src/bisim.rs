//! Weighted bisimulation: partition refinement, quotients, and equivalence
//! of automata.

use std::collections::{BTreeSet, HashMap};

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::linalg::{StateSet, WMatrix, WVector};
use crate::semiring::{Semiring, Weight};

/// Default tolerance for comparing real-valued signatures.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A partition of the states into classes numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition from arbitrary class labels, renumbering classes
    /// in order of their first member.
    pub fn from_class_ids(ids: &[usize]) -> Self {
        let mut remap = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let class_of = ids
            .iter()
            .enumerate()
            .map(|(x, id)| {
                let c = *remap.entry(*id).or_insert_with(|| {
                    classes.push(Vec::new());
                    classes.len() - 1
                });
                classes[c].push(x);
                c
            })
            .collect();
        Partition { class_of, classes }
    }

    /// Every state in its own class.
    pub fn discrete(n: usize) -> Self {
        Partition::from_class_ids(&(0..n).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Lowest-index member of class `c`.
    pub fn representative(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    pub fn class_set(&self, c: usize) -> StateSet {
        StateSet::from_indices(self.class_of.len(), self.classes[c].iter().copied())
    }

    /// Classes as sets of state names, for order-insensitive comparison.
    pub fn named_classes(&self, a: &WeightedAutomaton) -> BTreeSet<BTreeSet<String>> {
        self.classes
            .iter()
            .map(|c| c.iter().map(|&x| a.state_name(x).to_string()).collect())
            .collect()
    }
}

type Signature = Vec<((usize, usize), Weight)>;

/// `M_a(x, C)` for every label `a` and class `C` with non-`0̄` mass.
fn signature(a: &WeightedAutomaton, part: &Partition, x: usize) -> Signature {
    let s = a.semiring();
    let mut sums: Vec<((usize, usize), Weight)> = Vec::new();
    for l in 0..a.labels().len() {
        for &(y, w) in a.matrix(l).row(x) {
            let key = (l, part.class_of(y));
            match sums.iter_mut().find(|(k, _)| *k == key) {
                Some((_, acc)) => *acc = s.plus(*acc, w),
                None => sums.push((key, w)),
            }
        }
    }
    sums.retain(|(_, w)| !s.is_zero(*w));
    sums.sort_by_key(|(k, _)| *k);
    sums
}

fn signatures_match(s: Semiring, x: &Signature, y: &Signature, tol: f64) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (kx, ky) = (x.get(i).map(|e| e.0), y.get(j).map(|e| e.0));
        let take_x = match (kx, ky) {
            (Some(a), Some(b)) => a <= b,
            (a, _) => a.is_some(),
        };
        let take_y = match (kx, ky) {
            (Some(a), Some(b)) => b <= a,
            (_, b) => b.is_some(),
        };
        let wx = if take_x { x[i].1 } else { s.zero() };
        let wy = if take_y { y[j].1 } else { s.zero() };
        i += usize::from(take_x);
        j += usize::from(take_y);
        if !s.approx_eq(wx, wy, tol) {
            return false;
        }
    }
    true
}

/// Splits every class of `part` by `key`, keeping a new group for each key
/// not within tolerance of an existing group's first member.
fn split<K>(part: &Partition, keys: &[K], same: impl Fn(&K, &K) -> bool) -> Partition {
    let n = keys.len();
    let mut ids = vec![0; n];
    let mut next = 0;
    for class in part.classes() {
        let mut groups: Vec<(usize, usize)> = Vec::new();
        for &x in class {
            match groups.iter().find(|(rep, _)| same(&keys[*rep], &keys[x])) {
                Some(&(_, id)) => ids[x] = id,
                None => {
                    groups.push((x, next));
                    ids[x] = next;
                    next += 1;
                }
            }
        }
    }
    Partition::from_class_ids(&ids)
}

fn initial_partition(a: &WeightedAutomaton, tol: f64) -> Partition {
    let s = a.semiring();
    let keys: Vec<(&BTreeSet<String>, Weight, Weight)> = (0..a.n())
        .map(|x| (a.props(x), a.initial().get(x), a.final_weights().get(x)))
        .collect();
    let whole = Partition::from_class_ids(&vec![0; a.n()]);
    split(&whole, &keys, |p, q| {
        p.0 == q.0 && s.approx_eq(p.1, q.1, tol) && s.approx_eq(p.2, q.2, tol)
    })
}

/// The coarsest bisimulation with the default tolerance.
pub fn largest_bisimulation(a: &WeightedAutomaton) -> Partition {
    largest_bisimulation_with_tolerance(a, DEFAULT_TOL)
}

pub fn largest_bisimulation_with_tolerance(a: &WeightedAutomaton, tol: f64) -> Partition {
    refine_with_trace(a, tol).0
}

/// Signature refinement, also returning the class count after the initial
/// split and after each round.
pub fn refine_with_trace(a: &WeightedAutomaton, tol: f64) -> (Partition, Vec<usize>) {
    let s = a.semiring();
    let mut part = initial_partition(a, tol);
    let mut trace = vec![part.len()];
    loop {
        let sigs: Vec<Signature> = (0..a.n()).map(|x| signature(a, &part, x)).collect();
        let next = split(&part, &sigs, |p, q| signatures_match(s, p, q, tol));
        trace.push(next.len());
        if next.len() == part.len() {
            return (next, trace);
        }
        part = next;
    }
}

/// Checks the four bisimulation conditions for every pair in a common class.
pub fn verify_bisimulation(a: &WeightedAutomaton, part: &Partition, tol: f64) -> Result<()> {
    let s = a.semiring();
    if part.class_of.len() != a.n() {
        return Err(Error::Dimension(format!(
            "partition over {} states for an automaton with {}",
            part.class_of.len(),
            a.n()
        )));
    }
    for class in part.classes() {
        let r = class[0];
        let sig_r = signature(a, part, r);
        for &x in &class[1..] {
            let (nr, nx) = (a.state_name(r), a.state_name(x));
            if a.props(r) != a.props(x) {
                return Err(Error::NotBisimulation(format!("{nr} and {nx} differ in their propositions")));
            }
            if !s.approx_eq(a.initial().get(r), a.initial().get(x), tol) {
                return Err(Error::NotBisimulation(format!("{nr} and {nx} differ in initial weight")));
            }
            if !s.approx_eq(a.final_weights().get(r), a.final_weights().get(x), tol) {
                return Err(Error::NotBisimulation(format!("{nr} and {nx} differ in final weight")));
            }
            if !signatures_match(s, &sig_r, &signature(a, part, x), tol) {
                return Err(Error::NotBisimulation(format!(
                    "{nr} and {nx} send different weight into some class"
                )));
            }
        }
    }
    Ok(())
}

pub fn is_bisimulation(a: &WeightedAutomaton, part: &Partition, tol: f64) -> bool {
    verify_bisimulation(a, part, tol).is_ok()
}

/// Collapses each class to its representative. Class `C` is named after its
/// lowest-index member and `M'_a(C, C') = M_a(rep(C), C')`.
pub fn quotient(a: &WeightedAutomaton, part: &Partition) -> Result<WeightedAutomaton> {
    quotient_with_tolerance(a, part, DEFAULT_TOL)
}

pub fn quotient_with_tolerance(a: &WeightedAutomaton, part: &Partition, tol: f64) -> Result<WeightedAutomaton> {
    verify_bisimulation(a, part, tol)?;
    let s = a.semiring();
    let k = part.len();
    let reps: Vec<usize> = (0..k).map(|c| part.representative(c)).collect();
    let states = reps.iter().map(|&r| a.state_name(r).to_string()).collect();
    let matrices = (0..a.labels().len())
        .map(|l| {
            let triples = reps
                .iter()
                .enumerate()
                .flat_map(|(c, &r)| a.matrix(l).row(r).iter().map(move |&(y, w)| (c, part.class_of(y), w)));
            WMatrix::from_triples(s, k, triples)
        })
        .collect::<Result<Vec<_>>>()?;
    let pick = |v: &WVector| {
        let dense: Vec<Weight> = reps.iter().map(|&r| v.get(r)).collect();
        WVector::from_dense(s, &dense)
    };
    let props = reps.iter().map(|&r| a.props(r).clone()).collect();
    WeightedAutomaton::from_parts(
        s,
        states,
        a.labels().to_vec(),
        matrices,
        pick(a.initial()),
        pick(a.final_weights()),
        props,
    )
}

/// Quotient by the largest bisimulation.
pub fn minimize(a: &WeightedAutomaton, tol: f64) -> Result<(WeightedAutomaton, Partition)> {
    let part = largest_bisimulation_with_tolerance(a, tol);
    let q = quotient_with_tolerance(a, &part, tol)?;
    Ok((q, part))
}

/// Disjoint union with block-diagonal matrices. If any state name occurs in
/// both automata, the states are renamed to `1.x` and `2.y`.
pub fn union(a1: &WeightedAutomaton, a2: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    let s = a1.semiring();
    if s != a2.semiring() {
        return Err(Error::SemiringMismatch(s.name(), a2.semiring().name()));
    }
    let l1: BTreeSet<&String> = a1.labels().iter().collect();
    let l2: BTreeSet<&String> = a2.labels().iter().collect();
    if l1 != l2 {
        return Err(Error::Incompatible("the alphabets differ".into()));
    }
    let clash = a1.states().iter().any(|x| a2.state_index(x).is_some());
    let rename = |prefix: &str, name: &str| {
        if clash {
            format!("{prefix}.{name}")
        } else {
            name.to_string()
        }
    };
    let (n1, n) = (a1.n(), a1.n() + a2.n());
    let states = a1
        .states()
        .iter()
        .map(|x| rename("1", x))
        .chain(a2.states().iter().map(|x| rename("2", x)))
        .collect();
    let matrices = a1
        .labels()
        .iter()
        .enumerate()
        .map(|(l, name)| {
            let l2 = a2.require_label(name)?;
            let upper = a1.matrix(l).triples();
            let lower = a2.matrix(l2).triples().map(|(x, y, w)| (x + n1, y + n1, w));
            WMatrix::from_triples(s, n, upper.chain(lower))
        })
        .collect::<Result<Vec<_>>>()?;
    let concat = |v1: &WVector, v2: &WVector| {
        let mut dense = v1.to_dense();
        dense.extend(v2.to_dense());
        WVector::from_dense(s, &dense)
    };
    let props = (0..a1.n())
        .map(|x| a1.props(x).clone())
        .chain((0..a2.n()).map(|x| a2.props(x).clone()))
        .collect();
    WeightedAutomaton::from_parts(
        s,
        states,
        a1.labels().to_vec(),
        matrices,
        concat(a1.initial(), a2.initial()),
        concat(a1.final_weights(), a2.final_weights()),
        props,
    )
}

/// Bisimulation equivalence of two automata: in every class of the largest
/// bisimulation on their union, the initial weights summed over each side
/// agree, and likewise the final weights.
pub fn automata_equivalent(a1: &WeightedAutomaton, a2: &WeightedAutomaton, tol: f64) -> Result<bool> {
    let u = union(a1, a2)?;
    let s = u.semiring();
    let part = largest_bisimulation_with_tolerance(&u, tol);
    let n1 = a1.n();
    for class in part.classes() {
        for v in [u.initial(), u.final_weights()] {
            let left = s.sum(class.iter().filter(|&&x| x < n1).map(|&x| v.get(x)));
            let right = s.sum(class.iter().filter(|&&x| x >= n1).map(|&x| v.get(x)));
            if !s.approx_eq(left, right, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One `class: C<i> = x y …` line per class.
pub fn class_report(a: &WeightedAutomaton, part: &Partition) -> Vec<String> {
    part.classes()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let names: Vec<&str> = members.iter().map(|&x| a.state_name(x)).collect();
            format!("class: C{c} = {}", names.join(" "))
        })
        .collect()
}
