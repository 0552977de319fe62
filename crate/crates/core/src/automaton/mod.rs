//! Weighted automata: states, labelled transition matrices, initial and final
//! weights, and atomic-proposition labelling.

mod format;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{StateSet, WMatrix, WVector};
use crate::semiring::{Semiring, Weight};

pub use format::{parse_automaton, serialize_automaton};

/// Upper bound on the length accepted by [`WeightedAutomaton::enumerate_paths`].
pub const MAX_ENUMERATION_LEN: usize = 12;

/// A finite weighted automaton over a semiring.
#[derive(Clone, Debug)]
pub struct WeightedAutomaton {
    semiring: Semiring,
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    labels: Vec<String>,
    matrices: Vec<WMatrix>,
    initial: WVector,
    fin: WVector,
    props: Vec<BTreeSet<String>>,
    summed: OnceLock<WMatrix>,
}

impl PartialEq for WeightedAutomaton {
    fn eq(&self, other: &Self) -> bool {
        self.semiring == other.semiring
            && self.states == other.states
            && self.labels == other.labels
            && self.matrices == other.matrices
            && self.initial == other.initial
            && self.fin == other.fin
            && self.props == other.props
    }
}

/// A finite path `x0 a1 x1 a2 x2 …` given as a start state and
/// `(label, state)` steps, all by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: usize,
    pub steps: Vec<(usize, usize)>,
}

impl Path {
    pub fn empty(start: usize) -> Self {
        Path {
            start,
            steps: Vec::new(),
        }
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The visited states, `len() + 1` of them.
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().map(|(_, y)| *y))
    }

    pub fn last(&self) -> usize {
        self.steps.last().map_or(self.start, |(_, y)| *y)
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|(a, _)| *a)
    }
}

impl WeightedAutomaton {
    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    /// Number of states.
    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, x: usize) -> &str {
        &self.states[x]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    pub fn require_state(&self, name: &str) -> Result<usize> {
        self.state_index(name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn require_label(&self, name: &str) -> Result<usize> {
        self.label_index(name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    /// `M_a` for the label with index `a`.
    pub fn matrix(&self, a: usize) -> &WMatrix {
        &self.matrices[a]
    }

    /// `M = ⊕_a M_a`, computed on first use.
    pub fn summed_matrix(&self) -> &WMatrix {
        self.summed.get_or_init(|| {
            WMatrix::from_triples(
                self.semiring,
                self.n(),
                self.matrices.iter().flat_map(|m| m.triples()),
            )
            .expect("label matrices share the automaton's shape")
        })
    }

    /// Row vector `a` of initial weights.
    pub fn initial(&self) -> &WVector {
        &self.initial
    }

    /// Column vector `b` of final weights.
    pub fn final_weights(&self) -> &WVector {
        &self.fin
    }

    pub fn transition(&self, x: usize, a: usize, y: usize) -> Weight {
        self.matrices[a].get(x, y)
    }

    /// Atomic propositions holding in `x`.
    pub fn props(&self, x: usize) -> &BTreeSet<String> {
        &self.props[x]
    }

    /// States where proposition `name` holds. `true` holds everywhere and
    /// `false` nowhere.
    pub fn prop_states(&self, name: &str) -> StateSet {
        match name {
            "true" => StateSet::full(self.n()),
            "false" => StateSet::empty(self.n()),
            _ => StateSet::from_bits(self.props.iter().map(|p| p.contains(name)).collect()),
        }
    }

    /// States with `α(x) ≠ 0̄`.
    pub fn initial_states(&self) -> StateSet {
        StateSet::from_indices(self.n(), self.initial.iter().map(|(i, _)| i))
    }

    /// `ce(π) = α(π0) ⊗ ∏ T(πi, a_{i+1}, π_{i+1}) ⊗ β(π_end)`.
    pub fn path_weight(&self, path: &Path) -> Result<Weight> {
        let s = self.semiring;
        self.check_state(path.start)?;
        let mut weight = self.initial.get(path.start);
        let mut at = path.start;
        for (step, &(a, y)) in path.steps.iter().enumerate() {
            self.check_label(a)?;
            self.check_state(y)?;
            let t = self.transition(at, a, y);
            if s.is_zero(t) {
                return Err(Error::InvalidPath(format!(
                    "step {}: no `{}` transition from {} to {}",
                    step + 1,
                    self.labels[a],
                    self.states[at],
                    self.states[y]
                )));
            }
            weight = s.times(weight, t);
            at = y;
        }
        Ok(s.times(weight, self.fin.get(at)))
    }

    /// Resolves label names to indices.
    pub fn label_sequence<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.require_label(n.as_ref())).collect()
    }

    /// `d_seq = a ⊗ ∏ M_{a_i}`.
    pub fn reach_vector(&self, seq: &[usize]) -> Result<WVector> {
        self.propagate(self.initial.clone(), seq)
    }

    /// `ca_x(seq) = a(x) ⊗ e_x ∏ M_{a_i} b` when `from` is given, otherwise
    /// `ca(seq) = a ∏ M_{a_i} b`.
    pub fn seq_weight(&self, seq: &[usize], from: Option<usize>) -> Result<Weight> {
        let start = self.start_vector(from)?;
        let d = self.propagate(start, seq)?;
        d.dot(&self.fin)
    }

    /// `ca_x(*^m)` / `ca(*^m)`: all paths of length `m`, any labels.
    pub fn any_label_weight(&self, m: u64, from: Option<usize>) -> Result<Weight> {
        let mut v = self.start_vector(from)?;
        let summed = self.summed_matrix();
        for _ in 0..m {
            v = WMatrix::vec_mat(&v, summed)?;
            if v.is_zero() {
                break;
            }
        }
        v.dot(&self.fin)
    }

    /// All paths of length `≤ max_len` starting in `from` whose transitions
    /// all carry non-`0̄` weight, in depth-first order.
    pub fn enumerate_paths(&self, from: usize, max_len: usize) -> Result<Vec<Path>> {
        if max_len > MAX_ENUMERATION_LEN {
            return Err(Error::BoundExceeded(max_len, MAX_ENUMERATION_LEN));
        }
        self.check_state(from)?;
        let mut out = Vec::new();
        let mut current = Path::empty(from);
        self.extend_paths(&mut current, max_len, &mut out);
        Ok(out)
    }

    fn extend_paths(&self, current: &mut Path, max_len: usize, out: &mut Vec<Path>) {
        out.push(current.clone());
        if current.len() == max_len {
            return;
        }
        let at = current.last();
        for (a, m) in self.matrices.iter().enumerate() {
            for &(y, _) in m.row(at) {
                current.steps.push((a, y));
                self.extend_paths(current, max_len, out);
                current.steps.pop();
            }
        }
    }

    fn start_vector(&self, from: Option<usize>) -> Result<WVector> {
        match from {
            None => Ok(self.initial.clone()),
            Some(x) => {
                self.check_state(x)?;
                let s = self.semiring;
                WVector::from_pairs(s, self.n(), [(x, self.initial.get(x))])
            }
        }
    }

    fn propagate(&self, mut v: WVector, seq: &[usize]) -> Result<WVector> {
        for &a in seq {
            self.check_label(a)?;
            v = WMatrix::vec_mat(&v, &self.matrices[a])?;
        }
        Ok(v)
    }

    fn check_state(&self, x: usize) -> Result<()> {
        if x < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownState(format!("#{x}")))
        }
    }

    fn check_label(&self, a: usize) -> Result<()> {
        if a < self.labels.len() {
            Ok(())
        } else {
            Err(Error::UnknownLabel(format!("#{a}")))
        }
    }
}

impl fmt::Display for WeightedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_automaton(self))
    }
}

impl std::str::FromStr for WeightedAutomaton {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_automaton(s)
    }
}

/// Incremental construction of a [`WeightedAutomaton`].
#[derive(Clone, Debug)]
pub struct AutomatonBuilder {
    semiring: Semiring,
    states: Vec<String>,
    state_index: HashMap<String, usize>,
    labels: Vec<String>,
    transitions: BTreeMap<(usize, usize, usize), Weight>,
    initial: BTreeMap<usize, Weight>,
    fin: BTreeMap<usize, Weight>,
    initial_default: Option<Weight>,
    final_default: Option<Weight>,
    props: BTreeMap<usize, BTreeSet<String>>,
}

impl AutomatonBuilder {
    pub fn new(semiring: Semiring) -> Self {
        AutomatonBuilder {
            semiring,
            states: Vec::new(),
            state_index: HashMap::new(),
            labels: Vec::new(),
            transitions: BTreeMap::new(),
            initial: BTreeMap::new(),
            fin: BTreeMap::new(),
            initial_default: None,
            final_default: None,
            props: BTreeMap::new(),
        }
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    /// Declares a state; names must be unique.
    pub fn state(&mut self, name: &str) -> Result<usize> {
        check_name(name)?;
        if self.state_index.contains_key(name) {
            return Err(Error::Incompatible(format!("duplicate state `{name}`")));
        }
        let idx = self.states.len();
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    /// Declares a label; names must be unique.
    pub fn label(&mut self, name: &str) -> Result<usize> {
        check_name(name)?;
        if self.labels.iter().any(|l| l == name) {
            return Err(Error::Incompatible(format!("duplicate label `{name}`")));
        }
        self.labels.push(name.to_string());
        Ok(self.labels.len() - 1)
    }

    pub fn states(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            self.state(n)?;
        }
        Ok(self)
    }

    pub fn labels(mut self, names: &[&str]) -> Result<Self> {
        for n in names {
            self.label(n)?;
        }
        Ok(self)
    }

    fn resolve_state(&self, name: &str) -> Result<usize> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    fn resolve_label(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    /// Adds `T(from, label, to) = w`. A second transition with the same
    /// `(from, label, to)` is rejected; a `0̄` weight declares no transition.
    pub fn transition(&mut self, from: &str, label: &str, to: &str, w: Weight) -> Result<()> {
        let x = self.resolve_state(from)?;
        let a = self.resolve_label(label)?;
        let y = self.resolve_state(to)?;
        self.transition_by_index(x, a, y, w)
    }

    pub fn transition_by_index(&mut self, x: usize, a: usize, y: usize, w: Weight) -> Result<()> {
        self.semiring.validate(w)?;
        if self.transitions.insert((x, a, y), w).is_some() {
            return Err(Error::Incompatible(format!(
                "duplicate transition {} {} {}",
                self.states[x], self.labels[a], self.states[y]
            )));
        }
        Ok(())
    }

    pub fn initial(&mut self, state: &str, w: Weight) -> Result<()> {
        let x = self.resolve_state(state)?;
        self.semiring.validate(w)?;
        self.initial.insert(x, w);
        Ok(())
    }

    pub fn final_weight(&mut self, state: &str, w: Weight) -> Result<()> {
        let x = self.resolve_state(state)?;
        self.semiring.validate(w)?;
        self.fin.insert(x, w);
        Ok(())
    }

    /// Sets the initial weight of every state not given explicitly.
    pub fn initial_all(&mut self, w: Weight) -> Result<()> {
        self.semiring.validate(w)?;
        self.initial_default = Some(w);
        Ok(())
    }

    pub fn final_all(&mut self, w: Weight) -> Result<()> {
        self.semiring.validate(w)?;
        self.final_default = Some(w);
        Ok(())
    }

    /// Labels `state` with the atomic proposition `prop`.
    pub fn prop(&mut self, state: &str, prop: &str) -> Result<()> {
        let x = self.resolve_state(state)?;
        check_prop(prop)?;
        self.props.entry(x).or_default().insert(prop.to_string());
        Ok(())
    }

    pub fn build(self) -> Result<WeightedAutomaton> {
        let s = self.semiring;
        let n = self.states.len();
        let mut per_label: Vec<Vec<(usize, usize, Weight)>> = vec![Vec::new(); self.labels.len()];
        for (&(x, a, y), &w) in &self.transitions {
            per_label[a].push((x, y, w));
        }
        let matrices = per_label
            .into_iter()
            .map(|t| WMatrix::from_triples(s, n, t))
            .collect::<Result<Vec<_>>>()?;
        let fill = |explicit: &BTreeMap<usize, Weight>, default: Option<Weight>| {
            let dense: Vec<Weight> = (0..n)
                .map(|x| {
                    explicit
                        .get(&x)
                        .copied()
                        .or(default)
                        .unwrap_or_else(|| s.zero())
                })
                .collect();
            WVector::from_dense(s, &dense)
        };
        let initial = fill(&self.initial, self.initial_default);
        let fin = fill(&self.fin, self.final_default);
        let mut props = vec![BTreeSet::new(); n];
        for (x, set) in self.props {
            props[x] = set;
        }
        Ok(WeightedAutomaton {
            semiring: s,
            states: self.states,
            state_index: self.state_index,
            labels: self.labels,
            matrices,
            initial,
            fin,
            props,
            summed: OnceLock::new(),
        })
    }
}

impl WeightedAutomaton {
    /// Assembles an automaton from already-indexed parts.
    pub fn from_parts(
        semiring: Semiring,
        states: Vec<String>,
        labels: Vec<String>,
        matrices: Vec<WMatrix>,
        initial: WVector,
        fin: WVector,
        props: Vec<BTreeSet<String>>,
    ) -> Result<Self> {
        let n = states.len();
        if matrices.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} matrices for {} labels",
                matrices.len(),
                labels.len()
            )));
        }
        for m in &matrices {
            if m.dim() != n {
                return Err(Error::Dimension(format!("matrix of size {} for {n} states", m.dim())));
            }
            if m.semiring() != semiring {
                return Err(Error::SemiringMismatch(semiring.name(), m.semiring().name()));
            }
        }
        for v in [&initial, &fin] {
            if v.len() != n {
                return Err(Error::Dimension(format!("vector of length {} for {n} states", v.len())));
            }
            if v.semiring() != semiring {
                return Err(Error::SemiringMismatch(semiring.name(), v.semiring().name()));
            }
        }
        if props.len() != n {
            return Err(Error::Dimension(format!("{} proposition sets for {n} states", props.len())));
        }
        let mut state_index = HashMap::new();
        for (i, name) in states.iter().enumerate() {
            check_name(name)?;
            if state_index.insert(name.clone(), i).is_some() {
                return Err(Error::Incompatible(format!("duplicate state `{name}`")));
            }
        }
        let unique_labels: BTreeSet<&String> = labels.iter().collect();
        if unique_labels.len() != labels.len() {
            return Err(Error::Incompatible("duplicate label".into()));
        }
        Ok(WeightedAutomaton {
            semiring,
            states,
            state_index,
            labels,
            matrices,
            initial,
            fin,
            props,
            summed: OnceLock::new(),
        })
    }
}

fn check_name(name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '=' | ',' | '#'));
    if bad {
        Err(Error::Incompatible(format!("invalid name `{name}`")))
    } else {
        Ok(())
    }
}

fn check_prop(prop: &str) -> Result<()> {
    if prop == "true" || prop == "false" {
        return Err(Error::Incompatible(format!("`{prop}` is reserved")));
    }
    let mut chars = prop.chars();
    let valid = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.'));
    if valid {
        Ok(())
    } else {
        Err(Error::Incompatible(format!("invalid proposition name `{prop}`")))
    }
}
