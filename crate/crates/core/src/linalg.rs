//! Sparse vectors and square matrices over a [`Semiring`].
//!
//! Storage is sparse and row-major with sorted column indices; entries equal
//! to `0̄` are never stored. Sums are accumulated in ascending index order so
//! real-valued results are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::semiring::{Semiring, Weight};

/// A set of state indices over a fixed universe `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateSet {
    bits: Vec<bool>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        StateSet { bits: vec![true; n] }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut set = StateSet::empty(n);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        StateSet { bits }
    }

    /// Size of the universe.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.get(i).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.bits[i] = false;
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
    }

    pub fn complement(&self) -> Self {
        StateSet {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    /// `self ∧ ¬other`
    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && !b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    fn zip(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.universe(), other.universe(), "state sets over different universes");
        StateSet {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

/// Sparse vector of length `n`; absent positions hold `0̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct WVector {
    semiring: Semiring,
    len: usize,
    entries: Vec<(usize, Weight)>,
}

impl WVector {
    pub fn zeros(semiring: Semiring, len: usize) -> Self {
        WVector {
            semiring,
            len,
            entries: Vec::new(),
        }
    }

    /// Unit vector `e_i`.
    pub fn unit(semiring: Semiring, len: usize, i: usize) -> Self {
        assert!(i < len, "unit index {i} out of range {len}");
        WVector {
            semiring,
            len,
            entries: vec![(i, semiring.one())],
        }
    }

    /// The all-`1̄` vector `e^T`.
    pub fn ones(semiring: Semiring, len: usize) -> Self {
        Self::indicator(semiring, &StateSet::full(len))
    }

    /// `1̄` on members of `set`, `0̄` elsewhere.
    pub fn indicator(semiring: Semiring, set: &StateSet) -> Self {
        WVector {
            semiring,
            len: set.universe(),
            entries: set.iter().map(|i| (i, semiring.one())).collect(),
        }
    }

    pub fn from_dense(semiring: Semiring, values: &[Weight]) -> Self {
        WVector {
            semiring,
            len: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, w)| !semiring.is_zero(**w))
                .map(|(i, w)| (i, *w))
                .collect(),
        }
    }

    /// Builds from `(index, weight)` pairs; repeated indices are `⊕`-combined.
    pub fn from_pairs<I>(semiring: Semiring, len: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Weight)>,
    {
        let mut dense = vec![semiring.zero(); len];
        for (i, w) in pairs {
            if i >= len {
                return Err(Error::Dimension(format!("index {i} out of range {len}")));
            }
            semiring.validate(w)?;
            dense[i] = semiring.plus(dense[i], w);
        }
        Ok(Self::from_dense(semiring, &dense))
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of stored (non-`0̄`) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Weight {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => self.semiring.zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Weight)> + '_ {
        self.entries.iter().copied()
    }

    pub fn to_dense(&self) -> Vec<Weight> {
        let mut dense = vec![self.semiring.zero(); self.len];
        for &(i, w) in &self.entries {
            dense[i] = w;
        }
        dense
    }

    /// Entrywise `⊕`.
    pub fn plus(&self, other: &WVector) -> Result<WVector> {
        self.check_compatible(other)?;
        let s = self.semiring;
        let mut dense = self.to_dense();
        for (i, w) in other.iter() {
            dense[i] = s.plus(dense[i], w);
        }
        Ok(WVector::from_dense(s, &dense))
    }

    /// Entrywise `⊗`, e.g. `a(x) ⊗ u(x)` for every state.
    pub fn times_entrywise(&self, other: &WVector) -> Result<WVector> {
        self.check_compatible(other)?;
        let s = self.semiring;
        let values: Vec<Weight> = self
            .to_dense()
            .into_iter()
            .zip(other.to_dense())
            .map(|(a, b)| s.times(a, b))
            .collect();
        Ok(WVector::from_dense(s, &values))
    }

    /// `x[Φ]`: entries outside `set` become `0̄`.
    pub fn restrict(&self, set: &StateSet) -> WVector {
        WVector {
            semiring: self.semiring,
            len: self.len,
            entries: self
                .entries
                .iter()
                .copied()
                .filter(|(i, _)| set.contains(*i))
                .collect(),
        }
    }

    /// Row-times-column product `⊕_i self(i) ⊗ other(i)`.
    pub fn dot(&self, other: &WVector) -> Result<Weight> {
        self.check_compatible(other)?;
        let s = self.semiring;
        Ok(s.sum(self.iter().map(|(i, w)| s.times(w, other.get(i)))))
    }

    fn check_compatible(&self, other: &WVector) -> Result<()> {
        if self.semiring != other.semiring {
            return Err(Error::SemiringMismatch(self.semiring.name(), other.semiring.name()));
        }
        if self.len != other.len {
            return Err(Error::Dimension(format!("vector lengths {} and {}", self.len, other.len)));
        }
        Ok(())
    }
}

/// Sparse `n × n` matrix over a semiring.
#[derive(Clone, Debug, PartialEq)]
pub struct WMatrix {
    semiring: Semiring,
    n: usize,
    rows: Vec<Vec<(usize, Weight)>>,
}

impl WMatrix {
    pub fn zeros(semiring: Semiring, n: usize) -> Self {
        WMatrix {
            semiring,
            n,
            rows: vec![Vec::new(); n],
        }
    }

    pub fn identity(semiring: Semiring, n: usize) -> Self {
        Self::diagonal(semiring, &StateSet::full(n))
    }

    /// `I[Φ,Φ]`: `1̄` on the diagonal for members of `set`.
    pub fn diagonal(semiring: Semiring, set: &StateSet) -> Self {
        let n = set.universe();
        let mut rows = vec![Vec::new(); n];
        for i in set.iter() {
            rows[i].push((i, semiring.one()));
        }
        WMatrix { semiring, n, rows }
    }

    /// Builds from `(row, col, weight)` triples; repeated cells are `⊕`-combined.
    pub fn from_triples<I>(semiring: Semiring, n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Weight)>,
    {
        let mut rows: Vec<Vec<(usize, Weight)>> = vec![Vec::new(); n];
        for (x, y, w) in triples {
            if x >= n || y >= n {
                return Err(Error::Dimension(format!("cell ({x},{y}) outside {n}x{n}")));
            }
            semiring.validate(w)?;
            rows[x].push((y, w));
        }
        for row in &mut rows {
            row.sort_by_key(|(y, _)| *y);
            let mut merged: Vec<(usize, Weight)> = Vec::with_capacity(row.len());
            for &(y, w) in row.iter() {
                match merged.last_mut() {
                    Some((last, acc)) if *last == y => *acc = semiring.plus(*acc, w),
                    _ => merged.push((y, w)),
                }
            }
            merged.retain(|(_, w)| !semiring.is_zero(*w));
            *row = merged;
        }
        Ok(WMatrix { semiring, n, rows })
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, x: usize, y: usize) -> Weight {
        match self.rows[x].binary_search_by_key(&y, |(j, _)| *j) {
            Ok(pos) => self.rows[x][pos].1,
            Err(_) => self.semiring.zero(),
        }
    }

    /// Stored entries of row `x`, ascending by column.
    pub fn row(&self, x: usize) -> &[(usize, Weight)] {
        &self.rows[x]
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, Weight)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |&(y, w)| (x, y, w)))
    }

    /// `⊕_{y ∈ cols} M(x,y)` for one row.
    pub fn row_sum_over(&self, x: usize, cols: &StateSet) -> Weight {
        let s = self.semiring;
        s.sum(
            self.rows[x]
                .iter()
                .filter(|(y, _)| cols.contains(*y))
                .map(|(_, w)| *w),
        )
    }

    /// Entrywise `⊕`.
    pub fn plus(&self, other: &WMatrix) -> Result<WMatrix> {
        self.check_compatible(other)?;
        let s = self.semiring;
        WMatrix::from_triples(s, self.n, self.triples().chain(other.triples()))
    }

    /// `M[rows, cols]`: keeps `M(x,y)` iff `x ∈ rows` and `y ∈ cols`.
    pub fn restrict(&self, rows: &StateSet, cols: &StateSet) -> WMatrix {
        assert_eq!(rows.universe(), self.n);
        assert_eq!(cols.universe(), self.n);
        let mut out = WMatrix::zeros(self.semiring, self.n);
        for x in rows.iter() {
            out.rows[x] = self.rows[x]
                .iter()
                .copied()
                .filter(|(y, _)| cols.contains(*y))
                .collect();
        }
        out
    }

    /// Replaces the listed rows by `0̄`.
    pub fn zero_rows(&self, rows: &StateSet) -> WMatrix {
        let mut out = self.clone();
        for x in rows.iter() {
            out.rows[x].clear();
        }
        out
    }

    /// Row vector times matrix: `(v·M)(y) = ⊕_x v(x) ⊗ M(x,y)`.
    pub fn vec_mat(v: &WVector, m: &WMatrix) -> Result<WVector> {
        m.check_vector(v)?;
        let s = m.semiring;
        let mut acc = vec![s.zero(); m.n];
        for (x, vx) in v.iter() {
            for &(y, w) in &m.rows[x] {
                acc[y] = s.plus(acc[y], s.times(vx, w));
            }
        }
        Ok(WVector::from_dense(s, &acc))
    }

    /// Matrix times column vector: `(M·w)(x) = ⊕_y M(x,y) ⊗ w(y)`.
    pub fn mat_vec(m: &WMatrix, w: &WVector) -> Result<WVector> {
        m.check_vector(w)?;
        let s = m.semiring;
        let dense = w.to_dense();
        let values: Vec<Weight> = m
            .rows
            .iter()
            .map(|row| s.sum(row.iter().map(|&(y, mxy)| s.times(mxy, dense[y]))))
            .collect();
        Ok(WVector::from_dense(s, &values))
    }

    /// Matrix product.
    pub fn mat_mat(a: &WMatrix, b: &WMatrix) -> Result<WMatrix> {
        a.check_compatible(b)?;
        let s = a.semiring;
        let n = a.n;
        let mut rows = Vec::with_capacity(n);
        let mut acc = vec![s.zero(); n];
        let mut touched = vec![false; n];
        for row in &a.rows {
            for &(y, axy) in row {
                for &(z, byz) in &b.rows[y] {
                    acc[z] = s.plus(acc[z], s.times(axy, byz));
                    touched[z] = true;
                }
            }
            let mut out_row = Vec::new();
            for z in 0..n {
                if touched[z] {
                    if !s.is_zero(acc[z]) {
                        out_row.push((z, acc[z]));
                    }
                    acc[z] = s.zero();
                    touched[z] = false;
                }
            }
            rows.push(out_row);
        }
        Ok(WMatrix { semiring: s, n, rows })
    }

    /// `M^t` by iterated squaring over the binary digits of `t`.
    pub fn power(&self, mut t: u64) -> WMatrix {
        let mut result = WMatrix::identity(self.semiring, self.n);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                result = WMatrix::mat_mat(&result, &base).expect("same shape");
            }
            t >>= 1;
            if t > 0 {
                base = WMatrix::mat_mat(&base, &base).expect("same shape");
            }
        }
        result
    }

    /// `⊕_{k=0}^{t} M^k`. Uses `(M ⊕ I)^t` with squaring on idempotent
    /// semirings, term-by-term accumulation otherwise.
    pub fn power_sum(&self, t: u64) -> WMatrix {
        if self.semiring.flags().idempotent {
            self.power_sum_by_squaring(t)
        } else {
            self.power_sum_by_accumulation(t)
        }
    }

    /// `(M ⊕ I)^t`; equals the power sum only on idempotent semirings.
    pub fn power_sum_by_squaring(&self, t: u64) -> WMatrix {
        let shifted = self
            .plus(&WMatrix::identity(self.semiring, self.n))
            .expect("same shape");
        shifted.power(t)
    }

    /// `I ⊕ M ⊕ M^2 ⊕ … ⊕ M^t` one term at a time.
    pub fn power_sum_by_accumulation(&self, t: u64) -> WMatrix {
        let mut acc = WMatrix::identity(self.semiring, self.n);
        let mut term = acc.clone();
        for _ in 0..t {
            term = WMatrix::mat_mat(&term, self).expect("same shape");
            if term.nnz() == 0 {
                break;
            }
            acc = acc.plus(&term).expect("same shape");
        }
        acc
    }

    fn check_compatible(&self, other: &WMatrix) -> Result<()> {
        if self.semiring != other.semiring {
            return Err(Error::SemiringMismatch(self.semiring.name(), other.semiring.name()));
        }
        if self.n != other.n {
            return Err(Error::Dimension(format!("matrix sizes {} and {}", self.n, other.n)));
        }
        Ok(())
    }

    fn check_vector(&self, v: &WVector) -> Result<()> {
        if self.semiring != v.semiring() {
            return Err(Error::SemiringMismatch(self.semiring.name(), v.semiring().name()));
        }
        if self.n != v.len() {
            return Err(Error::Dimension(format!("matrix size {} and vector length {}", self.n, v.len())));
        }
        Ok(())
    }
}

/// `(I - M)^{-1}` over ordinary reals for a `prob` matrix, by Gauss-Jordan
/// elimination with partial pivoting. Fails if the system is singular or the
/// residual `‖(I - M)N - I‖∞` exceeds `1e-9`.
pub fn inverse_of_identity_minus(m: &WMatrix) -> Result<WMatrix> {
    const RESIDUAL_TOL: f64 = 1e-9;
    if m.semiring() != Semiring::Prob {
        return Err(Error::Unsupported(format!(
            "linear solve is only defined over prob, not {}",
            m.semiring()
        )));
    }
    let n = m.dim();
    let mut a = vec![vec![0.0f64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for (x, y, w) in m.triples() {
        a[x][y] -= w.as_real();
    }
    let original = a.clone();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::Numeric("I - M is singular".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = a[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                a[i][j] -= factor * a[col][j];
                inv[i][j] -= factor * inv[col][j];
            }
        }
    }

    let mut residual = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut dot = 0.0;
            for k in 0..n {
                dot += original[i][k] * inv[k][j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((dot - target).abs());
        }
    }
    if residual > RESIDUAL_TOL {
        return Err(Error::Numeric(format!("residual {residual:e} exceeds {RESIDUAL_TOL:e}")));
    }

    let mut triples = Vec::new();
    for (i, row) in inv.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x < -RESIDUAL_TOL {
                return Err(Error::Numeric(format!(
                    "negative entry {x} in (I - M)^-1; the series does not converge"
                )));
            }
            if x.abs() > 1e-12 {
                triples.push((i, j, Weight::Real(x)));
            }
        }
    }
    WMatrix::from_triples(Semiring::Prob, n, triples)
}
