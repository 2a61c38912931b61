//! Exact linear algebra over the rationals.
//!
//! Everything is built on [`Echelon`], an incremental row-echelon structure over
//! sparse vectors keyed by any ordered type. Inserting vectors one at a time
//! yields rank, the relations among the inserted vectors (left nullspace), and
//! coordinates of further vectors in terms of the independent inputs.
//! Pivots are always the smallest key of a row, so results are deterministic.

use std::collections::BTreeMap;
use std::ops::Bound;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A sparse vector: key to nonzero coefficient.
pub type SparseVec<K> = BTreeMap<K, Rational>;

/// `dst += factor * src`, dropping entries that cancel.
pub fn axpy<'a, K, I>(dst: &mut SparseVec<K>, factor: &Rational, src: I)
where
    K: Ord + Clone + 'a,
    I: IntoIterator<Item = (&'a K, &'a Rational)>,
{
    if factor.is_zero() {
        return;
    }
    for (k, v) in src {
        let delta = factor * v;
        match dst.get_mut(k) {
            Some(e) => {
                *e += delta;
                if e.is_zero() {
                    dst.remove(k);
                }
            }
            None => {
                if !delta.is_zero() {
                    dst.insert(k.clone(), delta);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Row<K> {
    /// First entry is the pivot, normalized to one; remaining keys are larger.
    entries: Vec<(K, Rational)>,
    /// This row as a combination of the tagged inputs.
    combo: SparseVec<usize>,
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Insertion {
    Independent,
    /// The vector is dependent; the relation `Σ c_t · input_t = 0` over tags,
    /// with coefficient 1 on the inserted vector's own tag.
    Dependent(SparseVec<usize>),
}

/// Incremental row-echelon form over sparse rational vectors.
#[derive(Debug, Clone)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, Row<K>>,
    tags: Vec<usize>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new(), tags: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Tags of the inputs that were independent, in insertion order.
    pub fn independent_tags(&self) -> &[usize] {
        &self.tags
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    /// Reduces `v` in place; returns the combination of tagged inputs that was
    /// subtracted, so that `v_in = Σ combo_t input_t + v_out`.
    fn reduce_tracked(&self, v: &mut SparseVec<K>, track: bool) -> SparseVec<usize> {
        let mut combo = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = {
                let mut it = match &cursor {
                    None => v.range::<K, (Bound<&K>, Bound<&K>)>((Bound::Unbounded, Bound::Unbounded)),
                    Some(c) => v.range::<K, (Bound<&K>, Bound<&K>)>((Bound::Excluded(c), Bound::Unbounded)),
                };
                it.find(|(k, _)| self.rows.contains_key(*k)).map(|(k, c)| (k.clone(), c.clone()))
            };
            let Some((key, coeff)) = next else { break };
            let row = &self.rows[&key];
            let neg = -&coeff;
            axpy(v, &neg, row.entries.iter().map(|(k, c)| (k, c)));
            if track {
                axpy(&mut combo, &coeff, row.combo.iter());
            }
            cursor = Some(key);
        }
        combo
    }

    /// Reduces `v` against the current rows and returns the residual.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        self.reduce_tracked(&mut v, false);
        v
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone()).is_empty()
    }

    /// Coordinates of `v` in terms of the independent tagged inputs, or `None`
    /// when `v` is outside their span.
    pub fn express(&self, v: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let mut w = v.clone();
        let combo = self.reduce_tracked(&mut w, true);
        w.is_empty().then_some(combo)
    }

    /// Inserts `v` under `tag`. Tags must be distinct across insertions.
    pub fn insert(&mut self, mut v: SparseVec<K>, tag: usize) -> Insertion {
        let sub = self.reduce_tracked(&mut v, true);
        let mut combo = SparseVec::new();
        combo.insert(tag, Rational::one());
        axpy(&mut combo, &-Rational::one(), sub.iter());
        if v.is_empty() {
            return Insertion::Dependent(combo);
        }
        let (pivot, lead) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        let inv = lead.recip();
        let entries: Vec<(K, Rational)> = v.into_iter().map(|(k, c)| (k, &c * &inv)).collect();
        for c in combo.values_mut() {
            *c *= &inv;
        }
        self.rows.insert(pivot, Row { entries, combo });
        self.tags.push(tag);
        Insertion::Independent
    }

    /// Renames the tags referenced by stored combinations.
    pub fn relabel_tags(&mut self, f: impl Fn(usize) -> usize) {
        for row in self.rows.values_mut() {
            let old = std::mem::take(&mut row.combo);
            row.combo = old.into_iter().map(|(t, c)| (f(t), c)).collect();
        }
        for t in &mut self.tags {
            *t = f(*t);
        }
    }
}

/// Rank of a family of sparse vectors.
pub fn rank_of<K: Ord + Clone>(vectors: impl IntoIterator<Item = SparseVec<K>>) -> usize {
    let mut e = Echelon::new();
    for (i, v) in vectors.into_iter().enumerate() {
        e.insert(v, i);
    }
    e.rank()
}

/// Basis of the relations `Σ c_i v_i = 0` among the given vectors.
pub fn relations<K: Ord + Clone>(vectors: impl IntoIterator<Item = SparseVec<K>>) -> Vec<SparseVec<usize>> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (i, v) in vectors.into_iter().enumerate() {
        if let Insertion::Dependent(rel) = e.insert(v, i) {
            out.push(rel);
        }
    }
    out
}

/// Rank of the vectors reduced modulo `p`, or `None` if some denominator vanishes mod `p`.
fn rank_mod<'a, K: Ord + Clone + 'a>(vectors: &[&'a SparseVec<K>], p: u64) -> Option<usize> {
    use crate::modular::{mul_mod, pow_mod};
    let mut cols: BTreeMap<&K, usize> = BTreeMap::new();
    for v in vectors {
        for k in v.keys() {
            let next = cols.len();
            cols.entry(k).or_insert(next);
        }
    }
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut row = vec![0u64; cols.len()];
        for (k, c) in v.iter() {
            row[cols[k]] = c.residue(p)?;
        }
        rows.push(row);
    }
    let mut rank = 0;
    for col in 0..cols.len() {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][col], p - 2, p);
        let pivot_row: Vec<u64> = rows[rank].iter().map(|&x| mul_mod(x, inv, p)).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col];
            if f == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x = (*x + p - mul_mod(f, y, p)) % p;
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// A sound certificate of linear independence: full rank modulo a prime
/// implies full rank over the rationals. `false` means "not certified",
/// not "dependent".
pub fn certify_independent<K: Ord + Clone>(vectors: &[&SparseVec<K>]) -> bool {
    crate::modular::primes().take(3).find_map(|p| rank_mod(vectors, p)).is_some_and(|r| r == vectors.len())
}

/// Nonzero entries of `v` times the lcm of their denominators.
fn integer_sparse(v: &[Rational]) -> Vec<(usize, BigInt)> {
    let lcm = v.iter().filter(|c| !c.is_zero()).fold(BigInt::one(), |l, c| l.lcm(&c.denom()));
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j, c.numer() * (&lcm / c.denom())))
        .collect()
}

/// Whether every scaled row is orthogonal to `x`.
fn annihilates(rows: &[Vec<(usize, BigInt)>], x: &[Rational]) -> bool {
    let xs = integer_sparse(x);
    let mut dense = vec![BigInt::zero(); x.len()];
    for (j, c) in xs {
        dense[j] = c;
    }
    rows.iter().all(|row| row.iter().fold(BigInt::zero(), |acc, (j, a)| acc + a * &dense[*j]).is_zero())
}

/// Dense exact matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Rational::from_int(v)).collect()).collect())
            .expect("rectangular literal")
    }

    /// Builds a matrix whose `j`-th column is the given sparse vector.
    pub fn from_sparse_columns(rows: usize, cols: &[SparseVec<usize>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (&i, v) in col {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn column_sparse(&self, j: usize) -> SparseVec<usize> {
        (0..self.rows).filter(|&i| !self[(i, j)].is_zero()).map(|i| (i, self[(i, j)].clone())).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    fn column_echelon(&self) -> (Echelon<usize>, Vec<SparseVec<usize>>) {
        let mut e = Echelon::new();
        let mut rels = Vec::new();
        for j in 0..self.cols {
            if let Insertion::Dependent(rel) = e.insert(self.column_sparse(j), j) {
                rels.push(rel);
            }
        }
        (e, rels)
    }

    pub fn rank(&self) -> usize {
        // rank mod p never exceeds the rank, so a maximal value is exact
        let full = self.rows.min(self.cols);
        let rows: Vec<SparseVec<usize>> = (0..self.rows)
            .map(|i| self.row(i).iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, c.clone())).collect())
            .collect();
        let refs: Vec<&SparseVec<usize>> = rows.iter().collect();
        if full > 0 && crate::modular::primes().take(3).find_map(|p| rank_mod(&refs, p)) == Some(full) {
            return full;
        }
        self.column_echelon().0.rank()
    }

    /// Basis of `{x : A x = 0}`, one vector per non-pivot column, with a one in
    /// that column and zeros in the other non-pivot columns.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        if let Some((_, ns)) = self.nullspace_modular() {
            return ns;
        }
        self.column_echelon()
            .1
            .into_iter()
            .map(|rel| {
                let mut x = vec![Rational::zero(); self.cols];
                for (j, c) in rel {
                    x[j] = c;
                }
                x
            })
            .collect()
    }

    /// The nullspace from reduced echelon forms modulo several primes, lifted by
    /// Chinese remaindering and rational reconstruction. The candidate is
    /// checked exactly, so a returned basis is always correct: its vectors are
    /// independent null vectors and there are `cols - rank_p ≥ cols - rank` of them.
    fn nullspace_modular(&self) -> Option<(Vec<usize>, Vec<Vec<Rational>>)> {
        use crate::modular::{crt_step, primes, reconstruct, reduce_rows, rref_mod};
        const MAX_PRIMES: usize = 400;
        if self.rows == 0 || self.cols == 0 {
            return None;
        }
        // (pivots, accumulated residues of R[i][f] for pivot rows i and free columns f, modulus)
        let mut state: Option<(Vec<usize>, Vec<BigInt>, BigInt)> = None;
        let mut integer_rows = None;
        for p in primes().take(MAX_PRIMES) {
            let Some(mut a) = reduce_rows(self.data.chunks(self.cols), p) else { continue };
            let pivots = rref_mod(&mut a, self.cols, p);
            let free: Vec<usize> = (0..self.cols).filter(|j| pivots.binary_search(j).is_err()).collect();
            let residues: Vec<u64> = free.iter().flat_map(|&f| (0..pivots.len()).map(move |i| (i, f))).map(|(i, f)| a[i][f]).collect();
            let better = match &state {
                None => true,
                Some((old, _, _)) => pivots.len() > old.len() || (pivots.len() == old.len() && pivots < *old),
            };
            if better {
                state = Some((pivots, residues.iter().map(|&r| BigInt::from(r)).collect(), BigInt::from(p)));
            } else if state.as_ref().is_some_and(|(old, _, _)| *old == pivots) {
                let (_, acc, m) = state.as_mut().unwrap();
                for (x, &r) in acc.iter_mut().zip(&residues) {
                    *x = crt_step(x, m, r, p);
                }
                *m *= p;
            } else {
                continue;
            }
            let (pivots, acc, m) = state.as_ref().unwrap();
            let Some(values) = acc.par_iter().map(|x| reconstruct(x, m)).collect::<Option<Vec<_>>>() else { continue };
            let np = pivots.len();
            let vectors: Vec<Vec<Rational>> = (0..self.cols)
                .filter(|j| pivots.binary_search(j).is_err())
                .enumerate()
                .map(|(t, f)| {
                    let col = &values[t * np..(t + 1) * np];
                    let mut x = vec![Rational::zero(); self.cols];
                    x[f] = Rational::one();
                    for (&pc, v) in pivots.iter().zip(col) {
                        x[pc] = -v.clone();
                    }
                    x
                })
                .collect();
            let rows = integer_rows.get_or_insert_with(|| self.integer_rows());
            if vectors.par_iter().all(|x| annihilates(rows, x)) {
                return Some((pivots.clone(), vectors));
            }
        }
        None
    }

    /// Each row scaled by the lcm of its denominators, as sparse integers.
    fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        (0..self.rows).into_par_iter().map(|i| integer_sparse(self.row(i))).collect()
    }

    /// Solves `A x = b`. Free variables are set to zero; the solution is
    /// unique exactly when `rank == cols`.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side has {} entries, expected {}", b.len(), self.rows)));
        }
        let (e, _) = self.column_echelon();
        let rhs: SparseVec<usize> = b.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect();
        let combo = e.express(&rhs).ok_or(Error::Inconsistent)?;
        let mut x = vec![Rational::zero(); self.cols];
        for (j, c) in combo {
            x[j] = c;
        }
        Ok(x)
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        self.solve_many(&Self::identity(self.rows))
    }

    /// `A⁻¹ B` for square nonsingular `A`.
    pub fn solve_many(&self, b: &Matrix) -> Result<Matrix> {
        if self.rows != self.cols || b.rows != self.rows {
            return Err(Error::Dimension(format!(
                "cannot solve a {}x{} system with {} right-hand rows",
                self.rows, self.cols, b.rows
            )));
        }
        let (n, m) = (self.rows, b.cols);
        // the nullspace of [A | B] is spanned by the columns of [-A⁻¹B; I]
        let mut aug = Self::zeros(n, n + m);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..m {
                aug[(i, n + j)] = b[(i, j)].clone();
            }
        }
        if let Some((pivots, ns)) = aug.nullspace_modular() {
            // the pivots are exact, since the nullspace was verified
            if pivots.len() != n || pivots.last().is_some_and(|&p| p >= n) {
                return Err(Error::Singular);
            }
            let mut x = Self::zeros(n, m);
            for (f, v) in ns.iter().enumerate() {
                for i in 0..n {
                    x[(i, f)] = -v[i].clone();
                }
            }
            return Ok(x);
        }
        let (e, rels) = self.column_echelon();
        if !rels.is_empty() {
            return Err(Error::Singular);
        }
        let mut x = Self::zeros(n, m);
        for f in 0..m {
            let combo = e.express(&b.column_sparse(f)).ok_or(Error::Singular)?;
            for (j, c) in combo {
                x[(j, f)] = c;
            }
        }
        Ok(x)
    }

    pub fn determinant(&self) -> Result<Rational> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            let inv = piv.recip();
            for r in c + 1..n {
                if a[(r, c)].is_zero() {
                    continue;
                }
                let f = &a[(r, c)] * &inv;
                for j in c..n {
                    let d = &f * &a[(c, j)];
                    a[(r, j)] -= d;
                }
            }
        }
        Ok(det)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}
