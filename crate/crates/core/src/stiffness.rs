//! Orbits of the scalar stiffness matrix `a(u, v) = ∫ ⟨grad u, grad v⟩` on
//! the monomial basis under simultaneous permutation of rows and columns.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{MultiIndex, Permutation, PolyForm};
use crate::linalg::Matrix;
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize)]
pub struct StiffnessOrbit {
    /// `(row, column)` indices of the first entry of the orbit, `row ≤ column`.
    pub representative: (usize, usize),
    pub row: String,
    pub column: String,
    /// Number of unordered index pairs in the orbit.
    pub size: usize,
    pub value: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct StiffnessReport {
    pub r: i64,
    pub n: usize,
    pub monomials: Vec<String>,
    pub matrix: Matrix,
    pub orbits: Vec<StiffnessOrbit>,
}

fn monomial_name(a: &MultiIndex) -> String {
    PolyForm::monomial(a.len() - 1, *a).to_string()
}

fn permute(a: &MultiIndex, pi: &Permutation) -> MultiIndex {
    let mut b = MultiIndex::zero(a.len());
    for i in 0..a.len() {
        b.set(pi.apply(i), a.get(i));
    }
    b
}

/// The monomials `λ^α`, `|α| = r`, and the stiffness matrix on them.
pub fn stiffness_matrix(r: i64, n: usize) -> Result<(Vec<MultiIndex>, Matrix)> {
    if r < 1 {
        return Err(Error::Invalid(format!("stiffness needs degree r ≥ 1, got {r}")));
    }
    if n == 0 {
        return Err(Error::Invalid("stiffness needs n ≥ 1".into()));
    }
    let mono = MultiIndex::all_of_degree(n + 1, r as u32);
    let grads = mono
        .iter()
        .map(|a| PolyForm::monomial(n, *a).exterior_derivative().map(|g| g.canonicalize()))
        .collect::<Result<Vec<_>>>()?;
    let m = mono.len();
    let rows: Vec<Vec<Rational>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| grads[i].inner_product(&grads[j])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    Ok((mono, Matrix::from_rows(rows)?))
}

/// Groups the entries `a(λ^α, λ^β)` into orbits of unordered pairs under `S_{n+1}`
/// and checks that each orbit carries a single value.
pub fn stiffness_orbits(r: i64, n: usize) -> Result<StiffnessReport> {
    let (mono, matrix) = stiffness_matrix(r, n)?;
    let index: BTreeMap<MultiIndex, usize> = mono.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let perms = Permutation::all(n + 1);
    let mut seen = vec![vec![false; mono.len()]; mono.len()];
    let mut orbits = Vec::new();
    for i in 0..mono.len() {
        for j in i..mono.len() {
            if seen[i][j] {
                continue;
            }
            let mut size = 0;
            for pi in &perms {
                let (a, b) = (index[&permute(&mono[i], pi)], index[&permute(&mono[j], pi)]);
                let (a, b) = (a.min(b), a.max(b));
                if !seen[a][b] {
                    seen[a][b] = true;
                    size += 1;
                    if matrix[(a, b)] != matrix[(i, j)] || matrix[(b, a)] != matrix[(i, j)] {
                        return Err(Error::Internal(format!("stiffness entry ({a}, {b}) differs from ({i}, {j})")));
                    }
                }
            }
            orbits.push(StiffnessOrbit {
                representative: (i, j),
                row: monomial_name(&mono[i]),
                column: monomial_name(&mono[j]),
                size,
                value: matrix[(i, j)].clone(),
            });
        }
    }
    Ok(StiffnessReport { r, n, monomials: mono.iter().map(monomial_name).collect(), matrix, orbits })
}
