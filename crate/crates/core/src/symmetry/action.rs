use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::character::Character;
use super::group::GroupSpec;
use crate::error::{Error, Result};
use crate::forms::{Permutation, PolyForm};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::spaces::FormSpace;

/// Matrix of `pullback(π, ·)` on `V`: column `j` holds the coordinates of the
/// image of basis element `j`.
pub fn action_matrix(v: &FormSpace, pi: &Permutation) -> Result<Matrix> {
    let cols = v
        .basis()
        .par_iter()
        .map(|b| v.coords(&b.pullback(pi)?))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| match e {
            Error::NotInSpace(s) => Error::NotInSpace(format!("image under {pi} leaves the space: {s}")),
            e => e,
        })?;
    let mut m = Matrix::zeros(v.dim(), v.dim());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, c) in col.into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

fn trace_of_action(v: &FormSpace, pi: &Permutation) -> Result<i64> {
    let t: Rational = if pi.is_identity() {
        Rational::from_int(v.dim() as i64)
    } else {
        action_matrix(v, pi)?.trace()
    };
    t.to_i64().filter(|_| t.is_integer()).ok_or_else(|| Error::Internal(format!("non-integral character value {t}")))
}

/// The character of `V` as a representation of `G`.
pub fn character(v: &FormSpace, g: &GroupSpec) -> Result<Character> {
    let values = g.class_representatives().into_iter().map(|p| trace_of_action(v, p)).collect::<Result<Vec<_>>>()?;
    Ok(Character::new(values))
}

/// `V ≅ m·1 ⊕ n2·2` as a `ℤ/3`-representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Z3Decomposition {
    pub m: i64,
    pub n2: i64,
}

impl Z3Decomposition {
    /// From the dimension and the trace of the 3-cycle.
    pub fn from_trace(dim: i64, trace: i64) -> Result<Self> {
        let (a, b) = (dim + 2 * trace, dim - trace);
        if a % 3 != 0 || b % 3 != 0 || a < 0 || b < 0 {
            return Err(Error::Internal(format!("(dim {dim}, trace {trace}) is not a ℤ/3 character")));
        }
        Ok(Z3Decomposition { m: a / 3, n2: b / 3 })
    }

    pub fn from_character(chi: &Character) -> Result<Self> {
        Self::from_trace(chi.dim(), chi.at(1))
    }

    pub fn dim(&self) -> i64 {
        self.m + 2 * self.n2
    }

    /// Whether an up-to-sign invariant basis can exist (`m ≥ n2`).
    pub fn admits_invariant_basis(&self) -> bool {
        self.m >= self.n2
    }

    pub fn direct_sum(&self, other: &Z3Decomposition) -> Z3Decomposition {
        Z3Decomposition { m: self.m + other.m, n2: self.n2 + other.n2 }
    }

    pub fn tensor(&self, other: &Z3Decomposition) -> Z3Decomposition {
        // 1⊗1 = 1, 1⊗2 = 2, 2⊗2 = 2·1 ⊕ 2
        Z3Decomposition {
            m: self.m * other.m + 2 * self.n2 * other.n2,
            n2: self.m * other.n2 + self.n2 * other.m + self.n2 * other.n2,
        }
    }
}

/// Decomposition of `V` under `⟨(0 1 2)⟩`.
pub fn z3_decompose(v: &FormSpace) -> Result<Z3Decomposition> {
    if v.n() < 2 {
        return Err(Error::Invalid(format!("ℤ/3 does not act on T^{}", v.n())));
    }
    let trace = trace_of_action(v, &GroupSpec::three_cycle(v.n()))?;
    Z3Decomposition::from_trace(v.dim() as i64, trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Z3Verdict {
    /// True when the `ℤ/3` test is passed (`m ≥ n2`).
    pub passes: bool,
    pub certificate: Z3Decomposition,
}

pub fn z3_obstruction(v: &FormSpace) -> Result<Z3Verdict> {
    let d = z3_decompose(v)?;
    Ok(Z3Verdict { passes: d.admits_invariant_basis(), certificate: d })
}

/// How one group element permutes a basis up to sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignedPermutationImage {
    pub element: Permutation,
    /// `g·ξ_i = signs[i] · ξ_{targets[i]}`.
    pub targets: Vec<usize>,
    pub signs: Vec<i8>,
}

/// The first basis element whose image is not `±` a basis element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureWitness {
    pub element: Permutation,
    pub index: usize,
    pub image: PolyForm,
}

/// Checks that every element of `G` maps each basis form to `±` a basis form.
///
/// Returns one transcript entry per group element, in the group's element order.
pub fn verify_invariant_up_to_sign(
    basis: &[PolyForm],
    g: &GroupSpec,
) -> Result<std::result::Result<Vec<SignedPermutationImage>, FailureWitness>> {
    let canon: Vec<PolyForm> = basis.iter().map(PolyForm::canonicalize).collect();
    let lookup: HashMap<&PolyForm, usize> = canon.iter().enumerate().map(|(i, f)| (f, i)).collect();
    if lookup.len() != canon.len() {
        return Err(Error::Invalid("basis contains repeated forms".into()));
    }
    let entries: Vec<std::result::Result<SignedPermutationImage, FailureWitness>> = g
        .elements()
        .par_iter()
        .map(|pi| -> Result<_> {
            let mut targets = Vec::with_capacity(canon.len());
            let mut signs = Vec::with_capacity(canon.len());
            let mut hit = vec![false; canon.len()];
            for (i, b) in canon.iter().enumerate() {
                let image = b.pullback(pi)?;
                let found = match lookup.get(&image) {
                    Some(&t) => Some((t, 1)),
                    None => lookup.get(&-&image).map(|&t| (t, -1)),
                };
                match found {
                    Some((t, s)) if !hit[t] => {
                        hit[t] = true;
                        targets.push(t);
                        signs.push(s);
                    }
                    _ => return Ok(Err(FailureWitness { element: pi.clone(), index: i, image })),
                }
            }
            Ok(Ok(SignedPermutationImage { element: pi.clone(), targets, signs }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(entries.into_iter().collect())
}

/// Re-checks a transcript entry exactly.
pub fn check_transcript_entry(basis: &[PolyForm], entry: &SignedPermutationImage) -> Result<bool> {
    for (i, b) in basis.iter().enumerate() {
        let image = b.pullback(&entry.element)?;
        let target = basis[entry.targets[i]].scale(&Rational::from_int(entry.signs[i] as i64));
        if image != target.canonicalize() {
            return Ok(false);
        }
    }
    Ok(true)
}
