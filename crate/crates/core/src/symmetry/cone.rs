use std::collections::HashSet;

use serde::Serialize;

use super::character::{atom_multiplicities, induced_character, irreducible_atoms, sign_characters, Character};
use super::group::GroupSpec;
use crate::error::Result;
use crate::forms::Permutation;

/// `Ind_H^G L` for a subgroup class representative `H` and a line `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedGenerator {
    pub subgroup_order: usize,
    pub subgroup_generators: Vec<Permutation>,
    /// Values of `L` on the classes of `H`.
    pub line: Vec<i64>,
    pub character: Character,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeTerm {
    pub generator: InducedGenerator,
    pub multiplicity: i64,
}

/// Result of the search for `χ = Σ c_j Ind_{H_j}^G L_j` with `c_j ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConeVerdict {
    pub exists: bool,
    /// The decomposition found, if any (terms with `c_j > 0`).
    pub certificate: Option<Vec<ConeTerm>>,
    /// Number of distinct induced characters searched over.
    pub generators_searched: usize,
}

/// Distinct characters `Ind_H^G L`, over subgroup classes (by increasing
/// order) and their sign characters (trivial first).
pub fn monomial_generators(g: &GroupSpec) -> Result<Vec<InducedGenerator>> {
    let mut out: Vec<InducedGenerator> = Vec::new();
    for h in g.subgroups()? {
        for l in sign_characters(&h)? {
            let chi = induced_character(&h, &l, g)?;
            if out.iter().any(|x| x.character == chi) {
                continue;
            }
            out.push(InducedGenerator {
                subgroup_order: h.order(),
                subgroup_generators: h.generators().to_vec(),
                line: l.values().to_vec(),
                character: chi,
            });
        }
    }
    Ok(out)
}

/// Decides whether `χ` is a nonnegative integer combination of induced
/// one-dimensional characters. The certificate is the lexicographically
/// smallest multiset of generator indices.
pub fn monomial_cone_test(chi: &Character, g: &GroupSpec) -> Result<ConeVerdict> {
    let gens = monomial_generators(g)?;
    let atoms = irreducible_atoms(g)?;
    let target = atom_multiplicities(chi, &atoms, g)?;
    let vectors = gens.iter().map(|x| atom_multiplicities(&x.character, &atoms, g)).collect::<Result<Vec<_>>>()?;
    let mut search = Search { vectors: &vectors, failed: HashSet::new(), chosen: vec![0; vectors.len()] };
    let exists = search.run(0, target);
    let certificate = exists.then(|| {
        gens.iter()
            .zip(&search.chosen)
            .filter(|(_, &c)| c > 0)
            .map(|(x, &c)| ConeTerm { generator: x.clone(), multiplicity: c })
            .collect()
    });
    Ok(ConeVerdict { exists, certificate, generators_searched: gens.len() })
}

struct Search<'a> {
    vectors: &'a [Vec<i64>],
    failed: HashSet<(usize, Vec<i64>)>,
    chosen: Vec<i64>,
}

impl Search<'_> {
    fn run(&mut self, idx: usize, residual: Vec<i64>) -> bool {
        if residual.iter().all(|&x| x == 0) {
            self.chosen[idx..].iter_mut().for_each(|c| *c = 0);
            return true;
        }
        if idx == self.vectors.len() || self.failed.contains(&(idx, residual.clone())) {
            return false;
        }
        let v = &self.vectors[idx];
        let max = v
            .iter()
            .zip(&residual)
            .filter(|(&a, _)| a > 0)
            .map(|(&a, &r)| r / a)
            .min()
            .unwrap_or(0);
        for c in (0..=max).rev() {
            let next: Vec<i64> = residual.iter().zip(v).map(|(&r, &a)| r - c * a).collect();
            if self.run(idx + 1, next) {
                self.chosen[idx] = c;
                return true;
            }
        }
        self.failed.insert((idx, residual));
        false
    }
}
