use serde::Serialize;

use super::group::{GroupKind, GroupSpec};
use crate::error::{Error, Result};
use crate::forms::Permutation;
use crate::rational::Rational;

/// An integer class function, indexed by the conjugacy classes of the group
/// it was computed on (class 0 is the identity).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Character {
    values: Vec<i64>,
}

impl Character {
    pub fn new(values: Vec<i64>) -> Self {
        Character { values }
    }

    pub fn zero(num_classes: usize) -> Self {
        Character { values: vec![0; num_classes] }
    }

    pub fn trivial(g: &GroupSpec) -> Self {
        Character { values: vec![1; g.num_classes()] }
    }

    /// The sign character `1′` of a permutation group.
    pub fn sign(g: &GroupSpec) -> Self {
        Self::from_fn(g, |p| p.sign() as i64)
    }

    /// Evaluates a class function on class representatives.
    pub fn from_fn(g: &GroupSpec, f: impl Fn(&Permutation) -> i64) -> Self {
        Character { values: g.class_representatives().into_iter().map(f).collect() }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn dim(&self) -> i64 {
        self.values[0]
    }

    pub fn at(&self, class: usize) -> i64 {
        self.values[class]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn add(&self, other: &Character) -> Character {
        Character { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Character) -> Character {
        Character { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: i64) -> Character {
        Character { values: self.values.iter().map(|a| a * s).collect() }
    }

    /// Character of the tensor product.
    pub fn tensor(&self, other: &Character) -> Character {
        Character { values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }

    /// `(1/|G|) Σ_g χ(g) ψ(g)` (characters here are real).
    pub fn inner(&self, other: &Character, g: &GroupSpec) -> Rational {
        let sizes = g.class_sizes();
        let s: i64 = (0..self.values.len()).map(|c| sizes[c] as i64 * self.values[c] * other.values[c]).sum();
        Rational::new(s, g.order() as i64)
    }

    /// Restriction to a subgroup `h` of `g`.
    pub fn restrict(&self, g: &GroupSpec, h: &GroupSpec) -> Result<Character> {
        let values = h
            .class_representatives()
            .into_iter()
            .map(|p| g.class_of_perm(p).map(|c| self.values[c]))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Invalid("restriction to a non-subgroup".into()))?;
        Ok(Character { values })
    }
}

/// All homomorphisms `H → {±1}`: the trivial character and one for each
/// subgroup of index two.
pub fn sign_characters(h: &GroupSpec) -> Result<Vec<Character>> {
    let mut out = vec![Character::trivial(h)];
    let half = h.order() / 2;
    if h.order() % 2 != 0 {
        return Ok(out);
    }
    for mask in h.all_subgroup_masks()? {
        if mask.count_ones() as usize != half {
            continue;
        }
        let values = h.classes().iter().map(|c| if mask & (1 << c[0]) != 0 { 1 } else { -1 }).collect();
        out.push(Character { values });
    }
    Ok(out)
}

/// `Ind_H^G L (g) = (1/|H|) Σ_{x ∈ G, x⁻¹gx ∈ H} L(x⁻¹gx)`.
pub fn induced_character(h: &GroupSpec, l: &Character, g: &GroupSpec) -> Result<Character> {
    if h.degree() != g.degree() || h.elements().iter().any(|p| !g.contains(p)) {
        return Err(Error::Invalid("H is not a subgroup of G".into()));
    }
    let mut values = Vec::with_capacity(g.num_classes());
    for rep in g.class_representatives() {
        let mut acc = 0i64;
        for x in g.elements() {
            let y = x.inverse().compose(rep).compose(x);
            if let Some(c) = h.class_of_perm(&y) {
                acc += l.at(c);
            }
        }
        if acc % h.order() as i64 != 0 {
            return Err(Error::Internal("induced character is not integral".into()));
        }
        values.push(acc / h.order() as i64);
    }
    Ok(Character { values })
}

/// Partitions of `m` in decreasing lexicographic order.
pub fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=left.min(max)).rev() {
            cur.push(part);
            rec(left - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

fn young_subgroup(m: usize, shape: &[usize]) -> Result<GroupSpec> {
    let mut gens = Vec::new();
    let mut start = 0;
    for &len in shape {
        for i in start..start + len - 1 {
            gens.push(Permutation::transposition(m, i, i + 1));
        }
        start += len;
    }
    if gens.is_empty() {
        gens.push(Permutation::identity(m));
    }
    GroupSpec::generated(m, gens)
}

/// The real irreducible characters used as coordinates for cone membership.
///
/// For symmetric groups they come from Young's rule; for `ℤ/3` they are `1`
/// and the two-dimensional rotation `2`.
pub fn irreducible_atoms(g: &GroupSpec) -> Result<Vec<Character>> {
    match g.kind() {
        GroupKind::Cyclic3 => Ok(vec![Character::trivial(g), Character::new(vec![2, -1, -1])]),
        GroupKind::Symmetric => {
            let m = g.degree();
            let mut irr: Vec<Character> = Vec::new();
            for shape in partitions(m) {
                let young = young_subgroup(m, &shape)?;
                let mut chi = induced_character(&young, &Character::trivial(&young), g)?;
                for psi in &irr {
                    let c = chi.inner(psi, g);
                    let c = c.to_i64().filter(|_| c.is_integer()).ok_or_else(|| Error::Internal("Kostka number".into()))?;
                    chi = chi.sub(&psi.scale(c));
                }
                irr.push(chi);
            }
            Ok(irr)
        }
        GroupKind::Generated => Err(Error::Unsupported("irreducible characters of a general permutation group".into())),
    }
}

/// Multiplicity of each atom in `chi`; fails unless all are nonnegative integers.
pub fn atom_multiplicities(chi: &Character, atoms: &[Character], g: &GroupSpec) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(atoms.len());
    let mut rebuilt = Character::zero(g.num_classes());
    for a in atoms {
        let m = chi.inner(a, g) / a.inner(a, g);
        let m = m.to_i64().filter(|v| m.is_integer() && *v >= 0).ok_or_else(|| {
            Error::Invalid(format!("{chi:?} is not a character of a real representation (multiplicity {m})"))
        })?;
        rebuilt = rebuilt.add(&a.scale(m));
        out.push(m);
    }
    if rebuilt != *chi {
        return Err(Error::Invalid(format!("{chi:?} is not spanned by the irreducible characters")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_irreducibles() {
        let s3 = GroupSpec::symmetric(2);
        let irr = irreducible_atoms(&s3).unwrap();
        let dims: Vec<i64> = irr.iter().map(|c| c.dim()).collect();
        assert_eq!(dims, vec![1, 2, 1]);
        for (i, a) in irr.iter().enumerate() {
            for (j, b) in irr.iter().enumerate() {
                assert_eq!(a.inner(b, &s3), Rational::from_int((i == j) as i64));
            }
        }
        let s4 = GroupSpec::symmetric(3);
        let irr = irreducible_atoms(&s4).unwrap();
        assert_eq!(irr.iter().map(|c| c.dim()).collect::<Vec<_>>(), vec![1, 3, 2, 3, 1]);
        assert_eq!(irr[4], Character::sign(&s4));
    }

    #[test]
    fn sign_character_counts() {
        let z3 = GroupSpec::z3(2).unwrap();
        assert_eq!(sign_characters(&z3).unwrap().len(), 1);
        let s2 = GroupSpec::symmetric(1);
        assert_eq!(sign_characters(&s2).unwrap().len(), 2);
        let s4 = GroupSpec::symmetric(3);
        let sc = sign_characters(&s4).unwrap();
        assert_eq!(sc, vec![Character::trivial(&s4), Character::sign(&s4)]);
    }

    #[test]
    fn induction_examples() {
        let z3 = GroupSpec::z3(2).unwrap();
        let e = z3.subgroup(vec![Permutation::identity(3)]);
        let reg = induced_character(&e, &Character::trivial(&e), &z3).unwrap();
        assert_eq!(reg.values(), &[3, 0, 0]);
        let triv = induced_character(&z3, &Character::trivial(&z3), &z3).unwrap();
        assert_eq!(triv, Character::trivial(&z3));
    }

    #[test]
    fn induction_is_transitive() {
        let s3 = GroupSpec::symmetric(2);
        let c2 = s3.subgroup(vec![Permutation::identity(3), Permutation::transposition(3, 0, 1)]);
        let e = s3.subgroup(vec![Permutation::identity(3)]);
        let direct = induced_character(&e, &Character::trivial(&e), &s3).unwrap();
        // Ind_e^{C2} 1 = 1 + sgn on C2, then induce each summand
        let mid = induced_character(&e, &Character::trivial(&e), &c2).unwrap();
        let parts = sign_characters(&c2).unwrap();
        let mults = [mid.inner(&parts[0], &c2), mid.inner(&parts[1], &c2)];
        assert_eq!(mults, [Rational::one(), Rational::one()]);
        let two_step = induced_character(&c2, &parts[0], &s3).unwrap().add(&induced_character(&c2, &parts[1], &s3).unwrap());
        assert_eq!(direct, two_step);
        assert_eq!(direct.values(), &[6, 0, 0]);
    }

    #[test]
    fn partitions_in_order() {
        assert_eq!(partitions(4), vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
    }
}
