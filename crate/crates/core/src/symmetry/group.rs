use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    /// The full symmetric group on the points.
    Symmetric,
    /// The cyclic group generated by the 3-cycle `(0 1 2)`.
    Cyclic3,
    /// Any other permutation group, given by generators.
    Generated,
}

/// A finite permutation group with its elements and conjugacy classes.
///
/// Elements are sorted lexicographically, so the identity is element 0 and
/// class 0 is the identity class.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    degree: usize,
    kind: GroupKind,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

/// Groups larger than this are rejected by the subgroup enumeration.
pub const MAX_ENUMERATED_ORDER: usize = 24;

impl GroupSpec {
    /// `S_{n+1}` acting on the vertices of `T^n`.
    pub fn symmetric(n: usize) -> Self {
        let m = n + 1;
        let mut gens = Permutation::coxeter_generators(m);
        if gens.is_empty() {
            gens.push(Permutation::identity(m));
        }
        Self::from_elements(m, GroupKind::Symmetric, gens, Permutation::all(m))
    }

    /// The subgroup `ℤ/3 = ⟨(0 1 2)⟩` of `S_{n+1}`, for `n ≥ 2`.
    pub fn z3(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!("ℤ/3 needs at least three vertices, T^{n} has {}", n + 1)));
        }
        let g = Self::three_cycle(n);
        let elements = vec![Permutation::identity(n + 1), g.clone(), g.compose(&g)];
        Ok(Self::from_elements(n + 1, GroupKind::Cyclic3, vec![g], elements))
    }

    /// The designated 3-cycle `0 → 1 → 2 → 0`.
    pub fn three_cycle(n: usize) -> Permutation {
        Permutation::cycle(n + 1, &[0, 1, 2])
    }

    /// The group generated by `gens`, acting on `degree` points.
    pub fn generated(degree: usize, gens: Vec<Permutation>) -> Result<Self> {
        if gens.iter().any(|g| g.degree() != degree) {
            return Err(Error::Dimension("generators act on different point sets".into()));
        }
        let elements = closure(degree, &gens);
        Ok(Self::from_elements(degree, GroupKind::Generated, gens, elements))
    }

    fn from_elements(degree: usize, kind: GroupKind, generators: Vec<Permutation>, mut elements: Vec<Permutation>) -> Self {
        elements.sort();
        elements.dedup();
        let index: BTreeMap<&Permutation, usize> = elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut class_of = vec![usize::MAX; elements.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..elements.len() {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            for x in &elements {
                let j = index[&x.compose(&elements[i]).compose(&x.inverse())];
                if class_of[j] == usize::MAX {
                    class_of[j] = c;
                    members.push(j);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        GroupSpec { degree, kind, generators, elements, classes, class_of }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.elements.binary_search(p).ok()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index_of(p).is_some()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn class_of_perm(&self, p: &Permutation) -> Option<usize> {
        self.index_of(p).map(|i| self.class_of[i])
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// The smallest element of each class.
    pub fn class_representatives(&self) -> Vec<&Permutation> {
        self.classes.iter().map(|c| &self.elements[c[0]]).collect()
    }

    /// The subgroup with the given elements (which must be closed).
    pub fn subgroup(&self, elements: Vec<Permutation>) -> GroupSpec {
        let gens = minimal_generators(self.degree, &elements);
        Self::from_elements(self.degree, GroupKind::Generated, gens, elements)
    }

    /// Bitmasks (over element indices) of all subgroups.
    pub(crate) fn all_subgroup_masks(&self) -> Result<Vec<u64>> {
        if self.order() > MAX_ENUMERATED_ORDER {
            return Err(Error::Unsupported(format!(
                "subgroup enumeration for a group of order {} (limit {MAX_ENUMERATED_ORDER})",
                self.order()
            )));
        }
        let table = self.multiplication_table();
        let trivial = 1u64;
        let mut seen: HashSet<u64> = HashSet::from([trivial]);
        let mut queue = VecDeque::from([trivial]);
        let mut out = vec![trivial];
        while let Some(s) = queue.pop_front() {
            for g in 0..self.order() {
                if s & (1 << g) != 0 {
                    continue;
                }
                let t = close_mask(&table, s | (1 << g));
                if seen.insert(t) {
                    out.push(t);
                    queue.push_back(t);
                }
            }
        }
        out.sort_by_key(|m| (m.count_ones(), *m));
        Ok(out)
    }

    pub(crate) fn multiplication_table(&self) -> Vec<Vec<usize>> {
        self.elements
            .iter()
            .map(|a| self.elements.iter().map(|b| self.index_of(&a.compose(b)).expect("closed")).collect())
            .collect()
    }

    pub(crate) fn mask_elements(&self, mask: u64) -> Vec<Permutation> {
        (0..self.order()).filter(|i| mask & (1 << i) != 0).map(|i| self.elements[i].clone()).collect()
    }

    /// Representatives of the conjugacy classes of subgroups, ordered by
    /// increasing order. Each representative is the conjugate whose element
    /// bitmask is smallest.
    pub fn subgroups(&self) -> Result<Vec<GroupSpec>> {
        let masks = self.all_subgroup_masks()?;
        let conj: Vec<Vec<usize>> = self
            .elements
            .iter()
            .map(|x| {
                let xi = x.inverse();
                self.elements.iter().map(|g| self.index_of(&x.compose(g).compose(&xi)).unwrap()).collect()
            })
            .collect();
        let mut reps: Vec<u64> = masks
            .iter()
            .map(|&m| {
                conj.iter()
                    .map(|perm| {
                        (0..self.order()).filter(|&i| m & (1 << i) != 0).fold(0u64, |acc, i| acc | (1 << perm[i]))
                    })
                    .min()
                    .unwrap()
            })
            .collect();
        reps.sort_by_key(|m| (m.count_ones(), *m));
        reps.dedup();
        Ok(reps.into_iter().map(|m| self.subgroup(self.mask_elements(m))).collect())
    }
}

fn close_mask(table: &[Vec<usize>], mut mask: u64) -> u64 {
    loop {
        let mut next = mask;
        for a in 0..table.len() {
            if mask & (1 << a) == 0 {
                continue;
            }
            for b in 0..table.len() {
                if mask & (1 << b) != 0 {
                    next |= 1 << table[a][b];
                }
            }
        }
        if next == mask {
            return mask;
        }
        mask = next;
    }
}

fn closure(degree: usize, gens: &[Permutation]) -> Vec<Permutation> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort();
    out
}

/// Greedy generating set: elements in order that enlarge the generated group.
fn minimal_generators(degree: usize, elements: &[Permutation]) -> Vec<Permutation> {
    let mut gens: Vec<Permutation> = Vec::new();
    let mut current: HashSet<Permutation> = HashSet::from([Permutation::identity(degree)]);
    let mut sorted = elements.to_vec();
    sorted.sort();
    for e in sorted {
        if !current.contains(&e) {
            gens.push(e);
            current = closure(degree, &gens).into_iter().collect();
        }
    }
    if gens.is_empty() {
        gens.push(Permutation::identity(degree));
    }
    gens
}
