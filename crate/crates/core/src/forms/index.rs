use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest supported number of barycentric variables (simplex dimension + 1).
pub const MAX_VERTICES: usize = 8;

/// Exponent vector of a barycentric monomial `λ_0^{a_0} ⋯ λ_n^{a_n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exps: [u8; MAX_VERTICES],
    len: u8,
}

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_VERTICES, "too many variables");
        MultiIndex { exps: [0; MAX_VERTICES], len: len as u8 }
    }

    pub fn new(exps: &[u8]) -> Self {
        let mut m = Self::zero(exps.len());
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut m = Self::zero(len);
        m.exps[i] = 1;
        m
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps[..self.len as usize]
    }

    pub fn get(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn set(&mut self, i: usize, e: u8) {
        debug_assert!(i < self.len());
        self.exps[i] = e;
    }

    pub fn degree(&self) -> u32 {
        self.exps().iter().map(|&e| e as u32).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len, other.len);
        let mut m = *self;
        for i in 0..self.len() {
            m.exps[i] += other.exps[i];
        }
        m
    }

    /// All exponent vectors of `len` variables with total degree exactly `degree`,
    /// in decreasing lexicographic order (`λ_0^d` first).
    pub fn all_of_degree(len: usize, degree: u32) -> Vec<MultiIndex> {
        fn rec(len: usize, slot: usize, left: u32, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
            if slot + 1 == len {
                cur.exps[slot] = left as u8;
                out.push(*cur);
                return;
            }
            for e in (0..=left).rev() {
                cur.exps[slot] = e as u8;
                rec(len, slot + 1, left - e, cur, out);
            }
            cur.exps[slot] = 0;
        }
        let mut out = Vec::new();
        if len == 0 {
            if degree == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        let mut cur = MultiIndex::zero(len);
        rec(len, 0, degree, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps())
    }
}

/// An increasing list of distinct vertex indices, encoding `dλ_{σ_1} ∧ ⋯ ∧ dλ_{σ_k}`.
///
/// Ordered lexicographically on the increasing sequence.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AltIndex {
    mask: u16,
}

impl AltIndex {
    pub const EMPTY: AltIndex = AltIndex { mask: 0 };

    pub fn from_mask(mask: u16) -> Self {
        AltIndex { mask }
    }

    /// Panics unless `vertices` is strictly increasing.
    pub fn new(vertices: &[usize]) -> Self {
        let mut mask = 0u16;
        let mut prev: Option<usize> = None;
        for &v in vertices {
            assert!(v < MAX_VERTICES, "vertex index {v} out of range");
            assert!(prev.map_or(true, |p| p < v), "alternating index must be strictly increasing");
            mask |= 1 << v;
            prev = Some(v);
        }
        AltIndex { mask }
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask & (1 << v) != 0
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.mask;
        (0..MAX_VERTICES).filter(move |&i| m & (1 << i) != 0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.vertices().collect()
    }

    pub fn with(&self, v: usize) -> AltIndex {
        AltIndex { mask: self.mask | (1 << v) }
    }

    pub fn without(&self, v: usize) -> AltIndex {
        AltIndex { mask: self.mask & !(1 << v) }
    }

    /// Number of members strictly below `v`.
    pub fn count_below(&self, v: usize) -> u32 {
        (self.mask & ((1u16 << v) - 1)).count_ones()
    }

    /// Sign of `dλ_self ∧ dλ_other` relative to the sorted union, or `None`
    /// when the two share an index.
    pub fn merge_sign(&self, other: &AltIndex) -> Option<i32> {
        if self.mask & other.mask != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for j in other.vertices() {
            inversions += (self.mask >> (j + 1)).count_ones();
        }
        Some(if inversions % 2 == 0 { 1 } else { -1 })
    }

    pub fn union(&self, other: &AltIndex) -> AltIndex {
        AltIndex { mask: self.mask | other.mask }
    }

    /// All `k`-subsets of `{0, …, m-1}` in lexicographic order.
    pub fn all_of_size(m: usize, k: usize) -> Vec<AltIndex> {
        let mut out: Vec<AltIndex> =
            (0u32..(1u32 << m)).filter(|s| s.count_ones() as usize == k).map(|s| AltIndex { mask: s as u16 }).collect();
        out.sort();
        out
    }
}

impl Ord for AltIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.mask == other.mask {
            return Ordering::Equal;
        }
        let diff = self.mask ^ other.mask;
        let low = diff & diff.wrapping_neg();
        let (a_has, b_has) = (self.mask & low != 0, other.mask & low != 0);
        // Lexicographic on increasing sequences; when one is a prefix of the
        // other, the shorter sorts first.
        let below = low - 1;
        let a_tail = self.mask & !below;
        let b_tail = other.mask & !below;
        match (a_has, b_has) {
            (true, false) if b_tail == 0 => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, true) if a_tail == 0 => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => unreachable!(),
        }
    }
}

impl PartialOrd for AltIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AltIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

/// A face `F_S` of the simplex, identified by its increasing vertex set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct FaceId {
    verts: AltIndex,
}

impl FaceId {
    /// Panics on an empty or non-increasing vertex list.
    pub fn new(vertices: &[usize]) -> Self {
        assert!(!vertices.is_empty(), "a face needs at least one vertex");
        FaceId { verts: AltIndex::new(vertices) }
    }

    pub fn whole(n: usize) -> Self {
        FaceId { verts: AltIndex::from_mask(((1u32 << (n + 1)) - 1) as u16) }
    }

    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.verts.to_vec()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.verts.contains(v)
    }

    pub fn as_alt(&self) -> AltIndex {
        self.verts
    }

    /// Position of vertex `v` in the increasing order of this face.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.contains(v).then(|| self.verts.count_below(v) as usize)
    }

    /// All faces of `T^n` of dimension `d`, in lexicographic vertex order.
    pub fn all_of_dim(n: usize, d: usize) -> Vec<FaceId> {
        AltIndex::all_of_size(n + 1, d + 1).into_iter().map(|verts| FaceId { verts }).collect()
    }

    pub fn is_subface_of(&self, other: &FaceId) -> bool {
        self.verts.mask() & !other.verts.mask() == 0
    }
}

impl From<FaceId> for Vec<usize> {
    fn from(f: FaceId) -> Self {
        f.vertices()
    }
}

impl TryFrom<Vec<usize>> for FaceId {
    type Error = String;
    fn try_from(v: Vec<usize>) -> Result<Self, String> {
        if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) || v.iter().any(|&x| x >= MAX_VERTICES) {
            return Err(format!("invalid face vertex list {v:?}"));
        }
        Ok(FaceId::new(&v))
    }
}

impl fmt::Debug for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F")?;
        for v in self.verts.vertices() {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alt_index_order_is_lexicographic() {
        let mut all: Vec<AltIndex> = (0u16..16).map(AltIndex::from_mask).collect();
        all.sort();
        let seqs: Vec<Vec<usize>> = all.iter().map(|a| a.to_vec()).collect();
        let mut expected = seqs.clone();
        expected.sort();
        assert_eq!(seqs, expected);
    }

    #[test]
    fn merge_sign_matches_inversions() {
        let a = AltIndex::new(&[2]);
        let b = AltIndex::new(&[1]);
        assert_eq!(a.merge_sign(&b), Some(-1));
        assert_eq!(b.merge_sign(&a), Some(1));
        assert_eq!(a.merge_sign(&a), None);
        let c = AltIndex::new(&[0, 3]);
        let d = AltIndex::new(&[1, 2]);
        // (0,3,1,2): two inversions
        assert_eq!(c.merge_sign(&d), Some(1));
    }

    #[test]
    fn multi_indices_of_degree() {
        let all = MultiIndex::all_of_degree(3, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].exps(), &[2, 0, 0]);
        assert_eq!(all[5].exps(), &[0, 0, 2]);
    }

    #[test]
    fn faces() {
        assert_eq!(FaceId::all_of_dim(3, 1).len(), 6);
        let f = FaceId::new(&[1, 3]);
        assert_eq!(f.position(3), Some(1));
        assert_eq!(f.position(2), None);
        assert_eq!(f.dim(), 1);
    }
}
