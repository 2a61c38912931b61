//! Filtration by vanishing traces, invariant complements, and the geometric
//! decomposition map `𝒟: V → ⊕_F V̊(F)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{AltIndex, FaceId, IntegerForms, MultiIndex, Permutation, PolyForm};
use crate::linalg::{Matrix, SparseVec};
use crate::rational::Rational;
use crate::spaces::{self, trace_free_subspace, trace_space, FormSpace, LinearMapRep};
use crate::symmetry::action_matrix;

/// `V = V_0 ⊇ V_1 ⊇ ⋯ ⊇ V_{n+1} = 0`, where `V_d` holds the forms whose traces
/// vanish on every `(d-1)`-face.
#[derive(Debug, Clone)]
pub struct Filtration {
    levels: Vec<FormSpace>,
}

impl Filtration {
    /// `V_d` for `0 ≤ d ≤ n+1`.
    pub fn level(&self, d: usize) -> &FormSpace {
        &self.levels[d]
    }

    pub fn levels(&self) -> &[FormSpace] {
        &self.levels
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(FormSpace::dim).collect()
    }
}

pub fn filtration(v: &FormSpace) -> Filtration {
    let n = v.n();
    let mut levels = vec![v.clone()];
    for d in 0..=n {
        let cur = levels.last().unwrap();
        let next = if cur.dim() == 0 || d < v.k() {
            cur.clone()
        } else {
            cur.subspace_from_combinations(&spaces::vanishing_trace_relations(cur, d))
        };
        levels.push(next);
    }
    Filtration { levels }
}

/// The invariant inner product used to pick the complements `W_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplementRule {
    /// `∫_{T^n} ⟨α, β⟩`.
    #[default]
    L2,
    /// Write each form as `Σ c_{β,σ} λ^β dλ_σ` with `|β| = r` and `0 ∉ σ`, and pair
    /// equal monomials through the pointwise metric on `dλ_σ`. This is
    /// invariant because `P_rΛ^k ≅ H_r ⊗ Λ^k` equivariantly, and its Gram
    /// matrices are much sparser than the `L²` ones.
    Coefficient,
}

/// Orthogonal complement of `inner` inside `outer` under `∫⟨·,·⟩`.
pub fn orthogonal_complement(outer: &FormSpace, inner: &FormSpace) -> FormSpace {
    orthogonal_complement_with(outer, inner, ComplementRule::L2)
}

fn top_degree(forms: &[PolyForm]) -> u32 {
    forms.iter().filter_map(PolyForm::degree).max().unwrap_or(0)
}

type Homogeneous = BTreeMap<MultiIndex, Vec<(AltIndex, Rational)>>;

fn homogeneous_coefficients(f: &PolyForm, r: u32) -> Homogeneous {
    let mut acc: BTreeMap<(MultiIndex, AltIndex), Rational> = BTreeMap::new();
    for ((sigma, alpha), c) in f.homogenize(r).expect("degree bounded by r").terms() {
        *acc.entry((*alpha, *sigma)).or_default() += c;
    }
    let mut out = Homogeneous::new();
    for ((alpha, sigma), c) in acc {
        out.entry(alpha).or_default().push((sigma, c));
    }
    out
}

fn coefficient_gram(outer: &[PolyForm], inner: &[PolyForm], n: usize, k: usize) -> Matrix {
    let r = top_degree(outer).max(top_degree(inner));
    let rows: Vec<Homogeneous> = outer.par_iter().map(|b| homogeneous_coefficients(b, r)).collect();
    let cols: Vec<Homogeneous> = inner.par_iter().map(|b| homogeneous_coefficients(b, r)).collect();
    let entries: Vec<Vec<Rational>> = rows
        .par_iter()
        .map(|a| {
            let mut ip = crate::forms::InnerProduct::new(n, k);
            cols.iter()
                .map(|b| {
                    let mut acc = Rational::zero();
                    for (alpha, xs) in a {
                        let Some(ys) = b.get(alpha) else { continue };
                        for (s, x) in xs {
                            for (t, y) in ys {
                                let m = ip.metric(*s, *t);
                                if !m.is_zero() {
                                    acc += x * y * m;
                                }
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(entries).expect("rectangular")
}

/// Matrix of `⟨a_i, b_j⟩` under the inner product of `rule`.
fn pairing(a: &[PolyForm], b: &[PolyForm], n: usize, k: usize, rule: ComplementRule) -> Matrix {
    match rule {
        ComplementRule::L2 => {
            let rows: Vec<SparseVec<_>> = a.iter().map(PolyForm::coordinates).collect();
            let cols: Vec<SparseVec<_>> = b.iter().map(PolyForm::coordinates).collect();
            crate::forms::InnerProduct::new(n, k).gram(&rows, &cols)
        }
        ComplementRule::Coefficient => coefficient_gram(a, b, n, k),
    }
}

pub fn orthogonal_complement_with(outer: &FormSpace, inner: &FormSpace, rule: ComplementRule) -> FormSpace {
    if inner.dim() == 0 {
        return outer.clone();
    }
    if inner.dim() == outer.dim() {
        return FormSpace::zero(outer.n(), outer.k());
    }
    let gram = pairing(outer.basis(), inner.basis(), outer.n(), outer.k(), rule);
    let rels: Vec<SparseVec<usize>> = gram
        .transpose()
        .nullspace()
        .into_iter()
        .map(|x| x.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
        .collect();
    outer.subspace_from_combinations(&rels)
}

/// Default complements `W_d = V_{d+1}^⊥ ∩ V_d`.
pub fn complements(f: &Filtration) -> Vec<FormSpace> {
    complements_with(f, ComplementRule::L2)
}

pub fn complements_with(f: &Filtration, rule: ComplementRule) -> Vec<FormSpace> {
    let n = f.levels.len() - 2;
    (0..=n).into_par_iter().map(|d| orthogonal_complement_with(&f.levels[d], &f.levels[d + 1], rule)).collect()
}

/// One summand `V̊(F)` of the codomain, in the face's local coordinates.
#[derive(Debug, Clone)]
pub struct Block {
    pub face: FaceId,
    pub space: FormSpace,
}

#[derive(Debug, Clone)]
pub struct DecompositionMap {
    v: FormSpace,
    filtration: Filtration,
    complements: Vec<FormSpace>,
    /// Concatenation of the `W_d` bases, `d` ascending.
    w: FormSpace,
    w_offsets: Vec<usize>,
    /// `V̊(T^d)` on the reference face `{0, …, d}`, shared by all `d`-faces.
    face_spaces: Vec<FormSpace>,
    blocks: Vec<Block>,
    block_offsets: Vec<usize>,
    /// `𝒟` in the `W` basis.
    matrix_w: Matrix,
    injective: bool,
    complement_stable: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSummary {
    pub face: FaceId,
    pub dim: usize,
}

/// JSON view of a decomposition map.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub space: crate::spaces::SpaceDesc,
    pub filtration_dims: Vec<usize>,
    pub complement_dims: Vec<usize>,
    pub complement_stable: Vec<bool>,
    pub blocks: Vec<BlockSummary>,
    pub domain_dim: usize,
    pub codomain_dim: usize,
    pub injective: bool,
    pub bijective: bool,
    /// Exact equivariance over the Coxeter generators.
    pub equivariant: bool,
    pub matrix: Matrix,
}

impl DecompositionMap {
    pub fn space(&self) -> &FormSpace {
        &self.v
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn complements(&self) -> &[FormSpace] {
        &self.complements
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_summary(&self) -> Vec<BlockSummary> {
        self.blocks.iter().map(|b| BlockSummary { face: b.face, dim: b.space.dim() }).collect()
    }

    /// `V̊(T^d)` in local coordinates.
    pub fn face_space(&self, d: usize) -> &FormSpace {
        &self.face_spaces[d]
    }

    /// Whether each `W_d` is mapped into itself by the Coxeter generators.
    pub fn complement_stable(&self) -> &[bool] {
        &self.complement_stable
    }

    pub fn codomain_dim(&self) -> usize {
        *self.block_offsets.last().unwrap()
    }

    pub fn report(&self) -> Result<DecompositionReport> {
        let mut equivariant = true;
        for g in Permutation::coxeter_generators(self.v.n() + 1) {
            equivariant &= self.check_equivariance(&g)?;
        }
        Ok(DecompositionReport {
            space: self.v.desc(),
            filtration_dims: self.filtration.dims(),
            complement_dims: self.complements.iter().map(FormSpace::dim).collect(),
            complement_stable: self.complement_stable.clone(),
            blocks: self.block_summary(),
            domain_dim: self.v.dim(),
            codomain_dim: self.codomain_dim(),
            injective: self.is_injective(),
            bijective: self.is_bijective(),
            equivariant,
            matrix: self.matrix()?,
        })
    }

    /// `𝒟` in the stored bases of `V` and the blocks.
    pub fn matrix(&self) -> Result<Matrix> {
        let mut q = Matrix::zeros(self.w.dim(), self.v.dim());
        for (j, b) in self.v.basis().iter().enumerate() {
            for (i, c) in self.w.coords(b)?.into_iter().enumerate() {
                q[(i, j)] = c;
            }
        }
        self.matrix_w.mul(&q)
    }

    pub fn matrix_in_complement_basis(&self) -> &Matrix {
        &self.matrix_w
    }

    /// Rows and columns of the diagonal block `W_d → ⊕_{dim F = d} V̊(F)`.
    fn diagonal_block(&self, d: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let first = self.blocks.iter().position(|b| b.face.dim() == d).unwrap();
        let last = self.blocks.iter().rposition(|b| b.face.dim() == d).unwrap();
        (self.block_offsets[first]..self.block_offsets[last + 1], self.w_offsets[d]..self.w_offsets[d + 1])
    }

    fn diagonal_matrix(&self, d: usize) -> Matrix {
        let (rows, cols) = self.diagonal_block(d);
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                m[(i, j)] = self.matrix_w[(r, c)].clone();
            }
        }
        m
    }

    fn compute_injective(&self) -> bool {
        // 𝒟 is block diagonal over d in the complement basis
        (0..=self.v.n()).all(|d| self.diagonal_matrix(d).rank() == self.diagonal_block(d).1.len())
    }

    pub fn is_injective(&self) -> bool {
        self.injective
    }

    /// `dim V = Σ_F dim V̊(F)`.
    pub fn check_iso(&self) -> bool {
        self.v.dim() == self.codomain_dim()
    }

    pub fn is_bijective(&self) -> bool {
        self.check_iso() && self.is_injective()
    }

    /// Image of `α ∈ V` as block coordinates.
    pub fn apply(&self, alpha: &PolyForm) -> Result<Vec<Rational>> {
        let c = self.w.coords(alpha)?;
        let col = Matrix::from_rows(c.into_iter().map(|x| vec![x]).collect())?;
        Ok(self.matrix_w.mul(&col)?.column(0))
    }

    fn block_range(&self, face: FaceId) -> Result<(usize, std::ops::Range<usize>)> {
        let i = self
            .blocks
            .iter()
            .position(|b| b.face == face)
            .ok_or_else(|| Error::Invalid(format!("{face} is not a face of T^{}", self.v.n())))?;
        Ok((i, self.block_offsets[i]..self.block_offsets[i + 1]))
    }

    /// `𝒟⁻¹` applied to block coordinates, for a bijective map.
    pub fn inverse_apply(&self, coords: &[Rational]) -> Result<PolyForm> {
        if !self.is_bijective() {
            return Err(Error::NotBijective);
        }
        let mut x = vec![Rational::zero(); self.w.dim()];
        for d in 0..=self.v.n() {
            let (rows, cols) = self.diagonal_block(d);
            if cols.is_empty() {
                continue;
            }
            let part = self.diagonal_matrix(d).solve(&coords[rows])?;
            x[cols].clone_from_slice(&part);
        }
        Ok(self.w.combine(&x))
    }

    /// `E_F = 𝒟⁻¹ ∘ ι_F: V̊(F) → V`, with columns in the basis of `V`.
    pub fn extension_operator(&self, face: FaceId) -> Result<LinearMapRep> {
        let images = self.extend_block(face)?;
        let (_, range) = self.block_range(face)?;
        let mut m = Matrix::zeros(self.v.dim(), range.len());
        for (j, f) in images.iter().enumerate() {
            for (i, c) in self.v.coords(f)?.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        Ok(LinearMapRep { domain: format!("V̊({face})"), codomain: self.v.desc().to_string(), matrix: m })
    }

    /// Images under `E_F` of the basis of `V̊(F)`.
    pub fn extend_block(&self, face: FaceId) -> Result<Vec<PolyForm>> {
        let (_, range) = self.block_range(face)?;
        range
            .map(|i| {
                let mut e = vec![Rational::zero(); self.codomain_dim()];
                e[i] = Rational::one();
                self.inverse_apply(&e)
            })
            .collect()
    }

    /// The block action `B(π)` on `⊕_F V̊(F)`: the `F`-component of `B(π)x` is
    /// `pullback(ρ, x_{F'})` with `F' = π⁻¹(F)` and `ρ(b) = pos_F(π(t_b))`.
    pub fn block_action(&self, pi: &Permutation) -> Result<Matrix> {
        let total = self.codomain_dim();
        let mut m = Matrix::zeros(total, total);
        for (src, block) in self.blocks.iter().enumerate() {
            let verts = block.face.vertices();
            let images: Vec<usize> = verts.iter().map(|&t| pi.apply(t)).collect();
            let mut sorted = images.clone();
            sorted.sort_unstable();
            let target = FaceId::new(&sorted);
            let (dst, range) = self.block_range(target)?;
            let rho = Permutation::new(images.iter().map(|x| target.position(*x).unwrap()).collect())?;
            let dst_space = &self.blocks[dst].space;
            for (j, b) in block.space.basis().iter().enumerate() {
                let img = b.pullback(&rho)?;
                for (i, c) in dst_space.coords(&img)?.into_iter().enumerate() {
                    m[(range.start + i, self.block_offsets[src] + j)] = c;
                }
            }
        }
        Ok(m)
    }

    /// `𝒟 ∘ ρ_V(π) = B(π) ∘ 𝒟`, checked in the complement basis.
    pub fn check_equivariance(&self, pi: &Permutation) -> Result<bool> {
        let rho_w = action_matrix(&self.w, pi)?;
        let lhs = self.matrix_w.mul(&rho_w)?;
        let rhs = self.block_action(pi)?.mul(&self.matrix_w)?;
        Ok(lhs == rhs)
    }

    /// Lifts bases of `V̊(T^d)`, `d = 0..=n`, to a basis of `V`: each face
    /// basis is carried to every `d`-face (faces use increasing local labels,
    /// so the carried forms have the same local expression) and pulled back
    /// through `𝒟`. Output order: `d` ascending, faces lexicographic, then the
    /// face basis order.
    pub fn lift_basis(&self, face_bases: &[Vec<PolyForm>]) -> Result<Vec<PolyForm>> {
        if !self.is_bijective() {
            return Err(Error::NotBijective);
        }
        if face_bases.len() != self.v.n() + 1 {
            return Err(Error::Dimension(format!("expected {} face bases", self.v.n() + 1)));
        }
        let mut targets: Vec<(usize, Vec<Rational>)> = Vec::new();
        for (d, basis) in face_bases.iter().enumerate() {
            let fs = &self.face_spaces[d];
            if basis.len() != fs.dim() {
                return Err(Error::Dimension(format!(
                    "face basis for d = {d} has {} elements, V̊(T^{d}) has dimension {}",
                    basis.len(),
                    fs.dim()
                )));
            }
            let coords = basis.iter().map(|b| fs.coords(b)).collect::<Result<Vec<_>>>()?;
            for (bi, block) in self.blocks.iter().enumerate().filter(|(_, b)| b.face.dim() == d) {
                debug_assert_eq!(block.space.dim(), fs.dim());
                let (rows, _) = self.diagonal_block(d);
                for c in &coords {
                    let mut t = vec![Rational::zero(); rows.len()];
                    t[self.block_offsets[bi] - rows.start..self.block_offsets[bi + 1] - rows.start].clone_from_slice(c);
                    targets.push((d, t));
                }
            }
        }
        let mut lifted = Vec::with_capacity(targets.len());
        for d in 0..=self.v.n() {
            let rhs: Vec<&Vec<Rational>> = targets.iter().filter(|(e, _)| *e == d).map(|(_, t)| t).collect();
            if rhs.is_empty() {
                continue;
            }
            let mut b = Matrix::zeros(rhs[0].len(), rhs.len());
            for (j, t) in rhs.iter().enumerate() {
                for (i, x) in t.iter().enumerate() {
                    b[(i, j)] = x.clone();
                }
            }
            let local = self.diagonal_matrix(d).solve_many(&b)?;
            let (_, cols) = self.diagonal_block(d);
            let wd = IntegerForms::new(self.v.n(), self.v.k(), &self.w.basis()[cols]);
            lifted.par_extend((0..rhs.len()).into_par_iter().map(|j| wd.combine(&local.column(j))));
        }
        Ok(lifted)
    }
}

/// `𝒟` for `V` with orthogonal complements.
pub fn decomposition_map(v: &FormSpace) -> Result<DecompositionMap> {
    decomposition_map_with(v, ComplementRule::L2)
}

pub fn decomposition_map_with(v: &FormSpace, rule: ComplementRule) -> Result<DecompositionMap> {
    let filt = filtration(v);
    let comps = complements_with(&filt, rule);
    assemble(v.clone(), filt, comps, Some(rule))
}

/// `𝒟` with user-chosen complements: `overrides[d]` spans `W_d`; other
/// levels keep the orthogonal complement.
pub fn custom_complement(v: &FormSpace, overrides: &BTreeMap<usize, Vec<PolyForm>>) -> Result<DecompositionMap> {
    let filt = filtration(v);
    let mut comps = complements(&filt);
    for (&d, forms) in overrides {
        if d > v.n() {
            return Err(Error::Invalid(format!("no complement W_{d} for T^{}", v.n())));
        }
        let (outer, inner) = (&filt.levels[d], &filt.levels[d + 1]);
        for f in forms {
            if !outer.contains(f) {
                return Err(Error::NotDirectSum(format!("{f} is not in V_{d}")));
            }
        }
        let w = FormSpace::span(v.n(), v.k(), forms.iter().cloned())?;
        let need = outer.dim() - inner.dim();
        let joint = FormSpace::span(v.n(), v.k(), w.basis().iter().chain(inner.basis()).cloned())?;
        if w.dim() != need || joint.dim() != outer.dim() {
            return Err(Error::NotDirectSum(format!(
                "proposed W_{d} has dimension {} with V_{d} = W_{d} + V_{} of dimension {}; need {need} and {}",
                w.dim(),
                d + 1,
                joint.dim(),
                outer.dim()
            )));
        }
        comps[d] = w;
    }
    let rule = overrides.is_empty().then_some(ComplementRule::L2);
    assemble(v.clone(), filt, comps, rule)
}

/// `rule` is the inner product the complements are orthogonal for, if any.
fn assemble(v: FormSpace, filtration: Filtration, complements: Vec<FormSpace>, rule: Option<ComplementRule>) -> Result<DecompositionMap> {
    let n = v.n();
    let mut w_offsets = vec![0];
    let mut all = Vec::new();
    for w in &complements {
        all.extend(w.basis().iter().cloned());
        w_offsets.push(all.len());
    }
    let w = FormSpace::from_basis(n, v.k(), all)
        .map_err(|_| Error::NotDirectSum("complements are not independent".into()))?;
    if w.dim() != v.dim() {
        return Err(Error::NotDirectSum(format!("Σ dim W_d = {} but dim V = {}", w.dim(), v.dim())));
    }

    let face_spaces: Vec<FormSpace> = (0..=n)
        .into_par_iter()
        .map(|d| -> Result<FormSpace> {
            let local = trace_space(&v, FaceId::new(&(0..=d).collect::<Vec<_>>()))?;
            Ok(trace_free_subspace(&local))
        })
        .collect::<Result<_>>()?;

    let mut blocks = Vec::new();
    let mut block_offsets = vec![0];
    for (d, fs) in face_spaces.iter().enumerate() {
        for face in FaceId::all_of_dim(n, d) {
            blocks.push(Block { face, space: fs.clone() });
            block_offsets.push(block_offsets.last().unwrap() + fs.dim());
        }
    }

    let total = *block_offsets.last().unwrap();
    let mut matrix_w = Matrix::zeros(total, w.dim());
    let columns: Vec<(usize, Vec<(usize, Vec<Rational>)>)> = (0..w.dim())
        .into_par_iter()
        .map(|j| -> Result<_> {
            let d = w_offsets.iter().rposition(|&o| o <= j).unwrap();
            let form = &w.basis()[j];
            let mut parts = Vec::new();
            for (bi, block) in blocks.iter().enumerate().filter(|(_, b)| b.face.dim() == d) {
                let tr = form.trace(block.face)?;
                let c = block.space.coords(&tr).map_err(|_| {
                    Error::Internal(format!("trace of a W_{d} element onto {} is not trace-free", block.face))
                })?;
                parts.push((bi, c));
            }
            Ok((j, parts))
        })
        .collect::<Result<_>>()?;
    for (j, parts) in columns {
        for (bi, c) in parts {
            for (i, x) in c.into_iter().enumerate() {
                matrix_w[(block_offsets[bi] + i, j)] = x;
            }
        }
    }

    let gens = Permutation::coxeter_generators(n + 1);
    let complement_stable = (0..=n)
        .into_par_iter()
        .map(|d| {
            let wd = &complements[d];
            let images: Vec<PolyForm> = gens
                .iter()
                .flat_map(|g| wd.basis().iter().map(move |b| b.pullback(g)))
                .collect::<Result<_>>()
                .unwrap_or_default();
            if images.len() != gens.len() * wd.dim() {
                return false;
            }
            match rule {
                // W_d = V_d ∩ V_{d+1}^⊥ for an invariant pairing: test those two conditions
                Some(rule) => {
                    let (outer, inner) = (&filtration.levels[d], &filtration.levels[d + 1]);
                    images.iter().all(|f| outer.contains(f)) && pairing(&images, inner.basis(), n, v.k(), rule).is_zero()
                }
                None => images.iter().all(|f| wd.contains(f)),
            }
        })
        .collect();
    let mut map = DecompositionMap {
        v,
        filtration,
        complements,
        w,
        w_offsets,
        face_spaces,
        blocks,
        block_offsets,
        matrix_w,
        injective: false,
        complement_stable,
    };
    map.injective = map.compute_injective();
    Ok(map)
}
