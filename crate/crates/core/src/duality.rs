//! The duality isomorphisms
//! `P_rΛ^k(T^n) ≅ P̊⁻_{r+k+1}Λ^{n-k}(T^n)` and `P⁻_rΛ^k(T^n) ≅ P̊_{r+k}Λ^{n-k}(T^n)`,
//! realized as `(Φ*)⁻¹ ∘ (u_0⋯u_n) ∗_{S^n} ∘ Φ*` with `Φ: λ_i = u_i²`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{AltIndex, MultiIndex, Permutation, PolyForm, TermKey};
use crate::linalg::Matrix;
use crate::rational::Rational;
use crate::spaces::{Family, FormSpace, SpaceDesc};
use crate::symmetry::action_matrix;

/// A polynomial form in `u_0, …, u_n` on `ℝ^{n+1}`, read modulo `Σ u_i² = 1`.
///
/// The stored terms reuse the barycentric term layout with `u_i` in place of `λ_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct SpherePolyForm {
    raw: PolyForm,
}

impl SpherePolyForm {
    pub fn n(&self) -> usize {
        self.raw.n()
    }

    pub fn k(&self) -> usize {
        self.raw.k()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Rational)> {
        self.raw.terms()
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    /// `u_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        SpherePolyForm { raw: PolyForm::lambda(n, i) }
    }

    /// `du_i`.
    pub fn differential(n: usize, i: usize) -> Self {
        SpherePolyForm { raw: PolyForm::dlambda(n, i) }
    }

    /// The unit normal `ν = Σ u_i du_i`.
    pub fn normal(n: usize) -> Self {
        let terms = (0..=n).map(|i| ((AltIndex::new(&[i]), MultiIndex::unit(n + 1, i)), Rational::one()));
        SpherePolyForm { raw: PolyForm::from_terms(n, 1, terms) }
    }

    /// `u_0 u_1 ⋯ u_n`.
    pub fn bubble(n: usize) -> Self {
        let m = MultiIndex::new(&vec![1; n + 1]);
        SpherePolyForm { raw: PolyForm::monomial(n, m) }
    }

    pub fn wedge(&self, other: &SpherePolyForm) -> Result<SpherePolyForm> {
        Ok(SpherePolyForm { raw: self.raw.wedge(&other.raw)? })
    }

    /// `i_X` with `X = Σ u_i ∂/∂u_i`.
    pub fn contract_x(&self) -> Result<SpherePolyForm> {
        Ok(SpherePolyForm { raw: self.raw.contract_x()? })
    }

    pub fn sub(&self, other: &SpherePolyForm) -> SpherePolyForm {
        SpherePolyForm { raw: &self.raw - &other.raw }
    }

    pub fn scale(&self, s: &Rational) -> SpherePolyForm {
        SpherePolyForm { raw: self.raw.scale(s) }
    }

    /// Normal form modulo the sphere relation: `u_0² ↦ 1 - Σ_{i≥1} u_i²`.
    pub fn reduce(&self) -> SpherePolyForm {
        let n = self.n();
        let mut out: Vec<(TermKey, Rational)> = Vec::new();
        for ((sigma, a), c) in self.raw.terms() {
            let half = a.get(0) / 2;
            let mut base = *a;
            base.set(0, a.get(0) % 2);
            if half == 0 {
                out.push(((*sigma, base), c.clone()));
                continue;
            }
            // (1 - Σ u_i²)^half
            for j in 0..=half as u32 {
                for beta in MultiIndex::all_of_degree(n, j) {
                    let mut coeff = binomial(half as u64, j as u64);
                    let mut left = j as u64;
                    let mut m = base;
                    for (i, &b) in beta.exps().iter().enumerate() {
                        coeff *= binomial(left, b as u64);
                        left -= b as u64;
                        m.set(i + 1, m.get(i + 1) + 2 * b);
                    }
                    let v = c * &Rational::from_int(coeff as i64);
                    out.push(((*sigma, m), if j % 2 == 0 { v } else { -v }));
                }
            }
        }
        SpherePolyForm { raw: PolyForm::from_terms(n, self.k(), out) }
    }

    /// Whether the form vanishes modulo the sphere relation (in coefficients).
    pub fn vanishes_on_sphere(&self) -> bool {
        self.reduce().is_zero()
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

impl fmt::Display for SpherePolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.raw.to_string().replace('λ', "u"))
    }
}

impl fmt::Debug for SpherePolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpherePolyForm({self})")
    }
}

fn phi_raw(a: &PolyForm) -> PolyForm {
    let terms = a.terms().map(|((sigma, alpha), c)| {
        let mut m = MultiIndex::zero(a.n() + 1);
        for i in 0..=a.n() {
            m.set(i, 2 * alpha.get(i) + sigma.contains(i) as u8);
        }
        ((*sigma, m), c * &Rational::from_int(1 << sigma.len()))
    });
    PolyForm::from_terms(a.n(), a.k(), terms.collect::<Vec<_>>())
}

/// `Φ*`: `λ_i ↦ u_i²`, `dλ_i ↦ 2u_i du_i`, applied to the stored representative.
pub fn phi_pullback(a: &PolyForm) -> SpherePolyForm {
    SpherePolyForm { raw: phi_raw(a) }.reduce()
}

/// Euclidean Hodge star on `ℝ^{n+1}`: `∗(f du_σ) = sign(σ, σᶜ) f du_{σᶜ}`.
pub fn ambient_star(b: &SpherePolyForm) -> SpherePolyForm {
    SpherePolyForm { raw: star_raw(&b.raw) }
}

fn star_raw(b: &PolyForm) -> PolyForm {
    let n = b.n();
    let full = ((1u32 << (n + 1)) - 1) as u16;
    let terms = b.terms().map(|((sigma, a), c)| {
        let comp = AltIndex::from_mask(full & !sigma.mask());
        let sign = sigma.merge_sign(&comp).unwrap();
        ((comp, *a), if sign < 0 { -c } else { c.clone() })
    });
    PolyForm::from_terms(n, n + 1 - b.k(), terms.collect::<Vec<_>>())
}

fn sphere_star_raw(b: &PolyForm) -> Result<PolyForm> {
    let n = b.n();
    let tangential = if b.k() == 0 {
        b.clone()
    } else {
        let nu = SpherePolyForm::normal(n).raw;
        b - &nu.wedge(&b.contract_x()?)?
    };
    let starred = star_raw(&tangential);
    if starred.k() == 0 {
        return Ok(PolyForm::zero(n, 0));
    }
    starred.contract_x()
}

/// Hodge star of the unit sphere: `i_X ∗ (b - ν ∧ i_X b)`, reduced.
pub fn sphere_star(b: &SpherePolyForm) -> Result<SpherePolyForm> {
    Ok(SpherePolyForm { raw: sphere_star_raw(&b.raw)? }.reduce())
}

/// Inverts `Φ*` on forms `c u^a du_σ` with `a_i ≡ [i ∈ σ] (mod 2)`.
fn phi_inverse_raw(b: &PolyForm) -> Result<PolyForm> {
    let mut out = Vec::with_capacity(b.num_terms());
    for ((sigma, a), c) in b.terms() {
        let mut beta = MultiIndex::zero(b.n() + 1);
        for i in 0..=b.n() {
            let e = a.get(i);
            let odd = sigma.contains(i) as u8;
            if e % 2 != odd % 2 || e < odd {
                return Err(Error::Internal(format!("term {a:?} d{sigma:?} is not a Φ*-image")));
            }
            beta.set(i, (e - odd) / 2);
        }
        out.push(((*sigma, beta), c / &Rational::from_int(1 << sigma.len())));
    }
    Ok(PolyForm::from_terms(b.n(), b.k(), out))
}

/// `(Φ*)⁻¹ ∘ (u_0⋯u_n) ∗_{S^n} ∘ Φ*` applied to one form, canonicalized on `T^n`.
pub fn duality_image(a: &PolyForm) -> Result<PolyForm> {
    let n = a.n();
    let starred = sphere_star_raw(&phi_raw(a))?;
    let bubbled = SpherePolyForm::bubble(n).raw.wedge(&starred)?;
    Ok(phi_inverse_raw(&bubbled)?.canonicalize())
}

/// The trace-free space that `desc` is dual to.
pub fn duality_target(desc: &SpaceDesc) -> Result<SpaceDesc> {
    if desc.trace_free {
        return Err(Error::Invalid("duality is applied to full spaces".into()));
    }
    let (k, n, r) = (desc.k, desc.n, desc.r);
    if k > n {
        return Err(Error::DegreeOutOfRange { k: k as i64, n });
    }
    match desc.family {
        Family::P => Ok(SpaceDesc::new(Family::Pminus, r + k as i64 + 1, n - k, n, true)),
        Family::Pminus if r <= 0 && k == 0 => {
            Err(Error::Exceptional(format!("P⁻_{r}Λ^0(T^{n}) = 0 is not dual to P̊_{r}Λ^{n}(T^{n})")))
        }
        Family::Pminus => Ok(SpaceDesc::new(Family::P, r + k as i64, n - k, n, true)),
        Family::Custom => Err(Error::Invalid("duality needs a standard space".into())),
    }
}

#[derive(Debug, Clone)]
pub struct DualityMap {
    pub source: FormSpace,
    pub target: FormSpace,
    /// Columns are target coordinates of the images of the source basis.
    pub matrix: Matrix,
}

impl DualityMap {
    pub fn is_bijective(&self) -> bool {
        self.matrix.rows() == self.matrix.cols() && self.matrix.rank() == self.matrix.cols()
    }

    /// Images of the source basis.
    pub fn images(&self) -> Vec<PolyForm> {
        (0..self.matrix.cols()).map(|j| self.target.combine(&self.matrix.column(j))).collect()
    }

    /// Applies the map to a form in the source space.
    pub fn apply(&self, a: &PolyForm) -> Result<PolyForm> {
        self.source.coords(a)?;
        let img = duality_image(a)?;
        self.target.coords(&img)?;
        Ok(img)
    }
}

#[derive(Serialize)]
struct DualityRecord<'a> {
    source: SpaceDesc,
    target: SpaceDesc,
    source_dim: usize,
    target_dim: usize,
    matrix: &'a Matrix,
}

impl Serialize for DualityMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DualityRecord {
            source: self.source.desc(),
            target: self.target.desc(),
            source_dim: self.source.dim(),
            target_dim: self.target.dim(),
            matrix: &self.matrix,
        }
        .serialize(s)
    }
}

/// The duality map on `V` (a full `P` or `P⁻` space) into its trace-free target.
pub fn duality_map(v: &FormSpace) -> Result<DualityMap> {
    let target_desc = duality_target(&v.desc())?;
    let target = target_desc.build()?;
    duality_map_into(v, target)
}

/// As [`duality_map`], with a prebuilt target space.
pub fn duality_map_into(v: &FormSpace, target: FormSpace) -> Result<DualityMap> {
    let cols = v
        .basis()
        .par_iter()
        .map(|b| {
            let img = duality_image(b)?;
            target.coords(&img).map_err(|_| Error::Internal(format!("duality image {img} lies outside {}", target.desc())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = Matrix::zeros(target.dim(), v.dim());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, c) in col.into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(DualityMap { source: v.clone(), target, matrix: m })
}

/// `D ∘ ρ_V(π) = sgn(π) · ρ_target(π) ∘ D` for each given `π`.
pub fn verify_sign_equivariance_for(d: &DualityMap, perms: &[Permutation]) -> Result<bool> {
    for pi in perms {
        let lhs = d.matrix.mul(&action_matrix(&d.source, pi)?)?;
        let rhs = action_matrix(&d.target, pi)?.mul(&d.matrix)?.scale(&Rational::from_int(pi.sign() as i64));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sign equivariance over the Coxeter generators of `S_{n+1}`.
pub fn verify_sign_equivariance(d: &DualityMap) -> Result<bool> {
    verify_sign_equivariance_for(d, &Permutation::coxeter_generators(d.source.n() + 1))
}

/// Duality images of a list of forms, e.g. to carry a basis across.
pub fn transfer(forms: &[PolyForm]) -> Result<Vec<PolyForm>> {
    forms.par_iter().map(duality_image).collect()
}

/// Dimension table entry used by the duality checks.
pub fn dims(desc: &SpaceDesc) -> Result<BTreeMap<&'static str, usize>> {
    let t = duality_target(desc)?;
    Ok(BTreeMap::from([("source", desc.build()?.dim()), ("target", t.build()?.dim())]))
}
