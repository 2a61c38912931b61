//! Explicit up-to-sign invariant bases and the existence decision procedure.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::duality::transfer;
use crate::error::{Error, Result};
use crate::forms::{AltIndex, FaceId, MultiIndex, PolyForm};
use crate::geodecomp::{decomposition_map_with, ComplementRule};
use crate::rational::{factorial, Rational};
use crate::spaces::{Family, FormSpace, SpaceDesc};
use crate::symmetry::{verify_invariant_up_to_sign, z3_decompose, GroupSpec, SignedPermutationImage, Z3Decomposition};

fn monomials(r: i64, n: usize) -> Vec<PolyForm> {
    if r < 0 {
        return Vec::new();
    }
    MultiIndex::all_of_degree(n + 1, r as u32).into_iter().map(|a| PolyForm::monomial(n, a).canonicalize()).collect()
}

/// The degree-`r` monomials in `λ_0, …, λ_n`, a basis of `P_rΛ^0(T^n)`.
pub fn monomial_basis_scalar(r: i64, n: usize) -> Result<Vec<PolyForm>> {
    if r < 0 {
        return Err(Error::Invalid(format!("degree {r} < 0")));
    }
    Ok(monomials(r, n))
}

/// `λ^α dλ_1 ∧ ⋯ ∧ dλ_n` over `|α| = r`, a basis of `P_rΛ^n(T^n)`.
pub fn volume_basis(r: i64, n: usize) -> Result<Vec<PolyForm>> {
    if r < 0 {
        return Err(Error::Invalid(format!("degree {r} < 0")));
    }
    let vol = AltIndex::new(&(1..=n).collect::<Vec<_>>());
    Ok(MultiIndex::all_of_degree(n + 1, r as u32)
        .into_iter()
        .map(|a| PolyForm::from_terms(n, n, [((vol, a), Rational::one())]).canonicalize())
        .collect())
}

/// Bubble times monomials: a basis of `P̊_rΛ^0(T^n)`.
fn bubble_basis(r: i64, n: usize) -> Vec<PolyForm> {
    let ones = MultiIndex::new(&vec![1; n + 1]);
    let s = r - n as i64 - 1;
    if s < 0 {
        return Vec::new();
    }
    MultiIndex::all_of_degree(n + 1, s as u32)
        .into_iter()
        .map(|a| PolyForm::monomial(n, a.add(&ones)).canonicalize())
        .collect()
}

/// Whitney forms `φ_σ = k! Σ_j (-1)^j λ_{σ_j} dλ_{σ∖σ_j}`, one per `k`-face.
pub fn whitney_basis(k: usize, n: usize) -> Result<Vec<PolyForm>> {
    if k > n {
        return Err(Error::DegreeOutOfRange { k: k as i64, n });
    }
    let scale = factorial(k as u32);
    Ok(FaceId::all_of_dim(n, k)
        .into_iter()
        .map(|face| {
            let sigma = face.as_alt();
            let terms = sigma.vertices().enumerate().map(|(j, v)| {
                let c = if j % 2 == 0 { scale.clone() } else { -scale.clone() };
                ((sigma.without(v), MultiIndex::unit(n + 1, v)), c)
            });
            PolyForm::from_terms(n, k, terms.collect::<Vec<_>>()).canonicalize()
        })
        .collect())
}

/// `θ_j = dλ_0 + dλ_j` and their wedges, for `0 ≤ k ≤ 3`.
fn constant_forms_t3(k: usize) -> Vec<PolyForm> {
    let n = 3;
    let theta: Vec<PolyForm> = (1..=3).map(|j| &PolyForm::dlambda(n, 0) + &PolyForm::dlambda(n, j)).collect();
    AltIndex::all_of_size(3, k)
        .into_iter()
        .map(|s| {
            s.vertices()
                .fold(PolyForm::constant(n, Rational::one()), |acc, j| acc.wedge(&theta[j]).unwrap())
                .canonicalize()
        })
        .collect()
}

/// Basis of `P_0Λ^k(T³)` for `k ∈ {1, 2}` built from the three axes joining
/// midpoints of opposite edges.
pub fn constant_basis_t3(k: usize) -> Result<Vec<PolyForm>> {
    if !(1..=2).contains(&k) {
        return Err(Error::Invalid(format!("constant basis is defined for k = 1, 2, not {k}")));
    }
    Ok(constant_forms_t3(k))
}

/// `P_rΛ^k(T³) = P_rΛ^0(T³) ⊗ P_0Λ^k(T³)`: monomials times constant forms.
pub fn tensor_basis_t3(r: i64, k: usize) -> Result<Vec<PolyForm>> {
    if r < 0 || k > 3 {
        return Err(Error::Invalid(format!("tensor basis needs r ≥ 0 and k ≤ 3 (got r = {r}, k = {k})")));
    }
    let consts = constant_forms_t3(k);
    Ok(monomials(r, 3)
        .iter()
        .flat_map(|m| consts.iter().map(move |t| m.wedge(t).unwrap().canonicalize()))
        .collect())
}

/// How a basis was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Zero,
    Monomial,
    Bubble,
    Volume,
    Tensor,
    Lift,
    Duality,
}

/// Rewrites `desc` into the equal space with the simplest description.
pub fn normalize(desc: SpaceDesc) -> Result<SpaceDesc> {
    let SpaceDesc { mut family, mut r, k, n, mut trace_free } = desc;
    if k > n {
        return Err(Error::DegreeOutOfRange { k: k as i64, n });
    }
    if family == Family::Custom {
        return Err(Error::Invalid("custom spaces have no construction".into()));
    }
    if trace_free && k == n {
        trace_free = false;
    }
    if family == Family::Pminus {
        if r <= 0 {
            family = Family::P;
            r = -1;
        } else if k == 0 {
            family = Family::P;
        } else if k == n {
            family = Family::P;
            r -= 1;
        }
    }
    if r < 0 {
        (family, r, trace_free) = (Family::P, -1, false);
    }
    Ok(SpaceDesc { family, r, k, n, trace_free })
}

type Resolved = Option<(Route, Arc<Vec<PolyForm>>)>;

/// Memoized recursive construction of invariant bases.
#[derive(Default)]
pub struct Resolver {
    cache: Mutex<HashMap<SpaceDesc, Resolved>>,
}

impl Resolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// A candidate basis of `desc`, or `None` when no construction applies.
    /// The result is not yet verified.
    pub fn resolve(&self, desc: SpaceDesc) -> Result<Resolved> {
        let desc = normalize(desc)?;
        if let Some(hit) = self.cache.lock().unwrap().get(&desc) {
            return Ok(hit.clone());
        }
        let found = self.compute(desc)?.map(|(route, b)| (route, Arc::new(b)));
        self.cache.lock().unwrap().insert(desc, found.clone());
        Ok(found)
    }

    fn compute(&self, desc: SpaceDesc) -> Result<Option<(Route, Vec<PolyForm>)>> {
        let SpaceDesc { family, r, k, n, trace_free } = desc;
        if r < 0 {
            return Ok(Some((Route::Zero, Vec::new())));
        }
        if k == 0 {
            return Ok(Some(if trace_free {
                let b = bubble_basis(r, n);
                (if b.is_empty() { Route::Zero } else { Route::Bubble }, b)
            } else {
                (Route::Monomial, monomials(r, n))
            }));
        }
        if k == n {
            return Ok(Some((Route::Volume, volume_basis(r, n)?)));
        }
        if !trace_free && n == 3 && family == Family::P {
            return Ok(Some((Route::Tensor, tensor_basis_t3(r, k)?)));
        }
        if !trace_free {
            if r < 1 {
                return Ok(None);
            }
            let mut face_bases = Vec::with_capacity(n + 1);
            for d in 0..=n {
                if d < k {
                    face_bases.push(Vec::new());
                    continue;
                }
                match self.resolve(SpaceDesc::new(family, r, k, d, true))? {
                    Some((_, b)) => face_bases.push(b.as_ref().clone()),
                    None => return Ok(None),
                }
            }
            let dm = decomposition_map_with(&desc.build()?, ComplementRule::Coefficient)?;
            return Ok(Some((Route::Lift, dm.lift_basis(&face_bases)?)));
        }
        let (nk, shift) = (n - k, r + k as i64 - n as i64);
        let source = match family {
            Family::Pminus => SpaceDesc::new(Family::P, shift - 1, nk, n, false),
            _ => SpaceDesc::new(Family::Pminus, shift, nk, n, false),
        };
        match self.resolve(source)? {
            Some((Route::Zero, _)) => Ok(Some((Route::Zero, Vec::new()))),
            Some((_, b)) => Ok(Some((Route::Duality, transfer(&b)?))),
            None => Ok(None),
        }
    }

    /// The full verdict for one space: a verified basis or a `ℤ/3` obstruction.
    pub fn verdict(&self, desc: SpaceDesc) -> Result<ExistenceVerdict> {
        if !(1..=3).contains(&desc.n) {
            return Err(Error::Unsupported(format!("invariant bases are decided for n = 1, 2, 3, not {}", desc.n)));
        }
        let space = desc.build()?;
        match self.resolve(desc)? {
            Some((route, basis)) => {
                let candidate = FormSpace::from_basis(desc.n, desc.k, basis.as_ref().clone())
                    .map_err(|e| Error::Internal(format!("{route:?} basis for {desc} is dependent: {e}")))?;
                if !space.same_space(&candidate) {
                    return Err(Error::Internal(format!("{route:?} basis does not span {desc}")));
                }
                let g = GroupSpec::symmetric(desc.n);
                let transcript = verify_invariant_up_to_sign(&basis, &g)?.map_err(|w| {
                    Error::Internal(format!("{route:?} basis for {desc} fails at {} on element {}", w.element, w.index))
                })?;
                Ok(ExistenceVerdict {
                    space: desc,
                    dim: space.dim(),
                    exists: true,
                    route: Some(route),
                    basis: Some(basis.as_ref().clone()),
                    transcript: Some(transcript),
                    obstruction: None,
                })
            }
            None => {
                let cert = z3_decompose(&space)?;
                if cert.admits_invariant_basis() {
                    return Err(Error::Internal(format!("no construction for {desc} and no ℤ/3 obstruction ({cert:?})")));
                }
                Ok(ExistenceVerdict {
                    space: desc,
                    dim: space.dim(),
                    exists: false,
                    route: None,
                    basis: None,
                    transcript: None,
                    obstruction: Some(cert),
                })
            }
        }
    }

    pub fn exists(&self, desc: SpaceDesc) -> Result<bool> {
        Ok(self.verdict(desc)?.exists)
    }
}

/// Existence of an `S_{n+1}`-invariant basis up to sign.
#[derive(Debug, Clone, Serialize)]
pub struct ExistenceVerdict {
    pub space: SpaceDesc,
    pub dim: usize,
    pub exists: bool,
    pub route: Option<Route>,
    pub basis: Option<Vec<PolyForm>>,
    pub transcript: Option<Vec<SignedPermutationImage>>,
    /// `(m, n2)` with `m < n2`.
    pub obstruction: Option<Z3Decomposition>,
}

pub fn construct_invariant_basis(family: Family, r: i64, k: usize, n: usize) -> Result<ExistenceVerdict> {
    Resolver::new().verdict(SpaceDesc::new(family, r, k, n, false))
}

/// As [`construct_invariant_basis`] for any named space, trace-free included.
pub fn construct_for(desc: SpaceDesc) -> Result<ExistenceVerdict> {
    Resolver::new().verdict(desc)
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceVerdict {
    pub space: SpaceDesc,
    pub exists: bool,
}

/// Whether `V` has an invariant basis whose image under `𝒟` is block-wise:
/// every face trace-free space must have one.
#[derive(Debug, Clone, Serialize)]
pub struct DecomposabilityVerdict {
    pub space: SpaceDesc,
    pub decomposable: bool,
    pub faces: Vec<FaceVerdict>,
}

pub fn geometric_decomposability(family: Family, r: i64, k: usize, n: usize) -> Result<DecomposabilityVerdict> {
    geometric_decomposability_with(&Resolver::new(), family, r, k, n)
}

pub fn geometric_decomposability_with(
    resolver: &Resolver,
    family: Family,
    r: i64,
    k: usize,
    n: usize,
) -> Result<DecomposabilityVerdict> {
    if r < 1 {
        return Err(Error::Invalid(format!("geometric decomposability needs r ≥ 1, got {r}")));
    }
    if k > n {
        return Err(Error::DegreeOutOfRange { k: k as i64, n });
    }
    let faces = (k.max(1)..=n)
        .into_par_iter()
        .map(|d| {
            let space = SpaceDesc::new(family, r, k, d, true);
            Ok(FaceVerdict { space, exists: resolver.exists(space)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecomposabilityVerdict {
        space: SpaceDesc::new(family, r, k, n, false),
        decomposable: faces.iter().all(|f| f.exists),
        faces,
    })
}

/// The closed-form conditions for existence on `T²` (`k = 1`) and
/// `T³` (`k = 1, 2`); `None` outside those rows or for `r < 0`.
pub fn predicted_existence(desc: SpaceDesc) -> Option<bool> {
    let SpaceDesc { family, r, k, n, trace_free } = desc;
    if r < 0 {
        return None;
    }
    let (m, positive) = (r % 3, r >= 3);
    match (n, k, family, trace_free) {
        (2, 1, Family::P, false) => Some(m != 0),
        (2, 1, Family::Pminus, _) => Some(m != 2),
        (2, 1, Family::P, true) => Some(!(positive && m == 0)),
        (3, 1, Family::Pminus, false) => Some(m != 2),
        (3, 2, Family::P, true) => Some(!(positive && m == 0)),
        (3, 1 | 2, Family::P | Family::Pminus, _) => Some(true),
        _ => None,
    }
}

/// The closed-form conditions for geometric decomposability on `T³`, `r ≥ 1`.
pub fn predicted_decomposability(family: Family, r: i64, k: usize) -> Option<bool> {
    if r < 1 {
        return None;
    }
    match (family, k) {
        (Family::P, 1 | 2) => Some(r % 3 != 0),
        (Family::Pminus, 1) => Some(r % 3 != 2),
        (Family::Pminus, 2) => Some(true),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Permutation;
    use crate::spaces::build_p;
    use crate::symmetry::check_transcript_entry;

    #[test]
    fn scalar_and_volume() {
        let b = monomial_basis_scalar(2, 3).unwrap();
        assert_eq!(b.len(), 10);
        let t = verify_invariant_up_to_sign(&b, &GroupSpec::symmetric(3)).unwrap().unwrap();
        assert!(t.iter().all(|e| e.signs.iter().all(|&s| s == 1)));
        assert_eq!(monomial_basis_scalar(0, 2).unwrap(), vec![PolyForm::constant(2, Rational::one())]);

        let v = volume_basis(2, 3).unwrap();
        let t = verify_invariant_up_to_sign(&v, &GroupSpec::symmetric(3)).unwrap().unwrap();
        for e in &t {
            assert!(e.signs.iter().all(|&s| s as i32 == e.element.sign()));
        }
        assert_eq!(volume_basis(0, 1).unwrap(), vec![PolyForm::dlambda(1, 1)]);
    }

    type Poly = std::collections::BTreeMap<Vec<u32>, Rational>;

    fn binom(n: u32, k: u32) -> Rational {
        factorial(n) / (factorial(k) * factorial(n - k))
    }

    // ∫_0^{1 - t_1 - ⋯ - t_{m-1}} dt_m, repeated until no variables remain.
    fn fubini(mut p: Poly, mut m: usize) -> Rational {
        while m > 0 {
            let mut next = Poly::new();
            for (e, c) in p {
                let pw = e[m - 1] + 1;
                let base: Vec<u32> = e[..m - 1].to_vec();
                let c = c / Rational::from_int(pw as i64);
                for i in 0..=pw {
                    let ci = &c * &binom(pw, i) * Rational::from_int(if i % 2 == 0 { 1 } else { -1 });
                    for g in MultiIndex::all_of_degree(m - 1, i) {
                        let mut coeff = ci.clone();
                        let mut left = i;
                        let mut key = base.clone();
                        for (j, &gj) in g.exps().iter().enumerate() {
                            coeff = coeff * binom(left, gj as u32);
                            left -= gj as u32;
                            key[j] += gj as u32;
                        }
                        *next.entry(key).or_default() += coeff;
                    }
                }
            }
            p = next;
            m -= 1;
        }
        p.into_values().sum()
    }

    fn face_integral_oracle(f: &PolyForm, face: FaceId) -> Rational {
        let tr = f.trace(face).unwrap();
        let poly: Poly = tr.terms().map(|((_, a), c)| (a.exps()[1..].iter().map(|&e| e as u32).collect(), c.clone())).collect();
        fubini(poly, face.dim())
    }

    #[test]
    fn whitney_face_integrals() {
        assert_eq!(whitney_basis(0, 2).unwrap(), (0..3).map(|i| PolyForm::lambda(2, i).canonicalize()).collect::<Vec<_>>());
        for n in 1..=3 {
            for k in 0..=n {
                let faces = FaceId::all_of_dim(n, k);
                for (i, phi) in whitney_basis(k, n).unwrap().iter().enumerate() {
                    for (j, &f) in faces.iter().enumerate() {
                        let expect = Rational::from_int((i == j) as i64);
                        assert_eq!(phi.integrate_over_face(f).unwrap(), expect);
                        if k > 0 {
                            assert_eq!(face_integral_oracle(phi, f), expect);
                        }
                    }
                }
            }
        }
        let t = verify_invariant_up_to_sign(&whitney_basis(1, 2).unwrap(), &GroupSpec::symmetric(2)).unwrap().unwrap();
        assert!(t.iter().any(|e| e.signs.contains(&-1)));
    }

    #[test]
    fn constant_bases() {
        let b1 = constant_basis_t3(1).unwrap();
        let s4 = GroupSpec::symmetric(3);
        let t = verify_invariant_up_to_sign(&b1, &s4).unwrap().unwrap();
        let swap = t.iter().find(|e| e.element == Permutation::transposition(4, 0, 1)).unwrap();
        assert_eq!((swap.targets[1], swap.signs[1]), (2, -1));
        let b2 = constant_basis_t3(2).unwrap();
        assert!(verify_invariant_up_to_sign(&b2, &s4).unwrap().is_ok());
        assert!(constant_basis_t3(3).is_err());
        assert_eq!(tensor_basis_t3(0, 1).unwrap(), b1);
        let t11 = tensor_basis_t3(1, 1).unwrap();
        assert_eq!(t11.len(), 12);
        assert!(FormSpace::from_basis(3, 1, t11).unwrap().same_space(&build_p(1, 1, 3).unwrap()));
    }

    #[test]
    fn verdict_examples() {
        let v = construct_invariant_basis(Family::P, 0, 1, 2).unwrap();
        assert!(!v.exists);
        assert_eq!(v.obstruction, Some(Z3Decomposition { m: 0, n2: 1 }));
        let v = construct_invariant_basis(Family::P, 3, 1, 3).unwrap();
        assert!(v.exists);
        assert_eq!(v.route, Some(Route::Tensor));
        let b = v.basis.as_ref().unwrap();
        assert!(v.transcript.unwrap().iter().all(|e| check_transcript_entry(b, e).unwrap()));
        assert!(!construct_invariant_basis(Family::Pminus, 2, 1, 3).unwrap().exists);
        assert!(construct_invariant_basis(Family::P, 2, 1, 2).unwrap().exists);
        assert!(construct_invariant_basis(Family::Pminus, 1, 1, 2).unwrap().exists);
        assert!(construct_invariant_basis(Family::P, 1, 0, 4).is_err());
    }

    #[test]
    fn normalization() {
        let n = |f, r, k, m, t| normalize(SpaceDesc::new(f, r, k, m, t)).unwrap();
        assert_eq!(n(Family::Pminus, 2, 0, 2, false), SpaceDesc::new(Family::P, 2, 0, 2, false));
        assert_eq!(n(Family::Pminus, 2, 2, 2, true), SpaceDesc::new(Family::P, 1, 2, 2, false));
        assert_eq!(n(Family::Pminus, 0, 1, 2, true), SpaceDesc::new(Family::P, -1, 1, 2, false));
    }

    #[test]
    fn decomposability_examples() {
        let r = Resolver::new();
        assert!(!geometric_decomposability_with(&r, Family::P, 3, 1, 3).unwrap().decomposable);
        assert!(geometric_decomposability_with(&r, Family::Pminus, 1, 2, 3).unwrap().decomposable);
        assert!(geometric_decomposability_with(&r, Family::P, 1, 1, 3).unwrap().decomposable);
        assert!(geometric_decomposability(Family::P, 0, 1, 3).is_err());
    }
}
