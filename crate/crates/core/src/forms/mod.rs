//! Polynomial differential forms in barycentric coordinates.
//!
//! A [`PolyForm`] is a finite sum `Σ c · λ^α dλ_σ` over the ambient variables
//! `λ_0, …, λ_n`. Any such sum is an ambient form on `ℝ^{n+1}`; its restriction
//! to `T^n` has a unique *canonical* representative in which neither `λ_0` nor
//! `dλ_0` occurs (eliminated with `λ_0 = 1 - Σ λ_i`, `dλ_0 = -Σ dλ_i`).

mod combine;
mod index;
mod integrate;
mod perm;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

pub use combine::IntegerForms;
pub use index::{AltIndex, FaceId, MultiIndex, MAX_VERTICES};
pub use integrate::{monomial_integral, InnerProduct};
pub use perm::Permutation;

use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::rational::Rational;

/// Term key: the differential part first, so terms sort by `(σ, α)`.
pub type TermKey = (AltIndex, MultiIndex);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Ambient,
    Canonical,
}

/// A polynomial differential `k`-form in the variables `λ_0, …, λ_n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyForm {
    n: usize,
    k: usize,
    terms: BTreeMap<TermKey, Rational>,
}

fn check_n(n: usize) -> Result<()> {
    if n + 1 > MAX_VERTICES {
        return Err(Error::Dimension(format!("simplex dimension {n} exceeds {}", MAX_VERTICES - 1)));
    }
    Ok(())
}

impl PolyForm {
    pub fn zero(n: usize, k: usize) -> Self {
        PolyForm { n, k, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut f = Self::zero(n, 0);
        if !c.is_zero() {
            f.terms.insert((AltIndex::EMPTY, MultiIndex::zero(n + 1)), c);
        }
        f
    }

    /// The single term `c · λ^exps dλ_diffs`; `diffs` may be in any order
    /// (the sign of the sorting permutation is applied).
    pub fn term(n: usize, exps: &[u8], diffs: &[usize], c: Rational) -> Result<Self> {
        check_n(n)?;
        if exps.len() != n + 1 {
            return Err(Error::Dimension(format!("expected {} exponents, got {}", n + 1, exps.len())));
        }
        if diffs.iter().any(|&d| d > n) {
            return Err(Error::Dimension(format!("differential index out of range in {diffs:?}")));
        }
        let k = diffs.len();
        let Some((sigma, sign)) = sort_with_sign(diffs) else {
            return Ok(Self::zero(n, k));
        };
        let mut f = Self::zero(n, k);
        if !c.is_zero() {
            let c = if sign < 0 { -c } else { c };
            f.terms.insert((sigma, MultiIndex::new(exps)), c);
        }
        Ok(f)
    }

    pub fn monomial(n: usize, alpha: MultiIndex) -> Self {
        assert_eq!(alpha.len(), n + 1, "exponent vector length");
        let mut f = Self::zero(n, 0);
        f.terms.insert((AltIndex::EMPTY, alpha), Rational::one());
        f
    }

    /// `λ_i`.
    pub fn lambda(n: usize, i: usize) -> Self {
        Self::monomial(n, MultiIndex::unit(n + 1, i))
    }

    /// `dλ_i`.
    pub fn dlambda(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n, 1);
        f.terms.insert((AltIndex::new(&[i]), MultiIndex::zero(n + 1)), Rational::one());
        f
    }

    /// `dλ_σ` for an increasing `σ`.
    pub fn dlambdas(n: usize, sigma: AltIndex) -> Self {
        let mut f = Self::zero(n, sigma.len());
        f.terms.insert((sigma, MultiIndex::zero(n + 1)), Rational::one());
        f
    }

    /// Builds a form from raw terms, summing duplicates and dropping zeros.
    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (TermKey, Rational)>) -> Self {
        let mut map: BTreeMap<TermKey, Rational> = BTreeMap::new();
        for (key, c) in terms {
            debug_assert_eq!(key.0.len(), k);
            debug_assert_eq!(key.1.len(), n + 1);
            accumulate(&mut map, key, &c);
        }
        map.retain(|_, c| !c.is_zero());
        PolyForm { n, k, terms: map }
    }

    /// The canonical form with the given coordinates.
    pub fn from_coordinates(n: usize, k: usize, coords: SparseVec<TermKey>) -> Self {
        let f = PolyForm { n, k, terms: coords.into_iter().filter(|(_, c)| !c.is_zero()).collect() };
        debug_assert!(f.is_canonical());
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&TermKey, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, key: &TermKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    /// True when no term is stored. For an ambient form this is stronger than
    /// vanishing on `T^n`; use [`PolyForm::vanishes`] for the latter.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vanishes(&self) -> bool {
        self.canonicalize().is_zero()
    }

    /// A form is canonical exactly when no term mentions `λ_0` or `dλ_0`.
    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(|(s, a)| !s.contains(0) && a.get(0) == 0)
    }

    pub fn representation(&self) -> Representation {
        if self.is_canonical() {
            Representation::Canonical
        } else {
            Representation::Ambient
        }
    }

    /// Largest total degree of a monomial coefficient (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, a)| a.degree()).max()
    }

    /// Canonical coordinates, i.e. the term map of the canonical representative.
    pub fn coordinates(&self) -> SparseVec<TermKey> {
        self.canonicalize().terms
    }

    pub fn into_coordinates(self) -> SparseVec<TermKey> {
        if self.is_canonical() {
            self.terms
        } else {
            self.canonicalize().terms
        }
    }

    /// Restriction to `T^n`, written without `λ_0` and `dλ_0`.
    pub fn canonicalize(&self) -> PolyForm {
        if self.is_canonical() {
            return self.clone();
        }
        let n = self.n;
        let mut out: BTreeMap<TermKey, Rational> = BTreeMap::new();
        let mut diffs: Vec<(AltIndex, bool)> = Vec::with_capacity(n);
        for ((sigma, alpha), c) in &self.terms {
            diffs.clear();
            if sigma.contains(0) {
                // dλ_0 ∧ dλ_τ = -Σ_{i∉τ} dλ_i ∧ dλ_τ
                let tau = sigma.without(0);
                for i in 1..=n {
                    if !tau.contains(i) {
                        let negative = tau.count_below(i) % 2 == 0;
                        diffs.push((tau.with(i), negative));
                    }
                }
            } else {
                diffs.push((*sigma, false));
            }
            if diffs.is_empty() {
                continue;
            }
            let a0 = alpha.get(0);
            let mut base = *alpha;
            base.set(0, 0);
            if a0 == 0 {
                for &(s, neg) in &diffs {
                    let v = if neg { -c } else { c.clone() };
                    accumulate(&mut out, (s, base), &v);
                }
                continue;
            }
            let expansion = lambda0_expansion(n, a0);
            for (beta, e) in expansion.iter() {
                let mono = base.add(beta);
                let ce = c * e;
                for &(s, neg) in &diffs {
                    let v = if neg { -&ce } else { ce.clone() };
                    accumulate(&mut out, (s, mono), &v);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        PolyForm { n, k: self.k, terms: out }
    }

    fn check_same_space(&self, other: &PolyForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("forms on T^{} and T^{}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn scale(&self, s: &Rational) -> PolyForm {
        if s.is_zero() {
            return PolyForm::zero(self.n, self.k);
        }
        PolyForm { n: self.n, k: self.k, terms: self.terms.iter().map(|(key, c)| (*key, c * s)).collect() }
    }

    /// `self + s·other`, in place.
    pub fn add_scaled(&mut self, s: &Rational, other: &PolyForm) {
        assert_eq!((self.n, self.k), (other.n, other.k), "adding forms of different type");
        if s.is_zero() {
            return;
        }
        for (key, c) in &other.terms {
            accumulate(&mut self.terms, *key, &(c * s));
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        self.check_same_space(other)?;
        let k = self.k + other.k;
        if k > self.n + 1 {
            return Err(Error::DegreeOutOfRange { k: k as i64, n: self.n });
        }
        let mut out = BTreeMap::new();
        for ((s1, a1), c1) in &self.terms {
            for ((s2, a2), c2) in &other.terms {
                let Some(sign) = s1.merge_sign(s2) else { continue };
                let c = c1 * c2;
                let c = if sign < 0 { -c } else { c };
                accumulate(&mut out, (s1.union(s2), a1.add(a2)), &c);
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(PolyForm { n: self.n, k, terms: out })
    }

    /// Contraction `i_X` with the position field `X = Σ λ_i ∂/∂λ_i`, applied to
    /// the stored ambient representative.
    pub fn contract_x(&self) -> Result<PolyForm> {
        if self.k == 0 {
            return Err(Error::DegreeOutOfRange { k: -1, n: self.n });
        }
        let mut out = BTreeMap::new();
        for ((sigma, alpha), c) in &self.terms {
            for (j, v) in sigma.vertices().enumerate() {
                let mut a = *alpha;
                a.set(v, a.get(v) + 1);
                let val = if j % 2 == 0 { c.clone() } else { -c };
                accumulate(&mut out, (sigma.without(v), a), &val);
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(PolyForm { n: self.n, k: self.k - 1, terms: out })
    }

    /// The representative `Σ c λ^β dλ_σ` with every `|β| = r` and `0 ∉ σ`,
    /// obtained from the canonical form by multiplying with powers of `Σ λ_i = 1`.
    pub fn homogenize(&self, r: u32) -> Result<PolyForm> {
        let canon = self.canonicalize();
        if canon.degree().is_some_and(|d| d > r) {
            return Err(Error::Invalid(format!("form of degree {} has no degree-{r} representative", canon.degree().unwrap())));
        }
        let mut out = BTreeMap::new();
        for ((sigma, alpha), c) in &canon.terms {
            let m = r - alpha.degree();
            for b in MultiIndex::all_of_degree(self.n + 1, m) {
                let mut coef = crate::rational::factorial(m);
                for &e in b.exps() {
                    coef = coef / crate::rational::factorial(e as u32);
                }
                accumulate(&mut out, (*sigma, alpha.add(&b)), &(c * &coef));
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(PolyForm { n: self.n, k: self.k, terms: out })
    }

    /// Exterior derivative of the stored ambient representative.
    pub fn exterior_derivative(&self) -> Result<PolyForm> {
        if self.k >= self.n {
            return Err(Error::DegreeOutOfRange { k: self.k as i64 + 1, n: self.n });
        }
        let mut out = BTreeMap::new();
        for ((sigma, alpha), c) in &self.terms {
            for i in (0..=self.n).filter(|&i| alpha.get(i) > 0 && !sigma.contains(i)) {
                let mut a = *alpha;
                a.set(i, a.get(i) - 1);
                let mut val = c * &Rational::from_int(alpha.get(i) as i64);
                if sigma.count_below(i) % 2 == 1 {
                    val = -val;
                }
                accumulate(&mut out, (sigma.with(i), a), &val);
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(PolyForm { n: self.n, k: self.k + 1, terms: out })
    }

    /// Trace onto the face `F`, relabelled to the face's own barycentric
    /// coordinates (vertex `s_j` of `F` becomes `j`), in canonical form.
    pub fn trace(&self, face: FaceId) -> Result<PolyForm> {
        let verts = face.vertices();
        if verts.iter().any(|&v| v > self.n) {
            return Err(Error::Dimension(format!("face {face} is not a face of T^{}", self.n)));
        }
        let d = face.dim();
        let fmask = face.as_alt().mask();
        let mut out = BTreeMap::new();
        for ((sigma, alpha), c) in &self.terms {
            if sigma.mask() & !fmask != 0 {
                continue;
            }
            if (0..=self.n).any(|i| fmask & (1 << i) == 0 && alpha.get(i) != 0) {
                continue;
            }
            let mut a = MultiIndex::zero(d + 1);
            for (j, &v) in verts.iter().enumerate() {
                a.set(j, alpha.get(v));
            }
            let mut smask = 0u16;
            for v in sigma.vertices() {
                smask |= 1 << face.position(v).unwrap();
            }
            accumulate(&mut out, (AltIndex::from_mask(smask), a), c);
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(PolyForm { n: d, k: self.k, terms: out }.canonicalize())
    }

    /// Pullback under `S_π`: `λ_i ↦ λ_{π(i)}`, `dλ_i ↦ dλ_{π(i)}`, canonicalized.
    pub fn pullback(&self, pi: &Permutation) -> Result<PolyForm> {
        if pi.degree() != self.n + 1 {
            return Err(Error::Dimension(format!(
                "permutation of {} points acting on T^{}",
                pi.degree(),
                self.n
            )));
        }
        Ok(self.substitute(pi).canonicalize())
    }

    /// The ambient substitution behind [`PolyForm::pullback`], without canonicalizing.
    pub fn substitute(&self, pi: &Permutation) -> PolyForm {
        let mut out = BTreeMap::new();
        let mut images: Vec<usize> = Vec::with_capacity(self.k);
        for ((sigma, alpha), c) in &self.terms {
            let mut a = MultiIndex::zero(self.n + 1);
            for i in 0..=self.n {
                a.set(pi.apply(i), alpha.get(i));
            }
            images.clear();
            images.extend(sigma.vertices().map(|v| pi.apply(v)));
            let (s, sign) = sort_with_sign(&images).expect("permutation images are distinct");
            let v = if sign < 0 { -c } else { c.clone() };
            accumulate(&mut out, (s, a), &v);
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        PolyForm { n: self.n, k: self.k, terms: out }
    }

    /// `∫_{T^n} f` for a 0-form, with `vol(T^n) = 1`.
    pub fn integrate_volume(&self) -> Result<Rational> {
        if self.k != 0 {
            return Err(Error::DegreeOutOfRange { k: self.k as i64, n: self.n });
        }
        Ok(self.terms.iter().map(|((_, a), c)| c * &monomial_integral(a)).sum())
    }

    /// `∫_{T^n} ⟨a, b⟩` under the metric `g_ij = δ_ij - 1/(n+1)`.
    pub fn inner_product(&self, other: &PolyForm) -> Result<Rational> {
        self.check_same_space(other)?;
        if self.k != other.k {
            return Err(Error::DegreeOutOfRange { k: other.k as i64, n: self.n });
        }
        let mut ip = InnerProduct::new(self.n, self.k);
        Ok(ip.pair(&self.coordinates(), &other.coordinates()))
    }

    /// Integral over the `k`-face `F`, oriented by increasing vertex order, with
    /// the Lebesgue measure of the face's barycentric chart (a 0-face integral
    /// is point evaluation).
    pub fn integrate_over_face(&self, face: FaceId) -> Result<Rational> {
        if face.dim() != self.k {
            return Err(Error::DegreeOutOfRange { k: self.k as i64, n: face.dim() });
        }
        let tr = self.trace(face)?;
        let k = self.k as u32;
        Ok(tr
            .terms
            .iter()
            .map(|((_, a), c)| {
                // ∫_{T^k} λ^β dλ_1⋯dλ_k = β!/(|β|+k)!
                let num: Rational = a.exps().iter().map(|&e| crate::rational::factorial(e as u32)).product();
                c * &(num / crate::rational::factorial(a.degree() + k))
            })
            .sum())
    }

    /// Value at vertex `v_i` of a 0-form.
    pub fn evaluate_at_vertex(&self, i: usize) -> Result<Rational> {
        if self.k != 0 {
            return Err(Error::DegreeOutOfRange { k: self.k as i64, n: self.n });
        }
        self.integrate_over_face(FaceId::new(&[i]))
    }
}

fn accumulate(map: &mut BTreeMap<TermKey, Rational>, key: TermKey, c: &Rational) {
    match map.get_mut(&key) {
        Some(v) => *v += c,
        None => {
            map.insert(key, c.clone());
        }
    }
}

/// Sorts distinct indices, returning the set and the sign of the sort; `None`
/// on a repeated index.
fn sort_with_sign(idx: &[usize]) -> Option<(AltIndex, i32)> {
    let mut mask = 0u16;
    let mut inversions = 0;
    for (a, &i) in idx.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
        inversions += idx[..a].iter().filter(|&&j| j > i).count();
    }
    Some((AltIndex::from_mask(mask), if inversions % 2 == 0 { 1 } else { -1 }))
}

type Expansion = Rc<Vec<(MultiIndex, Rational)>>;

thread_local! {
    static EXPANSIONS: RefCell<HashMap<(usize, u8), Expansion>> = RefCell::new(HashMap::new());
}

/// `(1 - λ_1 - ⋯ - λ_n)^a` as exponent vectors of length `n+1` (slot 0 unused).
fn lambda0_expansion(n: usize, a: u8) -> Expansion {
    EXPANSIONS.with(|cache| {
        if let Some(e) = cache.borrow().get(&(n, a)) {
            return e.clone();
        }
        let mut terms = Vec::new();
        for j in 0..=a as u32 {
            for beta in MultiIndex::all_of_degree(n, j) {
                let mut m = MultiIndex::zero(n + 1);
                let mut coeff = binomial(a as u32, j);
                let mut left = j;
                for (i, &b) in beta.exps().iter().enumerate() {
                    m.set(i + 1, b);
                    coeff *= binomial(left, b as u32);
                    left -= b as u32;
                }
                let c = Rational::from_int(if j % 2 == 0 { coeff as i64 } else { -(coeff as i64) });
                terms.push((m, c));
            }
        }
        let e = Rc::new(terms);
        cache.borrow_mut().insert((n, a), e.clone());
        e
    })
}

fn binomial(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl Add<&PolyForm> for &PolyForm {
    type Output = PolyForm;
    fn add(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), rhs);
        out
    }
}

impl Sub<&PolyForm> for &PolyForm {
    type Output = PolyForm;
    fn sub(self, rhs: &PolyForm) -> PolyForm {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }
}

impl Neg for &PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        self.scale(&-Rational::one())
    }
}

impl Neg for PolyForm {
    type Output = PolyForm;
    fn neg(self) -> PolyForm {
        -&self
    }
}

impl Mul<&PolyForm> for &Rational {
    type Output = PolyForm;
    fn mul(self, rhs: &PolyForm) -> PolyForm {
        rhs.scale(self)
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, ((sigma, alpha), c)) in self.terms.iter().enumerate() {
            let (neg, abs) = (c.is_negative(), c.abs());
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in alpha.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("λ{i}")),
                    _ => factors.push(format!("λ{i}^{e}")),
                }
            }
            if !sigma.is_empty() {
                factors.push(sigma.vertices().map(|v| format!("dλ{v}")).collect::<Vec<_>>().join("∧"));
            }
            if !abs.is_one() || factors.is_empty() {
                factors.insert(0, abs.to_string());
            }
            write!(f, "{}", factors.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyForm(n={}, k={}: {})", self.n, self.k, self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exponents: Vec<u8>,
    differentials: Vec<usize>,
    coefficient: Rational,
}

#[derive(Serialize, Deserialize)]
struct FormRecord {
    n: usize,
    k: usize,
    terms: Vec<TermRecord>,
}

impl Serialize for PolyForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRecord {
            n: self.n,
            k: self.k,
            terms: self
                .terms
                .iter()
                .map(|((sigma, alpha), c)| TermRecord {
                    exponents: alpha.exps().to_vec(),
                    differentials: sigma.to_vec(),
                    coefficient: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = FormRecord::deserialize(d)?;
        check_n(rec.n).map_err(D::Error::custom)?;
        let mut f = PolyForm::zero(rec.n, rec.k);
        for t in rec.terms {
            if t.differentials.len() != rec.k {
                return Err(D::Error::custom("term degree does not match k"));
            }
            let term = PolyForm::term(rec.n, &t.exponents, &t.differentials, t.coefficient).map_err(D::Error::custom)?;
            f.add_scaled(&Rational::one(), &term);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn homogenize_examples() {
        let n = 2;
        let one = PolyForm::constant(n, Rational::one());
        let h = one.homogenize(1).unwrap();
        assert_eq!(h.num_terms(), 3);
        assert_eq!(h.canonicalize(), one);
        let f = PolyForm::term(n, &[1, 2, 0], &[0], q(3, 2)).unwrap();
        let h = f.homogenize(4).unwrap();
        assert!(h.terms().all(|((s, a), _)| a.degree() == 4 && !s.contains(0)));
        assert_eq!(h.canonicalize(), f.canonicalize());
        assert!(f.homogenize(2).is_err());
    }

    #[test]
    fn exterior_derivative_examples() {
        let n = 2;
        let f = PolyForm::term(n, &[1, 1, 0], &[], Rational::one()).unwrap();
        let expect = &PolyForm::term(n, &[0, 1, 0], &[0], Rational::one()).unwrap()
            + &PolyForm::term(n, &[1, 0, 0], &[1], Rational::one()).unwrap();
        assert_eq!(f.exterior_derivative().unwrap(), expect);
        let g = PolyForm::term(n, &[2, 1, 3], &[], Rational::one()).unwrap().canonicalize();
        let dd = g.exterior_derivative().unwrap().exterior_derivative().unwrap();
        assert!(dd.canonicalize().is_zero());
        let pi = Permutation::cycle(3, &[0, 1, 2]);
        assert_eq!(
            g.pullback(&pi).unwrap().exterior_derivative().unwrap().canonicalize(),
            g.exterior_derivative().unwrap().pullback(&pi).unwrap()
        );
        assert!(PolyForm::dlambdas(n, AltIndex::new(&[1, 2])).exterior_derivative().is_err());
    }

    fn sum(forms: &[PolyForm]) -> PolyForm {
        let mut acc = PolyForm::zero(forms[0].n(), forms[0].k());
        for f in forms {
            acc = &acc + f;
        }
        acc
    }

    #[test]
    fn simplex_relations() {
        let n = 2;
        let s = sum(&[PolyForm::lambda(n, 0), PolyForm::lambda(n, 1), PolyForm::lambda(n, 2)]);
        assert_eq!(s.canonicalize(), PolyForm::constant(n, Rational::one()));
        let d = sum(&[PolyForm::dlambda(n, 0), PolyForm::dlambda(n, 1), PolyForm::dlambda(n, 2)]);
        assert!(d.vanishes());
    }

    #[test]
    fn lambda0_squared() {
        // Oracle: expand (1 - x - y)^2 by hand.
        let f = PolyForm::term(2, &[2, 0, 0], &[], Rational::one()).unwrap().canonicalize();
        let expect = PolyForm::from_terms(
            2,
            0,
            [
                ([0, 0, 0], 1),
                ([0, 1, 0], -2),
                ([0, 0, 1], -2),
                ([0, 2, 0], 1),
                ([0, 1, 1], 2),
                ([0, 0, 2], 1),
            ]
            .map(|(e, c)| ((AltIndex::EMPTY, MultiIndex::new(&e)), Rational::from_int(c))),
        );
        assert_eq!(f, expect);
        assert_eq!(f.canonicalize(), f);
    }

    #[test]
    fn dlambda0_wedge_canonical() {
        // dλ0∧dλ1 = -(dλ1+dλ2)∧dλ1 = dλ1∧dλ2 on T^2
        let f = PolyForm::dlambda(2, 0).wedge(&PolyForm::dlambda(2, 1)).unwrap();
        assert_eq!(f.canonicalize(), PolyForm::dlambdas(2, AltIndex::new(&[1, 2])));
    }

    #[test]
    fn wedge_examples() {
        let n = 2;
        let d1 = PolyForm::dlambda(n, 1);
        let d2 = PolyForm::dlambda(n, 2);
        assert!(d1.wedge(&d1).unwrap().is_zero());
        assert_eq!(d1.wedge(&d2).unwrap(), -d2.wedge(&d1).unwrap());
        let a = PolyForm::term(n, &[1, 0, 0], &[1], Rational::one()).unwrap();
        let b = PolyForm::term(n, &[0, 1, 0], &[2], Rational::one()).unwrap();
        assert_eq!(a.wedge(&b).unwrap(), PolyForm::term(n, &[1, 1, 0], &[1, 2], Rational::one()).unwrap());
        assert!(PolyForm::dlambda(1, 0).wedge(&PolyForm::dlambda(2, 0)).is_err());
    }

    #[test]
    fn contraction_examples() {
        let n = 2;
        let d01 = PolyForm::term(n, &[0, 0, 0], &[0, 1], Rational::one()).unwrap();
        let expect = &PolyForm::term(n, &[1, 0, 0], &[1], Rational::one()).unwrap()
            - &PolyForm::term(n, &[0, 1, 0], &[0], Rational::one()).unwrap();
        assert_eq!(d01.contract_x().unwrap(), expect);
        let vol = PolyForm::term(n, &[0, 0, 0], &[0, 1, 2], Rational::one()).unwrap();
        assert!(vol.contract_x().unwrap().contract_x().unwrap().is_zero());
        assert_eq!(PolyForm::dlambda(n, 0).contract_x().unwrap(), PolyForm::lambda(n, 0));
        assert!(PolyForm::lambda(n, 0).contract_x().is_err());
    }

    #[test]
    fn trace_examples() {
        let n = 2;
        let edge = FaceId::new(&[1, 2]);
        let l0l1 = PolyForm::term(n, &[1, 1, 0], &[], Rational::one()).unwrap();
        assert!(l0l1.trace(edge).unwrap().is_zero());
        let l1l2 = PolyForm::term(n, &[0, 1, 1], &[], Rational::one()).unwrap();
        let bubble = PolyForm::term(1, &[1, 1], &[], Rational::one()).unwrap().canonicalize();
        assert_eq!(l1l2.trace(edge).unwrap(), bubble);
        let f = &PolyForm::term(n, &[2, 0, 0], &[], Rational::one()).unwrap()
            + &PolyForm::term(n, &[0, 1, 1], &[], Rational::from_int(17)).unwrap();
        assert_eq!(f.trace(edge).unwrap(), bubble.scale(&Rational::from_int(17)));
    }

    #[test]
    fn trace_is_transitive() {
        let n = 3;
        let f = &PolyForm::term(n, &[1, 2, 0, 1], &[1, 3], q(3, 2)).unwrap()
            + &PolyForm::term(n, &[0, 1, 1, 1], &[0, 2], Rational::one()).unwrap();
        let big = FaceId::new(&[0, 1, 3]);
        // {1,3} sits at positions {1,2} of {0,1,3}
        let via = f.trace(big).unwrap().trace(FaceId::new(&[1, 2])).unwrap();
        assert_eq!(via, f.trace(FaceId::new(&[1, 3])).unwrap());
    }

    #[test]
    fn pullback_swap_and_vertices() {
        let n = 2;
        let swap = Permutation::transposition(3, 0, 1);
        assert_eq!(PolyForm::lambda(n, 0).pullback(&swap).unwrap(), PolyForm::lambda(n, 1));
        for pi in Permutation::all(3) {
            for j in 0..3 {
                let f = PolyForm::lambda(n, j).pullback(&pi).unwrap();
                for i in 0..3 {
                    // (S*_π λ_j)(v_i) = λ_j(v_{π⁻¹(i)})
                    let expect = if pi.inverse().apply(i) == j { 1 } else { 0 };
                    assert_eq!(f.evaluate_at_vertex(i).unwrap(), Rational::from_int(expect));
                }
            }
        }
    }

    #[test]
    fn integrals() {
        let n = 2;
        assert_eq!(PolyForm::constant(n, Rational::one()).integrate_volume().unwrap(), Rational::one());
        assert_eq!(PolyForm::lambda(n, 0).integrate_volume().unwrap(), q(1, 3));
        let l0l1 = PolyForm::term(n, &[1, 1, 0], &[], Rational::one()).unwrap();
        assert_eq!(l0l1.integrate_volume().unwrap(), q(1, 12));
        assert_eq!(l0l1.canonicalize().integrate_volume().unwrap(), q(1, 12));
        assert!(PolyForm::dlambda(n, 1).integrate_volume().is_err());
    }

    #[test]
    fn metric_examples() {
        let n = 2;
        let d1 = PolyForm::dlambda(n, 1);
        let d2 = PolyForm::dlambda(n, 2);
        assert_eq!(d1.inner_product(&d1).unwrap(), q(2, 3));
        assert_eq!(d1.inner_product(&d2).unwrap(), q(-1, 3));
        // |dλ0|² = |dλ1 + dλ2|² = 2/3 + 2/3 - 2/3
        let d0 = PolyForm::dlambda(n, 0);
        assert_eq!(d0.inner_product(&d0).unwrap(), q(2, 3));
    }

    #[test]
    fn face_integrals() {
        let n = 2;
        let e01 = FaceId::new(&[0, 1]);
        assert_eq!(PolyForm::dlambda(n, 1).integrate_over_face(e01).unwrap(), Rational::one());
        assert_eq!(PolyForm::dlambda(n, 2).integrate_over_face(e01).unwrap(), Rational::zero());
        assert_eq!(PolyForm::dlambda(n, 0).integrate_over_face(e01).unwrap(), -Rational::one());
        let vol = PolyForm::dlambdas(n, AltIndex::new(&[1, 2]));
        assert_eq!(vol.integrate_over_face(FaceId::whole(n)).unwrap(), q(1, 2));
        assert!(vol.integrate_over_face(e01).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = &PolyForm::term(2, &[1, 0, 2], &[1, 2], q(-3, 4)).unwrap()
            + &PolyForm::term(2, &[0, 0, 0], &[0, 2], Rational::one()).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"coefficient\":\"-3/4\""));
        let back: PolyForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn display() {
        let f = &PolyForm::term(2, &[2, 1, 0], &[1, 2], q(-1, 2)).unwrap() + &PolyForm::dlambdas(2, AltIndex::new(&[0, 1]));
        assert_eq!(f.to_string(), "dλ0∧dλ1 - 1/2 λ0^2 λ1 dλ1∧dλ2");
    }
}
