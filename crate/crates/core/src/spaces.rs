//! The spaces `P_rΛ^k(T^n)`, `P_r⁻Λ^k(T^n)` and their trace-free subspaces.

use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{AltIndex, FaceId, IntegerForms, MultiIndex, PolyForm, TermKey, MAX_VERTICES};
use crate::linalg::{certify_independent, Echelon, Insertion, Matrix, SparseVec};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    P,
    Pminus,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::P => "P",
            Family::Pminus => "Pminus",
            Family::Custom => "custom",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P" | "p" => Ok(Family::P),
            "Pminus" | "pminus" | "P-" => Ok(Family::Pminus),
            _ => Err(Error::Invalid(format!("unknown family {s:?} (expected P or Pminus)"))),
        }
    }
}

/// Names one of the standard spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceDesc {
    pub family: Family,
    pub r: i64,
    pub k: usize,
    pub n: usize,
    pub trace_free: bool,
}

impl SpaceDesc {
    pub fn new(family: Family, r: i64, k: usize, n: usize, trace_free: bool) -> Self {
        SpaceDesc { family, r, k, n, trace_free }
    }

    pub fn build(&self) -> Result<FormSpace> {
        let v = match self.family {
            Family::P => build_p(self.r, self.k, self.n)?,
            Family::Pminus => build_pminus(self.r, self.k, self.n)?,
            Family::Custom => return Err(Error::Invalid("a custom space has no constructor".into())),
        };
        Ok(if self.trace_free { trace_free_subspace(&v) } else { v })
    }
}

impl fmt::Display for SpaceDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = if self.trace_free { "̊" } else { "" };
        let minus = if self.family == Family::Pminus { "⁻" } else { "" };
        write!(f, "P{ring}{minus}_{}Λ^{}(T^{})", self.r, self.k, self.n)
    }
}

/// A finite-dimensional space of forms on `T^n` with an ordered basis of
/// canonical forms.
#[derive(Debug, Clone)]
pub struct FormSpace {
    family: Family,
    r: i64,
    k: usize,
    n: usize,
    trace_free: bool,
    basis: Vec<PolyForm>,
    /// Built on first use; constructing a space from certified-independent
    /// forms does not need it.
    echelon: OnceLock<Echelon<TermKey>>,
}

impl FormSpace {
    pub fn zero(n: usize, k: usize) -> Self {
        FormSpace { family: Family::Custom, r: -1, k, n, trace_free: false, basis: Vec::new(), echelon: OnceLock::new() }
    }

    /// A space with exactly the given basis; fails if the forms are dependent.
    pub fn from_basis(n: usize, k: usize, forms: Vec<PolyForm>) -> Result<Self> {
        for f in &forms {
            check_shape(f, n, k)?;
        }
        let forms: Vec<PolyForm> = forms.into_par_iter().map(|f| f.canonicalize()).collect();
        if Self::certified(&forms) {
            return Ok(FormSpace { basis: forms, ..Self::zero(n, k) });
        }
        let mut s = Self::zero(n, k);
        for f in forms {
            let tag = s.basis.len();
            if let Insertion::Dependent(_) = s.echelon_mut().insert(f.coordinates(), tag) {
                return Err(Error::Invalid(format!("basis element {tag} is linearly dependent on the previous ones")));
            }
            s.basis.push(f);
        }
        Ok(s)
    }

    /// The span of `forms`, keeping a maximal independent subset in order.
    pub fn span(n: usize, k: usize, forms: impl IntoIterator<Item = PolyForm>) -> Result<Self> {
        let forms: Vec<PolyForm> = forms.into_iter().collect();
        for f in &forms {
            check_shape(f, n, k)?;
        }
        let forms: Vec<PolyForm> = forms.into_par_iter().map(|f| f.canonicalize()).collect();
        if Self::certified(&forms) {
            return Ok(FormSpace { basis: forms, ..Self::zero(n, k) });
        }
        let mut s = Self::zero(n, k);
        for f in forms {
            s.push_if_independent(f);
        }
        Ok(s)
    }

    fn certified(forms: &[PolyForm]) -> bool {
        let coords: Vec<SparseVec<TermKey>> = forms.iter().map(PolyForm::coordinates).collect();
        certify_independent(&coords.iter().collect::<Vec<_>>())
    }

    fn echelon(&self) -> &Echelon<TermKey> {
        self.echelon.get_or_init(|| {
            let mut e = Echelon::new();
            for (t, b) in self.basis.iter().enumerate() {
                let ins = e.insert(b.coordinates(), t);
                debug_assert_eq!(ins, Insertion::Independent);
            }
            e
        })
    }

    fn echelon_mut(&mut self) -> &mut Echelon<TermKey> {
        self.echelon();
        self.echelon.get_mut().expect("initialized")
    }

    fn push_if_independent(&mut self, f: PolyForm) -> bool {
        let f = f.canonicalize();
        let tag = self.basis.len();
        match self.echelon_mut().insert(f.coordinates(), tag) {
            Insertion::Independent => {
                self.basis.push(f);
                true
            }
            Insertion::Dependent(_) => false,
        }
    }

    pub fn with_tags(mut self, family: Family, r: i64, trace_free: bool) -> Self {
        self.family = family;
        self.r = r;
        self.trace_free = trace_free;
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trace_free(&self) -> bool {
        self.trace_free
    }

    pub fn desc(&self) -> SpaceDesc {
        SpaceDesc::new(self.family, self.r, self.k, self.n, self.trace_free)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PolyForm] {
        &self.basis
    }

    pub fn contains(&self, f: &PolyForm) -> bool {
        f.n() == self.n && f.k() == self.k && self.echelon().contains(&f.coordinates())
    }

    pub fn contains_space(&self, other: &FormSpace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn same_space(&self, other: &FormSpace) -> bool {
        self.dim() == other.dim() && self.contains_space(other)
    }

    /// Coordinates of `f` in the stored basis.
    pub fn coords(&self, f: &PolyForm) -> Result<Vec<Rational>> {
        check_shape(f, self.n, self.k)?;
        self.coords_of_vector(&f.coordinates()).ok_or_else(|| Error::NotInSpace(format!("{f}")))
    }

    /// Coordinates of a canonical coordinate vector in the stored basis.
    pub fn coords_of_vector(&self, v: &SparseVec<TermKey>) -> Option<Vec<Rational>> {
        let combo = self.echelon().express(v)?;
        let mut out = vec![Rational::zero(); self.dim()];
        for (t, c) in combo {
            out[t] = c;
        }
        Some(out)
    }

    /// The form with the given coordinates.
    pub fn combine(&self, coeffs: &[Rational]) -> PolyForm {
        let mut acc = PolyForm::zero(self.n, self.k);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            acc.add_scaled(c, b);
        }
        acc
    }

    /// Canonical coordinates of the basis elements as rows, with the column keys.
    pub fn coord_matrix(&self) -> (Matrix, Vec<TermKey>) {
        let mut keys: Vec<TermKey> = self.basis.iter().flat_map(|b| b.terms().map(|(k, _)| *k)).collect();
        keys.sort();
        keys.dedup();
        let mut m = Matrix::zeros(self.dim(), keys.len());
        for (i, b) in self.basis.iter().enumerate() {
            for (key, c) in b.terms() {
                let j = keys.binary_search(key).unwrap();
                m[(i, j)] = c.clone();
            }
        }
        (m, keys)
    }

    /// Subspace spanned by the combinations `Σ c_t b_t`.
    pub fn subspace_from_combinations(&self, combos: &[SparseVec<usize>]) -> FormSpace {
        let basis = IntegerForms::new(self.n, self.k, &self.basis);
        let forms: Vec<PolyForm> = combos
            .par_iter()
            .map(|combo| {
                let mut coeffs = vec![Rational::zero(); self.dim()];
                for (t, c) in combo {
                    coeffs[*t] = c.clone();
                }
                basis.combine(&coeffs)
            })
            .collect();
        FormSpace::span(self.n, self.k, forms).expect("shapes agree")
    }
}

impl Serialize for FormSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Rec<'a> {
            family: Family,
            r: i64,
            k: usize,
            n: usize,
            trace_free: bool,
            dim: usize,
            basis: &'a [PolyForm],
        }
        Rec {
            family: self.family,
            r: self.r,
            k: self.k,
            n: self.n,
            trace_free: self.trace_free,
            dim: self.dim(),
            basis: &self.basis,
        }
        .serialize(s)
    }
}

/// A linear map between two spaces, as a matrix acting on coordinate columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearMapRep {
    pub domain: String,
    pub codomain: String,
    pub matrix: Matrix,
}

fn check_shape(f: &PolyForm, n: usize, k: usize) -> Result<()> {
    if f.n() != n || f.k() != k {
        return Err(Error::Dimension(format!("expected a {k}-form on T^{n}, got a {}-form on T^{}", f.k(), f.n())));
    }
    Ok(())
}

fn check_range(k: usize, n: usize) -> Result<()> {
    if n + 1 > MAX_VERTICES {
        return Err(Error::Unsupported(format!("simplex dimension {n}")));
    }
    if k > n {
        return Err(Error::DegreeOutOfRange { k: k as i64, n });
    }
    Ok(())
}

/// `P_rΛ^k(T^n)`: all `λ^α dλ_σ` with `|α| = r`, reduced to a basis in
/// spanning order.
pub fn build_p(r: i64, k: usize, n: usize) -> Result<FormSpace> {
    check_range(k, n)?;
    let mut s = FormSpace::zero(n, k);
    if r >= 0 {
        let monos = MultiIndex::all_of_degree(n + 1, r as u32);
        for sigma in AltIndex::all_of_size(n + 1, k) {
            for alpha in &monos {
                s.push_if_independent(PolyForm::from_terms(n, k, [((sigma, *alpha), Rational::one())]));
            }
        }
    }
    Ok(s.with_tags(Family::P, r, false))
}

/// `P_r⁻Λ^k(T^n)`: restrictions of `i_X(λ^α dλ_τ)` with `|α| = r-1`, `|τ| = k+1`.
pub fn build_pminus(r: i64, k: usize, n: usize) -> Result<FormSpace> {
    check_range(k, n)?;
    let mut s = FormSpace::zero(n, k);
    if r >= 1 {
        let monos = MultiIndex::all_of_degree(n + 1, (r - 1) as u32);
        for tau in AltIndex::all_of_size(n + 1, k + 1) {
            for alpha in &monos {
                let f = PolyForm::from_terms(n, k + 1, [((tau, *alpha), Rational::one())]);
                s.push_if_independent(f.contract_x()?);
            }
        }
        if k == 0 {
            // Scalars: the trimmed space is the full one; keep its monomial basis.
            let p = build_p(r, 0, n)?;
            if !p.same_space(&s) {
                return Err(Error::Internal("P⁻_rΛ^0 differs from P_rΛ^0".into()));
            }
            s = p;
        }
    }
    Ok(s.with_tags(Family::Pminus, r, false))
}

/// Forms of `V` whose traces vanish on every facet of `T^n`.
pub fn trace_free_subspace(v: &FormSpace) -> FormSpace {
    let tagged = |s: FormSpace| s.with_tags(v.family, v.r, true);
    if v.n == 0 || v.k == v.n {
        return tagged(v.clone());
    }
    let combos = vanishing_trace_relations(v, v.n - 1);
    tagged(v.subspace_from_combinations(&combos))
}

/// Relations `Σ c_t b_t` among basis elements whose traces to every `d`-face vanish.
pub(crate) fn vanishing_trace_relations(v: &FormSpace, d: usize) -> Vec<SparseVec<usize>> {
    let faces = FaceId::all_of_dim(v.n, d);
    let mut e: Echelon<(usize, TermKey)> = Echelon::new();
    let mut out = Vec::new();
    for (t, b) in v.basis.iter().enumerate() {
        let mut stacked = SparseVec::new();
        for (fi, face) in faces.iter().enumerate() {
            let tr = b.trace(*face).expect("face of T^n");
            for (key, c) in tr.terms() {
                stacked.insert((fi, *key), c.clone());
            }
        }
        if let Insertion::Dependent(rel) = e.insert(stacked, t) {
            out.push(rel);
        }
    }
    out
}

/// Span of the traces of `V` onto `face`, as a space on the face simplex.
pub fn trace_space(v: &FormSpace, face: FaceId) -> Result<FormSpace> {
    let traces = v.basis.iter().map(|b| b.trace(face)).collect::<Result<Vec<_>>>()?;
    Ok(FormSpace::span(face.dim(), v.k, traces)?.with_tags(v.family, v.r, false))
}
