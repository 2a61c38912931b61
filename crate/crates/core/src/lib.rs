//! Exact construction and obstruction of sign-invariant bases for polynomial
//! differential form spaces on the standard simplex.

pub mod bases;
pub mod duality;
pub mod error;
pub mod forms;
pub mod geodecomp;
pub mod linalg;
mod modular;
pub mod rational;
pub mod spaces;
pub mod stiffness;
pub mod symmetry;

pub use error::{Error, Result};
pub use forms::{AltIndex, FaceId, MultiIndex, Permutation, PolyForm, Representation, TermKey};
pub use linalg::Matrix;
pub use rational::Rational;
pub use spaces::{build_p, build_pminus, trace_free_subspace, Family, FormSpace, LinearMapRep, SpaceDesc};
pub use bases::{construct_for, construct_invariant_basis, geometric_decomposability, ExistenceVerdict, Resolver, Route};
pub use duality::{duality_map, verify_sign_equivariance, DualityMap};
pub use geodecomp::{decomposition_map, DecompositionMap};
pub use symmetry::{GroupSpec, Z3Decomposition};
