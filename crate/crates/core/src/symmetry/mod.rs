//! Group actions on form spaces, characters, and the tests for sign-invariant bases.

mod action;
mod character;
mod cone;
mod group;

pub use action::{
    action_matrix, character, check_transcript_entry, verify_invariant_up_to_sign, z3_decompose, z3_obstruction,
    FailureWitness, SignedPermutationImage, Z3Decomposition, Z3Verdict,
};
pub use character::{
    atom_multiplicities, induced_character, irreducible_atoms, partitions, sign_characters, Character,
};
pub use cone::{monomial_cone_test, monomial_generators, ConeTerm, ConeVerdict, InducedGenerator};
pub use group::{GroupKind, GroupSpec, MAX_ENUMERATED_ORDER};
