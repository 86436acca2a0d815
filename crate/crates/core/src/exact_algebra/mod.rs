//! Exact linear algebra over the integers and over the local rings `Z/p^a`.
//!
//! The integer layer (arbitrary precision) handles Smith normal forms, presented
//! chain complexes and maps between finitely generated abelian groups. The local
//! layer works with bounded residues and carries the heavy cochain computations.

mod abelian;
mod chain;
mod int_matrix;
pub mod local;
mod snf;

use thiserror::Error;

pub use abelian::{cokernel_structure, hom_and_ext, tensor_and_tor, FgAbelianGroup, Subquotient, SubquotientMap};
pub(crate) use abelian::big_to_u64;
pub use chain::{homology_at, induced_map_on_homology, ChainComplexSpec, HomologyGroup, Presentation};
pub use int_matrix::IntMatrix;
pub use snf::{integer_kernel, smith_normal_form, solve_integer, SmithForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("invalid invariant factors: {0}")]
    InvalidInvariantFactors(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not well defined: {0}")]
    NotWellDefined(String),
    #[error("d∘d ≠ 0 at degree {degree}")]
    MalformedComplex { degree: i64 },
    #[error("chain map square fails to commute at degree {degree}")]
    NonCommutingSquare { degree: i64 },
    #[error("degree {0} outside the complex")]
    DegreeOutOfRange(i64),
    #[error("operation requires finite groups: {0}")]
    InfiniteGroup(String),
}
