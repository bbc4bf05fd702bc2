//! Exact arithmetic on mapping classes of the torus, i.e. on GL(2,Z).
//!
//! No floating point is used here: Lefschetz numbers, spectra, closures and
//! the nilpotent classification are all computed in integers or rationals.

mod classify;
mod closure;
mod matrix;
mod rational;
mod word;

pub use classify::{
    classify_nilpotent_subgroup, conjugate_to_h, select_special_element, signed_power_of,
    DihedralEntry, InconclusiveReason, McgClassification, Obstruction, SignedPower,
    SpecialElement,
};
pub use closure::{closure, Closure, ClosureCaps, GroupElement};
pub use matrix::{
    classify_element, has_one_in_spectrum, in_dihedral_h, lefschetz_number, ElementType,
    IntMatrix2, DIHEDRAL_H,
};
pub use rational::{RatMatrix2, Rational};
pub use word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum McgError {
    #[error("determinant {det} is not +1 or -1")]
    NotUnimodular { det: i128 },
    #[error("rational matrix is singular")]
    SingularRational,
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("not a dihedral group of order 8: {0}")]
    NotDihedral(&'static str),
    #[error("no element with det 1 and without eigenvalue 1")]
    NoSpecialElement,
    #[error("group is not classified as nilpotent")]
    NotClassified,
    #[error("integer overflow")]
    Overflow,
}
