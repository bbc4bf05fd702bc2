//! Circle, annulus, Klein-bottle and Möbius-strip variants, reduced to
//! circle maps or torus maps.

mod annulus;
mod circle;
mod klein;
mod mobius;

pub use annulus::{double_annulus, AnnulusMap, AnnulusTerm, BoundaryBehavior, DoubledAnnulus, SEAM_TOL};
pub use circle::{
    circle_rotation_number, product_map, reversing_fixed_points, CircleLift, CircleMap, CircleTerm, Iterate,
    ROOT_GRID,
};
pub use klein::{deck_commutation_residual, klein_deck, klein_lifts, KleinLifts};
pub use mobius::{mobius_commutation_residual, mobius_deck, mobius_reduce, BoundaryOrbits, MobiusAnalysis};

use crate::linalg::Vec2;
use crate::torus_maps::MapError;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SurfaceError {
    #[error("invalid circle lift: {0}")]
    InvalidCircleLift(&'static str),
    #[error("expected degree {expected}, found {found}")]
    WrongDegree { expected: i8, found: i8 },
    #[error("lift is not monotone near {point}")]
    NotMonotone { point: f64 },
    #[error("expected exactly 2 fixed points, found {found}")]
    WrongCount { found: usize },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("invalid annulus map: {0}")]
    InvalidAnnulusMap(&'static str),
    #[error("seam mismatch {mismatch:e} exceeds tolerance")]
    SeamDiscontinuity { mismatch: f64 },
    #[error("displacement {value:?} along a generating loop is not an integer vector")]
    ClassNotInteger { value: Vec2 },
    #[error("map does not commute with the deck involution (residual {residual:e})")]
    NotEquivariant { residual: f64 },
    #[error("Lefschetz pair {pair:?} is not {{{expected}, 0}}")]
    LefschetzMismatch { pair: [i64; 2], expected: i64 },
    #[error(transparent)]
    Map(#[from] MapError),
}
