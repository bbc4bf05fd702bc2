use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::annulus::{double_annulus, AnnulusMap, BoundaryBehavior};
use super::circle::{circle_rotation_number, reversing_fixed_points, CircleMap};
use super::SurfaceError;
use crate::fixed_points::{find_finite_orbit, FiniteOrbitParams, OrbitReport, PipelineFailure};
use crate::linalg::{self, Vec2};
use crate::mcg_algebra::{lefschetz_number, IntMatrix2};
use crate::rng::Stream;
use crate::torus_maps::{GroupSpec, TorusMap};

const SAMPLES: usize = 256;

/// `τ(x, y) = (x + 1/2, 1 - y)`.
pub fn mobius_deck(p: Vec2) -> Vec2 {
    [p[0] + 0.5, 1.0 - p[1]]
}

/// Largest distance between `F(τ(p))` and `τ(F(p))`, circle-wise in `x`.
pub fn mobius_commutation_residual(map: &AnnulusMap, seed: u64) -> f64 {
    let mut rng = Stream::new(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..SAMPLES {
        let p = rng.point();
        let a = map.evaluate(mobius_deck(p));
        let b = mobius_deck(map.evaluate(p));
        let dx = linalg::wrap_centered(a[0] - b[0]);
        worst = worst.max(libm::hypot(dx, a[1] - b[1]));
    }
    worst
}

#[derive(Clone, Debug)]
pub enum BoundaryOrbits {
    /// The boundary circle map reverses orientation: two fixed points.
    ReversingFixedPoints([f64; 2]),
    /// Orientation-preserving boundary map with the estimated rotation number.
    RotationNumber(f64),
}

#[derive(Clone, Debug)]
pub struct MobiusAnalysis {
    pub equivariance_residual: f64,
    pub swapping_lift: AnnulusMap,
    pub preserving_lift: AnnulusMap,
    pub doubled_class: IntMatrix2,
    pub lefschetz: i64,
    pub seam_mismatch: f64,
    /// Orbit of the doubled swapping lift, in torus coordinates.
    pub interior: Result<OrbitReport, PipelineFailure>,
    /// Interior orbit points as `(x, annulus height)`, first copy only.
    pub interior_points: Vec<Vec2>,
    pub boundary: BoundaryOrbits,
    pub notes: Vec<String>,
}

/// Analyzes a Möbius-strip map through its two annulus lifts `F` and `τ∘F`:
/// the component-swapping lift is doubled and fed to the finite-orbit
/// pipeline; the boundary circle map is analyzed as a circle map.
pub fn mobius_reduce(
    map: &AnnulusMap,
    check_tol: f64,
    params: &FiniteOrbitParams,
) -> Result<MobiusAnalysis, SurfaceError> {
    let residual = mobius_commutation_residual(map, 0);
    if !(residual <= check_tol) {
        return Err(SurfaceError::NotEquivariant { residual });
    }
    let other = map.deck_composed();
    let (swapping, preserving) = match map.boundary() {
        BoundaryBehavior::SwapsComponents => (map.clone(), other),
        BoundaryBehavior::PreservesComponents => (other, map.clone()),
    };
    let mut notes = vec![String::from("doubles are glued C0 only; differentiability at the seams is not certified")];

    let doubled = double_annulus(&swapping)?;
    let class = doubled.class();
    let lefschetz = lefschetz_number(&class);
    let seam_mismatch = doubled.seam_mismatch();
    let torus = TorusMap::custom(Arc::new(doubled));
    let group = GroupSpec::new(vec![(String::from("swap"), torus)]).expect("one labelled generator");
    let interior = find_finite_orbit(&group, params);
    let interior_points = match &interior {
        Ok(r) => r
            .points
            .iter()
            .filter(|p| p[1] <= 0.5)
            .map(|p| [p[0], 2.0 * p[1]])
            .collect(),
        Err(f) => {
            notes.push(format!("interior search stopped at stage {}", f.stage));
            Vec::new()
        }
    };

    let circle = preserving.circle_at(0.0)?;
    let boundary = if circle.degree() == -1 {
        BoundaryOrbits::ReversingFixedPoints(reversing_fixed_points(&circle, 1e-12)?)
    } else {
        BoundaryOrbits::RotationNumber(circle_rotation_number(&circle, 0.0, 100_000)?)
    };

    Ok(MobiusAnalysis {
        equivariance_residual: residual,
        swapping_lift: swapping,
        preserving_lift: preserving,
        doubled_class: class,
        lefschetz,
        seam_mismatch,
        interior,
        interior_points,
        boundary,
        notes,
    })
}
