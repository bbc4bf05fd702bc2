use super::SurfaceError;
use crate::linalg;
use crate::mcg_algebra::{lefschetz_number, IntMatrix2};
use crate::rng::Stream;
use crate::torus_maps::TorusMap;

pub const EQUIVARIANCE_SAMPLES: usize = 256;

/// The deck involution `σ(x, y) = (x + 1/2, -y)` of the orientation double
/// cover of the Klein bottle by the torus.
pub fn klein_deck() -> TorusMap {
    TorusMap::affine(IntMatrix2::diagonal_signs(true, false), [0.5, 0.0])
}

/// Largest torus distance between `f(σ(p))` and `σ(f(p))` over seeded samples.
pub fn deck_commutation_residual(map: &TorusMap, deck: &TorusMap, seed: u64) -> Result<f64, SurfaceError> {
    let mut rng = Stream::new(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..EQUIVARIANCE_SAMPLES {
        let p = rng.point();
        let a = map.evaluate(deck.evaluate(p)?)?;
        let b = deck.evaluate(map.evaluate(p)?)?;
        worst = worst.max(linalg::torus_distance(a, b));
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct KleinLifts {
    /// The given lift `ψ̃`.
    pub plus: TorusMap,
    /// `σ ∘ ψ̃`.
    pub minus: TorusMap,
    pub lefschetz: [i64; 2],
    pub equivariance_residual: f64,
}

impl KleinLifts {
    pub fn contains_zero(&self) -> bool {
        self.lefschetz.contains(&0)
    }
}

/// The two torus lifts of the Klein-bottle map covered by `map` and their
/// Lefschetz numbers. With `declared = Some(L)` the pair must be `{2L, 0}`.
pub fn klein_lifts(map: &TorusMap, check_tol: f64, declared: Option<i64>) -> Result<KleinLifts, SurfaceError> {
    let deck = klein_deck();
    let residual = deck_commutation_residual(map, &deck, 0)?;
    if !(residual <= check_tol) {
        return Err(SurfaceError::NotEquivariant { residual });
    }
    let minus = deck.compose(map);
    let lefschetz = [lefschetz_number(&map.class()), lefschetz_number(&minus.class())];
    if let Some(l) = declared {
        let mut got = lefschetz;
        got.sort();
        let mut want = [2 * l, 0];
        want.sort();
        if got != want {
            return Err(SurfaceError::LefschetzMismatch {
                pair: lefschetz,
                expected: 2 * l,
            });
        }
    }
    Ok(KleinLifts {
        plus: map.clone(),
        minus,
        lefschetz,
        equivariance_residual: residual,
    })
}
