use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::circle::{CircleLift, CircleTerm};
use super::SurfaceError;
use crate::linalg::{self, Mat2, Vec2};
use crate::mcg_algebra::IntMatrix2;
use crate::torus_maps::{MapError, PlaneLift};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryBehavior {
    PreservesComponents,
    SwapsComponents,
}

impl BoundaryBehavior {
    pub fn flipped(self) -> Self {
        match self {
            BoundaryBehavior::PreservesComponents => BoundaryBehavior::SwapsComponents,
            BoundaryBehavior::SwapsComponents => BoundaryBehavior::PreservesComponents,
        }
    }
}

/// A term `c cos(2π(kx·x + ky·y)) + s sin(...)`; `kx` is an integer so the
/// map stays periodic in `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusTerm {
    pub kx: i64,
    pub ky: f64,
    pub cos: Vec2,
    pub sin: Vec2,
}

/// A lift `R x [0,1] -> R x [0,1]` of an annulus map:
///
/// ```text
/// F(x, y) = [[ε, s], [0, m]] (x, y) + t + Σ terms
/// ```
///
/// with `ε = ±1`, so `F(x + 1, y) = F(x, y) + (ε, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusMap {
    x_sign: i8,
    shear: f64,
    y_scale: f64,
    translation: Vec2,
    terms: Vec<AnnulusTerm>,
    boundary: BoundaryBehavior,
}

pub const SEAM_TOL: f64 = 1e-6;

impl AnnulusMap {
    pub fn new(
        x_sign: i8,
        shear: f64,
        y_scale: f64,
        translation: Vec2,
        terms: Vec<AnnulusTerm>,
        boundary: BoundaryBehavior,
    ) -> Result<Self, SurfaceError> {
        if x_sign != 1 && x_sign != -1 {
            return Err(SurfaceError::InvalidAnnulusMap("x sign must be +1 or -1"));
        }
        let finite = shear.is_finite()
            && y_scale.is_finite()
            && translation.iter().all(|v| v.is_finite())
            && terms
                .iter()
                .all(|t| t.ky.is_finite() && t.cos.iter().chain(t.sin.iter()).all(|v| v.is_finite()));
        if !finite {
            return Err(SurfaceError::InvalidAnnulusMap("non-finite coefficient"));
        }
        Ok(AnnulusMap {
            x_sign,
            shear,
            y_scale,
            translation,
            terms,
            boundary,
        })
    }

    pub fn identity() -> Self {
        AnnulusMap {
            x_sign: 1,
            shear: 0.0,
            y_scale: 1.0,
            translation: [0.0, 0.0],
            terms: Vec::new(),
            boundary: BoundaryBehavior::PreservesComponents,
        }
    }

    pub fn x_sign(&self) -> i8 {
        self.x_sign
    }

    pub fn shear(&self) -> f64 {
        self.shear
    }

    pub fn y_scale(&self) -> f64 {
        self.y_scale
    }

    pub fn translation(&self) -> Vec2 {
        self.translation
    }

    pub fn terms(&self) -> &[AnnulusTerm] {
        &self.terms
    }

    pub fn boundary(&self) -> BoundaryBehavior {
        self.boundary
    }

    pub fn evaluate(&self, p: Vec2) -> Vec2 {
        let mut out = [
            self.x_sign as f64 * p[0] + self.shear * p[1] + self.translation[0],
            self.y_scale * p[1] + self.translation[1],
        ];
        for t in &self.terms {
            let th = TAU * (t.kx as f64 * p[0] + t.ky * p[1]);
            let (s, c) = (libm::sin(th), libm::cos(th));
            out[0] += t.cos[0] * c + t.sin[0] * s;
            out[1] += t.cos[1] * c + t.sin[1] * s;
        }
        out
    }

    pub fn derivative(&self, p: Vec2) -> Mat2 {
        let mut j = [[self.x_sign as f64, self.shear], [0.0, self.y_scale]];
        for t in &self.terms {
            let th = TAU * (t.kx as f64 * p[0] + t.ky * p[1]);
            let (s, c) = (libm::sin(th), libm::cos(th));
            for row in 0..2 {
                let w = TAU * (-t.cos[row] * s + t.sin[row] * c);
                j[row][0] += w * t.kx as f64;
                j[row][1] += w * t.ky;
            }
        }
        j
    }

    /// `(x, y) ↦ (F1 + 1/2, 1 - F2)`: composition with the Möbius deck
    /// involution.
    pub fn deck_composed(&self) -> Self {
        AnnulusMap {
            x_sign: self.x_sign,
            shear: self.shear,
            y_scale: -self.y_scale,
            translation: [self.translation[0] + 0.5, 1.0 - self.translation[1]],
            terms: self
                .terms
                .iter()
                .map(|t| AnnulusTerm {
                    cos: [t.cos[0], -t.cos[1]],
                    sin: [t.sin[0], -t.sin[1]],
                    ..*t
                })
                .collect(),
            boundary: self.boundary.flipped(),
        }
    }

    /// `x ↦ F1(x, y)` as a circle lift.
    pub fn circle_at(&self, y: f64) -> Result<CircleLift, SurfaceError> {
        let mut translation = self.shear * y + self.translation[0];
        let mut terms = Vec::new();
        for t in &self.terms {
            // c cos(2π(kx + φ)) + s sin(2π(kx + φ)) with φ = ky·y
            let phi = TAU * t.ky * y;
            let (sp, cp) = (libm::sin(phi), libm::cos(phi));
            let (c, s) = (t.cos[0], t.sin[0]);
            let cos_k = c * cp + s * sp;
            let sin_k = -c * sp + s * cp;
            match t.kx.signum() {
                0 => translation += cos_k,
                1 => terms.push(CircleTerm { k: t.kx as u32, cos: cos_k, sin: sin_k }),
                _ => terms.push(CircleTerm { k: t.kx.unsigned_abs() as u32, cos: cos_k, sin: -sin_k }),
            }
        }
        CircleLift::new(self.x_sign, translation, terms)
    }

    /// Grid screening: the strip maps into itself, boundary circles go to
    /// the boundary circles the flag names, and the Jacobian keeps one sign.
    pub fn validate(&self, grid_n: usize) -> Result<(), SurfaceError> {
        let (bottom, top) = match self.boundary {
            BoundaryBehavior::PreservesComponents => (0.0, 1.0),
            BoundaryBehavior::SwapsComponents => (1.0, 0.0),
        };
        let mut sign = 0.0f64;
        for i in 0..grid_n {
            let x = i as f64 / grid_n as f64;
            if libm::fabs(self.evaluate([x, 0.0])[1] - bottom) > SEAM_TOL
                || libm::fabs(self.evaluate([x, 1.0])[1] - top) > SEAM_TOL
            {
                return Err(SurfaceError::InvalidAnnulusMap("boundary circles are not mapped as flagged"));
            }
            for j in 0..=grid_n {
                let p = [x, j as f64 / grid_n as f64];
                let y = self.evaluate(p)[1];
                if !(-SEAM_TOL..=1.0 + SEAM_TOL).contains(&y) {
                    return Err(SurfaceError::InvalidAnnulusMap("image leaves the strip"));
                }
                let d = linalg::det(&self.derivative(p));
                if !(libm::fabs(d) > 1e-6) || (sign != 0.0 && d.signum() != sign) {
                    return Err(SurfaceError::InvalidAnnulusMap("Jacobian degenerates or changes sign"));
                }
                sign = d.signum();
            }
        }
        Ok(())
    }
}

/// The double of an annulus map on `T^2 = R^2 / Z^2`. Torus height
/// `y ∈ [0, 1/2]` is the first copy with annulus height `2y`; `y ∈ [1/2, 1]`
/// is the mirrored second copy with annulus height `2 - 2y`. Each copy is
/// mapped to itself.
#[derive(Clone, Debug)]
pub struct DoubledAnnulus {
    map: AnnulusMap,
    class: IntMatrix2,
    seam_mismatch: f64,
}

const CONTINUATION_STEPS: usize = 1024;

impl DoubledAnnulus {
    pub fn annulus_map(&self) -> &AnnulusMap {
        &self.map
    }

    pub fn class(&self) -> IntMatrix2 {
        self.class
    }

    /// Largest jump found across the two seams.
    pub fn seam_mismatch(&self) -> f64 {
        self.seam_mismatch
    }

    fn swap_shift(map: &AnnulusMap) -> f64 {
        match map.boundary {
            BoundaryBehavior::PreservesComponents => 0.0,
            BoundaryBehavior::SwapsComponents => -1.0,
        }
    }

    fn first_copy(map: &AnnulusMap, x: f64, y0: f64) -> Vec2 {
        let img = map.evaluate([x, 2.0 * y0]);
        [img[0], img[1] / 2.0]
    }

    fn second_copy(map: &AnnulusMap, x: f64, y0: f64) -> Vec2 {
        let img = map.evaluate([x, 2.0 - 2.0 * y0]);
        [img[0], 1.0 - img[1] / 2.0 + Self::swap_shift(map)]
    }

    /// The lift on the fundamental strip `0 <= y0 < 1`.
    fn base(map: &AnnulusMap, x: f64, y0: f64) -> Vec2 {
        if y0 <= 0.5 {
            Self::first_copy(map, x, y0)
        } else {
            Self::second_copy(map, x, y0)
        }
    }

    fn base_derivative(map: &AnnulusMap, x: f64, y0: f64) -> Mat2 {
        if y0 <= 0.5 {
            let j = map.derivative([x, 2.0 * y0]);
            [[j[0][0], 2.0 * j[0][1]], [j[1][0] / 2.0, j[1][1]]]
        } else {
            let j = map.derivative([x, 2.0 - 2.0 * y0]);
            [[j[0][0], -2.0 * j[0][1]], [-j[1][0] / 2.0, j[1][1]]]
        }
    }
}

fn round_if_integer(v: f64, what: Vec2) -> Result<i64, SurfaceError> {
    let r = libm::rint(v);
    if libm::fabs(v - r) > 1e-6 {
        Err(SurfaceError::ClassNotInteger { value: what })
    } else {
        Ok(r as i64)
    }
}

/// Builds the double, reading its class off by continuation along the two
/// generating loops.
pub fn double_annulus(map: &AnnulusMap) -> Result<DoubledAnnulus, SurfaceError> {
    let samples = [0.0, 0.17, 0.5, 0.83];
    // seams: y0 = 1/2 between the copies, y0 = 0 against the second copy's
    // far end
    let mut mismatch = 0.0f64;
    for &x in &samples {
        let a = DoubledAnnulus::first_copy(map, x, 0.5);
        let b = DoubledAnnulus::second_copy(map, x, 0.5);
        mismatch = mismatch.max(linalg::norm(linalg::sub(a, b)));
    }

    // vertical loop (0,0) -> (0,1)
    let mut prev = DoubledAnnulus::base(map, 0.0, 0.0);
    let mut total = [0.0, 0.0];
    for i in 1..=CONTINUATION_STEPS {
        let y0 = i as f64 / CONTINUATION_STEPS as f64;
        let cur = if i == CONTINUATION_STEPS {
            DoubledAnnulus::second_copy(map, 0.0, 1.0)
        } else {
            DoubledAnnulus::base(map, 0.0, y0)
        };
        let d = linalg::sub(cur, prev);
        total = linalg::add(total, [linalg::wrap_centered(d[0]), linalg::wrap_centered(d[1])]);
        prev = cur;
    }
    let n = round_if_integer(total[0], total)?;
    let delta = round_if_integer(total[1], total)?;
    // closing the loop: the far end of the second copy against the start
    // shifted by the class column
    for &x in &samples {
        let end = DoubledAnnulus::second_copy(map, x, 1.0);
        let start = linalg::add(DoubledAnnulus::base(map, x, 0.0), [n as f64, delta as f64]);
        mismatch = mismatch.max(linalg::norm(linalg::sub(end, start)));
    }
    if mismatch > SEAM_TOL {
        return Err(SurfaceError::SeamDiscontinuity { mismatch });
    }

    // horizontal loop is exact: F(x + 1, y) = F(x, y) + (ε, 0)
    let class = IntMatrix2::new(map.x_sign as i64, n, 0, delta)
        .map_err(|_| SurfaceError::ClassNotInteger { value: total })?;
    let expected_delta = match map.boundary {
        BoundaryBehavior::PreservesComponents => 1,
        BoundaryBehavior::SwapsComponents => -1,
    };
    if delta != expected_delta {
        return Err(SurfaceError::ClassNotInteger { value: total });
    }
    Ok(DoubledAnnulus {
        map: map.clone(),
        class,
        seam_mismatch: mismatch,
    })
}

impl PlaneLift for DoubledAnnulus {
    fn class(&self) -> IntMatrix2 {
        self.class
    }

    fn displacement_bound(&self) -> f64 {
        let x_part = self.map.terms.iter().fold(
            libm::fabs(self.map.shear) + libm::fabs(self.map.translation[0]),
            |acc, t| acc + libm::fabs(t.cos[0]) + libm::fabs(t.sin[0]),
        );
        // heights: image in [-1/2, 1], source in [0, 1)
        libm::hypot(x_part + libm::fabs(self.class.b() as f64), 2.0)
    }

    fn evaluate(&self, p: Vec2) -> Result<Vec2, MapError> {
        let j = libm::floor(p[1]);
        let y0 = p[1] - j;
        let base = DoubledAnnulus::base(&self.map, p[0], y0);
        Ok([
            base[0] + j * self.class.b() as f64,
            base[1] + j * self.class.d() as f64,
        ])
    }

    fn derivative(&self, p: Vec2) -> Result<Mat2, MapError> {
        let y0 = p[1] - libm::floor(p[1]);
        Ok(DoubledAnnulus::base_derivative(&self.map, p[0], y0))
    }
}
