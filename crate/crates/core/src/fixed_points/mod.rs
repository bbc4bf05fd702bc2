//! Fixed points of lifts whose class avoids the eigenvalue 1, their indices,
//! and the finite-orbit pipeline.

mod pipeline;

pub use pipeline::{
    find_finite_orbit, FiniteOrbitParams, GeneratorNormalization, NormalizationOutcome,
    OrbitReport, PipelineFailure, Stage,
};

use alloc::vec::Vec;

use crate::linalg::{self, Vec2};
use crate::mcg_algebra::{has_one_in_spectrum, lefschetz_number, IntMatrix2};
use crate::torus_maps::{MapError, TorusMap};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FixedPointError {
    #[error("class {0} has 1 as an eigenvalue")]
    OneInSpectrum(IntMatrix2),
    #[error("{count} fixed point(s) are degenerate")]
    Degenerate { count: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

pub const DEFAULT_MARGIN: f64 = 0.5;
pub const DEGENERATE_DET: f64 = 1e-8;
const MAX_NEWTON_ITER: usize = 64;

/// Ball containing every fixed point of a lift: from
/// `‖f(x) - x‖ >= C‖x‖ - K`, all fixed points satisfy `‖x‖ <= K/C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixRegion {
    /// `C = σ_min(A - Id)`.
    pub min_singular: f64,
    /// `K >= sup ‖f(x) - A x‖`.
    pub displacement_bound: f64,
    pub margin: f64,
    pub radius: f64,
    /// `‖A - Id‖`.
    pub max_singular: f64,
}

impl FixRegion {
    /// Radius for the lift `T_v ∘ f`, whose displacement bound is `K + ‖v‖`.
    pub fn radius_for(&self, v: [i64; 2]) -> f64 {
        (self.displacement_bound + norm_int(v) + self.margin) / self.min_singular
    }

    /// Every torus fixed point is fixed by some `T_v ∘ f` with `‖v‖` at most
    /// this: take the representative `x ∈ [0,1)^2`, then
    /// `v = x - f(x) = -(A - Id)x - (f(x) - Ax)`.
    pub fn lift_bound(&self) -> f64 {
        self.max_singular * core::f64::consts::SQRT_2 + self.displacement_bound + 1.0
    }
}

pub fn fix_region(map: &TorusMap) -> Result<FixRegion, FixedPointError> {
    fix_region_with_margin(map, DEFAULT_MARGIN)
}

pub fn fix_region_with_margin(map: &TorusMap, margin: f64) -> Result<FixRegion, FixedPointError> {
    let a = map.class();
    if has_one_in_spectrum(&a) {
        return Err(FixedPointError::OneInSpectrum(a));
    }
    let (smax, smin) = linalg::singular_values(&linalg::mat_sub(&a.to_f64(), &linalg::IDENTITY));
    let k = map.displacement_bound();
    Ok(FixRegion {
        min_singular: smin,
        displacement_bound: k,
        margin,
        radius: (k + margin) / smin,
        max_singular: smax,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FixedPointIndex {
    Minus,
    Degenerate,
    Plus,
}

impl FixedPointIndex {
    pub fn from_det(det: f64) -> Self {
        if !(libm::fabs(det) > DEGENERATE_DET) {
            FixedPointIndex::Degenerate
        } else if det > 0.0 {
            FixedPointIndex::Plus
        } else {
            FixedPointIndex::Minus
        }
    }

    pub fn value(&self) -> Option<i64> {
        match self {
            FixedPointIndex::Plus => Some(1),
            FixedPointIndex::Minus => Some(-1),
            FixedPointIndex::Degenerate => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointRecord {
    /// The point in `[0,1)^2`.
    pub torus_point: Vec2,
    /// A preimage of `torus_point` fixed by `T_v ∘ f`.
    pub location: Vec2,
    /// `v`, chosen of least norm (then lexicographically least).
    pub lift_vector: [i64; 2],
    pub residual: f64,
    /// `det(Df(x) - Id)`.
    pub det: f64,
    pub index: FixedPointIndex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointSearch {
    pub records: Vec<FixedPointRecord>,
    pub seeds: usize,
    pub newton_failures: usize,
    /// Records whose lift vector exceeds [`FixRegion::lift_bound`]; always 0
    /// unless the displacement bound is wrong.
    pub bound_violations: usize,
}

fn norm_int(v: [i64; 2]) -> f64 {
    libm::hypot(v[0] as f64, v[1] as f64)
}

fn round_vec(x: Vec2) -> [i64; 2] {
    [libm::rint(x[0]) as i64, libm::rint(x[1]) as i64]
}

fn to_f64(v: [i64; 2]) -> Vec2 {
    [v[0] as f64, v[1] as f64]
}

/// `f(x) - x` reduced to `[-1/2, 1/2]^2`.
fn torus_residual(map: &TorusMap, x: Vec2) -> Result<Vec2, MapError> {
    let d = linalg::sub(map.evaluate(x)?, x);
    Ok([linalg::wrap_centered(d[0]), linalg::wrap_centered(d[1])])
}

/// Newton's method for `f(x) = x` on the torus. Keeps iterating past `tol`
/// while the residual still decreases, so converged points are accurate to
/// rounding.
fn torus_newton(map: &TorusMap, seed: Vec2, tol: f64) -> Result<Option<Vec2>, MapError> {
    let mut x = seed;
    let mut r = torus_residual(map, x)?;
    let mut rn = linalg::norm(r);
    for _ in 0..MAX_NEWTON_ITER {
        if rn == 0.0 {
            break;
        }
        let j = linalg::mat_sub(&map.derivative(x)?, &linalg::IDENTITY);
        let Some(step) = linalg::solve(&j, r, 1e-300) else {
            break;
        };
        let mut lambda = 1.0;
        let mut improved = false;
        while lambda >= 1.0 / 64.0 {
            let cand = linalg::reduce_torus(linalg::sub(x, linalg::scale(lambda, step)));
            let rc = torus_residual(map, cand)?;
            let rcn = linalg::norm(rc);
            if rcn < rn {
                x = cand;
                r = rc;
                rn = rcn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(if rn <= tol { Some(linalg::reduce_torus(x)) } else { None })
}

/// The preimage `p + w` and lift vector `v = -u - (A - Id)w` of least norm,
/// where `f(p) = p + u`.
fn least_lift(a: &IntMatrix2, p: Vec2, u: [i64; 2]) -> ([i64; 2], Vec2) {
    let am = [[a.a() - 1, a.b()], [a.c(), a.d() - 1]];
    let det = (am[0][0] * am[1][1] - am[0][1] * am[1][0]) as f64;
    // real solution of (A - Id) w = -u
    let w0 = [
        (-(am[1][1] as f64) * u[0] as f64 + am[0][1] as f64 * u[1] as f64) / det,
        (am[1][0] as f64 * u[0] as f64 - am[0][0] as f64 * u[1] as f64) / det,
    ];
    let c = round_vec(w0);
    let mut best: Option<(i128, [i64; 2], [i64; 2])> = None;
    for dw0 in -2..=2 {
        for dw1 in -2..=2 {
            let w = [c[0] + dw0, c[1] + dw1];
            let v = [
                -u[0] - (am[0][0] * w[0] + am[0][1] * w[1]),
                -u[1] - (am[1][0] * w[0] + am[1][1] * w[1]),
            ];
            let n2 = (v[0] as i128).pow(2) + (v[1] as i128).pow(2);
            let key = (n2, v, w);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
    }
    let (_, v, w) = best.expect("search box is non-empty");
    (v, linalg::add(p, to_f64(w)))
}

/// All torus fixed points found by Newton from the `grid_n x grid_n` grid
/// over `[0,1)^2`, de-duplicated within `10·tol`, sorted by torus point.
pub fn find_torus_fixed_points(
    map: &TorusMap,
    region: &FixRegion,
    grid_n: usize,
    tol: f64,
) -> Result<FixedPointSearch, FixedPointError> {
    let a = map.class();
    if has_one_in_spectrum(&a) {
        return Err(FixedPointError::OneInSpectrum(a));
    }
    let mut found: Vec<Vec2> = Vec::new();
    let mut failures = 0;
    let h = 1.0 / grid_n.max(1) as f64;
    for i in 0..grid_n {
        for j in 0..grid_n {
            match torus_newton(map, [i as f64 * h, j as f64 * h], tol)? {
                Some(p) => {
                    if !found.iter().any(|q| linalg::torus_distance(*q, p) <= 10.0 * tol) {
                        found.push(p);
                    }
                }
                None => failures += 1,
            }
        }
    }
    found.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));

    let mut records = Vec::with_capacity(found.len());
    let mut bound_violations = 0;
    for p in found {
        let fp = map.evaluate(p)?;
        let u = round_vec(linalg::sub(fp, p));
        let residual = linalg::norm(linalg::sub(linalg::sub(fp, p), to_f64(u)));
        let (v, location) = least_lift(&a, p, u);
        if norm_int(v) > region.lift_bound() {
            bound_violations += 1;
        }
        let det = linalg::det(&linalg::mat_sub(&map.derivative(p)?, &linalg::IDENTITY));
        records.push(FixedPointRecord {
            torus_point: p,
            location,
            lift_vector: v,
            residual,
            det,
            index: FixedPointIndex::from_det(det),
        });
    }
    Ok(FixedPointSearch {
        records,
        seeds: grid_n * grid_n,
        newton_failures: failures,
        bound_violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSum {
    Pass(i64),
    Mismatch { sum: i64, expected: i64 },
}

/// Compares the sum of indices with `det(Id - A)`.
pub fn index_sum_check(records: &[FixedPointRecord], class: &IntMatrix2) -> Result<IndexSum, FixedPointError> {
    let degenerate = records
        .iter()
        .filter(|r| r.index == FixedPointIndex::Degenerate)
        .count();
    if degenerate > 0 {
        return Err(FixedPointError::Degenerate { count: degenerate });
    }
    let sum: i64 = records.iter().filter_map(|r| r.index.value()).sum();
    let expected = lefschetz_number(class);
    Ok(if sum == expected {
        IndexSum::Pass(sum)
    } else {
        IndexSum::Mismatch { sum, expected }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_maps::{FourierMap, FourierTerm};
    use alloc::vec;
    use core::f64::consts::PI;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d).unwrap()
    }

    #[test]
    fn region_examples() {
        let r = fix_region(&TorusMap::affine(IntMatrix2::MINUS_IDENTITY, [0.0, 0.0])).unwrap();
        assert_eq!((r.min_singular, r.displacement_bound, r.radius), (2.0, 0.0, 0.25));

        let r = fix_region(&TorusMap::affine(m(1, 1, 1, 2), [0.3, 0.0])).unwrap();
        assert!((r.min_singular - (libm::sqrt(5.0) - 1.0) / 2.0).abs() < 1e-15);
        assert!((r.displacement_bound - 0.3).abs() < 1e-15);
        assert!(r.radius >= r.displacement_bound / r.min_singular);

        assert_eq!(
            fix_region(&TorusMap::affine(m(1, 1, 0, 1), [0.0, 0.0])),
            Err(FixedPointError::OneInSpectrum(m(1, 1, 0, 1)))
        );
    }

    #[test]
    fn minus_identity_has_four_fixed_points() {
        let f = TorusMap::affine(IntMatrix2::MINUS_IDENTITY, [0.0, 0.0]);
        let region = fix_region(&f).unwrap();
        let s = find_torus_fixed_points(&f, &region, 8, 1e-12).unwrap();
        let pts: Vec<Vec2> = s.records.iter().map(|r| r.torus_point).collect();
        assert_eq!(pts, vec![[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5]]);
        assert!(s.records.iter().all(|r| r.index == FixedPointIndex::Plus));
        assert_eq!(index_sum_check(&s.records, &f.class()).unwrap(), IndexSum::Pass(4));
        for r in &s.records {
            let img = linalg::add(f.evaluate(r.location).unwrap(), to_f64(r.lift_vector));
            assert!(linalg::norm(linalg::sub(img, r.location)) < 1e-12);
            assert!(linalg::norm(r.location) <= region.radius_for(r.lift_vector));
        }
    }

    #[test]
    fn hyperbolic_affine_has_one_fixed_point() {
        let a = m(2, 1, 1, 1);
        let f = TorusMap::affine(a, [0.0, 0.0]);
        let s = find_torus_fixed_points(&f, &fix_region(&f).unwrap(), 8, 1e-12).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].torus_point, [0.0, 0.0]);
        assert_eq!(s.records[0].index, FixedPointIndex::Minus);
        assert_eq!(index_sum_check(&s.records, &a).unwrap(), IndexSum::Pass(-1));

        let b = m(1, 1, 1, 2);
        let g = TorusMap::affine(b, [0.3, 0.0]);
        let s = find_torus_fixed_points(&g, &fix_region(&g).unwrap(), 8, 1e-12).unwrap();
        assert_eq!(index_sum_check(&s.records, &b).unwrap(), IndexSum::Pass(-1));
    }

    #[test]
    fn larger_lefschetz_number() {
        // L = det(Id - A) = 1 - 5 + 1 = -3
        let a = m(3, 1, 5, 2);
        let f: TorusMap = FourierMap::new(
            a,
            [0.1, 0.2],
            vec![FourierTerm { k: [1, 1], cos: [0.01, 0.0], sin: [0.0, 0.02] }],
        )
        .unwrap()
        .into();
        let region = fix_region(&f).unwrap();
        let s = find_torus_fixed_points(&f, &region, 16, 1e-12).unwrap();
        assert_eq!(s.records.len(), 3);
        assert_eq!(s.bound_violations, 0);
        assert_eq!(index_sum_check(&s.records, &a).unwrap(), IndexSum::Pass(-3));
    }

    #[test]
    fn degenerate_fixture_is_reported() {
        let f: TorusMap = FourierMap::new(
            IntMatrix2::MINUS_IDENTITY,
            [0.0, 0.0],
            vec![FourierTerm { k: [1, 0], cos: [0.0, 0.0], sin: [1.0 / PI, 0.0] }],
        )
        .unwrap()
        .into();
        let s = find_torus_fixed_points(&f, &fix_region(&f).unwrap(), 16, 1e-12).unwrap();
        assert!(matches!(
            index_sum_check(&s.records, &f.class()),
            Err(FixedPointError::Degenerate { .. })
        ));
    }

    #[test]
    fn mismatch_is_reported() {
        let f = TorusMap::affine(IntMatrix2::MINUS_IDENTITY, [0.0, 0.0]);
        let s = find_torus_fixed_points(&f, &fix_region(&f).unwrap(), 8, 1e-12).unwrap();
        assert_eq!(
            index_sum_check(&s.records[..3], &f.class()).unwrap(),
            IndexSum::Mismatch { sum: 3, expected: 4 }
        );
    }

    #[test]
    fn index_from_det() {
        assert_eq!(FixedPointIndex::from_det(4.0), FixedPointIndex::Plus);
        assert_eq!(FixedPointIndex::from_det(-1.0), FixedPointIndex::Minus);
        assert_eq!(FixedPointIndex::from_det(1e-9), FixedPointIndex::Degenerate);
        assert_eq!(FixedPointIndex::from_det(f64::NAN), FixedPointIndex::Degenerate);
    }
}
