//! Rotation vectors of lifts isotopic to the identity: Birkhoff averages,
//! rotation-set estimates, `ρ_μ` against empirical measures and the
//! irrotational normalization of lifts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::linalg::{self, CompensatedSum, Vec2};
use crate::mcg_algebra::IntMatrix2;
use crate::rng::Stream;
use crate::torus_maps::{MapError, TorusMap};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RotationError {
    #[error("map class {0} is not the identity")]
    NotIsotopicToIdentity(IntMatrix2),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("invalid measure: {0}")]
    InvalidMeasure(&'static str),
    #[error(transparent)]
    Map(#[from] MapError),
}

const WEIGHT_TOL: f64 = 1e-12;
const ATOM_MERGE_SCALE: f64 = 1e11;

/// A finitely supported probability measure on the torus.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<Vec2>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(points: Vec<Vec2>, weights: Vec<f64>) -> Result<Self, RotationError> {
        if points.is_empty() {
            return Err(RotationError::InvalidMeasure("no atoms"));
        }
        if points.len() != weights.len() {
            return Err(RotationError::InvalidMeasure("points and weights differ in length"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(RotationError::InvalidMeasure("negative or non-finite weight"));
        }
        let total: f64 = weights.iter().sum();
        if libm::fabs(total - 1.0) > WEIGHT_TOL {
            return Err(RotationError::InvalidMeasure("weights do not sum to 1"));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(RotationError::InvalidMeasure("non-finite point"));
        }
        let points = points.into_iter().map(linalg::reduce_torus).collect();
        Ok(EmpiricalMeasure { points, weights })
    }

    pub fn atom(p: Vec2) -> Self {
        EmpiricalMeasure {
            points: alloc::vec![linalg::reduce_torus(p)],
            weights: alloc::vec![1.0],
        }
    }

    /// Equal weights on `points`, merging atoms that agree to about `1e-11`.
    pub fn uniform(points: &[Vec2]) -> Result<Self, RotationError> {
        if points.is_empty() {
            return Err(RotationError::InvalidMeasure("no atoms"));
        }
        let mut atoms: BTreeMap<(i64, i64), (Vec2, usize)> = BTreeMap::new();
        for p in points {
            let p = linalg::reduce_torus(*p);
            let key = |x: f64| {
                let k = libm::rint(x * ATOM_MERGE_SCALE) as i64;
                k % ATOM_MERGE_SCALE as i64
            };
            atoms
                .entry((key(p[0]), key(p[1])))
                .and_modify(|e| e.1 += 1)
                .or_insert((p, 1));
        }
        let n = points.len() as f64;
        let (points, weights) = atoms.into_values().map(|(p, c)| (p, c as f64 / n)).unzip();
        Ok(EmpiricalMeasure { points, weights })
    }

    /// Uniform measure on the centres `((i + 1/2)/n, (j + 1/2)/n)` of an
    /// `n x n` grid.
    pub fn lebesgue_grid(n: usize) -> Result<Self, RotationError> {
        if n == 0 {
            return Err(RotationError::InvalidMeasure("empty grid"));
        }
        let h = 1.0 / n as f64;
        let mut points = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                points.push([(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
            }
        }
        let w = 1.0 / (n * n) as f64;
        Ok(EmpiricalMeasure {
            weights: alloc::vec![w; n * n],
            points,
        })
    }

    /// Convex combination `Σ c_i μ_i`.
    pub fn mixture(parts: &[(f64, &EmpiricalMeasure)]) -> Result<Self, RotationError> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (c, m) in parts {
            points.extend_from_slice(&m.points);
            weights.extend(m.weights.iter().map(|w| c * w));
        }
        EmpiricalMeasure::new(points, weights)
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationSample {
    pub start: Vec2,
    pub horizon: usize,
    pub average: Vec2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationEstimate {
    /// Sorted by starting point.
    pub samples: Vec<RotationSample>,
    /// Counterclockwise, no three vertices collinear.
    pub hull: Vec<Vec2>,
    pub per_measure: Vec<Option<Vec2>>,
}

impl RotationEstimate {
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, p) in self.hull.iter().enumerate() {
            for q in &self.hull[i + 1..] {
                d = d.max(linalg::norm(linalg::sub(*p, *q)));
            }
        }
        d
    }
}

fn require_identity_class(map: &TorusMap) -> Result<(), RotationError> {
    if map.class().is_identity() {
        Ok(())
    } else {
        Err(RotationError::NotIsotopicToIdentity(map.class()))
    }
}

/// Sum of the `n` displacements along the orbit of `x0` and the reduced
/// endpoint. Orbit points are kept in `[0,1)^2`, which is exact for lifts
/// in the identity class.
pub fn orbit_displacement(map: &TorusMap, x0: Vec2, n: usize) -> Result<(Vec2, Vec2), RotationError> {
    require_identity_class(map)?;
    let mut p = linalg::reduce_torus(x0);
    let mut total = CompensatedSum::new();
    for _ in 0..n {
        let d = map.displacement(p)?;
        total.add(d);
        p = linalg::reduce_torus(linalg::add(p, d));
    }
    Ok((total.value(), p))
}

/// `(f^n(x0) - x0) / n`.
pub fn birkhoff_average(map: &TorusMap, x0: Vec2, n: usize) -> Result<Vec2, RotationError> {
    if n == 0 {
        return Err(RotationError::ZeroHorizon);
    }
    let (sum, _) = orbit_displacement(map, x0, n)?;
    Ok(linalg::scale(1.0 / n as f64, sum))
}

fn lex_cmp(a: &Vec2, b: &Vec2) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

fn cross(o: Vec2, a: Vec2, b: Vec2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by the monotone chain, counterclockwise from the
/// lexicographically smallest vertex. Points within `1e-12` are merged.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(lex_cmp);
    pts.dedup_by(|a, b| linalg::norm(linalg::sub(*a, *b)) <= 1e-12);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: &mut dyn Iterator<Item = &Vec2> = if pass == 0 {
            &mut pts.iter()
        } else {
            &mut pts.iter().rev()
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() == 2 && linalg::norm(linalg::sub(hull[0], hull[1])) <= 1e-12 {
        hull.truncate(1);
    }
    hull
}

/// Whether `p` lies in the convex polygon `hull` dilated by `tol`.
pub fn hull_contains(hull: &[Vec2], p: Vec2, tol: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => linalg::norm(linalg::sub(p, hull[0])) <= tol,
        2 => segment_distance(hull[0], hull[1], p) <= tol,
        n => {
            let inside = (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0.0);
            inside || (0..n).any(|i| segment_distance(hull[i], hull[(i + 1) % n], p) <= tol)
        }
    }
}

fn segment_distance(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let ab = linalg::sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    linalg::norm(linalg::sub(p, linalg::add(a, linalg::scale(t, ab))))
}

/// Birkhoff averages from the `grid_n x grid_n` grid of cell centres and
/// `grid_n` seeded random points, with the hull of the results.
pub fn rotation_set_estimate(
    map: &TorusMap,
    grid_n: usize,
    n: usize,
    seed: u64,
) -> Result<RotationEstimate, RotationError> {
    require_identity_class(map)?;
    let mut starts = Vec::with_capacity(grid_n * grid_n + grid_n);
    let h = 1.0 / grid_n.max(1) as f64;
    for i in 0..grid_n {
        for j in 0..grid_n {
            starts.push([(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
        }
    }
    let mut rng = Stream::new(seed, 0);
    starts.extend((0..grid_n).map(|_| rng.point()));
    starts.sort_by(lex_cmp);
    let mut samples = Vec::with_capacity(starts.len());
    for start in starts {
        samples.push(RotationSample {
            start,
            horizon: n,
            average: birkhoff_average(map, start, n)?,
        });
    }
    let averages: Vec<Vec2> = samples.iter().map(|s| s.average).collect();
    Ok(RotationEstimate {
        hull: convex_hull(&averages),
        samples,
        per_measure: Vec::new(),
    })
}

/// `ρ_μ = Σ w_i (f(x_i) - x_i)`.
pub fn rho_mu(map: &TorusMap, measure: &EmpiricalMeasure) -> Result<Vec2, RotationError> {
    require_identity_class(map)?;
    let mut total = CompensatedSum::new();
    for (p, w) in measure.points.iter().zip(&measure.weights) {
        total.add(linalg::scale(*w, map.displacement(*p)?));
    }
    Ok(total.value())
}

/// Uniform measure on the orbit points with indices `burn_in..n`.
pub fn invariant_measure_estimate(
    map: &TorusMap,
    x0: Vec2,
    n: usize,
    burn_in: usize,
) -> Result<EmpiricalMeasure, RotationError> {
    if n <= burn_in {
        return Err(RotationError::ZeroHorizon);
    }
    let mut p = linalg::reduce_torus(x0);
    let mut orbit = Vec::with_capacity(n - burn_in);
    for i in 0..n {
        if i >= burn_in {
            orbit.push(p);
        }
        p = map.evaluate_torus(p)?;
    }
    EmpiricalMeasure::uniform(&orbit)
}

pub fn pushforward(measure: &EmpiricalMeasure, map: &TorusMap) -> Result<EmpiricalMeasure, RotationError> {
    let points = measure
        .points
        .iter()
        .map(|p| map.evaluate_torus(*p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EmpiricalMeasure {
        points,
        weights: measure.weights.clone(),
    })
}

/// `‖ρ_μ(f∘g) - ρ_μ(f) - ρ_μ(g)‖`; meaningful when `μ` is invariant for both.
pub fn morphism_check(f: &TorusMap, g: &TorusMap, measure: &EmpiricalMeasure) -> Result<f64, RotationError> {
    let fg = rho_mu(&f.compose(g), measure)?;
    let rf = rho_mu(f, measure)?;
    let rg = rho_mu(g, measure)?;
    Ok(linalg::norm(linalg::sub(fg, linalg::add(rf, rg))))
}

#[derive(Clone, Debug)]
pub enum Irrotationality {
    /// The lift `T_{-v} ∘ f`, with `ρ_μ` within tolerance of zero for every
    /// tested measure.
    Normalized { map: TorusMap, shift: [i64; 2] },
    /// `ρ_μ - round(ρ_μ)` per measure.
    NotIrrotational { residuals: Vec<Vec2> },
}

fn round_even(x: f64) -> i64 {
    libm::rint(x) as i64
}

/// The integer vector shared by all `rhos` within `tol`, trying the rounded
/// candidates in lexicographic order.
pub fn common_integer_vector(rhos: &[Vec2], tol: f64) -> Option<[i64; 2]> {
    let mut candidates: Vec<[i64; 2]> = rhos.iter().map(|r| [round_even(r[0]), round_even(r[1])]).collect();
    candidates.sort();
    candidates.dedup();
    candidates.into_iter().find(|v| {
        rhos.iter()
            .all(|r| linalg::norm(linalg::sub(*r, [v[0] as f64, v[1] as f64])) <= tol)
    })
}

fn rounding_residuals(rhos: &[Vec2]) -> Vec<Vec2> {
    rhos.iter()
        .map(|r| linalg::sub(*r, [libm::rint(r[0]), libm::rint(r[1])]))
        .collect()
}

pub fn normalize_irrotational(
    map: &TorusMap,
    measures: &[EmpiricalMeasure],
    tol: f64,
) -> Result<Irrotationality, RotationError> {
    if measures.is_empty() {
        return Err(RotationError::InvalidMeasure("empty battery"));
    }
    let rhos = measures
        .iter()
        .map(|m| rho_mu(map, m))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(normalize_from_rhos(map, &rhos, tol))
}

/// [`normalize_irrotational`] with precomputed rotation vectors.
pub fn normalize_from_rhos(map: &TorusMap, rhos: &[Vec2], tol: f64) -> Irrotationality {
    match common_integer_vector(rhos, tol) {
        Some(v) => Irrotationality::Normalized {
            map: shift_lift(map, v),
            shift: v,
        },
        None => Irrotationality::NotIrrotational {
            residuals: rounding_residuals(rhos),
        },
    }
}

/// `T_{-v} ∘ f`.
pub fn shift_lift(map: &TorusMap, v: [i64; 2]) -> TorusMap {
    if v == [0, 0] {
        map.clone()
    } else {
        map.translated([-(v[0] as f64), -(v[1] as f64)])
    }
}

/// Least `m` in `1..=m_cap` such that `m·ρ` is within `tol` of a common
/// integer vector for every supplied `ρ`.
pub fn irrotational_power(rhos: &[Vec2], tol: f64, m_cap: u64) -> Option<(u64, [i64; 2])> {
    (1..=m_cap).find_map(|m| {
        let scaled: Vec<Vec2> = rhos.iter().map(|r| linalg::scale(m as f64, *r)).collect();
        common_integer_vector(&scaled, tol).map(|v| (m, v))
    })
}

/// Measures used to test irrotationality of one lift: a Lebesgue grid plus
/// time averages of the lift itself from seeded random starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatterySpec {
    pub lebesgue_grid: usize,
    pub time_averages: usize,
    pub horizon: usize,
    pub burn_in: usize,
}

impl Default for BatterySpec {
    fn default() -> Self {
        BatterySpec {
            lebesgue_grid: 128,
            time_averages: 10,
            horizon: 100_000,
            burn_in: 0,
        }
    }
}

impl BatterySpec {
    pub fn build(&self, map: &TorusMap, seed: u64) -> Result<Vec<EmpiricalMeasure>, RotationError> {
        let mut out = Vec::with_capacity(1 + self.time_averages);
        if self.lebesgue_grid > 0 {
            out.push(EmpiricalMeasure::lebesgue_grid(self.lebesgue_grid)?);
        }
        let mut rng = Stream::new(seed, 1);
        for _ in 0..self.time_averages {
            out.push(invariant_measure_estimate(map, rng.point(), self.horizon, self.burn_in)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_maps::{FourierMap, FourierTerm};
    use alloc::vec;
    use core::f64::consts::SQRT_2;

    fn leaf(t: Vec2, terms: Vec<FourierTerm>) -> TorusMap {
        FourierMap::new(IntMatrix2::IDENTITY, t, terms).unwrap().into()
    }

    /// y-dynamics with attracting fixed circles y = 0 and y = 1/2 whose
    /// x-drift is 1 and 0 respectively.
    fn two_attractors() -> TorusMap {
        leaf(
            [0.5, 0.0],
            vec![
                FourierTerm { k: [0, 1], cos: [0.5, 0.0], sin: [0.0, 0.0] },
                FourierTerm { k: [0, 2], cos: [0.0, 0.0], sin: [0.0, -0.05] },
            ],
        )
    }

    #[test]
    fn sqrt2_translation_average() {
        let f = TorusMap::translation([SQRT_2, 0.0]);
        for n in [1, 7, 1000] {
            let r = birkhoff_average(&f, [0.3, 0.8], n).unwrap();
            assert!((r[0] - SQRT_2).abs() <= 1e-15 && r[1] == 0.0);
        }
        assert_eq!(birkhoff_average(&TorusMap::identity(), [0.1, 0.2], 10).unwrap(), [0.0, 0.0]);
        assert_eq!(birkhoff_average(&f, [0.0, 0.0], 0), Err(RotationError::ZeroHorizon));
    }

    #[test]
    fn rejects_non_identity_class() {
        let f = TorusMap::affine(IntMatrix2::MINUS_IDENTITY, [0.0, 0.0]);
        assert!(matches!(
            rho_mu(&f, &EmpiricalMeasure::atom([0.0, 0.0])),
            Err(RotationError::NotIsotopicToIdentity(_))
        ));
    }

    #[test]
    fn rigid_translation_hull_is_a_point() {
        let f = TorusMap::translation([SQRT_2, 0.0]);
        let est = rotation_set_estimate(&f, 4, 200, 9).unwrap();
        assert_eq!(est.samples.len(), 20);
        assert_eq!(est.hull.len(), 1);
        assert!(est.diameter() <= 1e-12);
        assert!((est.hull[0][0] - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn two_attractors_give_two_averages() {
        let f = two_attractors();
        // the fixed circles of the y-dynamics, by direct evaluation
        for (y, drift) in [(0.0, 1.0), (0.5, 0.0)] {
            let d = f.displacement([0.3, y]).unwrap();
            assert!((d[0] - drift).abs() < 1e-15 && d[1].abs() < 1e-15);
        }
        let est = rotation_set_estimate(&f, 6, 2000, 1).unwrap();
        let near = |target: Vec2| {
            est.samples
                .iter()
                .any(|s| linalg::norm(linalg::sub(s.average, target)) < 0.01)
        };
        assert!(near([1.0, 0.0]) && near([0.0, 0.0]));
        assert!(est.diameter() > 0.98);
    }

    #[test]
    fn hull_shrinks_with_horizon() {
        let f = two_attractors();
        let a = rotation_set_estimate(&f, 4, 100, 2).unwrap();
        let b = rotation_set_estimate(&f, 4, 200, 2).unwrap();
        for v in &b.hull {
            assert!(hull_contains(&a.hull, *v, 2.0 / 100.0));
        }
    }

    #[test]
    fn hull_of_square_with_interior_and_collinear_points() {
        let pts = [
            [0.0, 0.0],
            [1.0, 0.0],
            [0.5, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
            [1.0, 1.0 + 1e-14],
        ];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!(hull_contains(&h, [0.5, 0.5], 0.0));
        assert!(!hull_contains(&h, [1.5, 0.5], 0.1));
        assert!(hull_contains(&h, [1.05, 0.5], 0.1));
    }

    #[test]
    fn rho_mu_examples() {
        let t = TorusMap::translation([0.37, -0.11]);
        let m = EmpiricalMeasure::lebesgue_grid(5).unwrap();
        let r = rho_mu(&t, &m).unwrap();
        assert!((r[0] - 0.37).abs() <= 1e-12 && (r[1] + 0.11).abs() <= 1e-12);
        assert_eq!(rho_mu(&TorusMap::identity(), &m).unwrap(), [0.0, 0.0]);
        // atom at a fixed point of the lift
        let f = two_attractors().translated([-1.0, 0.0]);
        assert!(linalg::norm(rho_mu(&f, &EmpiricalMeasure::atom([0.4, 0.0])).unwrap()) < 1e-15);
    }

    #[test]
    fn invariant_measure_examples() {
        let id = invariant_measure_estimate(&TorusMap::identity(), [0.2, 0.4], 50, 0).unwrap();
        assert_eq!(id.points(), &[[0.2, 0.4]]);
        assert_eq!(id.weights(), &[1.0]);
        let half = TorusMap::translation([0.5, 0.0]);
        let m = invariant_measure_estimate(&half, [0.2, 0.4], 1000, 0).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));
        assert_eq!(
            invariant_measure_estimate(&half, [0.0, 0.0], 5, 5),
            Err(RotationError::ZeroHorizon)
        );
    }

    #[test]
    fn pushforward_examples() {
        let atom = EmpiricalMeasure::atom([0.9, 0.9]);
        let moved = pushforward(&atom, &TorusMap::translation([0.2, 0.2])).unwrap();
        assert!(linalg::torus_distance(moved.points()[0], [0.1, 0.1]) < 1e-15);
        let m = EmpiricalMeasure::lebesgue_grid(3).unwrap();
        assert_eq!(pushforward(&m, &TorusMap::identity()).unwrap(), m);
    }

    #[test]
    fn normalization_examples() {
        let leb = vec![EmpiricalMeasure::lebesgue_grid(8).unwrap()];
        match normalize_irrotational(&TorusMap::translation([1.0, 2.0]), &leb, 1e-3).unwrap() {
            Irrotationality::Normalized { map, shift } => {
                assert_eq!(shift, [1, 2]);
                assert!(linalg::norm(rho_mu(&map, &leb[0]).unwrap()) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        match normalize_irrotational(&TorusMap::translation([0.5, 0.0]), &leb, 1e-3).unwrap() {
            Irrotationality::NotIrrotational { residuals } => assert_eq!(residuals, vec![[0.5, 0.0]]),
            other => panic!("{other:?}"),
        }
        match normalize_irrotational(&TorusMap::translation([1.0 - 1e-12, 0.0]), &leb, 1e-3).unwrap() {
            Irrotationality::Normalized { shift, .. } => assert_eq!(shift, [1, 0]),
            other => panic!("{other:?}"),
        }
        assert!(normalize_irrotational(&TorusMap::identity(), &[], 1e-3).is_err());
    }

    #[test]
    fn ties_round_to_even_then_lexicographic() {
        assert_eq!(common_integer_vector(&[[2.5, -0.5]], 0.8), Some([2, 0]));
        assert_eq!(common_integer_vector(&[[0.45, 0.0], [0.55, 0.0]], 0.6), Some([0, 0]));
    }

    #[test]
    fn powers_of_rational_rotations() {
        assert_eq!(irrotational_power(&[[0.5, 0.0], [0.5, 1e-9]], 1e-6, 64), Some((2, [1, 0])));
        assert_eq!(irrotational_power(&[[1.0 / 3.0, 0.25]], 1e-9, 64), Some((12, [4, 3])));
        assert_eq!(irrotational_power(&[[SQRT_2, 0.0]], 1e-9, 64), None);
    }

    #[test]
    fn morphism_examples() {
        let leb = EmpiricalMeasure::lebesgue_grid(256).unwrap();
        let f = TorusMap::translation([0.3, 0.0]);
        let g = TorusMap::translation([0.1, 0.7]);
        assert!(morphism_check(&f, &g, &leb).unwrap() <= 1e-12);
        let g = leaf(
            [0.0, 0.2],
            vec![FourierTerm { k: [1, 0], cos: [0.0, 0.1], sin: [0.0, 0.05] }],
        );
        assert!(morphism_check(&f, &g, &leb).unwrap() <= 1e-6);
    }

    #[test]
    fn battery_has_expected_size() {
        let spec = BatterySpec { lebesgue_grid: 4, time_averages: 3, horizon: 50, burn_in: 5 };
        let b = spec.build(&TorusMap::translation([0.25, 0.0]), 0).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b, spec.build(&TorusMap::translation([0.25, 0.0]), 0).unwrap());
    }
}
