//! Lifts `R^2 -> R^2` of torus maps.
//!
//! Leaves are trigonometric polynomials on top of an integer affine part,
//!
//! ```text
//! f(x) = A x + t + Σ_k [ c_k cos(2π<k,x>) + s_k sin(2π<k,x>) ]
//! ```
//!
//! so `f(x + v) = f(x) + A v` for integer `v` holds by construction, the
//! Jacobian is exact and `sup |f(x) - A x|` has a closed-form bound. Composites
//! of trig polynomials are not trig polynomials, so general maps are
//! expression trees over leaves.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use crate::linalg::{self, Mat2, Vec2};
use crate::mcg_algebra::{IntMatrix2, Word};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("Newton inversion did not converge at target {target:?} (residual {residual:e})")]
    NewtonDivergence { target: Vec2, residual: f64 },
    #[error("Jacobian is singular at {point:?} (det {det:e})")]
    SingularJacobian { point: Vec2, det: f64 },
    #[error("Fourier term with zero frequency")]
    ZeroFrequency,
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("grid size {0} is below the minimum of 16")]
    GridTooSmall(usize),
}

pub const NEWTON_MAX_ITER: usize = 64;
pub const NEWTON_TOL: f64 = 1e-12;
const SINGULAR_DET: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierTerm {
    pub k: [i64; 2],
    pub cos: Vec2,
    pub sin: Vec2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierMap {
    matrix: IntMatrix2,
    translation: Vec2,
    terms: Vec<FourierTerm>,
}

impl FourierMap {
    pub fn new(matrix: IntMatrix2, translation: Vec2, terms: Vec<FourierTerm>) -> Result<Self, MapError> {
        if !translation.iter().all(|x| x.is_finite()) {
            return Err(MapError::NonFinite);
        }
        for t in &terms {
            if t.k == [0, 0] {
                return Err(MapError::ZeroFrequency);
            }
            if !t.cos.iter().chain(t.sin.iter()).all(|x| x.is_finite()) {
                return Err(MapError::NonFinite);
            }
        }
        Ok(FourierMap {
            matrix,
            translation,
            terms,
        })
    }

    pub fn affine(matrix: IntMatrix2, translation: Vec2) -> Self {
        FourierMap {
            matrix,
            translation,
            terms: Vec::new(),
        }
    }

    pub fn matrix(&self) -> IntMatrix2 {
        self.matrix
    }

    pub fn translation(&self) -> Vec2 {
        self.translation
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    /// `K0 = |t| + Σ (|c_k| + |s_k|)`, an upper bound for `sup |f(x) - A x|`.
    pub fn displacement_bound(&self) -> f64 {
        self.terms
            .iter()
            .fold(linalg::norm(self.translation), |acc, t| {
                acc + linalg::norm(t.cos) + linalg::norm(t.sin)
            })
    }

    pub fn evaluate(&self, x: Vec2) -> Vec2 {
        linalg::add(self.matrix.apply_f64(x), self.periodic_part(x))
    }

    /// `f(x) - A x`, the Z^2-periodic part.
    pub fn periodic_part(&self, x: Vec2) -> Vec2 {
        let mut y = self.translation;
        for t in &self.terms {
            let theta = TAU * (t.k[0] as f64 * x[0] + t.k[1] as f64 * x[1]);
            let (s, c) = (libm::sin(theta), libm::cos(theta));
            y[0] += t.cos[0] * c + t.sin[0] * s;
            y[1] += t.cos[1] * c + t.sin[1] * s;
        }
        y
    }

    pub fn derivative(&self, x: Vec2) -> Mat2 {
        let mut j = self.matrix.to_f64();
        for t in &self.terms {
            let theta = TAU * (t.k[0] as f64 * x[0] + t.k[1] as f64 * x[1]);
            let (s, c) = (libm::sin(theta), libm::cos(theta));
            for row in 0..2 {
                let w = TAU * (-t.cos[row] * s + t.sin[row] * c);
                j[row][0] += w * t.k[0] as f64;
                j[row][1] += w * t.k[1] as f64;
            }
        }
        j
    }
}

/// A lift supplied from outside the expression-tree algebra (for example a
/// doubled annulus map). It must satisfy `f(x + v) = f(x) + class·v`.
pub trait PlaneLift: fmt::Debug + Send + Sync {
    fn class(&self) -> IntMatrix2;
    fn displacement_bound(&self) -> f64;
    fn evaluate(&self, x: Vec2) -> Result<Vec2, MapError>;
    fn derivative(&self, x: Vec2) -> Result<Mat2, MapError>;
}

#[derive(Debug)]
pub enum MapNode {
    Leaf(FourierMap),
    /// `outer ∘ inner`
    Compose(TorusMap, TorusMap),
    Inverse(TorusMap),
    Power(TorusMap, i64),
    Custom(Arc<dyn PlaneLift>),
}

/// A lift with its cached mapping class and displacement bound
/// `K >= sup |f(x) - A x|`.
#[derive(Clone)]
pub struct TorusMap {
    node: Arc<MapNode>,
    class: IntMatrix2,
    bound: f64,
}

impl fmt::Debug for TorusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusMap")
            .field("class", &self.class)
            .field("bound", &self.bound)
            .field("node", &self.node)
            .finish()
    }
}

impl From<FourierMap> for TorusMap {
    fn from(leaf: FourierMap) -> Self {
        TorusMap::leaf(leaf)
    }
}

impl TorusMap {
    pub fn leaf(leaf: FourierMap) -> Self {
        let class = leaf.matrix();
        let bound = leaf.displacement_bound();
        TorusMap {
            node: Arc::new(MapNode::Leaf(leaf)),
            class,
            bound,
        }
    }

    pub fn identity() -> Self {
        TorusMap::leaf(FourierMap::affine(IntMatrix2::IDENTITY, [0.0, 0.0]))
    }

    pub fn translation(t: Vec2) -> Self {
        TorusMap::leaf(FourierMap::affine(IntMatrix2::IDENTITY, t))
    }

    pub fn affine(matrix: IntMatrix2, t: Vec2) -> Self {
        TorusMap::leaf(FourierMap::affine(matrix, t))
    }

    pub fn custom(lift: Arc<dyn PlaneLift>) -> Self {
        let class = lift.class();
        let bound = lift.displacement_bound();
        TorusMap {
            node: Arc::new(MapNode::Custom(lift)),
            class,
            bound,
        }
    }

    /// `self ∘ inner`. Panics if the product class overflows `i64`.
    pub fn compose(&self, inner: &TorusMap) -> TorusMap {
        let class = self
            .class
            .checked_mul(&inner.class)
            .expect("mapping class overflow in composition");
        // f(g(x)) - AB x = [f(g x) - A g x] + A [g x - B x]
        let bound = self.bound + linalg::spectral_norm(&self.class.to_f64()) * inner.bound;
        TorusMap {
            node: Arc::new(MapNode::Compose(self.clone(), inner.clone())),
            class,
            bound,
        }
    }

    pub fn inverse(&self) -> TorusMap {
        let class = self.class.inverse();
        // f^-1(y) - A^-1 y = A^-1 (A x - f(x)) with x = f^-1(y)
        let bound = linalg::spectral_norm(&class.to_f64()) * self.bound;
        TorusMap {
            node: Arc::new(MapNode::Inverse(self.clone())),
            class,
            bound,
        }
    }

    pub fn power(&self, n: i64) -> TorusMap {
        let class = self.class.checked_pow(n).expect("mapping class overflow in power");
        let (step_class, step_bound) = if n >= 0 {
            (self.class, self.bound)
        } else {
            let inv = self.class.inverse();
            (inv, linalg::spectral_norm(&inv.to_f64()) * self.bound)
        };
        let a = linalg::spectral_norm(&step_class.to_f64());
        let mut bound = 0.0;
        let mut apow = 1.0;
        for _ in 0..n.unsigned_abs() {
            bound += apow * step_bound;
            apow *= a;
        }
        TorusMap {
            node: Arc::new(MapNode::Power(self.clone(), n)),
            class,
            bound,
        }
    }

    /// `T_v ∘ self`.
    pub fn translated(&self, v: Vec2) -> TorusMap {
        TorusMap::translation(v).compose(self)
    }

    /// Evaluates a word `w0 w1 ... wn` as `g_w0 ∘ g_w1 ∘ ... ∘ g_wn`.
    /// Returns `None` if a letter refers to a missing generator.
    pub fn from_word(word: &Word, gens: &[TorusMap]) -> Option<TorusMap> {
        let mut acc: Option<TorusMap> = None;
        for l in word.letters() {
            let g = gens.get(l.generator)?;
            let g = if l.inverse { g.inverse() } else { g.clone() };
            acc = Some(match acc {
                None => g,
                Some(a) => a.compose(&g),
            });
        }
        Some(acc.unwrap_or_else(TorusMap::identity))
    }

    pub fn class(&self) -> IntMatrix2 {
        self.class
    }

    pub fn displacement_bound(&self) -> f64 {
        self.bound
    }

    pub fn node(&self) -> &MapNode {
        &self.node
    }

    /// Replaces the cached class without touching the map. Only meant for
    /// negative controls of [`check_equivariance`].
    #[doc(hidden)]
    pub fn with_declared_class(&self, class: IntMatrix2) -> TorusMap {
        TorusMap {
            node: self.node.clone(),
            class,
            bound: self.bound,
        }
    }

    pub fn evaluate(&self, x: Vec2) -> Result<Vec2, MapError> {
        match &*self.node {
            MapNode::Leaf(f) => Ok(f.evaluate(x)),
            MapNode::Compose(f, g) => f.evaluate(g.evaluate(x)?),
            MapNode::Inverse(f) => f.solve(x),
            MapNode::Power(f, n) => {
                let mut y = x;
                for _ in 0..n.unsigned_abs() {
                    y = if *n >= 0 { f.evaluate(y)? } else { f.solve(y)? };
                }
                Ok(y)
            }
            MapNode::Custom(f) => f.evaluate(x),
        }
    }

    /// `f(x) - x`. Exact for leaves whose class is the identity.
    pub fn displacement(&self, x: Vec2) -> Result<Vec2, MapError> {
        match &*self.node {
            MapNode::Leaf(f) if f.matrix().is_identity() => Ok(f.periodic_part(x)),
            _ => Ok(linalg::sub(self.evaluate(x)?, x)),
        }
    }

    /// Image of a torus point, reduced to `[0, 1)^2`.
    pub fn evaluate_torus(&self, p: Vec2) -> Result<Vec2, MapError> {
        self.evaluate(p).map(linalg::reduce_torus)
    }

    pub fn derivative(&self, x: Vec2) -> Result<Mat2, MapError> {
        match &*self.node {
            MapNode::Leaf(f) => Ok(f.derivative(x)),
            MapNode::Compose(f, g) => {
                let gx = g.evaluate(x)?;
                Ok(linalg::mat_mul(&f.derivative(gx)?, &g.derivative(x)?))
            }
            MapNode::Inverse(f) => {
                let y = f.solve(x)?;
                inverse_jacobian(&f.derivative(y)?, y)
            }
            MapNode::Power(f, n) => {
                let mut y = x;
                let mut j = linalg::IDENTITY;
                for _ in 0..n.unsigned_abs() {
                    let (next, step) = if *n >= 0 {
                        (f.evaluate(y)?, f.derivative(y)?)
                    } else {
                        let z = f.solve(y)?;
                        (z, inverse_jacobian(&f.derivative(z)?, z)?)
                    };
                    j = linalg::mat_mul(&step, &j);
                    y = next;
                }
                Ok(j)
            }
            MapNode::Custom(f) => f.derivative(x),
        }
    }

    /// Solves `self(x) = y` by damped Newton iteration.
    pub fn solve(&self, y: Vec2) -> Result<Vec2, MapError> {
        let ainv = self.class.inverse();
        let offset = match &*self.node {
            MapNode::Leaf(f) => f.translation(),
            _ => self.evaluate([0.0, 0.0])?,
        };
        let mut x = ainv.apply_f64(linalg::sub(y, offset));
        let tol = NEWTON_TOL * linalg::norm(y).max(1.0);
        let mut r = linalg::sub(self.evaluate(x)?, y);
        let mut rn = linalg::norm(r);
        for _ in 0..NEWTON_MAX_ITER {
            if rn <= tol {
                return Ok(x);
            }
            let j = self.derivative(x)?;
            let step = linalg::solve(&j, r, SINGULAR_DET).ok_or(MapError::SingularJacobian {
                point: x,
                det: linalg::det(&j),
            })?;
            let mut lambda = 1.0;
            loop {
                let cand = linalg::sub(x, linalg::scale(lambda, step));
                let rc = linalg::sub(self.evaluate(cand)?, y);
                let rcn = linalg::norm(rc);
                if rcn < rn || lambda < 1e-3 {
                    x = cand;
                    r = rc;
                    rn = rcn;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if rn <= tol {
            Ok(x)
        } else {
            Err(MapError::NewtonDivergence {
                target: y,
                residual: rn,
            })
        }
    }
}

fn inverse_jacobian(j: &Mat2, at: Vec2) -> Result<Mat2, MapError> {
    linalg::inverse(j, SINGULAR_DET).ok_or(MapError::SingularJacobian {
        point: at,
        det: linalg::det(j),
    })
}

/// A labelled set of generators, optionally with one marked element.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub generators: Vec<(alloc::string::String, TorusMap)>,
    pub marked: Option<alloc::string::String>,
}

impl GroupSpec {
    pub fn new(generators: Vec<(alloc::string::String, TorusMap)>) -> Result<Self, GroupSpecError> {
        for (i, (label, _)) in generators.iter().enumerate() {
            if generators[..i].iter().any(|(l, _)| l == label) {
                return Err(GroupSpecError::DuplicateLabel(label.clone()));
            }
        }
        if generators.is_empty() {
            return Err(GroupSpecError::Empty);
        }
        Ok(GroupSpec {
            generators,
            marked: None,
        })
    }

    pub fn maps(&self) -> Vec<TorusMap> {
        self.generators.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn classes(&self) -> Vec<IntMatrix2> {
        self.generators.iter().map(|(_, m)| m.class()).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.generators.iter().map(|(l, _)| l.as_str()).collect()
    }

    /// Screens every generator with [`validate_diffeo`].
    pub fn validate(&self, grid_n: usize) -> Result<(), GroupSpecError> {
        for (label, map) in &self.generators {
            match validate_diffeo(map, grid_n).map_err(GroupSpecError::Map)? {
                Validation::Valid { .. } => {}
                Validation::Suspect { point, det } => {
                    return Err(GroupSpecError::Suspect {
                        label: label.clone(),
                        point,
                        det,
                    })
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupSpecError {
    #[error("duplicate generator label {0:?}")]
    DuplicateLabel(alloc::string::String),
    #[error("group has no generators")]
    Empty,
    #[error("generator {label:?} failed diffeomorphism screening at {point:?} (det {det:e})")]
    Suspect {
        label: alloc::string::String,
        point: Vec2,
        det: f64,
    },
    #[error(transparent)]
    Map(MapError),
}

/// Grid screening result. `Valid` is evidence, not a proof, that the map
/// is a diffeomorphism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Validation {
    Valid { min_abs_det: f64 },
    Suspect { point: Vec2, det: f64 },
}

pub const MIN_SCREEN_DET: f64 = 1e-6;

pub fn validate_diffeo(map: &TorusMap, grid_n: usize) -> Result<Validation, MapError> {
    if grid_n < 16 {
        return Err(MapError::GridTooSmall(grid_n));
    }
    let mut sign = 0.0f64;
    let mut min_abs = f64::INFINITY;
    for i in 0..grid_n {
        for j in 0..grid_n {
            let p = [i as f64 / grid_n as f64, j as f64 / grid_n as f64];
            let d = linalg::det(&map.derivative(p)?);
            if !(libm::fabs(d) >= MIN_SCREEN_DET) {
                return Ok(Validation::Suspect { point: p, det: d });
            }
            if sign == 0.0 {
                sign = d.signum();
            } else if d.signum() != sign {
                return Ok(Validation::Suspect { point: p, det: d });
            }
            min_abs = min_abs.min(libm::fabs(d));
        }
    }
    Ok(Validation::Valid { min_abs_det: min_abs })
}

/// `max |f(x + v) - f(x) - A v|` over `samples` seeded points `x` and all
/// `v ∈ {-2..2}^2`, with `A` the cached class.
pub fn check_equivariance(map: &TorusMap, samples: usize, seed: u64) -> Result<f64, MapError> {
    let mut rng = Stream::new(seed, 0);
    let a = map.class();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = rng.point();
        let fx = map.evaluate(x)?;
        for v0 in -2..=2i64 {
            for v1 in -2..=2i64 {
                let v = [v0 as f64, v1 as f64];
                let fxv = map.evaluate(linalg::add(x, v))?;
                let res = linalg::sub(linalg::sub(fxv, fx), a.apply_f64(v));
                worst = worst.max(linalg::norm(res));
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
        IntMatrix2::new(a, b, c, d).unwrap()
    }

    fn wiggly() -> TorusMap {
        FourierMap::new(
            m(2, 1, 1, 1),
            [0.1, -0.2],
            vec![
                FourierTerm { k: [1, 0], cos: [0.03, 0.01], sin: [0.0, 0.02] },
                FourierTerm { k: [1, -2], cos: [0.0, 0.01], sin: [0.015, 0.0] },
            ],
        )
        .unwrap()
        .into()
    }

    #[test]
    fn sqrt2_translation() {
        let f = TorusMap::translation([core::f64::consts::SQRT_2, 0.0]);
        assert_eq!(f.evaluate([0.0, 0.0]).unwrap(), [core::f64::consts::SQRT_2, 0.0]);
    }

    #[test]
    fn minus_identity_leaf() {
        let f = TorusMap::affine(IntMatrix2::MINUS_IDENTITY, [0.0, 0.0]);
        assert_eq!(f.evaluate([0.3, 0.7]).unwrap(), [-0.3, -0.7]);
        assert_eq!(f.derivative([0.3, 0.7]).unwrap(), [[-1.0, 0.0], [0.0, -1.0]]);
        let t = TorusMap::translation([0.4, 0.1]);
        assert_eq!(t.derivative([0.9, 0.2]).unwrap(), linalg::IDENTITY);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let f = wiggly();
        let id = f.compose(&f.inverse());
        let mut rng = Stream::new(3, 0);
        for _ in 0..200 {
            let x = linalg::scale(4.0, rng.point());
            let y = id.evaluate(x).unwrap();
            assert!(linalg::norm(linalg::sub(x, y)) < 1e-10);
        }
        assert!(id.class().is_identity());
    }

    #[test]
    fn zero_frequency_rejected() {
        let r = FourierMap::new(
            IntMatrix2::IDENTITY,
            [0.0, 0.0],
            vec![FourierTerm { k: [0, 0], cos: [1.0, 0.0], sin: [0.0, 0.0] }],
        );
        assert_eq!(r, Err(MapError::ZeroFrequency));
    }

    #[test]
    fn derivative_matches_central_differences() {
        let f = wiggly();
        let g = f.compose(&f.inverse().power(2)).compose(&f);
        let h = 1e-6;
        let mut rng = Stream::new(11, 0);
        for map in [&f, &g] {
            for _ in 0..20 {
                let x = rng.point();
                let j = map.derivative(x).unwrap();
                for col in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[col] += h;
                    xm[col] -= h;
                    let fp = map.evaluate(xp).unwrap();
                    let fm = map.evaluate(xm).unwrap();
                    for row in 0..2 {
                        let fd = (fp[row] - fm[row]) / (2.0 * h);
                        assert!((fd - j[row][col]).abs() < 1e-6, "{fd} vs {}", j[row][col]);
                    }
                }
            }
        }
    }

    #[test]
    fn validation_examples() {
        let affine = TorusMap::affine(m(2, 1, 1, 1), [0.3, 0.0]);
        assert_eq!(validate_diffeo(&affine, 16).unwrap(), Validation::Valid { min_abs_det: 1.0 });

        let bad = TorusMap::leaf(
            FourierMap::new(
                IntMatrix2::IDENTITY,
                [0.0, 0.0],
                vec![FourierTerm { k: [1, 0], cos: [0.5, 0.0], sin: [0.0, 0.0] }],
            )
            .unwrap(),
        );
        assert!(matches!(validate_diffeo(&bad, 32).unwrap(), Validation::Suspect { .. }));

        let good = TorusMap::leaf(
            FourierMap::new(
                IntMatrix2::IDENTITY,
                [0.0, 0.0],
                vec![FourierTerm { k: [1, 0], cos: [0.05, 0.0], sin: [0.0, 0.0] }],
            )
            .unwrap(),
        );
        assert!(matches!(validate_diffeo(&good, 32).unwrap(), Validation::Valid { .. }));
        assert_eq!(validate_diffeo(&good, 8), Err(MapError::GridTooSmall(8)));
    }

    #[test]
    fn equivariance_residuals() {
        let f = wiggly();
        assert!(check_equivariance(&f, 50, 1).unwrap() <= 1e-12);
        let g = TorusMap::affine(m(0, 1, 1, 1), [0.2, 0.0]).compose(&f);
        assert!(check_equivariance(&g, 50, 2).unwrap() <= 1e-10);
        assert_eq!(g.class(), m(0, 1, 1, 1) * m(2, 1, 1, 1));
        let corrupted = f.with_declared_class(IntMatrix2::IDENTITY);
        assert!(check_equivariance(&corrupted, 10, 3).unwrap() > 0.5);
    }

    #[test]
    fn class_functoriality() {
        let f = wiggly();
        let g = TorusMap::affine(m(1, 1, 0, 1), [0.0, 0.5]);
        assert_eq!(f.compose(&g).class(), f.class() * g.class());
        assert_eq!(f.inverse().class(), f.class().inverse());
        assert_eq!(f.power(-3).class(), f.class().checked_pow(-3).unwrap());
    }

    #[test]
    fn displacement_bound_is_sound() {
        let f = wiggly();
        let maps = [f.clone(), f.inverse(), f.power(2), f.compose(&f.inverse().power(2))];
        let mut rng = Stream::new(5, 0);
        for map in &maps {
            let a = map.class();
            for _ in 0..2000 {
                let x = rng.point();
                let d = linalg::norm(linalg::sub(map.evaluate(x).unwrap(), a.apply_f64(x)));
                assert!(d <= map.displacement_bound() + 1e-12);
            }
        }
    }

    #[test]
    fn words_build_composites() {
        let f = wiggly();
        let t = TorusMap::translation([0.5, 0.0]);
        let w = Word::from_signed(&[1, -2, 1]).unwrap();
        let g = TorusMap::from_word(&w, &[f.clone(), t.clone()]).unwrap();
        let x = [0.2, 0.9];
        let direct = f
            .evaluate(t.inverse().evaluate(f.evaluate(x).unwrap()).unwrap())
            .unwrap();
        let via = g.evaluate(x).unwrap();
        assert!(linalg::norm(linalg::sub(direct, via)) < 1e-12);
        assert!(TorusMap::from_word(&Word::empty(), &[]).unwrap().class().is_identity());
    }
}
