use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::SurfaceError;
use crate::linalg::CompensatedSum;
use crate::torus_maps::{FourierMap, FourierTerm, TorusMap};
use crate::mcg_algebra::IntMatrix2;

/// A lift `R -> R` of a circle map with `g(x + 1) = g(x) + degree`.
pub trait CircleMap {
    fn degree(&self) -> i8;
    fn evaluate(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleTerm {
    pub k: u32,
    pub cos: f64,
    pub sin: f64,
}

/// `g(x) = degree·x + t + Σ [c_k cos(2πkx) + s_k sin(2πkx)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleLift {
    degree: i8,
    translation: f64,
    terms: Vec<CircleTerm>,
}

impl CircleLift {
    pub fn new(degree: i8, translation: f64, terms: Vec<CircleTerm>) -> Result<Self, SurfaceError> {
        if degree != 1 && degree != -1 {
            return Err(SurfaceError::InvalidCircleLift("degree must be +1 or -1"));
        }
        if !translation.is_finite() || terms.iter().any(|t| !t.cos.is_finite() || !t.sin.is_finite()) {
            return Err(SurfaceError::InvalidCircleLift("non-finite coefficient"));
        }
        if terms.iter().any(|t| t.k == 0) {
            return Err(SurfaceError::InvalidCircleLift("frequency must be positive"));
        }
        Ok(CircleLift {
            degree,
            translation,
            terms,
        })
    }

    pub fn rotation(t: f64) -> Self {
        CircleLift {
            degree: 1,
            translation: t,
            terms: Vec::new(),
        }
    }

    pub fn reflection(t: f64) -> Self {
        CircleLift {
            degree: -1,
            translation: t,
            terms: Vec::new(),
        }
    }

    pub fn translation(&self) -> f64 {
        self.translation
    }

    pub fn terms(&self) -> &[CircleTerm] {
        &self.terms
    }

    /// `sup |g(x) - degree·x|`.
    pub fn displacement_bound(&self) -> f64 {
        self.terms
            .iter()
            .fold(libm::fabs(self.translation), |acc, t| acc + libm::hypot(t.cos, t.sin))
    }

    /// Checks on a grid that `degree·g'` stays above `min_slope`.
    pub fn screen_homeomorphism(&self, grid_n: usize, min_slope: f64) -> Result<(), SurfaceError> {
        for i in 0..grid_n {
            let x = i as f64 / grid_n as f64;
            if !(self.degree as f64 * self.derivative(x) > min_slope) {
                return Err(SurfaceError::NotMonotone { point: x });
            }
        }
        Ok(())
    }
}

impl CircleMap for CircleLift {
    fn degree(&self) -> i8 {
        self.degree
    }

    fn evaluate(&self, x: f64) -> f64 {
        let mut y = self.degree as f64 * x + self.translation;
        for t in &self.terms {
            let th = TAU * t.k as f64 * x;
            y += t.cos * libm::cos(th) + t.sin * libm::sin(th);
        }
        y
    }

    fn derivative(&self, x: f64) -> f64 {
        let mut d = self.degree as f64;
        for t in &self.terms {
            let th = TAU * t.k as f64 * x;
            d += TAU * t.k as f64 * (-t.cos * libm::sin(th) + t.sin * libm::cos(th));
        }
        d
    }
}

/// `g^k` for `k >= 0`.
#[derive(Clone, Copy, Debug)]
pub struct Iterate<'a, M: CircleMap + ?Sized> {
    pub base: &'a M,
    pub count: u32,
}

impl<M: CircleMap + ?Sized> CircleMap for Iterate<'_, M> {
    fn degree(&self) -> i8 {
        if self.base.degree() == -1 && self.count % 2 == 1 {
            -1
        } else {
            1
        }
    }

    fn evaluate(&self, x: f64) -> f64 {
        (0..self.count).fold(x, |y, _| self.base.evaluate(y))
    }

    fn derivative(&self, x: f64) -> f64 {
        let mut y = x;
        let mut d = 1.0;
        for _ in 0..self.count {
            d *= self.base.derivative(y);
            y = self.base.evaluate(y);
        }
        d
    }
}

/// `(g^n(x0) - x0) / n` for a degree-one lift, summing displacements at
/// points reduced mod 1.
pub fn circle_rotation_number<M: CircleMap + ?Sized>(lift: &M, x0: f64, n: usize) -> Result<f64, SurfaceError> {
    if lift.degree() != 1 {
        return Err(SurfaceError::WrongDegree {
            expected: 1,
            found: lift.degree(),
        });
    }
    if n == 0 {
        return Err(SurfaceError::ZeroHorizon);
    }
    let mut p = x0 - libm::floor(x0);
    let mut total = CompensatedSum::new();
    for _ in 0..n {
        let d = lift.evaluate(p) - p;
        total.add([d, 0.0]);
        p = crate::linalg::frac(p + d);
    }
    Ok(total.value()[0] / n as f64)
}

pub const ROOT_GRID: usize = 1024;

/// The two fixed points in `[0,1)` of an orientation-reversing circle map,
/// in increasing order. Any other number of roots of `g(x) - x mod 1` is
/// reported as [`SurfaceError::WrongCount`].
pub fn reversing_fixed_points(lift: &CircleLift, tol: f64) -> Result<[f64; 2], SurfaceError> {
    if lift.degree() != -1 {
        return Err(SurfaceError::WrongDegree {
            expected: -1,
            found: lift.degree(),
        });
    }
    // h(x) = g(x) - x drops by exactly 2 over [0, 1]
    let h = |x: f64| lift.evaluate(x) - x;
    let (h0, h1) = (h(0.0), h(1.0));
    let mut roots: Vec<f64> = Vec::new();
    let lo = libm::ceil(h1) as i64;
    let hi = libm::floor(h0) as i64;
    for m in lo..=hi {
        let f = |x: f64| h(x) - m as f64;
        let mut prev_x = 0.0;
        let mut prev = f(0.0);
        if prev == 0.0 {
            roots.push(0.0);
        }
        for i in 1..=ROOT_GRID {
            let x = i as f64 / ROOT_GRID as f64;
            let cur = f(x);
            if cur == 0.0 {
                roots.push(x);
            } else if prev != 0.0 && (prev < 0.0) != (cur < 0.0) {
                roots.push(bisect(&f, prev_x, x, prev, tol));
            }
            prev_x = x;
            prev = cur;
        }
    }
    let mut clusters: Vec<f64> = Vec::new();
    for r in roots {
        let r = crate::linalg::frac(r);
        let dup = clusters.iter().any(|c| {
            let d = libm::fabs(r - c);
            d.min(1.0 - d) <= 10.0 * tol.max(1e-15)
        });
        if !dup {
            clusters.push(r);
        }
    }
    if clusters.len() != 2 {
        return Err(SurfaceError::WrongCount { found: clusters.len() });
    }
    clusters.sort_by(f64::total_cmp);
    Ok([clusters[0], clusters[1]])
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `(x, y) ↦ (g1(x), g2(y))` with class `diag(degree1, degree2)`.
pub fn product_map(g1: &CircleLift, g2: &CircleLift) -> TorusMap {
    let class = IntMatrix2::diagonal_signs(g1.degree() == 1, g2.degree() == 1);
    let mut terms = Vec::with_capacity(g1.terms.len() + g2.terms.len());
    for t in &g1.terms {
        terms.push(FourierTerm { k: [t.k as i64, 0], cos: [t.cos, 0.0], sin: [t.sin, 0.0] });
    }
    for t in &g2.terms {
        terms.push(FourierTerm { k: [0, t.k as i64], cos: [0.0, t.cos], sin: [0.0, t.sin] });
    }
    FourierMap::new(class, [g1.translation, g2.translation], terms)
        .expect("circle lifts are validated")
        .into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcg_algebra::lefschetz_number;
    use alloc::vec;

    fn sine(degree: i8, t: f64, s: f64) -> CircleLift {
        CircleLift::new(degree, t, vec![CircleTerm { k: 1, cos: 0.0, sin: s }]).unwrap()
    }

    #[test]
    fn rotation_numbers() {
        let r = circle_rotation_number(&CircleLift::rotation(0.3), 0.7, 1000).unwrap();
        assert!((r - 0.3).abs() < 1e-15);
        assert_eq!(circle_rotation_number(&CircleLift::rotation(0.0), 0.1, 10).unwrap(), 0.0);
        assert!(matches!(
            circle_rotation_number(&CircleLift::reflection(0.0), 0.0, 10),
            Err(SurfaceError::WrongDegree { .. })
        ));
    }

    #[test]
    fn rotation_number_scales_under_iteration() {
        let g = sine(1, 0.5, 0.1);
        let n = 20_000;
        let r1 = circle_rotation_number(&g, 0.0, n).unwrap();
        for k in [2, 3, 5] {
            let rk = circle_rotation_number(&Iterate { base: &g, count: k }, 0.0, n).unwrap();
            let diff = rk - k as f64 * r1;
            assert!((diff - libm::rint(diff)).abs() <= 3.0 / n as f64 * k as f64);
        }
    }

    #[test]
    fn reflection_fixed_points() {
        assert_eq!(reversing_fixed_points(&CircleLift::reflection(0.0), 1e-13).unwrap(), [0.0, 0.5]);
        let [a, b] = reversing_fixed_points(&sine(-1, 0.0, 0.2), 1e-13).unwrap();
        assert!(a.abs() < 1e-9 && (b - 0.5).abs() < 1e-9);
        let [a, b] = reversing_fixed_points(&CircleLift::reflection(0.3), 1e-13).unwrap();
        assert!((a - 0.15).abs() < 1e-9 && (b - 0.65).abs() < 1e-9);
    }

    #[test]
    fn wrong_root_count_is_reported() {
        assert!(matches!(
            reversing_fixed_points(&sine(-1, 0.0, 0.5), 1e-12),
            Err(SurfaceError::WrongCount { .. })
        ));
        assert!(sine(-1, 0.0, 0.5).screen_homeomorphism(64, 0.0).is_err());
        assert!(sine(-1, 0.0, 0.1).screen_homeomorphism(64, 0.0).is_ok());
        assert!(matches!(
            reversing_fixed_points(&CircleLift::rotation(0.1), 1e-12),
            Err(SurfaceError::WrongDegree { .. })
        ));
    }

    #[test]
    fn products() {
        let r = CircleLift::reflection(0.0);
        let p = product_map(&r, &r);
        assert_eq!(p.class(), IntMatrix2::MINUS_IDENTITY);
        assert_eq!(lefschetz_number(&p.class()), 4);
        let q = product_map(&r, &CircleLift::rotation(0.25));
        assert_eq!(lefschetz_number(&q.class()), 0);
        let id = product_map(&CircleLift::rotation(0.0), &CircleLift::rotation(0.0));
        assert!(id.class().is_identity());
        let g = sine(1, 0.1, 0.05);
        let h = sine(-1, 0.2, 0.03);
        let ph = product_map(&g, &h);
        let img = ph.evaluate([0.3, 0.8]).unwrap();
        assert!((img[0] - g.evaluate(0.3)).abs() < 1e-15 && (img[1] - h.evaluate(0.8)).abs() < 1e-15);
    }
}
