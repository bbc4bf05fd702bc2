//! Small fixed-size real linear algebra used by the numerical modules.

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(s: f64, a: Vec2) -> Vec2 {
    [s * a[0], s * a[1]]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    libm::hypot(a[0], a[1])
}

#[inline]
pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub fn mat_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

#[inline]
pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Inverse, or `None` when `|det| <= min_det`.
pub fn inverse(m: &Mat2, min_det: f64) -> Option<Mat2> {
    let d = det(m);
    if !(libm::fabs(d) > min_det) {
        return None;
    }
    Some([
        [m[1][1] / d, -m[0][1] / d],
        [-m[1][0] / d, m[0][0] / d],
    ])
}

/// Solves `m x = b`.
pub fn solve(m: &Mat2, b: Vec2, min_det: f64) -> Option<Vec2> {
    inverse(m, min_det).map(|inv| mat_vec(&inv, b))
}

/// Singular values `(σ_max, σ_min)` of a 2x2 matrix in closed form.
pub fn singular_values(m: &Mat2) -> (f64, f64) {
    let fro2 = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    let d = libm::fabs(det(m));
    let disc = libm::sqrt((fro2 * fro2 - 4.0 * d * d).max(0.0));
    let smax = libm::sqrt((fro2 + disc) / 2.0);
    // σ_min = |det| / σ_max avoids cancellation
    let smin = if smax > 0.0 { d / smax } else { 0.0 };
    (smax, smin)
}

pub fn spectral_norm(m: &Mat2) -> f64 {
    singular_values(m).0
}

/// Reduction of a real number to `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - libm::floor(x);
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[inline]
pub fn reduce_torus(x: Vec2) -> Vec2 {
    [frac(x[0]), frac(x[1])]
}

/// Signed distance from `x` to the nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    x - libm::rint(x)
}

/// Euclidean distance on `R^2 / Z^2`.
pub fn torus_distance(a: Vec2, b: Vec2) -> f64 {
    libm::hypot(wrap_centered(a[0] - b[0]), wrap_centered(a[1] - b[1]))
}

/// Neumaier-compensated running sum of 2-vectors.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Vec2,
    comp: Vec2,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Vec2) {
        for i in 0..2 {
            let t = self.sum[i] + v[i];
            if libm::fabs(self.sum[i]) >= libm::fabs(v[i]) {
                self.comp[i] += (self.sum[i] - t) + v[i];
            } else {
                self.comp[i] += (v[i] - t) + self.sum[i];
            }
            self.sum[i] = t;
        }
    }

    pub fn value(&self) -> Vec2 {
        add(self.sum, self.comp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_symmetric() {
        // symmetric matrix: singular values are |eigenvalues|
        let (smax, smin) = singular_values(&[[0.0, 1.0], [1.0, 1.0]]);
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        assert!((smax - phi).abs() < 1e-15);
        assert!((smin - (phi - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn frac_edges() {
        assert_eq!(frac(-1e-20), 0.0);
        assert_eq!(frac(2.0), 0.0);
        assert!((frac(-0.25) - 0.75).abs() < 1e-16);
        assert!((torus_distance([0.99, 0.0], [0.01, 0.0]) - 0.02).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let mut s = CompensatedSum::new();
        for _ in 0..1000 {
            s.add([0.1, 1e-17]);
        }
        assert!((s.value()[0] - 100.0).abs() < 1e-13);
    }
}
