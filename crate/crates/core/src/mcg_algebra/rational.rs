use core::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::{IntMatrix2, McgError};

pub type Rational = Ratio<i128>;

/// An invertible 2x2 matrix over Q. `Ratio` keeps every entry in lowest
/// terms with a positive denominator, so equal rationals compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RatMatrix2 {
    m: [[Rational; 2]; 2],
}

impl RatMatrix2 {
    pub fn new(m: [[Rational; 2]; 2]) -> Result<Self, McgError> {
        let r = RatMatrix2 { m };
        if r.det().is_zero() {
            return Err(McgError::SingularRational);
        }
        Ok(r)
    }

    pub fn identity() -> Self {
        RatMatrix2::from_int(&IntMatrix2::IDENTITY)
    }

    pub fn from_int(a: &IntMatrix2) -> Self {
        let r = a.rows();
        RatMatrix2 {
            m: [
                [Rational::from(r[0][0] as i128), Rational::from(r[0][1] as i128)],
                [Rational::from(r[1][0] as i128), Rational::from(r[1][1] as i128)],
            ],
        }
    }

    pub fn from_columns(u: [i128; 2], v: [i128; 2]) -> Result<Self, McgError> {
        RatMatrix2::new([
            [Rational::from(u[0]), Rational::from(v[0])],
            [Rational::from(u[1]), Rational::from(v[1])],
        ])
    }

    pub fn entries(&self) -> [[Rational; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> Rational {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Rational {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        RatMatrix2 {
            m: [
                [self.m[1][1] / det, -self.m[0][1] / det],
                [-self.m[1][0] / det, self.m[0][0] / det],
            ],
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[Rational::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        RatMatrix2 { m: out }
    }

    pub fn scale_column(&self, j: usize, s: Rational) -> Self {
        let mut out = self.m;
        out[0][j] *= s;
        out[1][j] *= s;
        RatMatrix2 { m: out }
    }

    /// `P^-1 * g * P` for `P = self`.
    pub fn conjugate(&self, g: &IntMatrix2) -> RatMatrix2 {
        self.inverse().mul(&RatMatrix2::from_int(g)).mul(self)
    }

    /// Integer matrix if every entry is integral and the determinant is ±1.
    pub fn to_int(&self) -> Option<IntMatrix2> {
        let mut e = [[0i64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let x = self.m[i][j];
                if !x.denom().is_one() {
                    return None;
                }
                e[i][j] = i64::try_from(*x.numer()).ok()?;
            }
        }
        IntMatrix2::from_rows(e).ok()
    }
}

impl fmt::Debug for RatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}
