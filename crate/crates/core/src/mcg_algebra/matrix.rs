use core::fmt;
use core::ops::{Mul, Neg};

use super::McgError;

/// An element of GL(2,Z), stored row-major as `[[a, b], [c, d]]`.
///
/// The determinant is always `+1` or `-1`; [`IntMatrix2::new`] rejects
/// anything else. The derived ordering is lexicographic in `(a, b, c, d)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix2 {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2 { a: 1, b: 0, c: 0, d: 1 };
    pub const MINUS_IDENTITY: IntMatrix2 = IntMatrix2 { a: -1, b: 0, c: 0, d: -1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, McgError> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 && det != -1 {
            return Err(McgError::NotUnimodular { det });
        }
        Ok(IntMatrix2 { a, b, c, d })
    }

    pub fn from_rows(rows: [[i64; 2]; 2]) -> Result<Self, McgError> {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub const fn diagonal_signs(p: bool, q: bool) -> Self {
        IntMatrix2 {
            a: if p { 1 } else { -1 },
            b: 0,
            c: 0,
            d: if q { 1 } else { -1 },
        }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Always `+1` or `-1`.
    pub fn det(&self) -> i64 {
        ((self.a as i128) * (self.d as i128) - (self.b as i128) * (self.c as i128)) as i64
    }

    pub fn trace(&self) -> i64 {
        self.a.saturating_add(self.d)
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        *self == Self::IDENTITY || *self == Self::MINUS_IDENTITY
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.det() == 1
    }

    /// Exact inverse; entries of a unimodular inverse are integers.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        IntMatrix2 {
            a: det * self.d,
            b: -det * self.b,
            c: -det * self.c,
            d: det * self.a,
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        let dot = |x: i64, y: i64, z: i64, w: i64| -> Option<i64> {
            x.checked_mul(y)?.checked_add(z.checked_mul(w)?)
        };
        Some(IntMatrix2 {
            a: dot(self.a, rhs.a, self.b, rhs.c)?,
            b: dot(self.a, rhs.b, self.b, rhs.d)?,
            c: dot(self.c, rhs.a, self.d, rhs.c)?,
            d: dot(self.c, rhs.b, self.d, rhs.d)?,
        })
    }

    /// `self^k` for any integer `k`, or `None` on overflow.
    pub fn checked_pow(&self, k: i64) -> Option<Self> {
        let base = if k < 0 { self.inverse() } else { *self };
        let mut exp = k.unsigned_abs();
        let mut acc = Self::IDENTITY;
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Some(acc)
    }

    /// Group commutator `[self, other] = self * other * self^-1 * other^-1`.
    pub fn checked_commutator(&self, other: &Self) -> Option<Self> {
        self.checked_mul(other)?
            .checked_mul(&self.inverse())?
            .checked_mul(&other.inverse())
    }

    pub fn apply(&self, v: [i64; 2]) -> [i64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn apply_f64(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a as f64 * v[0] + self.b as f64 * v[1],
            self.c as f64 * v[0] + self.d as f64 * v[1],
        ]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.a as f64, self.b as f64],
            [self.c as f64, self.d as f64],
        ]
    }
}

impl Mul for IntMatrix2 {
    type Output = IntMatrix2;

    /// Panics on `i64` overflow; use [`IntMatrix2::checked_mul`] where entries may grow.
    fn mul(self, rhs: IntMatrix2) -> IntMatrix2 {
        self.checked_mul(&rhs).expect("IntMatrix2 multiplication overflow")
    }
}

impl Neg for IntMatrix2 {
    type Output = IntMatrix2;
    fn neg(self) -> IntMatrix2 {
        IntMatrix2 {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

impl fmt::Debug for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Lefschetz number of a torus map in the class `m`: `det(Id - m) = 1 - tr(m) + det(m)`.
pub fn lefschetz_number(m: &IntMatrix2) -> i64 {
    1 - m.trace() + m.det()
}

/// `true` iff 1 is an eigenvalue of `m`, i.e. iff the characteristic
/// polynomial vanishes at 1.
pub fn has_one_in_spectrum(m: &IntMatrix2) -> bool {
    // char poly at 1: 1 - tr + det
    1 - m.trace() + m.det() == 0
}

/// Type of an element of GL(2,Z) by its action on the projective line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementType {
    /// Exact order in GL(2,Z); always one of 1, 2, 3, 4, 6.
    FiniteOrder(u32),
    Parabolic,
    Hyperbolic,
}

impl ElementType {
    pub fn is_finite(&self) -> bool {
        matches!(self, ElementType::FiniteOrder(_))
    }
}

pub fn classify_element(m: &IntMatrix2) -> ElementType {
    let mut p = *m;
    for n in 1..=6u32 {
        if p.is_identity() {
            return ElementType::FiniteOrder(n);
        }
        p = match p.checked_mul(m) {
            Some(q) => q,
            None => break,
        };
    }
    if m.det() == 1 && m.trace().abs() == 2 {
        ElementType::Parabolic
    } else {
        ElementType::Hyperbolic
    }
}

/// The eight matrices of the dihedral group of order 8 that every
/// non-abelian nilpotent subgroup of GL(2,Z) is rationally conjugate to.
pub const DIHEDRAL_H: [IntMatrix2; 8] = [
    IntMatrix2 { a: 1, b: 0, c: 0, d: 1 },
    IntMatrix2 { a: -1, b: 0, c: 0, d: -1 },
    IntMatrix2 { a: 1, b: 0, c: 0, d: -1 },
    IntMatrix2 { a: -1, b: 0, c: 0, d: 1 },
    IntMatrix2 { a: 0, b: -1, c: 1, d: 0 },
    IntMatrix2 { a: 0, b: 1, c: -1, d: 0 },
    IntMatrix2 { a: 0, b: 1, c: 1, d: 0 },
    IntMatrix2 { a: 0, b: -1, c: -1, d: 0 },
];

pub fn in_dihedral_h(m: &IntMatrix2) -> bool {
    DIHEDRAL_H.contains(m)
}
