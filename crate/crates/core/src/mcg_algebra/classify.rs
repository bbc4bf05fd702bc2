//! Classification of nilpotent subgroups of GL(2,Z).
//!
//! Every nilpotent subgroup is `<N>`, `<N, -N>`, or rationally conjugate to
//! the dihedral group [`DIHEDRAL_H`]. In all three shapes every commutator
//! is `±Id`, which is central, so "all pairwise generator commutators lie in
//! `{Id, -Id}`" is an exact test for nilpotency (class at most 2). The shape
//! is then recovered from the capped closure and certified by re-expressing
//! every generator.

use alloc::vec::Vec;

use num_integer::Integer;

use super::{
    classify_element, closure, has_one_in_spectrum, in_dihedral_h, Closure, ClosureCaps,
    ElementType, GroupElement, IntMatrix2, McgError, RatMatrix2, Rational, Word, DIHEDRAL_H,
};

/// A generator written as `sign * N^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedPower {
    pub sign: i8,
    pub exponent: i64,
}

/// A group element with its word and its image `P^-1 g P` in the dihedral table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DihedralEntry {
    pub matrix: IntMatrix2,
    pub word: Word,
    pub normal_form: IntMatrix2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Obstruction {
    /// A commutator of two generators is neither `Id` nor `-Id`.
    CommutatorNotCentral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconclusiveReason {
    /// The capped closure contains no infinite-order element.
    NoInfiniteOrderElement,
    /// No infinite-order element of the closure expresses every generator as `±N^k`.
    NoCertifyingRoot { candidates_tried: usize },
    /// A finite closure of an order no nilpotent shape explains.
    UnrecognizedFiniteGroup { order: usize },
    /// Integer overflow while evaluating the commutator test.
    Overflow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McgClassification {
    Trivial,
    Cyclic {
        root: IntMatrix2,
        root_word: Word,
        powers: Vec<SignedPower>,
    },
    PlusMinusCyclic {
        root: IntMatrix2,
        root_word: Word,
        minus_identity_word: Word,
        powers: Vec<SignedPower>,
    },
    DihedralH {
        conjugator: RatMatrix2,
        table: Vec<DihedralEntry>,
    },
    NotNilpotent {
        witness: Word,
        value: IntMatrix2,
        obstruction: Obstruction,
    },
    Inconclusive(InconclusiveReason),
}

impl McgClassification {
    pub fn tag(&self) -> &'static str {
        match self {
            McgClassification::Trivial => "trivial",
            McgClassification::Cyclic { .. } => "cyclic",
            McgClassification::PlusMinusCyclic { .. } => "plus-minus-cyclic",
            McgClassification::DihedralH { .. } => "dihedral-h",
            McgClassification::NotNilpotent { .. } => "not-nilpotent",
            McgClassification::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        matches!(
            self,
            McgClassification::Trivial
                | McgClassification::Cyclic { .. }
                | McgClassification::PlusMinusCyclic { .. }
                | McgClassification::DihedralH { .. }
        )
    }
}

pub fn classify_nilpotent_subgroup(
    gens: &[IntMatrix2],
    caps: ClosureCaps,
) -> Result<McgClassification, McgError> {
    if gens.is_empty() {
        return Err(McgError::EmptyGenerators);
    }

    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            let Some(c) = gens[i].checked_commutator(&gens[j]) else {
                return Ok(McgClassification::Inconclusive(InconclusiveReason::Overflow));
            };
            if !c.is_plus_minus_identity() {
                return Ok(McgClassification::NotNilpotent {
                    witness: Word::commutator(&Word::generator(i), &Word::generator(j)),
                    value: c,
                    obstruction: Obstruction::CommutatorNotCentral,
                });
            }
        }
    }

    match closure(gens, caps) {
        Closure::Finite(elements) => Ok(classify_finite(gens, &elements)),
        Closure::CapExceeded(partial) => Ok(classify_infinite(gens, &partial)),
    }
}

fn classify_finite(gens: &[IntMatrix2], elements: &[GroupElement]) -> McgClassification {
    let order = elements.len();
    if order == 1 {
        return McgClassification::Trivial;
    }

    for n in elements {
        if let ElementType::FiniteOrder(k) = classify_element(&n.matrix) {
            if k as usize == order {
                let powers = gens
                    .iter()
                    .map(|g| finite_exponent(&n.matrix, k, g, 1))
                    .collect::<Option<Vec<_>>>();
                if let Some(powers) = powers {
                    return McgClassification::Cyclic {
                        root: n.matrix,
                        root_word: n.word.clone(),
                        powers,
                    };
                }
            }
        }
    }

    let minus = elements
        .iter()
        .find(|e| e.matrix == IntMatrix2::MINUS_IDENTITY);
    if let Some(minus) = minus {
        for n in elements {
            let ElementType::FiniteOrder(k) = classify_element(&n.matrix) else {
                continue;
            };
            // <N> and -<N> disjoint and covering the group
            if 2 * k as usize != order {
                continue;
            }
            let covers = elements.iter().all(|e| {
                finite_exponent(&n.matrix, k, &e.matrix, 1).is_some()
                    || finite_exponent(&n.matrix, k, &e.matrix, -1).is_some()
            });
            if !covers {
                continue;
            }
            let powers = gens
                .iter()
                .map(|g| {
                    finite_exponent(&n.matrix, k, g, 1).or_else(|| finite_exponent(&n.matrix, k, g, -1))
                })
                .collect::<Option<Vec<_>>>();
            if let Some(powers) = powers {
                return McgClassification::PlusMinusCyclic {
                    root: n.matrix,
                    root_word: n.word.clone(),
                    minus_identity_word: minus.word.clone(),
                    powers,
                };
            }
        }
    }

    if order == 8 {
        let mats: Vec<IntMatrix2> = elements.iter().map(|e| e.matrix).collect();
        if let Ok(p) = conjugate_to_h(&mats) {
            let table = elements
                .iter()
                .map(|e| DihedralEntry {
                    matrix: e.matrix,
                    word: e.word.clone(),
                    normal_form: p.conjugate(&e.matrix).to_int().expect("verified by conjugate_to_h"),
                })
                .collect();
            return McgClassification::DihedralH {
                conjugator: p,
                table,
            };
        }
    }

    McgClassification::Inconclusive(InconclusiveReason::UnrecognizedFiniteGroup { order })
}

fn finite_exponent(n: &IntMatrix2, order: u32, g: &IntMatrix2, sign: i8) -> Option<SignedPower> {
    let target = if sign < 0 { -*g } else { *g };
    let mut p = IntMatrix2::IDENTITY;
    for k in 0..order {
        if p == target {
            return Some(SignedPower {
                sign,
                exponent: k as i64,
            });
        }
        p = p.checked_mul(n)?;
    }
    None
}

fn classify_infinite(gens: &[IntMatrix2], partial: &[GroupElement]) -> McgClassification {
    let mut candidates: Vec<&GroupElement> = partial
        .iter()
        .filter(|e| !classify_element(&e.matrix).is_finite())
        .collect();
    if candidates.is_empty() {
        return McgClassification::Inconclusive(InconclusiveReason::NoInfiniteOrderElement);
    }
    candidates.sort_by(|x, y| {
        let key = |e: &GroupElement| (e.matrix.trace().abs(), e.matrix.max_abs_entry());
        key(x)
            .cmp(&key(y))
            .then_with(|| x.word.cmp(&y.word))
            .then_with(|| x.matrix.cmp(&y.matrix))
    });

    for n in &candidates {
        let powers = gens
            .iter()
            .map(|g| signed_power_of(&n.matrix, g))
            .collect::<Option<Vec<_>>>();
        let Some(powers) = powers else { continue };

        match powers.iter().position(|p| p.sign < 0) {
            None => {
                return McgClassification::Cyclic {
                    root: n.matrix,
                    root_word: n.word.clone(),
                    powers,
                }
            }
            Some(i) => {
                // -Id = g_i * N^(-k_i)
                let minus_identity_word =
                    Word::generator(i).then(&n.word.power(-powers[i].exponent));
                return McgClassification::PlusMinusCyclic {
                    root: n.matrix,
                    root_word: n.word.clone(),
                    minus_identity_word,
                    powers,
                };
            }
        }
    }
    McgClassification::Inconclusive(InconclusiveReason::NoCertifyingRoot {
        candidates_tried: candidates.len(),
    })
}

/// Finds `(s, k)` with `g = s * N^k` for an infinite-order `N`, or `None`.
///
/// The search is exhaustive: for hyperbolic `N` with eigenvalue `|λ| > 1`,
/// `|tr N^k| ≥ |λ|^|k| - 1`, so once `|tr N^k| > |tr g| + 2` no larger
/// exponent can match. For parabolic `N = ±(Id + M)` with `M^2 = 0`,
/// `‖N^k‖∞ ≥ |k| - 1`, which bounds `|k|` by `‖g‖∞ + 1`.
pub fn signed_power_of(n: &IntMatrix2, g: &IntMatrix2) -> Option<SignedPower> {
    let kind = classify_element(n);
    if kind.is_finite() {
        return None;
    }
    let inv = n.inverse();
    let mut fwd = IntMatrix2::IDENTITY;
    let mut bwd = IntMatrix2::IDENTITY;
    let mut k: i64 = 0;
    loop {
        for (p, e) in [(fwd, k), (bwd, -k)] {
            if p == *g {
                return Some(SignedPower { sign: 1, exponent: e });
            }
            if -p == *g {
                return Some(SignedPower { sign: -1, exponent: e });
            }
        }
        let exhausted = match kind {
            ElementType::Parabolic => k > g.max_abs_entry() + 1,
            _ => k >= 1 && fwd.trace().abs() > g.trace().abs() + 2,
        };
        if exhausted {
            return None;
        }
        fwd = fwd.checked_mul(n)?;
        bwd = bwd.checked_mul(&inv)?;
        k += 1;
    }
}

/// Rational conjugator `P` with `P^-1 g P ∈ H` for all eight inputs.
///
/// Uses an order-4 element `A` (`A^2 = -Id`) and a reflection `B`
/// (`det B = -1`, `B^2 = Id`) anticommuting with it. The columns of `P`
/// start as primitive integer eigenvectors of `B` for `+1` and `-1`
/// (positive first nonzero entry); the second column is then rescaled so
/// the conjugate of `A` is exactly `[[0, -1], [1, 0]]`.
pub fn conjugate_to_h(elements: &[IntMatrix2]) -> Result<RatMatrix2, McgError> {
    if elements.len() != 8 {
        return Err(McgError::NotDihedral("expected 8 elements"));
    }
    for (i, x) in elements.iter().enumerate() {
        if elements[..i].contains(x) {
            return Err(McgError::NotDihedral("repeated element"));
        }
    }
    for x in elements {
        for y in elements {
            match x.checked_mul(y) {
                Some(p) if elements.contains(&p) => {}
                _ => return Err(McgError::NotDihedral("not closed under multiplication")),
            }
        }
    }

    let minus = IntMatrix2::MINUS_IDENTITY;
    let a = elements
        .iter()
        .find(|x| **x * **x == minus)
        .ok_or(McgError::NotDihedral("no element with A^2 = -Id"))?;
    let b = elements
        .iter()
        .find(|x| x.det() == -1 && (**x * **x).is_identity() && *a * **x == -(**x * *a))
        .ok_or(McgError::NotDihedral("no reflection anticommuting with A"))?;

    let plus_vec = kernel_vector(&[[b.a() - 1, b.b()], [b.c(), b.d() - 1]]);
    let minus_vec = kernel_vector(&[[b.a() + 1, b.b()], [b.c(), b.d() + 1]]);
    let p0 = RatMatrix2::from_columns(plus_vec, minus_vec)?;

    // P0^-1 A P0 = [[0, beta], [alpha, 0]] with alpha * beta = -1
    let beta = p0.conjugate(a).entries()[0][1];
    if beta == Rational::from(0) {
        return Err(McgError::NotDihedral("A does not swap the eigenlines of B"));
    }
    let p = p0.scale_column(1, -Rational::from(1) / beta);

    let mut images = Vec::with_capacity(8);
    for g in elements {
        let c = p.conjugate(g).to_int();
        match c {
            Some(c) if in_dihedral_h(&c) && !images.contains(&c) => images.push(c),
            _ => return Err(McgError::NotDihedral("conjugates do not match H")),
        }
    }
    debug_assert!(DIHEDRAL_H.iter().all(|h| images.contains(h)));
    Ok(p)
}

/// Primitive integer vector spanning the kernel of a rank-one integer matrix,
/// normalized to a positive first nonzero entry.
fn kernel_vector(m: &[[i64; 2]; 2]) -> [i128; 2] {
    let row = if m[0] != [0, 0] { m[0] } else { m[1] };
    let (p, q) = (row[0] as i128, row[1] as i128);
    let mut v = [q, -p];
    let g = v[0].gcd(&v[1]);
    if g != 0 {
        v = [v[0] / g, v[1] / g];
    }
    let lead = if v[0] != 0 { v[0] } else { v[1] };
    if lead < 0 {
        v = [-v[0], -v[1]];
    }
    v
}

/// The element of finite index with `det = 1` and `1 ∉ spec` used to seed
/// the fixed-point construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialElement {
    pub matrix: IntMatrix2,
    pub word: Word,
}

/// Picks `B` by the shape of the group: `N` or `N^2` for `<N>` (depending on
/// orientation), whichever of `±N^2` avoids the eigenvalue 1 for `<N, -N>`,
/// and `-Id` for the dihedral shape.
pub fn select_special_element(class: &McgClassification) -> Result<SpecialElement, McgError> {
    let candidate = match class {
        McgClassification::Cyclic { root, root_word, .. } => {
            if root.det() == 1 {
                SpecialElement {
                    matrix: *root,
                    word: root_word.clone(),
                }
            } else {
                SpecialElement {
                    matrix: root.checked_mul(root).ok_or(McgError::Overflow)?,
                    word: root_word.power(2),
                }
            }
        }
        McgClassification::PlusMinusCyclic {
            root,
            root_word,
            minus_identity_word,
            ..
        } => {
            let sq = root.checked_mul(root).ok_or(McgError::Overflow)?;
            if !has_one_in_spectrum(&sq) {
                SpecialElement {
                    matrix: sq,
                    word: root_word.power(2),
                }
            } else {
                SpecialElement {
                    matrix: -sq,
                    word: minus_identity_word.then(&root_word.power(2)),
                }
            }
        }
        McgClassification::DihedralH { table, .. } => {
            let e = table
                .iter()
                .find(|e| e.matrix == IntMatrix2::MINUS_IDENTITY)
                .ok_or(McgError::NotDihedral("table lacks -Id"))?;
            SpecialElement {
                matrix: e.matrix,
                word: e.word.clone(),
            }
        }
        McgClassification::Trivial => return Err(McgError::NoSpecialElement),
        McgClassification::NotNilpotent { .. } | McgClassification::Inconclusive(_) => {
            return Err(McgError::NotClassified)
        }
    };
    if candidate.matrix.det() != 1 || has_one_in_spectrum(&candidate.matrix) {
        return Err(McgError::NoSpecialElement);
    }
    Ok(candidate)
}
