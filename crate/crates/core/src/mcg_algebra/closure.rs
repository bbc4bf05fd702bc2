use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{IntMatrix2, Letter, Word};

/// A group element together with one shortest word producing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub matrix: IntMatrix2,
    pub word: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureCaps {
    pub element_cap: usize,
    pub word_cap: usize,
}

impl Default for ClosureCaps {
    fn default() -> Self {
        ClosureCaps {
            element_cap: 10_000,
            word_cap: 12,
        }
    }
}

/// Outcome of the capped breadth-first closure. Elements are listed in BFS
/// order in both variants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Finite(Vec<GroupElement>),
    CapExceeded(Vec<GroupElement>),
}

impl Closure {
    pub fn elements(&self) -> &[GroupElement] {
        match self {
            Closure::Finite(e) | Closure::CapExceeded(e) => e,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Closure::Finite(_))
    }
}

/// Breadth-first closure of `gens` under right multiplication by the
/// generators and their inverses, starting from the identity.
///
/// Letters are tried in the order `g0, g0^-1, g1, g1^-1, ...`, so the
/// result is deterministic. An `i64` overflow counts as exceeding the caps.
pub fn closure(gens: &[IntMatrix2], caps: ClosureCaps) -> Closure {
    let letters: Vec<(Letter, IntMatrix2)> = gens
        .iter()
        .enumerate()
        .flat_map(|(i, g)| [(Letter::new(i, false), *g), (Letter::new(i, true), g.inverse())])
        .collect();

    let mut seen: BTreeSet<IntMatrix2> = BTreeSet::new();
    let mut elements = alloc::vec![GroupElement {
        matrix: IntMatrix2::IDENTITY,
        word: Word::empty(),
    }];
    seen.insert(IntMatrix2::IDENTITY);
    let mut frontier = 0..1;
    let mut depth = 0;

    loop {
        let mut grew = false;
        let mut overflow = false;
        let start = elements.len();
        for idx in frontier.clone() {
            for (letter, g) in &letters {
                let Some(p) = elements[idx].matrix.checked_mul(g) else {
                    overflow = true;
                    continue;
                };
                if seen.contains(&p) {
                    continue;
                }
                grew = true;
                if depth == caps.word_cap || elements.len() >= caps.element_cap {
                    // probing past the caps: a new element means not closed
                    return Closure::CapExceeded(elements);
                }
                seen.insert(p);
                let mut word = elements[idx].word.clone();
                word.push(*letter);
                elements.push(GroupElement { matrix: p, word });
            }
        }
        if overflow {
            return Closure::CapExceeded(elements);
        }
        if !grew {
            return Closure::Finite(elements);
        }
        frontier = start..elements.len();
        depth += 1;
    }
}
