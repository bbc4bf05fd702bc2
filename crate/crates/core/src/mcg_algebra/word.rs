use alloc::vec::Vec;
use core::fmt;

use super::IntMatrix2;

/// One letter of a word: a generator index, possibly inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Signed 1-based encoding: generator `i` is `i + 1`, its inverse `-(i + 1)`.
    pub fn to_signed(self) -> i64 {
        let v = self.generator as i64 + 1;
        if self.inverse {
            -v
        } else {
            v
        }
    }

    pub fn from_signed(v: i64) -> Option<Self> {
        if v == 0 {
            return None;
        }
        Some(Letter {
            generator: (v.unsigned_abs() - 1) as usize,
            inverse: v < 0,
        })
    }
}

/// A word in the generators, read left to right as a product
/// `w[0] * w[1] * ... * w[n-1]` (for maps: composition, rightmost applied first).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Word(alloc::vec![Letter::new(i, false)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn then(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).reduced()
    }

    pub fn push(&mut self, letter: Letter) {
        if self.0.last() == Some(&letter.inverted()) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    /// `self^k`; negative `k` repeats the inverse word.
    pub fn power(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            for &l in base.letters() {
                out.push(l);
            }
        }
        out
    }

    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.then(y).then(&x.inverse()).then(&y.inverse())
    }

    /// Cancels adjacent `g g^-1` pairs.
    pub fn reduced(&self) -> Word {
        let mut out = Word::empty();
        for &l in &self.0 {
            out.push(l);
        }
        out
    }

    /// Left-to-right product over any monoid-like structure.
    pub fn fold<T, F>(&self, identity: T, mut step: F) -> T
    where
        F: FnMut(T, Letter) -> T,
    {
        self.0.iter().fold(identity, |acc, &l| step(acc, l))
    }

    /// Evaluates the word on integer matrices; `None` on overflow or a
    /// generator index out of range.
    pub fn evaluate(&self, gens: &[IntMatrix2]) -> Option<IntMatrix2> {
        let mut acc = IntMatrix2::IDENTITY;
        for l in &self.0 {
            let g = gens.get(l.generator)?;
            let g = if l.inverse { g.inverse() } else { *g };
            acc = acc.checked_mul(&g)?;
        }
        Some(acc)
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.0.iter().map(|l| l.to_signed()).collect()
    }

    pub fn from_signed(v: &[i64]) -> Option<Word> {
        v.iter()
            .map(|&x| Letter::from_signed(x))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "g{}", l.generator)?;
            if l.inverse {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}
