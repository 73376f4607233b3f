//! The finite search universe: a closure indexed `0..n`, with sequents
//! over it packed into bitsets.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::syntax::{Formula, Logic, Sequent};

#[derive(Clone, Copy, Debug)]
pub(super) enum Shape {
    Atom,
    Top,
    Bot,
    And(usize, usize),
    Or(usize, usize),
    Un(usize),
    Im(usize),
    /// Argument and the index of `un` of the argument.
    Con(usize, usize),
    /// Argument and the index of its partner (`im`, or `un` in PKF).
    Det(usize, usize),
}

pub(super) struct Universe {
    pub formulas: Vec<Formula>,
    pub index: FxHashMap<Formula, usize>,
    pub shape: Vec<Shape>,
    pub un_of: Vec<Option<usize>>,
    pub im_of: Vec<Option<usize>>,
    pub words: usize,
}

impl Universe {
    pub fn new(logic: Logic, set: &BTreeSet<Formula>) -> Universe {
        let formulas: Vec<Formula> = set.iter().cloned().collect();
        let index: FxHashMap<Formula, usize> =
            formulas.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let at = |f: &Formula| index[f];
        let shape = formulas
            .iter()
            .map(|f| match f {
                Formula::Var(_) => Shape::Atom,
                Formula::Top => Shape::Top,
                Formula::Bot => Shape::Bot,
                Formula::And(a, b) => Shape::And(at(a), at(b)),
                Formula::Or(a, b) => Shape::Or(at(a), at(b)),
                Formula::Un(a) => Shape::Un(at(a)),
                Formula::Im(a) => Shape::Im(at(a)),
                Formula::Con(a) => Shape::Con(at(a), at(&Formula::Un(a.clone()))),
                Formula::Det(a) => Shape::Det(at(a), at(&logic.det_partner(a))),
            })
            .collect();
        let lookup = |f: Formula| index.get(&f).copied();
        let un_of = formulas.iter().map(|f| lookup(Formula::un(f.clone()))).collect();
        let im_of = formulas.iter().map(|f| lookup(Formula::im(f.clone()))).collect();
        let words = formulas.len().div_ceil(64).max(1);
        Universe { formulas, index, shape, un_of, im_of, words }
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn key(&self, s: &Sequent) -> Key {
        let mut k = Key::empty(self.words);
        for f in &s.left {
            k.set(self.words, Side::L, self.index[f]);
        }
        for f in &s.right {
            k.set(self.words, Side::R, self.index[f]);
        }
        k
    }

    pub fn sequent(&self, k: &Key) -> Sequent {
        Sequent {
            left: k.iter(self.words, Side::L).map(|i| self.formulas[i].clone()).collect(),
            right: k.iter(self.words, Side::R).map(|i| self.formulas[i].clone()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Side {
    L,
    R,
}

/// Left bits in the first `words` words, right bits in the rest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(super) struct Key(Box<[u64]>);

impl Key {
    pub fn empty(words: usize) -> Key {
        Key(vec![0; 2 * words].into_boxed_slice())
    }

    fn slot(words: usize, side: Side, i: usize) -> (usize, u64) {
        let base = if side == Side::L { 0 } else { words };
        (base + i / 64, 1 << (i % 64))
    }

    pub fn has(&self, words: usize, side: Side, i: usize) -> bool {
        let (w, b) = Key::slot(words, side, i);
        self.0[w] & b != 0
    }

    pub fn set(&mut self, words: usize, side: Side, i: usize) {
        let (w, b) = Key::slot(words, side, i);
        self.0[w] |= b;
    }

    pub fn with(&self, words: usize, adds: &[(Side, usize)]) -> Key {
        let mut k = self.clone();
        for &(side, i) in adds {
            k.set(words, side, i);
        }
        k
    }

    pub fn iter(&self, words: usize, side: Side) -> impl Iterator<Item = usize> + '_ {
        let base = if side == Side::L { 0 } else { words };
        self.0[base..base + words].iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + t)
            })
        })
    }

    /// Some formula on both sides.
    pub fn overlaps(&self, words: usize) -> bool {
        (0..words).any(|w| self.0[w] & self.0[words + w] != 0)
    }

    pub fn is_subset(&self, other: &Key) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    /// Formulas of `self` missing from `other`, per side.
    pub fn minus(&self, other: &Key, words: usize, side: Side) -> Vec<usize> {
        self.iter(words, side).filter(|&i| !other.has(words, side, i)).collect()
    }
}
