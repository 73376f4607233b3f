//! Finite Kripke models and the two-valued semantics of the negative
//! modalities.
//!
//! Worlds are `0..n` with `n <= 64`, so a set of worlds fits in one `u64`
//! and every formula evaluates to a mask of the worlds where it holds.

mod enumerate;
mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Formula, Logic, Sequent};

pub use enumerate::{countermodel_search, for_each_frame, frames, Countermodel};
pub use io::ModelFile;

/// Upper bound on the number of worlds in a frame.
pub const MAX_WORLDS: usize = 64;

/// A set of worlds as a bitmask.
pub type WorldSet = u64;

pub fn all_worlds(n: usize) -> WorldSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KripkeError {
    #[error("a frame needs at least one world")]
    NoWorlds,
    #[error("frames are limited to {MAX_WORLDS} worlds, got {0}")]
    TooManyWorlds(usize),
    #[error("world {world} out of range for a frame with {worlds} worlds")]
    WorldOutOfRange { world: usize, worlds: usize },
    #[error("`{0}` is not a valid variable name")]
    InvalidVariable(String),
    #[error("malformed model file: {0}")]
    Malformed(String),
}

/// Worlds `0..world_count` and an accessibility relation, stored as one
/// successor mask per world.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    world_count: usize,
    succ: Vec<WorldSet>,
}

impl Frame {
    pub fn new<I>(world_count: usize, edges: I) -> Result<Frame, KripkeError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut frame = Frame::empty(world_count)?;
        for (a, b) in edges {
            for w in [a, b] {
                if w >= world_count {
                    return Err(KripkeError::WorldOutOfRange { world: w, worlds: world_count });
                }
            }
            frame.succ[a] |= 1 << b;
        }
        Ok(frame)
    }

    pub fn empty(world_count: usize) -> Result<Frame, KripkeError> {
        if world_count == 0 {
            return Err(KripkeError::NoWorlds);
        }
        if world_count > MAX_WORLDS {
            return Err(KripkeError::TooManyWorlds(world_count));
        }
        Ok(Frame { world_count, succ: vec![0; world_count] })
    }

    pub(crate) fn from_masks(succ: Vec<WorldSet>) -> Frame {
        Frame { world_count: succ.len(), succ }
    }

    pub fn world_count(&self) -> usize {
        self.world_count
    }

    pub fn worlds(&self) -> std::ops::Range<usize> {
        0..self.world_count
    }

    pub fn successors(&self, w: usize) -> WorldSet {
        self.succ[w]
    }

    pub fn successor_list(&self, w: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.succ[w];
        (0..self.world_count).filter(move |v| mask >> v & 1 == 1)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a] >> b & 1 == 1
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.worlds().flat_map(|a| self.successor_list(a).map(move |b| (a, b))).collect()
    }

    pub fn check(&self, class: FrameClass) -> bool {
        let n = self.world_count;
        let rows = &self.succ;
        let each = |w: WorldSet| (0..n).filter(move |i| w >> i & 1 == 1);
        match class {
            FrameClass::All => true,
            FrameClass::Serial => rows.iter().all(|&r| r != 0),
            FrameClass::Reflexive => (0..n).all(|i| rows[i] >> i & 1 == 1),
            FrameClass::Functional => rows.iter().all(|r| r.count_ones() == 1),
            FrameClass::Symmetric => (0..n).all(|i| each(rows[i]).all(|j| rows[j] >> i & 1 == 1)),
            FrameClass::Euclidean => (0..n).all(|u| each(rows[u]).all(|v| rows[u] & !rows[v] == 0)),
            FrameClass::Transitive => (0..n).all(|u| each(rows[u]).all(|v| rows[v] & !rows[u] == 0)),
            FrameClass::ChurchRosser => (0..n).all(|u| {
                each(rows[u]).all(|v| each(rows[u]).all(|w| rows[v] & rows[w] != 0))
            }),
        }
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({} worlds, {:?})", self.world_count, self.edges())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameClass {
    All,
    Serial,
    Reflexive,
    Functional,
    Symmetric,
    Euclidean,
    Transitive,
    ChurchRosser,
}

impl FrameClass {
    pub const ALL: [FrameClass; 8] = [
        FrameClass::All,
        FrameClass::Serial,
        FrameClass::Reflexive,
        FrameClass::Functional,
        FrameClass::Symmetric,
        FrameClass::Euclidean,
        FrameClass::Transitive,
        FrameClass::ChurchRosser,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::All => "all",
            FrameClass::Serial => "serial",
            FrameClass::Reflexive => "reflexive",
            FrameClass::Functional => "functional",
            FrameClass::Symmetric => "symmetric",
            FrameClass::Euclidean => "euclidean",
            FrameClass::Transitive => "transitive",
            FrameClass::ChurchRosser => "church-rosser",
        }
    }

    /// The frame class characterizing a logic.
    pub fn of(logic: Logic) -> FrameClass {
        match logic {
            Logic::PK => FrameClass::All,
            Logic::PKD => FrameClass::Serial,
            Logic::PKT => FrameClass::Reflexive,
            Logic::PKF => FrameClass::Functional,
            Logic::PKB => FrameClass::Symmetric,
        }
    }
}

pub fn frame_class_check(frame: &Frame, class: FrameClass) -> bool {
    frame.check(class)
}

/// A frame with a two-valued valuation on variables. Unlisted
/// `(world, variable)` pairs are false.
#[derive(Clone, PartialEq, Eq)]
pub struct Model {
    pub frame: Frame,
    valuation: BTreeMap<Arc<str>, WorldSet>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Model({})", self.to_json())
    }
}

impl Model {
    pub fn new(frame: Frame) -> Model {
        Model { frame, valuation: BTreeMap::new() }
    }

    /// Set `var` true exactly at `worlds`.
    pub fn with_var<I>(mut self, var: &str, worlds: I) -> Result<Model, KripkeError>
    where
        I: IntoIterator<Item = usize>,
    {
        if !crate::parser::is_valid_identifier(var) {
            return Err(KripkeError::InvalidVariable(var.to_string()));
        }
        let mut mask = 0;
        for w in worlds {
            self.check_world(w)?;
            mask |= 1 << w;
        }
        self.valuation.insert(Arc::from(var), mask);
        Ok(self)
    }

    pub(crate) fn from_masks(frame: Frame, valuation: BTreeMap<Arc<str>, WorldSet>) -> Model {
        Model { frame, valuation }
    }

    pub fn world_count(&self) -> usize {
        self.frame.world_count()
    }

    /// Variables listed in the valuation and the worlds where each is true.
    pub fn valuation(&self) -> impl Iterator<Item = (&str, WorldSet)> {
        self.valuation.iter().map(|(k, v)| (&**k, *v))
    }

    pub fn var_mask(&self, var: &str) -> WorldSet {
        self.valuation.get(var).copied().unwrap_or(0)
    }

    fn check_world(&self, w: usize) -> Result<(), KripkeError> {
        if w < self.world_count() {
            Ok(())
        } else {
            Err(KripkeError::WorldOutOfRange { world: w, worlds: self.world_count() })
        }
    }

    /// The set of worlds where `f` holds.
    pub fn truth_set(&self, f: &Formula) -> WorldSet {
        let n = self.world_count();
        let all = all_worlds(n);
        match f {
            Formula::Var(name) => self.var_mask(name),
            Formula::Top => all,
            Formula::Bot => 0,
            Formula::And(a, b) => self.truth_set(a) & self.truth_set(b),
            Formula::Or(a, b) => self.truth_set(a) | self.truth_set(b),
            Formula::Un(a) => un_mask(&self.frame, self.truth_set(a)),
            Formula::Im(a) => im_mask(&self.frame, self.truth_set(a)),
            Formula::Con(a) => {
                let x = self.truth_set(a);
                !(x & un_mask(&self.frame, x)) & all
            }
            Formula::Det(a) => {
                let x = self.truth_set(a);
                !(x | im_mask(&self.frame, x)) & all
            }
        }
    }

    pub fn eval(&self, w: usize, f: &Formula) -> Result<bool, KripkeError> {
        self.check_world(w)?;
        Ok(self.truth_set(f) >> w & 1 == 1)
    }

    /// Worlds where the sequent is satisfied: some left formula false or
    /// some right formula true.
    pub fn sequent_set(&self, s: &Sequent) -> WorldSet {
        let all = all_worlds(self.world_count());
        let left = s.left.iter().fold(0, |acc, f| acc | (!self.truth_set(f) & all));
        let right = s.right.iter().fold(0, |acc, f| acc | self.truth_set(f));
        left | right
    }

    pub fn holds(&self, w: usize, s: &Sequent) -> Result<bool, KripkeError> {
        self.check_world(w)?;
        Ok(self.sequent_set(s) >> w & 1 == 1)
    }

    pub fn valid(&self, s: &Sequent) -> bool {
        self.sequent_set(s) == all_worlds(self.world_count())
    }

    /// Strengthened-model test with `alpha` ranging over `universe` only.
    ///
    /// `wRv` must hold exactly when, for every `alpha`, truth of `alpha` at
    /// `v` forces `im alpha` false at `w` and falsity of `alpha` at `v`
    /// forces `un alpha` true at `w`.
    pub fn is_strengthened(&self, universe: &BTreeSet<Formula>) -> bool {
        let rows: Vec<(WorldSet, WorldSet, WorldSet)> = universe
            .iter()
            .map(|a| {
                (
                    self.truth_set(a),
                    self.truth_set(&Formula::im(a.clone())),
                    self.truth_set(&Formula::un(a.clone())),
                )
            })
            .collect();
        self.frame.worlds().all(|w| {
            self.frame.worlds().all(|v| {
                let forced = rows.iter().all(|&(a, im, un)| {
                    let a_v = a >> v & 1 == 1;
                    (!a_v || im >> w & 1 == 0) && (a_v || un >> w & 1 == 1)
                });
                forced == self.frame.has_edge(w, v)
            })
        })
    }

    /// Differentiated-model test with `alpha` ranging over `universe` only.
    pub fn is_differentiated(&self, universe: &BTreeSet<Formula>) -> bool {
        let sets: Vec<WorldSet> = universe.iter().map(|a| self.truth_set(a)).collect();
        let n = self.world_count();
        (0..n).all(|w| {
            (w + 1..n).all(|v| sets.iter().any(|s| (s >> w & 1) != (s >> v & 1)))
        })
    }
}

pub(crate) fn un_mask(frame: &Frame, x: WorldSet) -> WorldSet {
    let mut out = 0;
    for w in frame.worlds() {
        if frame.successors(w) & !x != 0 {
            out |= 1 << w;
        }
    }
    out
}

pub(crate) fn im_mask(frame: &Frame, x: WorldSet) -> WorldSet {
    let mut out = 0;
    for w in frame.worlds() {
        if frame.successors(w) & x == 0 {
            out |= 1 << w;
        }
    }
    out
}

/// A list of formulas compiled into a shared DAG for repeated evaluation
/// over many frames and valuations.
#[derive(Clone, Debug)]
pub struct Evaluator {
    nodes: Vec<Node>,
    vars: Vec<Arc<str>>,
    roots: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Var(usize),
    Top,
    Bot,
    And(usize, usize),
    Or(usize, usize),
    Un(usize),
    Im(usize),
    Con(usize, usize),
    Det(usize, usize),
}

impl Evaluator {
    pub fn new<'a, I>(formulas: I) -> Evaluator
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let formulas: Vec<&Formula> = formulas.into_iter().collect();
        let vars: Vec<Arc<str>> =
            formulas.iter().flat_map(|f| f.variables()).collect::<BTreeSet<_>>().into_iter().collect();
        let mut ev = Evaluator { nodes: Vec::new(), vars, roots: Vec::new() };
        let mut index = rustc_hash::FxHashMap::default();
        for f in formulas {
            let r = ev.intern(f, &mut index);
            ev.roots.push(r);
        }
        ev
    }

    fn intern(&mut self, f: &Formula, index: &mut rustc_hash::FxHashMap<Formula, usize>) -> usize {
        if let Some(&i) = index.get(f) {
            return i;
        }
        let node = match f {
            Formula::Var(name) => Node::Var(self.vars.binary_search(name).expect("collected")),
            Formula::Top => Node::Top,
            Formula::Bot => Node::Bot,
            Formula::And(a, b) => Node::And(self.intern(a, index), self.intern(b, index)),
            Formula::Or(a, b) => Node::Or(self.intern(a, index), self.intern(b, index)),
            Formula::Un(a) => Node::Un(self.intern(a, index)),
            Formula::Im(a) => Node::Im(self.intern(a, index)),
            Formula::Con(a) => {
                let x = self.intern(a, index);
                let u = self.intern(&Formula::Un(a.clone()), index);
                Node::Con(x, u)
            }
            Formula::Det(a) => {
                let x = self.intern(a, index);
                let m = self.intern(&Formula::Im(a.clone()), index);
                Node::Det(x, m)
            }
        };
        self.nodes.push(node);
        let i = self.nodes.len() - 1;
        index.insert(f.clone(), i);
        i
    }

    /// Variables in sorted order; valuation slices passed to `eval` follow it.
    pub fn variables(&self) -> &[Arc<str>] {
        &self.vars
    }

    /// Truth sets of the compiled formulas, in the order they were given.
    pub fn eval(&self, frame: &Frame, var_masks: &[WorldSet], out: &mut Vec<WorldSet>) {
        let all = all_worlds(frame.world_count());
        let mut vals: Vec<WorldSet> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::Var(i) => var_masks[i],
                Node::Top => all,
                Node::Bot => 0,
                Node::And(a, b) => vals[a] & vals[b],
                Node::Or(a, b) => vals[a] | vals[b],
                Node::Un(a) => un_mask(frame, vals[a]),
                Node::Im(a) => im_mask(frame, vals[a]),
                Node::Con(a, u) => !(vals[a] & vals[u]) & all,
                Node::Det(a, m) => !(vals[a] | vals[m]) & all,
            };
            vals.push(v);
        }
        out.clear();
        out.extend(self.roots.iter().map(|&r| vals[r]));
    }
}
