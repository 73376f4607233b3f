//! Three-valued quasi models over a finite universe, their condition
//! checker, and the constructions that turn them into ordinary models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{Frame, FrameClass, KripkeError, Model, ModelFile};
use crate::parser::parse_formula;
use crate::syntax::{predecessors, Formula, Logic, Order, SyntaxError};

/// A nonempty subset of `{f, t}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QValue {
    F,
    T,
    FT,
}

impl QValue {
    pub fn has_t(self) -> bool {
        self != QValue::F
    }

    pub fn has_f(self) -> bool {
        self != QValue::T
    }

    fn from_bits(t: bool, f: bool) -> QValue {
        match (t, f) {
            (true, true) => QValue::FT,
            (true, false) => QValue::T,
            (false, true) => QValue::F,
            (false, false) => unreachable!("quasi values are nonempty"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QValue::F => "f",
            QValue::T => "t",
            QValue::FT => "ft",
        }
    }

    pub fn from_name(s: &str) -> Option<QValue> {
        match s {
            "f" => Some(QValue::F),
            "t" => Some(QValue::T),
            "ft" | "tf" => Some(QValue::FT),
            _ => None,
        }
    }
}

/// The semantic condition a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    TTop,
    FBot,
    TAnd,
    FAnd,
    TOr,
    FOr,
    TUn,
    FUn,
    TIm,
    FIm,
    TCon,
    FCon,
    TDet,
    FDet,
    /// A successor's truth must make `un` false (Fun quasi models).
    FunUn,
    Serial,
    Reflexive,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::TTop => "[T⊤]",
            Condition::FBot => "[F⊥]",
            Condition::TAnd => "[T∧]",
            Condition::FAnd => "[F∧]",
            Condition::TOr => "[T∨]",
            Condition::FOr => "[F∨]",
            Condition::TUn => "[T⌣]",
            Condition::FUn => "[F⌣]",
            Condition::TIm => "[T⌢]",
            Condition::FIm => "[F⌢]",
            Condition::TCon => "[T○⌣]",
            Condition::FCon => "[F○⌣]",
            Condition::TDet => "[T○⌢]",
            Condition::FDet => "[F○⌢]",
            Condition::FunUn => "[Fun]",
            Condition::Serial => "[serial]",
            Condition::Reflexive => "[reflexive]",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub world: usize,
    pub formula: Option<Formula>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at world {}", self.condition, self.world)?;
        if let Some(g) = &self.formula {
            write!(f, " on `{g}`")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuasiError {
    #[error("universe is not closed: `{0}` is missing")]
    NotClosed(Formula),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("quasi models for {0} are not supported")]
    Unsupported(Logic),
    #[error("table has no value for `{formula}` at world {world}")]
    MissingCell { world: usize, formula: Formula },
    #[error("quasi model violates {} condition(s), first: {}", .0.len(), .0[0])]
    Violations(Vec<Violation>),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("malformed quasi model file: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Atom,
    Top,
    Bot,
    And(usize, usize),
    Or(usize, usize),
    Un(usize),
    Im(usize),
    Con(usize, usize),
    Det(usize, usize),
}

/// A universe listed in a topological order of the structural order, ties
/// broken canonically, with every formula's parts resolved to indices.
#[derive(Clone, Debug)]
struct Indexed {
    formulas: Vec<Formula>,
    shape: Vec<Shape>,
}

impl Indexed {
    fn new(universe: &BTreeSet<Formula>, order: Order, det_partner: impl Fn(&Formula) -> Formula) -> Result<Indexed, QuasiError> {
        for f in universe {
            if order == Order::PrecPrime && f.has_im() {
                return Err(SyntaxError::ImInFragment(f.clone()).into());
            }
            for g in predecessors(f, order) {
                if !universe.contains(&g) {
                    return Err(QuasiError::NotClosed(g));
                }
            }
        }
        let mut heights: FxHashMap<&Formula, usize> = FxHashMap::default();
        fn h<'a>(f: &'a Formula, order: Order, u: &'a BTreeSet<Formula>, memo: &mut FxHashMap<&'a Formula, usize>) -> usize {
            if let Some(&x) = memo.get(f) {
                return x;
            }
            let preds = predecessors(f, order);
            let x = preds
                .iter()
                .map(|g| h(u.get(g).expect("closed"), order, u, memo) + 1)
                .max()
                .unwrap_or(0);
            memo.insert(f, x);
            x
        }
        let mut formulas: Vec<Formula> = universe.iter().cloned().collect();
        for f in universe {
            h(f, order, universe, &mut heights);
        }
        formulas.sort_by(|a, b| heights[a].cmp(&heights[b]).then_with(|| a.cmp(b)));
        let index: FxHashMap<Formula, usize> = formulas.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
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
                Formula::Det(a) => Shape::Det(at(a), at(&det_partner(a))),
            })
            .collect();
        Ok(Indexed { formulas, shape })
    }
}

fn logic_order(logic: Logic) -> Result<Order, QuasiError> {
    match logic {
        Logic::PKB => Err(QuasiError::Unsupported(Logic::PKB)),
        l => Ok(l.order()),
    }
}

/// A frame with a total three-valued table on a closed universe.
#[derive(Clone, Debug)]
pub struct QuasiModel {
    pub frame: Frame,
    universe: BTreeSet<Formula>,
    table: BTreeMap<(usize, Formula), QValue>,
}

impl PartialEq for QuasiModel {
    fn eq(&self, other: &QuasiModel) -> bool {
        self.frame == other.frame && self.table == other.table
    }
}

impl QuasiModel {
    /// Build from explicit cells; every (world, formula) pair must be given.
    pub fn new<I>(frame: Frame, universe: BTreeSet<Formula>, cells: I) -> Result<QuasiModel, QuasiError>
    where
        I: IntoIterator<Item = (usize, Formula, QValue)>,
    {
        let mut table = BTreeMap::new();
        for (w, f, v) in cells {
            if w >= frame.world_count() {
                return Err(KripkeError::WorldOutOfRange { world: w, worlds: frame.world_count() }.into());
            }
            if !universe.contains(&f) {
                return Err(QuasiError::Malformed(format!("`{f}` is outside the universe")));
            }
            table.insert((w, f), v);
        }
        for w in frame.worlds() {
            for f in &universe {
                if !table.contains_key(&(w, f.clone())) {
                    return Err(QuasiError::MissingCell { world: w, formula: f.clone() });
                }
            }
        }
        Ok(QuasiModel { frame, universe, table })
    }

    /// A two-valued model read with singleton values.
    pub fn from_model(m: &Model, universe: &BTreeSet<Formula>) -> QuasiModel {
        let mut table = BTreeMap::new();
        for f in universe {
            let set = m.truth_set(f);
            for w in m.frame.worlds() {
                table.insert((w, f.clone()), if set >> w & 1 == 1 { QValue::T } else { QValue::F });
            }
        }
        QuasiModel { frame: m.frame.clone(), universe: universe.clone(), table }
    }

    pub fn universe(&self) -> &BTreeSet<Formula> {
        &self.universe
    }

    pub fn value(&self, w: usize, f: &Formula) -> Option<QValue> {
        self.table.get(&(w, f.clone())).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, &Formula, QValue)> {
        self.table.iter().map(|((w, f), v)| (*w, f, *v))
    }

    fn dense(&self, ix: &Indexed) -> Vec<Vec<QValue>> {
        self.frame
            .worlds()
            .map(|w| ix.formulas.iter().map(|f| self.table[&(w, f.clone())]).collect())
            .collect()
    }

    /// Every instance of the conditions that fails. PKD adds seriality,
    /// PKT reflexivity, PKF seriality, the Fun implications and the
    /// un-based reading of `oim`.
    pub fn check_conditions(&self, logic: Logic) -> Result<Vec<Violation>, QuasiError> {
        let order = logic_order(logic)?;
        let ix = Indexed::new(&self.universe, order, |a| logic.det_partner(a))?;
        let table = self.dense(&ix);
        let mut out = Vec::new();
        let frame_needs = match logic {
            Logic::PKD | Logic::PKF => Some((FrameClass::Serial, Condition::Serial)),
            Logic::PKT => Some((FrameClass::Reflexive, Condition::Reflexive)),
            _ => None,
        };
        if let Some((class, cond)) = frame_needs {
            for w in self.frame.worlds() {
                let ok = match class {
                    FrameClass::Serial => self.frame.successors(w) != 0,
                    _ => self.frame.has_edge(w, w),
                };
                if !ok {
                    out.push(Violation { condition: cond, world: w, formula: None });
                }
            }
        }
        for_each_forced(&self.frame, &ix, &table, logic == Logic::PKF, |cond, w, i, _| {
            out.push(Violation { condition: cond, world: w, formula: Some(ix.formulas[i].clone()) });
        });
        Ok(out)
    }

    /// The instance on the same frame, built by the R1–R3 recursion.
    pub fn instance(&self) -> Result<Model, QuasiError> {
        let (frame, ix, v) = self.instance_parts()?;
        Ok(self.to_model(frame, &ix, &v))
    }

    /// The instance's two-valued table on the whole universe.
    pub fn instance_values(&self) -> Result<BTreeMap<(usize, Formula), bool>, QuasiError> {
        let (_, ix, v) = self.instance_parts()?;
        Ok(values(&ix, &v))
    }

    fn instance_parts(&self) -> Result<(Frame, Indexed, Vec<Vec<bool>>), QuasiError> {
        let violations = self.check_conditions(Logic::PK)?;
        if !violations.is_empty() {
            return Err(QuasiError::Violations(violations));
        }
        let ix = Indexed::new(&self.universe, Order::Prec, |a| Formula::im(a.clone()))?;
        let table = self.dense(&ix);
        let succ: Vec<Vec<usize>> = self.frame.worlds().map(|w| self.frame.successor_list(w).collect()).collect();
        let v = decide(&ix, &table, |w, i, v: &[Vec<bool>]| match ix.shape[i] {
            Shape::Un(a) => succ[w].iter().any(|&u| !v[u][a]),
            Shape::Im(a) => succ[w].iter().all(|&u| !v[u][a]),
            Shape::Det(a, m) => !v[w][a] && !v[w][m],
            _ => unreachable!(),
        });
        Ok((self.frame.clone(), ix, v))
    }

    /// A functional instance: every world keeps only its smallest
    /// successor, and `un` is decided by that successor alone.
    pub fn functional_instance(&self) -> Result<Model, QuasiError> {
        let (frame, ix, v) = self.functional_parts()?;
        Ok(self.to_model(frame, &ix, &v))
    }

    pub fn functional_instance_values(&self) -> Result<BTreeMap<(usize, Formula), bool>, QuasiError> {
        let (_, ix, v) = self.functional_parts()?;
        Ok(values(&ix, &v))
    }

    fn functional_parts(&self) -> Result<(Frame, Indexed, Vec<Vec<bool>>), QuasiError> {
        let violations = self.check_conditions(Logic::PKF)?;
        if !violations.is_empty() {
            return Err(QuasiError::Violations(violations));
        }
        let ix = Indexed::new(&self.universe, Order::PrecPrime, |a| Formula::un(a.clone()))?;
        let table = self.dense(&ix);
        let next: Vec<usize> = self
            .frame
            .worlds()
            .map(|w| self.frame.successors(w).trailing_zeros() as usize)
            .collect();
        let v = decide(&ix, &table, |w, i, v: &[Vec<bool>]| match ix.shape[i] {
            Shape::Un(a) => !v[next[w]][a],
            Shape::Det(a, u) => !v[w][a] && !v[w][u],
            _ => unreachable!("im-free universe"),
        });
        let frame = Frame::new(self.frame.world_count(), next.iter().copied().enumerate())?;
        Ok((frame, ix, v))
    }

    fn to_model(&self, frame: Frame, ix: &Indexed, v: &[Vec<bool>]) -> Model {
        let mut m = Model::new(frame);
        for (i, f) in ix.formulas.iter().enumerate() {
            if let Formula::Var(name) = f {
                let worlds = (0..v.len()).filter(|&w| v[w][i]);
                m = m.with_var(name, worlds).expect("universe variables are identifiers");
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        let base = ModelFile::from_model(&Model::new(self.frame.clone()));
        let file = QuasiFile {
            worlds: base.worlds,
            edges: base.edges,
            valuation: BTreeMap::new(),
            table: self
                .table
                .iter()
                .map(|((w, f), v)| Cell { world: *w, formula: f.to_string(), value: v.name().to_string() })
                .collect(),
        };
        serde_json::to_string(&file).expect("quasi files always serialize")
    }

    pub fn from_json(text: &str) -> Result<QuasiModel, QuasiError> {
        let file: QuasiFile = serde_json::from_str(text).map_err(|e| QuasiError::Malformed(e.to_string()))?;
        let frame = Frame::new(file.worlds, file.edges.iter().map(|&[a, b]| (a, b)))?;
        let mut cells = Vec::new();
        for c in &file.table {
            let f = parse_formula(&c.formula).map_err(|e| QuasiError::Malformed(format!("`{}`: {e}", c.formula)))?;
            let v = QValue::from_name(&c.value)
                .ok_or_else(|| QuasiError::Malformed(format!("bad value `{}`", c.value)))?;
            cells.push((c.world, f, v));
        }
        let universe = cells.iter().map(|(_, f, _)| f.clone()).collect();
        QuasiModel::new(frame, universe, cells)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuasiFile {
    worlds: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<usize>>,
    table: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Cell {
    world: usize,
    formula: String,
    value: String,
}

/// Report every (condition, world, formula) whose hypothesis holds but
/// whose required element is missing, with the missing element (`true`
/// for t). With `fun`, the Fun implication is included and `oim` reads
/// its partner as given by the universe.
fn for_each_forced(
    frame: &Frame,
    ix: &Indexed,
    table: &[Vec<QValue>],
    fun: bool,
    mut report: impl FnMut(Condition, usize, usize, bool),
) {
    let t = |w: usize, i: usize| table[w][i].has_t();
    let f = |w: usize, i: usize| table[w][i].has_f();
    for w in frame.worlds() {
        let succ: Vec<usize> = frame.successor_list(w).collect();
        for (i, shape) in ix.shape.iter().enumerate() {
            let mut need = |cond: Condition, hyp: bool, want_t: bool| {
                let have = if want_t { t(w, i) } else { f(w, i) };
                if hyp && !have {
                    report(cond, w, i, want_t);
                }
            };
            match *shape {
                Shape::Atom => {}
                Shape::Top => need(Condition::TTop, true, true),
                Shape::Bot => need(Condition::FBot, true, false),
                Shape::And(a, b) => {
                    need(Condition::TAnd, t(w, a) && t(w, b), true);
                    need(Condition::FAnd, f(w, a) || f(w, b), false);
                }
                Shape::Or(a, b) => {
                    need(Condition::TOr, t(w, a) || t(w, b), true);
                    need(Condition::FOr, f(w, a) && f(w, b), false);
                }
                Shape::Un(a) => {
                    need(Condition::TUn, succ.iter().any(|&v| f(v, a)), true);
                    need(Condition::FUn, succ.iter().all(|&v| t(v, a)), false);
                    if fun {
                        need(Condition::FunUn, succ.iter().any(|&v| t(v, a)), false);
                    }
                }
                Shape::Im(a) => {
                    need(Condition::TIm, succ.iter().all(|&v| f(v, a)), true);
                    need(Condition::FIm, succ.iter().any(|&v| t(v, a)), false);
                }
                Shape::Con(a, u) => {
                    need(Condition::TCon, f(w, a) || f(w, u), true);
                    need(Condition::FCon, t(w, a) && t(w, u), false);
                }
                Shape::Det(a, m) => {
                    need(Condition::TDet, f(w, a) && f(w, m), true);
                    need(Condition::FDet, t(w, a) || t(w, m), false);
                }
            }
        }
    }
}

fn values(ix: &Indexed, v: &[Vec<bool>]) -> BTreeMap<(usize, Formula), bool> {
    let mut out = BTreeMap::new();
    for (w, row) in v.iter().enumerate() {
        for (i, f) in ix.formulas.iter().enumerate() {
            out.insert((w, f.clone()), row[i]);
        }
    }
    out
}

/// R1/R2 where the table is a singleton, otherwise the M-clauses; the
/// closure `modal` decides un/im/oim cells, the rest is fixed here.
fn decide(
    ix: &Indexed,
    table: &[Vec<QValue>],
    modal: impl Fn(usize, usize, &[Vec<bool>]) -> bool,
) -> Vec<Vec<bool>> {
    let worlds = table.len();
    let mut v = vec![vec![false; ix.formulas.len()]; worlds];
    for i in 0..ix.formulas.len() {
        for w in 0..worlds {
            let value = match table[w][i] {
                QValue::F => false,
                QValue::T => true,
                QValue::FT => match ix.shape[i] {
                    Shape::Atom | Shape::Top => true,
                    Shape::Bot => false,
                    Shape::And(a, b) => v[w][a] && v[w][b],
                    Shape::Or(a, b) => v[w][a] || v[w][b],
                    Shape::Con(a, u) => !v[w][a] || !v[w][u],
                    Shape::Un(_) | Shape::Im(_) | Shape::Det(..) => modal(w, i, &v),
                },
            };
            v[w][i] = value;
        }
    }
    v
}

/// Close a table under the conditions by adding the missing elements
/// until nothing changes. Every condition only ever adds, so this
/// terminates and the result satisfies all of them.
fn repair(frame: &Frame, ix: &Indexed, table: &mut [Vec<QValue>], fun: bool) {
    loop {
        let mut adds = Vec::new();
        for_each_forced(frame, ix, table, fun, |_, w, i, want_t| adds.push((w, i, want_t)));
        if adds.is_empty() {
            return;
        }
        for (w, i, want_t) in adds {
            let v = table[w][i];
            table[w][i] = QValue::from_bits(v.has_t() || want_t, v.has_f() || !want_t);
        }
    }
}

fn sample(
    universe: &BTreeSet<Formula>,
    frame: &Frame,
    seed: u64,
    attempts: usize,
    logic: Logic,
) -> Result<Vec<QuasiModel>, QuasiError> {
    let fun = logic == Logic::PKF;
    let ix = Indexed::new(universe, logic.order(), |a| logic.det_partner(a))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..attempts {
        let mut table: Vec<Vec<QValue>> = frame
            .worlds()
            .map(|_| {
                (0..ix.formulas.len())
                    .map(|_| [QValue::F, QValue::T, QValue::FT][rng.gen_range(0..3)])
                    .collect()
            })
            .collect();
        repair(frame, &ix, &mut table, fun);
        let cells = frame
            .worlds()
            .flat_map(|w| ix.formulas.iter().enumerate().map(move |(i, f)| (w, f.clone(), i)))
            .map(|(w, f, i)| (w, f, table[w][i]))
            .collect::<Vec<_>>();
        let q = QuasiModel::new(frame.clone(), universe.clone(), cells)?;
        if q.check_conditions(logic)?.is_empty() {
            out.push(q);
        }
    }
    Ok(out)
}

/// Random quasi models on `frame`, repaired into validity; deterministic
/// in `seed`.
pub fn sample_quasi_models(
    universe: &BTreeSet<Formula>,
    frame: &Frame,
    seed: u64,
    attempts: usize,
) -> Result<Vec<QuasiModel>, QuasiError> {
    sample(universe, frame, seed, attempts, Logic::PK)
}

/// Random Fun quasi models. The frame must be serial for any to pass; the
/// universe must be im-free and closed under the primed order.
pub fn sample_fun_quasi_models(
    universe: &BTreeSet<Formula>,
    frame: &Frame,
    seed: u64,
    attempts: usize,
) -> Result<Vec<QuasiModel>, QuasiError> {
    sample(universe, frame, seed, attempts, Logic::PKF)
}

/// Whether `m` refines `q`: truth needs t in the table, falsity needs f.
pub fn refines(m: &Model, q: &QuasiModel) -> bool {
    q.universe.iter().all(|f| {
        let set = m.truth_set(f);
        q.frame.worlds().all(|w| {
            let v = q.table[&(w, f.clone())];
            if set >> w & 1 == 1 {
                v.has_t()
            } else {
                v.has_f()
            }
        })
    })
}
