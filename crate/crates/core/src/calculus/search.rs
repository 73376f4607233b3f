//! Backward proof search over sequents of a fixed finite universe.
//!
//! Invertible rules are applied eagerly with the whole sequent as context,
//! so their premises only ever grow. When none changes the sequent, a cut
//! engine splits on the first undecided cut candidate (both branches are
//! weakenings of the goal, so the split loses nothing). What remains is a
//! disjunction over the context-changing rules, each instantiated with
//! maximal parameter sets and weakened up to the goal.
//!
//! Every goal is memoized. A goal met again on the current branch fails
//! for that branch only. Failures that depend on such an assumption stay
//! pending until the assumed goal is settled: if it fails they all become
//! final, and if some goal they depend on is proved they are dropped.

use rustc_hash::FxHashMap;

use super::universe::{Key, Side, Universe, Shape};
use super::{CutPolicy, Derivation, ProveError, RuleId, RuleParams};
use crate::syntax::{closure, Formula, Logic, Sequent};

/// Default cap on expanded goals per call.
pub const DEFAULT_BUDGET: usize = 1_000_000;

const CLEAN: usize = usize::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub universe_size: usize,
    pub expanded: usize,
}

#[derive(Clone, Debug)]
enum Step {
    Axiom(RuleId, usize),
    Hyp(usize),
    Local(RuleId, usize, Vec<Key>),
    /// Proved by the cut-free engine.
    Delegate,
    Split(usize),
    Modal(RuleId, Option<usize>),
}

enum Entry {
    Proved(Step),
    Failed,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Proved,
    /// Failed, possibly only because the goal at this stack depth was
    /// assumed to fail; `CLEAN` when the failure is unconditional.
    Failed(usize),
}

struct Overflow;

struct Instance {
    gamma: Vec<usize>,
    delta: Vec<usize>,
    gamma_prime: Vec<usize>,
    delta_prime: Vec<usize>,
    conclusion: Key,
    premise: Key,
}

struct Search<'u> {
    u: &'u Universe,
    logic: Logic,
    words: usize,
    cut_set: Vec<usize>,
    hyps: Vec<Key>,
    top: Option<usize>,
    bot: Option<usize>,
    memo: [FxHashMap<Key, Entry>; 2],
    stack: [FxHashMap<Key, usize>; 2],
    /// Failures conditional on a goal still on the stack, with that
    /// goal's depth, in the order they were found.
    pending: [FxHashMap<Key, usize>; 2],
    pending_order: [Vec<Key>; 2],
    entries: usize,
    budget: usize,
}

impl<'u> Search<'u> {
    fn solve(&mut self, e: usize, s: &Key) -> Result<Outcome, Overflow> {
        match self.memo[e].get(s) {
            Some(Entry::Proved(_)) => return Ok(Outcome::Proved),
            Some(Entry::Failed) => return Ok(Outcome::Failed(CLEAN)),
            None => {}
        }
        if let Some(&d) = self.stack[e].get(s) {
            return Ok(Outcome::Failed(d));
        }
        if let Some(&low) = self.pending[e].get(s) {
            return Ok(Outcome::Failed(low));
        }
        self.entries += 1;
        if self.entries > self.budget {
            return Err(Overflow);
        }
        let depth = self.stack[e].len();
        let mark = self.pending_order[e].len();
        self.stack[e].insert(s.clone(), depth);
        let result = self.expand(e, s)?;
        self.stack[e].remove(s);
        match result {
            Ok(step) => {
                // failures that leaned on a goal now proved may be wrong
                for k in self.pending_order[e].drain(mark..) {
                    self.pending[e].remove(&k);
                }
                self.memo[e].insert(s.clone(), Entry::Proved(step));
                Ok(Outcome::Proved)
            }
            Err(low) if low >= depth => {
                // everything that failed assuming this goal fails did fail
                for k in self.pending_order[e].drain(mark..) {
                    self.pending[e].remove(&k);
                    self.memo[e].insert(k, Entry::Failed);
                }
                self.memo[e].insert(s.clone(), Entry::Failed);
                Ok(Outcome::Failed(CLEAN))
            }
            Err(low) => {
                self.pending[e].insert(s.clone(), low);
                self.pending_order[e].push(s.clone());
                Ok(Outcome::Failed(low))
            }
        }
    }

    fn expand(&mut self, e: usize, s: &Key) -> Result<Result<Step, usize>, Overflow> {
        let w = self.words;
        if s.overlaps(w) {
            let i = s.iter(w, Side::L).find(|&i| s.has(w, Side::R, i)).expect("overlap");
            return Ok(Ok(Step::Axiom(RuleId::Id, i)));
        }
        if let Some(b) = self.bot.filter(|&b| s.has(w, Side::L, b)) {
            return Ok(Ok(Step::Axiom(RuleId::BotL, b)));
        }
        if let Some(t) = self.top.filter(|&t| s.has(w, Side::R, t)) {
            return Ok(Ok(Step::Axiom(RuleId::TopR, t)));
        }
        if let Some(k) = self.hyps.iter().position(|h| h.is_subset(s)) {
            return Ok(Ok(Step::Hyp(k)));
        }
        if e == 1 && self.solve(0, s)? == Outcome::Proved {
            return Ok(Ok(Step::Delegate));
        }
        if let Some((rule, i, premises)) = self.local(s) {
            for p in &premises {
                if let Outcome::Failed(low) = self.solve(e, p)? {
                    return Ok(Err(low));
                }
            }
            return Ok(Ok(Step::Local(rule, i, premises)));
        }
        if e == 1 {
            let undecided = self.cut_set.iter().copied().find(|&c| !s.has(w, Side::L, c) && !s.has(w, Side::R, c));
            if let Some(c) = undecided {
                for side in [Side::R, Side::L] {
                    if let Outcome::Failed(low) = self.solve(e, &s.with(w, &[(side, c)]))? {
                        return Ok(Err(low));
                    }
                }
                return Ok(Ok(Step::Split(c)));
            }
        }
        let mut low = CLEAN;
        for (rule, principal) in self.modal_candidates(s) {
            let inst = self.instance(s, rule, principal);
            match self.solve(e, &inst.premise)? {
                Outcome::Proved => return Ok(Ok(Step::Modal(rule, principal))),
                Outcome::Failed(l) => low = low.min(l),
            }
        }
        Ok(Err(low))
    }

    /// The first invertible rule whose premises all differ from `s`.
    fn local(&self, s: &Key) -> Option<(RuleId, usize, Vec<Key>)> {
        use Side::{L, R};
        let w = self.words;
        let has = |side, i| s.has(w, side, i);
        let one = |adds: &[(Side, usize)]| vec![s.with(w, adds)];
        let two = |a: (Side, usize), b: (Side, usize)| vec![s.with(w, &[a]), s.with(w, &[b])];
        let pkt = self.logic == Logic::PKT;
        for i in s.iter(w, L) {
            let hit = match self.u.shape[i] {
                Shape::And(a, b) if !(has(L, a) && has(L, b)) => Some((RuleId::AndL, one(&[(L, a), (L, b)]))),
                Shape::Or(a, b) if !has(L, a) && !has(L, b) => Some((RuleId::OrL, two((L, a), (L, b)))),
                Shape::Con(a, u) if !has(R, a) && !has(R, u) => Some((RuleId::ConL, two((R, a), (R, u)))),
                Shape::Det(a, m) if !(has(R, a) && has(R, m)) => Some((RuleId::DetL, one(&[(R, a), (R, m)]))),
                Shape::Im(a) if pkt && !has(R, a) => Some((RuleId::ImLT, one(&[(R, a)]))),
                _ => None,
            };
            if let Some((rule, ps)) = hit {
                return Some((rule, i, ps));
            }
        }
        for i in s.iter(w, R) {
            let hit = match self.u.shape[i] {
                Shape::And(a, b) if !has(R, a) && !has(R, b) => Some((RuleId::AndR, two((R, a), (R, b)))),
                Shape::Or(a, b) if !(has(R, a) && has(R, b)) => Some((RuleId::OrR, one(&[(R, a), (R, b)]))),
                Shape::Con(a, u) if !(has(L, a) && has(L, u)) => Some((RuleId::ConR, one(&[(L, a), (L, u)]))),
                Shape::Det(a, m) if !has(L, a) && !has(L, m) => Some((RuleId::DetR, two((L, a), (L, m)))),
                Shape::Un(a) if pkt && !has(L, a) => Some((RuleId::UnRT, one(&[(L, a)]))),
                _ => None,
            };
            if let Some((rule, ps)) = hit {
                return Some((rule, i, ps));
            }
        }
        None
    }

    fn modal_candidates(&self, s: &Key) -> Vec<(RuleId, Option<usize>)> {
        let w = self.words;
        let uns_left = || s.iter(w, Side::L).filter(|&i| matches!(self.u.shape[i], Shape::Un(_)));
        let ims_right = || s.iter(w, Side::R).filter(|&i| matches!(self.u.shape[i], Shape::Im(_)));
        let mut out = Vec::new();
        match self.logic {
            Logic::PK | Logic::PKD | Logic::PKT => {
                out.extend(uns_left().map(|i| (RuleId::UnL, Some(i))));
                out.extend(ims_right().map(|i| (RuleId::ImR, Some(i))));
                if self.logic == Logic::PKD {
                    out.push((RuleId::D, None));
                }
            }
            Logic::PKF => out.push((RuleId::Fun, None)),
            Logic::PKB => {
                out.extend(ims_right().map(|i| (RuleId::B1, Some(i))));
                out.extend(uns_left().map(|i| (RuleId::B2, Some(i))));
            }
        }
        out
    }

    fn instance(&self, s: &Key, rule: RuleId, principal: Option<usize>) -> Instance {
        let w = self.words;
        let u = self.u;
        let args = |side: Side, want_un: bool| -> (Vec<usize>, Vec<usize>) {
            let mut whole = Vec::new();
            let mut inner = Vec::new();
            for i in s.iter(w, side) {
                match u.shape[i] {
                    Shape::Un(a) if want_un => {
                        whole.push(i);
                        inner.push(a);
                    }
                    Shape::Im(a) if !want_un => {
                        whole.push(i);
                        inner.push(a);
                    }
                    _ => {}
                }
            }
            (whole, inner)
        };
        let (un_right, gamma) = args(Side::R, true);
        let (im_left, delta) = args(Side::L, false);
        let arg = |i: Option<usize>| match principal.map(|p| u.shape[p]) {
            Some(Shape::Un(a) | Shape::Im(a)) => a,
            _ => unreachable!("principal {i:?} of {rule} is not modal"),
        };
        let build = |l: &[usize], r: &[usize]| {
            let mut k = Key::empty(w);
            for &i in l {
                k.set(w, Side::L, i);
            }
            for &i in r {
                k.set(w, Side::R, i);
            }
            k
        };
        let cat = |a: &[usize], b: &[usize]| a.iter().chain(b).copied().collect::<Vec<_>>();
        let mut gamma_prime = Vec::new();
        let mut delta_prime = Vec::new();
        let (delta, conclusion, premise) = match rule {
            RuleId::UnL => {
                let p = principal.unwrap();
                (delta.clone(), build(&cat(&im_left, &[p]), &un_right), build(&gamma, &cat(&delta, &[arg(principal)])))
            }
            RuleId::ImR => {
                let p = principal.unwrap();
                (delta.clone(), build(&im_left, &cat(&un_right, &[p])), build(&cat(&gamma, &[arg(principal)]), &delta))
            }
            RuleId::D => (delta.clone(), build(&im_left, &un_right), build(&gamma, &delta)),
            RuleId::Fun => {
                let (un_left, delta) = args(Side::L, true);
                (delta.clone(), build(&un_left, &un_right), build(&gamma, &delta))
            }
            RuleId::B1 | RuleId::B2 => {
                let p = principal.unwrap();
                delta_prime = s.iter(w, Side::L).filter(|&y| u.im_of[y].is_some()).collect();
                gamma_prime = s.iter(w, Side::R).filter(|&y| u.un_of[y].is_some()).collect();
                let un_gp: Vec<usize> = gamma_prime.iter().map(|&y| u.un_of[y].unwrap()).collect();
                let im_dp: Vec<usize> = delta_prime.iter().map(|&y| u.im_of[y].unwrap()).collect();
                let concl_l = cat(&im_left, &delta_prime);
                let concl_r = cat(&un_right, &gamma_prime);
                let prem_l = cat(&gamma, &un_gp);
                let prem_r = cat(&delta, &im_dp);
                if rule == RuleId::B1 {
                    (
                        delta.clone(),
                        build(&concl_l, &cat(&concl_r, &[p])),
                        build(&cat(&prem_l, &[arg(principal)]), &prem_r),
                    )
                } else {
                    (
                        delta.clone(),
                        build(&cat(&concl_l, &[p]), &concl_r),
                        build(&prem_l, &cat(&prem_r, &[arg(principal)])),
                    )
                }
            }
            _ => unreachable!("{rule} is not context-changing"),
        };
        Instance { gamma, delta, gamma_prime, delta_prime, conclusion, premise }
    }

    fn formulas(&self, idx: &[usize]) -> std::collections::BTreeSet<Formula> {
        idx.iter().map(|&i| self.u.formulas[i].clone()).collect()
    }

    fn context(&self, s: &Key, principal: Option<usize>) -> RuleParams {
        let seq = self.u.sequent(s);
        RuleParams {
            principal: principal.map(|i| self.u.formulas[i].clone()),
            gamma: seq.left,
            delta: seq.right,
            ..RuleParams::default()
        }
    }

    fn build(&self, e: usize, s: &Key) -> Derivation {
        let step = match self.memo[e].get(s) {
            Some(Entry::Proved(step)) => step,
            _ => unreachable!("proved goals are memoized"),
        };
        let conclusion = self.u.sequent(s);
        match step {
            Step::Axiom(rule, i) => Derivation {
                conclusion,
                rule: *rule,
                params: self.context(s, Some(*i)),
                premises: Vec::new(),
            },
            Step::Hyp(k) => {
                let h = &self.hyps[*k];
                let node = Derivation {
                    conclusion: self.u.sequent(h),
                    rule: RuleId::Hyp,
                    params: RuleParams::default(),
                    premises: Vec::new(),
                };
                self.weaken(node, h, s)
            }
            Step::Local(rule, i, premises) => Derivation {
                conclusion,
                rule: *rule,
                params: self.context(s, Some(*i)),
                premises: premises.iter().map(|p| self.build(e, p)).collect(),
            },
            Step::Delegate => self.build(0, s),
            Step::Split(c) => {
                let w = self.words;
                Derivation {
                    conclusion,
                    rule: RuleId::Cut,
                    params: self.context(s, Some(*c)),
                    premises: vec![
                        self.build(e, &s.with(w, &[(Side::R, *c)])),
                        self.build(e, &s.with(w, &[(Side::L, *c)])),
                    ],
                }
            }
            Step::Modal(rule, principal) => {
                let inst = self.instance(s, *rule, *principal);
                let node = Derivation {
                    conclusion: self.u.sequent(&inst.conclusion),
                    rule: *rule,
                    params: RuleParams {
                        principal: principal.map(|i| self.u.formulas[i].clone()),
                        gamma: self.formulas(&inst.gamma),
                        delta: self.formulas(&inst.delta),
                        gamma_prime: self.formulas(&inst.gamma_prime),
                        delta_prime: self.formulas(&inst.delta_prime),
                    },
                    premises: vec![self.build(e, &inst.premise)],
                };
                self.weaken(node, &inst.conclusion, s)
            }
        }
    }

    /// Wrap `d` (concluding `from`) in single-formula weakenings up to `to`.
    fn weaken(&self, mut d: Derivation, from: &Key, to: &Key) -> Derivation {
        let w = self.words;
        let mut cur = from.clone();
        for side in [Side::L, Side::R] {
            for i in to.minus(&cur.clone(), w, side) {
                let params = self.context(&cur, Some(i));
                let params = RuleParams {
                    gamma: params.gamma,
                    delta: params.delta,
                    principal: params.principal,
                    ..RuleParams::default()
                };
                cur.set(w, side, i);
                let rule = if side == Side::L { RuleId::WL } else { RuleId::WR };
                d = Derivation { conclusion: self.u.sequent(&cur), rule, params, premises: vec![d] };
            }
        }
        d
    }
}

/// Search for a derivation of `goal` from `hypotheses` under `policy`.
/// `Ok(None)` means no derivation exists within the analytic universe.
pub fn prove(
    logic: Logic,
    goal: &Sequent,
    hypotheses: &[Sequent],
    policy: CutPolicy,
) -> Result<Option<Derivation>, ProveError> {
    prove_with_budget(logic, goal, hypotheses, policy, DEFAULT_BUDGET).map(|(d, _)| d)
}

pub fn prove_with_budget(
    logic: Logic,
    goal: &Sequent,
    hypotheses: &[Sequent],
    policy: CutPolicy,
    budget: usize,
) -> Result<(Option<Derivation>, SearchStats), ProveError> {
    let seeds: Vec<&Formula> = goal.formulas().chain(hypotheses.iter().flat_map(|h| h.formulas())).collect();
    let set = closure(seeds, logic.order())?;
    let u = Universe::new(logic, &set);
    let cut_set: Vec<usize> = match policy {
        CutPolicy::NoCut => Vec::new(),
        CutPolicy::CutOnHypotheses => {
            let mut c: Vec<usize> = hypotheses.iter().flat_map(|h| h.formulas()).map(|f| u.index[f]).collect();
            c.sort_unstable();
            c.dedup();
            c
        }
        CutPolicy::AnalyticCut | CutPolicy::FullCut => (0..u.len()).collect(),
    };
    let engine = if cut_set.is_empty() { 0 } else { 1 };
    let mut search = Search {
        u: &u,
        logic,
        words: u.words,
        cut_set,
        hyps: hypotheses.iter().map(|h| u.key(h)).collect(),
        top: u.index.get(&Formula::Top).copied(),
        bot: u.index.get(&Formula::Bot).copied(),
        memo: [FxHashMap::default(), FxHashMap::default()],
        stack: [FxHashMap::default(), FxHashMap::default()],
        pending: [FxHashMap::default(), FxHashMap::default()],
        pending_order: [Vec::new(), Vec::new()],
        entries: 0,
        budget,
    };
    let key = u.key(goal);
    // deep branches recurse once per sequent, so give them room
    let result = std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(256 << 20)
            .spawn_scoped(scope, || {
                let outcome = search.solve(engine, &key);
                let stats = SearchStats { universe_size: u.len(), expanded: search.entries };
                match outcome {
                    Err(Overflow) => Err(ProveError::Resource(budget)),
                    Ok(Outcome::Proved) => Ok((Some(search.build(engine, &key)), stats)),
                    Ok(Outcome::Failed(_)) => Ok((None, stats)),
                }
            })
            .expect("spawn search thread")
            .join()
            .expect("search thread panicked")
    });
    result
}

/// Whether `premises => conclusion` is derivable, using the logic's
/// default cut policy.
pub fn entails(logic: Logic, premises: &[Formula], conclusion: &Formula) -> Result<bool, ProveError> {
    let goal = Sequent::new(premises.iter().cloned(), [conclusion.clone()]);
    Ok(prove(logic, &goal, &[], CutPolicy::default_for(logic, false))?.is_some())
}
