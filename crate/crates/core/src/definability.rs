//! Classical negation: the defining formulas where one exists, and bounded
//! certification of the two-world separating models where none does.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde_json::json;
use thiserror::Error;

use crate::calculus::{check_derivation, prove, CutPolicy, ProveError};
use crate::kripke::{for_each_frame, im_mask, un_mask, Frame, FrameClass, Model, WorldSet};
use crate::syntax::{Connective, Formula, Logic, Sequent};

const MODAL: [Connective; 4] = [Connective::Un, Connective::Im, Connective::Con, Connective::Det];

/// A logic restricted to the formulas avoiding `excluded`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fragment {
    pub logic: Logic,
    pub excluded: BTreeSet<Connective>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    /// `im a | oim a`
    ImDet,
    /// `un a & oun a`
    UnCon,
    /// `(x a & oun a) | oim a` with `x` the logic's partner of `oim`
    Mixed,
    /// Two-world model with the given edges.
    Separating(&'static [(usize, usize)]),
}

impl Fragment {
    pub fn new(logic: Logic, excluded: impl IntoIterator<Item = Connective>) -> Fragment {
        Fragment { logic, excluded: excluded.into_iter().collect() }
    }

    pub fn definable() -> Vec<Fragment> {
        use Connective::*;
        vec![
            Fragment::new(Logic::PKT, [Un, Con]),
            Fragment::new(Logic::PKT, [Im, Det]),
            Fragment::new(Logic::PKD, []),
            Fragment::new(Logic::PKF, []),
        ]
    }

    pub fn non_definable() -> Vec<Fragment> {
        use Connective::*;
        vec![
            Fragment::new(Logic::PK, []),
            Fragment::new(Logic::PKB, []),
            Fragment::new(Logic::PKT, [Con, Det]),
            Fragment::new(Logic::PKD, [Con]),
            Fragment::new(Logic::PKD, [Det]),
            Fragment::new(Logic::PKF, [Con]),
            Fragment::new(Logic::PKF, [Det]),
        ]
    }

    fn case(&self) -> Option<Case> {
        use Connective::*;
        let ex: Vec<Connective> = self.excluded.iter().copied().collect();
        Some(match (self.logic, ex.as_slice()) {
            (Logic::PKT, [Un, Con]) => Case::ImDet,
            (Logic::PKT, [Im, Det]) => Case::UnCon,
            (Logic::PKD | Logic::PKF, []) => Case::Mixed,
            (Logic::PK | Logic::PKB, []) => Case::Separating(&[]),
            (Logic::PKT, [Con, Det]) => Case::Separating(&[(0, 0), (0, 1), (1, 0), (1, 1)]),
            (Logic::PKD | Logic::PKF, [Con]) => Case::Separating(&[(0, 1), (1, 1)]),
            (Logic::PKD | Logic::PKF, [Det]) => Case::Separating(&[(0, 0), (1, 0)]),
            _ => return None,
        })
    }

    pub fn is_definable(&self) -> Result<bool, DefinabilityError> {
        match self.case() {
            Some(Case::Separating(_)) => Ok(false),
            Some(_) => Ok(true),
            None => Err(DefinabilityError::Unclassified(self.clone())),
        }
    }

    /// The connectives formulas of the fragment may use. PKF is im-free.
    pub fn connectives(&self) -> Vec<Connective> {
        [Connective::Top, Connective::Bot, Connective::And, Connective::Or]
            .into_iter()
            .chain(MODAL)
            .filter(|c| !self.excluded.contains(c))
            .filter(|c| !(self.logic == Logic::PKF && *c == Connective::Im))
            .collect()
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.logic)?;
        if !self.excluded.is_empty() {
            let names: Vec<&str> = self.excluded.iter().map(|c| c.keyword()).collect();
            write!(f, "\\{{{}}}", names.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for Fragment {
    type Err = DefinabilityError;

    /// `pkd`, `pkd\{oun}`, `pkt\{un,oun}`; `∖` and `-` also separate.
    fn from_str(s: &str) -> Result<Fragment, DefinabilityError> {
        let bad = || DefinabilityError::BadName(s.to_string());
        let s = s.trim();
        let (logic, rest) = match s.find(['\\', '∖', '-']) {
            Some(i) => (&s[..i], s[i..].trim_start_matches(['\\', '∖', '-'])),
            None => (s, ""),
        };
        let logic: Logic = logic.trim().parse().map_err(|_| bad())?;
        let rest = rest.trim();
        let inner = rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')).unwrap_or(rest);
        let mut excluded = BTreeSet::new();
        for name in inner.split([',', '-']).map(str::trim).filter(|n| !n.is_empty()) {
            let c = MODAL
                .into_iter()
                .find(|c| c.keyword().eq_ignore_ascii_case(name))
                .ok_or_else(bad)?;
            excluded.insert(c);
        }
        Ok(Fragment { logic, excluded })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DefinabilityError {
    #[error("classical negation is not definable in {0}")]
    NotDefinable(Fragment),
    #[error("classical negation is definable in {0}")]
    Definable(Fragment),
    #[error("{0} is not one of the classified fragments")]
    Unclassified(Fragment),
    #[error("unknown fragment `{0}`")]
    BadName(String),
    #[error(transparent)]
    Prove(#[from] ProveError),
}

/// The defining formula for classical negation of `arg`.
pub fn defined_negation(frag: &Fragment, arg: &Formula) -> Result<Formula, DefinabilityError> {
    let a = arg.clone();
    match frag.case() {
        Some(Case::ImDet) => Ok(Formula::or(Formula::im(a.clone()), Formula::det(a))),
        Some(Case::UnCon) => Ok(Formula::and(Formula::un(a.clone()), Formula::con(a))),
        Some(Case::Mixed) => {
            let x = if frag.logic == Logic::PKF { Formula::un(a.clone()) } else { Formula::im(a.clone()) };
            Ok(Formula::or(Formula::and(x, Formula::con(a.clone())), Formula::det(a)))
        }
        Some(Case::Separating(_)) => Err(DefinabilityError::NotDefinable(frag.clone())),
        None => Err(DefinabilityError::Unclassified(frag.clone())),
    }
}

/// The separating model for a non-definable fragment, with source world
/// 0 and target world 1; `p` is true at 0 only.
pub fn nondefinability_model(frag: &Fragment) -> Result<(Model, usize, usize), DefinabilityError> {
    match frag.case() {
        Some(Case::Separating(edges)) => {
            let frame = Frame::new(2, edges.iter().copied()).expect("two-world frame");
            let m = Model::new(frame).with_var("p", [0]).expect("valid variable");
            Ok((m, 0, 1))
        }
        Some(_) => Err(DefinabilityError::Definable(frag.clone())),
        None => Err(DefinabilityError::Unclassified(frag.clone())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondefinabilityReport {
    pub fragment: Fragment,
    pub max_size: usize,
    /// Formulas checked, per connective count `0..=max_size`.
    pub by_size: Vec<u64>,
    /// Smallest witnesses false at the source but true at the target.
    pub violations: Vec<Formula>,
}

impl NondefinabilityReport {
    pub fn checked(&self) -> u64 {
        self.by_size.iter().sum()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "fragment": self.fragment.to_string(),
            "max_size": self.max_size,
            "checked": self.checked(),
            "by_size": self.by_size,
            "violations": self.violations.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "kind": "bounded certification",
        })
    }
}

impl fmt::Display for NondefinabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fragment: {}", self.fragment)?;
        writeln!(f, "bounded certification over formulas in p with at most {} connectives", self.max_size)?;
        writeln!(f, "(other atoms take p's values in the separating model, so p alone suffices)")?;
        for (k, n) in self.by_size.iter().enumerate() {
            writeln!(f, "  size {k}: {n} formulas")?;
        }
        writeln!(f, "checked: {}", self.checked())?;
        if self.violations.is_empty() {
            write!(f, "violations: none")
        } else {
            writeln!(f, "violations: {}", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

/// Check that every formula of the fragment false at the source world is
/// false at the target world.
///
/// A formula's value in the separating model is a function of its
/// arguments' truth sets, so formulas are counted by truth set, size by
/// size, rather than listed: `by_size` is exact, and one witness per
/// truth set is kept.
pub fn certify_nondefinability(frag: &Fragment, max_size: usize) -> Result<NondefinabilityReport, DefinabilityError> {
    let (model, w, v) = nondefinability_model(frag)?;
    Ok(certify_on(frag, &model, w, v, max_size))
}

fn certify_on(frag: &Fragment, model: &Model, w: usize, v: usize, max_size: usize) -> NondefinabilityReport {
    let frame = &model.frame;
    let cs = frag.connectives();
    let has = |c| cs.contains(&c);
    let det_partner = |x: WorldSet| if frag.logic == Logic::PKF { un_mask(frame, x) } else { im_mask(frame, x) };
    let all: WorldSet = 0b11;

    type Classes = BTreeMap<WorldSet, (u64, Formula)>;
    fn add(classes: &mut Classes, mask: WorldSet, count: u64, witness: impl FnOnce() -> Formula) {
        match classes.get_mut(&mask) {
            Some(e) => e.0 += count,
            None => {
                classes.insert(mask, (count, witness()));
            }
        }
    }

    let mut by_size: Vec<Classes> = Vec::new();
    for k in 0..=max_size {
        let mut here = Classes::new();
        if k == 0 {
            here.insert(model.var_mask("p"), (1, Formula::var("p")));
        }
        if k == 1 {
            if has(Connective::Top) {
                add(&mut here, all, 1, || Formula::Top);
            }
            if has(Connective::Bot) {
                add(&mut here, 0, 1, || Formula::Bot);
            }
        }
        if k >= 1 {
            for (&x, (n, g)) in &by_size[k - 1] {
                let u = un_mask(frame, x);
                if has(Connective::Un) {
                    add(&mut here, u, *n, || Formula::un(g.clone()));
                }
                if has(Connective::Im) {
                    add(&mut here, im_mask(frame, x), *n, || Formula::im(g.clone()));
                }
                if has(Connective::Con) {
                    add(&mut here, all & !(x & u), *n, || Formula::con(g.clone()));
                }
                if has(Connective::Det) {
                    add(&mut here, all & !(x | det_partner(x)), *n, || Formula::det(g.clone()));
                }
            }
            for i in 0..k {
                let (left, right) = (&by_size[i], &by_size[k - 1 - i]);
                for (&a, (na, ga)) in left {
                    for (&b, (nb, gb)) in right {
                        if has(Connective::And) {
                            add(&mut here, a & b, na * nb, || Formula::and(ga.clone(), gb.clone()));
                        }
                        if has(Connective::Or) {
                            add(&mut here, a | b, na * nb, || Formula::or(ga.clone(), gb.clone()));
                        }
                    }
                }
            }
        }
        by_size.push(here);
    }

    let bad = |mask: WorldSet| mask >> w & 1 == 0 && mask >> v & 1 == 1;
    let mut violations = Vec::new();
    for classes in &by_size {
        for (&mask, (_, g)) in classes {
            if bad(mask) {
                violations.push(g.clone());
            }
        }
    }
    violations.sort();
    violations.dedup();
    NondefinabilityReport {
        fragment: frag.clone(),
        max_size,
        by_size: by_size.iter().map(|c| c.values().map(|e| e.0).sum()).collect(),
        violations,
    }
}

/// Every formula over `p` with exactly `size` connectives drawn from
/// `connectives`, in no particular order. Exponential; meant for small
/// sizes and cross-checks.
pub fn formulas_of_size(connectives: &[Connective], size: usize) -> Vec<Formula> {
    let mut table: Vec<Vec<Formula>> = Vec::new();
    for k in 0..=size {
        let mut here = Vec::new();
        if k == 0 {
            here.push(Formula::var("p"));
        }
        for &c in connectives {
            match c {
                Connective::Top if k == 1 => here.push(Formula::Top),
                Connective::Bot if k == 1 => here.push(Formula::Bot),
                Connective::Un | Connective::Im | Connective::Con | Connective::Det if k >= 1 => {
                    for g in &table[k - 1] {
                        here.push(match c {
                            Connective::Un => Formula::un(g.clone()),
                            Connective::Im => Formula::im(g.clone()),
                            Connective::Con => Formula::con(g.clone()),
                            _ => Formula::det(g.clone()),
                        });
                    }
                }
                Connective::And | Connective::Or if k >= 1 => {
                    for i in 0..k {
                        for a in &table[i] {
                            for b in &table[k - 1 - i] {
                                here.push(if c == Connective::And {
                                    Formula::and(a.clone(), b.clone())
                                } else {
                                    Formula::or(a.clone(), b.clone())
                                });
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        table.push(here);
    }
    table.pop().unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofCheck {
    pub sequent: Sequent,
    pub proved: bool,
    pub used_cut: bool,
    pub checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinabilityReport {
    pub fragment: Fragment,
    pub definition: Formula,
    pub proofs: Vec<ProofCheck>,
    pub max_worlds: usize,
    /// Models visited by the semantic check.
    pub models: u64,
    /// The first few (model, world) pairs where the definition is not
    /// classical.
    pub failures: Vec<(Model, usize)>,
}

impl DefinabilityReport {
    pub fn passed(&self) -> bool {
        self.proofs.iter().all(|p| p.proved && p.checked) && self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "fragment": self.fragment.to_string(),
            "definition": self.definition.to_string(),
            "proofs": self.proofs.iter().map(|p| json!({
                "sequent": p.sequent.to_string(),
                "proved": p.proved,
                "used_cut": p.used_cut,
                "checked": p.checked,
            })).collect::<Vec<_>>(),
            "max_worlds": self.max_worlds,
            "models": self.models,
            "failures": self.failures.iter().map(|(m, w)| json!({
                "model": serde_json::from_str::<serde_json::Value>(&m.to_json()).expect("model JSON"),
                "world": w,
            })).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

impl fmt::Display for DefinabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fragment: {}", self.fragment)?;
        writeln!(f, "~p := {}", self.definition)?;
        for p in &self.proofs {
            let verdict = match (p.proved, p.used_cut) {
                (false, _) => "unprovable",
                (true, false) => "provable without cut",
                (true, true) => "provable with analytic cut",
            };
            writeln!(f, "  {}: {verdict}", p.sequent)?;
        }
        writeln!(
            f,
            "semantic check: {} {} models with at most {} worlds, {} failures",
            self.models,
            FrameClass::of(self.fragment.logic).name(),
            self.max_worlds,
            self.failures.len()
        )?;
        write!(f, "{}", if self.passed() { "passed" } else { "FAILED" })
    }
}

/// Prove `=> p, ~p` and `p, ~p =>`, then check `~p` against classical
/// negation on every model of the logic's frame class up to `max_worlds`.
pub fn certify_definability(frag: &Fragment, max_worlds: usize) -> Result<DefinabilityReport, DefinabilityError> {
    let p = Formula::var("p");
    let neg = defined_negation(frag, &p)?;
    let logic = frag.logic;
    let mut proofs = Vec::new();
    for s in [
        Sequent::new([], [p.clone(), neg.clone()]),
        Sequent::new([p.clone(), neg.clone()], []),
    ] {
        let mut found = None;
        for policy in [CutPolicy::NoCut, CutPolicy::AnalyticCut] {
            if let Some(d) = prove(logic, &s, &[], policy)? {
                found = Some((d, policy));
                break;
            }
        }
        proofs.push(match found {
            Some((d, policy)) => ProofCheck {
                used_cut: d.uses_cut(),
                checked: check_derivation(logic, &d, &[], policy).is_ok(),
                sequent: s,
                proved: true,
            },
            None => ProofCheck { sequent: s, proved: false, used_cut: false, checked: false },
        });
    }

    let mut models = 0u64;
    let mut failures = Vec::new();
    for n in 1..=max_worlds {
        for_each_frame(n, FrameClass::of(logic), |frame| {
            for mask in 0..1u64 << n {
                let m = Model::new(frame.clone()).with_var("p", (0..n).filter(|w| mask >> w & 1 == 1)).expect("valid");
                models += 1;
                let classical = crate::kripke::all_worlds(n) & !mask;
                let got = m.truth_set(&neg);
                if got != classical && failures.len() < 5 {
                    let w = (got ^ classical).trailing_zeros() as usize;
                    failures.push((m, w));
                }
            }
            true
        });
    }
    Ok(DefinabilityReport { fragment: frag.clone(), definition: neg, proofs, max_worlds, models, failures })
}
