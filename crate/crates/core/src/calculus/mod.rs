//! Sequent calculi for PK and its four extensions: rule schemas,
//! derivation checking, and an analytic proof-search decision procedure.

mod check;
mod export;
mod search;
mod universe;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{closure, Formula, Logic, Sequent, SyntaxError};

pub use check::{check_derivation, CheckError};
pub use export::ExportError;
pub use search::{entails, prove, prove_with_budget, SearchStats, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Id,
    Cut,
    WL,
    WR,
    BotL,
    TopR,
    AndL,
    AndR,
    OrL,
    OrR,
    UnL,
    ImR,
    ConL,
    ConR,
    DetL,
    DetR,
    D,
    UnRT,
    ImLT,
    Fun,
    B1,
    B2,
    Hyp,
}

impl RuleId {
    pub const ALL: [RuleId; 23] = [
        RuleId::Id,
        RuleId::Cut,
        RuleId::WL,
        RuleId::WR,
        RuleId::BotL,
        RuleId::TopR,
        RuleId::AndL,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR,
        RuleId::UnL,
        RuleId::ImR,
        RuleId::ConL,
        RuleId::ConR,
        RuleId::DetL,
        RuleId::DetR,
        RuleId::D,
        RuleId::UnRT,
        RuleId::ImLT,
        RuleId::Fun,
        RuleId::B1,
        RuleId::B2,
        RuleId::Hyp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Id => "Id",
            RuleId::Cut => "Cut",
            RuleId::WL => "WL",
            RuleId::WR => "WR",
            RuleId::BotL => "BotL",
            RuleId::TopR => "TopR",
            RuleId::AndL => "AndL",
            RuleId::AndR => "AndR",
            RuleId::OrL => "OrL",
            RuleId::OrR => "OrR",
            RuleId::UnL => "UnL",
            RuleId::ImR => "ImR",
            RuleId::ConL => "ConL",
            RuleId::ConR => "ConR",
            RuleId::DetL => "DetL",
            RuleId::DetR => "DetR",
            RuleId::D => "D",
            RuleId::UnRT => "UnR_T",
            RuleId::ImLT => "ImL_T",
            RuleId::Fun => "Fun",
            RuleId::B1 => "B1",
            RuleId::B2 => "B2",
            RuleId::Hyp => "Hyp",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.name() == name)
    }

    /// Whether the rule belongs to the logic's calculus. Cut is always
    /// listed here; whether a cut is acceptable depends on the policy.
    pub fn available_in(self, logic: Logic) -> bool {
        use RuleId::*;
        match self {
            UnL | ImR => matches!(logic, Logic::PK | Logic::PKD | Logic::PKT),
            D => logic == Logic::PKD,
            UnRT | ImLT => logic == Logic::PKT,
            Fun => logic == Logic::PKF,
            B1 | B2 => logic == Logic::PKB,
            _ => true,
        }
    }

    /// Rules whose principal formula must be recorded in the parameters.
    pub fn has_principal(self) -> bool {
        !matches!(self, RuleId::D | RuleId::Fun | RuleId::Hyp)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutPolicy {
    NoCut,
    /// Cut formulas must occur in one of the hypotheses.
    CutOnHypotheses,
    /// Cut formulas must lie in the closure of the goal and hypotheses.
    AnalyticCut,
    FullCut,
}

impl CutPolicy {
    pub const ALL: [CutPolicy; 4] =
        [CutPolicy::NoCut, CutPolicy::CutOnHypotheses, CutPolicy::AnalyticCut, CutPolicy::FullCut];

    /// Cut-free search is complete for every system but PKB; hypotheses
    /// need cuts on their own formulas.
    pub fn default_for(logic: Logic, has_hypotheses: bool) -> CutPolicy {
        match (logic, has_hypotheses) {
            (Logic::PKB, _) => CutPolicy::AnalyticCut,
            (_, true) => CutPolicy::CutOnHypotheses,
            (_, false) => CutPolicy::NoCut,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CutPolicy::NoCut => "no-cut",
            CutPolicy::CutOnHypotheses => "cut-on-hypotheses",
            CutPolicy::AnalyticCut => "analytic-cut",
            CutPolicy::FullCut => "full-cut",
        }
    }
}

impl std::str::FromStr for CutPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<CutPolicy, String> {
        CutPolicy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown cut policy `{s}`"))
    }
}

/// Schematic parameters of one rule application. `principal` is the
/// principal formula as it occurs in the conclusion (the cut formula for
/// Cut, the added formula for WL/WR).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RuleParams {
    pub principal: Option<Formula>,
    pub gamma: BTreeSet<Formula>,
    pub delta: BTreeSet<Formula>,
    pub gamma_prime: BTreeSet<Formula>,
    pub delta_prime: BTreeSet<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub rule: RuleId,
    pub params: RuleParams,
    pub premises: Vec<Derivation>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ProveError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("search budget of {0} expanded goals exhausted")]
    Resource(usize),
}

fn set<I: IntoIterator<Item = Formula>>(it: I) -> BTreeSet<Formula> {
    it.into_iter().collect()
}

fn with(base: &BTreeSet<Formula>, extra: &[&Formula]) -> BTreeSet<Formula> {
    let mut out = base.clone();
    out.extend(extra.iter().map(|f| (*f).clone()));
    out
}

fn wrap(fs: &BTreeSet<Formula>, op: fn(Formula) -> Formula) -> BTreeSet<Formula> {
    set(fs.iter().cloned().map(op))
}

fn union(a: &BTreeSet<Formula>, b: &BTreeSet<Formula>) -> BTreeSet<Formula> {
    a.union(b).cloned().collect()
}

/// The conclusion and premises (in schema order) that `rule` produces for
/// the given parameters, or a description of why the parameters do not fit.
pub fn instantiate(
    logic: Logic,
    rule: RuleId,
    p: &RuleParams,
) -> Result<(Sequent, Vec<Sequent>), String> {
    use RuleId::*;
    let (g, d) = (&p.gamma, &p.delta);
    let seq = |l: BTreeSet<Formula>, r: BTreeSet<Formula>| Sequent { left: l, right: r };
    let primed = !p.gamma_prime.is_empty() || !p.delta_prime.is_empty();
    if primed && !matches!(rule, B1 | B2) {
        return Err(format!("{rule} takes no primed parameter sets"));
    }
    if rule.has_principal() != p.principal.is_some() {
        return Err(if rule.has_principal() {
            format!("{rule} needs a principal formula")
        } else {
            format!("{rule} takes no principal formula")
        });
    }
    let x_of = |a: Formula| if logic == Logic::PKF { Formula::un(a) } else { Formula::im(a) };
    let shape_err = |what: &str| Err(format!("principal of {rule} must be {what}"));
    let phi = p.principal.as_ref();
    Ok(match (rule, phi) {
        (Id, Some(f)) => (seq(with(g, &[f]), with(d, &[f])), vec![]),
        (BotL, Some(f)) => {
            if *f != Formula::Bot {
                return shape_err("bot");
            }
            (seq(with(g, &[f]), d.clone()), vec![])
        }
        (TopR, Some(f)) => {
            if *f != Formula::Top {
                return shape_err("top");
            }
            (seq(g.clone(), with(d, &[f])), vec![])
        }
        (WL, Some(f)) => (seq(with(g, &[f]), d.clone()), vec![seq(g.clone(), d.clone())]),
        (WR, Some(f)) => (seq(g.clone(), with(d, &[f])), vec![seq(g.clone(), d.clone())]),
        (Cut, Some(f)) => (
            seq(g.clone(), d.clone()),
            vec![seq(g.clone(), with(d, &[f])), seq(with(g, &[f]), d.clone())],
        ),
        (AndL, Some(f @ Formula::And(a, b))) => {
            (seq(with(g, &[f]), d.clone()), vec![seq(with(g, &[a, b]), d.clone())])
        }
        (AndR, Some(f @ Formula::And(a, b))) => (
            seq(g.clone(), with(d, &[f])),
            vec![seq(g.clone(), with(d, &[a])), seq(g.clone(), with(d, &[b]))],
        ),
        (OrL, Some(f @ Formula::Or(a, b))) => (
            seq(with(g, &[f]), d.clone()),
            vec![seq(with(g, &[a]), d.clone()), seq(with(g, &[b]), d.clone())],
        ),
        (OrR, Some(f @ Formula::Or(a, b))) => {
            (seq(g.clone(), with(d, &[f])), vec![seq(g.clone(), with(d, &[a, b]))])
        }
        (AndL | AndR, _) => return shape_err("a conjunction"),
        (OrL | OrR, _) => return shape_err("a disjunction"),
        (UnL, Some(f @ Formula::Un(a))) => (
            seq(with(&wrap(d, Formula::im), &[f]), wrap(g, Formula::un)),
            vec![seq(g.clone(), with(d, &[a]))],
        ),
        (ImR, Some(f @ Formula::Im(a))) => (
            seq(wrap(d, Formula::im), with(&wrap(g, Formula::un), &[f])),
            vec![seq(with(g, &[a]), d.clone())],
        ),
        (ConL, Some(f @ Formula::Con(a))) => {
            let ua = Formula::un((**a).clone());
            (
                seq(with(g, &[f]), d.clone()),
                vec![seq(g.clone(), with(d, &[a])), seq(g.clone(), with(d, &[&ua]))],
            )
        }
        (ConR, Some(f @ Formula::Con(a))) => {
            let ua = Formula::un((**a).clone());
            (seq(g.clone(), with(d, &[f])), vec![seq(with(g, &[a, &ua]), d.clone())])
        }
        (DetL, Some(f @ Formula::Det(a))) => {
            let xa = x_of((**a).clone());
            (seq(with(g, &[f]), d.clone()), vec![seq(g.clone(), with(d, &[a, &xa]))])
        }
        (DetR, Some(f @ Formula::Det(a))) => {
            let xa = x_of((**a).clone());
            (
                seq(g.clone(), with(d, &[f])),
                vec![seq(with(g, &[a]), d.clone()), seq(with(g, &[&xa]), d.clone())],
            )
        }
        (D, None) => (seq(wrap(d, Formula::im), wrap(g, Formula::un)), vec![seq(g.clone(), d.clone())]),
        (Fun, None) => (seq(wrap(d, Formula::un), wrap(g, Formula::un)), vec![seq(g.clone(), d.clone())]),
        (UnRT, Some(f @ Formula::Un(a))) => {
            (seq(g.clone(), with(d, &[f])), vec![seq(with(g, &[a]), d.clone())])
        }
        (ImLT, Some(f @ Formula::Im(a))) => {
            (seq(with(g, &[f]), d.clone()), vec![seq(g.clone(), with(d, &[a]))])
        }
        (B1, Some(f @ Formula::Im(a))) => {
            let (gp, dp) = (&p.gamma_prime, &p.delta_prime);
            (
                seq(union(&wrap(d, Formula::im), dp), with(&union(&wrap(g, Formula::un), gp), &[f])),
                vec![seq(with(&union(g, &wrap(gp, Formula::un)), &[a]), union(d, &wrap(dp, Formula::im)))],
            )
        }
        (B2, Some(f @ Formula::Un(a))) => {
            let (gp, dp) = (&p.gamma_prime, &p.delta_prime);
            (
                seq(with(&union(&wrap(d, Formula::im), dp), &[f]), union(&wrap(g, Formula::un), gp)),
                vec![seq(union(g, &wrap(gp, Formula::un)), with(&union(d, &wrap(dp, Formula::im)), &[a]))],
            )
        }
        (UnL | UnRT | B2, _) => return shape_err("an un formula"),
        (ImR | ImLT | B1, _) => return shape_err("an im formula"),
        (ConL | ConR, _) => return shape_err("an oun formula"),
        (DetL | DetR, _) => return shape_err("an oim formula"),
        (Hyp, None) => return Err("Hyp nodes are checked against the hypothesis set".into()),
        (Id | BotL | TopR | WL | WR | Cut, None) | (D | Fun | Hyp, Some(_)) => unreachable!(),
    })
}

fn unwrap_all(fs: &BTreeSet<Formula>, un: bool) -> BTreeSet<Formula> {
    fs.iter()
        .filter_map(|f| match f {
            Formula::Un(a) if un => Some((**a).clone()),
            Formula::Im(a) if !un => Some((**a).clone()),
            _ => None,
        })
        .collect()
}

impl Derivation {
    /// Build a node from its conclusion, rule, principal and premises,
    /// solving for the parameter sets. Fails if no instantiation of the
    /// schema matches exactly.
    pub fn infer(
        logic: Logic,
        rule: RuleId,
        conclusion: Sequent,
        principal: Option<Formula>,
        premises: Vec<Derivation>,
    ) -> Result<Derivation, String> {
        use RuleId::*;
        let (l, r) = (&conclusion.left, &conclusion.right);
        let mut candidates: Vec<RuleParams> = Vec::new();
        let base = RuleParams { principal: principal.clone(), ..RuleParams::default() };
        match rule {
            Hyp => candidates.push(base),
            Cut => candidates.push(RuleParams { gamma: l.clone(), delta: r.clone(), ..base }),
            UnL | ImR | D => candidates.push(RuleParams {
                gamma: unwrap_all(r, true),
                delta: unwrap_all(l, false),
                ..base
            }),
            Fun => candidates.push(RuleParams {
                gamma: unwrap_all(r, true),
                delta: unwrap_all(l, true),
                ..base
            }),
            B1 | B2 => {
                let prem = premises.first().map(|d| &d.conclusion).ok_or("B1/B2 need a premise")?;
                let (pl, pr) = (&prem.left, &prem.right);
                candidates.push(RuleParams {
                    gamma: unwrap_all(r, true).into_iter().filter(|x| pl.contains(x)).collect(),
                    delta: unwrap_all(l, false).into_iter().filter(|x| pr.contains(x)).collect(),
                    gamma_prime: r.iter().filter(|x| pl.contains(&Formula::un((*x).clone()))).cloned().collect(),
                    delta_prime: l.iter().filter(|x| pr.contains(&Formula::im((*x).clone()))).cloned().collect(),
                    ..base
                });
            }
            _ => {
                let drop = |side: &BTreeSet<Formula>| {
                    let mut s = side.clone();
                    if let Some(f) = &principal {
                        s.remove(f);
                    }
                    s
                };
                for g in [drop(l), l.clone()] {
                    for d in [drop(r), r.clone()] {
                        candidates.push(RuleParams { gamma: g.clone(), delta: d, ..base.clone() });
                    }
                }
            }
        }
        let mut last = String::from("no candidate parameters");
        for params in candidates {
            let node = Derivation { conclusion: conclusion.clone(), rule, params, premises: Vec::new() };
            if rule == Hyp {
                if !premises.is_empty() {
                    return Err("Hyp takes no premises".into());
                }
                return Ok(node);
            }
            match check::node_mismatch(logic, &node, premises.iter().map(|d| &d.conclusion)) {
                None => return Ok(Derivation { premises, ..node }),
                Some(m) => last = m,
            }
        }
        Err(last)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn uses_cut(&self) -> bool {
        self.rule == RuleId::Cut || self.premises.iter().any(Derivation::uses_cut)
    }

    pub fn rules(&self) -> BTreeSet<RuleId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |d| {
            out.insert(d.rule);
        });
        out
    }

    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Derivation)) {
        visit(self);
        for p in &self.premises {
            p.walk(visit);
        }
    }

    /// Every formula occurring in some sequent of the tree.
    pub fn formulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.walk(&mut |d| out.extend(d.conclusion.formulas().cloned()));
        out
    }

    /// Whether every formula in the tree lies in the closure of the
    /// endsequent and hypotheses under the logic's order.
    pub fn is_analytic(&self, logic: Logic, hypotheses: &[Sequent]) -> Result<bool, SyntaxError> {
        let seeds: Vec<&Formula> =
            self.conclusion.formulas().chain(hypotheses.iter().flat_map(|h| h.formulas())).collect();
        let u = closure(seeds, logic.order())?;
        Ok(self.formulas().is_subset(&u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_sequent};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn s(t: &str) -> Sequent {
        parse_sequent(t).unwrap()
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(RuleId::from_name(r.name()), Some(r));
        }
        assert_eq!(RuleId::from_name("UnR_T"), Some(RuleId::UnRT));
    }

    #[test]
    fn availability() {
        assert!(RuleId::UnL.available_in(Logic::PKD));
        assert!(!RuleId::UnL.available_in(Logic::PKF));
        assert!(!RuleId::UnL.available_in(Logic::PKB));
        assert!(RuleId::B2.available_in(Logic::PKB));
        assert!(!RuleId::D.available_in(Logic::PKT));
        assert!(RuleId::UnRT.available_in(Logic::PKT));
        assert!(RuleId::DetL.available_in(Logic::PKF));
    }

    #[test]
    fn default_policies() {
        assert_eq!(CutPolicy::default_for(Logic::PK, false), CutPolicy::NoCut);
        assert_eq!(CutPolicy::default_for(Logic::PKF, true), CutPolicy::CutOnHypotheses);
        assert_eq!(CutPolicy::default_for(Logic::PKB, false), CutPolicy::AnalyticCut);
    }

    #[test]
    fn unl_instance() {
        let params = RuleParams {
            principal: Some(f("un p")),
            gamma: [f("q")].into(),
            delta: [f("r")].into(),
            ..RuleParams::default()
        };
        let (c, ps) = instantiate(Logic::PK, RuleId::UnL, &params).unwrap();
        assert_eq!(c, s("im r, un p => un q"));
        assert_eq!(ps, vec![s("q => p, r")]);
    }

    #[test]
    fn det_rules_switch_partner_in_pkf() {
        let params = RuleParams { principal: Some(f("oim p")), ..RuleParams::default() };
        let (_, ps) = instantiate(Logic::PK, RuleId::DetL, &params).unwrap();
        assert_eq!(ps, vec![s("=> p, im p")]);
        let (_, ps) = instantiate(Logic::PKF, RuleId::DetL, &params).unwrap();
        assert_eq!(ps, vec![s("=> p, un p")]);
    }

    #[test]
    fn b1_instance() {
        let params = RuleParams {
            principal: Some(f("im p")),
            gamma: [f("a")].into(),
            delta: [f("b")].into(),
            gamma_prime: [f("c")].into(),
            delta_prime: [f("d")].into(),
        };
        let (c, ps) = instantiate(Logic::PKB, RuleId::B1, &params).unwrap();
        assert_eq!(c, s("im b, d => im p, un a, c"));
        assert_eq!(ps, vec![s("a, un c, p => b, im d")]);
    }

    #[test]
    fn infer_recovers_contexts() {
        let id = Derivation::infer(Logic::PK, RuleId::Id, s("p => p"), Some(f("p")), vec![]).unwrap();
        let d = Derivation::infer(Logic::PK, RuleId::UnL, s("un p => un p"), Some(f("un p")), vec![id]).unwrap();
        assert_eq!(d.params.gamma, [f("p")].into());
        assert!(d.params.delta.is_empty());

        let id = Derivation::infer(Logic::PKB, RuleId::Id, s("un p => un p"), Some(f("un p")), vec![]).unwrap();
        let b2 = Derivation::infer(Logic::PKB, RuleId::B2, s("un un p => p"), Some(f("un un p")), vec![id]).unwrap();
        assert_eq!(b2.params.gamma_prime, [f("p")].into());

        assert!(Derivation::infer(Logic::PK, RuleId::Id, s("p => q"), Some(f("p")), vec![]).is_err());
    }
}
