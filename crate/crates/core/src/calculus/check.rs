use std::collections::BTreeSet;
use std::fmt;

use super::{instantiate, CutPolicy, Derivation, RuleId};
use crate::syntax::{closure, Formula, Logic, Sequent};

/// One rejected node. `path` lists premise indices from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckError {
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub message: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "at root")?;
        } else {
            let p: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            write!(f, "at {}", p.join("."))?;
        }
        write!(f, " ({}): {}", self.rule, self.message)
    }
}

impl std::error::Error for CheckError {}

/// Compare a node against the schema its parameters instantiate.
pub(super) fn node_mismatch<'a>(
    logic: Logic,
    node: &Derivation,
    premises: impl Iterator<Item = &'a Sequent>,
) -> Option<String> {
    let (conclusion, expected) = match instantiate(logic, node.rule, &node.params) {
        Ok(x) => x,
        Err(m) => return Some(m),
    };
    if conclusion != node.conclusion {
        return Some(format!("conclusion should be `{conclusion}`, found `{}`", node.conclusion));
    }
    let premises: Vec<&Sequent> = premises.collect();
    if premises.len() != expected.len() {
        return Some(format!("expected {} premises, found {}", expected.len(), premises.len()));
    }
    for (k, (want, got)) in expected.iter().zip(premises).enumerate() {
        if want != got {
            return Some(format!("premise {k} should be `{want}`, found `{got}`"));
        }
    }
    None
}

/// Check every node of `d`. Sequents are compared as sets, exactly:
/// weakening must appear as its own WL/WR node.
pub fn check_derivation(
    logic: Logic,
    d: &Derivation,
    hypotheses: &[Sequent],
    policy: CutPolicy,
) -> Result<(), Vec<CheckError>> {
    let hyp_formulas: BTreeSet<&Formula> = hypotheses.iter().flat_map(|h| h.formulas()).collect();
    let analytic = {
        let seeds = d.conclusion.formulas().chain(hyp_formulas.iter().copied());
        closure(seeds, logic.order()).unwrap_or_default()
    };
    let mut errors = Vec::new();
    let mut path = Vec::new();
    visit(logic, d, hypotheses, policy, &hyp_formulas, &analytic, &mut path, &mut errors);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

#[allow(clippy::too_many_arguments)]
fn visit(
    logic: Logic,
    d: &Derivation,
    hypotheses: &[Sequent],
    policy: CutPolicy,
    hyp_formulas: &BTreeSet<&Formula>,
    analytic: &BTreeSet<Formula>,
    path: &mut Vec<usize>,
    errors: &mut Vec<CheckError>,
) {
    let mut fail = |message: String| {
        errors.push(CheckError { path: path.clone(), rule: d.rule, message });
    };
    if logic == Logic::PKF && d.conclusion.has_im() {
        fail("PKF sequents must be im-free".into());
    }
    if !d.rule.available_in(logic) {
        fail(format!("{} is not a rule of {logic}", d.rule));
    } else if d.rule == RuleId::Hyp {
        if !d.premises.is_empty() {
            fail("Hyp takes no premises".into());
        }
        if !hypotheses.contains(&d.conclusion) {
            fail(format!("`{}` is not a hypothesis", d.conclusion));
        }
    } else {
        if d.rule == RuleId::Cut {
            if let Some(c) = &d.params.principal {
                let allowed = match policy {
                    CutPolicy::NoCut => false,
                    CutPolicy::CutOnHypotheses => hyp_formulas.contains(c),
                    CutPolicy::AnalyticCut => analytic.contains(c),
                    CutPolicy::FullCut => true,
                };
                if !allowed {
                    fail(format!("cut on `{c}` violates the {} policy", policy.name()));
                }
            }
        }
        if let Some(m) = node_mismatch(logic, d, d.premises.iter().map(|p| &p.conclusion)) {
            fail(m);
        }
    }
    for (k, p) in d.premises.iter().enumerate() {
        path.push(k);
        visit(logic, p, hypotheses, policy, hyp_formulas, analytic, path, errors);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::RuleParams;
    use crate::parser::{parse_formula, parse_sequent};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn s(t: &str) -> Sequent {
        parse_sequent(t).unwrap()
    }

    fn leaf(rule: RuleId, concl: &str, principal: &str) -> Derivation {
        Derivation::infer(Logic::PK, rule, s(concl), Some(f(principal)), vec![]).unwrap()
    }

    #[test]
    fn id_needs_a_shared_formula() {
        let bad = Derivation {
            conclusion: s("p => q"),
            rule: RuleId::Id,
            params: RuleParams { principal: Some(f("p")), ..RuleParams::default() },
            premises: vec![],
        };
        let errs = check_derivation(Logic::PK, &bad, &[], CutPolicy::NoCut).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].path.is_empty());
    }

    #[test]
    fn unl_with_wrong_premise_is_rejected() {
        // premise lacks the principal's argument on the right
        let premise = leaf(RuleId::Id, "q => q", "q");
        let node = Derivation {
            conclusion: s("un p => un q"),
            rule: RuleId::UnL,
            params: RuleParams {
                principal: Some(f("un p")),
                gamma: [f("q")].into(),
                ..RuleParams::default()
            },
            premises: vec![premise],
        };
        let errs = check_derivation(Logic::PK, &node, &[], CutPolicy::NoCut).unwrap_err();
        assert_eq!(errs[0].rule, RuleId::UnL);
    }

    #[test]
    fn weakening_is_not_implicit() {
        // Id concluding a larger sequent is fine, but UnL may not absorb extra context
        let premise = leaf(RuleId::Id, "p => p", "p");
        let node = Derivation::infer(Logic::PK, RuleId::UnL, s("un p, q => un p"), Some(f("un p")), vec![premise]);
        assert!(node.is_err());
    }

    #[test]
    fn rules_outside_the_logic_are_rejected() {
        let premise = leaf(RuleId::Id, "p => p", "p");
        let d = Derivation::infer(Logic::PKD, RuleId::D, s("im p => un p"), None, vec![premise]).unwrap();
        assert!(check_derivation(Logic::PKD, &d, &[], CutPolicy::NoCut).is_ok());
        let errs = check_derivation(Logic::PK, &d, &[], CutPolicy::NoCut).unwrap_err();
        assert!(errs[0].message.contains("not a rule of PK"));
    }

    #[test]
    fn cut_policies() {
        let l = leaf(RuleId::Id, "p => p, r", "p");
        let r = leaf(RuleId::Id, "p, r => p", "p");
        let d = Derivation::infer(Logic::PK, RuleId::Cut, s("p => p"), Some(f("r")), vec![l, r]).unwrap();
        assert!(check_derivation(Logic::PK, &d, &[], CutPolicy::FullCut).is_ok());
        assert!(check_derivation(Logic::PK, &d, &[], CutPolicy::NoCut).is_err());
        assert!(check_derivation(Logic::PK, &d, &[], CutPolicy::AnalyticCut).is_err());
        assert!(check_derivation(Logic::PK, &d, &[s("r =>")], CutPolicy::CutOnHypotheses).is_ok());
    }

    #[test]
    fn hyp_membership() {
        let d = Derivation::infer(Logic::PK, RuleId::Hyp, s("p => q"), None, vec![]).unwrap();
        assert!(check_derivation(Logic::PK, &d, &[s("p => q")], CutPolicy::NoCut).is_ok());
        assert!(check_derivation(Logic::PK, &d, &[s("p => q, r")], CutPolicy::NoCut).is_err());
    }

    #[test]
    fn errors_are_reported_per_node() {
        let bad_leaf = Derivation {
            conclusion: s("p => q"),
            rule: RuleId::Id,
            params: RuleParams { principal: Some(f("p")), ..RuleParams::default() },
            premises: vec![],
        };
        let root = Derivation {
            conclusion: s("p, r => q"),
            rule: RuleId::WL,
            params: RuleParams { principal: Some(f("r")), gamma: [f("p")].into(), delta: [f("q")].into(), ..RuleParams::default() },
            premises: vec![bad_leaf],
        };
        let errs = check_derivation(Logic::PK, &root, &[], CutPolicy::NoCut).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].path, vec![0]);
        assert_eq!(errs[0].to_string(), "at 0 (Id): conclusion should be `p => p`, found `p => q`");
    }
}
