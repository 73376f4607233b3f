//! Derivations as JSON trees and as indented text.
//!
//! Text lines read `<sequent>  (<rule>)` or `<sequent>  (<rule> on <formula>)`,
//! premises indented two spaces below their conclusion. The text form omits
//! parameter sets; reading it back solves for them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Derivation, RuleId, RuleParams};
use crate::parser::{parse_formula, parse_sequent};
use crate::syntax::{Formula, Logic};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExportError {
    #[error("malformed derivation JSON: {0}")]
    Json(String),
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    rule: String,
    conclusion: String,
    #[serde(default)]
    params: JsonParams,
    #[serde(default)]
    premises: Vec<JsonNode>,
}

#[derive(Default, Serialize, Deserialize)]
struct JsonParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal: Option<String>,
    #[serde(default)]
    gamma: Vec<String>,
    #[serde(default)]
    delta: Vec<String>,
    #[serde(default)]
    gamma_prime: Vec<String>,
    #[serde(default)]
    delta_prime: Vec<String>,
}

fn strings(fs: &BTreeSet<Formula>) -> Vec<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

fn formulas(xs: &[String]) -> Result<BTreeSet<Formula>, ExportError> {
    xs.iter()
        .map(|x| parse_formula(x).map_err(|e| ExportError::Json(format!("`{x}`: {e}"))))
        .collect()
}

impl JsonNode {
    fn from_derivation(d: &Derivation) -> JsonNode {
        JsonNode {
            rule: d.rule.name().to_string(),
            conclusion: d.conclusion.to_string(),
            params: JsonParams {
                principal: d.params.principal.as_ref().map(|f| f.to_string()),
                gamma: strings(&d.params.gamma),
                delta: strings(&d.params.delta),
                gamma_prime: strings(&d.params.gamma_prime),
                delta_prime: strings(&d.params.delta_prime),
            },
            premises: d.premises.iter().map(JsonNode::from_derivation).collect(),
        }
    }

    fn to_derivation(&self) -> Result<Derivation, ExportError> {
        let rule = RuleId::from_name(&self.rule)
            .ok_or_else(|| ExportError::Json(format!("unknown rule `{}`", self.rule)))?;
        let conclusion = parse_sequent(&self.conclusion)
            .map_err(|e| ExportError::Json(format!("`{}`: {e}", self.conclusion)))?;
        let principal = match &self.params.principal {
            Some(p) => Some(parse_formula(p).map_err(|e| ExportError::Json(format!("`{p}`: {e}")))?),
            None => None,
        };
        Ok(Derivation {
            conclusion,
            rule,
            params: RuleParams {
                principal,
                gamma: formulas(&self.params.gamma)?,
                delta: formulas(&self.params.delta)?,
                gamma_prime: formulas(&self.params.gamma_prime)?,
                delta_prime: formulas(&self.params.delta_prime)?,
            },
            premises: self.premises.iter().map(JsonNode::to_derivation).collect::<Result<_, _>>()?,
        })
    }
}

impl Derivation {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&JsonNode::from_derivation(self)).expect("derivations always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&JsonNode::from_derivation(self)).expect("derivations always serialize")
    }

    pub fn from_json(text: &str) -> Result<Derivation, ExportError> {
        let node: JsonNode = serde_json::from_str(text).map_err(|e| ExportError::Json(e.to_string()))?;
        node.to_derivation()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        let _ = write!(out, "{:indent$}{}  ({}", "", self.conclusion, self.rule, indent = 2 * depth);
        if let Some(p) = &self.params.principal {
            let _ = write!(out, " on {p}");
        }
        out.push_str(")\n");
        for p in &self.premises {
            p.write_text(depth + 1, out);
        }
    }

    /// Read the text form, solving each node's parameters against `logic`.
    pub fn from_text(logic: Logic, text: &str) -> Result<Derivation, ExportError> {
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let err = |message: String| ExportError::Text { line: n + 1, message };
            let indent = raw.len() - raw.trim_start_matches(' ').len();
            if indent % 2 != 0 {
                return Err(err("odd indentation".into()));
            }
            let body = raw.trim();
            let cut = body.rfind("  (").ok_or_else(|| err("missing `  (rule)` annotation".into()))?;
            let label = body[cut + 3..].strip_suffix(')').ok_or_else(|| err("unclosed annotation".into()))?;
            let (name, principal) = match label.split_once(" on ") {
                Some((r, p)) => (r, Some(parse_formula(p).map_err(|e| err(e.to_string()))?)),
                None => (label, None),
            };
            let rule = RuleId::from_name(name).ok_or_else(|| err(format!("unknown rule `{name}`")))?;
            let conclusion = parse_sequent(&body[..cut]).map_err(|e| err(e.to_string()))?;
            lines.push((n + 1, indent / 2, rule, conclusion, principal));
        }
        let mut pos = 0;
        let d = read_tree(logic, &lines, &mut pos, 0)?;
        if let Some(&(line, ..)) = lines.get(pos) {
            return Err(ExportError::Text { line, message: "text after the root derivation".into() });
        }
        Ok(d)
    }
}

type Line = (usize, usize, RuleId, crate::syntax::Sequent, Option<Formula>);

fn read_tree(logic: Logic, lines: &[Line], pos: &mut usize, depth: usize) -> Result<Derivation, ExportError> {
    let Some((line, d, rule, conclusion, principal)) = lines.get(*pos).cloned() else {
        return Err(ExportError::Text { line: 0, message: "empty derivation".into() });
    };
    if d != depth {
        return Err(ExportError::Text { line, message: format!("expected indentation level {depth}") });
    }
    *pos += 1;
    let mut premises = Vec::new();
    while lines.get(*pos).is_some_and(|l| l.1 == depth + 1) {
        premises.push(read_tree(logic, lines, pos, depth + 1)?);
    }
    Derivation::infer(logic, rule, conclusion, principal, premises)
        .map_err(|message| ExportError::Text { line, message })
}
