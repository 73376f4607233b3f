//! Consecution corpora: one `LOGIC <tab> SEQUENT <tab> EXPECT` record per
//! line, `#` comment lines and blank lines ignored.

use std::fmt;

use thiserror::Error;

use crate::calculus::{prove_with_budget, CutPolicy, Derivation, ProveError};
use crate::parser::parse_sequent;
use crate::syntax::{Logic, Sequent};

/// The built-in corpus of consecutions with known verdicts.
pub const BUILTIN_CORPUS: &str = include_str!("../corpus/builtin.tsv");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub logic: Logic,
    pub sequent: Sequent,
    pub provable: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

pub fn parse_corpus(text: &str) -> Result<Vec<Entry>, CorpusError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| CorpusError { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        let [logic, sequent, expect] = fields[..] else {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let logic: Logic = logic.parse().map_err(|e| err(format!("{e}")))?;
        let sequent = parse_sequent(sequent).map_err(|e| err(format!("{e}")))?;
        let provable = match expect {
            "provable" => true,
            "unprovable" => false,
            other => return Err(err(format!("EXPECT must be provable or unprovable, found `{other}`"))),
        };
        out.push(Entry { line, logic, sequent, provable });
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub entry: Entry,
    /// The search result; `Err` when the budget ran out or the sequent
    /// is outside the logic's language.
    pub result: Result<Option<Derivation>, ProveError>,
}

impl Verdict {
    pub fn proved(&self) -> Option<bool> {
        self.result.as_ref().ok().map(|d| d.is_some())
    }

    pub fn matches(&self) -> bool {
        self.proved() == Some(self.entry.provable)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let got = match &self.result {
            Ok(Some(_)) => "provable".to_string(),
            Ok(None) => "unprovable".to_string(),
            Err(e) => format!("error: {e}"),
        };
        let mark = if self.matches() { "ok" } else { "MISMATCH" };
        write!(f, "{}\t{}\t{}\t{got}\t{mark}", self.entry.line, self.entry.logic, self.entry.sequent)
    }
}

/// Run each entry under the logic's default cut policy.
pub fn run_corpus(entries: &[Entry], budget: usize) -> Vec<Verdict> {
    entries
        .iter()
        .map(|e| {
            let policy = CutPolicy::default_for(e.logic, false);
            let result = prove_with_budget(e.logic, &e.sequent, &[], policy, budget).map(|(d, _)| d);
            Verdict { entry: e.clone(), result }
        })
        .collect()
}
