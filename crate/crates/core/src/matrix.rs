//! Four-valued FDE matrices for the im-free language, with `un` read as
//! the matrix negation. Truth-functional, so it serves as an oracle that
//! shares nothing with the Kripke evaluator.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Formula, Sequent, SyntaxError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FourValue {
    T,
    B,
    N,
    F,
}

impl FourValue {
    pub const ALL: [FourValue; 4] = [FourValue::T, FourValue::B, FourValue::N, FourValue::F];

    pub fn is_designated(self) -> bool {
        matches!(self, FourValue::T | FourValue::B)
    }

    pub fn name(self) -> &'static str {
        match self {
            FourValue::T => "t",
            FourValue::B => "b",
            FourValue::N => "n",
            FourValue::F => "f",
        }
    }

    /// Lattice order with b and n incomparable.
    pub fn le(self, other: FourValue) -> bool {
        self == other || self == FourValue::F || other == FourValue::T
    }

    pub fn meet(self, other: FourValue) -> FourValue {
        if self.le(other) {
            self
        } else if other.le(self) {
            other
        } else {
            FourValue::F
        }
    }

    pub fn join(self, other: FourValue) -> FourValue {
        if self.le(other) {
            other
        } else if other.le(self) {
            self
        } else {
            FourValue::T
        }
    }

    pub fn neg(self) -> FourValue {
        match self {
            FourValue::T => FourValue::F,
            FourValue::B => FourValue::B,
            FourValue::N => FourValue::N,
            FourValue::F => FourValue::T,
        }
    }

    pub fn con(self) -> FourValue {
        match self {
            FourValue::T => FourValue::T,
            FourValue::B => FourValue::N,
            FourValue::N => FourValue::B,
            FourValue::F => FourValue::T,
        }
    }

    pub fn det(self) -> FourValue {
        match self {
            FourValue::T => FourValue::F,
            FourValue::B => FourValue::N,
            FourValue::N => FourValue::B,
            FourValue::F => FourValue::F,
        }
    }
}

impl fmt::Display for FourValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("no value assigned to `{0}`")]
    Unassigned(String),
}

pub type Assignment = BTreeMap<Arc<str>, FourValue>;

pub fn fde_eval(f: &Formula, assignment: &Assignment) -> Result<FourValue, MatrixError> {
    Ok(match f {
        Formula::Var(v) => *assignment.get(v).ok_or_else(|| MatrixError::Unassigned(v.to_string()))?,
        Formula::Top => FourValue::T,
        Formula::Bot => FourValue::F,
        Formula::And(a, b) => fde_eval(a, assignment)?.meet(fde_eval(b, assignment)?),
        Formula::Or(a, b) => fde_eval(a, assignment)?.join(fde_eval(b, assignment)?),
        Formula::Un(a) => fde_eval(a, assignment)?.neg(),
        Formula::Con(a) => fde_eval(a, assignment)?.con(),
        Formula::Det(a) => fde_eval(a, assignment)?.det(),
        Formula::Im(_) => return Err(SyntaxError::ImInFragment(f.clone()).into()),
    })
}

/// Every assignment to `vars`, first variable slowest, values in t, b, n,
/// f order.
pub fn assignments(vars: &[Arc<str>]) -> impl Iterator<Item = Assignment> + '_ {
    let rows = 4usize.pow(vars.len() as u32);
    (0..rows).map(move |mut r| {
        let mut a = Assignment::new();
        for v in vars.iter().rev() {
            a.insert(v.clone(), FourValue::ALL[r % 4]);
            r /= 4;
        }
        a
    })
}

/// The first assignment designating every left formula and no right one.
pub fn fde_countervaluation(s: &Sequent) -> Result<Option<Assignment>, MatrixError> {
    if let Some(f) = s.formulas().find(|f| f.has_im()) {
        return Err(SyntaxError::ImInFragment(f.clone()).into());
    }
    let vars: Vec<Arc<str>> = s.variables().into_iter().collect();
    for a in assignments(&vars) {
        let left = s.left.iter().all(|f| fde_eval(f, &a).is_ok_and(FourValue::is_designated));
        let right = s.right.iter().any(|f| fde_eval(f, &a).is_ok_and(FourValue::is_designated));
        if left && !right {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

pub fn fde_valid(s: &Sequent) -> Result<bool, MatrixError> {
    Ok(fde_countervaluation(s)?.is_none())
}

/// Rows are assignments to the variables of `formulas`, columns the
/// formulas' values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    pub variables: Vec<Arc<str>>,
    pub formulas: Vec<Formula>,
    pub rows: Vec<(Vec<FourValue>, Vec<FourValue>)>,
}

pub fn truth_table(formulas: &[Formula]) -> Result<TruthTable, MatrixError> {
    let vars: Vec<Arc<str>> = formulas
        .iter()
        .flat_map(|f| f.variables())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rows = Vec::new();
    for a in assignments(&vars) {
        let values = formulas.iter().map(|f| fde_eval(f, &a)).collect::<Result<Vec<_>, _>>()?;
        rows.push((vars.iter().map(|v| a[v]).collect(), values));
    }
    Ok(TruthTable { variables: vars, formulas: formulas.to_vec(), rows })
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let heads: Vec<String> = self
            .variables
            .iter()
            .map(|v| v.to_string())
            .chain(self.formulas.iter().map(|g| g.to_string()))
            .collect();
        let widths: Vec<usize> = heads.iter().map(|h| h.chars().count()).collect();
        let line = |cells: Vec<String>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join(" | ")
                .trim_end()
                .to_string()
        };
        writeln!(f, "{}", line(heads.clone()))?;
        writeln!(f, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"))?;
        for (inputs, outputs) in &self.rows {
            let cells = inputs.iter().chain(outputs).map(|v| v.to_string()).collect();
            writeln!(f, "{}", line(cells))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_sequent};

    fn at(p: FourValue) -> Assignment {
        [(Arc::from("p"), p)].into()
    }

    fn eval(s: &str, p: FourValue) -> FourValue {
        fde_eval(&parse_formula(s).unwrap(), &at(p)).unwrap()
    }

    #[test]
    fn operator_tables() {
        use FourValue::*;
        let row = |s: &str| FourValue::ALL.map(|v| eval(s, v));
        assert_eq!(row("un p"), [F, B, N, T]);
        assert_eq!(row("oun p"), [T, N, B, T]);
        assert_eq!(row("oim p"), [F, N, B, F]);
        assert_eq!(eval("un p", B), B);
        assert_eq!(eval("oun p", B), N);
        assert_eq!(eval("oim p", T), F);
    }

    #[test]
    fn lattice() {
        use FourValue::*;
        assert_eq!(B.meet(N), F);
        assert_eq!(B.join(N), T);
        for a in FourValue::ALL {
            assert_eq!(a.meet(T), a);
            assert_eq!(a.join(F), a);
            for b in FourValue::ALL {
                assert_eq!(a.meet(b), b.meet(a));
                assert_eq!(a.le(b), a.meet(b) == a);
                assert!(a.meet(b).le(a) && a.le(a.join(b)));
            }
        }
    }

    #[test]
    fn classical_restriction() {
        use FourValue::*;
        for a in [T, F] {
            assert_eq!(eval("un p", a), if a == T { F } else { T });
            for b in [T, F] {
                assert_eq!(a.meet(b) == T, a == T && b == T);
                assert_eq!(a.join(b) == T, a == T || b == T);
            }
        }
    }

    #[test]
    fn validity() {
        let v = |s: &str| fde_valid(&parse_sequent(s).unwrap()).unwrap();
        assert!(v("p => p"));
        assert!(!v("=> un p, p"));
        assert!(v("un p & un q => un (p | q)"));
        let cv = fde_countervaluation(&parse_sequent("=> un p, p").unwrap()).unwrap().unwrap();
        assert_eq!(cv[&Arc::from("p")], FourValue::N);
        assert!(fde_valid(&parse_sequent("im p =>").unwrap()).is_err());
    }

    #[test]
    fn companions_are_constants_with_the_negation() {
        for v in FourValue::ALL {
            assert!(!eval("oun p & (p & un p)", v).is_designated());
            assert!(eval("(p | un p) | oun p", v).is_designated());
        }
    }

    #[test]
    fn table_layout() {
        let t = truth_table(&[parse_formula("un p").unwrap()]).unwrap();
        assert_eq!(t.to_string(), "p | un p\n--+-----\nt | f\nb | b\nn | n\nf | t\n");
        let two = truth_table(&[parse_formula("p & q").unwrap()]).unwrap();
        assert_eq!(two.rows.len(), 16);
        assert_eq!(two.rows[1].0, vec![FourValue::T, FourValue::B]);
    }
}
