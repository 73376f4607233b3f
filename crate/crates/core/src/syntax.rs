//! Formulas, sequents, logics, and the well-founded orders that bound every
//! search space in the crate.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A formula over `top`, `bot`, `&`, `|` and the four negative modalities.
///
/// Children are shared behind `Arc`, so cloning is cheap and formulas can be
/// sent across threads. Equality and hashing are structural. The `Ord`
/// instance is the canonical order: node count first, then the printed form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(Arc<str>),
    Top,
    Bot,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    /// Unnecessity: true when some successor falsifies the argument.
    Un(Arc<Formula>),
    /// Impossibility: true when every successor falsifies the argument.
    Im(Arc<Formula>),
    /// Consistency companion of `Un`.
    Con(Arc<Formula>),
    /// Determinacy companion of `Im`.
    Det(Arc<Formula>),
}

/// The connective at the root of a formula, ignoring its arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    Top,
    Bot,
    And,
    Or,
    Un,
    Im,
    Con,
    Det,
}

impl Connective {
    pub fn keyword(self) -> &'static str {
        match self {
            Connective::Top => "top",
            Connective::Bot => "bot",
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Un => "un",
            Connective::Im => "im",
            Connective::Con => "oun",
            Connective::Det => "oim",
        }
    }
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Arc::from(name))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn un(a: Formula) -> Formula {
        Formula::Un(Arc::new(a))
    }

    pub fn im(a: Formula) -> Formula {
        Formula::Im(Arc::new(a))
    }

    pub fn con(a: Formula) -> Formula {
        Formula::Con(Arc::new(a))
    }

    pub fn det(a: Formula) -> Formula {
        Formula::Det(Arc::new(a))
    }

    pub fn connective(&self) -> Option<Connective> {
        Some(match self {
            Formula::Var(_) => return None,
            Formula::Top => Connective::Top,
            Formula::Bot => Connective::Bot,
            Formula::And(..) => Connective::And,
            Formula::Or(..) => Connective::Or,
            Formula::Un(_) => Connective::Un,
            Formula::Im(_) => Connective::Im,
            Formula::Con(_) => Connective::Con,
            Formula::Det(_) => Connective::Det,
        })
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => vec![],
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Un(a) | Formula::Im(a) | Formula::Con(a) | Formula::Det(a) => vec![a],
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Number of connective occurrences; `top` and `bot` count as nullary
    /// connectives, variables count zero.
    pub fn connective_count(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            _ => 1 + self.children().iter().map(|c| c.connective_count()).sum::<usize>(),
        }
    }

    pub fn contains(&self, c: Connective) -> bool {
        self.connective() == Some(c) || self.children().iter().any(|ch| ch.contains(c))
    }

    /// Whether `Im` occurs anywhere in the formula.
    pub fn has_im(&self) -> bool {
        self.contains(Connective::Im)
    }

    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Var(name) => {
                out.insert(name.clone());
            }
            _ => self.children().iter().for_each(|c| c.collect_variables(out)),
        }
    }

    /// Replace every `Im` by `Un`, the identification valid on functional frames.
    pub fn im_to_un(&self) -> Formula {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => self.clone(),
            Formula::And(a, b) => Formula::and(a.im_to_un(), b.im_to_un()),
            Formula::Or(a, b) => Formula::or(a.im_to_un(), b.im_to_un()),
            Formula::Un(a) | Formula::Im(a) => Formula::un(a.im_to_un()),
            Formula::Con(a) => Formula::con(a.im_to_un()),
            Formula::Det(a) => Formula::det(a.im_to_un()),
        }
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.node_count()
            .cmp(&other.node_count())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

/// A sequent `left => right` over finite sets of formulas.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new<L, R>(left: L, right: R) -> Sequent
    where
        L: IntoIterator<Item = Formula>,
        R: IntoIterator<Item = Formula>,
    {
        Sequent { left: left.into_iter().collect(), right: right.into_iter().collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(self.right.iter())
    }

    /// Componentwise inclusion of sides.
    pub fn is_subsequent_of(&self, other: &Sequent) -> bool {
        self.left.is_subset(&other.left) && self.right.is_subset(&other.right)
    }

    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        self.formulas().flat_map(|f| f.variables()).collect()
    }

    pub fn has_im(&self) -> bool {
        self.formulas().any(Formula::has_im)
    }

    pub fn im_to_un(&self) -> Sequent {
        Sequent::new(
            self.left.iter().map(Formula::im_to_un),
            self.right.iter().map(Formula::im_to_un),
        )
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequent({self})")
    }
}

/// The five systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Logic {
    /// All frames.
    PK,
    /// Serial frames.
    PKD,
    /// Reflexive frames.
    PKT,
    /// Functional frames; the language is `im`-free.
    PKF,
    /// Symmetric frames.
    PKB,
}

impl Logic {
    pub const ALL: [Logic; 5] = [Logic::PK, Logic::PKD, Logic::PKT, Logic::PKF, Logic::PKB];

    pub fn name(self) -> &'static str {
        match self {
            Logic::PK => "PK",
            Logic::PKD => "PKD",
            Logic::PKT => "PKT",
            Logic::PKF => "PKF",
            Logic::PKB => "PKB",
        }
    }

    /// The structural order whose closures bound analytic derivations.
    pub fn order(self) -> Order {
        match self {
            Logic::PKF => Order::PrecPrime,
            _ => Order::Prec,
        }
    }

    /// The connective used in the determinacy rules: `Un` in PKF, `Im` elsewhere.
    pub fn det_partner(self, arg: &Formula) -> Formula {
        match self {
            Logic::PKF => Formula::un(arg.clone()),
            _ => Formula::im(arg.clone()),
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Logic {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PK" => Ok(Logic::PK),
            "PKD" => Ok(Logic::PKD),
            "PKT" => Ok(Logic::PKT),
            "PKF" => Ok(Logic::PKF),
            "PKB" => Ok(Logic::PKB),
            _ => Err(SyntaxError::UnknownLogic(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("formula `{0}` contains `im`, which is outside the im-free fragment")]
    ImInFragment(Formula),
    #[error("unknown logic `{0}` (expected pk, pkd, pkt, pkf or pkb)")]
    UnknownLogic(String),
}

/// Which structural order to close under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Proper subformula, plus `un g` below `oun g` and `im g` below `oim g`.
    Prec,
    /// The im-free restriction, with `un g` below both `oun g` and `oim g`.
    PrecPrime,
}

fn is_proper_subformula(a: &Formula, b: &Formula) -> bool {
    b.children().iter().any(|c| *c == a || is_proper_subformula(a, c))
}

pub fn prec(a: &Formula, b: &Formula) -> bool {
    if is_proper_subformula(a, b) {
        return true;
    }
    match (a, b) {
        (Formula::Un(x), Formula::Con(y)) => x == y,
        (Formula::Im(x), Formula::Det(y)) => x == y,
        _ => false,
    }
}

pub fn prec_prime(a: &Formula, b: &Formula) -> Result<bool, SyntaxError> {
    for f in [a, b] {
        if f.has_im() {
            return Err(SyntaxError::ImInFragment(f.clone()));
        }
    }
    Ok(prec(a, b) || matches!((a, b), (Formula::Un(x), Formula::Det(y)) if x == y))
}

/// The formulas directly below `f` in the given order.
pub fn predecessors(f: &Formula, order: Order) -> Vec<Formula> {
    let mut out: Vec<Formula> = f.children().into_iter().cloned().collect();
    match (f, order) {
        (Formula::Con(g), _) => out.push(Formula::Un(g.clone())),
        (Formula::Det(g), Order::Prec) => out.push(Formula::Im(g.clone())),
        (Formula::Det(g), Order::PrecPrime) => out.push(Formula::Un(g.clone())),
        _ => {}
    }
    out
}

/// Least superset of `seed` that is downward closed under `order`.
pub fn closure<'a, I>(seed: I, order: Order) -> Result<BTreeSet<Formula>, SyntaxError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut seen = rustc_hash::FxHashSet::default();
    let mut stack: Vec<Formula> = Vec::new();
    for f in seed {
        if order == Order::PrecPrime && f.has_im() {
            return Err(SyntaxError::ImInFragment(f.clone()));
        }
        stack.push(f.clone());
    }
    while let Some(f) = stack.pop() {
        if seen.insert(f.clone()) {
            stack.extend(predecessors(&f, order));
        }
    }
    Ok(seen.into_iter().collect())
}

/// Reflexive subformula set.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if out.insert(g.clone()) {
            stack.extend(g.children());
        }
    }
    out
}

/// Length of the longest descending chain below `f` in `order`.
pub fn height(f: &Formula, order: Order) -> usize {
    predecessors(f, order).iter().map(|g| height(g, order) + 1).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::var("p")
    }

    fn q() -> Formula {
        Formula::var("q")
    }

    #[test]
    fn prec_examples() {
        assert!(prec(&p(), &Formula::and(p(), q())));
        assert!(prec(&Formula::un(p()), &Formula::con(p())));
        assert!(!prec(&Formula::con(p()), &Formula::un(p())));
        assert!(prec(&Formula::im(p()), &Formula::det(p())));
        assert!(!prec(&p(), &p()));
    }

    #[test]
    fn prec_prime_examples() {
        assert_eq!(prec_prime(&Formula::un(p()), &Formula::det(p())), Ok(true));
        assert_eq!(prec_prime(&p(), &Formula::un(p())), Ok(true));
        assert!(matches!(
            prec_prime(&Formula::im(p()), &Formula::det(p())),
            Err(SyntaxError::ImInFragment(_))
        ));
    }

    #[test]
    fn closure_examples() {
        let c = closure([&Formula::con(p())], Order::Prec).unwrap();
        assert_eq!(c, BTreeSet::from([Formula::con(p()), Formula::un(p()), p()]));

        let c = closure([&Formula::and(p(), q())], Order::Prec).unwrap();
        assert_eq!(c, BTreeSet::from([Formula::and(p(), q()), p(), q()]));

        let c = closure([&Formula::det(p())], Order::PrecPrime).unwrap();
        assert_eq!(c, BTreeSet::from([Formula::det(p()), Formula::un(p()), p()]));

        let c = closure([&Formula::det(p())], Order::Prec).unwrap();
        assert_eq!(c, BTreeSet::from([Formula::det(p()), Formula::im(p()), p()]));
    }

    #[test]
    fn subformula_examples() {
        assert_eq!(subformulas(&Formula::un(p())), BTreeSet::from([Formula::un(p()), p()]));
        assert_eq!(subformulas(&Formula::Top), BTreeSet::from([Formula::Top]));
        let qp = Formula::and(q(), p());
        let f = Formula::or(p(), qp.clone());
        assert_eq!(subformulas(&f), BTreeSet::from([f.clone(), p(), qp, q()]));
    }

    #[test]
    fn canonical_order_is_size_then_text() {
        let mut v = vec![Formula::un(p()), Formula::con(p()), q(), p()];
        v.sort();
        assert_eq!(v, vec![p(), q(), Formula::con(p()), Formula::un(p())]);
    }

    #[test]
    fn connective_count_treats_constants_as_nullary() {
        assert_eq!(p().connective_count(), 0);
        assert_eq!(Formula::Top.connective_count(), 1);
        assert_eq!(Formula::un(Formula::and(p(), Formula::Bot)).connective_count(), 3);
    }
}
