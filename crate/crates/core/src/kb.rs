//! The knowledge-base model: declarations, axioms, facts and queries.

use std::collections::{BTreeMap, HashMap};

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::bounds::TruthBounds;
use crate::formula::{Formula, Term, EQUALITY};

/// Name of the equality theory.
pub const EQUALITY_THEORY: &str = "equality";

/// Whether a root formula is asserted (pinned true) or only evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum World {
    Axiom,
    Open,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axiom {
    pub name: String,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub name: String,
    pub formula: Formula,
    pub world: World,
}

/// A predicate applied to ground terms; the key of a fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> GroundAtom {
        GroundAtom { predicate: predicate.into(), args }
    }

    /// Convenience for atoms over constants only.
    pub fn over(predicate: impl Into<String>, constants: &[&str]) -> GroundAtom {
        GroundAtom::new(predicate, constants.iter().map(|c| Term::constant(*c)).collect())
    }

    pub fn as_formula(&self) -> Formula {
        Formula::atom(self.predicate.clone(), self.args.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbError {
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("`=` requires `theory equality`")]
    EqualityDisabled,
    #[error("`{0}` is not a sentence: free variable(s) {1}")]
    NotSentence(String, String),
    #[error("fact `{0}` must be ground")]
    NonGroundFact(String),
    #[error("{0} must have at least two operands")]
    TooFewOperands(&'static str),
    #[error("weights do not match operand count or are negative")]
    BadWeights,
}

/// A first-order knowledge base. Declaration order is preserved for
/// predicates, functions and constants; facts are kept sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    pub theories: IndexSet<String>,
    pub predicates: IndexMap<String, usize>,
    pub functions: IndexMap<String, usize>,
    pub constants: IndexSet<String>,
    pub axioms: Vec<Axiom>,
    pub facts: BTreeMap<GroundAtom, TruthBounds>,
    pub queries: Vec<Query>,
}

impl KnowledgeBase {
    pub fn new() -> KnowledgeBase {
        KnowledgeBase::default()
    }

    pub fn has_equality(&self) -> bool {
        self.theories.contains(EQUALITY_THEORY)
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.predicates.contains_key(name) || self.functions.contains_key(name) || self.constants.contains(name)
    }

    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.name == name)
    }

    /// Arity of a predicate, including `=` when equality is enabled.
    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        if name == EQUALITY {
            return self.has_equality().then_some(2);
        }
        self.predicates.get(name).copied()
    }

    /// Checks every declaration-level invariant of the model.
    pub fn validate(&self) -> Result<(), KbError> {
        for ax in &self.axioms {
            self.check_formula(&ax.formula)?;
            let fv = ax.formula.free_variables();
            if !fv.is_empty() {
                let vars: Vec<_> = fv.into_iter().collect();
                return Err(KbError::NotSentence(ax.name.clone(), vars.join(", ")));
            }
        }
        for q in &self.queries {
            self.check_formula(&q.formula)?;
        }
        for atom in self.facts.keys() {
            self.check_atom(&atom.predicate, &atom.args)?;
            if !atom.args.iter().all(Term::is_ground) {
                return Err(KbError::NonGroundFact(atom.as_formula().to_string()));
            }
        }
        Ok(())
    }

    fn check_formula(&self, f: &Formula) -> Result<(), KbError> {
        let mut result = Ok(());
        f.visit(&mut |sub| {
            if result.is_err() {
                return;
            }
            result = match sub {
                Formula::Atom { predicate, args } => self.check_atom(predicate, args),
                Formula::And(cs, p) => check_operands("and", cs.len(), p),
                Formula::Or(cs, p) => check_operands("or", cs.len(), p),
                Formula::Implies(_, _, p) => check_operands("implies", 2, p),
                _ => Ok(()),
            };
        });
        result
    }

    fn check_atom(&self, predicate: &str, args: &[Term]) -> Result<(), KbError> {
        let arity = if predicate == EQUALITY {
            if !self.has_equality() {
                return Err(KbError::EqualityDisabled);
            }
            2
        } else {
            *self.predicates.get(predicate).ok_or_else(|| KbError::Undeclared(predicate.to_string()))?
        };
        if arity != args.len() {
            return Err(KbError::Arity { symbol: predicate.to_string(), expected: arity, found: args.len() });
        }
        args.iter().try_for_each(|t| self.check_term(t))
    }

    fn check_term(&self, t: &Term) -> Result<(), KbError> {
        match t {
            Term::Variable(_) => Ok(()),
            Term::Constant(c) if self.constants.contains(c) => Ok(()),
            Term::Constant(c) => Err(KbError::Undeclared(c.clone())),
            Term::Function(f, args) => {
                let arity = *self.functions.get(f).ok_or_else(|| KbError::Undeclared(f.clone()))?;
                if arity != args.len() {
                    return Err(KbError::Arity { symbol: f.clone(), expected: arity, found: args.len() });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    /// Structural equality with weights and bounds compared within `tol`.
    pub fn approx_eq(&self, other: &KnowledgeBase, tol: f64) -> bool {
        let close = |a: &TruthBounds, b: &TruthBounds| {
            (a.lower - b.lower).abs() <= tol && (a.upper - b.upper).abs() <= tol
        };
        self.theories == other.theories
            && self.predicates == other.predicates
            && self.functions == other.functions
            && self.constants == other.constants
            && self.axioms.len() == other.axioms.len()
            && self
                .axioms
                .iter()
                .zip(&other.axioms)
                .all(|(a, b)| a.name == b.name && a.formula.approx_eq(&b.formula, tol))
            && self.facts.len() == other.facts.len()
            && self.facts.iter().zip(&other.facts).all(|((ka, va), (kb, vb))| ka == kb && close(va, vb))
            && self.queries.len() == other.queries.len()
            && self.queries.iter().zip(&other.queries).all(|(a, b)| {
                a.name == b.name && a.world == b.world && a.formula.approx_eq(&b.formula, tol)
            })
    }

    /// Facts grouped per predicate.
    pub fn facts_by_predicate(&self) -> HashMap<&str, Vec<(&GroundAtom, TruthBounds)>> {
        let mut out: HashMap<&str, Vec<_>> = HashMap::new();
        for (atom, b) in &self.facts {
            out.entry(atom.predicate.as_str()).or_default().push((atom, *b));
        }
        out
    }
}

fn check_operands(
    what: &'static str,
    n: usize,
    params: &Option<crate::formula::Params>,
) -> Result<(), KbError> {
    if n < 2 {
        return Err(KbError::TooFewOperands(what));
    }
    match params {
        Some(p) if p.weights.len() != n || p.weights.iter().any(|w| *w < 0.0) || p.bias < 0.0 => {
            Err(KbError::BadWeights)
        }
        _ => Ok(()),
    }
}
