//! Function-symbol elimination.
//!
//! An atom `P(.. t ..)` whose argument `t = f(r1..rk)` is a function
//! application becomes `exists v. (R_f r1..rk v & P(.. v ..))`, where `R_f` is
//! the graph of `f`. The new `R_f` atom may itself carry function terms and is
//! rewritten the same way until no function application remains.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use thiserror::Error;

use crate::formula::{Formula, Term, EQUALITY};
use crate::kb::{Axiom, GroundAtom, KnowledgeBase};
use crate::theory::{congruence_axiom, functional_axiom, is_theory_axiom, TheoryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewriteError {
    #[error("undeclared function `{0}`")]
    UndeclaredFunction(String),
    #[error("functions require `theory equality`")]
    EqualityDisabled,
    #[error("relation name `{relation}` for function `{function}` is already declared")]
    NameClash { function: String, relation: String },
    #[error("argument position {position} is out of range for an atom with {arity} argument(s)")]
    Position { position: usize, arity: usize },
    #[error("expected an atom")]
    NotAnAtom,
    #[error("fact `{0}` cannot be expressed on functional relations; state it as an axiom")]
    UnsupportedFact(String),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewriteResult {
    pub formula: Formula,
    /// Function symbol to relation symbol, in order of first use.
    pub introduced_relations: IndexMap<String, String>,
    pub fresh_vars_used: usize,
}

/// Name of the functional relation standing for `function`.
pub fn relation_name(function: &str) -> String {
    format!("R_{}", function)
}

struct Fresh {
    taken: BTreeSet<String>,
    next: usize,
    used: usize,
}

impl Fresh {
    fn new(taken: BTreeSet<String>) -> Fresh {
        Fresh { taken, next: 0, used: 0 }
    }

    fn var(&mut self) -> String {
        loop {
            self.next += 1;
            let name = format!("$v{}", self.next);
            if self.taken.insert(name.clone()) {
                self.used += 1;
                return name;
            }
        }
    }
}

/// Pulls the argument at `position` out of an atom:
/// `P(.. t ..)` becomes `exists v. (t = v & P(.. v ..))`.
pub fn extract_term(atom: &Formula, position: usize) -> Result<Formula, RewriteError> {
    let Formula::Atom { predicate, args } = atom else {
        return Err(RewriteError::NotAnAtom);
    };
    if position >= args.len() {
        return Err(RewriteError::Position { position, arity: args.len() });
    }
    let v = Fresh::new(atom.all_variables()).var();
    let mut replaced = args.clone();
    let t = std::mem::replace(&mut replaced[position], Term::var(v.clone()));
    Ok(Formula::exists(
        v.clone(),
        Formula::and(vec![Formula::eq(t, Term::var(v)), Formula::atom(predicate.clone(), replaced)]),
    ))
}

struct Eliminator<'a> {
    kb: &'a KnowledgeBase,
    fresh: Fresh,
    introduced: IndexMap<String, String>,
}

impl Eliminator<'_> {
    fn formula(&mut self, f: &Formula) -> Result<Formula, RewriteError> {
        Ok(match f {
            Formula::Atom { predicate, args } => self.atom(predicate, args)?,
            Formula::Not(inner) => Formula::not(self.formula(inner)?),
            Formula::And(cs, p) => Formula::And(self.all(cs)?, p.clone()),
            Formula::Or(cs, p) => Formula::Or(self.all(cs)?, p.clone()),
            Formula::Implies(a, b, p) => {
                Formula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?), p.clone())
            }
            Formula::Iff(a, b) => Formula::iff(self.formula(a)?, self.formula(b)?),
            Formula::ForAll(v, body) => Formula::forall(v.clone(), self.formula(body)?),
            Formula::Exists(v, body) => Formula::exists(v.clone(), self.formula(body)?),
        })
    }

    fn all(&mut self, fs: &[Formula]) -> Result<Vec<Formula>, RewriteError> {
        fs.iter().map(|f| self.formula(f)).collect()
    }

    fn atom(&mut self, predicate: &str, args: &[Term]) -> Result<Formula, RewriteError> {
        let mut flat = Vec::with_capacity(args.len());
        let mut definitions = Vec::new();
        for arg in args {
            match arg {
                Term::Function(f, inner) => {
                    let relation = self.relation(f)?;
                    let v = self.fresh.var();
                    let mut rel_args = inner.clone();
                    rel_args.push(Term::var(v.clone()));
                    // the relation atom may still hold nested applications
                    let definition = self.atom(&relation, &rel_args)?;
                    flat.push(Term::var(v.clone()));
                    definitions.push((v, definition));
                }
                other => flat.push(other.clone()),
            }
        }
        let base = Formula::atom(predicate, flat);
        Ok(definitions
            .into_iter()
            .rev()
            .fold(base, |acc, (v, def)| Formula::exists(v, Formula::and(vec![def, acc]))))
    }

    fn relation(&mut self, function: &str) -> Result<String, RewriteError> {
        if !self.kb.functions.contains_key(function) {
            return Err(RewriteError::UndeclaredFunction(function.to_string()));
        }
        let relation = relation_name(function);
        if self.kb.is_declared(&relation) {
            return Err(RewriteError::NameClash { function: function.to_string(), relation });
        }
        self.introduced.entry(function.to_string()).or_insert_with(|| relation.clone());
        Ok(relation)
    }
}

/// Rewrites `f` into an equivalent function-free formula. Function-free input
/// is returned unchanged.
pub fn eliminate_functions(f: &Formula, kb: &KnowledgeBase) -> Result<RewriteResult, RewriteError> {
    if f.is_function_free() {
        return Ok(RewriteResult { formula: f.clone(), introduced_relations: IndexMap::new(), fresh_vars_used: 0 });
    }
    if !kb.has_equality() {
        return Err(RewriteError::EqualityDisabled);
    }
    let mut e = Eliminator { kb, fresh: Fresh::new(f.all_variables()), introduced: IndexMap::new() };
    let formula = e.formula(f)?;
    Ok(RewriteResult { formula, introduced_relations: e.introduced, fresh_vars_used: e.fresh.used })
}

/// Rewrites a fact over a functional term, `f(c1..cn) = d` (either side), into
/// the relation fact `R_f(c1..cn, d)`.
fn rewrite_fact(atom: &GroundAtom) -> Result<GroundAtom, RewriteError> {
    let unsupported = || RewriteError::UnsupportedFact(atom.as_formula().to_string());
    if atom.predicate != EQUALITY {
        return Err(unsupported());
    }
    let (app, value) = match (&atom.args[0], &atom.args[1]) {
        (Term::Function(f, xs), c @ Term::Constant(_)) | (c @ Term::Constant(_), Term::Function(f, xs)) => {
            ((f, xs), c)
        }
        _ => return Err(unsupported()),
    };
    if !app.1.iter().all(|t| matches!(t, Term::Constant(_))) {
        return Err(unsupported());
    }
    let mut args = app.1.clone();
    args.push(value.clone());
    Ok(GroundAtom::new(relation_name(app.0), args))
}

/// Eliminates every declared function from a knowledge base.
///
/// Each function `f/n` is replaced by a predicate `R_f/(n+1)` carrying a
/// congruence and a functional axiom; these are inserted after the existing
/// theory axioms. Axioms, queries and facts are rewritten, and function
/// declarations are dropped. A knowledge base without functions is returned as
/// is.
pub fn rewrite_kb(kb: &KnowledgeBase) -> Result<KnowledgeBase, RewriteError> {
    if kb.functions.is_empty() {
        return Ok(kb.clone());
    }
    if !kb.has_equality() {
        return Err(RewriteError::EqualityDisabled);
    }
    for f in kb.functions.keys() {
        let relation = relation_name(f);
        if kb.is_declared(&relation) {
            return Err(RewriteError::NameClash { function: f.clone(), relation });
        }
    }

    let mut out = kb.clone();
    for ax in &mut out.axioms {
        ax.formula = eliminate_functions(&ax.formula, kb)?.formula;
    }
    for q in &mut out.queries {
        q.formula = eliminate_functions(&q.formula, kb)?.formula;
    }
    out.facts.clear();
    for (atom, bounds) in &kb.facts {
        let key = if atom.args.iter().all(Term::is_function_free) { atom.clone() } else { rewrite_fact(atom)? };
        let merged = match out.facts.get(&key) {
            Some(existing) => existing.tighten(*bounds),
            None => *bounds,
        };
        out.facts.insert(key, merged);
    }

    let mut theory = Vec::new();
    for (f, &n) in &kb.functions {
        let relation = relation_name(f);
        out.predicates.insert(relation.clone(), n + 1);
        theory.extend(congruence_axiom(&relation, n + 1).map(Axiom::from));
        theory.push(functional_axiom(&relation, n + 1, true)?.into());
    }
    out.functions.clear();
    let at = out.axioms.iter().take_while(|a| is_theory_axiom(&a.name)).count();
    out.axioms.splice(at..at, theory);
    Ok(out)
}
