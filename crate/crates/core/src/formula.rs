//! First-order terms and formulas.
//!
//! Formulas are plain trees; each node corresponds to exactly one neuron once
//! the knowledge base is compiled. Symbols are stored as strings and are
//! classified by declaration (see [`crate::kb::KnowledgeBase`]), never by
//! spelling.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// The reserved binary equality predicate.
pub const EQUALITY: &str = "=";

/// A first-order term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Constant(String),
    Variable(String),
    /// Application of a declared function symbol.
    Function(String, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Term {
        Term::Constant(name.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Variable(name.into())
    }

    pub fn app(function: impl Into<String>, args: Vec<Term>) -> Term {
        Term::Function(function.into(), args)
    }

    pub fn is_function_free(&self) -> bool {
        !matches!(self, Term::Function(..))
    }

    /// True if the term contains no variables.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Constant(_) => true,
            Term::Variable(_) => false,
            Term::Function(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn mentions_var(&self, var: &str) -> bool {
        match self {
            Term::Constant(_) => false,
            Term::Variable(v) => v == var,
            Term::Function(_, args) => args.iter().any(|a| a.mentions_var(var)),
        }
    }

    /// Number of function-application nodes inside the term.
    pub fn function_count(&self) -> usize {
        match self {
            Term::Function(_, args) => 1 + args.iter().map(Term::function_count).sum::<usize>(),
            _ => 0,
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Constant(_) => {}
            Term::Variable(v) => {
                out.insert(v.clone());
            }
            Term::Function(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn replace_var(&self, var: &str, with: &Term) -> Term {
        match self {
            Term::Variable(v) if v == var => with.clone(),
            Term::Function(f, args) => {
                Term::Function(f.clone(), args.iter().map(|a| a.replace_var(var, with)).collect())
            }
            other => other.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Constant(name) | Term::Variable(name) => f.write_str(name),
            Term::Function(name, args) => {
                write!(f, "({}", name)?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Weights and bias of a weighted connective. One weight per operand.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Params {
    /// Unit weights and bias 1, under which every activation reduces to the
    /// plain Łukasiewicz operator.
    pub fn unit(arity: usize) -> Params {
        Params { weights: vec![1.0; arity], bias: 1.0 }
    }

    fn approx_eq(&self, other: &Params, tol: f64) -> bool {
        self.weights.len() == other.weights.len()
            && self.weights.iter().zip(&other.weights).all(|(a, b)| (a - b).abs() <= tol)
            && (self.bias - other.bias).abs() <= tol
    }
}

/// A first-order formula over Łukasiewicz connectives.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Atom { predicate: String, args: Vec<Term> },
    Not(Box<Formula>),
    And(Vec<Formula>, Option<Params>),
    Or(Vec<Formula>, Option<Params>),
    Implies(Box<Formula>, Box<Formula>, Option<Params>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

/// Raised by [`Formula::substitute`] when the replacement term would be
/// captured by a quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("substitution for `{var}` would be captured by the quantifier binding `{quantifier}`")]
pub struct CaptureError {
    pub var: String,
    pub quantifier: String,
}

impl Formula {
    pub fn atom(predicate: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom { predicate: predicate.into(), args }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::atom(EQUALITY, vec![lhs, rhs])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(children: Vec<Formula>) -> Formula {
        Formula::And(children, None)
    }

    pub fn or(children: Vec<Formula>) -> Formula {
        Formula::Or(children, None)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs), None)
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::ForAll(var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(var.into(), Box::new(body))
    }

    /// Wraps `body` in one universal quantifier per variable, outermost first.
    pub fn forall_many<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    /// Variables occurring outside the scope of a binding quantifier.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { args, .. } => {
                let mut vars = BTreeSet::new();
                args.iter().for_each(|a| a.collect_vars(&mut vars));
                out.extend(vars.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(inner) => inner.collect_free(bound, out),
            Formula::And(cs, _) | Formula::Or(cs, _) => {
                cs.iter().for_each(|c| c.collect_free(bound, out))
            }
            Formula::Implies(a, b, _) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every variable name in the formula, free or bound.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom { args, .. } => args.iter().for_each(|a| a.collect_vars(&mut out)),
            Formula::ForAll(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal over every subformula.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Atom { .. } => {}
            Formula::Not(inner) | Formula::ForAll(_, inner) | Formula::Exists(_, inner) => inner.visit(f),
            Formula::And(cs, _) | Formula::Or(cs, _) => cs.iter().for_each(|c| c.visit(f)),
            Formula::Implies(a, b, _) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Replaces every free occurrence of `var` by `term`.
    pub fn substitute(&self, var: &str, term: &Term) -> Result<Formula, CaptureError> {
        Ok(match self {
            Formula::Atom { predicate, args } => Formula::Atom {
                predicate: predicate.clone(),
                args: args.iter().map(|a| a.replace_var(var, term)).collect(),
            },
            Formula::Not(inner) => Formula::not(inner.substitute(var, term)?),
            Formula::And(cs, p) => Formula::And(
                cs.iter().map(|c| c.substitute(var, term)).collect::<Result<_, _>>()?,
                p.clone(),
            ),
            Formula::Or(cs, p) => Formula::Or(
                cs.iter().map(|c| c.substitute(var, term)).collect::<Result<_, _>>()?,
                p.clone(),
            ),
            Formula::Implies(a, b, p) => Formula::Implies(
                Box::new(a.substitute(var, term)?),
                Box::new(b.substitute(var, term)?),
                p.clone(),
            ),
            Formula::Iff(a, b) => Formula::iff(a.substitute(var, term)?, b.substitute(var, term)?),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                if v == var || !body.free_variables().contains(var) {
                    return Ok(self.clone());
                }
                if term.mentions_var(v) {
                    return Err(CaptureError { var: var.to_string(), quantifier: v.clone() });
                }
                let body = body.substitute(var, term)?;
                match self {
                    Formula::ForAll(..) => Formula::forall(v.clone(), body),
                    _ => Formula::exists(v.clone(), body),
                }
            }
        })
    }

    pub fn is_function_free(&self) -> bool {
        self.function_count() == 0
    }

    /// Number of function-application occurrences in atom arguments.
    pub fn function_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if let Formula::Atom { args, .. } = f {
                n += args.iter().map(Term::function_count).sum::<usize>();
            }
        });
        n
    }

    /// Structural equality up to consistent renaming of bound variables.
    /// Weights compare exactly.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq_in(self, other, &mut HashMap::new(), &mut HashMap::new(), 0.0)
    }

    /// Structural equality with weights and biases compared within `tol`.
    pub fn approx_eq(&self, other: &Formula, tol: f64) -> bool {
        match (self, other) {
            (Formula::Atom { predicate: p, args: a }, Formula::Atom { predicate: q, args: b }) => {
                p == q && a == b
            }
            (Formula::Not(a), Formula::Not(b)) => a.approx_eq(b, tol),
            (Formula::And(a, pa), Formula::And(b, pb)) | (Formula::Or(a, pa), Formula::Or(b, pb)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|(x, y)| x.approx_eq(y, tol))
                    && params_approx_eq(pa, pb, tol)
            }
            (Formula::Implies(a1, a2, pa), Formula::Implies(b1, b2, pb)) => {
                a1.approx_eq(b1, tol) && a2.approx_eq(b2, tol) && params_approx_eq(pa, pb, tol)
            }
            (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => a1.approx_eq(b1, tol) && a2.approx_eq(b2, tol),
            (Formula::ForAll(v, a), Formula::ForAll(w, b))
            | (Formula::Exists(v, a), Formula::Exists(w, b)) => v == w && a.approx_eq(b, tol),
            _ => false,
        }
    }

    /// Number of quantifier nodes.
    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, Formula::ForAll(..) | Formula::Exists(..)) {
                n += 1;
            }
        });
        n
    }

    pub fn atom_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, Formula::Atom { .. }) {
                n += 1;
            }
        });
        n
    }
}

fn params_approx_eq(a: &Option<Params>, b: &Option<Params>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => x.approx_eq(y, tol),
        _ => false,
    }
}

fn alpha_eq_term(a: &Term, b: &Term, left: &HashMap<String, usize>, right: &HashMap<String, usize>) -> bool {
    match (a, b) {
        (Term::Constant(x), Term::Constant(y)) => x == y,
        (Term::Variable(x), Term::Variable(y)) => match (left.get(x), right.get(y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::Function(f, xs), Term::Function(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_term(x, y, left, right))
        }
        _ => false,
    }
}

fn alpha_eq_in(
    a: &Formula,
    b: &Formula,
    left: &mut HashMap<String, usize>,
    right: &mut HashMap<String, usize>,
    tol: f64,
) -> bool {
    match (a, b) {
        (Formula::Atom { predicate: p, args: xs }, Formula::Atom { predicate: q, args: ys }) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_term(x, y, left, right))
        }
        (Formula::Not(x), Formula::Not(y)) => alpha_eq_in(x, y, left, right, tol),
        (Formula::And(xs, pa), Formula::And(ys, pb)) | (Formula::Or(xs, pa), Formula::Or(ys, pb)) => {
            xs.len() == ys.len()
                && params_approx_eq(pa, pb, tol)
                && xs.iter().zip(ys).all(|(x, y)| alpha_eq_in(x, y, left, right, tol))
        }
        (Formula::Implies(x1, x2, pa), Formula::Implies(y1, y2, pb)) => {
            params_approx_eq(pa, pb, tol)
                && alpha_eq_in(x1, y1, left, right, tol)
                && alpha_eq_in(x2, y2, left, right, tol)
        }
        (Formula::Iff(x1, x2), Formula::Iff(y1, y2)) => {
            alpha_eq_in(x1, y1, left, right, tol) && alpha_eq_in(x2, y2, left, right, tol)
        }
        (Formula::ForAll(v, x), Formula::ForAll(w, y)) | (Formula::Exists(v, x), Formula::Exists(w, y)) => {
            let depth = left.values().chain(right.values()).max().map_or(1, |m| m + 1);
            let old_l = left.insert(v.clone(), depth);
            let old_r = right.insert(w.clone(), depth);
            let ok = alpha_eq_in(x, y, left, right, tol);
            restore(left, v, old_l);
            restore(right, w, old_r);
            ok
        }
        _ => false,
    }
}

fn restore(map: &mut HashMap<String, usize>, key: &str, old: Option<usize>) {
    match old {
        Some(o) => {
            map.insert(key.to_string(), o);
        }
        None => {
            map.remove(key);
        }
    }
}

/// Formats a real with at most six significant digits, shortest form.
pub(crate) fn format_sig6(x: f64) -> String {
    let rounded: f64 = format!("{:.5e}", x).parse().unwrap_or(x);
    format!("{}", rounded)
}

fn write_params(f: &mut fmt::Formatter<'_>, params: &Option<Params>) -> fmt::Result {
    if let Some(p) = params {
        f.write_str(" :weights (")?;
        for (i, w) in p.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&format_sig6(*w))?;
        }
        write!(f, ") :bias {}", format_sig6(p.bias))?;
    }
    Ok(())
}

/// Renders the formula in the knowledge-base s-expression syntax.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { predicate, args } => {
                if args.is_empty() {
                    return f.write_str(predicate);
                }
                write!(f, "({}", predicate)?;
                for a in args {
                    write!(f, " {}", a)?;
                }
                f.write_str(")")
            }
            Formula::Not(inner) => write!(f, "(not {})", inner),
            Formula::And(cs, p) | Formula::Or(cs, p) => {
                f.write_str(if matches!(self, Formula::And(..)) { "(and" } else { "(or" })?;
                write_params(f, p)?;
                for c in cs {
                    write!(f, " {}", c)?;
                }
                f.write_str(")")
            }
            Formula::Implies(a, b, p) => {
                f.write_str("(implies")?;
                write_params(f, p)?;
                write!(f, " {} {})", a, b)
            }
            Formula::Iff(a, b) => write!(f, "(iff {} {})", a, b),
            Formula::ForAll(v, body) => write!(f, "(forall {} {})", v, body),
            Formula::Exists(v, body) => write!(f, "(exists {} {})", v, body),
        }
    }
}
