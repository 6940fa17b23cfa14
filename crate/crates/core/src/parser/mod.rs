//! Reader and writer for the `.lnn` knowledge-base format.
//!
//! The format is line oriented. Each non-blank line is one directive:
//!
//! ```text
//! theory equality
//! predicate dog/1
//! function f/1
//! constant Aggie
//! axiom [name] <formula>
//! fact <atom> true|false|unknown|<lower> <upper>
//! query <name> <formula> [as-axiom]
//! ```
//!
//! Formulas are s-expressions with the heads `not`, `and`, `or`, `implies`,
//! `iff`, `forall`, `exists` and `=`. Weighted connectives take
//! `:weights (w1 w2 ..)` and `:bias b` before their operands. `#` starts a
//! comment. Constants that only appear in facts are declared implicitly.

mod printer;
mod sexp;

use std::fmt;

use thiserror::Error;

use crate::bounds::TruthBounds;
use crate::formula::{Formula, Params, Term, EQUALITY};
use crate::kb::{Axiom, GroundAtom, KnowledgeBase, Query, World, EQUALITY_THEORY};

pub use printer::serialize_kb;
use sexp::{read_line, Sexp, SexpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("`=` used without `theory equality`")]
    EqualityDisabled,
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

const KEYWORDS: &[&str] = &["not", "and", "or", "implies", "iff", "forall", "exists", EQUALITY];

fn err(span: SourceSpan, kind: ParseErrorKind) -> ParseError {
    ParseError { span, kind }
}

fn syntax(span: SourceSpan, msg: impl Into<String>) -> ParseError {
    err(span, ParseErrorKind::Syntax(msg.into()))
}

/// Parses a knowledge base, discarding warnings.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, ParseError> {
    parse_kb_with_warnings(text).map(|(kb, _)| kb)
}

struct Line {
    span: SourceSpan,
    directive: String,
    rest: Vec<Sexp>,
}

/// Parses a knowledge base and reports implicitly declared constants.
pub fn parse_kb_with_warnings(text: &str) -> Result<(KnowledgeBase, Vec<ParseWarning>), ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let mut items = read_line(raw, i + 1)?.into_iter();
        let Some(head) = items.next() else { continue };
        let directive = head
            .symbol()
            .ok_or_else(|| syntax(head.span, "expected a directive keyword"))?
            .to_string();
        lines.push(Line { span: head.span, directive, rest: items.collect() });
    }

    let mut p = Parser { kb: KnowledgeBase::new(), warnings: Vec::new() };
    // declarations first so later directives may refer to any declared symbol
    for line in &lines {
        match line.directive.as_str() {
            "theory" => p.theory(line)?,
            "predicate" => p.signature(line, false)?,
            "function" => p.signature(line, true)?,
            "constant" => p.constant(line)?,
            "axiom" | "fact" | "query" => {}
            other => return Err(syntax(line.span, format!("unknown directive `{}`", other))),
        }
    }
    for line in lines.iter().filter(|l| l.directive == "fact") {
        p.fact(line)?;
    }
    for line in &lines {
        match line.directive.as_str() {
            "axiom" => p.axiom(line)?,
            "query" => p.query(line)?,
            _ => {}
        }
    }
    Ok((p.kb, p.warnings))
}

struct Parser {
    kb: KnowledgeBase,
    warnings: Vec<ParseWarning>,
}

impl Parser {
    fn single_symbol<'a>(&self, line: &'a Line, what: &str) -> Result<(&'a str, SourceSpan), ParseError> {
        match line.rest.as_slice() {
            [item] => item
                .symbol()
                .map(|s| (s, item.span))
                .ok_or_else(|| syntax(item.span, format!("expected {}", what))),
            [] => Err(syntax(line.span, format!("missing {}", what))),
            [_, extra, ..] => Err(syntax(extra.span, "unexpected trailing input")),
        }
    }

    fn declare_name(&self, name: &str, span: SourceSpan) -> Result<(), ParseError> {
        if name.is_empty() || KEYWORDS.contains(&name) || name.starts_with(':') {
            return Err(syntax(span, format!("`{}` cannot be used as a symbol name", name)));
        }
        if self.kb.is_declared(name) {
            return Err(err(span, ParseErrorKind::Duplicate(name.to_string())));
        }
        Ok(())
    }

    fn theory(&mut self, line: &Line) -> Result<(), ParseError> {
        let (name, span) = self.single_symbol(line, "theory name")?;
        if name != EQUALITY_THEORY {
            return Err(syntax(span, format!("unknown theory `{}`", name)));
        }
        if !self.kb.theories.insert(name.to_string()) {
            return Err(err(span, ParseErrorKind::Duplicate(name.to_string())));
        }
        Ok(())
    }

    fn signature(&mut self, line: &Line, function: bool) -> Result<(), ParseError> {
        let (sig, span) = self.single_symbol(line, "`name/arity`")?;
        let (name, arity) = sig
            .rsplit_once('/')
            .and_then(|(n, a)| a.parse::<usize>().ok().map(|a| (n, a)))
            .ok_or_else(|| syntax(span, format!("expected `name/arity`, got `{}`", sig)))?;
        self.declare_name(name, span)?;
        if function {
            if arity == 0 {
                return Err(syntax(span, "functions need at least one argument; declare a constant instead"));
            }
            self.kb.functions.insert(name.to_string(), arity);
        } else {
            self.kb.predicates.insert(name.to_string(), arity);
        }
        Ok(())
    }

    fn constant(&mut self, line: &Line) -> Result<(), ParseError> {
        let (name, span) = self.single_symbol(line, "constant name")?;
        self.declare_name(name, span)?;
        self.kb.constants.insert(name.to_string());
        Ok(())
    }

    fn fact(&mut self, line: &Line) -> Result<(), ParseError> {
        let Some((atom_sexp, truth)) = line.rest.split_first() else {
            return Err(syntax(line.span, "missing fact atom"));
        };
        let bounds = parse_truth(truth, atom_sexp.span)?;
        let (predicate, arg_sexps, span) = match &atom_sexp.kind {
            SexpKind::Symbol(s) => (s.as_str(), &[][..], atom_sexp.span),
            SexpKind::List(items) => {
                let (head, args) = items.split_first().ok_or_else(|| syntax(atom_sexp.span, "empty fact atom"))?;
                let name = head.symbol().ok_or_else(|| syntax(head.span, "expected a predicate name"))?;
                (name, args, head.span)
            }
        };
        let arity = self.predicate_arity(predicate, span)?;
        if arity != arg_sexps.len() {
            return Err(arity_error(predicate, arity, arg_sexps.len(), span));
        }
        let args = arg_sexps.iter().map(|s| self.ground_term(s)).collect::<Result<Vec<_>, _>>()?;
        let atom = GroundAtom::new(predicate, args);
        if self.kb.facts.insert(atom.clone(), bounds).is_some() {
            return Err(err(atom_sexp.span, ParseErrorKind::Duplicate(atom.as_formula().to_string())));
        }
        Ok(())
    }

    fn ground_term(&mut self, s: &Sexp) -> Result<Term, ParseError> {
        self.declare_implicit(s)?;
        self.term(s, &[])
    }

    fn declare_implicit(&mut self, s: &Sexp) -> Result<(), ParseError> {
        match &s.kind {
            SexpKind::Symbol(name) if !self.kb.is_declared(name) => {
                self.declare_name(name, s.span)?;
                self.kb.constants.insert(name.clone());
                self.warnings.push(ParseWarning {
                    span: s.span,
                    message: format!("constant `{}` declared implicitly", name),
                });
            }
            SexpKind::List(items) => {
                for item in items.iter().skip(1) {
                    self.declare_implicit(item)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn axiom(&mut self, line: &Line) -> Result<(), ParseError> {
        let (name, formula_sexp) = match line.rest.as_slice() {
            [f] => (None, f),
            [n, f] => {
                let name = n.symbol().ok_or_else(|| syntax(n.span, "expected an axiom name"))?;
                (Some((name.to_string(), n.span)), f)
            }
            [] => return Err(syntax(line.span, "missing axiom formula")),
            [_, _, extra, ..] => return Err(syntax(extra.span, "unexpected trailing input")),
        };
        let formula = self.formula(formula_sexp, &mut Vec::new())?;
        let name = match name {
            Some((name, span)) => {
                if self.kb.axiom(&name).is_some() {
                    return Err(err(span, ParseErrorKind::Duplicate(name)));
                }
                name
            }
            None => {
                let mut n = self.kb.axioms.len() + 1;
                while self.kb.axiom(&format!("axiom.{}", n)).is_some() {
                    n += 1;
                }
                format!("axiom.{}", n)
            }
        };
        self.kb.axioms.push(Axiom { name, formula });
        Ok(())
    }

    fn query(&mut self, line: &Line) -> Result<(), ParseError> {
        let (n, f, world) = match line.rest.as_slice() {
            [n, f] => (n, f, World::Open),
            [n, f, flag] if flag.symbol() == Some("as-axiom") => (n, f, World::Axiom),
            [_, _, flag, ..] => return Err(syntax(flag.span, "expected `as-axiom` or end of line")),
            _ => return Err(syntax(line.span, "expected `query <name> <formula> [as-axiom]`")),
        };
        let name = n.symbol().ok_or_else(|| syntax(n.span, "expected a query name"))?;
        if self.kb.queries.iter().any(|q| q.name == name) {
            return Err(err(n.span, ParseErrorKind::Duplicate(name.to_string())));
        }
        let formula = self.formula(f, &mut Vec::new())?;
        self.kb.queries.push(Query { name: name.to_string(), formula, world });
        Ok(())
    }

    fn predicate_arity(&self, name: &str, span: SourceSpan) -> Result<usize, ParseError> {
        if name == EQUALITY {
            return if self.kb.has_equality() { Ok(2) } else { Err(err(span, ParseErrorKind::EqualityDisabled)) };
        }
        self.kb
            .predicates
            .get(name)
            .copied()
            .ok_or_else(|| err(span, ParseErrorKind::Undeclared(name.to_string())))
    }

    fn formula(&self, s: &Sexp, scope: &mut Vec<String>) -> Result<Formula, ParseError> {
        let items = match &s.kind {
            SexpKind::Symbol(name) => {
                let arity = self.predicate_arity(name, s.span)?;
                if arity != 0 {
                    return Err(arity_error(name, arity, 0, s.span));
                }
                return Ok(Formula::atom(name.clone(), Vec::new()));
            }
            SexpKind::List(items) => items,
        };
        let (head, args) = items.split_first().ok_or_else(|| syntax(s.span, "empty formula"))?;
        let op = head.symbol().ok_or_else(|| syntax(head.span, "expected an operator or predicate"))?;
        match op {
            "not" => match args {
                [inner] => Ok(Formula::not(self.formula(inner, scope)?)),
                _ => Err(syntax(head.span, "`not` takes exactly one operand")),
            },
            "and" | "or" | "implies" => {
                let (params, operands) = parse_params(args)?;
                let subs = operands.iter().map(|o| self.formula(o, scope)).collect::<Result<Vec<_>, _>>()?;
                if op == "implies" && subs.len() != 2 {
                    return Err(syntax(head.span, "`implies` takes exactly two operands"));
                }
                if subs.len() < 2 {
                    return Err(syntax(head.span, format!("`{}` needs at least two operands", op)));
                }
                let params = params.map(|(w, b)| Params { weights: w.unwrap_or_else(|| vec![1.0; subs.len()]), bias: b });
                if let Some(p) = &params {
                    if p.weights.len() != subs.len() {
                        return Err(syntax(head.span, "weight count does not match operand count"));
                    }
                }
                Ok(match op {
                    "and" => Formula::And(subs, params),
                    "or" => Formula::Or(subs, params),
                    _ => {
                        let mut it = subs.into_iter();
                        let (a, b) = (it.next().unwrap(), it.next().unwrap());
                        Formula::Implies(Box::new(a), Box::new(b), params)
                    }
                })
            }
            "iff" => match args {
                [a, b] => Ok(Formula::iff(self.formula(a, scope)?, self.formula(b, scope)?)),
                _ => Err(syntax(head.span, "`iff` takes exactly two operands")),
            },
            "forall" | "exists" => {
                let [vars, body] = args else {
                    return Err(syntax(head.span, format!("expected `({} var body)`", op)));
                };
                let names: Vec<(String, SourceSpan)> = match &vars.kind {
                    SexpKind::Symbol(v) => vec![(v.clone(), vars.span)],
                    SexpKind::List(vs) if !vs.is_empty() => vs
                        .iter()
                        .map(|v| {
                            v.symbol()
                                .map(|n| (n.to_string(), v.span))
                                .ok_or_else(|| syntax(v.span, "expected a variable name"))
                        })
                        .collect::<Result<_, _>>()?,
                    _ => return Err(syntax(vars.span, "expected a variable or variable list")),
                };
                for (v, span) in &names {
                    if KEYWORDS.contains(&v.as_str()) || v.starts_with(':') || self.kb.is_declared(v) {
                        return Err(syntax(*span, format!("`{}` cannot be bound as a variable", v)));
                    }
                }
                let depth = scope.len();
                scope.extend(names.iter().map(|(v, _)| v.clone()));
                let body = self.formula(body, scope);
                scope.truncate(depth);
                let body = body?;
                Ok(names.iter().rev().fold(body, |acc, (v, _)| match op {
                    "forall" => Formula::forall(v.clone(), acc),
                    _ => Formula::exists(v.clone(), acc),
                }))
            }
            predicate => {
                let arity = self.predicate_arity(predicate, head.span)?;
                if arity != args.len() {
                    return Err(arity_error(predicate, arity, args.len(), head.span));
                }
                let terms = args.iter().map(|a| self.term(a, scope)).collect::<Result<Vec<_>, _>>()?;
                Ok(Formula::atom(predicate, terms))
            }
        }
    }

    fn term(&self, s: &Sexp, scope: &[String]) -> Result<Term, ParseError> {
        match &s.kind {
            SexpKind::Symbol(name) => {
                if scope.iter().any(|v| v == name) {
                    Ok(Term::var(name.clone()))
                } else if self.kb.constants.contains(name) {
                    Ok(Term::constant(name.clone()))
                } else if let Some(&arity) = self.kb.functions.get(name) {
                    Err(arity_error(name, arity, 0, s.span))
                } else {
                    Err(err(s.span, ParseErrorKind::Undeclared(name.clone())))
                }
            }
            SexpKind::List(items) => {
                let (head, args) = items.split_first().ok_or_else(|| syntax(s.span, "empty term"))?;
                let name = head.symbol().ok_or_else(|| syntax(head.span, "expected a function name"))?;
                let &arity = self
                    .kb
                    .functions
                    .get(name)
                    .ok_or_else(|| err(head.span, ParseErrorKind::Undeclared(name.to_string())))?;
                if arity != args.len() {
                    return Err(arity_error(name, arity, args.len(), head.span));
                }
                let args = args.iter().map(|a| self.term(a, scope)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::app(name, args))
            }
        }
    }
}

/// Splits leading `:weights`/`:bias` options from operands.
#[allow(clippy::type_complexity)]
fn parse_params(args: &[Sexp]) -> Result<(Option<(Option<Vec<f64>>, f64)>, &[Sexp]), ParseError> {
    let mut weights = None;
    let mut bias = None;
    let mut rest = args;
    while let Some(key) = rest.first().and_then(|s| s.symbol().filter(|k| k.starts_with(':'))) {
        let key_span = rest[0].span;
        let value = rest.get(1).ok_or_else(|| syntax(key_span, format!("`{}` needs a value", key)))?;
        match key {
            ":weights" => {
                let SexpKind::List(ws) = &value.kind else {
                    return Err(syntax(value.span, "expected a weight list"));
                };
                weights = Some(ws.iter().map(parse_nonneg).collect::<Result<Vec<_>, _>>()?);
            }
            ":bias" => bias = Some(parse_nonneg(value)?),
            other => return Err(syntax(key_span, format!("unknown option `{}`", other))),
        }
        rest = &rest[2..];
    }
    if weights.is_none() && bias.is_none() {
        return Ok((None, rest));
    }
    Ok((Some((weights, bias.unwrap_or(1.0))), rest))
}

fn arity_error(symbol: &str, expected: usize, found: usize, span: SourceSpan) -> ParseError {
    err(span, ParseErrorKind::Arity { symbol: symbol.to_string(), expected, found })
}

fn parse_number(s: &Sexp) -> Result<f64, ParseError> {
    s.symbol()
        .and_then(|t| t.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| syntax(s.span, "expected a number"))
}

fn parse_nonneg(s: &Sexp) -> Result<f64, ParseError> {
    let v = parse_number(s)?;
    if v < 0.0 {
        return Err(syntax(s.span, "weights and biases must be non-negative"));
    }
    Ok(v)
}

fn parse_truth(items: &[Sexp], span: SourceSpan) -> Result<TruthBounds, ParseError> {
    match items {
        [one] => match one.symbol() {
            Some("true") => Ok(TruthBounds::TRUE),
            Some("false") => Ok(TruthBounds::FALSE),
            Some("unknown") => Ok(TruthBounds::UNKNOWN),
            _ => Err(syntax(one.span, "expected `true`, `false`, `unknown` or `<lower> <upper>`")),
        },
        [l, u] => {
            let (lower, upper) = (parse_number(l)?, parse_number(u)?);
            TruthBounds::new(lower, upper).map_err(|e| syntax(l.span, e.to_string()))
        }
        [] => Err(syntax(span, "missing truth value")),
        [_, _, extra, ..] => Err(syntax(extra.span, "unexpected trailing input")),
    }
}
