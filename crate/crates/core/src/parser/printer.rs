use std::fmt::Write;

use crate::bounds::TruthBounds;
use crate::kb::{KnowledgeBase, World};

fn truth_literal(b: TruthBounds) -> String {
    if b == TruthBounds::TRUE {
        "true".into()
    } else if b == TruthBounds::FALSE {
        "false".into()
    } else if b == TruthBounds::UNKNOWN {
        "unknown".into()
    } else {
        format!("{} {}", b.lower, b.upper)
    }
}

/// Renders a knowledge base in the `.lnn` format. Declarations keep their
/// order; facts come out sorted. The empty knowledge base renders as "".
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for t in &kb.theories {
        writeln!(out, "theory {}", t).unwrap();
    }
    for (p, n) in &kb.predicates {
        writeln!(out, "predicate {}/{}", p, n).unwrap();
    }
    for (f, n) in &kb.functions {
        writeln!(out, "function {}/{}", f, n).unwrap();
    }
    for c in &kb.constants {
        writeln!(out, "constant {}", c).unwrap();
    }
    for ax in &kb.axioms {
        writeln!(out, "axiom {} {}", ax.name, ax.formula).unwrap();
    }
    for (atom, b) in &kb.facts {
        writeln!(out, "fact {} {}", atom.as_formula(), truth_literal(*b)).unwrap();
    }
    for q in &kb.queries {
        let flag = if q.world == World::Axiom { " as-axiom" } else { "" };
        writeln!(out, "query {} {}{}", q.name, q.formula, flag).unwrap();
    }
    out
}
