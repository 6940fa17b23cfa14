//! Axioms of the first-order theories the engine supports.
//!
//! Equality contributes reflexivity, symmetry and transitivity once per model
//! plus one congruence axiom per non-nullary predicate. Each eliminated
//! function contributes a functional axiom for its relation. Generated
//! variables live in the `$` namespace so they never collide with user names.

use thiserror::Error;

use crate::formula::{Formula, Term, EQUALITY};
use crate::kb::{Axiom, KnowledgeBase};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomOrigin {
    EqualityBase,
    Congruence(String),
    Functional(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryAxiom {
    pub name: String,
    pub formula: Formula,
    pub origin: AxiomOrigin,
}

impl From<TheoryAxiom> for Axiom {
    fn from(t: TheoryAxiom) -> Axiom {
        Axiom { name: t.name, formula: t.formula }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("functional axiom for `{0}` requires `theory equality`")]
    EqualityDisabled(String),
    #[error("functional relation `{0}` needs arity at least 2, got {1}")]
    RelationArity(String, usize),
}

pub const REFLEXIVITY: &str = "eq.reflexivity";
pub const SYMMETRY: &str = "eq.symmetry";
pub const TRANSITIVITY: &str = "eq.transitivity";

pub fn congruence_name(predicate: &str) -> String {
    format!("eq.congruence.{}", predicate)
}

pub fn functional_name(relation: &str) -> String {
    format!("fn.functional.{}", relation)
}

/// True for names in the reserved theory-axiom namespace.
pub fn is_theory_axiom(name: &str) -> bool {
    name.starts_with("eq.") || name.starts_with("fn.")
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("${}{}", prefix, i)).collect()
}

fn conjoin(mut parts: Vec<Formula>) -> Formula {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Formula::and(parts)
    }
}

/// Reflexivity, symmetry and transitivity of `=`.
pub fn equality_base_axioms() -> Vec<TheoryAxiom> {
    let (x, y, z) = (v("$x"), v("$y"), v("$z"));
    let reflexivity = Formula::forall("$x", Formula::eq(x.clone(), x.clone()));
    let symmetry = Formula::forall_many(
        &["$x", "$y"],
        Formula::implies(Formula::eq(x.clone(), y.clone()), Formula::eq(y.clone(), x.clone())),
    );
    let transitivity = Formula::forall_many(
        &["$x", "$y", "$z"],
        Formula::implies(
            Formula::and(vec![Formula::eq(x.clone(), y.clone()), Formula::eq(y, z.clone())]),
            Formula::eq(x, z),
        ),
    );
    [(REFLEXIVITY, reflexivity), (SYMMETRY, symmetry), (TRANSITIVITY, transitivity)]
        .into_iter()
        .map(|(name, formula)| TheoryAxiom { name: name.into(), formula, origin: AxiomOrigin::EqualityBase })
        .collect()
}

/// `forall xs ys. (x1=y1 & .. & xn=yn) -> (P xs <-> P ys)`. Nullary
/// predicates and `=` itself get no axiom.
pub fn congruence_axiom(predicate: &str, arity: usize) -> Option<TheoryAxiom> {
    if arity == 0 || predicate == EQUALITY {
        return None;
    }
    let xs = numbered("x", arity);
    let ys = numbered("y", arity);
    let antecedent = conjoin(xs.iter().zip(&ys).map(|(x, y)| Formula::eq(v(x), v(y))).collect());
    let consequent = Formula::iff(
        Formula::atom(predicate, xs.iter().map(|x| v(x)).collect()),
        Formula::atom(predicate, ys.iter().map(|y| v(y)).collect()),
    );
    let vars: Vec<&String> = xs.iter().chain(&ys).collect();
    Some(TheoryAxiom {
        name: congruence_name(predicate),
        formula: Formula::forall_many(&vars.iter().map(|s| s.as_str()).collect::<Vec<_>>(), Formula::implies(antecedent, consequent)),
        origin: AxiomOrigin::Congruence(predicate.to_string()),
    })
}

/// `forall ws x y. (R ws x & R ws y) -> x = y` for an `(n+1)`-ary relation.
pub fn functional_axiom(relation: &str, arity: usize, equality: bool) -> Result<TheoryAxiom, TheoryError> {
    if !equality {
        return Err(TheoryError::EqualityDisabled(relation.to_string()));
    }
    if arity < 2 {
        return Err(TheoryError::RelationArity(relation.to_string(), arity));
    }
    let ws = numbered("w", arity - 1);
    let with_last = |last: &str| {
        let mut args: Vec<Term> = ws.iter().map(|w| v(w)).collect();
        args.push(v(last));
        Formula::atom(relation, args)
    };
    let body = Formula::implies(
        Formula::and(vec![with_last("$x"), with_last("$y")]),
        Formula::eq(v("$x"), v("$y")),
    );
    let mut vars: Vec<&str> = ws.iter().map(String::as_str).collect();
    vars.extend(["$x", "$y"]);
    Ok(TheoryAxiom {
        name: functional_name(relation),
        formula: Formula::forall_many(&vars, body),
        origin: AxiomOrigin::Functional(relation.to_string()),
    })
}

/// Prepends the equality base and one congruence axiom per predicate, in
/// declaration order. Axioms whose names already exist are skipped, so the
/// operation is idempotent. A knowledge base without equality is unchanged.
pub fn inject_equality(kb: &KnowledgeBase) -> KnowledgeBase {
    let mut out = kb.clone();
    if !kb.has_equality() {
        return out;
    }
    let generated = equality_base_axioms()
        .into_iter()
        .chain(kb.predicates.iter().filter_map(|(p, &n)| congruence_axiom(p, n)));
    let mut front: Vec<Axiom> = Vec::new();
    for ax in generated {
        if kb.axiom(&ax.name).is_none() && !front.iter().any(|a| a.name == ax.name) {
            front.push(ax.into());
        }
    }
    front.append(&mut out.axioms);
    out.axioms = front;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_kb;

    #[test]
    fn base_axioms_are_named_and_closed() {
        let axioms = equality_base_axioms();
        let names: Vec<_> = axioms.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, vec![REFLEXIVITY, SYMMETRY, TRANSITIVITY]);
        assert!(axioms.iter().all(|a| a.formula.is_sentence()));
    }

    #[test]
    fn reflexivity_shape() {
        let r = &equality_base_axioms()[0].formula;
        assert_eq!(r.quantifier_count(), 1);
        assert_eq!(r.atom_count(), 1);
    }

    #[test]
    fn transitivity_antecedent_is_binary_conjunction() {
        let t = &equality_base_axioms()[2].formula;
        let mut body = t;
        while let Formula::ForAll(_, inner) = body {
            body = inner;
        }
        match body {
            Formula::Implies(lhs, _, None) => match &**lhs {
                Formula::And(cs, None) => {
                    assert_eq!(cs.len(), 2);
                    assert!(cs.iter().all(|c| matches!(c, Formula::Atom { predicate, .. } if predicate == EQUALITY)));
                }
                other => panic!("unexpected antecedent {:?}", other),
            },
            other => panic!("unexpected body {:?}", other),
        }
        assert_eq!(
            t.to_string(),
            "(forall $x (forall $y (forall $z (implies (and (= $x $y) (= $y $z)) (= $x $z)))))"
        );
    }

    #[test]
    fn unary_congruence() {
        let c = congruence_axiom("dog", 1).unwrap();
        assert_eq!(c.name, "eq.congruence.dog");
        assert_eq!(
            c.formula.to_string(),
            "(forall $x1 (forall $y1 (implies (= $x1 $y1) (iff (dog $x1) (dog $y1)))))"
        );
    }

    #[test]
    fn binary_congruence() {
        let c = congruence_axiom("loves", 2).unwrap();
        assert_eq!(
            c.formula.to_string(),
            "(forall $x1 (forall $x2 (forall $y1 (forall $y2 (implies (and (= $x1 $y1) (= $x2 $y2)) (iff (loves $x1 $x2) (loves $y1 $y2)))))))"
        );
        assert!(c.formula.is_sentence());
    }

    #[test]
    fn no_congruence_for_nullary_or_equality() {
        assert!(congruence_axiom("rains", 0).is_none());
        assert!(congruence_axiom(EQUALITY, 2).is_none());
    }

    #[test]
    fn functional_unary() {
        let f = functional_axiom("R_f", 2, true).unwrap();
        assert_eq!(f.name, "fn.functional.R_f");
        assert_eq!(
            f.formula.to_string(),
            "(forall $w1 (forall $x (forall $y (implies (and (R_f $w1 $x) (R_f $w1 $y)) (= $x $y)))))"
        );
        let g = functional_axiom("R_g", 2, true).unwrap();
        assert_eq!(g.formula.to_string(), f.formula.to_string().replace("R_f", "R_g"));
    }

    #[test]
    fn functional_binary_shares_inputs() {
        let h = functional_axiom("R_h", 3, true).unwrap();
        assert_eq!(h.formula.quantifier_count(), 4);
        assert_eq!(
            h.formula.to_string(),
            "(forall $w1 (forall $w2 (forall $x (forall $y (implies (and (R_h $w1 $w2 $x) (R_h $w1 $w2 $y)) (= $x $y))))))"
        );
    }

    #[test]
    fn functional_errors() {
        assert_eq!(functional_axiom("R_f", 2, false), Err(TheoryError::EqualityDisabled("R_f".into())));
        assert!(matches!(functional_axiom("R", 1, true), Err(TheoryError::RelationArity(_, 1))));
    }

    #[test]
    fn injection_is_idempotent_and_counts() {
        let kb = parse_kb("theory equality\npredicate dog/1\npredicate loves/2\npredicate rains/0\naxiom rains").unwrap();
        let once = inject_equality(&kb);
        assert_eq!(once.axioms.len(), 3 + 2 + 1);
        assert_eq!(once.axioms.last().unwrap().name, "axiom.1");
        assert_eq!(inject_equality(&once), once);
        assert!(once.axioms.iter().all(|a| a.formula.is_sentence()));
    }

    #[test]
    fn no_injection_without_theory() {
        let kb = parse_kb("predicate dog/1").unwrap();
        assert_eq!(inject_equality(&kb), kb);
    }
}
