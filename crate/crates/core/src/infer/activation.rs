//! Weighted Łukasiewicz activations over truth bounds, upward and downward.
//!
//! Conjunction is `clamp(bias - sum_i w_i (1 - x_i))`, evaluated once on the
//! lower bounds and once on the upper bounds. Disjunction is its De Morgan
//! dual and `p -> q` is the disjunction of `not p` and `q`, so at unit
//! parameters the three reduce to `max(0, p+q-1)`, `min(1, p+q)` and
//! `min(1, 1-p+q)`.
//!
//! The downward rules invert the conjunction on intervals. With node bounds
//! `[yl, yu]` and `s = bias - sum_j w_j (1 - x_j)`:
//!
//! * `yl > 0` implies `s >= yl`, which lower-bounds each `x_i`;
//! * `yu < 1` implies `s <= yu`, which upper-bounds each `x_i`.
//!
//! Inside the clamp's flat regions nothing about the inputs is known, hence
//! the guards. Disjunction and implication go through complements.

use super::arith::{Arith, Interval, Plain};
use crate::bounds::TruthBounds;
use crate::graph::NodeKind;

/// Candidate bounds for one child, `None` where nothing can be concluded.
pub(crate) type Candidate<S> = (Option<S>, Option<S>);

fn and_value<A: Arith>(ar: &mut A, bias: A::S, weights: &[A::S], xs: impl Iterator<Item = A::S>) -> A::S {
    let mut s = bias;
    for (w, x) in weights.iter().zip(xs) {
        let miss = ar.one_minus(x);
        let t = ar.mul(*w, miss);
        s = ar.sub(s, t);
    }
    ar.clamp01(s)
}

pub(crate) fn up_and<A: Arith>(ar: &mut A, inputs: &[Interval<A::S>], weights: &[A::S], bias: A::S) -> Interval<A::S> {
    let lower = and_value(ar, bias, weights, inputs.iter().map(|i| i.lower));
    let upper = and_value(ar, bias, weights, inputs.iter().map(|i| i.upper));
    Interval::new(lower, upper)
}

pub(crate) fn up_or<A: Arith>(ar: &mut A, inputs: &[Interval<A::S>], weights: &[A::S], bias: A::S) -> Interval<A::S> {
    let negated: Vec<_> = inputs.iter().map(|i| i.complement(ar)).collect();
    up_and(ar, &negated, weights, bias).complement(ar)
}

pub(crate) fn up_implies<A: Arith>(
    ar: &mut A,
    lhs: Interval<A::S>,
    rhs: Interval<A::S>,
    weights: &[A::S],
    bias: A::S,
) -> Interval<A::S> {
    let not_lhs = lhs.complement(ar);
    up_or(ar, &[not_lhs, rhs], weights, bias)
}

pub(crate) fn up_forall<A: Arith>(ar: &A, inputs: &[Interval<A::S>]) -> Interval<A::S> {
    let pick = |xs: &mut dyn Iterator<Item = A::S>| {
        xs.min_by(|a, b| ar.value(*a).total_cmp(&ar.value(*b)))
    };
    let lower = pick(&mut inputs.iter().map(|i| i.lower));
    let upper = pick(&mut inputs.iter().map(|i| i.upper));
    match (lower, upper) {
        (Some(l), Some(u)) => Interval::new(l, u),
        _ => panic!("quantifier node without groundings"),
    }
}

pub(crate) fn up_exists<A: Arith>(ar: &A, inputs: &[Interval<A::S>]) -> Interval<A::S> {
    let pick = |xs: &mut dyn Iterator<Item = A::S>| {
        xs.max_by(|a, b| ar.value(*a).total_cmp(&ar.value(*b)))
    };
    let lower = pick(&mut inputs.iter().map(|i| i.lower));
    let upper = pick(&mut inputs.iter().map(|i| i.upper));
    match (lower, upper) {
        (Some(l), Some(u)) => Interval::new(l, u),
        _ => panic!("quantifier node without groundings"),
    }
}

/// Downward inverse of the weighted conjunction. Candidates are clamped into
/// `[0, 1]`.
pub(crate) fn down_and<A: Arith>(
    ar: &mut A,
    node: Interval<A::S>,
    children: &[Interval<A::S>],
    weights: &[A::S],
    bias: A::S,
) -> Vec<Candidate<A::S>> {
    let lower_known = ar.value(node.lower) > 0.0;
    let upper_known = ar.value(node.upper) < 1.0;
    let mut out = Vec::with_capacity(children.len());
    for i in 0..children.len() {
        if ar.value(weights[i]) <= 0.0 || !(lower_known || upper_known) {
            out.push((None, None));
            continue;
        }
        // bias - y - sum_{j != i} w_j (1 - x_j), solved for x_i
        let solve = |ar: &mut A, y: A::S, others: &dyn Fn(&Interval<A::S>) -> A::S| {
            let mut slack = ar.sub(bias, y);
            for (j, c) in children.iter().enumerate() {
                if j != i {
                    let miss = ar.one_minus(others(c));
                    let t = ar.mul(weights[j], miss);
                    slack = ar.sub(slack, t);
                }
            }
            let share = ar.div(slack, weights[i]);
            let x = ar.one_minus(share);
            ar.clamp01(x)
        };
        let lower = lower_known.then(|| solve(ar, node.lower, &|c| c.upper));
        let upper = upper_known.then(|| solve(ar, node.upper, &|c| c.lower));
        out.push((lower, upper));
    }
    out
}

fn complement_candidate<A: Arith>(ar: &mut A, c: Candidate<A::S>) -> Candidate<A::S> {
    (c.1.map(|u| ar.one_minus(u)), c.0.map(|l| ar.one_minus(l)))
}

pub(crate) fn down_or<A: Arith>(
    ar: &mut A,
    node: Interval<A::S>,
    children: &[Interval<A::S>],
    weights: &[A::S],
    bias: A::S,
) -> Vec<Candidate<A::S>> {
    let node = node.complement(ar);
    let negated: Vec<_> = children.iter().map(|c| c.complement(ar)).collect();
    down_and(ar, node, &negated, weights, bias)
        .into_iter()
        .map(|c| complement_candidate(ar, c))
        .collect()
}

pub(crate) fn down_implies<A: Arith>(
    ar: &mut A,
    node: Interval<A::S>,
    lhs: Interval<A::S>,
    rhs: Interval<A::S>,
    weights: &[A::S],
    bias: A::S,
) -> Vec<Candidate<A::S>> {
    let not_lhs = lhs.complement(ar);
    let mut out = down_or(ar, node, &[not_lhs, rhs], weights, bias);
    out[0] = complement_candidate(ar, out[0]);
    out
}

fn iv(b: TruthBounds) -> Interval<f64> {
    Interval::new(b.lower, b.upper)
}

fn tb(i: Interval<f64>) -> TruthBounds {
    TruthBounds { lower: i.lower, upper: i.upper }
}

fn ivs(bs: &[TruthBounds]) -> Vec<Interval<f64>> {
    bs.iter().copied().map(iv).collect()
}

/// Weighted conjunction of the input bounds.
pub fn upward_and(inputs: &[TruthBounds], weights: &[f64], bias: f64) -> TruthBounds {
    assert_eq!(inputs.len(), weights.len());
    tb(up_and(&mut Plain, &ivs(inputs), weights, bias))
}

/// Weighted disjunction, the De Morgan dual of [`upward_and`].
pub fn upward_or(inputs: &[TruthBounds], weights: &[f64], bias: f64) -> TruthBounds {
    assert_eq!(inputs.len(), weights.len());
    tb(up_or(&mut Plain, &ivs(inputs), weights, bias))
}

/// Weighted implication; `weights` holds the antecedent then consequent weight.
pub fn upward_implies(lhs: TruthBounds, rhs: TruthBounds, weights: &[f64], bias: f64) -> TruthBounds {
    assert_eq!(weights.len(), 2);
    tb(up_implies(&mut Plain, iv(lhs), iv(rhs), weights, bias))
}

pub fn upward_not(x: TruthBounds) -> TruthBounds {
    x.complement()
}

/// Universal quantifier over groundings: minimum of each bound.
pub fn upward_forall(groundings: &[TruthBounds]) -> TruthBounds {
    tb(up_forall(&Plain, &ivs(groundings)))
}

/// Existential quantifier over groundings: maximum of each bound.
pub fn upward_exists(groundings: &[TruthBounds]) -> TruthBounds {
    tb(up_exists(&Plain, &ivs(groundings)))
}

pub(crate) fn up_node<A: Arith>(
    ar: &mut A,
    kind: NodeKind,
    kids: &[Interval<A::S>],
    weights: &[A::S],
    bias: A::S,
) -> Option<Interval<A::S>> {
    Some(match kind {
        NodeKind::PredicateInput => return None,
        NodeKind::And => up_and(ar, kids, weights, bias),
        NodeKind::Or => up_or(ar, kids, weights, bias),
        NodeKind::Implies => up_implies(ar, kids[0], kids[1], weights, bias),
        NodeKind::Not => kids[0].complement(ar),
        NodeKind::ForAll => up_forall(ar, kids),
        NodeKind::Exists => up_exists(ar, kids),
    })
}

pub(crate) fn down_node<A: Arith>(
    ar: &mut A,
    kind: NodeKind,
    node: Interval<A::S>,
    kids: &[Interval<A::S>],
    weights: &[A::S],
    bias: A::S,
) -> Vec<Candidate<A::S>> {
    match kind {
        NodeKind::PredicateInput => Vec::new(),
        NodeKind::And => down_and(ar, node, kids, weights, bias),
        NodeKind::Or => down_or(ar, node, kids, weights, bias),
        NodeKind::Implies => down_implies(ar, node, kids[0], kids[1], weights, bias),
        NodeKind::Not => {
            let c = node.complement(ar);
            vec![(Some(c.lower), Some(c.upper))]
        }
        NodeKind::ForAll => vec![(Some(node.lower), None); kids.len()],
        NodeKind::Exists => vec![(None, Some(node.upper)); kids.len()],
    }
}

/// Tightens `children` given the bounds of their parent `node`. Bounds only
/// ever tighten; a crossed result is a contradiction, not an error.
pub fn downward_pass(
    kind: NodeKind,
    node: TruthBounds,
    children: &[TruthBounds],
    weights: &[f64],
    bias: f64,
) -> Vec<TruthBounds> {
    let candidates = down_node(&mut Plain, kind, iv(node), &ivs(children), weights, bias);
    children
        .iter()
        .zip(candidates)
        .map(|(c, (l, u))| TruthBounds {
            lower: l.map_or(c.lower, |l| l.max(c.lower)),
            upper: u.map_or(c.upper, |u| u.min(c.upper)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT2: [f64; 2] = [1.0, 1.0];

    fn x(v: f64) -> TruthBounds {
        TruthBounds::exact(v)
    }

    fn close(a: TruthBounds, b: TruthBounds) -> bool {
        (a.lower - b.lower).abs() < 1e-12 && (a.upper - b.upper).abs() < 1e-12
    }

    #[test]
    fn and_examples() {
        assert!(close(upward_and(&[x(0.7), x(0.6)], &UNIT2, 1.0), x(0.3)));
        assert!(close(upward_and(&[x(0.2), x(0.3)], &UNIT2, 1.0), x(0.0)));
        for v in [0.0, 0.35, 1.0] {
            assert!(close(upward_and(&[x(v), TruthBounds::TRUE], &UNIT2, 1.0), x(v)));
        }
    }

    #[test]
    fn or_examples() {
        assert!(close(upward_or(&[x(0.7), x(0.6)], &UNIT2, 1.0), x(1.0)));
        for v in [0.0, 0.35, 1.0] {
            assert!(close(upward_or(&[x(v), TruthBounds::FALSE], &UNIT2, 1.0), x(v)));
        }
    }

    #[test]
    fn implies_examples() {
        assert!(close(upward_implies(x(1.0), x(0.0), &UNIT2, 1.0), x(0.0)));
        assert!(close(upward_implies(x(0.7), x(0.6), &UNIT2, 1.0), x(0.9)));
        for v in [0.0, 0.35, 1.0] {
            assert!(close(upward_implies(x(0.0), x(v), &UNIT2, 1.0), x(1.0)));
        }
    }

    #[test]
    fn implication_antecedent_is_antitone() {
        let p = TruthBounds { lower: 0.2, upper: 0.9 };
        let q = TruthBounds { lower: 0.1, upper: 0.4 };
        let y = upward_implies(p, q, &UNIT2, 1.0);
        // lower from (p.upper, q.lower), upper from (p.lower, q.upper)
        assert!((y.lower - 0.2).abs() < 1e-12);
        assert!((y.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn not_examples() {
        assert_eq!(upward_not(TruthBounds::FALSE), TruthBounds::TRUE);
        let b = upward_not(TruthBounds { lower: 0.3, upper: 0.8 });
        assert!(close(b, TruthBounds { lower: 0.2, upper: 0.7 }));
        let b = TruthBounds { lower: 0.25, upper: 0.5 };
        assert_eq!(upward_not(upward_not(b)), b);
    }

    #[test]
    fn quantifier_aggregation() {
        let gs = [TruthBounds::TRUE, TruthBounds { lower: 0.4, upper: 0.9 }];
        assert_eq!(upward_forall(&gs), TruthBounds { lower: 0.4, upper: 0.9 });
        assert_eq!(upward_exists(&[TruthBounds::FALSE, TruthBounds::FALSE]), TruthBounds::FALSE);
        let one = [TruthBounds { lower: 0.3, upper: 0.6 }];
        assert_eq!(upward_forall(&one), one[0]);
        assert_eq!(upward_exists(&one), one[0]);
    }

    #[test]
    fn modus_ponens_downward() {
        let out = downward_pass(NodeKind::Implies, TruthBounds::TRUE, &[TruthBounds::TRUE, TruthBounds::UNKNOWN], &UNIT2, 1.0);
        assert_eq!(out[1].lower, 1.0);
    }

    #[test]
    fn true_conjunction_forces_operands() {
        let out = downward_pass(NodeKind::And, TruthBounds::TRUE, &[TruthBounds::UNKNOWN; 2], &UNIT2, 1.0);
        assert!(out.iter().all(|b| b.lower == 1.0));
    }

    #[test]
    fn vacuous_node_changes_nothing() {
        let kids = [TruthBounds { lower: 0.2, upper: 0.7 }, TruthBounds::UNKNOWN];
        for kind in [NodeKind::And, NodeKind::Or, NodeKind::Implies] {
            assert_eq!(downward_pass(kind, TruthBounds::UNKNOWN, &kids, &UNIT2, 1.0), kids.to_vec());
        }
    }

    #[test]
    fn or_and_implies_downward_rules() {
        // or y=(0.8, 0.9), q=(0.1, 0.3): p >= 0.8 - 0.3, p <= 0.9 - 0.1
        let out = downward_pass(
            NodeKind::Or,
            TruthBounds { lower: 0.8, upper: 0.9 },
            &[TruthBounds::UNKNOWN, TruthBounds { lower: 0.1, upper: 0.3 }],
            &UNIT2,
            1.0,
        );
        assert!(close(out[0], TruthBounds { lower: 0.5, upper: 0.8 }));
        // implies y=(0.6, 0.8), p=(0.9, 1), q unknown: q >= 0.6 + 0.9 - 1, q <= 0.8 + 1 - 1
        let out = downward_pass(
            NodeKind::Implies,
            TruthBounds { lower: 0.6, upper: 0.8 },
            &[TruthBounds { lower: 0.9, upper: 1.0 }, TruthBounds::UNKNOWN],
            &UNIT2,
            1.0,
        );
        assert!(close(out[1], TruthBounds { lower: 0.5, upper: 0.8 }));
        // and p >= 1 - 0.8 + q.lower = 0.2 (already 0.9), p <= 1 - 0.6 + 1 (vacuous)
        assert!(close(out[0], TruthBounds { lower: 0.9, upper: 1.0 }));
    }

    #[test]
    fn weighted_downward_divides_by_weight() {
        // y = clamp(1.5 - 2(1-p) - 1(1-q)); y >= 0.5 with q <= 1 gives p >= 1 - (1.5 - 0.5)/2
        let out = downward_pass(
            NodeKind::And,
            TruthBounds { lower: 0.5, upper: 1.0 },
            &[TruthBounds::UNKNOWN, TruthBounds::UNKNOWN],
            &[2.0, 1.0],
            1.5,
        );
        assert!((out[0].lower - 0.5).abs() < 1e-12);
        assert_eq!(out[1].lower, 0.0);
        // zero weight: the operand is unconstrained
        let out = downward_pass(NodeKind::And, TruthBounds::TRUE, &[TruthBounds::UNKNOWN; 2], &[0.0, 1.0], 1.0);
        assert_eq!(out[0], TruthBounds::UNKNOWN);
    }

    #[test]
    fn quantifier_downward() {
        let kids = [TruthBounds::UNKNOWN, TruthBounds { lower: 0.9, upper: 1.0 }];
        let y = TruthBounds { lower: 0.5, upper: 0.7 };
        let f = downward_pass(NodeKind::ForAll, y, &kids, &[], 0.0);
        assert_eq!(f, vec![TruthBounds { lower: 0.5, upper: 1.0 }, TruthBounds { lower: 0.9, upper: 1.0 }]);
        let e = downward_pass(NodeKind::Exists, y, &kids, &[], 0.0);
        assert_eq!(e, vec![TruthBounds { lower: 0.0, upper: 0.7 }, TruthBounds { lower: 0.9, upper: 0.7 }]);
    }
}
