mod common;

use common::random_propositional_kb;
use lnn_core::infer::infer_observed;
use lnn_core::{build_graph, infer, parse_kb, GroundAtom, InferenceConfig, PrimaryState, TruthBounds};
use rand::rngs::StdRng;
use rand::SeedableRng;

const LISTING: &str = "theory equality
predicate dog/1
fact (dog Aggie) true
fact (= Aggie Fruton) true
query query (not (dog Fruton)) as-axiom
";

fn run(src: &str) -> (lnn_core::NeuronGraph, lnn_core::InferenceReport) {
    let mut g = build_graph(&parse_kb(src).unwrap()).unwrap();
    let r = infer(&mut g, &InferenceConfig::default()).unwrap();
    (g, r)
}

#[test]
fn listing_reports_contradiction() {
    let (g, r) = run(LISTING);
    assert_eq!(r.root("query").unwrap().state, PrimaryState::Contradiction);
    assert!(r.passes_run <= 100);
    let fruton = g.atom_bounds(&GroundAtom::over("dog", &["Fruton"]));
    assert!(fruton.is_contradiction());
}

#[test]
fn without_equality_theory_there_is_no_contradiction() {
    let src = "predicate dog/1\npredicate same/2\nfact (dog Aggie) true\nfact (same Aggie Fruton) true\nquery query (not (dog Fruton)) as-axiom\n";
    let (_, r) = run(src);
    assert_ne!(r.root("query").unwrap().state, PrimaryState::Contradiction);
    assert!(r.contradictions.is_empty());
}

#[test]
fn equality_chain_is_symmetric_and_transitive() {
    let src = "theory equality\npredicate P/1\nconstant a\nconstant b\nconstant c\nfact (= a b) true\nfact (= b c) true\nquery ac (= a c)\nquery ca (= c a)\n";
    let (_, r) = run(src);
    assert_eq!(r.root("ac").unwrap().state, PrimaryState::True);
    assert_eq!(r.root("ca").unwrap().state, PrimaryState::True);
    assert!(r.converged && r.passes_run <= 20, "{} passes", r.passes_run);
    assert!(r.contradictions.is_empty());
}

#[test]
fn open_query_without_support_is_unknown() {
    let (_, r) = run("predicate p/0\npredicate q/0\nfact p true\nquery q q");
    assert_eq!(r.root("q").unwrap().state, PrimaryState::Unknown);
}

#[test]
fn query_read_back_of_fact() {
    let (_, r) = run("predicate dog/1\nfact (dog Aggie) true\nquery query (dog Aggie)");
    let q = r.root("query").unwrap();
    assert_eq!((q.state, q.bounds), (PrimaryState::True, TruthBounds::TRUE));
}

#[test]
fn random_propositional_kbs_converge_monotonically() {
    let mut rng = StdRng::seed_from_u64(2024);
    let config = InferenceConfig::default();
    for _ in 0..200 {
        let src = random_propositional_kb(&mut rng, 8, 12, false);
        let mut g = build_graph(&parse_kb(&src).unwrap()).unwrap();
        let mut previous: Vec<TruthBounds> = g.nodes.iter().map(|n| n.initial).collect();
        let r = infer_observed(&mut g, &config, |pass, bounds| {
            for (i, (old, new)) in previous.iter().zip(bounds).enumerate() {
                assert!(new.lower >= old.lower && new.upper <= old.upper, "pass {} node {} in\n{}", pass, i, src);
            }
            previous = bounds.to_vec();
        })
        .unwrap();
        assert!(r.converged && r.passes_run < config.max_passes, "did not converge:\n{}", src);
    }
}

#[test]
fn weighted_propositional_kbs_converge() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..100 {
        let src = random_propositional_kb(&mut rng, 6, 8, true);
        let (_, r) = run(&src);
        assert!(r.converged, "did not converge:\n{}", src);
    }
}

#[test]
fn function_free_rewrite_changes_nothing_in_inference() {
    let src = "theory equality\npredicate dog/1\nconstant Aggie\nconstant Fruton\nfact (dog Aggie) true\nquery d (dog Fruton)";
    let (_, r) = run(src);
    assert_eq!(r.root("d").unwrap().state, PrimaryState::Unknown);
}

#[test]
fn reasoning_through_a_function() {
    let src = "theory equality\npredicate P/1\nfunction f/1\nconstant a\nconstant b\nfact (= (f a) b) true\nfact (P b) true\naxiom never (forall x (not (P (f x))))\n";
    let (_, r) = run(src);
    assert_eq!(r.root("never").unwrap().state, PrimaryState::Contradiction);
    let (_, r) = run(&src.replace("fact (P b) true", "fact (P a) true"));
    assert!(r.contradictions.is_empty());
}

#[test]
fn repeated_inference_is_identical() {
    let (g1, r1) = run(LISTING);
    let (g2, r2) = run(LISTING);
    assert_eq!(r1, r2);
    assert_eq!(g1.dump(), g2.dump());
}
