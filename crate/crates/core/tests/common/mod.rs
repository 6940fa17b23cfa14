#![allow(dead_code)]

use std::collections::HashMap;
use std::fmt::Write;

use lnn_core::learn::loss_at;
use lnn_core::{Formula, InferenceConfig, KnowledgeBase, NeuronGraph, Term, EQUALITY};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

/// A classical first-order interpretation over `{0, .., domain-1}`.
#[derive(Debug, Clone)]
pub struct Interp {
    pub domain: usize,
    pub constants: HashMap<String, usize>,
    /// Truth table per predicate, indexed by the argument tuple in base `domain`.
    pub predicates: HashMap<String, Vec<bool>>,
    /// Value table per function, same indexing.
    pub functions: HashMap<String, Vec<usize>>,
}

fn index(domain: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * domain + a)
}

impl Interp {
    pub fn term(&self, t: &Term, env: &[(String, usize)]) -> usize {
        match t {
            Term::Constant(c) => self.constants[c],
            Term::Variable(v) => env.iter().rev().find(|(n, _)| n == v).map(|(_, x)| *x).expect("unbound variable"),
            Term::Function(f, args) => {
                let xs: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                self.functions[f][index(self.domain, &xs)]
            }
        }
    }

    /// Classical truth. `R_f` relations not in the predicate table are read
    /// as the graph of `f`.
    pub fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
        match f {
            Formula::Atom { predicate, args } => {
                let xs: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                if predicate == EQUALITY {
                    xs[0] == xs[1]
                } else if let Some(table) = self.predicates.get(predicate) {
                    table[index(self.domain, &xs)]
                } else {
                    let g = predicate.strip_prefix("R_").expect("unknown predicate");
                    let (ins, out) = xs.split_at(xs.len() - 1);
                    self.functions[g][index(self.domain, ins)] == out[0]
                }
            }
            Formula::Not(a) => !self.eval(a, env),
            Formula::And(cs, _) => cs.iter().all(|c| self.eval(c, env)),
            Formula::Or(cs, _) => cs.iter().any(|c| self.eval(c, env)),
            Formula::Implies(a, b, _) => !self.eval(a, env) || self.eval(b, env),
            Formula::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let universal = matches!(f, Formula::ForAll(..));
                for x in 0..self.domain {
                    env.push((v.clone(), x));
                    let t = self.eval(body, env);
                    env.pop();
                    if t != universal {
                        return !universal;
                    }
                }
                universal
            }
        }
    }
}

/// Number of classical interpretations of `kb`'s signature over `domain`
/// elements, saturating.
pub fn interpretation_count(kb: &KnowledgeBase, domain: usize) -> u128 {
    let mut n: u128 = 1;
    for &a in kb.predicates.values() {
        n = n.saturating_mul(2u128.saturating_pow(domain.pow(a as u32) as u32));
    }
    for &a in kb.functions.values() {
        n = n.saturating_mul((domain as u128).saturating_pow(domain.pow(a as u32) as u32));
    }
    n.saturating_mul((domain as u128).saturating_pow(kb.constants.len() as u32))
}

/// Calls `visit` on every interpretation of the signature.
pub fn for_each_interpretation(kb: &KnowledgeBase, domain: usize, mut visit: impl FnMut(&Interp)) {
    // one mixed-radix digit per table cell / constant
    let mut radices = Vec::new();
    for &a in kb.predicates.values() {
        radices.extend(std::iter::repeat_n(2, domain.pow(a as u32)));
    }
    for &a in kb.functions.values() {
        radices.extend(std::iter::repeat_n(domain, domain.pow(a as u32)));
    }
    radices.extend(std::iter::repeat_n(domain, kb.constants.len()));
    let mut digits = vec![0usize; radices.len()];
    loop {
        let mut it = digits.iter().copied();
        let mut interp = Interp {
            domain,
            constants: HashMap::new(),
            predicates: HashMap::new(),
            functions: HashMap::new(),
        };
        for (p, &a) in &kb.predicates {
            interp.predicates.insert(p.clone(), it.by_ref().take(domain.pow(a as u32)).map(|d| d == 1).collect());
        }
        for (f, &a) in &kb.functions {
            interp.functions.insert(f.clone(), it.by_ref().take(domain.pow(a as u32)).collect());
        }
        for c in &kb.constants {
            interp.constants.insert(c.clone(), it.next().unwrap());
        }
        visit(&interp);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

struct FormulaGen<'a> {
    rng: &'a mut StdRng,
    predicates: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl FormulaGen<'_> {
    fn term(&mut self, scope: &[String], depth: usize) -> Term {
        let roll = self.rng.gen_range(0..10);
        if depth > 0 && !self.functions.is_empty() && roll < 4 {
            let (f, n) = self.functions.choose(self.rng).unwrap().clone();
            return Term::app(f, (0..n).map(|_| self.term(scope, depth - 1)).collect());
        }
        if !scope.is_empty() && roll < 7 {
            return Term::var(scope.choose(self.rng).unwrap().clone());
        }
        Term::constant(self.constants.choose(self.rng).unwrap().clone())
    }

    fn atom(&mut self, scope: &[String]) -> Formula {
        if self.rng.gen_bool(0.2) {
            return Formula::eq(self.term(scope, 2), self.term(scope, 2));
        }
        let (p, n) = self.predicates.choose(self.rng).unwrap().clone();
        Formula::atom(p, (0..n).map(|_| self.term(scope, 2)).collect())
    }

    fn formula(&mut self, scope: &mut Vec<String>, depth: usize) -> Formula {
        if depth == 0 {
            return self.atom(scope);
        }
        match self.rng.gen_range(0..9) {
            0 | 1 => self.atom(scope),
            2 => Formula::not(self.formula(scope, depth - 1)),
            3 => Formula::and(vec![self.formula(scope, depth - 1), self.formula(scope, depth - 1)]),
            4 => Formula::or(vec![self.formula(scope, depth - 1), self.formula(scope, depth - 1)]),
            5 => Formula::implies(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            6 => Formula::iff(self.formula(scope, depth - 1), self.formula(scope, depth - 1)),
            k => {
                let v = VARS.choose(self.rng).unwrap().to_string();
                scope.push(v.clone());
                let body = self.formula(scope, depth - 1);
                scope.pop();
                if k == 7 {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }
}

/// A random closed formula mentioning at least one function symbol, with the
/// knowledge base declaring its signature (equality on). At most two
/// predicates and two functions.
pub fn random_function_formula(rng: &mut StdRng) -> (KnowledgeBase, Formula) {
    let predicate_pool = [("P", 1), ("Q", 2), ("S", 1)];
    let function_pool = [("f", 1), ("g", 1), ("h", 2)];
    loop {
        let np = rng.gen_range(1..=2);
        let nf = rng.gen_range(1..=2);
        let predicates: Vec<(String, usize)> =
            predicate_pool.choose_multiple(rng, np).map(|(p, a)| (p.to_string(), *a)).collect();
        let functions: Vec<(String, usize)> =
            function_pool.choose_multiple(rng, nf).map(|(f, a)| (f.to_string(), *a)).collect();
        let constants: Vec<String> = ["a", "b"][..rng.gen_range(1..=2)].iter().map(|c| c.to_string()).collect();
        let depth = rng.gen_range(1..=3);
        let mut g = FormulaGen { rng, predicates, functions, constants };
        let f = g.formula(&mut Vec::new(), depth);
        if f.is_function_free() {
            continue;
        }
        let mut kb = KnowledgeBase::new();
        kb.theories.insert("equality".into());
        kb.predicates = g.predicates.into_iter().collect();
        kb.functions = g.functions.into_iter().collect();
        kb.constants = g.constants.into_iter().collect();
        return (kb, f);
    }
}

fn random_prop_formula(rng: &mut StdRng, props: &[String], depth: usize, weighted: bool) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return props.choose(rng).unwrap().clone();
    }
    let params = |rng: &mut StdRng, n: usize| {
        if !weighted {
            return String::new();
        }
        let ws: Vec<String> = (0..n).map(|_| format!("{:.3}", rng.gen_range(0.5..1.5))).collect();
        format!(" :weights ({}) :bias {:.3}", ws.join(" "), rng.gen_range(0.6..1.4))
    };
    match rng.gen_range(0..5) {
        0 => format!("(not {})", random_prop_formula(rng, props, depth - 1, weighted)),
        1 | 2 => {
            let head = if rng.gen_bool(0.5) { "and" } else { "or" };
            let n = rng.gen_range(2..=3);
            let p = params(rng, n);
            let cs: Vec<String> = (0..n).map(|_| random_prop_formula(rng, props, depth - 1, weighted)).collect();
            format!("({}{} {})", head, p, cs.join(" "))
        }
        _ => {
            let p = params(rng, 2);
            let a = random_prop_formula(rng, props, depth - 1, weighted);
            let b = random_prop_formula(rng, props, depth - 1, weighted);
            format!("(implies{} {} {})", p, a, b)
        }
    }
}

fn random_bounds(rng: &mut StdRng) -> String {
    match rng.gen_range(0..4) {
        0 => "true".into(),
        1 => "false".into(),
        _ => {
            let a: f64 = rng.gen_range(0.0..1.0);
            let b: f64 = rng.gen_range(0.0..1.0);
            format!("{:.3} {:.3}", a.min(b), a.max(b))
        }
    }
}

/// A random propositional knowledge base with at most `max_props`
/// propositions and `max_axioms` axioms.
pub fn random_propositional_kb(rng: &mut StdRng, max_props: usize, max_axioms: usize, weighted: bool) -> String {
    let n = rng.gen_range(1..=max_props);
    let props: Vec<String> = (0..n).map(|i| format!("p{}", i)).collect();
    let mut s = String::new();
    for p in &props {
        writeln!(s, "predicate {}/0", p).unwrap();
    }
    for _ in 0..rng.gen_range(0..=max_axioms) {
        let depth = rng.gen_range(1..=3);
        writeln!(s, "axiom {}", random_prop_formula(rng, &props, depth, weighted)).unwrap();
    }
    for p in &props {
        if rng.gen_bool(0.5) {
            writeln!(s, "fact {} {}", p, random_bounds(rng)).unwrap();
        }
    }
    if rng.gen_bool(0.5) {
        let depth = rng.gen_range(1..=2);
        writeln!(s, "query q {}", random_prop_formula(rng, &props, depth, weighted)).unwrap();
    }
    s
}

/// Inference settings tight enough that finite differences do not see the
/// stopping rule.
pub fn precise_inference() -> InferenceConfig {
    InferenceConfig { tolerance: 1e-13, max_passes: 2000, ..Default::default() }
}

/// True when the loss is locally linear along every parameter axis: the
/// one-sided differences at two step sizes agree.
pub fn is_smooth_point(graph: &NeuronGraph, config: &InferenceConfig, eps: f64) -> bool {
    let base = graph.param_values();
    let l0 = loss_at(graph, config).total_contradiction;
    let mut probe = graph.clone();
    (0..base.len()).all(|i| {
        let mut at = |d: f64| {
            let mut p = base.clone();
            p[i] += d;
            probe.set_param_values(&p);
            loss_at(&probe, config).total_contradiction
        };
        let forward = (at(eps) - l0) / eps;
        let backward = (l0 - at(-eps)) / eps;
        let far_forward = (at(10.0 * eps) - l0) / (10.0 * eps);
        (forward - backward).abs() < 1e-6 && (forward - far_forward).abs() < 1e-6
    })
}

/// A small weighted propositional knowledge base whose facts are point values,
/// so that axioms usually conflict with them.
pub fn random_conflicting_kb(rng: &mut StdRng) -> String {
    let n = rng.gen_range(2..=3);
    let props: Vec<String> = (0..n).map(|i| format!("p{}", i)).collect();
    let mut s = String::new();
    for p in &props {
        writeln!(s, "predicate {}/0", p).unwrap();
    }
    for _ in 0..rng.gen_range(1..=2) {
        writeln!(s, "axiom {}", random_prop_formula(rng, &props, 1, true)).unwrap();
    }
    for p in &props {
        let v: f64 = rng.gen_range(0.0..1.0);
        writeln!(s, "fact {} {:.3} {:.3}", p, v, v).unwrap();
    }
    s
}
