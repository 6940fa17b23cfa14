//! Compilation of a function-free knowledge base into a neuron graph.
//!
//! Every connective becomes one neuron whose children are the neurons of its
//! operands, so each formula's subgraph is its syntax tree. Quantifiers are
//! expanded over the constant domain; a quantifier neuron has one child per
//! grounding of its body. Grounded atoms are shared across all formulas.
//! Node ids are assigned children-first, so increasing id order is a
//! topological order from leaves to roots.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};

use indexmap::IndexMap;
use thiserror::Error;

use crate::bounds::TruthBounds;
use crate::formula::{format_sig6, Formula, Params, Term};
use crate::kb::{GroundAtom, KnowledgeBase, World};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    PredicateInput,
    And,
    Or,
    Implies,
    Not,
    ForAll,
    Exists,
}

impl NodeKind {
    pub fn is_weighted(self) -> bool {
        matches!(self, NodeKind::And | NodeKind::Or | NodeKind::Implies)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuronNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    /// Empty for pass-through and input nodes.
    pub weights: Vec<f64>,
    pub bias: f64,
    pub bounds: TruthBounds,
    /// Bounds the node is reset to before each inference run.
    pub initial: TruthBounds,
    pub world: World,
    /// The grounded atom of a `PredicateInput` node.
    pub atom: Option<GroundAtom>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    Axiom,
    Query,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub name: String,
    pub node: NodeId,
    pub kind: RootKind,
    pub world: World,
}

/// Known truth bounds of one predicate, keyed by constant tuple. Missing rows
/// are unknown.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundingTable {
    pub predicate: String,
    pub rows: BTreeMap<Vec<String>, TruthBounds>,
}

impl GroundingTable {
    pub fn get(&self, args: &[String]) -> TruthBounds {
        self.rows.get(args).copied().unwrap_or(TruthBounds::UNKNOWN)
    }
}

/// A learnable parameter position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSlot {
    Weight(NodeId, usize),
    Bias(NodeId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("`{0}` still contains function symbols; rewrite the knowledge base first")]
    NotFunctionFree(String),
    #[error("`{0}` quantifies over an empty domain")]
    EmptyDomain(String),
    #[error("`{0}` has free variable `{1}`")]
    FreeVariable(String, String),
    #[error("fact `{0}` is not over constants")]
    NonConstantFact(String),
}

#[derive(Debug, Clone, Default)]
pub struct NeuronGraph {
    pub nodes: Vec<NeuronNode>,
    pub roots: Vec<Root>,
    pub domain: Vec<String>,
    pub tables: IndexMap<String, GroundingTable>,
    atoms: HashMap<GroundAtom, NodeId>,
}

impl NeuronGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &NeuronNode {
        &self.nodes[id]
    }

    pub fn root(&self, name: &str) -> Option<&Root> {
        self.roots.iter().find(|r| r.name == name)
    }

    pub fn atom_node(&self, atom: &GroundAtom) -> Option<NodeId> {
        self.atoms.get(atom).copied()
    }

    /// Current bounds of a grounded atom; unknown if the atom has no neuron.
    pub fn atom_bounds(&self, atom: &GroundAtom) -> TruthBounds {
        self.atom_node(atom).map_or(TruthBounds::UNKNOWN, |id| self.nodes[id].bounds)
    }

    pub fn reset_bounds(&mut self) {
        for n in &mut self.nodes {
            n.bounds = n.initial;
        }
    }

    /// All learnable parameters, node by node: weights then bias.
    pub fn parameters(&self) -> Vec<ParamSlot> {
        let mut out = Vec::new();
        for n in self.nodes.iter().filter(|n| n.kind.is_weighted()) {
            out.extend((0..n.weights.len()).map(|i| ParamSlot::Weight(n.id, i)));
            out.push(ParamSlot::Bias(n.id));
        }
        out
    }

    pub fn param_values(&self) -> Vec<f64> {
        self.parameters().into_iter().map(|p| self.param(p)).collect()
    }

    pub fn param(&self, slot: ParamSlot) -> f64 {
        match slot {
            ParamSlot::Weight(n, i) => self.nodes[n].weights[i],
            ParamSlot::Bias(n) => self.nodes[n].bias,
        }
    }

    /// Writes values in the order of [`NeuronGraph::parameters`].
    pub fn set_param_values(&mut self, values: &[f64]) {
        let slots = self.parameters();
        assert_eq!(slots.len(), values.len(), "parameter count mismatch");
        for (slot, v) in slots.into_iter().zip(values) {
            match slot {
                ParamSlot::Weight(n, i) => self.nodes[n].weights[i] = *v,
                ParamSlot::Bias(n) => self.nodes[n].bias = *v,
            }
        }
    }

    /// One line per node: `id kind children weights bias lower upper`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let list = |xs: Vec<String>| if xs.is_empty() { "-".to_string() } else { xs.join(",") };
        for n in &self.nodes {
            let children = list(n.children.iter().map(|c| c.to_string()).collect());
            let weights = list(n.weights.iter().map(|w| format_sig6(*w)).collect());
            let bias = if n.kind.is_weighted() { format_sig6(n.bias) } else { "-".to_string() };
            writeln!(out, "{} {} {} {} {} {:.4} {:.4}", n.id, n.kind, children, weights, bias, n.bounds.lower, n.bounds.upper)
                .unwrap();
        }
        out
    }

    fn push(&mut self, kind: NodeKind, children: Vec<NodeId>, params: Option<Params>) -> NodeId {
        let id = self.nodes.len();
        let (weights, bias) = match params {
            Some(p) => (p.weights, p.bias),
            None if kind.is_weighted() => (vec![1.0; children.len()], 1.0),
            None => (Vec::new(), 0.0),
        };
        self.nodes.push(NeuronNode {
            id,
            kind,
            children,
            weights,
            bias,
            bounds: TruthBounds::UNKNOWN,
            initial: TruthBounds::UNKNOWN,
            world: World::Open,
            atom: None,
        });
        id
    }

    fn atom(&mut self, atom: GroundAtom) -> NodeId {
        if let Some(&id) = self.atoms.get(&atom) {
            return id;
        }
        let row: Vec<String> = atom.args.iter().map(|t| t.to_string()).collect();
        let initial = self.tables.get(&atom.predicate).map_or(TruthBounds::UNKNOWN, |t| t.get(&row));
        let id = self.push(NodeKind::PredicateInput, Vec::new(), None);
        let node = &mut self.nodes[id];
        node.initial = initial;
        node.bounds = initial;
        node.atom = Some(atom.clone());
        self.atoms.insert(atom, id);
        id
    }

    fn pin(&mut self, id: NodeId) {
        let node = &mut self.nodes[id];
        node.world = World::Axiom;
        node.initial = node.initial.tighten(TruthBounds::TRUE);
        node.bounds = node.initial;
    }
}

struct Compiler<'a> {
    graph: NeuronGraph,
    owner: &'a str,
}

impl Compiler<'_> {
    fn formula(&mut self, f: &Formula, env: &mut Vec<(String, String)>) -> Result<NodeId, CompileError> {
        Ok(match f {
            Formula::Atom { predicate, args } => {
                let ground = args
                    .iter()
                    .map(|t| match t {
                        Term::Constant(c) => Ok(Term::constant(c.clone())),
                        Term::Variable(v) => env
                            .iter()
                            .rev()
                            .find(|(name, _)| name == v)
                            .map(|(_, c)| Term::constant(c.clone()))
                            .ok_or_else(|| CompileError::FreeVariable(self.owner.to_string(), v.clone())),
                        Term::Function(..) => Err(CompileError::NotFunctionFree(self.owner.to_string())),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                self.graph.atom(GroundAtom::new(predicate.clone(), ground))
            }
            Formula::Not(inner) => {
                let c = self.formula(inner, env)?;
                self.graph.push(NodeKind::Not, vec![c], None)
            }
            Formula::And(cs, p) | Formula::Or(cs, p) => {
                let children = cs.iter().map(|c| self.formula(c, env)).collect::<Result<Vec<_>, _>>()?;
                let kind = if matches!(f, Formula::And(..)) { NodeKind::And } else { NodeKind::Or };
                self.graph.push(kind, children, p.clone())
            }
            Formula::Implies(a, b, p) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                self.graph.push(NodeKind::Implies, vec![a, b], p.clone())
            }
            Formula::Iff(a, b) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                let forward = self.graph.push(NodeKind::Implies, vec![a, b], None);
                let backward = self.graph.push(NodeKind::Implies, vec![b, a], None);
                self.graph.push(NodeKind::And, vec![forward, backward], None)
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                if self.graph.domain.is_empty() {
                    return Err(CompileError::EmptyDomain(self.owner.to_string()));
                }
                let mut children = Vec::with_capacity(self.graph.domain.len());
                for c in self.graph.domain.clone() {
                    env.push((v.clone(), c));
                    let child = self.formula(body, env);
                    env.pop();
                    children.push(child?);
                }
                let kind = if matches!(f, Formula::ForAll(..)) { NodeKind::ForAll } else { NodeKind::Exists };
                self.graph.push(kind, children, None)
            }
        })
    }
}

/// Compiles axioms (pinned true), then queries, then any fact atoms no
/// formula mentions.
pub fn compile(kb: &KnowledgeBase) -> Result<NeuronGraph, CompileError> {
    let mut graph = NeuronGraph { domain: kb.constants.iter().cloned().collect(), ..NeuronGraph::default() };
    for (atom, bounds) in &kb.facts {
        let mut row = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            match t {
                Term::Constant(c) => row.push(c.clone()),
                _ => return Err(CompileError::NonConstantFact(atom.as_formula().to_string())),
            }
        }
        graph
            .tables
            .entry(atom.predicate.clone())
            .or_insert_with(|| GroundingTable { predicate: atom.predicate.clone(), rows: BTreeMap::new() })
            .rows
            .insert(row, *bounds);
    }

    let roots = kb
        .axioms
        .iter()
        .map(|a| (a.name.as_str(), &a.formula, RootKind::Axiom, World::Axiom))
        .chain(kb.queries.iter().map(|q| (q.name.as_str(), &q.formula, RootKind::Query, q.world)));
    let mut compiler = Compiler { graph, owner: "" };
    for (name, formula, kind, world) in roots {
        if !formula.is_function_free() {
            return Err(CompileError::NotFunctionFree(name.to_string()));
        }
        compiler.owner = name;
        let node = compiler.formula(formula, &mut Vec::new())?;
        if world == World::Axiom {
            compiler.graph.pin(node);
        }
        compiler.graph.roots.push(Root { name: name.to_string(), node, kind, world });
    }
    let mut graph = compiler.graph;
    for atom in kb.facts.keys() {
        graph.atom(atom.clone());
    }
    Ok(graph)
}
