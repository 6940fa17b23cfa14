use super::activation::{down_node, up_node};
use super::arith::{Arith, Interval, Plain};
use crate::bounds::{check_alpha, classify_state, ConfigError, PrimaryState, TruthBounds, DEFAULT_ALPHA};
use crate::graph::{NeuronGraph, NodeId, RootKind};
use crate::kb::World;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    pub alpha: f64,
    pub max_passes: usize,
    pub tolerance: f64,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig { alpha: DEFAULT_ALPHA, max_passes: 100, tolerance: 1e-6 }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        check_alpha(self.alpha)?;
        if self.max_passes == 0 {
            return Err(ConfigError::Invalid("max_passes must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(ConfigError::Invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootState {
    pub name: String,
    pub node: NodeId,
    pub kind: RootKind,
    pub world: World,
    pub bounds: TruthBounds,
    pub state: PrimaryState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceReport {
    pub passes_run: usize,
    pub converged: bool,
    /// Nodes whose lower bound exceeds the upper, in id order.
    pub contradictions: Vec<NodeId>,
    pub roots: Vec<RootState>,
}

impl InferenceReport {
    pub fn root(&self, name: &str) -> Option<&RootState> {
        self.roots.iter().find(|r| r.name == name)
    }

    pub fn queries(&self) -> impl Iterator<Item = &RootState> {
        self.roots.iter().filter(|r| r.kind == RootKind::Query)
    }
}

/// Per-node connective parameters in the scalar type of a run.
pub(crate) struct NodeParams<S> {
    pub weights: Vec<Vec<S>>,
    pub bias: Vec<S>,
}

impl NodeParams<f64> {
    pub(crate) fn of(graph: &NeuronGraph) -> NodeParams<f64> {
        NodeParams {
            weights: graph.nodes.iter().map(|n| n.weights.clone()).collect(),
            bias: graph.nodes.iter().map(|n| n.bias).collect(),
        }
    }
}

pub(crate) struct RunResult<S> {
    pub bounds: Vec<Interval<S>>,
    pub passes_run: usize,
    pub converged: bool,
}

fn tighten<A: Arith>(ar: &A, cur: &mut Interval<A::S>, lower: Option<A::S>, upper: Option<A::S>) -> f64 {
    let mut moved: f64 = 0.0;
    if let Some(l) = lower {
        let (old, new) = (ar.value(cur.lower), ar.value(l));
        if new > old {
            cur.lower = l;
            moved = moved.max(new - old);
        }
    }
    if let Some(u) = upper {
        let (old, new) = (ar.value(cur.upper), ar.value(u));
        if new < old {
            cur.upper = u;
            moved = moved.max(old - new);
        }
    }
    moved
}

pub(crate) type PassObserver<'a, S> = dyn FnMut(&[Interval<S>]) + 'a;

/// Alternating upward and downward sweeps from the graph's initial bounds.
/// Children have smaller ids than parents, so id order is leaves-to-roots.
pub(crate) fn run<A: Arith>(
    ar: &mut A,
    graph: &NeuronGraph,
    params: &NodeParams<A::S>,
    max_passes: usize,
    tolerance: f64,
    observe: &mut PassObserver<'_, A::S>,
) -> RunResult<A::S> {
    let mut bounds: Vec<Interval<A::S>> = graph
        .nodes
        .iter()
        .map(|n| {
            let l = ar.constant(n.initial.lower);
            let u = ar.constant(n.initial.upper);
            Interval::new(l, u)
        })
        .collect();
    let mut kids = Vec::new();
    let mut passes_run = 0;
    let mut converged = false;
    while passes_run < max_passes {
        passes_run += 1;
        let mut moved: f64 = 0.0;
        for node in &graph.nodes {
            kids.clear();
            kids.extend(node.children.iter().map(|&c| bounds[c]));
            if let Some(up) = up_node(ar, node.kind, &kids, &params.weights[node.id], params.bias[node.id]) {
                moved = moved.max(tighten(ar, &mut bounds[node.id], Some(up.lower), Some(up.upper)));
            }
        }
        for node in graph.nodes.iter().rev() {
            if node.children.is_empty() {
                continue;
            }
            kids.clear();
            kids.extend(node.children.iter().map(|&c| bounds[c]));
            let candidates =
                down_node(ar, node.kind, bounds[node.id], &kids, &params.weights[node.id], params.bias[node.id]);
            for (&c, (l, u)) in node.children.iter().zip(candidates) {
                moved = moved.max(tighten(ar, &mut bounds[c], l, u));
            }
        }
        observe(&bounds);
        if moved <= tolerance {
            converged = true;
            break;
        }
    }
    RunResult { bounds, passes_run, converged }
}

/// Runs inference from the graph's initial bounds and stores the result in
/// the nodes' current bounds.
pub fn infer(graph: &mut NeuronGraph, config: &InferenceConfig) -> Result<InferenceReport, ConfigError> {
    infer_observed(graph, config, |_, _| {})
}

/// Like [`infer`], calling `observe(pass, bounds)` after every pass.
pub fn infer_observed(
    graph: &mut NeuronGraph,
    config: &InferenceConfig,
    mut observe: impl FnMut(usize, &[TruthBounds]),
) -> Result<InferenceReport, ConfigError> {
    config.validate()?;
    let params = NodeParams::of(graph);
    let mut pass = 0;
    let mut snapshot = Vec::with_capacity(graph.len());
    let result = run(&mut Plain, graph, &params, config.max_passes, config.tolerance, &mut |bounds| {
        pass += 1;
        snapshot.clear();
        snapshot.extend(bounds.iter().map(|b| TruthBounds { lower: b.lower, upper: b.upper }));
        observe(pass, &snapshot);
    });
    for (node, b) in graph.nodes.iter_mut().zip(&result.bounds) {
        node.bounds = TruthBounds { lower: b.lower, upper: b.upper };
    }
    report(graph, config.alpha, result.passes_run, result.converged)
}

/// Reads contradictions and root states off the graph's current bounds.
pub fn report(graph: &NeuronGraph, alpha: f64, passes_run: usize, converged: bool) -> Result<InferenceReport, ConfigError> {
    let contradictions = graph.nodes.iter().filter(|n| n.bounds.is_contradiction()).map(|n| n.id).collect();
    let roots = graph
        .roots
        .iter()
        .map(|r| {
            let bounds = graph.nodes[r.node].bounds;
            Ok(RootState {
                name: r.name.clone(),
                node: r.node,
                kind: r.kind,
                world: r.world,
                bounds,
                state: classify_state(bounds, alpha)?,
            })
        })
        .collect::<Result<_, ConfigError>>()?;
    Ok(InferenceReport { passes_run, converged, contradictions, roots })
}
