//! Learning connective parameters by descending the total contradiction.
//!
//! Inference is replayed on a reverse-mode tape, so the gradient follows
//! exactly the branch choices (clamp regions, which bound won a tightening,
//! which grounding won a min/max) taken by the plain run. A clamp is treated
//! as the identity on the closed interval `[0, 1]` and as constant outside it.

use log::warn;
use thiserror::Error;

use crate::bounds::{ConfigError, TruthBounds};
use crate::graph::{NeuronGraph, NodeId};
use crate::infer::{run, Arith, InferenceConfig, NodeParams, Plain};

/// Consecutive loss increases after which training warns about divergence.
pub const DIVERGENCE_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_floor: f64,
    pub fd_epsilon: f64,
    pub inference: InferenceConfig,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            epochs: 20,
            learning_rate: 0.1,
            weight_floor: 0.0,
            fd_epsilon: 1e-5,
            inference: InferenceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl LearnConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.inference.validate()?;
        if self.epochs == 0 {
            return Err(ConfigError::Invalid("epochs must be at least 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(ConfigError::Invalid(format!("learning rate must be nonnegative, got {}", self.learning_rate)));
        }
        if self.weight_floor.is_nan() || self.weight_floor < 0.0 {
            return Err(ConfigError::Invalid(format!("weight floor must be nonnegative, got {}", self.weight_floor)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossReport {
    pub total_contradiction: f64,
    /// `(node, lower - upper)` for every crossed node.
    pub contributions: Vec<(NodeId, f64)>,
}

/// `sum max(0, lower - upper)` over the graph's current bounds.
pub fn contradiction_loss(graph: &NeuronGraph) -> LossReport {
    loss_of(graph.nodes.iter().map(|n| (n.id, n.bounds)))
}

fn loss_of(bounds: impl Iterator<Item = (NodeId, TruthBounds)>) -> LossReport {
    let contributions: Vec<_> = bounds
        .filter(|(_, b)| b.lower > b.upper)
        .map(|(id, b)| (id, b.lower - b.upper))
        .collect();
    LossReport { total_contradiction: contributions.iter().fold(0.0, |acc, c| acc + c.1), contributions }
}

#[derive(Clone, Copy)]
struct Entry {
    value: f64,
    parents: [(usize, f64); 2],
}

/// Reverse-mode tape; scalars are indices into it.
#[derive(Default)]
struct Tape {
    entries: Vec<Entry>,
}

const NO_PARENT: (usize, f64) = (usize::MAX, 0.0);

impl Tape {
    fn push(&mut self, value: f64, parents: [(usize, f64); 2]) -> usize {
        self.entries.push(Entry { value, parents });
        self.entries.len() - 1
    }

    fn backward(&self, output: usize) -> Vec<f64> {
        let mut adj = vec![0.0; self.entries.len()];
        adj[output] = 1.0;
        for i in (0..=output).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            for (p, d) in self.entries[i].parents {
                if p != usize::MAX {
                    adj[p] += a * d;
                }
            }
        }
        adj
    }
}

impl Arith for Tape {
    type S = usize;

    fn constant(&mut self, v: f64) -> usize {
        self.push(v, [NO_PARENT; 2])
    }
    fn value(&self, s: usize) -> f64 {
        self.entries[s].value
    }
    fn add(&mut self, a: usize, b: usize) -> usize {
        let v = self.value(a) + self.value(b);
        self.push(v, [(a, 1.0), (b, 1.0)])
    }
    fn sub(&mut self, a: usize, b: usize) -> usize {
        let v = self.value(a) - self.value(b);
        self.push(v, [(a, 1.0), (b, -1.0)])
    }
    fn mul(&mut self, a: usize, b: usize) -> usize {
        let (x, y) = (self.value(a), self.value(b));
        self.push(x * y, [(a, y), (b, x)])
    }
    fn div(&mut self, a: usize, b: usize) -> usize {
        let (x, y) = (self.value(a), self.value(b));
        self.push(x / y, [(a, 1.0 / y), (b, -x / (y * y))])
    }
    fn clamp01(&mut self, a: usize) -> usize {
        let x = self.value(a);
        if (0.0..=1.0).contains(&x) {
            self.push(x, [(a, 1.0), NO_PARENT])
        } else {
            self.push(x.clamp(0.0, 1.0), [NO_PARENT; 2])
        }
    }
}

/// Loss after a fresh inference run at the graph's current parameters,
/// without touching the graph's bounds.
pub fn loss_at(graph: &NeuronGraph, config: &InferenceConfig) -> LossReport {
    let params = NodeParams::of(graph);
    let result = run(&mut Plain, graph, &params, config.max_passes, config.tolerance, &mut |_| {});
    loss_of(result.bounds.iter().enumerate().map(|(i, b)| (i, TruthBounds { lower: b.lower, upper: b.upper })))
}

/// Loss and its subgradient with respect to [`NeuronGraph::parameters`],
/// after a fresh inference run.
pub fn gradient(graph: &NeuronGraph, config: &InferenceConfig) -> (LossReport, Vec<f64>) {
    let mut tape = Tape::default();
    let mut slots = Vec::new();
    let mut params = NodeParams { weights: Vec::with_capacity(graph.len()), bias: Vec::with_capacity(graph.len()) };
    for n in &graph.nodes {
        let ws: Vec<usize> = n.weights.iter().map(|&w| tape.constant(w)).collect();
        let b = tape.constant(n.bias);
        if n.kind.is_weighted() {
            slots.extend(ws.iter().copied());
            slots.push(b);
        }
        params.weights.push(ws);
        params.bias.push(b);
    }
    let result = run(&mut tape, graph, &params, config.max_passes, config.tolerance, &mut |_| {});
    let mut total = tape.constant(0.0);
    let mut crossed = Vec::new();
    for (id, b) in result.bounds.iter().enumerate() {
        let (l, u) = (tape.value(b.lower), tape.value(b.upper));
        if l > u {
            crossed.push((id, l - u));
            let d = tape.sub(b.lower, b.upper);
            total = tape.add(total, d);
        }
    }
    let adj = tape.backward(total);
    let report = LossReport { total_contradiction: crossed.iter().fold(0.0, |acc, c| acc + c.1), contributions: crossed };
    (report, slots.into_iter().map(|s| adj[s]).collect())
}

/// Central finite-difference estimate of the loss gradient.
pub fn finite_difference_gradient(graph: &NeuronGraph, config: &InferenceConfig, epsilon: f64) -> Vec<f64> {
    let base = graph.param_values();
    let mut probe = graph.clone();
    (0..base.len())
        .map(|i| {
            let mut at = |delta: f64| {
                let mut p = base.clone();
                p[i] += delta;
                probe.set_param_values(&p);
                loss_at(&probe, config).total_contradiction
            };
            (at(epsilon) - at(-epsilon)) / (2.0 * epsilon)
        })
        .collect()
}

/// One projected descent step: `w <- max(floor, w - lr * g)`. Returns the
/// loss measured before the step.
pub fn gradient_step(graph: &mut NeuronGraph, config: &LearnConfig) -> LossReport {
    let (loss, grad) = gradient(graph, &config.inference);
    if loss.total_contradiction > 0.0 {
        let updated: Vec<f64> = graph
            .param_values()
            .iter()
            .zip(&grad)
            .map(|(w, g)| (w - config.learning_rate * g).max(config.weight_floor))
            .collect();
        graph.set_param_values(&updated);
    }
    loss
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    /// Loss at the start of each epoch.
    pub losses: Vec<LossReport>,
    pub diverged: bool,
}

impl TrainHistory {
    pub fn totals(&self) -> Vec<f64> {
        self.losses.iter().map(|l| l.total_contradiction).collect()
    }
}

/// Runs `epochs` descent steps, each from freshly reset bounds, then leaves
/// the graph holding the bounds of a final inference run.
pub fn train(graph: &mut NeuronGraph, config: &LearnConfig) -> Result<TrainHistory, LearnError> {
    config.validate()?;
    let mut history = TrainHistory::default();
    let mut rising = 0;
    for epoch in 0..config.epochs {
        let loss = gradient_step(graph, config);
        if let Some(prev) = history.losses.last() {
            rising = if loss.total_contradiction > prev.total_contradiction { rising + 1 } else { 0 };
            if rising == DIVERGENCE_WINDOW && !history.diverged {
                warn!("contradiction loss rose {} epochs in a row (epoch {})", DIVERGENCE_WINDOW, epoch + 1);
                history.diverged = true;
            }
        }
        history.losses.push(loss);
    }
    crate::infer::infer(graph, &config.inference)?;
    Ok(history)
}
