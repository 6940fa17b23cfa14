//! Logical neural networks over first-order knowledge bases.
//!
//! A knowledge base is parsed from s-expression text, extended with the
//! axioms of equality, rewritten into a function-free form, compiled into a
//! graph with one neuron per subformula grounding, and then evaluated by
//! bound propagation under weighted Łukasiewicz logic. Connective
//! parameters can be trained to reduce contradiction.

pub mod bounds;
pub mod formula;
pub mod graph;
pub mod infer;
pub mod kb;
pub mod learn;
pub mod parser;
pub mod pipeline;
pub mod rewrite;
pub mod theory;

pub use bounds::{classify_state, ConfigError, PrimaryState, TruthBounds, CONTRADICTION_TOLERANCE, DEFAULT_ALPHA};
pub use formula::{Formula, Params, Term, EQUALITY};
pub use graph::{compile, CompileError, NeuronGraph, NeuronNode, NodeId, NodeKind, Root, RootKind};
pub use infer::{infer, InferenceConfig, InferenceReport, RootState};
pub use kb::{Axiom, GroundAtom, KnowledgeBase, Query, World};
pub use learn::{contradiction_loss, gradient_step, train, LearnConfig, LossReport, TrainHistory};
pub use parser::{parse_kb, parse_kb_with_warnings, serialize_kb, ParseError};
pub use pipeline::{build_graph, prepare, PipelineError};
pub use rewrite::{eliminate_functions, rewrite_kb, RewriteError};
pub use theory::inject_equality;
