//! Bound propagation over a compiled neuron graph.

pub(crate) mod activation;
pub(crate) mod arith;
mod engine;

pub use activation::{downward_pass, upward_and, upward_exists, upward_forall, upward_implies, upward_not, upward_or};
pub use arith::{Arith, Interval, Plain};
pub use engine::{infer, infer_observed, report, InferenceConfig, InferenceReport, RootState};
pub(crate) use engine::{run, NodeParams};
