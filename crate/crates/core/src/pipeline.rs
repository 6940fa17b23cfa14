//! The fixed path from a parsed knowledge base to a neuron graph: theory
//! injection, then function elimination, then compilation.

use thiserror::Error;

use crate::graph::{compile, CompileError, NeuronGraph};
use crate::kb::KnowledgeBase;
use crate::rewrite::{rewrite_kb, RewriteError};
use crate::theory::inject_equality;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

/// Function-free knowledge base with every theory axiom in place.
pub fn prepare(kb: &KnowledgeBase) -> Result<KnowledgeBase, RewriteError> {
    rewrite_kb(&inject_equality(kb))
}

pub fn build_graph(kb: &KnowledgeBase) -> Result<NeuronGraph, PipelineError> {
    Ok(compile(&prepare(kb)?)?)
}
