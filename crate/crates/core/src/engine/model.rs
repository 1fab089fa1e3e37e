use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::forest::{blocking_statuses, has_clash, CompletionForest, NodeId};
use crate::kb::KnowledgeBase;
use crate::oracle::{interpretation_of_forest, Interpretation};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// Some node is directly blocked; the canonical model would be infinite.
    BlockedForest(NodeId),
    Clash(NodeId),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::BlockedForest(x) => write!(f, "node {x} is blocked; no finite canonical model"),
            ModelError::Clash(x) => write!(f, "forest has a clash at node {x}"),
        }
    }
}

impl core::error::Error for ModelError {}

/// Reads the canonical model off a clash-free forest without blocked nodes.
/// The domain holds the alive nodes outside merge-pruned subtrees; role
/// extensions are edge pairs closed under the role hierarchy and
/// transitivity.
pub fn materialize_model(
    f: &CompletionForest,
    vocab: &Vocabulary,
    kb: &KnowledgeBase,
    n: u64,
) -> Result<(Interpretation, BTreeMap<NodeId, usize>), ModelError> {
    if let Some(c) = has_clash(f, vocab) {
        return Err(ModelError::Clash(c.node()));
    }
    let statuses = blocking_statuses(f, n);
    if let Some(x) = f.alive().find(|x| statuses[x.index()].is_direct() && !f.is_pruned(*x)) {
        return Err(ModelError::BlockedForest(x));
    }
    let nodes: Vec<NodeId> = f.alive().filter(|x| !f.is_pruned(*x)).collect();
    Ok(interpretation_of_forest(f, vocab, kb, &nodes))
}
