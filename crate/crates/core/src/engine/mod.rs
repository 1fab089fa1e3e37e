//! Expansion of completion forests.
//!
//! [`Reasoner`] bundles a validated knowledge base with its interned
//! vocabulary. Rules are applied one at a time; nondeterministic rules
//! produce one successor forest per alternative, and [`Expander`] explores
//! all of them depth first.

mod expand;
mod model;
mod rules;

use alloc::vec::Vec;
use core::fmt;

pub use expand::{ExpansionStats, Expander, Leaf};
pub use model::{materialize_model, ModelError};
pub use rules::{applicable_rule_instances, apply_rule};

use crate::forest::{self, CompletionForest, NodeId};
use crate::kb::KnowledgeBase;
use crate::vocab::{ConceptId, RoleId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    And,
    Or,
    Exists,
    Forall,
    ForallPlus,
    Choose,
    AtLeast,
    AtMost,
    AtMostRoot,
}

impl RuleKind {
    pub const ALL: [RuleKind; 9] = [
        RuleKind::And,
        RuleKind::Or,
        RuleKind::Exists,
        RuleKind::Forall,
        RuleKind::ForallPlus,
        RuleKind::Choose,
        RuleKind::AtLeast,
        RuleKind::AtMost,
        RuleKind::AtMostRoot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::And => "and",
            RuleKind::Or => "or",
            RuleKind::Exists => "exists",
            RuleKind::Forall => "forall",
            RuleKind::ForallPlus => "forall-plus",
            RuleKind::Choose => "choose",
            RuleKind::AtLeast => "atleast",
            RuleKind::AtMost => "atmost",
            RuleKind::AtMostRoot => "atmost-root",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One applicable rule at one node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleInstance {
    pub kind: RuleKind,
    pub node: NodeId,
    /// The label member that triggered the rule.
    pub concept: ConceptId,
    /// The neighbour updated by the ∀, ∀₊ and choose rules.
    pub target: Option<NodeId>,
    /// The transitive sub-role used by the ∀₊ rule.
    pub via: Option<RoleId>,
    /// For the merge rules: `(y, z)` pairs, `y` merged into `z`. One
    /// successor per pair.
    pub merges: Vec<(NodeId, NodeId)>,
}

impl RuleInstance {
    pub fn alternatives(&self) -> usize {
        match self.kind {
            RuleKind::Or | RuleKind::Choose => 2,
            RuleKind::AtMost | RuleKind::AtMostRoot => self.merges.len(),
            _ => 1,
        }
    }
}

/// Rule tiers, highest priority first. Within a tier instances are ordered
/// by node, then by triggering concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulePriority {
    tiers: Vec<Vec<RuleKind>>,
}

impl Default for RulePriority {
    fn default() -> Self {
        use RuleKind::*;
        RulePriority {
            tiers: alloc::vec![
                alloc::vec![AtMostRoot],
                alloc::vec![And, Forall, ForallPlus],
                alloc::vec![Or, Choose, AtMost],
                alloc::vec![Exists, AtLeast],
            ],
        }
    }
}

impl RulePriority {
    /// Each kind in its own tier, in the given order. Kinds left out are
    /// appended in their default order.
    pub fn from_order(order: &[RuleKind]) -> Self {
        let mut tiers: Vec<Vec<RuleKind>> = order.iter().map(|k| alloc::vec![*k]).collect();
        for k in RuleKind::ALL {
            if !order.contains(&k) {
                tiers.push(alloc::vec![k]);
            }
        }
        RulePriority { tiers }
    }

    pub fn tiers(&self) -> &[Vec<RuleKind>] {
        &self.tiers
    }
}

/// Resource ceilings for one expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Branches (forest values popped from the search stack).
    pub max_forests: u64,
    /// Nodes in any single forest.
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_forests: 200_000, max_nodes: 5_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpandError {
    BudgetExceeded { limit: &'static str, stats: ExpansionStats },
    Interrupted { stats: ExpansionStats },
    /// The instance is not applicable to the forest it was applied to.
    StaleInstance,
}

impl fmt::Display for ExpandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpandError::BudgetExceeded { limit, .. } => write!(f, "budget exceeded: {limit}"),
            ExpandError::Interrupted { .. } => f.write_str("expansion interrupted"),
            ExpandError::StaleInstance => f.write_str("rule instance is not applicable to this forest"),
        }
    }
}

impl core::error::Error for ExpandError {}

/// A validated knowledge base together with its interned vocabulary.
#[derive(Debug, Clone)]
pub struct Reasoner<'kb> {
    kb: &'kb KnowledgeBase,
    vocab: Vocabulary,
}

impl<'kb> Reasoner<'kb> {
    pub fn new(kb: &'kb KnowledgeBase) -> Self {
        Reasoner { kb, vocab: Vocabulary::new(kb) }
    }

    pub fn kb(&self) -> &'kb KnowledgeBase {
        self.kb
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn init_forest(&self) -> CompletionForest {
        forest::init_forest(self.kb, &self.vocab)
    }

    pub fn applicable_rule_instances(&self, f: &CompletionForest, n: u64, priority: &RulePriority) -> Vec<RuleInstance> {
        applicable_rule_instances(f, &self.vocab, n, priority)
    }

    pub fn apply_rule(&self, f: &CompletionForest, inst: &RuleInstance, n: u64) -> Result<Vec<CompletionForest>, ExpandError> {
        apply_rule(f, &self.vocab, inst, n)
    }

    pub fn expand(&self, n: u64, budget: Budget) -> Expander<'_, 'kb> {
        Expander::new(self, n, budget)
    }

    /// True when some complete clash-free forest exists.
    pub fn is_satisfiable(&self, n: u64, budget: Budget) -> Result<bool, ExpandError> {
        for leaf in self.expand(n, budget) {
            if leaf?.is_clash_free() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn dump(&self, f: &CompletionForest, n: Option<u64>) -> alloc::string::String {
        let statuses = n.map(|n| forest::blocking_statuses(f, n));
        forest::dump(f, &self.vocab, statuses.as_deref())
    }
}
