//! Tableau reasoning for SHIQ knowledge bases.
//!
//! The crate decides knowledge-base satisfiability and Boolean conjunctive
//! query entailment by expanding completion forests under n-tree blocking,
//! and ships a brute-force finite-model oracle used to cross-check the
//! engine on small inputs.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file handling and
//! the command-line front end live in the `shiq` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod concept;
pub mod engine;
pub mod forest;
pub mod kb;
pub mod oracle;
pub mod query;
pub mod role;
pub mod vocab;

pub use concept::{negate_nnf, nnf, Concept, ConceptExpr};
pub use engine::{
    materialize_model, Budget, ExpandError, ExpansionStats, Expander, Leaf, ModelError, Reasoner, RuleInstance, RuleKind,
    RulePriority,
};
pub use forest::{BlockingStatus, Clash, CompletionForest, NodeId};
pub use kb::{
    closure, global_constraints, metrics, validate_kb, Assertion, Gci, KbBuilder, KbMetrics,
    KnowledgeBase, ValidationIssue, ValidationReport,
};
pub use oracle::{
    countermodel_search, eval_concept, eval_concept_lenient, for_each_interpretation, is_model_forest, is_model_kb,
    satisfies_query, Interpretation, OracleError, Signature,
};
pub use query::{
    blocking_depth, d_bound, entails, entails_with_interrupt, maps_into, BlockingParams, DepthDerivation, EntailConfig,
    EntailError, EntailmentVerdict, Mapping, Query, QueryAtom, QueryError, Term, Verdict, Witness,
};
pub use role::{Role, RoleBox};
pub use vocab::{ConceptId, RoleId, Vocabulary};
