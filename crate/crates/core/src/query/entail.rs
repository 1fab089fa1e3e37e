use alloc::collections::BTreeMap;
use core::fmt;

use super::{blocking_depth, maps_into, BlockingParams, Query, QueryError};
use crate::engine::{materialize_model, Budget, ExpandError, ExpansionStats, Reasoner, RulePriority};
use crate::forest::{CompletionForest, NodeId};
use crate::kb::KnowledgeBase;
use crate::oracle::{is_model_kb, satisfies_query, Interpretation};

#[derive(Debug, Clone, Default)]
pub struct EntailConfig {
    /// Replaces the sufficient blocking depth.
    pub depth_override: Option<u64>,
    pub budget: Budget,
    pub priority: RulePriority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Entailed,
    NotEntailed,
    /// Some forest admits no mapping, but the depth is below the sufficient
    /// bound and no countermodel could be read off the forest.
    NoMappingAtDepth,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Entailed => "entailed",
            Verdict::NotEntailed => "not_entailed",
            Verdict::NoMappingAtDepth => "no_mapping_at_depth",
        }
    }
}

/// A complete clash-free forest into which the query does not map.
#[derive(Debug, Clone)]
pub struct Witness {
    pub forest: CompletionForest,
    /// The canonical model of the forest, when it has no blocked nodes. It
    /// is checked to be a model of the knowledge base without a match.
    pub countermodel: Option<(Interpretation, BTreeMap<NodeId, usize>)>,
}

#[derive(Debug, Clone)]
pub struct EntailmentVerdict {
    pub verdict: Verdict,
    /// No complete clash-free forest exists; entailment holds vacuously.
    pub unsatisfiable: bool,
    pub params: BlockingParams,
    pub witness: Option<Witness>,
    pub stats: ExpansionStats,
}

impl EntailmentVerdict {
    pub fn is_entailed(&self) -> bool {
        self.verdict == Verdict::Entailed
    }
}

impl fmt::Display for EntailmentVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verdict={} blocking={} complete={} forests={}",
            self.verdict.name(),
            self.params.depth,
            self.params.complete,
            self.stats.forests_explored
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntailError {
    Query(QueryError),
    Expand(ExpandError),
}

impl fmt::Display for EntailError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntailError::Query(e) => write!(f, "invalid query: {e}"),
            EntailError::Expand(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for EntailError {}

impl From<QueryError> for EntailError {
    fn from(e: QueryError) -> Self {
        EntailError::Query(e)
    }
}

impl From<ExpandError> for EntailError {
    fn from(e: ExpandError) -> Self {
        EntailError::Expand(e)
    }
}

/// Decides `kb ⊨ q` by checking for a mapping into every complete clash-free
/// forest, stopping at the first forest without one.
pub fn entails(kb: &KnowledgeBase, q: &Query, config: &EntailConfig) -> Result<EntailmentVerdict, EntailError> {
    entails_with_interrupt(kb, q, config, || false)
}

/// [`entails`] with a poll that can abort the expansion.
pub fn entails_with_interrupt<'a>(
    kb: &KnowledgeBase,
    q: &Query,
    config: &EntailConfig,
    interrupt: impl FnMut() -> bool + 'a,
) -> Result<EntailmentVerdict, EntailError> {
    q.validate(kb)?;
    let params = blocking_depth(kb, q, config.depth_override);
    let reasoner = Reasoner::new(kb);
    let vocab = reasoner.vocab();
    let mut expander = reasoner
        .expand(params.depth, config.budget)
        .with_priority(config.priority.clone())
        .with_interrupt(interrupt);
    let mut any_ccf = false;
    while let Some(leaf) = expander.next() {
        let leaf = leaf?;
        if !leaf.is_clash_free() {
            continue;
        }
        any_ccf = true;
        if maps_into(&leaf.forest, vocab, q)?.is_some() {
            continue;
        }
        let countermodel = materialize_model(&leaf.forest, vocab, kb, params.depth)
            .ok()
            .filter(|(i, _)| is_model_kb(i, kb) && satisfies_query(i, q) == Ok(false));
        let verdict = if params.complete || countermodel.is_some() {
            Verdict::NotEntailed
        } else {
            Verdict::NoMappingAtDepth
        };
        return Ok(EntailmentVerdict {
            verdict,
            unsatisfiable: false,
            params,
            witness: Some(Witness { forest: leaf.forest, countermodel }),
            stats: expander.stats().clone(),
        });
    }
    Ok(EntailmentVerdict {
        verdict: Verdict::Entailed,
        unsatisfiable: !any_ccf,
        params,
        witness: None,
        stats: expander.stats().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::Concept;
    use crate::kb::KbBuilder;
    use crate::query::{QueryAtom, Term};
    use crate::role::Role;

    fn a(n: &str) -> Concept {
        Concept::atom(n)
    }

    #[test]
    fn abox_fact_is_entailed() {
        let kb = KbBuilder::new()
            .assert_role(Role::new("R"), "a", "b")
            .assert_concept(a("B"), "b")
            .distinguished("B")
            .build()
            .unwrap();
        let q = Query::new([
            QueryAtom::role("R", Term::constant("a"), Term::var("y")),
            QueryAtom::concept("B", Term::var("y")),
        ])
        .unwrap();
        let v = entails(&kb, &q, &EntailConfig::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Entailed);
        assert!(!v.unsatisfiable);
        assert!(v.to_string().starts_with("verdict=entailed blocking=2 complete=true forests="));
    }

    #[test]
    fn disjunction_is_not_entailed() {
        let kb = KbBuilder::new()
            .assert_concept(a("A"), "a")
            .axiom(a("A"), Concept::or(a("B"), a("C")))
            .distinguished("B")
            .build()
            .unwrap();
        let q = Query::new([QueryAtom::concept("B", Term::constant("a"))]).unwrap();
        let v = entails(&kb, &q, &EntailConfig::default()).unwrap();
        assert_eq!(v.verdict, Verdict::NotEntailed);
        let w = v.witness.unwrap();
        let (i, _) = w.countermodel.unwrap();
        assert_eq!(i.size(), 1);
        assert!(i.concept("C").unwrap().contains(0));
    }

    #[test]
    fn forced_existential_is_entailed() {
        let kb = KbBuilder::new()
            .assert_concept(a("A"), "a")
            .axiom(a("A"), Concept::exists(Role::new("R"), a("B")))
            .distinguished("B")
            .build()
            .unwrap();
        let q = Query::new([
            QueryAtom::role("R", Term::constant("a"), Term::var("y")),
            QueryAtom::concept("B", Term::var("y")),
        ])
        .unwrap();
        assert!(entails(&kb, &q, &EntailConfig::default()).unwrap().is_entailed());
    }

    #[test]
    fn unsatisfiable_is_vacuously_entailed() {
        let kb = KbBuilder::new()
            .assert_concept(a("A"), "a")
            .axiom(a("A"), a("B"))
            .axiom(a("A"), Concept::not_atom("B"))
            .distinguished("C")
            .build()
            .unwrap();
        let q = Query::new([QueryAtom::concept("C", Term::constant("a"))]).unwrap();
        let v = entails(&kb, &q, &EntailConfig::default()).unwrap();
        assert!(v.is_entailed() && v.unsatisfiable);
    }

    #[test]
    fn invalid_query_is_rejected() {
        let kb = KbBuilder::new().assert_concept(a("A"), "a").build().unwrap();
        let q = Query::new([QueryAtom::concept("A", Term::constant("a"))]).unwrap();
        assert!(matches!(entails(&kb, &q, &EntailConfig::default()), Err(EntailError::Query(_))));
    }
}
