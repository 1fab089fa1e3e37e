use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::rules::{apply_unchecked, first_instance};
use super::{Budget, ExpandError, Reasoner, RulePriority};
use crate::forest::{blocking_statuses, dump, has_clash, Clash, CompletionForest};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpansionStats {
    pub forests_explored: u64,
    pub ccf_count: u64,
    pub clashed: u64,
    pub max_nodes: usize,
    pub rule_applications: u64,
    pub budget_hit: bool,
}

impl fmt::Display for ExpansionStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "forests_explored={} ccf_count={} max_nodes={} rule_applications={} budget_hit={}",
            self.forests_explored, self.ccf_count, self.max_nodes, self.rule_applications, self.budget_hit
        )
    }
}

/// A forest to which no rule applies, or one that reached a clash. Clashes
/// are never repaired by later rules, so clashed branches stop early.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub forest: CompletionForest,
    pub clash: Option<Clash>,
}

impl Leaf {
    pub fn is_clash_free(&self) -> bool {
        self.clash.is_none()
    }
}

/// Depth-first enumeration of the leaves reachable from the initial forest.
pub struct Expander<'r, 'kb> {
    reasoner: &'r Reasoner<'kb>,
    n: u64,
    budget: Budget,
    priority: RulePriority,
    stack: Vec<CompletionForest>,
    seen: BTreeSet<String>,
    stats: ExpansionStats,
    interrupt: Option<Box<dyn FnMut() -> bool + 'r>>,
    finished: bool,
}

impl<'r, 'kb> Expander<'r, 'kb> {
    pub fn new(reasoner: &'r Reasoner<'kb>, n: u64, budget: Budget) -> Self {
        Expander {
            reasoner,
            n,
            budget,
            priority: RulePriority::default(),
            stack: alloc::vec![reasoner.init_forest()],
            seen: BTreeSet::new(),
            stats: ExpansionStats::default(),
            interrupt: None,
            finished: false,
        }
    }

    pub fn with_priority(mut self, priority: RulePriority) -> Self {
        self.priority = priority;
        self
    }

    /// `poll` is called before every rule application; returning true stops
    /// the expansion with [`ExpandError::Interrupted`].
    pub fn with_interrupt(mut self, poll: impl FnMut() -> bool + 'r) -> Self {
        self.interrupt = Some(Box::new(poll));
        self
    }

    pub fn stats(&self) -> &ExpansionStats {
        &self.stats
    }

    fn fail(&mut self, limit: Option<&'static str>) -> ExpandError {
        self.finished = true;
        match limit {
            Some(limit) => {
                self.stats.budget_hit = true;
                ExpandError::BudgetExceeded { limit, stats: self.stats.clone() }
            }
            None => ExpandError::Interrupted { stats: self.stats.clone() },
        }
    }

    fn step(&mut self) -> Option<Result<Leaf, ExpandError>> {
        let vocab = self.reasoner.vocab();
        while let Some(mut f) = self.stack.pop() {
            self.stats.forests_explored += 1;
            if self.stats.forests_explored > self.budget.max_forests {
                return Some(Err(self.fail(Some("max_forests"))));
            }
            loop {
                self.stats.max_nodes = self.stats.max_nodes.max(f.node_count());
                if f.node_count() > self.budget.max_nodes {
                    return Some(Err(self.fail(Some("max_nodes"))));
                }
                if let Some(clash) = has_clash(&f, vocab) {
                    self.stats.clashed += 1;
                    return Some(Ok(Leaf { forest: f, clash: Some(clash) }));
                }
                let statuses = blocking_statuses(&f, self.n);
                let Some(inst) = first_instance(&f, vocab, &statuses, &self.priority) else {
                    self.stats.ccf_count += 1;
                    return Some(Ok(Leaf { forest: f, clash: None }));
                };
                if let Some(poll) = self.interrupt.as_mut() {
                    if poll() {
                        return Some(Err(self.fail(None)));
                    }
                }
                self.stats.rule_applications += 1;
                let mut next = apply_unchecked(&f, vocab, &inst);
                if next.len() == 1 {
                    f = next.pop().expect("one successor");
                    continue;
                }
                for g in next.into_iter().rev() {
                    if self.seen.insert(dump(&g, vocab, None)) {
                        self.stack.push(g);
                    }
                }
                break;
            }
        }
        self.finished = true;
        None
    }
}

impl Iterator for Expander<'_, '_> {
    type Item = Result<Leaf, ExpandError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        self.step()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::Concept;
    use crate::forest::BlockingStatus;
    use crate::kb::KbBuilder;
    use crate::role::Role;

    fn a(n: &str) -> Concept {
        Concept::atom(n)
    }

    #[test]
    fn contradictory_tbox_is_unsatisfiable() {
        let kb = KbBuilder::new()
            .assert_concept(a("A"), "a")
            .axiom(a("A"), a("B"))
            .axiom(a("A"), Concept::not_atom("B"))
            .build()
            .unwrap();
        let rs = Reasoner::new(&kb);
        let leaves: Vec<Leaf> = rs.expand(1, Budget::default()).map(Result::unwrap).collect();
        assert!(!leaves.is_empty());
        assert!(leaves.iter().all(|l| !l.is_clash_free()));
        assert_eq!(rs.is_satisfiable(1, Budget::default()), Ok(false));
    }

    #[test]
    fn cyclic_existential_terminates_with_blocking() {
        let kb = KbBuilder::new()
            .assert_concept(a("A"), "a")
            .axiom(a("A"), Concept::exists(Role::new("R"), a("A")))
            .build()
            .unwrap();
        let rs = Reasoner::new(&kb);
        let leaf = rs.expand(1, Budget::default()).map(Result::unwrap).find(Leaf::is_clash_free).unwrap();
        let st = blocking_statuses(&leaf.forest, 1);
        assert!(st.iter().any(BlockingStatus::is_direct));
    }

    #[test]
    fn trivial_kb_yields_initial_forest() {
        let kb = KbBuilder::new().assert_concept(a("A"), "a").build().unwrap();
        let rs = Reasoner::new(&kb);
        let leaves: Vec<Leaf> = rs.expand(1, Budget::default()).map(Result::unwrap).collect();
        assert_eq!(leaves.len(), 1);
        assert!(leaves[0].is_clash_free());
        assert_eq!(leaves[0].forest, rs.init_forest());
    }

    #[test]
    fn budget_is_reported() {
        let kb = KbBuilder::new()
            .assert_concept(a("A"), "a")
            .axiom(a("A"), Concept::exists(Role::new("R"), a("A")))
            .build()
            .unwrap();
        let rs = Reasoner::new(&kb);
        let err = rs.expand(50, Budget { max_forests: 1_000_000, max_nodes: 5 }).find_map(Result::err).unwrap();
        match err {
            ExpandError::BudgetExceeded { limit, stats } => {
                assert_eq!(limit, "max_nodes");
                assert!(stats.budget_hit);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interrupt_stops_expansion() {
        let kb = KbBuilder::new().assert_concept(Concept::and(a("A"), a("B")), "a").build().unwrap();
        let rs = Reasoner::new(&kb);
        let mut it = rs.expand(1, Budget::default()).with_interrupt(|| true);
        assert!(matches!(it.next(), Some(Err(ExpandError::Interrupted { .. }))));
        assert!(it.next().is_none());
    }
}
