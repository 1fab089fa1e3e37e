//! Completion forests.
//!
//! A forest is a graph over root nodes (one per individual, connected
//! arbitrarily) with a tree of anonymous nodes hanging below each root.
//! Nodes carry concept labels, edges carry role labels, and `neq` records
//! pairs of nodes that must be interpreted as distinct elements.

mod blocking;
mod dump;

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use blocking::{blocking_status, blocking_statuses, n_tree_iso, BlockingStatus};
pub use dump::dump;

use crate::kb::{Assertion, KnowledgeBase};
use crate::vocab::{ConceptId, RoleId, Shape, Vocabulary};

/// Creation-ordered node identifier. Never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Root { individual: String },
    Tree { parent: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestNode {
    label: BTreeSet<ConceptId>,
    kind: NodeKind,
    children: Vec<NodeId>,
    out: BTreeMap<NodeId, BTreeSet<RoleId>>,
    incoming: BTreeSet<NodeId>,
    depth: u32,
}

impl ForestNode {
    pub fn label(&self) -> &BTreeSet<ConceptId> {
        &self.label
    }

    pub fn kind(&self) -> &NodeKind {
        &self.kind
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionForest {
    nodes: Vec<ForestNode>,
    neq: BTreeSet<(NodeId, NodeId)>,
    merged: BTreeMap<NodeId, NodeId>,
}

fn ordered(x: NodeId, y: NodeId) -> (NodeId, NodeId) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl CompletionForest {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl DoubleEndedIterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    /// Nodes not retired by a root merge.
    pub fn alive(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|x| self.is_alive(*x))
    }

    pub fn node(&self, x: NodeId) -> &ForestNode {
        &self.nodes[x.index()]
    }

    pub fn label(&self, x: NodeId) -> &BTreeSet<ConceptId> {
        &self.nodes[x.index()].label
    }

    pub fn has(&self, x: NodeId, c: ConceptId) -> bool {
        self.nodes[x.index()].label.contains(&c)
    }

    pub fn is_root(&self, x: NodeId) -> bool {
        matches!(self.nodes[x.index()].kind, NodeKind::Root { .. })
    }

    pub fn parent(&self, x: NodeId) -> Option<NodeId> {
        match self.nodes[x.index()].kind {
            NodeKind::Tree { parent } => Some(parent),
            NodeKind::Root { .. } => None,
        }
    }

    pub fn children(&self, x: NodeId) -> &[NodeId] {
        &self.nodes[x.index()].children
    }

    /// Distance to the root of the node's tree.
    pub fn depth(&self, x: NodeId) -> u32 {
        self.nodes[x.index()].depth
    }

    pub fn is_alive(&self, x: NodeId) -> bool {
        !self.merged.contains_key(&x)
    }

    /// Follows the merge record to the surviving node.
    pub fn resolve(&self, mut x: NodeId) -> NodeId {
        while let Some(&z) = self.merged.get(&x) {
            x = z;
        }
        x
    }

    pub fn merged(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.merged.iter().map(|(a, b)| (*a, *b))
    }

    pub fn roots(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|x| self.is_root(*x))
    }

    /// The surviving root standing for an individual.
    pub fn root_of(&self, individual: &str) -> Option<NodeId> {
        self.roots()
            .find(|x| matches!(&self.node(*x).kind, NodeKind::Root { individual: i } if i == individual))
            .map(|x| self.resolve(x))
    }

    pub fn individual(&self, x: NodeId) -> Option<&str> {
        match &self.node(x).kind {
            NodeKind::Root { individual } => Some(individual),
            NodeKind::Tree { .. } => None,
        }
    }

    pub fn edge(&self, x: NodeId, y: NodeId) -> Option<&BTreeSet<RoleId>> {
        self.nodes[x.index()].out.get(&y)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &BTreeSet<RoleId>)> {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.out.iter().map(move |(y, l)| (NodeId(i as u32), *y, l)))
    }

    pub fn are_distinct(&self, x: NodeId, y: NodeId) -> bool {
        self.neq.contains(&ordered(x, y))
    }

    pub fn neq_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.neq.iter().copied()
    }

    /// Strict tree ancestor.
    pub fn is_ancestor(&self, a: NodeId, x: NodeId) -> bool {
        let mut cur = self.parent(x);
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent(p);
        }
        false
    }

    /// A node cut off from its tree by an emptied edge on its root path.
    /// Such nodes are remnants of a merge and take no further part in
    /// reasoning.
    pub fn is_pruned(&self, x: NodeId) -> bool {
        let mut cur = x;
        while let Some(p) = self.parent(cur) {
            if self.edge(p, cur).is_none_or(BTreeSet::is_empty) {
                return true;
            }
            cur = p;
        }
        false
    }

    pub(crate) fn add_label(&mut self, x: NodeId, c: ConceptId) -> bool {
        self.nodes[x.index()].label.insert(c)
    }

    pub(crate) fn add_tree_node(
        &mut self,
        parent: NodeId,
        role: RoleId,
        label: impl IntoIterator<Item = ConceptId>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        let depth = self.nodes[parent.index()].depth + 1;
        self.nodes.push(ForestNode {
            label: label.into_iter().collect(),
            kind: NodeKind::Tree { parent },
            children: Vec::new(),
            out: BTreeMap::new(),
            incoming: BTreeSet::new(),
            depth,
        });
        self.nodes[parent.index()].children.push(id);
        self.add_roles(parent, id, [role]);
        id
    }

    pub(crate) fn add_roles(&mut self, x: NodeId, y: NodeId, roles: impl IntoIterator<Item = RoleId>) {
        self.nodes[x.index()].out.entry(y).or_default().extend(roles);
        self.nodes[y.index()].incoming.insert(x);
    }

    /// Empties the label of `⟨x, y⟩` but keeps the edge.
    pub(crate) fn clear_edge(&mut self, x: NodeId, y: NodeId) -> BTreeSet<RoleId> {
        self.nodes[x.index()].out.get_mut(&y).map(core::mem::take).unwrap_or_default()
    }

    pub(crate) fn set_distinct(&mut self, x: NodeId, y: NodeId) {
        debug_assert!(x != y);
        self.neq.insert(ordered(x, y));
    }

    /// Every `u ≠ from` also becomes `u ≠ to`.
    pub(crate) fn copy_distinctions(&mut self, from: NodeId, to: NodeId) {
        let others: Vec<NodeId> = self
            .neq
            .iter()
            .filter_map(|&(a, b)| if a == from { Some(b) } else if b == from { Some(a) } else { None })
            .collect();
        for u in others {
            if u != to {
                self.set_distinct(u, to);
            }
        }
    }

    /// Merges root `y` into root `z`: labels, edges in both directions,
    /// tree children and inequalities move to `z`, and `y` is retired.
    pub(crate) fn merge_root(&mut self, y: NodeId, z: NodeId) {
        let label = core::mem::take(&mut self.nodes[y.index()].label);
        self.nodes[z.index()].label.extend(label);

        let out = core::mem::take(&mut self.nodes[y.index()].out);
        for (w, roles) in out {
            self.nodes[w.index()].incoming.remove(&y);
            let w = if w == y { z } else { w };
            self.add_roles(z, w, roles);
        }
        let incoming = core::mem::take(&mut self.nodes[y.index()].incoming);
        for w in incoming {
            if w == y {
                continue;
            }
            let roles = self.nodes[w.index()].out.remove(&y).unwrap_or_default();
            self.add_roles(w, z, roles);
        }
        let children = core::mem::take(&mut self.nodes[y.index()].children);
        for c in &children {
            self.nodes[c.index()].kind = NodeKind::Tree { parent: z };
        }
        self.nodes[z.index()].children.extend(children);

        self.copy_distinctions(y, z);
        self.neq.retain(|&(a, b)| a != y && b != y);
        self.merged.insert(y, z);
    }
}

/// Builds the initial forest: one root per individual labelled with its
/// concept assertions and the global constraints, one edge per asserted
/// role pair, and the asserted inequalities.
pub fn init_forest(kb: &KnowledgeBase, vocab: &Vocabulary) -> CompletionForest {
    let mut f = CompletionForest { nodes: Vec::new(), neq: BTreeSet::new(), merged: BTreeMap::new() };
    let mut root = BTreeMap::new();
    for (i, name) in kb.individuals().iter().enumerate() {
        f.nodes.push(ForestNode {
            label: vocab.globals().iter().copied().collect(),
            kind: NodeKind::Root { individual: name.clone() },
            children: Vec::new(),
            out: BTreeMap::new(),
            incoming: BTreeSet::new(),
            depth: 0,
        });
        root.insert(name.as_str(), NodeId(i as u32));
    }
    for a in kb.abox() {
        match a {
            Assertion::Concept(c, x) => {
                let id = vocab.id_of(c).expect("asserted concept is in the closure");
                f.add_label(root[x.as_str()], id);
            }
            Assertion::Role(r, x, y) => {
                let id = vocab.role_id(r).expect("asserted role is in the signature");
                f.add_roles(root[x.as_str()], root[y.as_str()], [id]);
            }
            Assertion::Distinct(x, y) => {
                let (x, y) = (root[x.as_str()], root[y.as_str()]);
                if x != y {
                    f.set_distinct(x, y);
                }
            }
        }
    }
    f
}

/// Nodes `y` such that `⟨x, y⟩` carries some `R ⊑* s`, or `⟨y, x⟩` carries
/// some `R ⊑* Inv(s)`.
pub fn s_neighbours(f: &CompletionForest, vocab: &Vocabulary, x: NodeId, s: RoleId) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    let node = f.node(x);
    for (y, roles) in &node.out {
        if roles.iter().any(|&r| vocab.subrole(r, s)) {
            out.insert(*y);
        }
    }
    let inv = s.inverse();
    for y in &node.incoming {
        if f.edge(*y, x).is_some_and(|roles| roles.iter().any(|&r| vocab.subrole(r, inv))) {
            out.insert(*y);
        }
    }
    out
}

/// Whether `y` is an `r`-descendant of `x`: a one-step `r`-neighbour, or
/// reachable by one or more steps along some transitive `S ⊑* r`.
pub fn r_connected(f: &CompletionForest, vocab: &Vocabulary, x: NodeId, y: NodeId, r: RoleId) -> bool {
    if s_neighbours(f, vocab, x, r).contains(&y) {
        return true;
    }
    vocab.transitive_below(r).iter().any(|&s| reachable(f, vocab, x, s).contains(&y))
}

/// Nodes reachable from `x` in one or more `s`-neighbour steps.
pub fn reachable(f: &CompletionForest, vocab: &Vocabulary, x: NodeId, s: RoleId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<NodeId> = s_neighbours(f, vocab, x, s).into_iter().collect();
    while let Some(n) = queue.pop_front() {
        if seen.insert(n) {
            queue.extend(s_neighbours(f, vocab, n, s));
        }
    }
    seen
}

/// Searches `candidates` for `k` nodes that are pairwise in `neq`.
pub(crate) fn distinct_subset(f: &CompletionForest, candidates: &[NodeId], k: usize) -> Option<Vec<NodeId>> {
    fn go(f: &CompletionForest, cands: &[NodeId], k: usize, start: usize, chosen: &mut Vec<NodeId>) -> bool {
        if chosen.len() == k {
            return true;
        }
        if cands.len() - start < k - chosen.len() {
            return false;
        }
        for i in start..cands.len() {
            let y = cands[i];
            if chosen.iter().all(|&c| f.are_distinct(c, y)) {
                chosen.push(y);
                if go(f, cands, k, i + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    go(f, candidates, k, 0, &mut chosen).then_some(chosen)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clash {
    /// `{A, ¬A} ⊆ L(node)`.
    Atomic { node: NodeId, atom: String },
    /// `≤n S.C ∈ L(node)` with `n + 1` pairwise distinct `S`-neighbours in `C`.
    AtMost { node: NodeId, concept: ConceptId, neighbours: Vec<NodeId> },
}

impl Clash {
    pub fn node(&self) -> NodeId {
        match self {
            Clash::Atomic { node, .. } | Clash::AtMost { node, .. } => *node,
        }
    }
}

pub fn has_clash(f: &CompletionForest, vocab: &Vocabulary) -> Option<Clash> {
    f.alive().find_map(|x| node_clash(f, vocab, x))
}

pub fn node_clash(f: &CompletionForest, vocab: &Vocabulary, x: NodeId) -> Option<Clash> {
    for &c in f.label(x) {
        match vocab.shape(c) {
            Shape::Atom(a) => {
                if f.has(x, vocab.negation(c)) {
                    return Some(Clash::Atomic { node: x, atom: vocab.atom_name(a).into() });
                }
            }
            Shape::AtMost(n, s, body) => {
                let cands: Vec<NodeId> =
                    s_neighbours(f, vocab, x, s).into_iter().filter(|y| f.has(*y, body)).collect();
                if let Some(neighbours) = distinct_subset(f, &cands, n as usize + 1) {
                    return Some(Clash::AtMost { node: x, concept: c, neighbours });
                }
            }
            _ => {}
        }
    }
    None
}
