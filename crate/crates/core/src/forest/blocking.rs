//! n-tree equivalence and blocking.
//!
//! Two nodes are n-tree equivalent when the subtrees of depth `n` below them
//! are isomorphic with node and arc labels preserved. Equivalence is decided
//! by canonical codes: the code of a node at depth budget `k` interns its
//! label together with the sorted multiset of `(arc label, child code at
//! k - 1)`. Equal codes mean isomorphic n-trees, and the isomorphism itself
//! is rebuilt by pairing children with equal keys.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{CompletionForest, NodeId};
use crate::vocab::{ConceptId, RoleId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockingStatus {
    Unblocked,
    /// Leaf of the n-tree rooted at `tree_root`, whose n-witness is the
    /// strict ancestor `witness_root`. `witness` is the image of the blocked
    /// node under `iso`, which maps the whole n-tree of `tree_root` onto the
    /// n-tree of `witness_root`.
    Direct { witness: NodeId, tree_root: NodeId, witness_root: NodeId, iso: Vec<(NodeId, NodeId)> },
    Indirect,
}

impl BlockingStatus {
    pub fn is_blocked(&self) -> bool {
        !matches!(self, BlockingStatus::Unblocked)
    }

    pub fn is_indirect(&self) -> bool {
        matches!(self, BlockingStatus::Indirect)
    }

    pub fn is_direct(&self) -> bool {
        matches!(self, BlockingStatus::Direct { .. })
    }
}

type CodeKey = (Vec<ConceptId>, Vec<(Vec<RoleId>, u32)>);

struct Codes {
    /// `levels[k][x]` is the code of the k-tree of `x`.
    levels: Vec<Vec<u32>>,
}

impl Codes {
    fn new(f: &CompletionForest, n: u64) -> Self {
        let height = max_height(f);
        let top = n.min(height as u64) as usize;
        let mut interner: BTreeMap<CodeKey, u32> = BTreeMap::new();
        let mut intern = |key: CodeKey| {
            let next = interner.len() as u32;
            *interner.entry(key).or_insert(next)
        };
        let mut levels: Vec<Vec<u32>> = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let level: Vec<u32> = f
                .node_ids()
                .map(|x| {
                    let label: Vec<ConceptId> = f.label(x).iter().copied().collect();
                    let mut kids = Vec::new();
                    if k > 0 {
                        for &c in f.children(x) {
                            let arc: Vec<RoleId> = f.edge(x, c).map(|l| l.iter().copied().collect()).unwrap_or_default();
                            kids.push((arc, levels[k - 1][c.index()]));
                        }
                        kids.sort();
                    }
                    intern((label, kids))
                })
                .collect();
            levels.push(level);
        }
        Codes { levels }
    }

    fn level(&self, n: u64) -> usize {
        (n as usize).min(self.levels.len() - 1)
    }

    fn code(&self, x: NodeId, n: u64) -> u32 {
        self.levels[self.level(n)][x.index()]
    }

    /// Pairs the n-trees of `v` and `w`, assuming equal codes.
    fn iso(&self, f: &CompletionForest, v: NodeId, w: NodeId, n: u64, out: &mut Vec<(NodeId, NodeId)>) {
        out.push((v, w));
        if n == 0 {
            return;
        }
        let keyed = |x: NodeId| {
            let mut kids: Vec<(Vec<RoleId>, u32, NodeId)> = f
                .children(x)
                .iter()
                .map(|&c| {
                    let arc = f.edge(x, c).map(|l| l.iter().copied().collect()).unwrap_or_default();
                    (arc, self.code(c, n - 1), c)
                })
                .collect();
            kids.sort();
            kids
        };
        for (a, b) in keyed(v).into_iter().zip(keyed(w)) {
            debug_assert_eq!((&a.0, a.1), (&b.0, b.1));
            self.iso(f, a.2, b.2, n - 1, out);
        }
    }
}

fn max_height(f: &CompletionForest) -> u32 {
    let mut height = alloc::vec![0u32; f.node_count()];
    for x in f.node_ids().rev() {
        if let Some(p) = f.parent(x) {
            height[p.index()] = height[p.index()].max(height[x.index()] + 1);
        }
    }
    height.into_iter().max().unwrap_or(0)
}

/// Isomorphism between the n-trees of `v` and `w` mapping `v` to `w`, if any.
pub fn n_tree_iso(f: &CompletionForest, v: NodeId, w: NodeId, n: u64) -> Option<Vec<(NodeId, NodeId)>> {
    let codes = Codes::new(f, n);
    if codes.code(v, n) != codes.code(w, n) {
        return None;
    }
    let mut out = Vec::new();
    codes.iso(f, v, w, n, &mut out);
    Some(out)
}

/// Blocking status of every node, indexed by node id.
pub fn blocking_statuses(f: &CompletionForest, n: u64) -> Vec<BlockingStatus> {
    let codes = Codes::new(f, n);
    let mut status: Vec<BlockingStatus> = Vec::with_capacity(f.node_count());
    // Parents always precede their children in creation order.
    for x in f.node_ids() {
        let s = match f.parent(x) {
            None => BlockingStatus::Unblocked,
            Some(p) if status[p.index()].is_blocked() => BlockingStatus::Indirect,
            Some(p) if f.edge(p, x).is_none_or(BTreeSet::is_empty) => BlockingStatus::Indirect,
            Some(_) => direct(f, &codes, x, n).unwrap_or(BlockingStatus::Unblocked),
        };
        status.push(s);
    }
    status
}

pub fn blocking_status(f: &CompletionForest, x: NodeId, n: u64) -> BlockingStatus {
    blocking_statuses(f, n).swap_remove(x.index())
}

/// `x` is directly blocked when it is a leaf of the n-tree of some `v` that
/// has an n-witness `w`: a strict ancestor of `v`, n-tree equivalent to it,
/// whose own n-tree does not contain `v`. Nearest `v`, then nearest `w`.
fn direct(f: &CompletionForest, codes: &Codes, x: NodeId, n: u64) -> Option<BlockingStatus> {
    let is_leaf_below = |dist: u64| dist == n || f.children(x).is_empty();
    let mut v = x;
    let mut dist_vx = 0u64;
    loop {
        if dist_vx > n {
            return None;
        }
        f.parent(v)?;
        if is_leaf_below(dist_vx) {
            let cv = codes.code(v, n);
            let mut w = f.parent(v);
            let mut dist_wv = 1u64;
            while let Some(cand) = w {
                if dist_wv > n && codes.code(cand, n) == cv {
                    let mut iso = Vec::new();
                    codes.iso(f, v, cand, n, &mut iso);
                    let witness = iso.iter().find(|(a, _)| *a == x).map(|p| p.1)?;
                    return Some(BlockingStatus::Direct { witness, tree_root: v, witness_root: cand, iso });
                }
                w = f.parent(cand);
                dist_wv += 1;
            }
        }
        v = f.parent(v)?;
        dist_vx += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::Concept;
    use crate::forest::init_forest;
    use crate::kb::KbBuilder;
    use crate::role::Role;
    use crate::vocab::Vocabulary;

    struct Fixture {
        vocab: Vocabulary,
        forest: CompletionForest,
    }

    fn fixture() -> Fixture {
        let kb = KbBuilder::new()
            .assert_concept(Concept::atom("A"), "a")
            .assert_concept(Concept::atom("B"), "a")
            .assert_role(Role::new("R"), "a", "a")
            .assert_role(Role::new("S"), "a", "a")
            .build()
            .unwrap();
        let vocab = Vocabulary::new(&kb);
        let forest = init_forest(&kb, &vocab);
        Fixture { vocab, forest }
    }

    impl Fixture {
        fn c(&self, n: &str) -> ConceptId {
            self.vocab.id_of(&Concept::atom(n)).unwrap()
        }
        fn r(&self, n: &str) -> RoleId {
            self.vocab.role_id(&Role::new(n)).unwrap()
        }
        fn add(&mut self, parent: NodeId, role: &str, label: &[&str]) -> NodeId {
            let role = self.r(role);
            let label: Vec<ConceptId> = label.iter().map(|n| self.c(n)).collect();
            self.forest.add_tree_node(parent, role, label)
        }
    }

    /// Brute-force isomorphism test: tries every bijection between the
    /// depth-limited node sets.
    fn brute_iso(f: &CompletionForest, v: NodeId, w: NodeId, n: u64) -> bool {
        fn collect(f: &CompletionForest, x: NodeId, n: u64, out: &mut Vec<NodeId>) {
            out.push(x);
            if n > 0 {
                for &c in f.children(x) {
                    collect(f, c, n - 1, out);
                }
            }
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        collect(f, v, n, &mut a);
        collect(f, w, n, &mut b);
        if a.len() != b.len() {
            return false;
        }
        // Backtracking over injective maps a -> b, parents assigned first.
        fn extend(f: &CompletionForest, a: &[NodeId], b: &[NodeId], map: &mut Vec<NodeId>) -> bool {
            let k = map.len();
            if k == a.len() {
                return true;
            }
            let x = a[k];
            for &y in b {
                if map.contains(&y) || f.label(x) != f.label(y) {
                    continue;
                }
                if k > 0 {
                    let p = f.parent(x).expect("non-root of the n-tree has a parent");
                    let py = map[a.iter().position(|&z| z == p).expect("parent precedes child")];
                    if f.parent(y) != Some(py) || f.edge(p, x) != f.edge(py, y) {
                        continue;
                    }
                }
                map.push(y);
                if extend(f, a, b, map) {
                    return true;
                }
                map.pop();
            }
            false
        }
        let mut map = alloc::vec![w];
        f.label(v) == f.label(w) && extend(f, &a, &b, &mut map)
    }

    #[test]
    fn leaves_with_equal_labels() {
        let mut fx = fixture();
        let x = fx.add(NodeId(0), "R", &["A"]);
        let y = fx.add(NodeId(0), "R", &["A"]);
        assert_eq!(n_tree_iso(&fx.forest, x, y, 0), Some(alloc::vec![(x, y)]));
    }

    #[test]
    fn arc_labels_matter() {
        let mut fx = fixture();
        let x = fx.add(NodeId(0), "R", &["A"]);
        let y = fx.add(NodeId(0), "R", &["A"]);
        fx.add(x, "R", &["B"]);
        fx.add(y, "S", &["B"]);
        assert!(n_tree_iso(&fx.forest, x, y, 1).is_none());
        assert!(n_tree_iso(&fx.forest, x, y, 0).is_some());
    }

    #[test]
    fn truncated_comparison() {
        let mut fx = fixture();
        let v = fx.add(NodeId(0), "R", &["A"]);
        let w = fx.add(NodeId(0), "R", &["A"]);
        let v1 = fx.add(v, "R", &["B"]);
        fx.add(v1, "R", &["A"]);
        fx.add(w, "R", &["B"]);
        assert!(n_tree_iso(&fx.forest, v, w, 1).is_some());
        assert!(brute_iso(&fx.forest, v, w, 1));
        assert!(n_tree_iso(&fx.forest, v, w, 2).is_none());
        assert!(!brute_iso(&fx.forest, v, w, 2));
    }

    #[test]
    fn iso_agrees_with_brute_force() {
        let mut fx = fixture();
        let v = fx.add(NodeId(0), "R", &["A"]);
        let w = fx.add(NodeId(0), "R", &["A"]);
        for (p, role, l) in [(v, "R", "A"), (v, "S", "B"), (w, "S", "B"), (w, "R", "A")] {
            let c = fx.add(p, role, &[l]);
            fx.add(c, "R", &["B"]);
        }
        for n in 0..4 {
            for a in fx.forest.node_ids() {
                for b in fx.forest.node_ids() {
                    let fast = n_tree_iso(&fx.forest, a, b, n);
                    assert_eq!(fast.is_some(), brute_iso(&fx.forest, a, b, n), "{a} {b} {n}");
                    assert_eq!(fast.is_some(), n_tree_iso(&fx.forest, b, a, n).is_some());
                    if let Some(iso) = fast {
                        for (p, q) in &iso {
                            assert_eq!(fx.forest.label(*p), fx.forest.label(*q));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chain_blocking_at_depth_zero() {
        let mut fx = fixture();
        let a = NodeId(0);
        let x1 = fx.add(a, "R", &["A"]);
        let x2 = fx.add(x1, "R", &["A"]);
        let x3 = fx.add(x2, "R", &["B"]);
        let st = blocking_statuses(&fx.forest, 0);
        assert_eq!(st[a.index()], BlockingStatus::Unblocked);
        assert_eq!(st[x1.index()], BlockingStatus::Unblocked);
        match &st[x2.index()] {
            BlockingStatus::Direct { witness, witness_root, .. } => {
                assert_eq!(*witness, x1);
                assert_eq!(*witness_root, x1);
            }
            other => panic!("expected direct blocking, got {other:?}"),
        }
        assert_eq!(st[x3.index()], BlockingStatus::Indirect);
    }

    #[test]
    fn empty_arc_blocks_indirectly() {
        let mut fx = fixture();
        let x = fx.add(NodeId(0), "R", &["A"]);
        let y = fx.add(x, "R", &["B"]);
        fx.forest.clear_edge(NodeId(0), x);
        let st = blocking_statuses(&fx.forest, 1);
        assert!(st[x.index()].is_indirect());
        assert!(st[y.index()].is_indirect());
    }

    #[test]
    fn root_may_witness() {
        let mut fx = fixture();
        let a = NodeId(0);
        let label: Vec<&str> = ["A", "B"].to_vec();
        let x1 = fx.add(a, "R", &label);
        let x2 = fx.add(x1, "R", &label);
        let st = blocking_statuses(&fx.forest, 0);
        assert!(matches!(st[x1.index()], BlockingStatus::Direct { witness_root, .. } if witness_root == a));
        assert!(st[x2.index()].is_indirect());
    }

    #[test]
    fn deeper_blocking_uses_n_trees() {
        let mut fx = fixture();
        let a = NodeId(0);
        let x1 = fx.add(a, "R", &["B"]);
        let x2 = fx.add(x1, "R", &["A"]);
        let x3 = fx.add(x2, "R", &["B"]);
        let x4 = fx.add(x3, "R", &["A"]);
        let x5 = fx.add(x4, "R", &["B"]);
        let st = blocking_statuses(&fx.forest, 1);
        // The 1-tree of x3 ({x3, x4}) matches that of x1 ({x1, x2}) and x1 is
        // two arcs above x3, so x4 is a blocked leaf.
        for x in [x1, x2, x3] {
            assert_eq!(st[x.index()], BlockingStatus::Unblocked, "{x}");
        }
        match &st[x4.index()] {
            BlockingStatus::Direct { witness, tree_root, witness_root, iso } => {
                assert_eq!((*witness, *tree_root, *witness_root), (x2, x3, x1));
                assert_eq!(iso, &[(x3, x1), (x4, x2)]);
                assert!(fx.forest.is_ancestor(*witness_root, *tree_root));
            }
            other => panic!("expected direct blocking, got {other:?}"),
        }
        assert!(st[x5.index()].is_indirect());
    }

    #[test]
    fn roots_are_never_blocked() {
        let fx = fixture();
        for n in 0..3 {
            assert_eq!(blocking_status(&fx.forest, NodeId(0), n), BlockingStatus::Unblocked);
        }
    }
}
