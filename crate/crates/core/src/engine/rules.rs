//! Guards and actions of the nine expansion rules.

use alloc::vec::Vec;

use super::{ExpandError, RuleInstance, RuleKind, RulePriority};
use crate::forest::{blocking_statuses, distinct_subset, s_neighbours, BlockingStatus, CompletionForest, NodeId};
use crate::vocab::{ConceptId, Shape, Vocabulary};

/// Every applicable instance, in priority order.
pub fn applicable_rule_instances(
    f: &CompletionForest,
    vocab: &Vocabulary,
    n: u64,
    priority: &RulePriority,
) -> Vec<RuleInstance> {
    let statuses = blocking_statuses(f, n);
    let mut out = Vec::new();
    for tier in priority.tiers() {
        out.extend(tier_instances(f, vocab, &statuses, tier));
    }
    out
}

/// The first instance in priority order, if any.
pub(crate) fn first_instance(
    f: &CompletionForest,
    vocab: &Vocabulary,
    statuses: &[BlockingStatus],
    priority: &RulePriority,
) -> Option<RuleInstance> {
    priority
        .tiers()
        .iter()
        .find_map(|tier| tier_instances(f, vocab, statuses, tier).into_iter().next())
}

fn tier_instances(
    f: &CompletionForest,
    vocab: &Vocabulary,
    statuses: &[BlockingStatus],
    tier: &[RuleKind],
) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    for x in f.alive() {
        for &c in f.label(x) {
            instances_at(f, vocab, &statuses[x.index()], x, c, tier, &mut out);
        }
    }
    // Alive nodes and label members are already visited in order; the sort
    // only interleaves kinds of the same tier.
    let rank = |k: RuleKind| tier.iter().position(|t| *t == k).unwrap_or(usize::MAX);
    out.sort_by(|a, b| {
        (a.node, a.concept, rank(a.kind), a.target, a.via).cmp(&(b.node, b.concept, rank(b.kind), b.target, b.via))
    });
    out
}

fn instance(kind: RuleKind, node: NodeId, concept: ConceptId) -> RuleInstance {
    RuleInstance { kind, node, concept, target: None, via: None, merges: Vec::new() }
}

fn instances_at(
    f: &CompletionForest,
    vocab: &Vocabulary,
    status: &BlockingStatus,
    x: NodeId,
    c: ConceptId,
    kinds: &[RuleKind],
    out: &mut Vec<RuleInstance>,
) {
    let wants = |k: RuleKind| kinds.contains(&k);
    let indirect = status.is_indirect();
    let blocked = status.is_blocked();
    match vocab.shape(c) {
        Shape::And(a, b) if wants(RuleKind::And) && !indirect => {
            if !(f.has(x, a) && f.has(x, b)) {
                out.push(instance(RuleKind::And, x, c));
            }
        }
        Shape::Or(a, b) if wants(RuleKind::Or) && !indirect => {
            if !f.has(x, a) && !f.has(x, b) {
                out.push(instance(RuleKind::Or, x, c));
            }
        }
        Shape::Exists(s, body) if wants(RuleKind::Exists) && !blocked => {
            if !s_neighbours(f, vocab, x, s).iter().any(|y| f.has(*y, body)) {
                out.push(instance(RuleKind::Exists, x, c));
            }
        }
        Shape::Forall(s, body) if !indirect => {
            if wants(RuleKind::Forall) {
                for y in s_neighbours(f, vocab, x, s) {
                    if !f.has(y, body) {
                        out.push(RuleInstance { target: Some(y), ..instance(RuleKind::Forall, x, c) });
                    }
                }
            }
            if wants(RuleKind::ForallPlus) {
                for &r in vocab.transitive_below(s) {
                    let Some(prop) = vocab.forall_id(r, body) else { continue };
                    for y in s_neighbours(f, vocab, x, r) {
                        if !f.has(y, prop) {
                            out.push(RuleInstance {
                                target: Some(y),
                                via: Some(r),
                                ..instance(RuleKind::ForallPlus, x, c)
                            });
                        }
                    }
                }
            }
        }
        Shape::AtLeast(k, s, body) => {
            if wants(RuleKind::Choose) && !indirect {
                push_choose(f, vocab, x, c, s, body, out);
            }
            if wants(RuleKind::AtLeast) && !blocked {
                let cands: Vec<NodeId> = s_neighbours(f, vocab, x, s).into_iter().filter(|y| f.has(*y, body)).collect();
                if distinct_subset(f, &cands, k as usize).is_none() {
                    out.push(instance(RuleKind::AtLeast, x, c));
                }
            }
        }
        Shape::AtMost(k, s, body) => {
            if wants(RuleKind::Choose) && !indirect {
                push_choose(f, vocab, x, c, s, body, out);
            }
            if !wants(RuleKind::AtMost) && !wants(RuleKind::AtMostRoot) {
                return;
            }
            let cands: Vec<NodeId> = s_neighbours(f, vocab, x, s).into_iter().filter(|y| f.has(*y, body)).collect();
            if cands.len() <= k as usize {
                return;
            }
            let (mut tree, mut root) = (Vec::new(), Vec::new());
            for (i, &y) in cands.iter().enumerate() {
                for &z in &cands[i + 1..] {
                    if f.are_distinct(y, z) {
                        continue;
                    }
                    match (f.is_root(y), f.is_root(z)) {
                        (true, true) => root.push((z, y)),
                        (false, true) => tree.push((y, z)),
                        (true, false) => tree.push((z, y)),
                        // y < z, so z is never an ancestor of y.
                        (false, false) => tree.push((z, y)),
                    }
                }
            }
            if wants(RuleKind::AtMost) && !indirect && !tree.is_empty() {
                out.push(RuleInstance { merges: tree, ..instance(RuleKind::AtMost, x, c) });
            }
            if wants(RuleKind::AtMostRoot) && !root.is_empty() {
                out.push(RuleInstance { merges: root, ..instance(RuleKind::AtMostRoot, x, c) });
            }
        }
        _ => {}
    }
}

fn push_choose(
    f: &CompletionForest,
    vocab: &Vocabulary,
    x: NodeId,
    c: ConceptId,
    s: crate::vocab::RoleId,
    body: ConceptId,
    out: &mut Vec<RuleInstance>,
) {
    let neg = vocab.negation(body);
    for y in s_neighbours(f, vocab, x, s) {
        if !f.has(y, body) && !f.has(y, neg) {
            out.push(RuleInstance { target: Some(y), ..instance(RuleKind::Choose, x, c) });
        }
    }
}

/// Applies `inst` after checking that it is still applicable under
/// `n`-blocking.
pub fn apply_rule(
    f: &CompletionForest,
    vocab: &Vocabulary,
    inst: &RuleInstance,
    n: u64,
) -> Result<Vec<CompletionForest>, ExpandError> {
    let statuses = blocking_statuses(f, n);
    let mut current = Vec::new();
    if f.node_ids().any(|x| x == inst.node) && f.is_alive(inst.node) {
        instances_at(f, vocab, &statuses[inst.node.index()], inst.node, inst.concept, &[inst.kind], &mut current);
    }
    if !current.contains(inst) {
        return Err(ExpandError::StaleInstance);
    }
    Ok(apply_unchecked(f, vocab, inst))
}

pub(crate) fn apply_unchecked(f: &CompletionForest, vocab: &Vocabulary, inst: &RuleInstance) -> Vec<CompletionForest> {
    let x = inst.node;
    let with = |g: &dyn Fn(&mut CompletionForest)| {
        let mut h = f.clone();
        g(&mut h);
        h
    };
    match (inst.kind, vocab.shape(inst.concept)) {
        (RuleKind::And, Shape::And(a, b)) => alloc::vec![with(&|h| {
            h.add_label(x, a);
            h.add_label(x, b);
        })],
        (RuleKind::Or, Shape::Or(a, b)) => {
            alloc::vec![with(&|h| { h.add_label(x, a); }), with(&|h| { h.add_label(x, b); })]
        }
        (RuleKind::Exists, Shape::Exists(s, body)) => alloc::vec![with(&|h| {
            let label = core::iter::once(body).chain(vocab.globals().iter().copied());
            h.add_tree_node(x, s, label);
        })],
        (RuleKind::Forall, Shape::Forall(_, body)) => {
            let y = inst.target.expect("forall instance has a target");
            alloc::vec![with(&|h| { h.add_label(y, body); })]
        }
        (RuleKind::ForallPlus, Shape::Forall(_, body)) => {
            let y = inst.target.expect("forall-plus instance has a target");
            let r = inst.via.expect("forall-plus instance has a transitive role");
            let prop = vocab.forall_id(r, body).expect("propagated universal is in the closure");
            alloc::vec![with(&|h| { h.add_label(y, prop); })]
        }
        (RuleKind::Choose, Shape::AtLeast(_, _, body) | Shape::AtMost(_, _, body)) => {
            let y = inst.target.expect("choose instance has a target");
            let neg = vocab.negation(body);
            alloc::vec![with(&|h| { h.add_label(y, body); }), with(&|h| { h.add_label(y, neg); })]
        }
        (RuleKind::AtLeast, Shape::AtLeast(k, s, body)) => alloc::vec![with(&|h| {
            let mut fresh = Vec::with_capacity(k as usize);
            for _ in 0..k {
                let label = core::iter::once(body).chain(vocab.globals().iter().copied());
                fresh.push(h.add_tree_node(x, s, label));
            }
            for (i, &a) in fresh.iter().enumerate() {
                for &b in &fresh[i + 1..] {
                    h.set_distinct(a, b);
                }
            }
        })],
        (RuleKind::AtMost, Shape::AtMost(..)) => {
            inst.merges.iter().map(|&(y, z)| with(&|h| merge_tree(h, x, y, z))).collect()
        }
        (RuleKind::AtMostRoot, Shape::AtMost(..)) => {
            inst.merges.iter().map(|&(y, z)| with(&|h| h.merge_root(y, z))).collect()
        }
        (kind, _) => unreachable!("{kind} instance on a concept of the wrong shape"),
    }
}

/// Merges the non-root successor `y` of `x` into the neighbour `z`. The arc
/// to `y` is emptied, which cuts `y` and its subtree off from the forest.
fn merge_tree(f: &mut CompletionForest, x: NodeId, y: NodeId, z: NodeId) {
    let label: Vec<ConceptId> = f.label(y).iter().copied().collect();
    for c in label {
        f.add_label(z, c);
    }
    let roles = f.clear_edge(x, y);
    if f.is_ancestor(z, x) {
        f.add_roles(z, x, roles.into_iter().map(|r| r.inverse()));
    } else {
        f.add_roles(x, z, roles);
    }
    f.copy_distinctions(y, z);
}
