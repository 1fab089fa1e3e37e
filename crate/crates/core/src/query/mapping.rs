use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{Query, QueryAtom, QueryError, Term};
use crate::forest::{r_connected, reachable, s_neighbours, CompletionForest, NodeId};
use crate::role::Role;
use crate::vocab::{RoleId, Vocabulary};

/// Variable name to node.
pub type Mapping = BTreeMap<String, NodeId>;

/// Searches for a mapping of `q` into `f`: concept atoms need the concept
/// in the node label, role atoms need [`r_connected`] nodes, constants map
/// to their (merge-resolved) roots. Nodes cut off by a merge are never
/// used.
pub fn maps_into(f: &CompletionForest, vocab: &Vocabulary, q: &Query) -> Result<Option<Mapping>, QueryError> {
    let mut consts = BTreeMap::new();
    for c in q.constants() {
        let x = f.root_of(c).ok_or_else(|| QueryError::UnknownConstant(c.into()))?;
        consts.insert(c, x);
    }
    let candidates: Vec<NodeId> = f.alive().filter(|x| !f.is_pruned(*x)).collect();
    let vars: Vec<&str> = q.variables().into_iter().collect();
    let var_index = |v: &str| vars.binary_search(&v).expect("query variable");

    // Unary filtering.
    let mut domains: Vec<BTreeSet<NodeId>> = alloc::vec![candidates.iter().copied().collect(); vars.len()];
    let mut edges: Vec<(RoleId, Slot, Slot)> = Vec::new();
    for atom in q.atoms() {
        match atom {
            QueryAtom::Concept { name, term } => {
                let Some(id) = vocab.atom_id(name) else { return Ok(None) };
                match term {
                    Term::Const(c) => {
                        if !f.has(consts[c.as_str()], id) {
                            return Ok(None);
                        }
                    }
                    Term::Var(v) => domains[var_index(v)].retain(|x| f.has(*x, id)),
                }
            }
            QueryAtom::Role { name, from, to } => {
                let Some(r) = vocab.role_id(&Role::new(name.as_str())) else { return Ok(None) };
                let slot = |t: &Term| match t {
                    Term::Const(c) => Slot::Node(consts[c.as_str()]),
                    Term::Var(v) => Slot::Var(var_index(v)),
                };
                edges.push((r, slot(from), slot(to)));
            }
        }
    }

    let mut rel = Relations { f, vocab, cache: BTreeMap::new() };
    // Atoms over constants only.
    for &(r, a, b) in &edges {
        if let (Slot::Node(x), Slot::Node(y)) = (a, b) {
            if !rel.succ(r, x).contains(&y) {
                return Ok(None);
            }
        }
    }
    let mut assignment: Vec<Option<NodeId>> = alloc::vec![None; vars.len()];
    if !search(&mut rel, &edges, &mut domains, &mut assignment) {
        return Ok(None);
    }
    Ok(Some(
        vars.iter()
            .zip(assignment)
            .map(|(v, x)| (String::from(*v), x.expect("every variable assigned")))
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Node(NodeId),
    Var(usize),
}

struct Relations<'a> {
    f: &'a CompletionForest,
    vocab: &'a Vocabulary,
    cache: BTreeMap<(RoleId, NodeId), BTreeSet<NodeId>>,
}

impl Relations<'_> {
    /// All `y` with `r_connected(x, y, r)`.
    fn succ(&mut self, r: RoleId, x: NodeId) -> &BTreeSet<NodeId> {
        let (f, vocab) = (self.f, self.vocab);
        self.cache.entry((r, x)).or_insert_with(|| {
            let mut out = s_neighbours(f, vocab, x, r);
            for &s in vocab.transitive_below(r) {
                out.extend(reachable(f, vocab, x, s));
            }
            out.retain(|y| !f.is_pruned(*y));
            debug_assert!(out.iter().all(|y| r_connected(f, vocab, x, *y, r)));
            out
        })
    }

    fn holds(&mut self, r: RoleId, x: NodeId, y: NodeId) -> bool {
        self.succ(r, x).contains(&y)
    }
}

fn search(
    rel: &mut Relations<'_>,
    edges: &[(RoleId, Slot, Slot)],
    domains: &mut Vec<BTreeSet<NodeId>>,
    assignment: &mut Vec<Option<NodeId>>,
) -> bool {
    // Most constrained unassigned variable.
    let Some(v) = (0..assignment.len()).filter(|&i| assignment[i].is_none()).min_by_key(|&i| domains[i].len()) else {
        return true;
    };
    let value = |s: Slot, asg: &[Option<NodeId>]| match s {
        Slot::Node(x) => Some(x),
        Slot::Var(i) => asg[i],
    };
    let options: Vec<NodeId> = domains[v].iter().copied().collect();
    'candidate: for x in options {
        assignment[v] = Some(x);
        // Atoms whose ends are now both fixed.
        for &(r, a, b) in edges {
            let touches = matches!(a, Slot::Var(i) if i == v) || matches!(b, Slot::Var(i) if i == v);
            if !touches {
                continue;
            }
            if let (Some(p), Some(q)) = (value(a, assignment), value(b, assignment)) {
                if !rel.holds(r, p, q) {
                    continue 'candidate;
                }
            }
        }
        // Forward checking on neighbours of v.
        let saved = domains.clone();
        let mut wiped = false;
        for &(r, a, b) in edges {
            match (a, b) {
                (Slot::Var(i), Slot::Var(j)) if i == v && assignment[j].is_none() => {
                    let succ = rel.succ(r, x).clone();
                    domains[j].retain(|y| succ.contains(y));
                    wiped |= domains[j].is_empty();
                }
                (Slot::Var(i), Slot::Var(j)) if j == v && assignment[i].is_none() => {
                    let keep: BTreeSet<NodeId> =
                        domains[i].iter().copied().filter(|&y| rel.holds(r, y, x)).collect();
                    domains[i] = keep;
                    wiped |= domains[i].is_empty();
                }
                _ => {}
            }
        }
        if !wiped && search(rel, edges, domains, assignment) {
            return true;
        }
        *domains = saved;
    }
    assignment[v] = None;
    false
}
