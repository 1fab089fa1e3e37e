//! Seeded generators and brute-force helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shiq_core::forest::r_connected;
use shiq_core::oracle::MAX_DOMAIN;
use shiq_core::{
    for_each_interpretation, is_model_forest, Concept, ConceptExpr, CompletionForest, Interpretation, KbBuilder,
    KnowledgeBase, NodeId, Query, QueryAtom, Reasoner, Role, RoleBox, Signature, Term, Vocabulary,
};

pub use rand::SeedableRng;
pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct Shape<'a> {
    pub atoms: &'a [&'a str],
    pub roles: &'a [&'a str],
    pub max_number: u32,
}

fn role(rng: &mut Rng64, names: &[&str]) -> Role {
    let name = *names.choose(rng).expect("roles");
    if rng.gen_bool(0.3) {
        Role::inv(name)
    } else {
        Role::new(name)
    }
}

/// A random expression with constructor nesting at most `depth`.
pub fn concept_expr(rng: &mut Rng64, shape: &Shape<'_>, depth: u32) -> ConceptExpr {
    if depth == 0 || rng.gen_bool(0.25) {
        let a = ConceptExpr::atom(*shape.atoms.choose(rng).expect("atoms"));
        return if rng.gen_bool(0.3) { ConceptExpr::not(a) } else { a };
    }
    let sub = |rng: &mut Rng64| Box::new(concept_expr(rng, shape, depth - 1));
    match rng.gen_range(0..7) {
        0 => ConceptExpr::Not(sub(rng)),
        1 => ConceptExpr::And(sub(rng), sub(rng)),
        2 => ConceptExpr::Or(sub(rng), sub(rng)),
        3 => ConceptExpr::Forall(role(rng, shape.roles), sub(rng)),
        4 => ConceptExpr::Exists(role(rng, shape.roles), sub(rng)),
        5 => ConceptExpr::AtLeast(rng.gen_range(0..=shape.max_number), role(rng, shape.roles), sub(rng)),
        _ => ConceptExpr::AtMost(rng.gen_range(0..=shape.max_number), role(rng, shape.roles), sub(rng)),
    }
}

pub fn concept(rng: &mut Rng64, shape: &Shape<'_>, depth: u32) -> Concept {
    shiq_core::nnf(&concept_expr(rng, shape, depth))
}

pub struct KbShape<'a> {
    pub concepts: Shape<'a>,
    pub individuals: &'a [&'a str],
    pub max_assertions: usize,
    pub max_gcis: usize,
    pub concept_depth: u32,
    pub transitive: bool,
    /// Adds `roles[1] ⊑ roles[0]`.
    pub sub_role: bool,
}

/// A random valid knowledge base. Every atom is distinguished so that any
/// concept atom may appear in a query.
pub fn kb(rng: &mut Rng64, shape: &KbShape<'_>) -> KnowledgeBase {
    loop {
        let mut b = KbBuilder::new();
        for a in shape.concepts.atoms {
            b = b.distinguished(a);
        }
        if shape.transitive && rng.gen_bool(0.5) {
            b = b.transitive(shape.concepts.roles[0]);
        }
        if shape.sub_role && shape.concepts.roles.len() > 1 {
            let r = shape.concepts.roles;
            b = b.role_inclusion(Role::new(r[1]), Role::new(r[0]));
        }
        let n_assert = rng.gen_range(1..=shape.max_assertions);
        for _ in 0..n_assert {
            let a = *shape.individuals.choose(rng).expect("individuals");
            b = match rng.gen_range(0..5) {
                0..=2 => b.assert_concept(concept(rng, &shape.concepts, shape.concept_depth), a),
                3 => {
                    let c = *shape.individuals.choose(rng).expect("individuals");
                    b.assert_role(role(rng, shape.concepts.roles), a, c)
                }
                _ => {
                    let c = *shape.individuals.choose(rng).expect("individuals");
                    if a == c {
                        b
                    } else {
                        b.assert_distinct(a, c)
                    }
                }
            };
        }
        for _ in 0..rng.gen_range(0..=shape.max_gcis) {
            let sub = concept(rng, &shape.concepts, 1);
            let sup = concept(rng, &shape.concepts, shape.concept_depth);
            b = b.axiom(sub, sup);
        }
        if let Ok(kb) = b.build() {
            return kb;
        }
    }
}

/// A random connected query over `kb`'s names with at most `max_vars`
/// variables. Constants are drawn from the individuals.
pub fn query(rng: &mut Rng64, kb: &KnowledgeBase, max_vars: usize, max_atoms: usize) -> Query {
    let concepts: Vec<String> = kb.distinguished().map(String::from).collect();
    let roles: Vec<String> = kb.role_names().into_iter().collect();
    let inds: Vec<&str> = kb.individuals().iter().map(String::as_str).collect();
    let vars = ["x", "y", "z", "w"];
    let n_vars = rng.gen_range(0..=max_vars.min(vars.len()));
    let term = |rng: &mut Rng64| {
        if n_vars > 0 && rng.gen_bool(0.75) {
            Term::var(vars[rng.gen_range(0..n_vars)])
        } else {
            Term::constant(*inds.choose(rng).expect("individuals"))
        }
    };
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=max_atoms) {
        if !roles.is_empty() && (concepts.is_empty() || rng.gen_bool(0.5)) {
            let name = roles.choose(rng).expect("roles").clone();
            atoms.push(QueryAtom::role(name, term(rng), term(rng)));
        } else if let Some(name) = concepts.choose(rng) {
            atoms.push(QueryAtom::concept(name.clone(), term(rng)));
        }
    }
    if atoms.is_empty() {
        atoms.push(QueryAtom::concept("A", term(rng)));
    }
    Query::new(atoms).expect("non-empty")
}

/// Nodes a query may be mapped to.
pub fn mappable(f: &CompletionForest) -> Vec<NodeId> {
    f.alive().filter(|&x| !f.is_pruned(x)).collect()
}

/// Calls `visit` with every map from `vars` to `domain`.
pub fn for_each_assignment<T: Copy>(vars: usize, domain: &[T], mut visit: impl FnMut(&[T]) -> ControlFlow<()>) {
    if vars == 0 {
        let _ = visit(&[]);
        return;
    }
    if domain.is_empty() {
        return;
    }
    let mut idx = vec![0usize; vars];
    loop {
        let asg: Vec<T> = idx.iter().map(|&i| domain[i]).collect();
        if visit(&asg).is_break() {
            return;
        }
        let mut k = 0;
        loop {
            if k == vars {
                return;
            }
            idx[k] += 1;
            if idx[k] < domain.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Every interpretation of `sig` over at most `max_domain` elements whose
/// role extensions satisfy the role box of `kb`.
pub fn for_each_rbox_interpretation(
    kb: &KnowledgeBase,
    sig: &Signature,
    max_domain: usize,
    mut visit: impl FnMut(&Interpretation) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let rbox: RoleBox = kb.rbox().clone();
    for size in 1..=max_domain.min(MAX_DOMAIN) {
        for_each_interpretation(sig, size, Some(&rbox), |i| visit(i))?;
    }
    ControlFlow::Continue(())
}

/// A node map under which `i` models `f`, if one exists. Roots are fixed by
/// the individuals; tree nodes range over the domain.
pub fn forest_node_map(
    i: &Interpretation,
    f: &CompletionForest,
    vocab: &Vocabulary,
    kb: &KnowledgeBase,
) -> Option<BTreeMap<NodeId, usize>> {
    let mut base = BTreeMap::new();
    for a in kb.individuals() {
        base.insert(f.root_of(a).expect("root"), i.individual(a).expect("individual"));
    }
    let free: Vec<NodeId> = mappable(f).into_iter().filter(|x| !base.contains_key(x)).collect();
    let domain: Vec<usize> = (0..i.size()).collect();
    let mut found = None;
    for_each_assignment(free.len(), &domain, |asg| {
        let mut map = base.clone();
        map.extend(free.iter().copied().zip(asg.iter().copied()));
        if is_model_forest(i, f, vocab, kb, &map) {
            found = Some(map);
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    found
}

/// Whether `y` is reachable from `x` along `r`-labelled structure, computed
/// from first principles: a neighbour through a sub-role, or a chain of
/// neighbours through a transitive sub-role.
pub fn brute_connected(f: &CompletionForest, vocab: &Vocabulary, x: NodeId, y: NodeId, r: shiq_core::RoleId) -> bool {
    let neighbour = |a: NodeId, b: NodeId, s: shiq_core::RoleId| {
        f.edge(a, b).is_some_and(|l| l.iter().any(|&t| vocab.subrole(t, s)))
            || f.edge(b, a).is_some_and(|l| l.iter().any(|&t| vocab.subrole(t, s.inverse())))
    };
    let nodes = mappable(f);
    for s in vocab.roles() {
        if !vocab.subrole(s, r) {
            continue;
        }
        if neighbour(x, y, s) {
            return true;
        }
        if !vocab.is_transitive(s) {
            continue;
        }
        let mut seen = BTreeSet::from([x]);
        let mut frontier = vec![x];
        while let Some(a) = frontier.pop() {
            for &b in &nodes {
                if neighbour(a, b, s) {
                    if b == y {
                        return true;
                    }
                    if seen.insert(b) {
                        frontier.push(b);
                    }
                }
            }
        }
    }
    false
}

/// Whether some assignment of query variables to mappable nodes satisfies
/// every atom, by exhaustive enumeration.
pub fn brute_maps(f: &CompletionForest, vocab: &Vocabulary, q: &Query) -> bool {
    let vars: Vec<&str> = q.variables().into_iter().collect();
    let nodes = mappable(f);
    let mut found = false;
    for_each_assignment(vars.len(), &nodes, |asg| {
        let value = |t: &Term| match t {
            Term::Var(v) => asg[vars.iter().position(|w| w == v).expect("variable")],
            Term::Const(c) => f.resolve(f.root_of(c).expect("constant")),
        };
        let ok = q.atoms().iter().all(|atom| match atom {
            QueryAtom::Concept { name, term } => vocab.atom_id(name).is_some_and(|c| f.has(value(term), c)),
            QueryAtom::Role { name, from, to } => vocab
                .role_id(&Role::new(name.as_str()))
                .is_some_and(|r| brute_connected(f, vocab, value(from), value(to), r)),
        });
        if ok {
            found = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    found
}

/// Checks that `m` is a valid match of `q` in `f` using [`r_connected`].
pub fn mapping_is_valid(f: &CompletionForest, vocab: &Vocabulary, q: &Query, m: &BTreeMap<String, NodeId>) -> bool {
    let value = |t: &Term| match t {
        Term::Var(v) => m.get(v).copied(),
        Term::Const(c) => f.root_of(c).map(|x| f.resolve(x)),
    };
    q.atoms().iter().all(|atom| match atom {
        QueryAtom::Concept { name, term } => {
            matches!((vocab.atom_id(name), value(term)), (Some(c), Some(x)) if f.has(x, c))
        }
        QueryAtom::Role { name, from, to } => match (vocab.role_id(&Role::new(name.as_str())), value(from), value(to)) {
            (Some(r), Some(x), Some(y)) => r_connected(f, vocab, x, y, r),
            _ => false,
        },
    })
}

/// Forests met while expanding `kb` at depth `n`: intermediate forests along
/// every branch and the leaves, up to `limit` forests with at most
/// `max_nodes` nodes each.
pub fn forest_corpus(kb: &KnowledgeBase, n: u64, max_nodes: usize, limit: usize) -> Vec<CompletionForest> {
    let reasoner = Reasoner::new(kb);
    let priority = shiq_core::RulePriority::default();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![reasoner.init_forest()];
    while let Some(f) = stack.pop() {
        if out.len() >= limit || f.node_count() > max_nodes {
            continue;
        }
        if !seen.insert(reasoner.dump(&f, None)) {
            continue;
        }
        let inst = reasoner.applicable_rule_instances(&f, n, &priority);
        if let Some(first) = inst.first() {
            if shiq_core::forest::has_clash(&f, reasoner.vocab()).is_none() {
                for g in reasoner.apply_rule(&f, first, n).expect("fresh instance").into_iter().rev() {
                    stack.push(g);
                }
            }
        }
        out.push(f);
    }
    out
}
