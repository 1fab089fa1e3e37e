//! Finite interpretations and brute-force semantics.
//!
//! Everything here is computed directly from the set-theoretic definitions
//! and shares no code with the tableau engine, so it can serve as an
//! independent reference in tests.

mod search;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use fixedbitset::FixedBitSet;

pub use search::{countermodel_search, for_each_interpretation, Signature, MAX_DOMAIN};

use crate::concept::{Concept, BOTTOM_NAME};
use crate::forest::{CompletionForest, NodeId};
use crate::kb::{Assertion, KnowledgeBase};
use crate::query::{Query, QueryAtom, Term};
use crate::role::{Role, RoleBox};
use crate::vocab::{Shape, Vocabulary};

/// A set of domain elements.
pub type ElementSet = FixedBitSet;

/// A finite interpretation over the domain `{0, …, size - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    size: usize,
    concepts: BTreeMap<String, ElementSet>,
    /// `roles[R][x]` is the set of `y` with `(x, y) ∈ R`.
    roles: BTreeMap<String, Vec<ElementSet>>,
    individuals: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    UnknownConcept(String),
    UnknownRole(String),
    UnknownConstant(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::UnknownConcept(n) => write!(f, "concept {n} is not interpreted"),
            OracleError::UnknownRole(n) => write!(f, "role {n} is not interpreted"),
            OracleError::UnknownConstant(n) => write!(f, "individual {n} is not interpreted"),
        }
    }
}

impl core::error::Error for OracleError {}

impl Interpretation {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "domains are non-empty");
        Interpretation { size, concepts: BTreeMap::new(), roles: BTreeMap::new(), individuals: BTreeMap::new() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn empty_set(&self) -> ElementSet {
        FixedBitSet::with_capacity(self.size)
    }

    pub fn full_set(&self) -> ElementSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    /// Declares `name` with an empty extension if it is not interpreted yet.
    pub fn declare_concept(&mut self, name: &str) {
        let empty = self.empty_set();
        self.concepts.entry(name.into()).or_insert(empty);
    }

    pub fn declare_role(&mut self, name: &str) {
        let rows = alloc::vec![self.empty_set(); self.size];
        self.roles.entry(name.into()).or_insert(rows);
    }

    pub fn add_to_concept(&mut self, name: &str, x: usize) {
        self.declare_concept(name);
        self.concepts.get_mut(name).expect("declared").insert(x);
    }

    pub fn add_pair(&mut self, name: &str, x: usize, y: usize) {
        self.declare_role(name);
        self.roles.get_mut(name).expect("declared")[x].insert(y);
    }

    pub fn set_individual(&mut self, name: &str, x: usize) {
        assert!(x < self.size);
        self.individuals.insert(name.into(), x);
    }

    pub fn concept(&self, name: &str) -> Option<&ElementSet> {
        self.concepts.get(name)
    }

    pub fn concepts(&self) -> impl Iterator<Item = (&str, &ElementSet)> {
        self.concepts.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn role_names(&self) -> impl Iterator<Item = &str> {
        self.roles.keys().map(String::as_str)
    }

    pub fn individual(&self, name: &str) -> Option<usize> {
        self.individuals.get(name).copied()
    }

    pub fn individuals(&self) -> impl Iterator<Item = (&str, usize)> {
        self.individuals.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Whether `(x, y)` is in the extension of `r` (pairs swapped for an
    /// inverse role). Uninterpreted roles are empty.
    pub fn has_pair(&self, r: &Role, x: usize, y: usize) -> bool {
        let (x, y) = if r.inverted { (y, x) } else { (x, y) };
        self.roles.get(&r.name).is_some_and(|rows| rows[x].contains(y))
    }

    /// Pairs of `r`, inverse roles swapped.
    pub fn pairs(&self, r: &Role) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        if let Some(rows) = self.roles.get(&r.name) {
            for (x, row) in rows.iter().enumerate() {
                for y in row.ones() {
                    out.push(if r.inverted { (y, x) } else { (x, y) });
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `{y | (x, y) ∈ r}`.
    pub fn successors(&self, r: &Role, x: usize) -> ElementSet {
        let mut out = self.empty_set();
        if let Some(rows) = self.roles.get(&r.name) {
            if r.inverted {
                for (y, row) in rows.iter().enumerate() {
                    if row.contains(x) {
                        out.insert(y);
                    }
                }
            } else {
                out.union_with(&rows[x]);
            }
        }
        out
    }

    /// Closes role extensions under transitivity of transitive roles and
    /// the inclusions of `rbox`, to a fixpoint.
    pub fn close_roles(&mut self, rbox: &RoleBox) {
        for name in rbox.role_names() {
            self.declare_role(&name);
        }
        loop {
            let mut changed = false;
            for name in rbox.transitive() {
                let rows = self.roles.get_mut(name).expect("declared");
                changed |= transitive_closure(rows);
            }
            for (sub, sup) in rbox.inclusions() {
                for (x, y) in self.pairs(sub) {
                    let (x, y) = if sup.inverted { (y, x) } else { (x, y) };
                    let row = &mut self.roles.get_mut(&sup.name).expect("declared")[x];
                    if !row.contains(y) {
                        row.insert(y);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Whether role extensions already satisfy `rbox`.
    pub fn roles_closed(&self, rbox: &RoleBox) -> bool {
        let mut copy = self.clone();
        copy.close_roles(rbox);
        copy.roles.iter().all(|(name, rows)| match self.roles.get(name) {
            Some(mine) => mine == rows,
            None => rows.iter().all(|r| r.is_clear()),
        })
    }
}

/// Warshall's algorithm on successor rows. Returns whether anything changed.
fn transitive_closure(rows: &mut [ElementSet]) -> bool {
    let mut changed = false;
    for k in 0..rows.len() {
        let via = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) && !via.is_subset(row) {
                row.union_with(&via);
                changed = true;
            }
        }
    }
    changed
}

impl fmt::Display for Interpretation {
    /// Deterministic listing: domain, concept and role extensions, then the
    /// individual map.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain size={}", self.size)?;
        for (name, ext) in &self.concepts {
            write!(f, "concept {name} {{")?;
            for (i, x) in ext.ones().enumerate() {
                write!(f, "{}{x}", if i > 0 { ", " } else { "" })?;
            }
            writeln!(f, "}}")?;
        }
        for name in self.roles.keys() {
            write!(f, "role {name} {{")?;
            for (i, (x, y)) in self.pairs(&Role::new(name.as_str())).into_iter().enumerate() {
                write!(f, "{}({x}, {y})", if i > 0 { ", " } else { "" })?;
            }
            writeln!(f, "}}")?;
        }
        for (name, x) in &self.individuals {
            writeln!(f, "individual {name} {x}")?;
        }
        Ok(())
    }
}

/// The extension of `c`. Names `i` does not interpret are errors, except
/// the reserved name behind ⊤ and ⊥, which is always empty.
pub fn eval_concept(i: &Interpretation, c: &Concept) -> Result<ElementSet, OracleError> {
    eval(i, c, false)
}

/// Like [`eval_concept`], with uninterpreted names read as empty.
pub fn eval_concept_lenient(i: &Interpretation, c: &Concept) -> ElementSet {
    eval(i, c, true).expect("lenient evaluation is total")
}

fn eval(i: &Interpretation, c: &Concept, lenient: bool) -> Result<ElementSet, OracleError> {
    let atom = |n: &str| -> Result<ElementSet, OracleError> {
        match i.concept(n) {
            Some(s) => Ok(s.clone()),
            None if lenient || n == BOTTOM_NAME => Ok(i.empty_set()),
            None => Err(OracleError::UnknownConcept(n.into())),
        }
    };
    let check_role = |r: &Role| -> Result<(), OracleError> {
        if lenient || i.roles.contains_key(&r.name) {
            Ok(())
        } else {
            Err(OracleError::UnknownRole(r.name.clone()))
        }
    };
    // Per element, the number of r-successors inside `body`.
    let counts = |r: &Role, body: &ElementSet| -> Vec<usize> {
        (0..i.size).map(|x| i.successors(r, x).intersection(body).count()).collect()
    };
    let select = |pred: &dyn Fn(usize) -> bool| -> ElementSet {
        let mut out = i.empty_set();
        for x in 0..i.size {
            if pred(x) {
                out.insert(x);
            }
        }
        out
    };
    Ok(match c {
        Concept::Atom(n) => atom(n)?,
        Concept::NotAtom(n) => {
            let mut s = atom(n)?;
            s.toggle_range(..);
            s
        }
        Concept::And(a, b) => {
            let mut s = eval(i, a, lenient)?;
            s.intersect_with(&eval(i, b, lenient)?);
            s
        }
        Concept::Or(a, b) => {
            let mut s = eval(i, a, lenient)?;
            s.union_with(&eval(i, b, lenient)?);
            s
        }
        Concept::Forall(r, body) => {
            check_role(r)?;
            let body = eval(i, body, lenient)?;
            select(&|x| i.successors(r, x).is_subset(&body))
        }
        Concept::Exists(r, body) => {
            check_role(r)?;
            let cs = counts(r, &eval(i, body, lenient)?);
            select(&|x| cs[x] >= 1)
        }
        Concept::AtLeast(n, r, body) => {
            check_role(r)?;
            let cs = counts(r, &eval(i, body, lenient)?);
            select(&|x| cs[x] >= *n as usize)
        }
        Concept::AtMost(n, r, body) => {
            check_role(r)?;
            let cs = counts(r, &eval(i, body, lenient)?);
            select(&|x| cs[x] <= *n as usize)
        }
    })
}

/// Whether `i` satisfies every assertion, role axiom and concept inclusion
/// of `kb`. Names `i` does not interpret are read as empty.
pub fn is_model_kb(i: &Interpretation, kb: &KnowledgeBase) -> bool {
    let ind = |a: &str| i.individual(a);
    for a in kb.abox() {
        let ok = match a {
            Assertion::Concept(c, x) => ind(x).is_some_and(|x| eval_concept_lenient(i, c).contains(x)),
            Assertion::Role(r, x, y) => match (ind(x), ind(y)) {
                (Some(x), Some(y)) => i.has_pair(r, x, y),
                _ => false,
            },
            Assertion::Distinct(x, y) => match (ind(x), ind(y)) {
                (Some(x), Some(y)) => x != y,
                _ => false,
            },
        };
        if !ok {
            return false;
        }
    }
    let rbox = kb.rbox();
    for (sub, sup) in rbox.inclusions() {
        if !i.pairs(sub).into_iter().all(|(x, y)| i.has_pair(sup, x, y)) {
            return false;
        }
    }
    for name in rbox.transitive() {
        let r = Role::new(name);
        let pairs = i.pairs(&r);
        for &(x, y) in &pairs {
            for &(y2, z) in &pairs {
                if y == y2 && !i.has_pair(&r, x, z) {
                    return false;
                }
            }
        }
    }
    kb.tbox().all(|g| eval_concept_lenient(i, &g.sub).is_subset(&eval_concept_lenient(i, &g.sup)))
}

/// Whether `i`, with forest nodes interpreted through `node_map`, is a model
/// of the forest `f`: a model of `kb` whose individuals sit on their roots,
/// with every label, edge and inequality of the mapped nodes respected.
/// Every alive node outside merge-pruned subtrees must be mapped.
pub fn is_model_forest(
    i: &Interpretation,
    f: &CompletionForest,
    vocab: &Vocabulary,
    kb: &KnowledgeBase,
    node_map: &BTreeMap<NodeId, usize>,
) -> bool {
    if !is_model_kb(i, kb) {
        return false;
    }
    for a in kb.individuals() {
        let root = f.root_of(a).expect("every individual has a root");
        if node_map.get(&root).copied() != i.individual(a) {
            return false;
        }
    }
    for x in f.alive() {
        let Some(&dx) = node_map.get(&x) else {
            if f.is_pruned(x) {
                continue;
            }
            return false;
        };
        for &c in f.label(x) {
            if !eval_concept_lenient(i, vocab.concept(c)).contains(dx) {
                return false;
            }
        }
    }
    for (x, y, roles) in f.edges() {
        let (Some(&dx), Some(&dy)) = (node_map.get(&x), node_map.get(&y)) else { continue };
        if !roles.iter().all(|r| i.has_pair(&vocab.role(*r), dx, dy)) {
            return false;
        }
    }
    f.neq_pairs().all(|(x, y)| match (node_map.get(&x), node_map.get(&y)) {
        (Some(dx), Some(dy)) => dx != dy,
        _ => true,
    })
}

/// Whether some assignment of the variables of `q` to domain elements,
/// with constants fixed by the individual map, satisfies every atom.
pub fn satisfies_query(i: &Interpretation, q: &Query) -> Result<bool, OracleError> {
    let vars: Vec<&str> = q.variables().into_iter().collect();
    let mut consts = BTreeMap::new();
    for c in q.constants() {
        let x = i.individual(c).ok_or_else(|| OracleError::UnknownConstant(c.into()))?;
        consts.insert(c, x);
    }
    let value = |t: &Term, asg: &[usize]| match t {
        Term::Const(c) => consts[c.as_str()],
        Term::Var(v) => asg[vars.binary_search(&v.as_str()).expect("query variable")],
    };
    let holds = |asg: &[usize]| {
        q.atoms().iter().all(|atom| match atom {
            QueryAtom::Concept { name, term } => i.concept(name).is_some_and(|s| s.contains(value(term, asg))),
            QueryAtom::Role { name, from, to } => {
                i.has_pair(&Role::new(name.as_str()), value(from, asg), value(to, asg))
            }
        })
    };
    // Odometer over size^|vars| assignments.
    let mut asg = alloc::vec![0usize; vars.len()];
    loop {
        if holds(&asg) {
            return Ok(true);
        }
        let mut k = 0;
        loop {
            if k == asg.len() {
                return Ok(false);
            }
            asg[k] += 1;
            if asg[k] < i.size {
                break;
            }
            asg[k] = 0;
            k += 1;
        }
    }
}

/// Reads an interpretation off `f`: one element per node in `nodes`, atomic
/// concepts from labels, role pairs from edges between mapped nodes, then
/// closed under `kb`'s role axioms. Individuals map to their roots.
pub(crate) fn interpretation_of_forest(
    f: &CompletionForest,
    vocab: &Vocabulary,
    kb: &KnowledgeBase,
    nodes: &[NodeId],
) -> (Interpretation, BTreeMap<NodeId, usize>) {
    let node_map: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut i = Interpretation::new(nodes.len().max(1));
    for name in kb.concept_names() {
        i.declare_concept(&name);
    }
    for name in kb.role_names() {
        i.declare_role(&name);
    }
    for (&x, &dx) in &node_map {
        for &c in f.label(x) {
            if let Shape::Atom(a) = vocab.shape(c) {
                let name = vocab.atom_name(a);
                if name != BOTTOM_NAME {
                    i.add_to_concept(name, dx);
                }
            }
        }
    }
    for (x, y, roles) in f.edges() {
        let (Some(&dx), Some(&dy)) = (node_map.get(&x), node_map.get(&y)) else { continue };
        for r in roles {
            let role = vocab.role(*r);
            let (a, b) = if role.inverted { (dy, dx) } else { (dx, dy) };
            i.add_pair(&role.name, a, b);
        }
    }
    i.close_roles(kb.rbox());
    for a in kb.individuals() {
        let root = f.root_of(a).expect("every individual has a root");
        i.set_individual(a, node_map[&root]);
    }
    (i, node_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::{negate_nnf, nnf, ConceptExpr};
    use crate::kb::KbBuilder;

    fn set(i: &Interpretation, xs: &[usize]) -> ElementSet {
        let mut s = i.empty_set();
        for &x in xs {
            s.insert(x);
        }
        s
    }

    fn two() -> Interpretation {
        let mut i = Interpretation::new(2);
        i.add_pair("R", 0, 1);
        i.add_to_concept("A", 1);
        i
    }

    #[test]
    fn existential_extension() {
        let i = two();
        let c = Concept::exists(Role::new("R"), Concept::atom("A"));
        assert_eq!(eval_concept(&i, &c).unwrap(), set(&i, &[0]));
        let inv = Concept::exists(Role::inv("R"), Concept::top());
        assert_eq!(eval_concept(&i, &inv).unwrap(), set(&i, &[1]));
    }

    #[test]
    fn negation_is_complement() {
        let i = two();
        assert_eq!(eval_concept(&i, &Concept::not_atom("A")).unwrap(), set(&i, &[0]));
    }

    #[test]
    fn at_most_counts_successors() {
        let mut i = Interpretation::new(2);
        i.add_pair("R", 0, 0);
        i.add_pair("R", 0, 1);
        i.add_to_concept("A", 0);
        i.add_to_concept("A", 1);
        let c = Concept::at_most(1, Role::new("R"), Concept::atom("A"));
        assert!(!eval_concept(&i, &c).unwrap().contains(0));
        assert!(eval_concept(&i, &c).unwrap().contains(1));
    }

    #[test]
    fn strict_and_lenient_names() {
        let i = two();
        assert_eq!(eval_concept(&i, &Concept::atom("Z")), Err(OracleError::UnknownConcept("Z".into())));
        assert!(eval_concept_lenient(&i, &Concept::atom("Z")).is_clear());
        assert_eq!(eval_concept(&i, &Concept::top()).unwrap(), i.full_set());
        assert!(eval_concept(&i, &Concept::bottom()).unwrap().is_clear());
    }

    #[test]
    fn dualities_agree_on_small_domain() {
        let mut i = Interpretation::new(3);
        i.add_pair("S", 0, 1);
        i.add_pair("S", 0, 2);
        i.add_pair("S", 1, 2);
        i.add_to_concept("A", 1);
        i.add_to_concept("A", 2);
        let le2 = ConceptExpr::AtMost(2, Role::new("S"), alloc::boxed::Box::new(ConceptExpr::atom("A")));
        let neg = nnf(&ConceptExpr::not(le2.clone()));
        assert_eq!(neg, Concept::at_least(3, Role::new("S"), Concept::atom("A")));
        let mut comp = eval_concept(&i, &nnf(&le2)).unwrap();
        comp.toggle_range(..);
        assert_eq!(eval_concept(&i, &neg).unwrap(), comp);
        let ge1 = Concept::at_least(1, Role::new("S"), Concept::atom("A"));
        assert_eq!(negate_nnf(&ge1), Concept::at_most(0, Role::new("S"), Concept::atom("A")));
    }

    #[test]
    fn close_roles_reaches_fixpoint() {
        let mut rbox = RoleBox::new();
        rbox.add_transitive("S");
        rbox.add_inclusion(Role::new("R"), Role::inv("S"));
        let mut i = Interpretation::new(3);
        i.add_pair("R", 1, 0);
        i.add_pair("R", 2, 1);
        assert!(!i.roles_closed(&rbox));
        i.close_roles(&rbox);
        assert!(i.roles_closed(&rbox));
        assert!(i.has_pair(&Role::new("S"), 0, 2));
    }

    #[test]
    fn model_checks() {
        let kb = KbBuilder::new()
            .assert_concept(Concept::atom("A"), "a")
            .axiom(Concept::atom("A"), Concept::or(Concept::atom("B"), Concept::atom("C")))
            .distinguished("B")
            .build()
            .unwrap();
        let mut i = Interpretation::new(1);
        i.add_to_concept("A", 0);
        i.add_to_concept("C", 0);
        i.declare_concept("B");
        i.set_individual("a", 0);
        assert!(is_model_kb(&i, &kb));
        let q = Query::new([QueryAtom::concept("B", Term::constant("a"))]).unwrap();
        assert_eq!(satisfies_query(&i, &q), Ok(false));

        let kb2 = KbBuilder::new().assert_distinct("a", "b").build().unwrap();
        let mut j = Interpretation::new(1);
        j.set_individual("a", 0);
        j.set_individual("b", 0);
        assert!(!is_model_kb(&j, &kb2));
    }

    #[test]
    fn query_with_variables() {
        let mut i = two();
        i.set_individual("a", 0);
        i.add_to_concept("B", 1);
        let q = Query::new([
            QueryAtom::role("R", Term::constant("a"), Term::var("y")),
            QueryAtom::concept("B", Term::var("y")),
        ])
        .unwrap();
        assert_eq!(satisfies_query(&i, &q), Ok(true));
    }
}
