//! Interned concepts and roles of one knowledge base.
//!
//! The engine never manipulates concept trees directly: every label member
//! is a [`ConceptId`] into the closure, and every edge label member is a
//! [`RoleId`] over the role names of the knowledge base and their inverses.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::concept::{negate_nnf, Concept};
use crate::kb::{closure, global_constraints, KnowledgeBase};
use crate::role::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub u32);

/// `2 * name_index + inverted`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoleId(pub u16);

impl RoleId {
    pub fn inverse(self) -> RoleId {
        RoleId(self.0 ^ 1)
    }

    pub fn name_index(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverted(self) -> bool {
        self.0 & 1 == 1
    }
}

/// Top-level constructor of an interned concept, with interned children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Atom(usize),
    NotAtom(usize),
    And(ConceptId, ConceptId),
    Or(ConceptId, ConceptId),
    Forall(RoleId, ConceptId),
    Exists(RoleId, ConceptId),
    AtLeast(u32, RoleId, ConceptId),
    AtMost(u32, RoleId, ConceptId),
}

#[derive(Debug, Clone)]
pub struct Vocabulary {
    concepts: Vec<Concept>,
    shapes: Vec<Shape>,
    index: BTreeMap<Concept, ConceptId>,
    negation: Vec<ConceptId>,
    globals: Vec<ConceptId>,
    atom_names: Vec<String>,
    atom_ids: Vec<Option<ConceptId>>,
    role_names: Vec<String>,
    subrole: Vec<bool>,
    transitive: Vec<bool>,
    transitive_below: Vec<Vec<RoleId>>,
    forall_index: BTreeMap<(RoleId, ConceptId), ConceptId>,
}

impl Vocabulary {
    pub fn new(kb: &KnowledgeBase) -> Self {
        let concepts: Vec<Concept> = closure(kb).into_iter().collect();
        let index: BTreeMap<Concept, ConceptId> =
            concepts.iter().enumerate().map(|(i, c)| (c.clone(), ConceptId(i as u32))).collect();

        let role_names: Vec<String> = kb.role_names().into_iter().collect();
        let role_count = role_names.len() * 2;
        let role_of = |r: &Role| -> RoleId {
            let i = role_names.binary_search(&r.name).expect("role of the knowledge base");
            RoleId((2 * i + r.inverted as usize) as u16)
        };
        let roles: Vec<Role> = (0..role_count)
            .map(|i| {
                let name = role_names[i / 2].clone();
                Role { name, inverted: i % 2 == 1 }
            })
            .collect();

        let rbox = kb.rbox();
        let mut subrole = alloc::vec![false; role_count * role_count];
        for (i, r) in roles.iter().enumerate() {
            for s in rbox.supers(r) {
                let j = role_of(&s).0 as usize;
                subrole[i * role_count + j] = true;
            }
        }
        let transitive: Vec<bool> = role_names.iter().map(|n| rbox.is_transitive(&Role::new(n.as_str()))).collect();
        let transitive_below: Vec<Vec<RoleId>> = (0..role_count)
            .map(|s| {
                (0..role_count)
                    .filter(|&r| transitive[r / 2] && subrole[r * role_count + s])
                    .map(|r| RoleId(r as u16))
                    .collect()
            })
            .collect();

        let mut atom_names: Vec<String> = Vec::new();
        for c in &concepts {
            if let Concept::Atom(n) | Concept::NotAtom(n) = c {
                atom_names.push(n.clone());
            }
        }
        atom_names.sort();
        atom_names.dedup();
        let atom_index = |n: &str| atom_names.binary_search_by(|x| x.as_str().cmp(n)).expect("atom of the closure");

        let id = |c: &Concept| index[c];
        let shapes: Vec<Shape> = concepts
            .iter()
            .map(|c| match c {
                Concept::Atom(n) => Shape::Atom(atom_index(n)),
                Concept::NotAtom(n) => Shape::NotAtom(atom_index(n)),
                Concept::And(a, b) => Shape::And(id(a), id(b)),
                Concept::Or(a, b) => Shape::Or(id(a), id(b)),
                Concept::Forall(r, c) => Shape::Forall(role_of(r), id(c)),
                Concept::Exists(r, c) => Shape::Exists(role_of(r), id(c)),
                Concept::AtLeast(n, r, c) => Shape::AtLeast(*n, role_of(r), id(c)),
                Concept::AtMost(n, r, c) => Shape::AtMost(*n, role_of(r), id(c)),
            })
            .collect();
        let negation = concepts.iter().map(|c| id(&negate_nnf(c))).collect();
        let globals = global_constraints(kb).iter().map(id).collect();
        let forall_index = shapes
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Shape::Forall(r, c) => Some(((*r, *c), ConceptId(i as u32))),
                _ => None,
            })
            .collect();
        let atom_ids = atom_names.iter().map(|n| index.get(&Concept::Atom(n.clone())).copied()).collect();

        Vocabulary {
            concepts,
            shapes,
            index,
            negation,
            globals,
            atom_names,
            atom_ids,
            role_names,
            subrole,
            transitive,
            transitive_below,
            forall_index,
        }
    }

    pub fn concept_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn concept(&self, id: ConceptId) -> &Concept {
        &self.concepts[id.0 as usize]
    }

    pub fn shape(&self, id: ConceptId) -> Shape {
        self.shapes[id.0 as usize]
    }

    pub fn id_of(&self, c: &Concept) -> Option<ConceptId> {
        self.index.get(c).copied()
    }

    /// Id of `NNF(¬c)`.
    pub fn negation(&self, id: ConceptId) -> ConceptId {
        self.negation[id.0 as usize]
    }

    pub fn globals(&self) -> &[ConceptId] {
        &self.globals
    }

    pub fn atom_names(&self) -> &[String] {
        &self.atom_names
    }

    pub fn atom_name(&self, i: usize) -> &str {
        &self.atom_names[i]
    }

    /// Id of the positive atom `name`, if it occurs in the closure.
    pub fn atom_id(&self, name: &str) -> Option<ConceptId> {
        let i = self.atom_names.binary_search_by(|x| x.as_str().cmp(name)).ok()?;
        self.atom_ids[i]
    }

    pub fn role_names(&self) -> &[String] {
        &self.role_names
    }

    pub fn role_count(&self) -> usize {
        self.role_names.len() * 2
    }

    pub fn roles(&self) -> impl Iterator<Item = RoleId> {
        (0..self.role_count() as u16).map(RoleId)
    }

    pub fn role(&self, id: RoleId) -> Role {
        Role { name: self.role_names[id.name_index()].clone(), inverted: id.is_inverted() }
    }

    pub fn role_id(&self, r: &Role) -> Option<RoleId> {
        let i = self.role_names.binary_search(&r.name).ok()?;
        Some(RoleId((2 * i + r.inverted as usize) as u16))
    }

    /// `r ⊑* s`
    pub fn subrole(&self, r: RoleId, s: RoleId) -> bool {
        self.subrole[r.0 as usize * self.role_count() + s.0 as usize]
    }

    pub fn is_transitive(&self, r: RoleId) -> bool {
        self.transitive[r.name_index()]
    }

    /// Id of `∀r.body`, if it belongs to the closure.
    pub fn forall_id(&self, r: RoleId, body: ConceptId) -> Option<ConceptId> {
        self.forall_index.get(&(r, body)).copied()
    }

    /// Transitive roles `R` with `R ⊑* s`.
    pub fn transitive_below(&self, s: RoleId) -> &[RoleId] {
        &self.transitive_below[s.0 as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::KbBuilder;

    #[test]
    fn interning_round_trip() {
        let kb = KbBuilder::new()
            .assert_concept(Concept::exists(Role::new("R"), Concept::atom("A")), "a")
            .role_inclusion(Role::new("R"), Role::new("S"))
            .transitive("S")
            .build()
            .unwrap();
        let v = Vocabulary::new(&kb);
        for i in 0..v.concept_count() {
            let id = ConceptId(i as u32);
            assert_eq!(v.id_of(v.concept(id)), Some(id));
            assert_eq!(v.negation(v.negation(id)), id);
        }
        let r = v.role_id(&Role::new("R")).unwrap();
        let s = v.role_id(&Role::new("S")).unwrap();
        assert!(v.subrole(r, s));
        assert!(v.subrole(r.inverse(), s.inverse()));
        assert!(!v.subrole(s, r));
        assert_eq!(v.transitive_below(s), &[s]);
        assert!(v.transitive_below(r).is_empty());
        assert_eq!(v.role(r.inverse()), Role::inv("R"));
    }
}
