//! Knowledge bases: A-Box, R-Box, T-Box and the distinguished concept names.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::concept::{negate_nnf, Concept};
use crate::role::{Role, RoleBox};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    /// `C(a)`
    Concept(Concept, String),
    /// `R(a, b)`
    Role(Role, String, String),
    /// `a ≠ b`
    Distinct(String, String),
}

impl Assertion {
    pub fn individuals(&self) -> impl Iterator<Item = &str> {
        let (a, b) = match self {
            Assertion::Concept(_, a) => (a.as_str(), None),
            Assertion::Role(_, a, b) | Assertion::Distinct(a, b) => (a.as_str(), Some(b.as_str())),
        };
        core::iter::once(a).chain(b)
    }
}

/// General concept inclusion `sub ⊑ sup`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gci {
    pub sub: Concept,
    pub sup: Concept,
}

impl Gci {
    pub fn new(sub: Concept, sup: Concept) -> Self {
        Gci { sub, sup }
    }
}

/// Where a validation problem was found. Indices refer to insertion order in
/// the [`KbBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Assertion(usize),
    Axiom(usize),
    RoleInclusion(usize),
    KnowledgeBase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    RoleCycle(Role, Role),
    NonSimpleRole(Role),
    EmptyAbox,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub location: Location,
    pub kind: IssueKind,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            IssueKind::RoleCycle(a, b) => {
                write!(f, "role hierarchy cycle: {a} and {b} are sub-roles of each other")
            }
            IssueKind::NonSimpleRole(r) => {
                write!(f, "number restriction over non-simple role {r}")
            }
            IssueKind::EmptyAbox => f.write_str("the A-Box is empty"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ValidationReport {}

/// Unvalidated knowledge-base parts, kept in insertion order.
#[derive(Debug, Clone, Default)]
pub struct KbBuilder {
    pub assertions: Vec<Assertion>,
    pub axioms: Vec<Gci>,
    pub role_inclusions: Vec<(Role, Role)>,
    pub transitive: Vec<String>,
    pub distinguished: Vec<String>,
}

impl KbBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assert_concept(mut self, c: Concept, a: &str) -> Self {
        self.assertions.push(Assertion::Concept(c, a.into()));
        self
    }

    pub fn assert_role(mut self, r: Role, a: &str, b: &str) -> Self {
        self.assertions.push(Assertion::Role(r, a.into(), b.into()));
        self
    }

    pub fn assert_distinct(mut self, a: &str, b: &str) -> Self {
        self.assertions.push(Assertion::Distinct(a.into(), b.into()));
        self
    }

    pub fn axiom(mut self, sub: Concept, sup: Concept) -> Self {
        self.axioms.push(Gci::new(sub, sup));
        self
    }

    pub fn role_inclusion(mut self, sub: Role, sup: Role) -> Self {
        self.role_inclusions.push((sub, sup));
        self
    }

    pub fn transitive(mut self, name: &str) -> Self {
        self.transitive.push(name.into());
        self
    }

    pub fn distinguished(mut self, name: &str) -> Self {
        self.distinguished.push(name.into());
        self
    }

    pub fn rbox(&self) -> RoleBox {
        let mut rb = RoleBox::new();
        for (a, b) in &self.role_inclusions {
            rb.add_inclusion(a.clone(), b.clone());
        }
        for t in &self.transitive {
            rb.add_transitive(t.as_str());
        }
        rb
    }

    pub fn validate(&self) -> ValidationReport {
        validate_kb(self)
    }

    pub fn build(self) -> Result<KnowledgeBase, ValidationReport> {
        let report = self.validate();
        if !report.is_clean() {
            return Err(report);
        }
        let rbox = self.rbox();
        let abox: BTreeSet<Assertion> = self.assertions.into_iter().collect();
        let individuals = abox
            .iter()
            .flat_map(|a| a.individuals().map(String::from))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(KnowledgeBase {
            abox,
            rbox,
            tbox: self.axioms.into_iter().collect(),
            distinguished: self.distinguished.into_iter().collect(),
            individuals,
        })
    }
}

/// Checks the structural side conditions a knowledge base must meet before
/// reasoning: an acyclic role hierarchy, simple roles under number
/// restrictions and a non-empty A-Box. Concepts are NNF by construction.
pub fn validate_kb(kb: &KbBuilder) -> ValidationReport {
    let rbox = kb.rbox();
    let mut issues = Vec::new();

    let cycles = rbox.cycles();
    for (a, b) in cycles {
        let at = kb
            .role_inclusions
            .iter()
            .position(|(s, t)| {
                [a.clone(), a.inverse(), b.clone(), b.inverse()].iter().any(|r| r == s || r == t)
            })
            .unwrap_or(0);
        issues.push(ValidationIssue {
            location: Location::RoleInclusion(at),
            kind: IssueKind::RoleCycle(a, b),
        });
    }

    let mut check = |c: &Concept, location: Location| {
        c.walk(&mut |sub| {
            if let Concept::AtLeast(_, r, _) | Concept::AtMost(_, r, _) = sub {
                if !rbox.is_simple(r) {
                    issues.push(ValidationIssue {
                        location,
                        kind: IssueKind::NonSimpleRole(r.clone()),
                    });
                }
            }
        });
    };
    for (i, a) in kb.assertions.iter().enumerate() {
        if let Assertion::Concept(c, _) = a {
            check(c, Location::Assertion(i));
        }
    }
    for (i, g) in kb.axioms.iter().enumerate() {
        check(&g.sub, Location::Axiom(i));
        check(&g.sup, Location::Axiom(i));
    }

    if kb.assertions.is_empty() {
        issues.push(ValidationIssue { location: Location::KnowledgeBase, kind: IssueKind::EmptyAbox });
    }
    ValidationReport { issues }
}

/// A validated knowledge base. Only [`KbBuilder::build`] constructs one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    abox: BTreeSet<Assertion>,
    rbox: RoleBox,
    tbox: BTreeSet<Gci>,
    distinguished: BTreeSet<String>,
    individuals: Vec<String>,
}

impl KnowledgeBase {
    pub fn abox(&self) -> impl Iterator<Item = &Assertion> {
        self.abox.iter()
    }

    pub fn rbox(&self) -> &RoleBox {
        &self.rbox
    }

    pub fn tbox(&self) -> impl Iterator<Item = &Gci> {
        self.tbox.iter()
    }

    pub fn distinguished(&self) -> impl Iterator<Item = &str> {
        self.distinguished.iter().map(String::as_str)
    }

    pub fn is_distinguished(&self, name: &str) -> bool {
        self.distinguished.contains(name)
    }

    /// Individual names, sorted.
    pub fn individuals(&self) -> &[String] {
        &self.individuals
    }

    pub fn has_individual(&self, name: &str) -> bool {
        self.individuals.binary_search_by(|n| n.as_str().cmp(name)).is_ok()
    }

    /// Role names occurring anywhere in the knowledge base.
    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = self.rbox.role_names();
        for a in &self.abox {
            match a {
                Assertion::Concept(c, _) => out.extend(c.role_names()),
                Assertion::Role(r, _, _) => {
                    out.insert(r.name.clone());
                }
                Assertion::Distinct(..) => {}
            }
        }
        for g in &self.tbox {
            out.extend(g.sub.role_names());
            out.extend(g.sup.role_names());
        }
        out
    }

    /// Atomic concept names occurring anywhere, distinguished names included.
    pub fn concept_names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.distinguished.iter().cloned().collect();
        for a in &self.abox {
            if let Assertion::Concept(c, _) = a {
                out.extend(c.atom_names());
            }
        }
        for g in &self.tbox {
            out.extend(g.sub.atom_names());
            out.extend(g.sup.atom_names());
        }
        out
    }

    pub fn has_transitive_roles(&self) -> bool {
        self.rbox.transitive().next().is_some()
    }
}

/// `{NNF(¬C ⊔ D) | C ⊑ D ∈ T} ∪ {C ⊔ ¬C | C ∈ C_K}`.
pub fn global_constraints(kb: &KnowledgeBase) -> BTreeSet<Concept> {
    let mut out = BTreeSet::new();
    for g in kb.tbox() {
        out.insert(Concept::or(negate_nnf(&g.sub), g.sup.clone()));
    }
    for name in kb.distinguished() {
        out.insert(Concept::or(Concept::atom(name), Concept::not_atom(name)));
    }
    out
}

/// Concepts of the A-Box and the global constraints, closed under
/// subconcepts and NNF negation. For every `∀S.C` in the set and every
/// transitive `R ⊑* S`, `∀R.C` is added as well, since the transitive
/// propagation rule places it in node labels.
pub fn closure(kb: &KnowledgeBase) -> BTreeSet<Concept> {
    let mut seeds: Vec<Concept> = kb
        .abox()
        .filter_map(|a| match a {
            Assertion::Concept(c, _) => Some(c.clone()),
            _ => None,
        })
        .collect();
    seeds.extend(global_constraints(kb));
    close_concepts(seeds, kb.rbox(), &kb.role_names())
}

pub(crate) fn close_concepts(
    seeds: Vec<Concept>,
    rbox: &RoleBox,
    role_names: &BTreeSet<String>,
) -> BTreeSet<Concept> {
    let transitive: Vec<Role> = role_names
        .iter()
        .flat_map(|n| [Role::new(n.as_str()), Role::inv(n.as_str())])
        .filter(|r| rbox.is_transitive(r))
        .collect();
    let mut out = BTreeSet::new();
    let mut stack = seeds;
    while let Some(c) = stack.pop() {
        if out.contains(&c) {
            continue;
        }
        stack.push(negate_nnf(&c));
        stack.extend(c.children().cloned());
        if let Concept::Forall(s, body) = &c {
            for r in &transitive {
                if rbox.subrole_of(r, s) {
                    stack.push(Concept::Forall(r.clone(), body.clone()));
                }
            }
        }
        out.insert(c);
    }
    out
}

/// Size parameters of a knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KbMetrics {
    /// `|clos(K) ∪ C_K|`
    pub conccard: usize,
    /// Role names occurring in the knowledge base, each counted with its inverse.
    pub rolecard: usize,
    pub maxnumrest: u32,
    pub abox_size: usize,
}

pub fn metrics(kb: &KnowledgeBase) -> KbMetrics {
    let mut maxnumrest = 0;
    let mut visit = |c: &Concept| {
        c.walk(&mut |sub| {
            if let Concept::AtLeast(n, _, _) | Concept::AtMost(n, _, _) = sub {
                maxnumrest = maxnumrest.max(*n);
            }
        })
    };
    for a in kb.abox() {
        if let Assertion::Concept(c, _) = a {
            visit(c);
        }
    }
    for g in kb.tbox() {
        visit(&g.sub);
        visit(&g.sup);
    }
    let mut concepts = closure(kb);
    concepts.extend(kb.distinguished().map(Concept::atom));
    KbMetrics {
        conccard: concepts.len(),
        rolecard: 2 * kb.role_names().len(),
        maxnumrest,
        abox_size: kb.abox.len(),
    }
}
