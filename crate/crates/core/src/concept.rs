//! Concept syntax and negation normal form.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;

use crate::role::Role;

/// Atomic name used to encode ⊤ as `¬X ⊔ X` and ⊥ as `X ⊓ ¬X`.
pub const BOTTOM_NAME: &str = "__bottom";

/// A concept in negation normal form. Negation only wraps atomic names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Concept {
    Atom(String),
    NotAtom(String),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Forall(Role, Box<Concept>),
    Exists(Role, Box<Concept>),
    AtLeast(u32, Role, Box<Concept>),
    AtMost(u32, Role, Box<Concept>),
}

/// An arbitrary concept expression, negation allowed anywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConceptExpr {
    Atom(String),
    Not(Box<ConceptExpr>),
    And(Box<ConceptExpr>, Box<ConceptExpr>),
    Or(Box<ConceptExpr>, Box<ConceptExpr>),
    Forall(Role, Box<ConceptExpr>),
    Exists(Role, Box<ConceptExpr>),
    AtLeast(u32, Role, Box<ConceptExpr>),
    AtMost(u32, Role, Box<ConceptExpr>),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Self {
        Concept::Atom(name.into())
    }

    pub fn not_atom(name: impl Into<String>) -> Self {
        Concept::NotAtom(name.into())
    }

    pub fn and(a: Concept, b: Concept) -> Self {
        Concept::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Concept, b: Concept) -> Self {
        Concept::Or(Box::new(a), Box::new(b))
    }

    pub fn forall(r: Role, c: Concept) -> Self {
        Concept::Forall(r, Box::new(c))
    }

    pub fn exists(r: Role, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn at_least(n: u32, r: Role, c: Concept) -> Self {
        Concept::AtLeast(n, r, Box::new(c))
    }

    pub fn at_most(n: u32, r: Role, c: Concept) -> Self {
        Concept::AtMost(n, r, Box::new(c))
    }

    pub fn top() -> Self {
        Concept::or(Concept::not_atom(BOTTOM_NAME), Concept::atom(BOTTOM_NAME))
    }

    pub fn bottom() -> Self {
        Concept::and(Concept::atom(BOTTOM_NAME), Concept::not_atom(BOTTOM_NAME))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Concept::Atom(_) | Concept::NotAtom(_) => 1,
            Concept::And(a, b) | Concept::Or(a, b) => 1 + a.size() + b.size(),
            Concept::Forall(_, c) | Concept::Exists(_, c) => 1 + c.size(),
            Concept::AtLeast(_, _, c) | Concept::AtMost(_, _, c) => 1 + c.size(),
        }
    }

    /// Direct subconcepts.
    pub fn children(&self) -> impl Iterator<Item = &Concept> {
        let (a, b): (Option<&Concept>, Option<&Concept>) = match self {
            Concept::Atom(_) | Concept::NotAtom(_) => (None, None),
            Concept::And(a, b) | Concept::Or(a, b) => (Some(a), Some(b)),
            Concept::Forall(_, c)
            | Concept::Exists(_, c)
            | Concept::AtLeast(_, _, c)
            | Concept::AtMost(_, _, c) => (Some(c), None),
        };
        a.into_iter().chain(b)
    }

    /// The role of a quantifier or number restriction.
    pub fn role(&self) -> Option<&Role> {
        match self {
            Concept::Forall(r, _)
            | Concept::Exists(r, _)
            | Concept::AtLeast(_, r, _)
            | Concept::AtMost(_, r, _) => Some(r),
            _ => None,
        }
    }

    /// Visits this concept and every subconcept, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Concept)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn atom_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| match c {
            Concept::Atom(n) | Concept::NotAtom(n) => {
                out.insert(n.clone());
            }
            _ => {}
        });
        out
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |c| {
            if let Some(r) = c.role() {
                out.insert(r.name.clone());
            }
        });
        out
    }
}

impl From<&Concept> for ConceptExpr {
    fn from(c: &Concept) -> Self {
        let b = |c: &Concept| Box::new(ConceptExpr::from(c));
        match c {
            Concept::Atom(n) => ConceptExpr::Atom(n.clone()),
            Concept::NotAtom(n) => ConceptExpr::Not(Box::new(ConceptExpr::Atom(n.clone()))),
            Concept::And(x, y) => ConceptExpr::And(b(x), b(y)),
            Concept::Or(x, y) => ConceptExpr::Or(b(x), b(y)),
            Concept::Forall(r, x) => ConceptExpr::Forall(r.clone(), b(x)),
            Concept::Exists(r, x) => ConceptExpr::Exists(r.clone(), b(x)),
            Concept::AtLeast(n, r, x) => ConceptExpr::AtLeast(*n, r.clone(), b(x)),
            Concept::AtMost(n, r, x) => ConceptExpr::AtMost(*n, r.clone(), b(x)),
        }
    }
}

impl ConceptExpr {
    pub fn atom(name: impl Into<String>) -> Self {
        ConceptExpr::Atom(name.into())
    }

    pub fn not(c: ConceptExpr) -> Self {
        ConceptExpr::Not(Box::new(c))
    }

    pub fn size(&self) -> usize {
        match self {
            ConceptExpr::Atom(_) => 1,
            ConceptExpr::Not(c) => 1 + c.size(),
            ConceptExpr::And(a, b) | ConceptExpr::Or(a, b) => 1 + a.size() + b.size(),
            ConceptExpr::Forall(_, c) | ConceptExpr::Exists(_, c) => 1 + c.size(),
            ConceptExpr::AtLeast(_, _, c) | ConceptExpr::AtMost(_, _, c) => 1 + c.size(),
        }
    }
}

/// Translates an expression into negation normal form.
///
/// `≥0 S.C` is normalized to ⊤ so that [`negate_nnf`] is an involution on
/// normalized concepts.
pub fn nnf(e: &ConceptExpr) -> Concept {
    to_nnf(e, false)
}

/// `NNF(¬c)`.
pub fn negate_nnf(c: &Concept) -> Concept {
    to_nnf(&ConceptExpr::from(c), true)
}

fn to_nnf(e: &ConceptExpr, negated: bool) -> Concept {
    match (e, negated) {
        (ConceptExpr::Atom(n), false) => Concept::Atom(n.clone()),
        (ConceptExpr::Atom(n), true) => Concept::NotAtom(n.clone()),
        (ConceptExpr::Not(c), _) => to_nnf(c, !negated),
        (ConceptExpr::And(a, b), false) => Concept::and(to_nnf(a, false), to_nnf(b, false)),
        (ConceptExpr::And(a, b), true) => Concept::or(to_nnf(a, true), to_nnf(b, true)),
        (ConceptExpr::Or(a, b), false) => Concept::or(to_nnf(a, false), to_nnf(b, false)),
        (ConceptExpr::Or(a, b), true) => Concept::and(to_nnf(a, true), to_nnf(b, true)),
        (ConceptExpr::Forall(r, c), false) => Concept::forall(r.clone(), to_nnf(c, false)),
        (ConceptExpr::Forall(r, c), true) => Concept::exists(r.clone(), to_nnf(c, true)),
        (ConceptExpr::Exists(r, c), false) => Concept::exists(r.clone(), to_nnf(c, false)),
        (ConceptExpr::Exists(r, c), true) => Concept::forall(r.clone(), to_nnf(c, true)),
        (ConceptExpr::AtLeast(0, _, _), false) => Concept::top(),
        (ConceptExpr::AtLeast(0, _, _), true) => Concept::bottom(),
        (ConceptExpr::AtLeast(n, r, c), false) => Concept::at_least(*n, r.clone(), to_nnf(c, false)),
        (ConceptExpr::AtLeast(n, r, c), true) => Concept::at_most(n - 1, r.clone(), to_nnf(c, false)),
        (ConceptExpr::AtMost(n, r, c), false) => Concept::at_most(*n, r.clone(), to_nnf(c, false)),
        (ConceptExpr::AtMost(n, r, c), true) => Concept::at_least(n + 1, r.clone(), to_nnf(c, false)),
    }
}

/// Fully parenthesized s-expression form, e.g. `(some R (and A B))`.
impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Concept::Atom(n) => f.write_str(n),
            Concept::NotAtom(n) => write!(f, "(not {n})"),
            Concept::And(a, b) => write!(f, "(and {a} {b})"),
            Concept::Or(a, b) => write!(f, "(or {a} {b})"),
            Concept::Forall(r, c) => write!(f, "(all {r} {c})"),
            Concept::Exists(r, c) => write!(f, "(some {r} {c})"),
            Concept::AtLeast(n, r, c) => write!(f, "(atleast {n} {r} {c})"),
            Concept::AtMost(n, r, c) => write!(f, "(atmost {n} {r} {c})"),
        }
    }
}

impl fmt::Display for ConceptExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConceptExpr::Atom(n) => f.write_str(n),
            ConceptExpr::Not(c) => write!(f, "(not {c})"),
            ConceptExpr::And(a, b) => write!(f, "(and {a} {b})"),
            ConceptExpr::Or(a, b) => write!(f, "(or {a} {b})"),
            ConceptExpr::Forall(r, c) => write!(f, "(all {r} {c})"),
            ConceptExpr::Exists(r, c) => write!(f, "(some {r} {c})"),
            ConceptExpr::AtLeast(n, r, c) => write!(f, "(atleast {n} {r} {c})"),
            ConceptExpr::AtMost(n, r, c) => write!(f, "(atmost {n} {r} {c})"),
        }
    }
}
