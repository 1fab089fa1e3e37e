//! Boolean conjunctive queries and their entailment.

mod entail;
mod mapping;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use entail::{entails, entails_with_interrupt, EntailConfig, EntailError, EntailmentVerdict, Verdict, Witness};
pub use mapping::{maps_into, Mapping};

use crate::kb::{metrics, KnowledgeBase};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryAtom {
    Concept { name: String, term: Term },
    Role { name: String, from: Term, to: Term },
}

impl QueryAtom {
    pub fn concept(name: impl Into<String>, term: Term) -> Self {
        QueryAtom::Concept { name: name.into(), term }
    }

    pub fn role(name: impl Into<String>, from: Term, to: Term) -> Self {
        QueryAtom::Role { name: name.into(), from, to }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        let (a, b) = match self {
            QueryAtom::Concept { term, .. } => (term, None),
            QueryAtom::Role { from, to, .. } => (from, Some(to)),
        };
        core::iter::once(a).chain(b)
    }
}

impl fmt::Display for QueryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryAtom::Concept { name, term } => write!(f, "{name}({term})"),
            QueryAtom::Role { name, from, to } => write!(f, "{name}({from}, {to})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryError {
    Empty,
    /// Concept atoms must use distinguished concept names.
    NotDistinguished(String),
    UnknownRole(String),
    UnknownConstant(String),
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryError::Empty => f.write_str("query has no atoms"),
            QueryError::NotDistinguished(n) => write!(f, "concept {n} is not a distinguished concept name"),
            QueryError::UnknownRole(n) => write!(f, "role {n} does not occur in the knowledge base"),
            QueryError::UnknownConstant(n) => write!(f, "constant {n} is not an individual of the knowledge base"),
        }
    }
}

impl core::error::Error for QueryError {}

/// A Boolean conjunctive query: a non-empty set of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Query {
    atoms: Vec<QueryAtom>,
}

impl Query {
    pub fn new(atoms: impl IntoIterator<Item = QueryAtom>) -> Result<Self, QueryError> {
        let mut atoms: Vec<QueryAtom> = atoms.into_iter().collect();
        atoms.sort();
        atoms.dedup();
        if atoms.is_empty() {
            return Err(QueryError::Empty);
        }
        Ok(Query { atoms })
    }

    pub fn atoms(&self) -> &[QueryAtom] {
        &self.atoms
    }

    /// Number of atoms.
    pub fn n_q(&self) -> usize {
        self.atoms.len()
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        self.terms()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                Term::Const(_) => None,
            })
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<&str> {
        self.terms()
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.as_str()),
                Term::Var(_) => None,
            })
            .collect()
    }

    fn terms(&self) -> impl Iterator<Item = &Term> {
        self.atoms.iter().flat_map(QueryAtom::terms)
    }

    /// Checks the query against the signature of `kb`.
    pub fn validate(&self, kb: &KnowledgeBase) -> Result<(), QueryError> {
        let roles = kb.role_names();
        for atom in &self.atoms {
            match atom {
                QueryAtom::Concept { name, .. } if !kb.is_distinguished(name) => {
                    return Err(QueryError::NotDistinguished(name.clone()));
                }
                QueryAtom::Role { name, .. } if !roles.contains(name) => {
                    return Err(QueryError::UnknownRole(name.clone()));
                }
                _ => {}
            }
        }
        match self.constants().into_iter().find(|c| !kb.has_individual(c)) {
            Some(c) => Err(QueryError::UnknownConstant(c.into())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// How a blocking depth was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthDerivation {
    /// `n_Q`, sufficient without transitive roles.
    NQ,
    /// `D · n_Q` with `D = 2^(2ℓ + m)`.
    DNQ,
    /// A user-supplied depth.
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingParams {
    pub depth: u64,
    pub derivation: DepthDerivation,
    /// Whether `depth` reaches `bound`.
    pub complete: bool,
    /// The sufficient depth for this knowledge base and query (saturating).
    pub bound: u64,
    /// `D`, when transitive roles are present.
    pub d: Option<u64>,
}

/// `2^e`, saturating at `u64::MAX`.
pub fn pow2_saturating(e: u64) -> u64 {
    if e >= 64 {
        u64::MAX
    } else {
        1u64 << e
    }
}

/// `D = 2^(2ℓ + m)`, saturating.
pub fn d_bound(conccard: usize, rolecard: usize) -> u64 {
    pow2_saturating((2 * conccard as u64).saturating_add(rolecard as u64))
}

/// Chooses the blocking depth for answering `q` over `kb`.
pub fn blocking_depth(kb: &KnowledgeBase, q: &Query, cap: Option<u64>) -> BlockingParams {
    let nq = q.n_q() as u64;
    let (bound, derivation, d) = if kb.has_transitive_roles() {
        let m = metrics(kb);
        let d = d_bound(m.conccard, m.rolecard);
        (d.saturating_mul(nq).max(1), DepthDerivation::DNQ, Some(d))
    } else {
        (nq.max(1), DepthDerivation::NQ, None)
    };
    match cap {
        Some(c) if c != bound => BlockingParams {
            depth: c.max(1),
            derivation: DepthDerivation::Override,
            complete: c >= bound,
            bound,
            d,
        },
        _ => BlockingParams { depth: bound, derivation, complete: true, bound, d },
    }
}
