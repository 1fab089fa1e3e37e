//! Roles, inverse roles and the role hierarchy.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A role name, possibly inverted.
///
/// Double inversion cannot be represented: `inverse` flips the flag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role {
    pub name: String,
    pub inverted: bool,
}

impl Role {
    pub fn new(name: impl Into<String>) -> Self {
        Role { name: name.into(), inverted: false }
    }

    pub fn inv(name: impl Into<String>) -> Self {
        Role { name: name.into(), inverted: true }
    }

    pub fn inverse(&self) -> Role {
        Role { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "(inv {})", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

/// Role inclusion axioms plus the set of transitive role names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleBox {
    inclusions: BTreeSet<(Role, Role)>,
    transitive: BTreeSet<String>,
}

impl RoleBox {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `sub ⊑ sup`.
    pub fn add_inclusion(&mut self, sub: Role, sup: Role) {
        self.inclusions.insert((sub, sup));
    }

    /// Marks a role transitive. `Trans(R)` and `Trans(R⁻)` are the same fact.
    pub fn add_transitive(&mut self, name: impl Into<String>) {
        self.transitive.insert(name.into());
    }

    pub fn inclusions(&self) -> impl Iterator<Item = &(Role, Role)> {
        self.inclusions.iter()
    }

    pub fn transitive(&self) -> impl Iterator<Item = &str> {
        self.transitive.iter().map(String::as_str)
    }

    pub fn is_transitive(&self, role: &Role) -> bool {
        self.transitive.contains(&role.name)
    }

    /// Role names mentioned by an inclusion or a transitivity axiom.
    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.transitive.iter().cloned().collect();
        for (a, b) in &self.inclusions {
            out.insert(a.name.clone());
            out.insert(b.name.clone());
        }
        out
    }

    fn direct_supers(&self) -> BTreeMap<Role, Vec<Role>> {
        let mut up: BTreeMap<Role, Vec<Role>> = BTreeMap::new();
        for (sub, sup) in &self.inclusions {
            up.entry(sub.clone()).or_default().push(sup.clone());
            up.entry(sub.inverse()).or_default().push(sup.inverse());
        }
        up
    }

    /// All roles `s` with `r ⊑* s`, including `r` itself.
    pub fn supers(&self, r: &Role) -> BTreeSet<Role> {
        let up = self.direct_supers();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(r.clone());
        queue.push_back(r.clone());
        while let Some(cur) = queue.pop_front() {
            if let Some(next) = up.get(&cur) {
                for s in next {
                    if seen.insert(s.clone()) {
                        queue.push_back(s.clone());
                    }
                }
            }
        }
        seen
    }

    /// `r ⊑* s`: reflexive-transitive closure of the inclusions together with
    /// their inverse images.
    pub fn subrole_of(&self, r: &Role, s: &Role) -> bool {
        r == s || self.supers(r).contains(s)
    }

    /// A role is simple when no role below it (itself included) is transitive.
    pub fn is_simple(&self, r: &Role) -> bool {
        let mut candidates: BTreeSet<String> = self.role_names();
        candidates.insert(r.name.clone());
        for name in &candidates {
            for s in [Role::new(name.as_str()), Role::inv(name.as_str())] {
                if self.is_transitive(&s) && self.subrole_of(&s, r) {
                    return false;
                }
            }
        }
        true
    }

    /// Pairs of distinct roles that are each other's sub-roles.
    pub fn cycles(&self) -> Vec<(Role, Role)> {
        let mut out = Vec::new();
        let mut names: Vec<Role> = Vec::new();
        for n in self.role_names() {
            names.push(Role::new(n.as_str()));
            names.push(Role::inv(n));
        }
        for (i, a) in names.iter().enumerate() {
            let up = self.supers(a);
            for b in &names[i + 1..] {
                if up.contains(b) && self.subrole_of(b, a) {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }
}
