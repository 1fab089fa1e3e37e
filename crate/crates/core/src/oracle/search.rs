//! Exhaustive enumeration of small interpretations.
//!
//! Individuals are pinned to the first domain elements by enumerating
//! restricted growth strings, so `a ↦ 0` always and a fresh element only
//! appears after all smaller ones are used. Role extensions are enumerated
//! among relations that already satisfy the role axioms (closure maps every
//! raw assignment to one of these, and they are closure fixpoints), and
//! assignments that a permutation of the anonymous elements maps to a
//! smaller encoding are skipped.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::ControlFlow;

use super::Interpretation;
use crate::concept::{Concept, BOTTOM_NAME};
use crate::kb::{global_constraints, Assertion, KnowledgeBase};
use crate::query::{Query, QueryAtom, Term};
use crate::role::{Role, RoleBox};

/// Largest domain the enumerators accept.
pub const MAX_DOMAIN: usize = 8;

/// Names an enumeration interprets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
    pub individuals: Vec<String>,
}

impl Signature {
    /// Names of `kb`, plus those of `q` when given.
    pub fn of(kb: &KnowledgeBase, q: Option<&Query>) -> Self {
        let mut concepts: BTreeSet<String> = kb.concept_names();
        let mut roles: BTreeSet<String> = kb.role_names();
        if let Some(q) = q {
            for atom in q.atoms() {
                match atom {
                    QueryAtom::Concept { name, .. } => concepts.insert(name.clone()),
                    QueryAtom::Role { name, .. } => roles.insert(name.clone()),
                };
            }
        }
        concepts.remove(BOTTOM_NAME);
        Signature {
            concepts: concepts.into_iter().collect(),
            roles: roles.into_iter().collect(),
            individuals: kb.individuals().to_vec(),
        }
    }
}

/// Restricted growth strings of length `len` with values below `size`.
fn growth_strings(len: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, size: usize, cur: &mut Vec<usize>, next: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..=next.min(size - 1) {
            cur.push(v);
            go(len, size, cur, if v == next { next + 1 } else { next }, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, size, &mut Vec::with_capacity(len), 0, &mut out);
    out
}

/// Successor masks of a relation encoded with bit `x * n + y` for `(x, y)`.
fn rows(rel: u64, n: usize) -> [u32; MAX_DOMAIN] {
    let mut out = [0u32; MAX_DOMAIN];
    let full = (1u64 << n) - 1;
    for (x, row) in out.iter_mut().enumerate().take(n) {
        *row = ((rel >> (x * n)) & full) as u32;
    }
    out
}

fn transpose(r: &[u32; MAX_DOMAIN], n: usize) -> [u32; MAX_DOMAIN] {
    let mut out = [0u32; MAX_DOMAIN];
    for x in 0..n {
        for y in 0..n {
            if r[x] >> y & 1 == 1 {
                out[y] |= 1 << x;
            }
        }
    }
    out
}

fn is_transitive(r: &[u32; MAX_DOMAIN], n: usize) -> bool {
    (0..n).all(|x| (0..n).filter(|y| r[x] >> y & 1 == 1).all(|y| r[y] & !r[x] == 0))
}

fn permute_rel(rel: u64, n: usize, perm: &[usize]) -> u64 {
    let mut out = 0;
    for x in 0..n {
        for y in 0..n {
            if rel >> (x * n + y) & 1 == 1 {
                out |= 1 << (perm[x] * n + perm[y]);
            }
        }
    }
    out
}

fn permute_set(mask: u32, perm: &[usize]) -> u32 {
    let mut out = 0;
    for (x, &p) in perm.iter().enumerate() {
        if mask >> x & 1 == 1 {
            out |= 1 << p;
        }
    }
    out
}

/// All permutations of `n` elements fixing `0..fixed`, identity excluded.
fn anonymous_permutations(n: usize, fixed: usize) -> Vec<Vec<usize>> {
    fn go(free: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == free.len() {
            out.push(free.clone());
            return;
        }
        for i in k..free.len() {
            free.swap(k, i);
            go(free, k + 1, out);
            free.swap(k, i);
        }
    }
    let mut tails = Vec::new();
    go(&mut (fixed..n).collect(), 0, &mut tails);
    tails
        .into_iter()
        .map(|tail| (0..fixed).chain(tail).collect::<Vec<usize>>())
        .filter(|p| p.iter().enumerate().any(|(i, &v)| i != v))
        .collect()
}

/// Role relations of one role name per candidate assignment.
struct RoleSpace {
    n: usize,
    /// Per role name, the relations allowed on their own.
    options: Vec<Vec<u64>>,
    /// `(sub, sup)` as `(name index, inverted)` pairs.
    inclusions: Vec<((usize, bool), (usize, bool))>,
}

impl RoleSpace {
    fn new(names: &[String], n: usize, rbox: Option<&RoleBox>, required: &[(usize, usize, usize)]) -> Self {
        let idx = |r: &Role| names.binary_search(&r.name).ok();
        let bits = n * n;
        let options = names
            .iter()
            .enumerate()
            .map(|(ri, name)| {
                let trans = rbox.is_some_and(|rb| rb.is_transitive(&Role::new(name.as_str())));
                let mut need = 0u64;
                for &(r, x, y) in required {
                    if r == ri {
                        need |= 1 << (x * n + y);
                    }
                }
                (0..1u64 << bits)
                    .filter(|rel| rel & need == need)
                    .filter(|rel| !trans || is_transitive(&rows(*rel, n), n))
                    .collect()
            })
            .collect();
        let inclusions = rbox
            .map(|rb| {
                rb.inclusions()
                    .filter_map(|(s, t)| Some(((idx(s)?, s.inverted), (idx(t)?, t.inverted))))
                    .collect()
            })
            .unwrap_or_default();
        RoleSpace { n, options, inclusions }
    }

    /// Calls `visit` on every combination satisfying the inclusions.
    fn for_each(&self, mut visit: impl FnMut(&[u64]) -> ControlFlow<()>) -> ControlFlow<()> {
        let k = self.options.len();
        if self.options.iter().any(Vec::is_empty) {
            return ControlFlow::Continue(());
        }
        let mut pick = alloc::vec![0usize; k];
        let mut rels: Vec<u64> = self.options.iter().map(|o| o[0]).collect();
        loop {
            if self.inclusions_hold(&rels) {
                visit(&rels)?;
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return ControlFlow::Continue(());
                }
                i -= 1;
                pick[i] += 1;
                if pick[i] < self.options[i].len() {
                    rels[i] = self.options[i][pick[i]];
                    break;
                }
                pick[i] = 0;
                rels[i] = self.options[i][0];
            }
        }
    }

    fn inclusions_hold(&self, rels: &[u64]) -> bool {
        let n = self.n;
        self.inclusions.iter().all(|&((s, si), (t, ti))| {
            // s ⊆ t, or its transpose when exactly one side is inverted.
            let sub = if si != ti { transpose(&rows(rels[s], n), n) } else { rows(rels[s], n) };
            let sup = rows(rels[t], n);
            (0..n).all(|x| sub[x] & !sup[x] == 0)
        })
    }
}

/// Enumerates every interpretation of `sig` over `size` elements, with
/// individuals pinned to the first elements. With `rbox`, only role
/// extensions satisfying its axioms are produced.
pub fn for_each_interpretation(
    sig: &Signature,
    size: usize,
    rbox: Option<&RoleBox>,
    mut visit: impl FnMut(&Interpretation) -> ControlFlow<()>,
) -> ControlFlow<()> {
    assert!((1..=MAX_DOMAIN).contains(&size));
    assert!(sig.concepts.len() * size <= 64 && size * size <= 64);
    let mut roles = sig.roles.clone();
    roles.sort();
    let space = RoleSpace::new(&roles, size, rbox, &[]);
    let mut i = Interpretation::new(size);
    for c in &sig.concepts {
        i.declare_concept(c);
    }
    for r in &roles {
        i.declare_role(r);
    }
    let concept_bits = sig.concepts.len() * size;
    for rgs in growth_strings(sig.individuals.len(), size) {
        for (name, &x) in sig.individuals.iter().zip(&rgs) {
            i.set_individual(name, x);
        }
        space.for_each(|rels| {
            for (name, &rel) in roles.iter().zip(rels) {
                let r = rows(rel, size);
                let ext = i.roles.get_mut(name).expect("declared");
                for (x, row) in ext.iter_mut().enumerate() {
                    row.clear();
                    for y in 0..size {
                        if r[x] >> y & 1 == 1 {
                            row.insert(y);
                        }
                    }
                }
            }
            for bits in 0..1u128 << concept_bits {
                for (k, name) in sig.concepts.iter().enumerate() {
                    let ext = i.concepts.get_mut(name).expect("declared");
                    ext.clear();
                    for x in 0..size {
                        if bits >> (k * size + x) & 1 == 1 {
                            ext.insert(x);
                        }
                    }
                }
                visit(&i)?;
            }
            ControlFlow::Continue(())
        })?;
    }
    ControlFlow::Continue(())
}

/// Concepts compiled to operations over element bitmasks.
#[derive(Debug, Clone, Copy)]
enum Op {
    Atom(usize),
    NotAtom(usize),
    Empty,
    Full,
    And(usize, usize),
    Or(usize, usize),
    All(usize, usize),
    Some(usize, usize),
    AtLeast(u32, usize, usize),
    AtMost(u32, usize, usize),
}

struct Program {
    ops: Vec<Op>,
    memo: BTreeMap<Concept, usize>,
    concepts: Vec<String>,
    roles: Vec<String>,
}

/// Evaluation context: one mask per atom, successor masks per role slot
/// (`2 * role + inverted`).
struct Ctx<'a> {
    n: usize,
    full: u32,
    atoms: &'a [u32],
    succ: &'a [[u32; MAX_DOMAIN]],
}

impl Program {
    fn compile(&mut self, c: &Concept) -> usize {
        if let Some(&i) = self.memo.get(c) {
            return i;
        }
        let atom = |p: &Program, n: &str| p.concepts.binary_search_by(|x| x.as_str().cmp(n)).ok();
        let slot = |p: &Program, r: &Role| {
            2 * p.roles.binary_search(&r.name).expect("role of the signature") + r.inverted as usize
        };
        let op = match c {
            Concept::Atom(n) => atom(self, n).map_or(Op::Empty, Op::Atom),
            Concept::NotAtom(n) => atom(self, n).map_or(Op::Full, Op::NotAtom),
            Concept::And(a, b) => Op::And(self.compile(a), self.compile(b)),
            Concept::Or(a, b) => Op::Or(self.compile(a), self.compile(b)),
            Concept::Forall(r, b) => Op::All(slot(self, r), self.compile(b)),
            Concept::Exists(r, b) => Op::Some(slot(self, r), self.compile(b)),
            Concept::AtLeast(k, r, b) => Op::AtLeast(*k, slot(self, r), self.compile(b)),
            Concept::AtMost(k, r, b) => Op::AtMost(*k, slot(self, r), self.compile(b)),
        };
        self.ops.push(op);
        self.memo.insert(c.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    /// Largest atom index an operation depends on, plus one.
    fn atom_level(&self, i: usize) -> usize {
        match self.ops[i] {
            Op::Atom(a) | Op::NotAtom(a) => a + 1,
            Op::Empty | Op::Full => 0,
            Op::And(a, b) | Op::Or(a, b) => self.atom_level(a).max(self.atom_level(b)),
            Op::All(_, b) | Op::Some(_, b) | Op::AtLeast(_, _, b) | Op::AtMost(_, _, b) => self.atom_level(b),
        }
    }

    fn eval(&self, i: usize, cx: &Ctx<'_>) -> u32 {
        let quantify = |slot: usize, body: usize, test: &dyn Fn(u32) -> bool| {
            let b = self.eval(body, cx);
            let mut out = 0;
            for x in 0..cx.n {
                if test(cx.succ[slot][x] & b) {
                    out |= 1 << x;
                }
            }
            out
        };
        match self.ops[i] {
            Op::Atom(a) => cx.atoms[a],
            Op::NotAtom(a) => !cx.atoms[a] & cx.full,
            Op::Empty => 0,
            Op::Full => cx.full,
            Op::And(a, b) => self.eval(a, cx) & self.eval(b, cx),
            Op::Or(a, b) => self.eval(a, cx) | self.eval(b, cx),
            Op::All(slot, body) => {
                let b = self.eval(body, cx);
                let mut out = 0;
                for x in 0..cx.n {
                    if cx.succ[slot][x] & !b == 0 {
                        out |= 1 << x;
                    }
                }
                out
            }
            Op::Some(slot, body) => quantify(slot, body, &|m| m != 0),
            Op::AtLeast(k, slot, body) => quantify(slot, body, &|m| m.count_ones() >= k),
            Op::AtMost(k, slot, body) => quantify(slot, body, &|m| m.count_ones() <= k),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Elem(usize),
    Var(usize),
}

/// Searches domains of size `1..=max_domain` for a model of `kb` in which
/// `q` has no match, and returns the first one in enumeration order.
/// Finding none is not evidence of entailment.
pub fn countermodel_search(kb: &KnowledgeBase, q: &Query, max_domain: usize) -> Option<Interpretation> {
    let sig = Signature::of(kb, Some(q));
    (1..=max_domain.min(MAX_DOMAIN)).find_map(|n| search_size(kb, q, &sig, n))
}

fn search_size(kb: &KnowledgeBase, q: &Query, sig: &Signature, n: usize) -> Option<Interpretation> {
    let atoms = sig.concepts.len();
    assert!(atoms * n <= 64 && sig.roles.len() * n * n <= 64, "signature too large for the enumerator");
    let mut prog = Program { ops: Vec::new(), memo: BTreeMap::new(), concepts: sig.concepts.clone(), roles: sig.roles.clone() };
    let role_idx = |name: &str| sig.roles.binary_search_by(|x| x.as_str().cmp(name)).expect("role of the signature");
    let ind_idx = |name: &str| sig.individuals.binary_search_by(|x| x.as_str().cmp(name)).expect("individual");

    // Checks grouped by the atom level at which they become decidable.
    let mut by_level: Vec<Vec<(usize, Option<usize>)>> = alloc::vec![Vec::new(); atoms + 1];
    let mut role_asserts: Vec<(usize, bool, usize, usize)> = Vec::new();
    let mut distinct: Vec<(usize, usize)> = Vec::new();
    for a in kb.abox() {
        match a {
            Assertion::Concept(c, x) => {
                let op = prog.compile(c);
                by_level[prog.atom_level(op)].push((op, Some(ind_idx(x))));
            }
            Assertion::Role(r, x, y) => role_asserts.push((role_idx(&r.name), r.inverted, ind_idx(x), ind_idx(y))),
            Assertion::Distinct(x, y) => distinct.push((ind_idx(x), ind_idx(y))),
        }
    }
    for g in global_constraints(kb) {
        if kb.distinguished().any(|d| g == Concept::or(Concept::atom(d), Concept::not_atom(d))) {
            continue;
        }
        let op = prog.compile(&g);
        by_level[prog.atom_level(op)].push((op, None));
    }
    let vars: Vec<&str> = q.variables().into_iter().collect();
    let slot_of = |t: &Term, ind: &[usize]| match t {
        Term::Const(c) => Slot::Elem(ind[ind_idx(c)]),
        Term::Var(v) => Slot::Var(vars.binary_search(&v.as_str()).expect("query variable")),
    };

    let full: u32 = ((1u64 << n) - 1) as u32;
    for ind in growth_strings(sig.individuals.len(), n) {
        if distinct.iter().any(|&(a, b)| ind[a] == ind[b]) {
            continue;
        }
        let used = ind.iter().map(|x| x + 1).max().unwrap_or(0);
        let perms = anonymous_permutations(n, used);
        let required: Vec<(usize, usize, usize)> = role_asserts
            .iter()
            .map(|&(r, inv, a, b)| if inv { (r, ind[b], ind[a]) } else { (r, ind[a], ind[b]) })
            .collect();
        let space = RoleSpace::new(&sig.roles, n, Some(kb.rbox()), &required);
        let qatoms: Vec<QAtom> = q
            .atoms()
            .iter()
            .map(|a| match a {
                QueryAtom::Concept { name, term } => QAtom::Concept(
                    sig.concepts.binary_search(name).expect("query concept in the signature"),
                    slot_of(term, &ind),
                ),
                QueryAtom::Role { name, from, to } => {
                    QAtom::Role(2 * role_idx(name), slot_of(from, &ind), slot_of(to, &ind))
                }
            })
            .collect();

        let mut found = None;
        let _ = space.for_each(|rels| {
            // Canonical role encoding under permutations of anonymous elements.
            let mut stabilizer: Vec<&Vec<usize>> = Vec::new();
            for p in &perms {
                let permuted: Vec<u64> = rels.iter().map(|&r| permute_rel(r, n, p)).collect();
                match permuted.as_slice().cmp(rels) {
                    core::cmp::Ordering::Less => return ControlFlow::Continue(()),
                    core::cmp::Ordering::Equal => stabilizer.push(p),
                    core::cmp::Ordering::Greater => {}
                }
            }
            let mut succ = alloc::vec![[0u32; MAX_DOMAIN]; 2 * rels.len()];
            for (r, &rel) in rels.iter().enumerate() {
                succ[2 * r] = rows(rel, n);
                succ[2 * r + 1] = transpose(&succ[2 * r], n);
            }
            let mut masks = alloc::vec![0u32; atoms];
            let mut search = ConceptSearch {
                prog: &prog,
                by_level: &by_level,
                n,
                full,
                succ: &succ,
                ind: &ind,
                stabilizer: &stabilizer,
                qatoms: &qatoms,
                vars: vars.len(),
            };
            if search.level(0, &mut masks) {
                found = Some((rels.to_vec(), masks));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if let Some((rels, masks)) = found {
            return Some(build(sig, n, &ind, &rels, &masks));
        }
    }
    None
}

#[derive(Debug, Clone, Copy)]
enum QAtom {
    Concept(usize, Slot),
    Role(usize, Slot, Slot),
}

struct ConceptSearch<'a> {
    prog: &'a Program,
    by_level: &'a [Vec<(usize, Option<usize>)>],
    n: usize,
    full: u32,
    succ: &'a [[u32; MAX_DOMAIN]],
    ind: &'a [usize],
    stabilizer: &'a [&'a Vec<usize>],
    qatoms: &'a [QAtom],
    vars: usize,
}

impl ConceptSearch<'_> {
    fn checks_hold(&self, level: usize, masks: &[u32]) -> bool {
        let cx = Ctx { n: self.n, full: self.full, atoms: masks, succ: self.succ };
        self.by_level[level].iter().all(|&(op, at)| {
            let ext = self.prog.eval(op, &cx);
            match at {
                Some(i) => ext >> self.ind[i] & 1 == 1,
                None => ext == self.full,
            }
        })
    }

    /// Assigns atoms `k..` in increasing mask order.
    fn level(&mut self, k: usize, masks: &mut Vec<u32>) -> bool {
        if !self.checks_hold(k, masks) {
            return false;
        }
        if k == masks.len() {
            return self.canonical(masks) && !self.query_holds(masks);
        }
        for m in 0..=self.full {
            masks[k] = m;
            if self.level(k + 1, masks) {
                return true;
            }
        }
        masks[k] = 0;
        false
    }

    fn canonical(&self, masks: &[u32]) -> bool {
        self.stabilizer.iter().all(|p| {
            let permuted: Vec<u32> = masks.iter().map(|&m| permute_set(m, p)).collect();
            permuted.as_slice() >= masks
        })
    }

    fn query_holds(&self, masks: &[u32]) -> bool {
        let mut asg = alloc::vec![0usize; self.vars];
        let val = |s: Slot, asg: &[usize]| match s {
            Slot::Elem(x) => x,
            Slot::Var(v) => asg[v],
        };
        loop {
            let ok = self.qatoms.iter().all(|a| match *a {
                QAtom::Concept(c, t) => masks[c] >> val(t, &asg) & 1 == 1,
                QAtom::Role(slot, s, t) => self.succ[slot][val(s, &asg)] >> val(t, &asg) & 1 == 1,
            });
            if ok {
                return true;
            }
            let mut i = 0;
            loop {
                if i == asg.len() {
                    return false;
                }
                asg[i] += 1;
                if asg[i] < self.n {
                    break;
                }
                asg[i] = 0;
                i += 1;
            }
        }
    }
}

fn build(sig: &Signature, n: usize, ind: &[usize], rels: &[u64], masks: &[u32]) -> Interpretation {
    let mut i = Interpretation::new(n);
    for (name, &m) in sig.concepts.iter().zip(masks) {
        i.declare_concept(name);
        for x in 0..n {
            if m >> x & 1 == 1 {
                i.add_to_concept(name, x);
            }
        }
    }
    for (name, &rel) in sig.roles.iter().zip(rels) {
        i.declare_role(name);
        let r = rows(rel, n);
        for x in 0..n {
            for y in 0..n {
                if r[x] >> y & 1 == 1 {
                    i.add_pair(name, x, y);
                }
            }
        }
    }
    for (name, &x) in sig.individuals.iter().zip(ind) {
        i.set_individual(name, x);
    }
    i
}
