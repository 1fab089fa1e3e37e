use std::collections::BTreeSet;
use std::ops::ControlFlow;

use proptest::prelude::*;
use shiq_core::forest::blocking_statuses;
use shiq_core::{
    closure, eval_concept, for_each_interpretation, global_constraints, negate_nnf, nnf, BlockingStatus, Budget,
    Concept, ConceptExpr, KbBuilder, Reasoner, Role, RoleBox, Signature,
};

fn role() -> impl Strategy<Value = Role> {
    (prop_oneof![Just("R"), Just("S")], any::<bool>())
        .prop_map(|(n, inv)| if inv { Role::inv(n) } else { Role::new(n) })
}

fn expr() -> impl Strategy<Value = ConceptExpr> {
    let leaf = prop_oneof![Just("A"), Just("B"), Just("C")].prop_map(ConceptExpr::atom);
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |s: BoxedStrategy<ConceptExpr>| s.prop_map(Box::new);
        let inner = inner.boxed();
        prop_oneof![
            b(inner.clone()).prop_map(ConceptExpr::Not),
            (b(inner.clone()), b(inner.clone())).prop_map(|(x, y)| ConceptExpr::And(x, y)),
            (b(inner.clone()), b(inner.clone())).prop_map(|(x, y)| ConceptExpr::Or(x, y)),
            (role(), b(inner.clone())).prop_map(|(r, c)| ConceptExpr::Forall(r, c)),
            (role(), b(inner.clone())).prop_map(|(r, c)| ConceptExpr::Exists(r, c)),
            (0..3u32, role(), b(inner.clone())).prop_map(|(n, r, c)| ConceptExpr::AtLeast(n, r, c)),
            (0..3u32, role(), b(inner)).prop_map(|(n, r, c)| ConceptExpr::AtMost(n, r, c)),
        ]
    })
}

fn sub_concepts(c: &Concept, out: &mut Vec<Concept>) {
    out.push(c.clone());
    for d in c.children() {
        sub_concepts(d, out);
    }
}

fn signature(c: &Concept) -> Signature {
    Signature {
        concepts: c.atom_names().into_iter().collect(),
        roles: c.role_names().into_iter().collect(),
        individuals: vec![],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nnf_is_idempotent(e in expr()) {
        let c = nnf(&e);
        prop_assert_eq!(nnf(&ConceptExpr::from(&c)), c);
    }

    #[test]
    fn negation_is_an_involution(e in expr()) {
        let c = nnf(&e);
        prop_assert_eq!(negate_nnf(&negate_nnf(&c)), c);
    }

    #[test]
    fn nnf_size_is_linear(e in expr()) {
        prop_assert!(nnf(&e).size() <= 3 * e.size());
    }

    #[test]
    fn concept_and_negation_partition_the_domain(e in expr()) {
        let c = nnf(&e);
        let neg = negate_nnf(&c);
        let sig = signature(&Concept::and(c.clone(), neg.clone()));
        let _ = for_each_interpretation(&sig, 2, None, |i| {
            let pos = eval_concept(i, &c).unwrap();
            let n = eval_concept(i, &neg).unwrap();
            assert!(pos.is_disjoint(&n));
            assert_eq!(pos.union(&n).count(), i.size());
            ControlFlow::Continue(())
        });
    }

    #[test]
    fn closure_is_closed(
        assertions in proptest::collection::vec(expr(), 1..3),
        axioms in proptest::collection::vec((expr(), expr()), 0..2),
        transitive in any::<bool>(),
    ) {
        let mut b = KbBuilder::new();
        for e in &assertions {
            b = b.assert_concept(nnf(e), "a");
        }
        for (x, y) in &axioms {
            b = b.axiom(nnf(x), nnf(y));
        }
        if transitive {
            b = b.transitive("R").role_inclusion(Role::new("R"), Role::new("S"));
        }
        let Ok(kb) = b.build() else { return Ok(()) };
        let clos = closure(&kb);
        for c in &clos {
            prop_assert!(clos.contains(&negate_nnf(c)), "missing negation of {}", c);
            for d in c.children() {
                prop_assert!(clos.contains(d), "missing subconcept {} of {}", d, c);
            }
        }
        for g in global_constraints(&kb) {
            let mut subs = Vec::new();
            sub_concepts(&g, &mut subs);
            for s in subs.iter().skip(1) {
                prop_assert!(clos.contains(s), "global constraint part {} outside the closure", s);
            }
        }
    }

    #[test]
    fn subrole_relation_is_a_preorder_closed_under_inverse(
        incl in proptest::collection::vec((role(), prop_oneof![Just("R"), Just("S"), Just("T")], any::<bool>()), 0..4)
    ) {
        let mut rbox = RoleBox::new();
        for (sub, sup, inv) in &incl {
            let sup = if *inv { Role::inv(*sup) } else { Role::new(*sup) };
            rbox.add_inclusion(sub.clone(), sup);
        }
        let roles: Vec<Role> = ["R", "S", "T"].iter().flat_map(|n| [Role::new(*n), Role::inv(*n)]).collect();
        for r in &roles {
            prop_assert!(rbox.subrole_of(r, r));
            for s in &roles {
                prop_assert_eq!(rbox.subrole_of(r, s), rbox.subrole_of(&r.inverse(), &s.inverse()));
                for t in &roles {
                    if rbox.subrole_of(r, s) && rbox.subrole_of(s, t) {
                        prop_assert!(rbox.subrole_of(r, t));
                    }
                }
            }
        }
    }

    #[test]
    fn direct_blocks_carry_label_preserving_isomorphisms(
        body in expr(),
        n in 1u64..3,
    ) {
        let kb = KbBuilder::new()
            .assert_concept(Concept::atom("A"), "a")
            .axiom(Concept::atom("A"), Concept::exists(Role::new("R"), Concept::and(Concept::atom("A"), nnf(&body))))
            .build()
            .unwrap();
        let reasoner = Reasoner::new(&kb);
        let budget = Budget { max_forests: 200, max_nodes: 300 };
        for leaf in reasoner.expand(n, budget).take(5) {
            let Ok(leaf) = leaf else { break };
            let f = &leaf.forest;
            for st in blocking_statuses(f, n) {
                if let BlockingStatus::Direct { witness, tree_root, witness_root, iso } = st {
                    prop_assert!(witness_root != tree_root && f.is_ancestor(witness_root, tree_root));
                    prop_assert!(iso.iter().any(|&(v, w)| v == tree_root && w == witness_root));
                    let pairs: BTreeSet<_> = iso.iter().copied().collect();
                    for &(v, w) in &iso {
                        prop_assert_eq!(f.label(v), f.label(w));
                        if let Some(p) = f.parent(v).filter(|p| pairs.iter().any(|&(x, _)| x == *p)) {
                            let pw = f.parent(w).unwrap();
                            prop_assert!(pairs.contains(&(p, pw)));
                            prop_assert_eq!(f.edge(p, v), f.edge(pw, w));
                        }
                    }
                    prop_assert!(iso.iter().any(|&(_, w)| w == witness));
                }
            }
        }
    }
}
