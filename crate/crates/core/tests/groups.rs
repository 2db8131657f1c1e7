mod common;

use common::{all_subgroups, dihedral, group_corpus, hom_count, quaternion, sym};
use shaomega_core::group::{build_group, FiniteGroup, GroupSpec, MAX_ORDER};
use shaomega_core::{AbelianStructure, Error};

#[test]
fn corpus_tables_are_groups() {
    for g in group_corpus() {
        assert!(g.is_associative(), "{}", g.label());
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
            assert_eq!(g.mul(g.identity(), a), a);
        }
    }
}

#[test]
fn orders_of_standard_families() {
    assert_eq!(sym(4).order(), 24);
    assert_eq!(build_group(&GroupSpec::Symmetric(5)).unwrap().order(), 120);
    assert_eq!(dihedral(4).order(), 8);
    assert!(!quaternion().is_abelian());
    assert!(build_group(&GroupSpec::CyclicProduct(vec![11, 11])).is_err());
    assert!(MAX_ORDER >= 120);
}

#[test]
fn rejects_nonassociative_table() {
    // a Latin square with identity 0 that is not associative
    let t = vec![
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    assert!(matches!(FiniteGroup::from_table(t, "bad".into()), Err(Error::NonAssociativeTable(..))));
}

#[test]
fn symmetric_composition_convention() {
    let spec = GroupSpec::Symmetric(3);
    let g = build_group(&spec).unwrap();
    let s = spec.element_index(&[2, 1, 3]).unwrap();
    let t = spec.element_index(&[1, 3, 2]).unwrap();
    // (s·t)(x) = s(t(x)): 1 → 1 → 2, 2 → 3 → 3, 3 → 2 → 1
    assert_eq!(g.mul(s, t), spec.element_index(&[2, 3, 1]).unwrap());
}

#[test]
fn abelianization_matches_hom_counts() {
    for g in group_corpus() {
        let (ab, _) = g.quotient_group(&g.commutator_subgroup()).unwrap();
        let inv: AbelianStructure = ab.abelian_invariants().unwrap();
        for d in [2u64, 3, 4] {
            let expected: u64 = inv.torsion().iter().map(|&n| num_integer::gcd(n, d)).product();
            assert_eq!(hom_count(&g, d), expected, "{} d={d}", g.label());
        }
        let order: u128 = inv.order().unwrap();
        assert_eq!(order as usize, g.index(&g.commutator_subgroup()));
    }
}

#[test]
fn cyclic_subgroup_reps_cover_every_cyclic_subgroup() {
    for g in group_corpus().into_iter().filter(|g| g.order() <= 24) {
        let reps = g.cyclic_subgroup_reps();
        for c in g.all_cyclic_subgroups() {
            let hit = reps.iter().filter(|r| (0..g.order()).any(|x| g.conjugate_subgroup(r, x) == c)).count();
            assert_eq!(hit, 1, "{}", g.label());
        }
        for r in &reps {
            let s = g.cyclic_generator(r).unwrap();
            assert_eq!(g.element_order(s), r.order());
        }
    }
}

#[test]
fn cores_closures_and_quotients() {
    let g = sym(4);
    for h in all_subgroups(&g) {
        let core = g.core(&h).unwrap();
        assert!(g.is_normal(&core) && core.is_subgroup_of(&h));
        let ncl = g.normal_closure(&h).unwrap();
        assert!(g.is_normal(&ncl) && h.is_subgroup_of(&ncl));
        let (q, proj) = g.quotient_group(&core).unwrap();
        assert_eq!(q.order() * core.order(), g.order());
        for a in 0..g.order() {
            for b in 0..g.order() {
                assert_eq!(proj[g.mul(a, b)], q.mul(proj[a], proj[b]));
            }
        }
    }
    assert_eq!(all_subgroups(&g).len(), 30);
    assert_eq!(all_subgroups(&quaternion()).len(), 6);
}

#[test]
fn cyclic_generator_rejects_noncyclic() {
    let g = common::cp(&[2, 2]);
    assert!(matches!(g.cyclic_generator(&g.whole()), Err(Error::NotCyclic)));
}
