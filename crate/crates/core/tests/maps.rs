use std::sync::Arc;

use profinity_core::cohomology::{
    cohomology, conjugation_action, five_term_check, homology, inflation_map, periodic_inflation, restriction_map,
    transgression,
};
use profinity_core::exact_algebra::{FgAbelianGroup, IntMatrix};
use profinity_core::gmodules::{coinduce, induce, GModule};
use profinity_core::groups::{FiniteGroup, Homomorphism, SubgroupWithTransversal};

fn c(n: u64) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(n).unwrap())
}

#[test]
fn inflation_from_c2_to_c4() {
    let (c4, c2) = (c(4), c(2));
    let proj = Homomorphism::reduction(c4, c2.clone()).unwrap();
    let z2 = GModule::trivial(c2, &[2]).unwrap();
    let inf1 = inflation_map(&proj, &z2, 1).unwrap();
    assert!(inf1.map.is_isomorphism());
    let inf2 = inflation_map(&proj, &z2, 2).unwrap();
    assert!(inf2.map.is_zero());
    let p2 = periodic_inflation(&proj, &z2, 2).unwrap();
    assert!(p2.map.is_zero());
    let p1 = periodic_inflation(&proj, &z2, 1).unwrap();
    assert!(p1.map.is_isomorphism());
}

#[test]
fn restriction_from_c4_to_c2() {
    let c4 = c(4);
    let sub = SubgroupWithTransversal::generated_by(c4.clone(), &[2]).unwrap();
    let z2 = GModule::trivial(c4, &[2]).unwrap();
    assert!(restriction_map(&sub, &z2, 1).unwrap().map.is_zero());
    assert!(restriction_map(&sub, &z2, 2).unwrap().map.is_isomorphism());
}

#[test]
fn transposition_negates_h1_of_a3() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let a3 = s3.normal_subgroups().into_iter().find(|n| n.len() == 3).unwrap();
    let nsub = SubgroupWithTransversal::from_members(s3.clone(), &a3).unwrap();
    let z3 = GModule::trivial(s3.clone(), &[3]).unwrap();
    let odd = s3.elements().find(|x| !a3.contains(x)).unwrap();
    let act = conjugation_action(&nsub, &z3, 1, odd).unwrap();
    assert_eq!(act.source.value, FgAbelianGroup::cyclic(3));
    assert_eq!(act.map.matrix, IntMatrix::from_rows(&[vec![2i64]]));

    let report = five_term_check(&nsub, &z3).unwrap();
    assert!(report.is_exact());
    assert!(report.h1_quotient.is_trivial());
    assert!(report.h1_group.is_trivial());
    assert!(report.h1_normal_invariant.is_trivial());
    assert!(report.h2_quotient.is_trivial());
}

#[test]
fn five_term_for_c4_over_c2() {
    let c4 = c(4);
    let nsub = SubgroupWithTransversal::generated_by(c4.clone(), &[2]).unwrap();
    let z2 = GModule::trivial(c4, &[2]).unwrap();
    let r = five_term_check(&nsub, &z2).unwrap();
    let z = FgAbelianGroup::cyclic(2);
    for g in [&r.h1_quotient, &r.h1_group, &r.h1_normal_invariant, &r.h2_quotient, &r.h2_group] {
        assert_eq!(*g, z);
    }
    assert!(r.is_exact());
    assert!(r.transgression.is_isomorphism());
}

#[test]
fn five_term_with_two_factor_coefficients() {
    for n in [4u64, 8] {
        let d = Arc::new(FiniteGroup::dihedral(n).unwrap());
        let rot = d.normal_subgroups().into_iter().find(|m| m.len() == n as usize && m.contains(&1)).unwrap();
        let nsub = SubgroupWithTransversal::from_members(d.clone(), &rot).unwrap();
        let a = GModule::trivial(d, &[2, 4]).unwrap();
        let r = five_term_check(&nsub, &a).unwrap();
        assert!(r.is_exact(), "D{n}");
        assert_eq!(r.h1_normal_invariant, FgAbelianGroup::from_orders(&[2, 2]), "D{n}");
    }
}

#[test]
fn five_term_with_trivial_normal_subgroup() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let nsub = SubgroupWithTransversal::from_members(s3.clone(), &[0]).unwrap();
    let m = GModule::regular(s3, 2).unwrap();
    assert!(five_term_check(&nsub, &m).unwrap().is_exact());
}

#[test]
fn transgression_is_independent_of_the_transversal() {
    let d4 = Arc::new(FiniteGroup::dihedral(4).unwrap());
    for n in d4.normal_subgroups() {
        if n.len() == 1 || n.len() == d4.order() {
            continue;
        }
        let nsub = SubgroupWithTransversal::from_members(d4.clone(), &n).unwrap();
        let a = GModule::trivial(d4.clone(), &[2]).unwrap();
        let base = transgression(&nsub, &a).unwrap();
        let shifted: Vec<usize> = nsub
            .transversal
            .iter()
            .enumerate()
            .map(|(i, &t)| if i == 0 { t } else { d4.mul(n[n.len() - 1], t) })
            .collect();
        let other = nsub.with_transversal(shifted).unwrap();
        let moved = transgression(&other, &a).unwrap();
        assert_eq!(base.map.matrix, moved.map.matrix);
    }
}

#[test]
fn shapiro_for_subgroups_of_s3() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    for members in s3.all_subgroups() {
        let sub = SubgroupWithTransversal::from_members(s3.clone(), &members).unwrap();
        let a = GModule::trivial(sub.group.clone(), &[2]).unwrap();
        let co = coinduce(&sub, &a).unwrap();
        let ind = induce(&sub, &a).unwrap();
        for i in 0..=2 {
            assert_eq!(cohomology(&s3, &co, i).unwrap().value, cohomology(&sub.group, &a, i).unwrap().value);
            assert_eq!(homology(&s3, &ind, i).unwrap(), homology(&sub.group, &a, i).unwrap());
        }
    }
}
