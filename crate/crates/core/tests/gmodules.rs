use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::ToPrimitive;
use profinity_core::exact_algebra::{hom_and_ext, FgAbelianGroup};
use profinity_core::gmodules::*;
use profinity_core::groups::{FiniteGroup, Homomorphism, SubgroupWithTransversal};
use proptest::prelude::*;

fn cyc(n: u64) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::cyclic(n).unwrap())
}

fn sign(m: u64) -> GModule {
    GModule::from_character(cyc(2), m, &[m - 1]).unwrap()
}

fn sign_of(g: &Arc<FiniteGroup>, m: u64) -> GModule {
    let scalars: Vec<u64> = g.generators().iter().map(|&x| if g.element_order(x) == 2 { m - 1 } else { 1 }).collect();
    GModule::from_character(g.clone(), m, &scalars).unwrap()
}

fn order(m: &GModule) -> u64 {
    m.order().to_u64().unwrap()
}

/// Fixed points counted by enumeration.
fn fixed_count(m: &GModule) -> u64 {
    let g = m.group();
    m.elements().iter().filter(|v| g.generators().iter().all(|&s| m.act(s, v) == **v)).count() as u64
}

/// Order of the subgroup spanned by `g·v - v`, found by closure.
fn augmentation_count(m: &GModule) -> u64 {
    let g = m.group();
    let gens: Vec<Vec<u64>> = m
        .elements()
        .iter()
        .flat_map(|v| {
            g.generators()
                .iter()
                .map(|&s| {
                    let w = m.act(s, v);
                    let diff: Vec<u64> = w.iter().zip(v).zip(m.moduli()).map(|((a, b), md)| (a + md - b) % md).collect();
                    diff
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut span: BTreeSet<Vec<u64>> = BTreeSet::from([vec![0; m.dim()]]);
    let mut frontier: Vec<Vec<u64>> = span.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        for y in &gens {
            let z = m.reduce(&x.iter().zip(y).map(|(a, b)| a + b).collect::<Vec<_>>());
            if span.insert(z.clone()) {
                frontier.push(z);
            }
        }
    }
    span.len() as u64
}

fn corpus() -> Vec<GModule> {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let swap = ModMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
    let shear = ModMatrix::from_rows(&[vec![1, 1], vec![0, 1]]);
    vec![
        GModule::trivial(cyc(3), &[6]).unwrap(),
        GModule::trivial(s3.clone(), &[2, 4]).unwrap(),
        sign(7),
        sign(4),
        GModule::from_character(cyc(4), 5, &[2]).unwrap(),
        sign_of(&s3, 3),
        GModule::regular(cyc(3), 2).unwrap(),
        GModule::regular(cyc(2), 4).unwrap(),
        GModule::regular(s3, 2).unwrap(),
        GModule::new(cyc(2), vec![3, 3], vec![swap]).unwrap(),
        GModule::new(cyc(4), vec![4, 4], vec![shear]).unwrap(),
        GModule::new(cyc(2), vec![2, 4], vec![ModMatrix::from_rows(&[vec![1, 0], vec![2, 1]])]).unwrap(),
    ]
}

#[test]
fn construction_examples() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let t = GModule::trivial(s3, &[5]).unwrap();
    assert!(t.generator_actions().iter().all(|a| a.is_identity(t.moduli())));

    let r = GModule::regular(cyc(3), 2).unwrap();
    assert_eq!(r.underlying(), FgAbelianGroup::from_orders(&[2, 2, 2]));
    let p = &r.generator_actions()[0];
    for col in 0..3 {
        let ones: Vec<usize> = (0..3).filter(|&row| p.get(row, col) == 1).collect();
        assert_eq!(ones.len(), 1);
        assert_ne!(ones[0], col);
    }

    let s = sign(7);
    assert_eq!(s.act(1, &[3]), vec![4]);
    assert!(!s.is_trivial_action());
}

#[test]
fn malformed_actions_are_rejected() {
    let bad = GModule::from_character(cyc(3), 7, &[6]);
    assert!(matches!(bad, Err(ModuleError::RelationViolated(_))), "{bad:?}");
    let singular = GModule::from_character(cyc(2), 4, &[2]);
    assert!(singular.is_err());
    let wrong = GModule::new(cyc(2), vec![2, 2], vec![ModMatrix::identity(3)]);
    assert!(matches!(wrong, Err(ModuleError::WrongShape { .. })));
}

#[test]
fn dual_examples() {
    let t6 = GModule::trivial(cyc(5), &[6]).unwrap();
    let d = pontryagin_dual(&t6);
    assert_eq!(d.underlying(), FgAbelianGroup::cyclic(6));
    assert!(d.is_trivial_action());
    assert_eq!(pontryagin_dual(&sign(7)), sign(7));
}

#[test]
fn invariant_and_coinvariant_examples() {
    let t = GModule::trivial(cyc(4), &[2, 6]).unwrap();
    assert_eq!(invariants(&t).0, t.underlying());
    assert_eq!(coinvariants(&t).0, t.underlying());
    assert!(invariants(&sign(7)).0.is_trivial());
    assert!(coinvariants(&sign(7)).0.is_trivial());

    let r = GModule::regular(cyc(3), 2).unwrap();
    let (fixed, inclusion) = invariants(&r);
    assert_eq!(fixed, FgAbelianGroup::cyclic(2));
    assert_eq!(inclusion.apply(&[1]), vec![1, 1, 1]);
    assert_eq!(coinvariants(&r).0, FgAbelianGroup::cyclic(2));
}

#[test]
fn fixed_points_and_coinvariants_match_enumeration() {
    for m in corpus() {
        let (fixed, inclusion) = invariants(&m);
        assert_eq!(fixed.order_u64(), Some(fixed_count(&m)));
        assert!(inclusion.is_injective());
        let (co, projection) = coinvariants(&m);
        assert_eq!(co.order_u64(), Some(order(&m) / augmentation_count(&m)));
        assert!(projection.is_surjective());
    }
}

#[test]
fn induction_examples() {
    let c2 = cyc(2);
    let whole = SubgroupWithTransversal::generated_by(c2.clone(), &[1]).unwrap();
    let a = GModule::from_character(whole.group.clone(), 5, &[4]).unwrap();
    let ind = induce(&whole, &a).unwrap();
    assert_eq!(ind.underlying(), FgAbelianGroup::cyclic(5));
    assert_eq!(ind.act(1, &[1]), vec![4]);
    let coind = coinduce(&whole, &a).unwrap();
    assert_eq!(coind.act(1, &[1]), vec![4]);

    let unit = SubgroupWithTransversal::generated_by(c2.clone(), &[]).unwrap();
    let z3 = GModule::trivial(unit.group.clone(), &[3]).unwrap();
    let regular = GModule::regular(c2, 3).unwrap();
    assert_eq!(induce(&unit, &z3).unwrap(), regular);
    assert!(is_isomorphic(&coinduce(&unit, &z3).unwrap(), &regular).unwrap().is_isomorphic());

    let c4 = cyc(4);
    let half = SubgroupWithTransversal::generated_by(c4, &[2]).unwrap();
    let z2 = GModule::trivial(half.group.clone(), &[2]).unwrap();
    let ind = induce(&half, &z2).unwrap();
    assert_eq!(ind.underlying(), FgAbelianGroup::from_orders(&[2, 2]));
    assert_eq!(ind.act(1, &[1, 0]), vec![0, 1]);
    assert_eq!(ind.act(1, &[0, 1]), vec![1, 0]);
    assert!(induce_to_coinduce(&half, &z2).unwrap().is_isomorphism());
}

#[test]
fn induce_and_coinduce_agree() {
    let groups = [cyc(4), cyc(6), Arc::new(FiniteGroup::symmetric(3).unwrap()), Arc::new(FiniteGroup::dihedral(4).unwrap())];
    for g in groups {
        for members in g.all_subgroups() {
            let sub = SubgroupWithTransversal::from_members(g.clone(), &members).unwrap();
            let h = sub.group.clone();
            let mut modules = vec![GModule::trivial(h.clone(), &[3]).unwrap(), GModule::regular(h.clone(), 2).unwrap()];
            if h.order() == 2 {
                modules.push(GModule::from_character(h.clone(), 5, &[4]).unwrap());
            }
            for a in modules.into_iter().filter(|a| order(a).pow(sub.index() as u32) <= 1 << 12) {
                let f = induce_to_coinduce(&sub, &a).unwrap();
                assert!(f.is_isomorphism(), "{} over {:?}", g.name(), members);
            }
        }
    }
}

#[test]
fn restriction_examples() {
    let c4 = cyc(4);
    let c2 = cyc(2);
    let m = GModule::regular(c2.clone(), 2).unwrap();
    let id = Homomorphism::from_generator_images(c2.clone(), c2.clone(), vec![1]).unwrap();
    assert_eq!(m.restrict_along(&id).unwrap(), m);
    let zero = Homomorphism::from_generator_images(c4.clone(), c2.clone(), vec![0]).unwrap();
    assert!(m.restrict_along(&zero).unwrap().is_trivial_action());
    let onto = Homomorphism::reduction(c4, c2).unwrap();
    let r = m.restrict_along(&onto).unwrap();
    assert_eq!(r.underlying(), FgAbelianGroup::from_orders(&[2, 2]));
    assert_eq!(r.act(1, &[1, 0]), vec![0, 1]);
    assert_eq!(r.act(2, &[1, 0]), vec![1, 0]);
}

#[test]
fn tensor_examples() {
    let g = cyc(3);
    let z4 = GModule::trivial(g.clone(), &[4]).unwrap();
    let z6 = GModule::trivial(g.clone(), &[6]).unwrap();
    assert_eq!(tensor_product(&z4, &z6).unwrap().underlying(), FgAbelianGroup::cyclic(2));
    // Bilinear maps Z/4 × Z/6 → Z/12 are fixed by the value at (1, 1).
    let bilinear = (0..12u64).filter(|&t| (4 * t) % 12 == 0 && (6 * t) % 12 == 0).count();
    assert_eq!(bilinear, 2);

    let z2 = GModule::trivial(g.clone(), &[2]).unwrap();
    let z3 = GModule::trivial(g.clone(), &[3]).unwrap();
    assert!(tensor_product(&z2, &z3).unwrap().underlying().is_trivial());
    for m in corpus().into_iter().filter(|m| m.group().order() == 3) {
        let big = GModule::trivial(g.clone(), &[m.exponent() * 5]).unwrap();
        let t = tensor_product(&m, &big).unwrap();
        assert_eq!(t.underlying(), m.underlying());
        assert!(is_isomorphic(&t, &m).unwrap().is_isomorphic());
    }
    let other = GModule::trivial(cyc(2), &[2]).unwrap();
    assert_eq!(tensor_product(&z2, &other).unwrap_err(), ModuleError::GroupMismatch);
}

fn gcd_naive(a: u64, b: u64) -> u64 {
    (1..=a.min(b)).rev().find(|d| a.is_multiple_of(*d) && b.is_multiple_of(*d)).unwrap_or(1)
}

#[test]
fn double_dual_and_duality_exchange() {
    for m in corpus() {
        assert!(order(&m) <= 64);
        let d = pontryagin_dual(&m);
        assert_eq!(d.underlying(), m.underlying());
        let ev = evaluation_map(&m);
        assert!(ev.is_isomorphism());
        assert_eq!(coinvariants(&m).0, invariants(&d).0);
        assert_eq!(invariants(&m).0, coinvariants(&d).0);
    }
}

#[test]
fn tensor_hom_duality() {
    let modules = corpus();
    for m in &modules {
        for n in modules.iter().filter(|n| n.group() == m.group()) {
            let t = tensor_product(m, n).unwrap();
            let (hom, _) = hom_and_ext(&n.underlying(), &pontryagin_dual(m).underlying());
            assert_eq!(pontryagin_dual(&t).underlying(), hom);
        }
    }
}

#[test]
fn trivial_modules_are_their_own_invariants() {
    for factors in [&[2u64][..], &[3, 9], &[2, 2, 4], &[5, 10]] {
        for g in [cyc(4), Arc::new(FiniteGroup::quaternion().unwrap())] {
            let t = GModule::trivial(g, factors).unwrap();
            assert!(invariants(&t).1.is_isomorphism());
            assert!(coinvariants(&t).1.is_isomorphism());
        }
    }
}

proptest! {
    #[test]
    fn maps_between_trivial_modules_dualize(a in 1u64..12, b in 1u64..12, c in 0u64..12) {
        let g = cyc(2);
        let src = GModule::trivial(g.clone(), &[a * b]).unwrap();
        let tgt = GModule::trivial(g, &[a]).unwrap();
        if src.dim() == 1 && tgt.dim() == 1 {
            let f = ModuleMap::new(src.clone(), tgt.clone(), ModMatrix::from_rows(&[vec![c % a]])).unwrap();
            let fd = f.dual();
            prop_assert_eq!(f.source.order() / f.kernel_order(), fd.source.order() / fd.kernel_order());
            prop_assert!(fd.dual().matrix == f.matrix);
        }
    }

    #[test]
    fn characters_of_cyclic_groups(n in 2u64..8, m in 2u64..30, s in 1u64..30) {
        let s = s % m;
        let valid = s != 0 && gcd_naive(s, m) == 1 && (0..n).fold(1u64, |acc, _| acc * s % m) == 1 % m;
        let built = GModule::from_character(cyc(n), m, &[s]);
        prop_assert_eq!(built.is_ok(), valid);
        if let Ok(module) = built {
            let fixed = (0..m).filter(|&x| x * s % m == x).count() as u64;
            prop_assert_eq!(invariants(&module).0.order_u64(), Some(fixed));
            prop_assert_eq!(coinvariants(&module).0.order_u64(), Some(fixed));
            prop_assert!(evaluation_map(&module).is_isomorphism());
        }
    }
}
