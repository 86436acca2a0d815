use std::sync::Arc;
use std::time::Instant;

use profinity_core::cohomology::{uct_check, UctVerdict, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW};
use profinity_core::exact_algebra::FgAbelianGroup;
use profinity_core::gmodules::GModule;
use profinity_core::groups::FiniteGroup;

#[test]
fn cyclic_groups_are_conclusive_and_consistent() {
    let start = Instant::now();
    for n in 1..=12u64 {
        let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
        for a in [2u64, 4, 6, 9] {
            let m = GModule::trivial(g.clone(), &[a]).unwrap();
            for i in 0..=3 {
                let r = uct_check(&g, &m, i, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW).unwrap();
                assert_eq!(r.verdict, UctVerdict::Holds, "Z/{n}, Z/{a}, i={i}");
                let expected = match i {
                    0 => FgAbelianGroup::free(1),
                    _ if i % 2 == 1 => FgAbelianGroup::cyclic(n),
                    _ => FgAbelianGroup::trivial(),
                };
                assert_eq!(r.integral[i].as_ref(), Some(&expected));
            }
        }
    }
    eprintln!("uct sweep: {:?}", start.elapsed());
}

#[test]
fn symmetric_group_examples() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let z6 = GModule::trivial(s3.clone(), &[6]).unwrap();
    let r = uct_check(&s3, &z6, 1, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.verdict, UctVerdict::Holds);
    assert_eq!(r.integral[1], Some(FgAbelianGroup::cyclic(2)));
    assert_eq!(r.cohomology.order_u64(), Some(2));
    for i in [0, 2] {
        let r = uct_check(&s3, &z6, i, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW).unwrap();
        assert_eq!(r.verdict, UctVerdict::Holds, "i={i}");
    }
}

#[test]
fn c2_with_z4_coefficients() {
    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let z4 = GModule::trivial(c2.clone(), &[4]).unwrap();
    let r = uct_check(&c2, &z4, 1, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.verdict, UctVerdict::Holds);
    assert_eq!(r.hom.unwrap().order_u64(), Some(2));
    assert!(r.ext.unwrap().is_trivial());
}

#[test]
fn short_cap_is_inconclusive() {
    let c7 = Arc::new(FiniteGroup::cyclic(7).unwrap());
    let z7 = GModule::trivial(c7.clone(), &[7]).unwrap();
    let r = uct_check(&c7, &z7, 1, 6, DEFAULT_WINDOW).unwrap();
    assert!(matches!(r.verdict, UctVerdict::Inconclusive(_)));
}

#[test]
fn nontrivial_action_is_rejected() {
    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let sign = GModule::from_character(c2.clone(), 3, &[2]).unwrap();
    assert!(uct_check(&c2, &sign, 1, 8, 2).is_err());
}
