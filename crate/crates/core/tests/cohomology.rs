use std::sync::Arc;
use std::time::Instant;

use profinity_core::cohomology::{
    cohomology, cohomology_periodic, h1_via_derivations, homology, BarCochainComplex, CohomologyError,
};
use profinity_core::exact_algebra::FgAbelianGroup;
use profinity_core::gmodules::{invariants, coinvariants, GModule};
use profinity_core::groups::FiniteGroup;

/// Order of `H^i(Z/n, Z/m)` with the generator acting by `u`, by enumeration.
fn cyclic_oracle(n: u64, m: u64, u: u64, i: usize) -> u64 {
    let act = |x: u64| x * u % m;
    let norm = |x: u64| {
        let (mut s, mut y) = (0, x);
        for _ in 0..n {
            s = (s + y) % m;
            y = act(y);
        }
        s
    };
    let count = |f: &dyn Fn(u64) -> bool| (0..m).filter(|&x| f(x)).count() as u64;
    let image = |f: &dyn Fn(u64) -> u64| {
        let mut v: Vec<u64> = (0..m).map(f).collect();
        v.sort_unstable();
        v.dedup();
        v.len() as u64
    };
    match i {
        0 => count(&|x| act(x) == x),
        _ if i.is_multiple_of(2) => count(&|x| act(x) == x) / image(&norm),
        _ => count(&|x| norm(x) == 0) / image(&|x| (act(x) + m - x) % m),
    }
}

fn units_of_order_dividing(n: u64, m: u64) -> Vec<u64> {
    (0..m).filter(|&u| num_integer::gcd(u, m) == 1 && (0..n).fold(1 % m, |acc, _| acc * u % m) == 1 % m).collect()
}

#[test]
fn bar_cohomology_matches_cyclic_oracle() {
    let start = Instant::now();
    for n in 1..=12u64 {
        let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
        for m in 2..=12u64 {
            for u in units_of_order_dividing(n, m) {
                let module = GModule::from_character(g.clone(), m, &[u]).unwrap();
                for i in 0..=3 {
                    let h = cohomology(&g, &module, i).unwrap();
                    let want = FgAbelianGroup::cyclic(cyclic_oracle(n, m, u, i));
                    assert_eq!(h.value, want, "Z/{n}, Z/{m}, u={u}, i={i}");
                }
            }
        }
    }
    eprintln!("cyclic oracle sweep: {:?}", start.elapsed());
}

#[test]
fn periodic_model_matches_bar_model() {
    for n in [2u64, 3, 4, 6] {
        let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
        for m in [2u64, 4, 6, 9] {
            for u in units_of_order_dividing(n, m) {
                let module = GModule::from_character(g.clone(), m, &[u]).unwrap();
                for i in 0..=3 {
                    assert_eq!(cohomology(&g, &module, i).unwrap().value, cohomology_periodic(&module, i).unwrap().value);
                }
            }
        }
    }
    let g = Arc::new(FiniteGroup::abelian(&[2, 2]).unwrap());
    let module = GModule::trivial(g.clone(), &[2]).unwrap();
    for i in 0..=3 {
        let expected = FgAbelianGroup::from_orders(&vec![2; i + 1]);
        assert_eq!(cohomology(&g, &module, i).unwrap().value, expected);
        assert_eq!(cohomology_periodic(&module, i).unwrap().value, expected);
    }
}

#[test]
fn worked_examples() {
    let c4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
    let z6 = GModule::trivial(c4.clone(), &[6]).unwrap();
    assert_eq!(cohomology(&c4, &z6, 2).unwrap().value, FgAbelianGroup::cyclic(2));

    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let sign7 = GModule::from_character(c2.clone(), 7, &[6]).unwrap();
    assert!(cohomology(&c2, &sign7, 1).unwrap().value.is_trivial());

    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let z2 = GModule::trivial(s3.clone(), &[2]).unwrap();
    assert_eq!(cohomology(&s3, &z2, 1).unwrap().value, FgAbelianGroup::cyclic(2));
    let z3 = GModule::trivial(s3.clone(), &[3]).unwrap();
    assert!(cohomology(&s3, &z3, 1).unwrap().value.is_trivial());
    assert!(cohomology(&s3, &z3, 2).unwrap().value.is_trivial());
    assert_eq!(cohomology(&s3, &z3, 4).unwrap().value, FgAbelianGroup::cyclic(3));
}

#[test]
fn differential_squares_to_zero() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    let m = GModule::regular(s3.clone(), 2).unwrap();
    let c = BarCochainComplex::new(&m, 2).unwrap();
    for n in 0..2 {
        let d0 = c.differential(n);
        let d1 = c.differential(n + 1);
        assert!(d1.mul(&d0, &c.moduli(n + 2)).data.iter().all(|&x| x == 0));
    }
}

#[test]
fn degree_zero_is_invariants_and_coinvariants() {
    let d4 = Arc::new(FiniteGroup::dihedral(4).unwrap());
    let m = GModule::regular(d4.clone(), 2).unwrap();
    assert_eq!(cohomology(&d4, &m, 0).unwrap().value, invariants(&m).0);
    assert_eq!(homology(&d4, &m, 0).unwrap(), coinvariants(&m).0);
}

#[test]
fn derivations_agree_with_bar_h1() {
    let s3 = Arc::new(FiniteGroup::symmetric(3).unwrap());
    for m in [GModule::trivial(s3.clone(), &[6]).unwrap(), GModule::regular(s3.clone(), 2).unwrap()] {
        let r = h1_via_derivations(&s3, &m).unwrap();
        assert_eq!(r.value.value, cohomology(&s3, &m, 1).unwrap().value);
        let der = r.der.order().unwrap();
        let pder = r.pder.order().unwrap();
        assert_eq!(der, pder * r.value.value.order().unwrap());
    }
}

#[test]
fn size_cap_is_enforced() {
    let s5 = Arc::new(FiniteGroup::symmetric(5).unwrap());
    let m = GModule::trivial(s5.clone(), &[2]).unwrap();
    match cohomology(&s5, &m, 3) {
        Err(CohomologyError::SizeCapExceeded { required, .. }) => assert_eq!(required, 120u128.pow(3)),
        other => panic!("expected a size-cap error, got {other:?}"),
    }
}
