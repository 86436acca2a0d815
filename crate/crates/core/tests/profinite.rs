use std::sync::Arc;

use profinity_core::cohomology::periodic_inflation;
use profinity_core::exact_algebra::FgAbelianGroup;
use profinity_core::gmodules::GModule;
use profinity_core::groups::{FiniteGroup, Homomorphism};
use profinity_core::profinite::*;
use proptest::prelude::*;

fn cyc(n: u64) -> FgAbelianGroup {
    FgAbelianGroup::cyclic(n)
}

fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

fn factorial(k: u64) -> u64 {
    (1..=k).product()
}

fn trivial_at(t: &QuotientTower, level: usize, m: u64) -> GModule {
    GModule::trivial(t.level(level).clone(), &[m]).unwrap()
}

#[test]
fn presets_have_the_expected_levels() {
    let z = build_tower(&TowerSpec::Zhat { levels: 4 }).unwrap();
    assert_eq!(z.label(), "zhat");
    let orders: Vec<usize> = z.levels().iter().map(|g| g.order()).collect();
    assert_eq!(orders, vec![1, 2, 6, 24]);

    let p = build_tower(&TowerSpec::Zp { p: 2, levels: 5 }).unwrap();
    assert_eq!(p.label(), "zp(2)");
    let orders: Vec<usize> = p.levels().iter().map(|g| g.order()).collect();
    assert_eq!(orders, vec![2, 4, 8, 16, 32]);

    let z2 = build_tower(&TowerSpec::ZhatPower { rank: 2, levels: 3 }).unwrap();
    for (k, g) in z2.levels().iter().enumerate() {
        let n = factorial(k as u64 + 1);
        assert_eq!(g.cyclic_moduli().unwrap(), &[n, n]);
    }
    assert!(z2.is_cyclic_product());

    assert_eq!(build_tower(&TowerSpec::zhat()).unwrap().depth(), DEFAULT_ZHAT_DEPTH);
    assert_eq!(build_tower(&TowerSpec::zp(3)).unwrap().depth(), DEFAULT_ZP_DEPTH);
    assert_eq!(build_tower(&TowerSpec::zhat_power(2)).unwrap().depth(), DEFAULT_ZHAT_POWER_DEPTH);
}

#[test]
fn bad_towers_are_rejected() {
    assert!(QuotientTower::zhat(1).is_err());
    assert!(QuotientTower::zp(6, 3).is_err());
    let c4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
    let c2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
    let zero = Homomorphism::from_generator_images(c4.clone(), c2.clone(), vec![0]).unwrap();
    assert!(matches!(
        QuotientTower::new("bad", vec![c2.clone(), c4.clone()], vec![zero]),
        Err(ProfiniteError::NotSurjective(1, 0))
    ));
    let onto = Homomorphism::reduction(c4.clone(), c2.clone()).unwrap();
    assert!(QuotientTower::new("ok", vec![c2.clone(), c4.clone()], vec![onto.clone()]).is_ok());
    assert!(QuotientTower::new("backwards", vec![c4, c2], vec![onto]).is_err());
}

#[test]
fn composite_projections_are_consistent() {
    let t = QuotientTower::zhat(6).unwrap();
    for from in 0..t.depth() {
        for mid in 0..=from {
            for to in 0..=mid {
                let direct = t.projection_between(from, to).unwrap();
                let a = t.projection_between(from, mid).unwrap();
                let b = t.projection_between(mid, to).unwrap();
                for x in [0usize, 1, t.level(from).order() - 1] {
                    let x = x % t.level(from).order();
                    assert_eq!(direct.image(x), b.image(a.image(x)));
                }
            }
        }
    }
}

#[test]
fn h1_with_z6_coefficients_stabilizes() {
    let t = QuotientTower::zhat(8).unwrap();
    let r = limit_cohomology_discrete(&t, &trivial_at(&t, 0, 6), 1, DEFAULT_WINDOW).unwrap();
    for (k, v) in r.values.iter().enumerate() {
        assert_eq!(*v, cyc(gcd(factorial(k as u64 + 1), 6)));
    }
    assert!(r.transitions.iter().all(|m| m.is_injective()));
    assert_eq!(r.verdict, LimitVerdict::Stabilized(cyc(6)));
    assert_eq!(r.direction, LimitDirection::Direct);
    assert_eq!(r.parameters.tower_depth, 8);
}

#[test]
fn h2_with_z2_coefficients_has_vanishing_stable_image() {
    let t = QuotientTower::zhat(8).unwrap();
    let r = limit_cohomology_discrete(&t, &trivial_at(&t, 0, 2), 2, DEFAULT_WINDOW).unwrap();
    assert!(r.values[0].is_trivial());
    assert!(r.values[1..].iter().all(|v| *v == cyc(2)));
    // H^2(Z/k!, Z/2) -> H^2(Z/(k+1)!, Z/2) is multiplication by k + 1.
    for (i, m) in r.transitions.iter().enumerate().skip(1) {
        let k = i as u64 + 1;
        assert_eq!(m.is_zero(), (k + 1).is_multiple_of(2), "k = {k}");
    }
    assert_eq!(r.verdict, LimitVerdict::Stabilized(FgAbelianGroup::trivial()));
}

#[test]
fn degree_zero_is_invariants() {
    let t = QuotientTower::zhat(6).unwrap();
    for m in [2u64, 6, 9] {
        let r = limit_cohomology_discrete(&t, &trivial_at(&t, 0, m), 0, DEFAULT_WINDOW).unwrap();
        assert_eq!(r.verdict, LimitVerdict::Stabilized(cyc(m)));
        let h = limit_homology(&t, &trivial_at(&t, 0, m), 0, DEFAULT_WINDOW).unwrap();
        assert_eq!(h.verdict, LimitVerdict::Stabilized(cyc(m)));
    }
    // Z/2 acting on Z/3 by inversion: no invariants, no coinvariants.
    let sign = GModule::from_character(t.level(1).clone(), 3, &[2]).unwrap();
    let r = limit_cohomology_discrete(&t, &sign, 0, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.parameters.first_level, 1);
    assert_eq!(r.verdict, LimitVerdict::Stabilized(FgAbelianGroup::trivial()));
    let h = limit_homology(&t, &sign, 0, DEFAULT_WINDOW).unwrap();
    assert_eq!(h.verdict, LimitVerdict::Stabilized(FgAbelianGroup::trivial()));
}

#[test]
fn short_towers_are_inconclusive() {
    let t = QuotientTower::zhat(4).unwrap();
    let r = limit_cohomology_discrete(&t, &trivial_at(&t, 0, 2), 1, DEFAULT_WINDOW).unwrap();
    assert!(matches!(r.verdict, LimitVerdict::Inconclusive(_)));
    assert_eq!(r.values.len(), 4);
    assert!(limit_cohomology_discrete(&t, &trivial_at(&t, 0, 2), 1, 0).is_err());
}

#[test]
fn unattached_modules_are_rejected() {
    let t = QuotientTower::zhat(4).unwrap();
    let c5 = Arc::new(FiniteGroup::cyclic(5).unwrap());
    let a = GModule::trivial(c5, &[2]).unwrap();
    assert!(matches!(limit_cohomology_discrete(&t, &a, 1, 2), Err(ProfiniteError::UnattachedModule)));
}

#[test]
fn compact_h1_over_factorial_coefficients_is_a_tower() {
    let t = QuotientTower::zhat(8).unwrap();
    let coeffs = ModuleTower::trivial_cyclic(&t, &[2, 6, 24]).unwrap();
    let r = limit_cohomology_compact(&t, &coeffs, 1, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.direction, LimitDirection::Inverse);
    assert_eq!(r.values, vec![cyc(2), cyc(6), cyc(24)]);
    match &r.verdict {
        LimitVerdict::Tower { values, surjective } => {
            assert_eq!(values, &r.values);
            assert_eq!(surjective, &vec![true, true]);
        }
        other => panic!("expected a tower, got {other:?}"),
    }
    assert!(r.transitions.iter().all(|m| !m.is_injective()));
}

#[test]
fn compact_h2_for_zp_vanishes() {
    let t = QuotientTower::zp(2, 6).unwrap();
    let coeffs = ModuleTower::trivial_cyclic(&t, &[2, 4]).unwrap();
    let r = limit_cohomology_compact(&t, &coeffs, 2, 2).unwrap();
    assert_eq!(r.values, vec![FgAbelianGroup::trivial(); 2]);
    // Two coefficient levels are one transition short of a window-2 certificate.
    assert_eq!(r.verdict, LimitVerdict::Tower { values: r.values.clone(), surjective: vec![true] });
    let r = limit_cohomology_compact(&t, &coeffs, 2, 1).unwrap();
    assert!(matches!(r.verdict, LimitVerdict::Inconclusive(_)));

    let deeper = QuotientTower::zp(2, 8).unwrap();
    let coeffs = ModuleTower::trivial_cyclic(&deeper, &[2, 4, 8]).unwrap();
    let r = limit_cohomology_compact(&deeper, &coeffs, 2, 2).unwrap();
    assert!(matches!(r.verdict, LimitVerdict::Inconclusive(_)));
    let r = limit_cohomology_compact(&deeper, &coeffs, 2, 3).unwrap();
    assert_eq!(r.values, vec![FgAbelianGroup::trivial(); 3]);
}

#[test]
fn constant_coefficient_tower_matches_the_discrete_limit() {
    let t = QuotientTower::zhat(7).unwrap();
    let a = trivial_at(&t, 0, 6);
    for n in 0..=2 {
        let d = limit_cohomology_discrete(&t, &a, n, 2).unwrap();
        let c = limit_cohomology_compact(&t, &ModuleTower::constant(&t, &a, 3).unwrap(), n, 2).unwrap();
        match (&d.verdict, &c.verdict) {
            (LimitVerdict::Stabilized(x), LimitVerdict::Stabilized(y)) => assert_eq!(x, y),
            (LimitVerdict::Inconclusive(_), LimitVerdict::Inconclusive(_)) => {}
            other => panic!("n = {n}: {other:?}"),
        }
    }
}

#[test]
fn homology_over_levels() {
    let t = QuotientTower::zhat(8).unwrap();
    let r = limit_homology(&t, &trivial_at(&t, 0, 6), 1, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.verdict, LimitVerdict::Stabilized(cyc(6)));
    for (k, v) in r.values.iter().enumerate() {
        assert_eq!(*v, cyc(gcd(factorial(k as u64 + 1), 6)));
    }

    let coeffs = ModuleTower::trivial_cyclic(&t, &[2, 6, 24]).unwrap();
    let r = limit_homology_compact(&t, &coeffs, 1, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.values, vec![cyc(2), cyc(6), cyc(24)]);
    assert!(matches!(&r.verdict, LimitVerdict::Tower { surjective, .. } if surjective.iter().all(|&s| s)));
}

#[test]
fn transitions_compose_like_the_composite_inflation() {
    let t = QuotientTower::zhat(6).unwrap();
    for (m, n) in [(6u64, 1usize), (4, 2), (6, 3)] {
        let a = trivial_at(&t, 0, m);
        let r = limit_cohomology_discrete(&t, &a, n, DEFAULT_WINDOW).unwrap();
        for from in 0..r.values.len() {
            for to in from..r.values.len() {
                let direct = periodic_inflation(&t.projection_between(to, from).unwrap(), &t.inflate(&a, 0, from).unwrap(), n)
                    .unwrap();
                assert_eq!(r.composite(from, to).unwrap(), direct.map, "m={m} n={n} {from}->{to}");
                for mid in from..=to {
                    let two = r.composite(mid, to).unwrap().compose(&r.composite(from, mid).unwrap()).unwrap();
                    assert_eq!(two, direct.map);
                }
            }
        }
    }
}

#[test]
fn goodness_instance_for_zhat() {
    let t = QuotientTower::zhat(12).unwrap();
    for m in [2u64, 3, 4, 6, 8, 12] {
        let a = trivial_at(&t, 0, m);
        let got: Vec<LimitVerdict> =
            (0..=3).map(|n| limit_cohomology_discrete(&t, &a, n, 4).unwrap().verdict).collect();
        let want = [cyc(m), cyc(m), FgAbelianGroup::trivial(), FgAbelianGroup::trivial()];
        for (n, (g, w)) in got.iter().zip(want).enumerate() {
            assert_eq!(*g, LimitVerdict::Stabilized(w), "m={m} n={n}");
        }
    }
}

#[test]
fn exterior_pattern_for_zhat_squared() {
    let t = QuotientTower::zhat_power(2, 9).unwrap();
    for m in [2u64, 3] {
        let a = trivial_at(&t, 0, m);
        let want = [
            cyc(m),
            FgAbelianGroup::from_orders(&[m, m]),
            cyc(m),
            FgAbelianGroup::trivial(),
        ];
        for (n, w) in want.into_iter().enumerate() {
            let r = limit_cohomology_discrete(&t, &a, n, 3).unwrap();
            assert_eq!(r.verdict, LimitVerdict::Stabilized(w), "m={m} n={n}");
        }
    }
}

#[test]
fn cd_estimate_reports_evidence() {
    let t = QuotientTower::zp(2, 6).unwrap();
    let r = cd_estimate(&t, 2, 4, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.estimate, 1);
    assert_eq!(r.degree_cap, 2);
    assert!(r.evidence.iter().any(|e| e.coefficients == "Z/2[Z/2]"));
    assert_eq!(
        r.inconclusive,
        r.evidence.iter().filter(|e| matches!(e.verdict, LimitVerdict::Inconclusive(_))).count()
    );
    assert!(cd_estimate(&t, 0, 4, 2).is_err());
    assert!(cd_estimate(&t, 2, 1, 2).is_err());
}

#[test]
fn dualizing_module_for_zp() {
    let t = QuotientTower::zp(2, 10).unwrap();
    let r = dualizing_module_estimate(&t, 1, 8, DEFAULT_WINDOW).unwrap();
    assert_eq!(r.class, DualityClass::OrientablePoincare);
    let orders: Vec<u64> = r.levels.iter().map(|l| l.coefficient_order).collect();
    assert_eq!(orders, vec![2, 4, 8]);
    assert!(r.levels.iter().all(|l| l.action_trivial && l.value == cyc(l.coefficient_order)));
    assert!(r.transitions.iter().all(|m| m.is_surjective()));
    assert!(r.verdict.contains("Z_2"), "{}", r.verdict);

    let shallow = QuotientTower::zp(2, 3).unwrap();
    let r = dualizing_module_estimate(&shallow, 1, 8, DEFAULT_WINDOW).unwrap();
    assert!(matches!(r.class, DualityClass::Inconclusive(_)));
}

#[test]
fn stabilized_values_do_not_depend_on_the_window() {
    let mut violations = Vec::new();
    for depth in 5..=8 {
        let t = QuotientTower::zhat(depth).unwrap();
        for m in 2u64..=12 {
            let a = trivial_at(&t, 0, m);
            for n in 0..=3 {
                let verdicts: Vec<LimitVerdict> =
                    (1..=4).map(|w| limit_cohomology_discrete(&t, &a, n, w).unwrap().verdict).collect();
                for (i, x) in verdicts.iter().enumerate() {
                    for (j, y) in verdicts.iter().enumerate().skip(i + 1) {
                        if let (Some(x), Some(y)) = (x.stabilized(), y.stabilized()) {
                            if x != y {
                                violations.push(format!("depth {depth}, Z/{m}, n={n}: w={} gives {x}, w={} gives {y}", i + 1, j + 1));
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(violations.is_empty(), "{} window disagreements, e.g. {:?}", violations.len(), &violations[..violations.len().min(5)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transitions_compose_for_zp(p in prop::sample::select(vec![2u64, 3]), m in 2u64..=9, n in 0usize..=3) {
        let t = QuotientTower::zp(p, 4).unwrap();
        let a = trivial_at(&t, 0, m);
        let r = limit_cohomology_discrete(&t, &a, n, 1).unwrap();
        let last = r.values.len() - 1;
        for mid in 0..=last {
            let two = r.composite(mid, last).unwrap().compose(&r.composite(0, mid).unwrap()).unwrap();
            prop_assert_eq!(two, r.composite(0, last).unwrap());
        }
    }
}
