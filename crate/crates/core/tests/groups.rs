use std::sync::Arc;

use profinity_core::exact_algebra::FgAbelianGroup;
use profinity_core::groups::*;

fn corpus() -> Vec<FiniteGroup> {
    let mut out: Vec<FiniteGroup> = (1..=12).map(|n| FiniteGroup::cyclic(n).unwrap()).collect();
    for moduli in [&[2u64, 2][..], &[2, 4], &[2, 2, 2], &[3, 3]] {
        out.push(FiniteGroup::abelian(moduli).unwrap());
    }
    out.push(FiniteGroup::symmetric(3).unwrap());
    out.push(FiniteGroup::symmetric(4).unwrap());
    out.push(FiniteGroup::alternating(4).unwrap());
    out.push(FiniteGroup::quaternion().unwrap());
    for n in [3u64, 4, 5, 6] {
        out.push(FiniteGroup::dihedral(n).unwrap());
    }
    let s3 = FiniteGroup::symmetric(3).unwrap();
    out.push(FiniteGroup::product(&s3, &FiniteGroup::cyclic(2).unwrap()).unwrap());
    out
}

fn table(g: &FiniteGroup) -> Vec<Vec<usize>> {
    g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect()).collect()
}

#[test]
fn group_laws_hold_for_the_corpus() {
    for g in corpus() {
        let n = g.order();
        for a in 0..n {
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
            assert_eq!(g.mul(g.identity(), a), a);
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), "{}", g.name());
                }
            }
        }
        assert_eq!(g.closure(g.generators()).len(), n);
        let rebuilt = FiniteGroup::from_table(g.name(), table(&g), g.generators().to_vec()).unwrap();
        assert_eq!(rebuilt.order(), n);
    }
}

#[test]
fn constructor_examples() {
    let c1 = FiniteGroup::cyclic(1).unwrap();
    assert_eq!(c1.order(), 1);
    assert!(c1.abelian_invariants().is_trivial());

    let c6 = FiniteGroup::cyclic(6).unwrap();
    let c2c3 = FiniteGroup::product(&FiniteGroup::cyclic(2).unwrap(), &FiniteGroup::cyclic(3).unwrap()).unwrap();
    assert_eq!(c6.abelian_invariants(), c2c3.abelian_invariants());
    assert_eq!(c6.abelian_invariants(), FgAbelianGroup::cyclic(6));
    assert_eq!(c6.order_statistics(), c2c3.order_statistics());

    let s3 = FiniteGroup::symmetric(3).unwrap();
    assert_eq!(s3.order(), 6);
    assert!(!s3.is_abelian());
    assert!(s3.elements().any(|x| s3.elements().any(|y| s3.mul(x, y) != s3.mul(y, x))));
}

#[test]
fn malformed_tables_are_rejected() {
    // A Latin square on 5 symbols with identity 0 that is not associative.
    let loop5 = vec![
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    match FiniteGroup::from_table("loop", loop5, vec![1, 2]) {
        Err(GroupError::InvalidTable(msg)) => assert!(msg.contains("associativity fails at ("), "{msg}"),
        other => panic!("expected an associativity failure, got {other:?}"),
    }
    let not_latin = vec![vec![0, 1], vec![1, 1]];
    assert!(matches!(FiniteGroup::from_table("x", not_latin, vec![1]), Err(GroupError::InvalidTable(_))));
    let c2 = vec![vec![0, 1], vec![1, 0]];
    assert!(matches!(FiniteGroup::from_table("x", c2, vec![]), Err(GroupError::NotGenerating)));
}

#[test]
fn order_cap_is_enforced() {
    let s5 = FiniteGroup::symmetric(5).unwrap();
    let c4 = FiniteGroup::cyclic(4).unwrap();
    assert!(matches!(FiniteGroup::product(&s5, &c4), Err(GroupError::OrderCapExceeded { order: 480, cap: 360 })));
}

#[test]
fn quotient_examples() {
    let c4 = FiniteGroup::cyclic(4).unwrap();
    let (q, p) = quotient_by(&c4, &[0, 2]).unwrap();
    assert_eq!(q.order(), 2);
    assert_eq!(q.abelian_invariants(), FgAbelianGroup::cyclic(2));
    assert!(p.is_surjective());
    assert_eq!(p.kernel(), vec![0, 2]);

    let s3 = FiniteGroup::symmetric(3).unwrap();
    let (q, _) = quotient_by(&s3, &[0]).unwrap();
    assert_eq!(q.order(), 6);
    assert!(!q.is_abelian());

    let a3 = s3.normal_subgroups().into_iter().find(|n| n.len() == 3).unwrap();
    let (q, p) = quotient_by(&s3, &a3).unwrap();
    assert_eq!(q.order(), 2);
    assert_eq!(p.kernel(), a3);

    let h = s3.all_subgroups().into_iter().find(|h| h.len() == 2).unwrap();
    match quotient_by(&s3, &h) {
        Err(GroupError::NotNormal { generator, element }) => {
            assert!(h.contains(&element));
            assert!(!h.contains(&s3.conjugate(generator, element)));
        }
        other => panic!("expected a conjugation witness, got {other:?}"),
    }
}

#[test]
fn projections_are_homomorphisms_and_indices_multiply() {
    for g in corpus().into_iter().filter(|g| g.has_table() && g.order() <= 24) {
        let normals = g.normal_subgroups();
        for n in &normals {
            let (q, p) = quotient_by(&g, n).unwrap();
            assert_eq!(q.order() * n.len(), g.order());
            for x in g.elements() {
                for y in g.elements() {
                    assert_eq!(p.image(g.mul(x, y)), q.mul(p.image(x), p.image(y)));
                }
            }
            for m in normals.iter().filter(|m| n.iter().all(|x| m.contains(x))) {
                let mut image: Vec<usize> = m.iter().map(|&x| p.image(x)).collect();
                image.sort_unstable();
                image.dedup();
                let (qq, _) = quotient_by(&q, &image).unwrap();
                assert_eq!(qq.order(), g.order() / m.len());
            }
        }
    }
}

#[test]
fn transversal_examples_and_sizes() {
    let c4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
    let all: Vec<usize> = c4.elements().collect();
    assert_eq!(transversal(c4.clone(), &all).unwrap().transversal, vec![0]);
    assert_eq!(transversal(c4.clone(), &[0]).unwrap().transversal, all);
    assert_eq!(transversal(c4.clone(), &[0, 2]).unwrap().transversal.len(), 2);
    assert!(transversal(c4, &[0, 1]).is_err());

    for g in corpus().into_iter().filter(|g| g.order() <= 24) {
        let g = Arc::new(g);
        for h in g.all_subgroups() {
            let t = transversal(g.clone(), &h).unwrap();
            assert_eq!(t.transversal.len(), t.index());
            assert_eq!(t.index() * h.len(), g.order());
            assert_eq!(t.transversal[0], g.identity());
            let mut hit = vec![0usize; t.index()];
            for &r in &t.transversal {
                hit[t.coset(r)] += 1;
            }
            assert!(hit.iter().all(|&c| c == 1));
            for x in g.elements() {
                let (hpart, c) = t.decompose(x);
                assert_eq!(g.mul(t.embedding[hpart], t.transversal[c]), x);
            }
        }
    }
}
