use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use profinity_core::exact_algebra::*;
use proptest::prelude::*;

fn m(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn diag(s: &SmithForm) -> Vec<i64> {
    s.diagonal.iter().map(|d| i64::try_from(d).unwrap()).collect()
}

fn check_snf(a: &IntMatrix, s: &SmithForm) {
    assert_eq!(s.u.mul(a).mul(&s.v), s.d);
    assert!(s.d.is_diagonal());
    for i in 0..s.diagonal.len() {
        assert_eq!(s.d.get(i, i), &s.diagonal[i]);
        assert!(!s.diagonal[i].is_negative());
    }
    for w in s.diagonal.windows(2) {
        if w[0].is_zero() {
            assert!(w[1].is_zero());
        } else {
            assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
        }
    }
    assert_eq!(s.u.determinant().abs(), BigInt::from(1));
    assert_eq!(s.v.determinant().abs(), BigInt::from(1));
    assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
    assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(a.cols()));
}

#[test]
fn smith_normal_form_examples() {
    let id = m(&[vec![1, 0], vec![0, 1]]);
    let s = smith_normal_form(&id);
    assert_eq!(diag(&s), vec![1, 1]);
    assert_eq!(s.u, IntMatrix::identity(2));
    assert_eq!(s.v, IntMatrix::identity(2));

    let s = smith_normal_form(&IntMatrix::zeros(2, 2));
    assert_eq!(diag(&s), vec![0, 0]);
    assert_eq!(s.rank, 0);

    let a = m(&[vec![2, 4], vec![6, 8]]);
    let s = smith_normal_form(&a);
    assert_eq!(diag(&s), vec![2, 4]);
    check_snf(&a, &s);

    let s = smith_normal_form(&IntMatrix::zeros(0, 3));
    assert!(s.diagonal.is_empty());
}

#[test]
fn smith_normal_form_is_deterministic() {
    let a = m(&[vec![3, -7, 2], vec![12, 0, 5], vec![-4, 9, 9]]);
    let (x, y) = (smith_normal_form(&a), smith_normal_form(&a));
    assert_eq!((x.u, x.v, x.d), (y.u, y.v, y.d));
}

/// Diagonal of the Smith form by gcds of `k × k` minors, for matrices up to 3 × 3.
fn minor_oracle(rows: &[Vec<i64>]) -> Vec<i64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let det = |ri: &[usize], ci: &[usize]| -> i64 {
        match ri.len() {
            1 => rows[ri[0]][ci[0]],
            2 => rows[ri[0]][ci[0]] * rows[ri[1]][ci[1]] - rows[ri[0]][ci[1]] * rows[ri[1]][ci[0]],
            _ => {
                let s = |i: usize, j: usize| rows[ri[i]][ci[j]];
                s(0, 0) * (s(1, 1) * s(2, 2) - s(1, 2) * s(2, 1)) - s(0, 1) * (s(1, 0) * s(2, 2) - s(1, 2) * s(2, 0))
                    + s(0, 2) * (s(1, 0) * s(2, 1) - s(1, 1) * s(2, 0))
            }
        }
    };
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (0..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| {
            s.push(last);
            s
        })).collect()
    }
    let mut gcds = vec![1i64];
    for k in 1..=r.min(c) {
        let mut g = 0i64;
        for ri in subsets(r, k) {
            for ci in subsets(c, k) {
                g = num_integer::gcd(g, det(&ri, &ci));
            }
        }
        gcds.push(g);
    }
    (1..gcds.len()).map(|k| if gcds[k] == 0 { 0 } else { gcds[k] / gcds[k - 1] }).collect()
}

#[test]
fn cokernel_examples() {
    let (g, proj) = cokernel_structure(&m(&[vec![3]]));
    assert_eq!(g, FgAbelianGroup::cyclic(3));
    assert!(proj.is_surjective());
    assert!(cokernel_structure(&IntMatrix::identity(4)).0.is_trivial());
    let (g, _) = cokernel_structure(&m(&[vec![2, 0], vec![0, 0]]));
    assert_eq!(g, FgAbelianGroup::new(1, vec![2u32.into()]).unwrap());
    assert_eq!(g.to_string(), "Z/2 ⊕ Z");
}

fn two_term(d: IntMatrix) -> ChainComplexSpec {
    let (r, c) = (d.rows(), d.cols());
    ChainComplexSpec::new(0, vec![Presentation::free(r), Presentation::free(c)], BTreeMap::from([(1, d)])).unwrap()
}

#[test]
fn homology_examples() {
    let c = two_term(m(&[vec![2]]));
    assert_eq!(*homology_at(&c, 0).unwrap().group(), FgAbelianGroup::cyclic(2));
    assert!(homology_at(&c, 1).unwrap().group().is_trivial());

    let z = two_term(IntMatrix::zeros(2, 3));
    assert_eq!(*homology_at(&z, 0).unwrap().group(), FgAbelianGroup::free(2));
    assert_eq!(*homology_at(&z, 1).unwrap().group(), FgAbelianGroup::free(3));

    let e = two_term(IntMatrix::identity(1));
    assert!(homology_at(&e, 0).unwrap().group().is_trivial());
    assert!(homology_at(&e, 1).unwrap().group().is_trivial());

    assert!(matches!(homology_at(&e, 5), Err(AlgebraError::DegreeOutOfRange(5))));
}

#[test]
fn zero_differentials_return_presented_groups() {
    let groups = vec![Presentation::cyclic_sum(&[4, 6]), Presentation::free(2), Presentation::cyclic_sum(&[3])];
    let c = ChainComplexSpec::new(-1, groups, BTreeMap::new()).unwrap();
    assert_eq!(*homology_at(&c, -1).unwrap().group(), FgAbelianGroup::from_orders(&[2, 12]));
    assert_eq!(*homology_at(&c, 0).unwrap().group(), FgAbelianGroup::free(2));
    assert_eq!(*homology_at(&c, 1).unwrap().group(), FgAbelianGroup::cyclic(3));
}

#[test]
fn malformed_complex_names_the_degree() {
    let groups = vec![Presentation::free(1), Presentation::free(1), Presentation::free(1)];
    let d = BTreeMap::from([(1, m(&[vec![1]])), (2, m(&[vec![1]]))]);
    match ChainComplexSpec::new(0, groups, d) {
        Err(AlgebraError::MalformedComplex { degree }) => assert_eq!(degree, 2),
        other => panic!("expected a malformed-complex error, got {other:?}"),
    }
}

#[test]
fn induced_maps_examples() {
    let c = two_term(m(&[vec![2]]));
    let id = BTreeMap::from([(0, IntMatrix::identity(1)), (1, IntMatrix::identity(1))]);
    assert!(induced_map_on_homology(&c, &c, &id, 0).unwrap().is_identity());
    let zero = BTreeMap::from([(0, IntMatrix::zeros(1, 1)), (1, IntMatrix::zeros(1, 1))]);
    assert!(induced_map_on_homology(&c, &c, &zero, 0).unwrap().is_zero());
    let three = BTreeMap::from([(0, m(&[vec![3]])), (1, m(&[vec![3]]))]);
    assert!(induced_map_on_homology(&c, &c, &three, 0).unwrap().is_identity());

    let bad = BTreeMap::from([(0, m(&[vec![1]])), (1, m(&[vec![3]]))]);
    assert!(matches!(
        induced_map_on_homology(&c, &c, &bad, 0),
        Err(AlgebraError::NonCommutingSquare { degree: 1 })
    ));
}

/// `|Hom(A, B)|` and `|Ext(A, B)|` by enumeration, for finite `A = ⊕ Z/a_i`, `B = ⊕ Z/b_j`.
fn hom_ext_oracle(a: &[u64], b: &[u64]) -> (u64, u64) {
    let b_elems: Vec<Vec<u64>> = FgAbelianGroup::from_orders(b)
        .elements();
    let borders = FgAbelianGroup::from_orders(b).generator_orders();
    let borders: Vec<u64> = borders.iter().map(|x| u64::try_from(x).unwrap()).collect();
    let killed_by = |x: &Vec<u64>, k: u64| x.iter().zip(&borders).all(|(v, o)| (v * k).is_multiple_of(*o));
    let hom: u64 = a.iter().map(|&ai| b_elems.iter().filter(|x| killed_by(x, ai)).count() as u64).product();
    // Ext(Z/a, B) = B / aB.
    let ext: u64 = a
        .iter()
        .map(|&ai| {
            let mut multiples: Vec<Vec<u64>> =
                b_elems.iter().map(|x| x.iter().zip(&borders).map(|(v, o)| v * ai % o).collect()).collect();
            multiples.sort();
            multiples.dedup();
            b_elems.len() as u64 / multiples.len() as u64
        })
        .product();
    (hom, ext)
}

#[test]
fn hom_and_ext_examples() {
    let (h, e) = hom_and_ext(&FgAbelianGroup::cyclic(4), &FgAbelianGroup::cyclic(6));
    assert_eq!((h, e), (FgAbelianGroup::cyclic(2), FgAbelianGroup::cyclic(2)));
    let a = FgAbelianGroup::from_orders(&[2, 6]);
    let (h, e) = hom_and_ext(&FgAbelianGroup::free(1), &a);
    assert_eq!((h, e), (a, FgAbelianGroup::trivial()));
    assert!(hom_and_ext(&FgAbelianGroup::cyclic(2), &FgAbelianGroup::free(1)).0.is_trivial());
}

#[test]
fn hom_and_ext_match_enumeration_up_to_order_36() {
    let mut groups: Vec<Vec<u64>> = Vec::new();
    for n in 2..=36u64 {
        groups.push(vec![n]);
        for d in 2..n {
            if n % d == 0 && (n / d) % d == 0 && d * (n / d) == n {
                groups.push(vec![d, n / d]);
            }
        }
    }
    groups.push(vec![2, 2, 2]);
    groups.push(vec![2, 2, 4]);
    groups.push(vec![2, 2, 6]);
    groups.push(vec![3, 3, 3]);
    for a in &groups {
        for b in &groups {
            if a.iter().product::<u64>() * b.iter().product::<u64>() > 36 * 36 {
                continue;
            }
            let (h, e) = hom_and_ext(&FgAbelianGroup::from_orders(a), &FgAbelianGroup::from_orders(b));
            let (oh, oe) = hom_ext_oracle(a, b);
            assert_eq!(h.order_u64(), Some(oh), "Hom({a:?}, {b:?})");
            assert_eq!(e.order_u64(), Some(oe), "Ext({a:?}, {b:?})");
        }
    }
}

#[test]
fn tensor_and_tor_examples() {
    let (t, tor) = tensor_and_tor(&FgAbelianGroup::cyclic(4), &FgAbelianGroup::cyclic(6));
    assert_eq!((t, tor), (FgAbelianGroup::cyclic(2), FgAbelianGroup::cyclic(2)));
    assert!(tensor_and_tor(&FgAbelianGroup::cyclic(2), &FgAbelianGroup::cyclic(3)).0.is_trivial());
}

fn small_matrix(max_dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

/// A unimodular matrix as a product of elementary operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let e = IntMatrix::from_fn(n, n, |a, b| {
            if a == b {
                BigInt::from(1)
            } else if a == i && b == j {
                BigInt::from(k)
            } else {
                BigInt::zero()
            }
        });
        u = e.mul(&u);
    }
    u
}

/// Order of `ker(d1) / im(d2)` over `Z/m`, by enumerating `(Z/m)^n`.
fn brute_homology_mod(d1: &IntMatrix, d2: &IntMatrix, n: usize, modulus: i64) -> u64 {
    let vecs: Vec<Vec<i64>> = (0..(modulus as usize).pow(n as u32))
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let v = (x % modulus as usize) as i64;
                    x /= modulus as usize;
                    v
                })
                .collect()
        })
        .collect();
    let apply = |a: &IntMatrix, v: &[i64]| -> Vec<i64> {
        (0..a.rows())
            .map(|i| {
                let s: BigInt = (0..a.cols()).map(|j| a.get(i, j) * v[j]).sum();
                i64::try_from(s.mod_floor(&BigInt::from(modulus))).unwrap()
            })
            .collect()
    };
    let ker = vecs.iter().filter(|v| apply(d1, v).iter().all(|&x| x == 0)).count() as u64;
    let src = (modulus as usize).pow(d2.cols() as u32);
    let mut img: Vec<Vec<i64>> = (0..src)
        .map(|mut x| {
            let w: Vec<i64> = (0..d2.cols())
                .map(|_| {
                    let v = (x % modulus as usize) as i64;
                    x /= modulus as usize;
                    v
                })
                .collect();
            apply(d2, &w)
        })
        .collect();
    img.sort();
    img.dedup();
    ker / img.len() as u64
}

use num_integer::Integer;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_invariants(rows in small_matrix(5)) {
        let a = m(&rows);
        check_snf(&a, &smith_normal_form(&a));
    }

    #[test]
    fn snf_matches_minor_gcds(rows in small_matrix(3)) {
        let s = smith_normal_form(&m(&rows));
        prop_assert_eq!(diag(&s), minor_oracle(&rows));
    }

    #[test]
    fn homology_orders_match_reductions(
        n2 in 1usize..=3,
        n1 in 1usize..=4,
        n0 in 1usize..=3,
        d2e in prop::collection::vec(-3i64..=3, 12),
        re in prop::collection::vec(-3i64..=3, 36),
        modulus in prop::sample::select(vec![2i64, 3, 4]),
    ) {
        let d2 = IntMatrix::from_fn(n1, n2, |i, j| BigInt::from(d2e[i * n2 + j]));
        // Rows of d1 are combinations of vectors annihilating the image of d2.
        let left = integer_kernel(&d2.transpose());
        let k = left.cols();
        let r = IntMatrix::from_fn(n0, k, |i, j| BigInt::from(re[(i * k + j) % re.len()]));
        let d1 = r.mul(&left.transpose());
        let c = ChainComplexSpec::new(
            0,
            vec![Presentation::free(n0), Presentation::free(n1), Presentation::free(n2)],
            BTreeMap::from([(1, d1.clone()), (2, d2.clone())]),
        ).unwrap();
        let h0 = homology_at(&c, 0).unwrap().group().clone();
        let h1 = homology_at(&c, 1).unwrap().group().clone();
        let zm = FgAbelianGroup::cyclic(modulus as u64);
        let (t, _) = tensor_and_tor(&h1, &zm);
        let (_, tor) = tensor_and_tor(&h0, &zm);
        let expected = t.order_u64().unwrap() * tor.order_u64().unwrap();
        prop_assert_eq!(brute_homology_mod(&d1, &d2, n1, modulus), expected);
    }

    #[test]
    fn induced_maps_are_functorial(
        rows in small_matrix(3),
        f0 in prop::collection::vec(-3i64..=3, 9),
        g0 in prop::collection::vec(-3i64..=3, 9),
        f1ops in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 4),
        g1ops in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 4),
    ) {
        let d = m(&rows);
        let (r, c) = (d.rows(), d.cols());
        let f0 = IntMatrix::from_fn(r, r, |i, j| BigInt::from(f0[i * 3 + j]));
        let g0 = IntMatrix::from_fn(r, r, |i, j| BigInt::from(g0[i * 3 + j]));
        let f1 = unimodular(c, &f1ops);
        let g1 = unimodular(c, &g1ops);
        let inv = |u: &IntMatrix| smith_normal_form(u).v.mul(&smith_normal_form(u).u);
        let s = two_term(d.clone());
        let t = two_term(f0.mul(&d).mul(&inv(&f1)));
        let dt = f0.mul(&d).mul(&inv(&f1));
        let u = two_term(g0.mul(&dt).mul(&inv(&g1)));
        let f = BTreeMap::from([(0, f0.clone()), (1, f1.clone())]);
        let g = BTreeMap::from([(0, g0.clone()), (1, g1.clone())]);
        let gf = BTreeMap::from([(0, g0.mul(&f0)), (1, g1.mul(&f1))]);
        for k in 0..=1 {
            let lhs = induced_map_on_homology(&s, &u, &gf, k).unwrap();
            let rhs = induced_map_on_homology(&t, &u, &g, k).unwrap().compose(&induced_map_on_homology(&s, &t, &f, k).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
