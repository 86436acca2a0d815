//! Computations that reach the same answers as the core by a different route.

use std::collections::BTreeMap;

use profinity_core::exact_algebra::local::{
    factorize, local_snf, valuation, LocalCokernel, LocalKernel, LocalMatrix, LocalRing,
};
use profinity_core::exact_algebra::FgAbelianGroup;
use profinity_core::gmodules::GModule;
use profinity_core::groups::FiniteGroup;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `H^d(Z/n, Z/m)` with the generator acting by `s`, by counting elements.
///
/// `H^0 = M^G`, `H^odd = ker N / (s − 1)M`, `H^even = M^G / N M` with `N = 1 + s + … + s^{n−1}`.
pub fn cyclic_cohomology(n: u64, m: u64, s: u64, d: usize) -> FgAbelianGroup {
    let norm = (0..n).fold((0u64, 1u64), |(acc, p), _| ((acc + p) % m, p * s % m)).0;
    let fixed = (0..m).filter(|&x| x * s % m == x).count() as u64;
    let order = if d == 0 {
        fixed
    } else if d % 2 == 1 {
        let ker_norm = (0..m).filter(|&x| x * norm % m == 0).count() as u64;
        let aug = m / gcd((s + m - 1) % m, m);
        ker_norm / aug
    } else {
        let norm_image = m / gcd(norm, m);
        fixed / norm_image
    };
    FgAbelianGroup::cyclic(order)
}

/// Index of a tuple of non-identity elements, each written as `x − 1` in base `|G| − 1`.
fn tuple_index(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + (x - 1))
}

fn tuples(n: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| (1..=base).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Entries `(row, col, coefficient)` of the normalized bar differential
/// `d_n : M ⊗ Z[G'^n] → M ⊗ Z[G'^{n−1}]`, `G' = G ∖ {e}`, with the right action `m·g = g⁻¹m`.
fn chain_differential(g: &FiniteGroup, m: &GModule, n: usize) -> BTreeMap<(usize, usize), i64> {
    let base = g.order() - 1;
    let k = m.dim();
    let mut d = BTreeMap::new();
    let mut add = |row_tuple: &[usize], col: usize, coeff: &dyn Fn(usize, usize) -> i64| {
        if row_tuple.contains(&0) {
            return;
        }
        let r0 = tuple_index(row_tuple, base) * k;
        for j in 0..k {
            for l in 0..k {
                let c = coeff(j, l);
                if c != 0 {
                    *d.entry((r0 + j, col + l)).or_insert(0) += c;
                }
            }
        }
    };
    for t in tuples(n, base) {
        let c0 = tuple_index(&t, base) * k;
        let act = m.action(g.inv(t[0]));
        add(&t[1..], c0, &|j, l| act.get(j, l) as i64);
        for i in 0..n - 1 {
            let mut s = t.clone();
            s[i] = g.mul(t[i], t[i + 1]);
            s.remove(i + 1);
            let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
            add(&s, c0, &|j, l| if j == l { sign } else { 0 });
        }
        let sign = if n.is_multiple_of(2) { 1 } else { -1 };
        add(&t[..n - 1], c0, &|j, l| if j == l { sign } else { 0 });
    }
    d
}

/// Chain differential over `Z/p^a`, with the summand `Z/p^b` of a coordinate embedded as `p^{a−b}·Z/p^a`.
fn local_differential(
    ring: &LocalRing,
    entries: &BTreeMap<(usize, usize), i64>,
    rows: usize,
    cols: usize,
    exps: &[u32],
) -> LocalMatrix {
    let k = exps.len();
    let mut out = LocalMatrix::zeros(rows, cols);
    for (&(r, c), &v) in entries {
        let (bj, bl) = (exps[r % k], exps[c % k]);
        let q = ring.q as i128;
        let v = if bl >= bj {
            (v as i128 * ring.p.pow(bl - bj) as i128).rem_euclid(q)
        } else {
            (v as i128 / ring.p.pow(bj - bl) as i128).rem_euclid(q)
        };
        out.set(r, c, ring.add(out.get(r, c), v as u64));
    }
    out
}

fn embed_columns(ring: &LocalRing, a: &LocalMatrix, exps: &[u32]) -> LocalMatrix {
    let k = exps.len();
    let mut out = a.clone();
    for j in 0..a.cols {
        let s = ring.pow_p(ring.a - exps[j % k]);
        for i in 0..a.rows {
            out.set(i, j, ring.mul(a.get(i, j), s));
        }
    }
    out
}

/// `H_i(G, M) ⊗ Z_(p)` as exponents of `p`.
fn local_chain_homology(g: &FiniteGroup, m: &GModule, i: usize, p: u64) -> Vec<u32> {
    let exps: Vec<u32> = m.moduli().iter().map(|&x| valuation(x, p)).collect();
    let a = *exps.iter().max().unwrap();
    let ring = LocalRing::new(p, a);
    let dim = |n: usize| chain_dimension(g, m, n);
    // cycles: x = P z with D_i P z = 0
    let cycles: Vec<Vec<u64>> = if i == 0 {
        (0..dim(0)).map(|j| (0..dim(0)).map(|r| u64::from(r == j)).collect()).collect()
    } else {
        let d = local_differential(&ring, &chain_differential(g, m, i), dim(i - 1), dim(i), &exps);
        LocalKernel::compute(ring, embed_columns(&ring, &d, &exps)).generators()
    };
    let n = dim(i);
    let k = exps.len();
    let mut z = LocalMatrix::zeros(n, cycles.len());
    for (c, v) in cycles.iter().enumerate() {
        for r in 0..n {
            z.set(r, c, ring.mul(v[r], ring.pow_p(a - exps[r % k])));
        }
    }
    let snf = local_snf(ring, z, true, false);
    let u = snf.u.expect("U tracked");
    let d = local_differential(&ring, &chain_differential(g, m, i + 1), n, dim(i + 1), &exps);
    let b = embed_columns(&ring, &d, &exps);
    let mut coords = LocalMatrix::zeros(snf.rank, b.cols);
    for t in 0..snf.rank {
        let urow = u.row(t);
        for c in 0..b.cols {
            let w = (0..n).fold(0u64, |acc, r| ring.add(acc, ring.mul(urow[r], b.get(r, c))));
            coords.set(t, c, ring.div_pow(w, snf.vals[t]));
        }
    }
    let row_exps: Vec<u32> = snf.vals.iter().map(|&v| a - v).collect();
    LocalCokernel::compute(ring, &coords, &row_exps).exps
}

/// `H_i(G, M)` from the normalized bar chain complex, one prime at a time.
pub fn chain_homology(g: &FiniteGroup, m: &GModule, i: usize) -> FgAbelianGroup {
    let e = m.exponent();
    let mut orders = Vec::new();
    for (p, _) in factorize(e) {
        orders.extend(local_chain_homology(g, m, i, p).into_iter().map(|x| p.pow(x)));
    }
    FgAbelianGroup::from_orders(&orders)
}

/// Normalized chain dimension in degree `n`.
pub fn chain_dimension(g: &FiniteGroup, m: &GModule, n: usize) -> usize {
    m.dim() * (g.order() - 1).pow(n as u32)
}
