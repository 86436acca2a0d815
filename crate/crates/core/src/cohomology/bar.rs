//! Unnormalized bar cochains `C^n(G, M) = Map(G^n, M)`.
//!
//! A cochain is stored as the concatenation of its values over lexicographically ordered
//! tuples (first entry most significant), each value a coordinate vector of `M`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact_algebra::local::LocalRing;
use crate::gmodules::{GModule, ModMatrix};
use crate::groups::FiniteGroup;
use crate::limits::caps;
use crate::par;

use super::solver::{LocalProblem, Sparse};
use super::CohomologyError;

pub(crate) fn tuple_index(n_el: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &x| acc * n_el + x)
}

pub(crate) fn tuple_digits(n_el: usize, mut idx: usize, len: usize, out: &mut [usize]) {
    for i in (0..len).rev() {
        out[i] = idx % n_el;
        idx /= n_el;
    }
}

pub(crate) fn checked_pow(base: usize, e: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..e {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Number of coordinates of `C^n(G, M)`, refusing anything above the global cap.
pub fn cochain_dimension(group: &FiniteGroup, module: &GModule, n: usize) -> Result<usize, CohomologyError> {
    let cap = caps().cochain;
    let tuples = checked_pow(group.order(), n);
    match tuples.and_then(|t| t.checked_mul(module.dim().max(1))) {
        Some(d) if d <= cap => Ok(tuples.unwrap() * module.dim()),
        Some(d) => Err(CohomologyError::SizeCapExceeded { required: d as u128, cap }),
        None => Err(CohomologyError::SizeCapExceeded { required: u128::MAX, cap }),
    }
}

/// The bar cochain complex of `G` with coefficients in `M`, up to a maximal degree.
#[derive(Clone, Debug)]
pub struct BarCochainComplex {
    pub group: Arc<FiniteGroup>,
    pub module: GModule,
    pub max_degree: usize,
    actions: Vec<ModMatrix>,
}

impl BarCochainComplex {
    pub fn new(module: &GModule, max_degree: usize) -> Result<Self, CohomologyError> {
        let group = module.group().clone();
        cochain_dimension(&group, module, max_degree)?;
        let actions = group.elements().map(|x| module.action(x)).collect();
        Ok(BarCochainComplex { group, module: module.clone(), max_degree, actions })
    }

    pub fn dimension(&self, n: usize) -> usize {
        self.group.order().pow(n as u32) * self.module.dim()
    }

    /// Evaluates `∂f` for `f ∈ C^n`.
    pub fn differential_apply(&self, n: usize, f: &[u64]) -> Vec<u64> {
        bar_differential(&self.group, &self.actions, self.module.moduli(), n, f)
    }

    /// Matrix of `∂ : C^n → C^{n+1}`.
    pub fn differential(&self, n: usize) -> ModMatrix {
        let (src, tgt) = (self.dimension(n), self.dimension(n + 1));
        let mut d = ModMatrix::zeros(tgt, src);
        let mut e = vec![0u64; src];
        for c in 0..src {
            e[c] = 1;
            for (r, v) in self.differential_apply(n, &e).into_iter().enumerate() {
                d.set(r, c, v);
            }
            e[c] = 0;
        }
        d
    }

    /// Coordinate moduli of `C^n`.
    pub fn moduli(&self, n: usize) -> Vec<u64> {
        let t = self.group.order().pow(n as u32);
        (0..t).flat_map(|_| self.module.moduli().iter().copied()).collect()
    }
}

/// `(∂f)(y_1..y_{n+1}) = y_1·f(y_2..) + Σ (−1)^i f(.., y_i y_{i+1}, ..) + (−1)^{n+1} f(y_1..y_n)`.
pub(crate) fn bar_differential(group: &FiniteGroup, actions: &[ModMatrix], moduli: &[u64], n: usize, f: &[u64]) -> Vec<u64> {
    let ne = group.order();
    let k = moduli.len();
    let tuples = ne.pow(n as u32 + 1);
    let mut out = vec![0u64; tuples * k];
    let mut y = vec![0usize; n + 1];
    let mut merged = vec![0usize; n];
    for idx in 0..tuples {
        tuple_digits(ne, idx, n + 1, &mut y);
        let v = &mut out[idx * k..(idx + 1) * k];
        let tail = tuple_index(ne, &y[1..]);
        let fv = &f[tail * k..(tail + 1) * k];
        let a = &actions[y[0]];
        for (j, vj) in v.iter_mut().enumerate() {
            let m = moduli[j] as u128;
            let mut acc = 0u128;
            for (l, &x) in fv.iter().enumerate() {
                acc += a.get(j, l) as u128 * x as u128;
            }
            *vj = (acc % m) as u64;
        }
        for i in 1..=n {
            merged[..i - 1].copy_from_slice(&y[..i - 1]);
            merged[i - 1] = group.mul(y[i - 1], y[i]);
            merged[i..].copy_from_slice(&y[i + 1..]);
            let mi = tuple_index(ne, &merged);
            for j in 0..k {
                let x = f[mi * k + j] % moduli[j];
                v[j] = if i % 2 == 1 { (v[j] + moduli[j] - x) % moduli[j] } else { (v[j] + x) % moduli[j] };
            }
        }
        let li = tuple_index(ne, &y[..n]);
        for j in 0..k {
            let x = f[li * k + j] % moduli[j];
            v[j] = if (n + 1) % 2 == 1 { (v[j] + moduli[j] - x) % moduli[j] } else { (v[j] + x) % moduli[j] };
        }
    }
    out
}

/// Primary part of the bar problem, parametrized along a Cayley tree.
///
/// Parameters are the values `f(x', t)` with `x' ∈ G^{n-1}` and `t ∈ T = {1} ∪ S`; every other value of
/// a cocycle follows from `f(x', c s) = f(x', c) + (−1)^{n+1}[y_1·f(y_2..) + Σ_{i<n} (−1)^i f(∂_i y)]`
/// with `y = (x', c, s)`.
pub(crate) struct BarProblem {
    ring: LocalRing,
    n: usize,
    ne: usize,
    mul: Arc<Vec<u32>>,
    k: usize,
    exps: Vec<u32>,
    act: Vec<Vec<u64>>,
    tset: Vec<usize>,
    tpos: Vec<u32>,
    gens: Vec<usize>,
    bfs: Vec<usize>,
    parent: Vec<(usize, usize)>,
    seed: u64,
}

const NONE: u32 = u32::MAX;

pub(crate) fn mul_table(group: &FiniteGroup) -> Arc<Vec<u32>> {
    let n = group.order();
    let mut t = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            t.push(group.mul(a, b) as u32);
        }
    }
    Arc::new(t)
}

impl BarProblem {
    pub fn new(
        group: &FiniteGroup,
        mul: Arc<Vec<u32>>,
        ring: LocalRing,
        exps: Vec<u32>,
        act: Vec<Vec<u64>>,
        n: usize,
    ) -> Self {
        let ne = group.order();
        let mut gens: Vec<usize> = Vec::new();
        for &s in group.generators() {
            if s != 0 && !gens.contains(&s) {
                gens.push(s);
            }
        }
        let mut tset = vec![0usize];
        tset.extend(&gens);
        let mut tpos = vec![NONE; ne];
        for (i, &t) in tset.iter().enumerate() {
            tpos[t] = i as u32;
        }
        let mut parent = vec![(usize::MAX, usize::MAX); ne];
        let mut seen = vec![false; ne];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut bfs = Vec::new();
        while let Some(c) = queue.pop_front() {
            for &s in &gens {
                let d = mul[c * ne + s] as usize;
                if !seen[d] {
                    seen[d] = true;
                    parent[d] = (c, s);
                    queue.push_back(d);
                    if tpos[d] == NONE {
                        bfs.push(d);
                    }
                }
            }
        }
        let k = exps.len();
        let seed = 0x5a17_0000 ^ ((n as u64) << 40) ^ ((ne as u64) << 20) ^ (ring.q << 4) ^ k as u64;
        BarProblem { ring, n, ne, mul, k, exps, act, tset, tpos, gens, bfs, parent, seed }
    }

    #[inline]
    fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.ne + b] as usize
    }

    fn prefix_count(&self) -> usize {
        self.ne.pow(self.n as u32 - 1)
    }

    /// Parameter group index of a tuple ending in an element of `T`.
    fn param_of(&self, t: &[usize]) -> usize {
        let last = *t.last().unwrap();
        let pre = tuple_index(self.ne, &t[..t.len() - 1]);
        pre * self.tset.len() + self.tpos[last] as usize
    }

    /// Tuple index of each parameter group.
    pub fn param_tuples(&self) -> Vec<usize> {
        if self.n == 0 {
            return vec![0];
        }
        let mut out = Vec::new();
        for xp in 0..self.prefix_count() {
            for &t in &self.tset {
                out.push(xp * self.ne + t);
            }
        }
        out
    }

    pub fn num_tuples(&self) -> usize {
        self.ne.pow(self.n as u32)
    }

    /// The cochain determined by parameter values.
    pub fn lift(&self, z: &[u64]) -> Vec<u64> {
        let (n, ne, k, r) = (self.n, self.ne, self.k, &self.ring);
        if n == 0 {
            return z.to_vec();
        }
        let mut f = vec![0u64; self.num_tuples() * k];
        let nt = self.tset.len();
        for xp in 0..self.prefix_count() {
            for (tp, &t) in self.tset.iter().enumerate() {
                let src = (xp * nt + tp) * k;
                let dst = (xp * ne + t) * k;
                f[dst..dst + k].copy_from_slice(&z[src..src + k]);
            }
        }
        let positive = n % 2 == 1;
        let mut y = vec![0usize; n + 1];
        let mut merged = vec![0usize; n];
        let mut bracket = vec![0u64; k];
        for &c in &self.bfs {
            let (par, s) = self.parent[c];
            for xp in 0..self.prefix_count() {
                tuple_digits(ne, xp, n - 1, &mut y);
                y[n - 1] = par;
                y[n] = s;
                let tail = tuple_index(ne, &y[1..]);
                let a = &self.act[y[0]];
                for j in 0..k {
                    let mut acc = 0u64;
                    for l in 0..k {
                        acc = r.add(acc, r.mul(a[j * k + l], f[tail * k + l]));
                    }
                    bracket[j] = acc;
                }
                for i in 1..n {
                    merged[..i - 1].copy_from_slice(&y[..i - 1]);
                    merged[i - 1] = self.m(y[i - 1], y[i]);
                    merged[i..].copy_from_slice(&y[i + 1..]);
                    let mi = tuple_index(ne, &merged);
                    for j in 0..k {
                        let x = f[mi * k + j];
                        bracket[j] = if i % 2 == 1 { r.sub(bracket[j], x) } else { r.add(bracket[j], x) };
                    }
                }
                let base = (xp * ne + par) * k;
                let dst = (xp * ne + c) * k;
                for j in 0..k {
                    let b = if positive { bracket[j] } else { r.neg(bracket[j]) };
                    f[dst + j] = r.add(f[base + j], b);
                }
            }
        }
        f
    }

    /// Adds `coef · f(tuple)_j`, expressed in parameters, to `row`.
    fn add_value(&self, row: &mut [u64], tuple: &[usize], j: usize, coef: u64) {
        let (n, k, r) = (self.n, self.k, &self.ring);
        if coef == 0 {
            return;
        }
        let mut cur: Vec<usize> = tuple.to_vec();
        let sign = if n % 2 == 1 { coef } else { r.neg(coef) };
        let mut y = vec![0usize; n + 1];
        let mut merged = vec![0usize; n];
        while self.tpos[cur[n - 1]] == NONE {
            let (par, s) = self.parent[cur[n - 1]];
            y[..n - 1].copy_from_slice(&cur[..n - 1]);
            y[n - 1] = par;
            y[n] = s;
            let a = &self.act[y[0]];
            let tail = self.param_of(&y[1..]);
            for l in 0..k {
                let c = r.mul(sign, a[j * k + l]);
                let idx = tail * k + l;
                row[idx] = r.add(row[idx], c);
            }
            for i in 1..n {
                merged[..i - 1].copy_from_slice(&y[..i - 1]);
                merged[i - 1] = self.m(y[i - 1], y[i]);
                merged[i..].copy_from_slice(&y[i + 1..]);
                let idx = self.param_of(&merged) * k + j;
                row[idx] = if i % 2 == 1 { r.sub(row[idx], sign) } else { r.add(row[idx], sign) };
            }
            cur[n - 1] = par;
        }
        let idx = self.param_of(&cur) * k + j;
        row[idx] = r.add(row[idx], coef);
    }

    /// Scaled constraint `(∂f)(y)_j = 0` in parameters.
    fn row(&self, y: &[usize], j: usize) -> Vec<u64> {
        let (n, k, r) = (self.n, self.k, &self.ring);
        let mut row = vec![0u64; self.num_params()];
        let a = &self.act[y[0]];
        if n == 0 {
            for l in 0..k {
                row[l] = r.sub(a[j * k + l], u64::from(j == l));
            }
        } else {
            for l in 0..k {
                self.add_value(&mut row, &y[1..], l, a[j * k + l]);
            }
            let mut merged = vec![0usize; n];
            for i in 1..=n {
                merged[..i - 1].copy_from_slice(&y[..i - 1]);
                merged[i - 1] = self.m(y[i - 1], y[i]);
                merged[i..].copy_from_slice(&y[i + 1..]);
                self.add_value(&mut row, &merged, j, if i % 2 == 1 { r.neg(1) } else { 1 });
            }
            self.add_value(&mut row, &y[..n], j, if n % 2 == 0 { r.neg(1) } else { 1 });
        }
        let s = r.pow_p(r.a - self.exps[j]);
        for x in &mut row {
            *x = r.mul(*x, s);
        }
        row
    }

    /// Scaled value of `(∂f)(y)_j` for a full local cochain.
    fn eval(&self, f: &[u64], y: &[usize], j: usize, merged: &mut [usize]) -> u64 {
        let (n, ne, k, r) = (self.n, self.ne, self.k, &self.ring);
        let a = &self.act[y[0]];
        let tail = tuple_index(ne, &y[1..]);
        let mut acc = 0u64;
        for l in 0..k {
            acc = r.add(acc, r.mul(a[j * k + l], f[tail * k + l]));
        }
        for i in 1..=n {
            merged[..i - 1].copy_from_slice(&y[..i - 1]);
            merged[i - 1] = self.m(y[i - 1], y[i]);
            merged[i..].copy_from_slice(&y[i + 1..]);
            let x = f[tuple_index(ne, merged) * k + j];
            acc = if i % 2 == 1 { r.sub(acc, x) } else { r.add(acc, x) };
        }
        let x = f[tuple_index(ne, &y[..n]) * k + j];
        acc = if n % 2 == 0 { r.sub(acc, x) } else { r.add(acc, x) };
        r.mul(acc, r.pow_p(r.a - self.exps[j]))
    }
}

impl LocalProblem for BarProblem {
    fn ring(&self) -> LocalRing {
        self.ring
    }

    fn num_params(&self) -> usize {
        if self.n == 0 {
            self.k
        } else {
            self.prefix_count() * self.tset.len() * self.k
        }
    }

    fn param_exps(&self) -> Vec<u32> {
        let groups = self.num_params() / self.k.max(1);
        (0..groups).flat_map(|_| self.exps.iter().copied()).collect()
    }

    fn initial_rows(&self) -> Vec<Vec<u64>> {
        if self.k == 0 {
            return Vec::new();
        }
        if self.n == 0 {
            let mut out = Vec::new();
            for &s in &self.gens {
                for j in 0..self.k {
                    out.push(self.row(&[s], j));
                }
            }
            return out;
        }
        let np = self.num_params();
        let count = np + np / 4 + 16;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let picks: Vec<(Vec<usize>, usize)> = (0..count)
            .map(|_| {
                let y: Vec<usize> = (0..=self.n).map(|_| rng.gen_range(0..self.ne)).collect();
                (y, rng.gen_range(0..self.k))
            })
            .collect();
        par::map(&picks, |(y, j)| self.row(y, *j))
    }

    fn violations(&self, z: &[u64], limit: usize) -> Vec<Vec<u64>> {
        let n = self.n;
        if n == 0 {
            return Vec::new();
        }
        let f = self.lift(z);
        let tuples = self.ne.pow(n as u32 + 1);
        let mut y = vec![0usize; n + 1];
        let mut merged = vec![0usize; n];
        let mut out = Vec::new();
        for idx in 0..tuples {
            tuple_digits(self.ne, idx, n + 1, &mut y);
            for j in 0..self.k {
                if self.eval(&f, &y, j, &mut merged) != 0 {
                    out.push(self.row(&y, j));
                    if out.len() >= limit {
                        return out;
                    }
                }
            }
        }
        out
    }

    fn coboundaries(&self) -> Vec<Sparse> {
        let (n, ne, k, r) = (self.n, self.ne, self.k, &self.ring);
        if n == 0 {
            return Vec::new();
        }
        let ncols = ne.pow(n as u32 - 1) * k;
        let mut cols: Vec<Sparse> = vec![Vec::new(); ncols];
        let mut y = vec![0usize; n];
        let mut merged = vec![0usize; n.saturating_sub(1)];
        for (g, tuple) in self.param_tuples().into_iter().enumerate() {
            tuple_digits(ne, tuple, n, &mut y);
            let a = &self.act[y[0]];
            let tail = tuple_index(ne, &y[1..]);
            let head = tuple_index(ne, &y[..n - 1]);
            for j in 0..k {
                let row = (g * k + j) as u32;
                for l in 0..k {
                    let v = a[j * k + l];
                    if v != 0 {
                        cols[tail * k + l].push((row, v));
                    }
                }
                for i in 1..n {
                    merged[..i - 1].copy_from_slice(&y[..i - 1]);
                    merged[i - 1] = self.m(y[i - 1], y[i]);
                    merged[i..].copy_from_slice(&y[i + 1..]);
                    let mi = tuple_index(ne, &merged);
                    cols[mi * k + j].push((row, if i % 2 == 1 { r.neg(1) } else { 1 }));
                }
                cols[head * k + j].push((row, if n % 2 == 1 { r.neg(1) } else { 1 }));
            }
        }
        for c in &mut cols {
            c.sort_unstable_by_key(|e| e.0);
            let mut merged: Sparse = Vec::with_capacity(c.len());
            for &(i, v) in c.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == i => last.1 = r.add(last.1, v),
                    _ => merged.push((i, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *c = merged;
        }
        cols
    }
}
