//! Cochains from the tensor product of periodic resolutions of the cyclic factors.
//!
//! For `G = Π Z/n_i` with generators `T_i`, `C^d = ⊕_{|κ| = d} M` over compositions `κ` of `d`, and
//! `(δφ)(κ) = Σ_i (−1)^{κ_1+…+κ_{i−1}} D_i(κ_i)·φ(κ − u_i)` with `D_i = T_i − 1` for odd `κ_i` and the
//! norm `N_i` for even `κ_i`.

use crate::exact_algebra::local::LocalRing;
use crate::gmodules::{GModule, ModMatrix};
use crate::groups::FiniteGroup;

use super::solver::{LocalProblem, Sparse};
use super::CohomologyError;

/// All compositions of `d` into `r` nonnegative parts, lexicographic.
pub(crate) fn compositions(d: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in compositions(d - first, r - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Norm `Σ_{j < n} A^j`, summed along the orbit of each basis vector.
pub(crate) fn norm_matrix(a: &ModMatrix, order: u64, moduli: &[u64]) -> ModMatrix {
    let k = a.rows;
    let mut cols: Vec<Vec<(usize, u64)>> = vec![Vec::new(); k];
    for i in 0..k {
        for j in 0..k {
            let v = a.get(j, i);
            if v != 0 {
                cols[i].push((j, v));
            }
        }
    }
    let apply = |v: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; k];
        for (i, &x) in v.iter().enumerate() {
            if x != 0 {
                for &(j, c) in &cols[i] {
                    out[j] = ((out[j] as u128 + c as u128 * x as u128) % moduli[j] as u128) as u64;
                }
            }
        }
        out
    };
    let mut out = ModMatrix::zeros(k, k);
    for i in 0..k {
        let mut e = vec![0u64; k];
        e[i] = 1 % moduli[i];
        let mut sum = e.clone();
        let mut v = apply(&e);
        let mut r = 1u64;
        while v != e {
            for j in 0..k {
                sum[j] = (sum[j] + v[j]) % moduli[j];
            }
            v = apply(&v);
            r += 1;
            assert!(r <= order, "action order exceeds the group order");
        }
        let mult = order / r;
        for j in 0..k {
            out.set(j, i, ((sum[j] as u128 * mult as u128) % moduli[j] as u128) as u64);
        }
    }
    out
}

/// The periodic cochain complex of a cyclic-product group with coefficients in `M`.
#[derive(Clone, Debug)]
pub struct PeriodicComplex {
    /// Positions of the nontrivial cyclic factors among the group generators.
    pub factors: Vec<usize>,
    pub orders: Vec<u64>,
    moduli: Vec<u64>,
    minus: Vec<ModMatrix>,
    norm: Vec<ModMatrix>,
}

impl PeriodicComplex {
    pub fn new(group: &FiniteGroup, module: &GModule) -> Result<Self, CohomologyError> {
        let Some(cm) = group.cyclic_moduli() else {
            return Err(CohomologyError::Unsupported("periodic cochains need a cyclic-product group".into()));
        };
        let moduli = module.moduli().to_vec();
        let mut factors = Vec::new();
        let mut orders = Vec::new();
        let mut minus = Vec::new();
        let mut norm = Vec::new();
        for (i, &n) in cm.iter().enumerate() {
            if n == 1 {
                continue;
            }
            let a = &module.generator_actions()[i];
            let mut m = a.clone();
            for j in 0..moduli.len() {
                m.set(j, j, (m.get(j, j) + moduli[j] - 1 % moduli[j]) % moduli[j]);
            }
            factors.push(i);
            orders.push(n);
            minus.push(m);
            norm.push(norm_matrix(a, n, &moduli));
        }
        Ok(PeriodicComplex { factors, orders, moduli, minus, norm })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn shapes(&self, d: usize) -> Vec<Vec<usize>> {
        compositions(d, self.rank())
    }

    pub fn dimension(&self, d: usize) -> usize {
        self.shapes(d).len() * self.moduli.len()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    fn shape_index(&self, d: usize) -> std::collections::HashMap<Vec<usize>, usize> {
        self.shapes(d).into_iter().enumerate().map(|(i, s)| (s, i)).collect()
    }

    /// Entries `(row shape, column shape, sign, matrix)` of `δ : C^d → C^{d+1}`.
    fn blocks(&self, d: usize) -> Vec<(usize, usize, bool, &ModMatrix)> {
        let src = self.shape_index(d);
        let mut out = Vec::new();
        for (ri, kappa) in self.shapes(d + 1).iter().enumerate() {
            let mut prefix = 0;
            for i in 0..self.rank() {
                if kappa[i] >= 1 {
                    let mut c = kappa.clone();
                    c[i] -= 1;
                    let ci = src[&c];
                    let m = if kappa[i] % 2 == 1 { &self.minus[i] } else { &self.norm[i] };
                    out.push((ri, ci, prefix % 2 == 1, m));
                }
                prefix += kappa[i];
            }
        }
        out
    }

    /// `δφ` for `φ ∈ C^d`.
    pub fn differential_apply(&self, d: usize, phi: &[u64]) -> Vec<u64> {
        let k = self.moduli.len();
        let mut out = vec![0u64; self.dimension(d + 1)];
        for (ri, ci, neg, m) in self.blocks(d) {
            let v = m.apply(&phi[ci * k..(ci + 1) * k], &self.moduli);
            for j in 0..k {
                let md = self.moduli[j];
                let x = if neg { (md - v[j]) % md } else { v[j] };
                out[ri * k + j] = (out[ri * k + j] + x) % md;
            }
        }
        out
    }

    pub(crate) fn local_problem(&self, ring: LocalRing, coords: &[usize], exps: &[u32], d: usize) -> PeriodicProblem {
        let k = coords.len();
        let restrict = |m: &ModMatrix| -> Vec<u64> {
            let mut out = vec![0u64; k * k];
            for (a, &ja) in coords.iter().enumerate() {
                for (b, &jb) in coords.iter().enumerate() {
                    out[a * k + b] = m.get(ja, jb) % ring.q;
                }
            }
            out
        };
        let build = |deg: usize| -> Vec<(usize, usize, bool, Vec<u64>)> {
            self.blocks(deg).into_iter().map(|(r, c, s, m)| (r, c, s, restrict(m))).collect()
        };
        PeriodicProblem {
            ring,
            k,
            exps: exps.to_vec(),
            params: self.shapes(d).len(),
            rows: self.shapes(d + 1).len(),
            upper: build(d),
            lower: if d == 0 { Vec::new() } else { build(d - 1) },
            lower_cols: if d == 0 { 0 } else { self.shapes(d - 1).len() },
        }
    }
}

pub(crate) struct PeriodicProblem {
    ring: LocalRing,
    k: usize,
    exps: Vec<u32>,
    params: usize,
    rows: usize,
    upper: Vec<(usize, usize, bool, Vec<u64>)>,
    lower: Vec<(usize, usize, bool, Vec<u64>)>,
    lower_cols: usize,
}

impl LocalProblem for PeriodicProblem {
    fn ring(&self) -> LocalRing {
        self.ring
    }

    fn num_params(&self) -> usize {
        self.params * self.k
    }

    fn param_exps(&self) -> Vec<u32> {
        (0..self.params).flat_map(|_| self.exps.iter().copied()).collect()
    }

    fn initial_rows(&self) -> Vec<Vec<u64>> {
        let (r, k) = (&self.ring, self.k);
        let mut rows = vec![vec![0u64; self.num_params()]; self.rows * k];
        for (ri, ci, neg, m) in &self.upper {
            for j in 0..k {
                let row = &mut rows[ri * k + j];
                for l in 0..k {
                    let v = if *neg { r.neg(m[j * k + l]) } else { m[j * k + l] };
                    row[ci * k + l] = r.add(row[ci * k + l], v);
                }
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            let s = r.pow_p(r.a - self.exps[i % k]);
            for x in row.iter_mut() {
                *x = r.mul(*x, s);
            }
        }
        rows.retain(|row| row.iter().any(|&x| x != 0));
        rows
    }

    fn violations(&self, _z: &[u64], _limit: usize) -> Vec<Vec<u64>> {
        Vec::new()
    }

    fn coboundaries(&self) -> Vec<Sparse> {
        let (r, k) = (&self.ring, self.k);
        let mut cols: Vec<Vec<u64>> = vec![vec![0u64; self.num_params()]; self.lower_cols * k];
        for (ri, ci, neg, m) in &self.lower {
            for l in 0..k {
                let col = &mut cols[ci * k + l];
                for j in 0..k {
                    let v = if *neg { r.neg(m[j * k + l]) } else { m[j * k + l] };
                    col[ri * k + j] = r.add(col[ri * k + j], v);
                }
            }
        }
        cols.into_iter()
            .map(|c| c.into_iter().enumerate().filter(|e| e.1 != 0).map(|(i, v)| (i as u32, v)).collect())
            .collect()
    }
}
