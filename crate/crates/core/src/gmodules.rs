//! Finite modules over finite groups, presented on coordinates `⊕ Z/m_i`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact_algebra::local::{gcd, lcm};
use crate::exact_algebra::{big_to_u64, integer_kernel, FgAbelianGroup, IntMatrix, Subquotient};
use crate::groups::{FiniteGroup, Homomorphism, SubgroupWithTransversal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("expected {expected} action matrices, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },
    #[error("matrix has shape {rows}x{cols}, expected {expected}x{expected}")]
    WrongShape { rows: usize, cols: usize, expected: usize },
    #[error("coordinate modulus must be at least 1")]
    ZeroModulus,
    #[error("matrix is not well defined on the coordinate group: {0}")]
    NotWellDefined(String),
    #[error("action violates a group relation: {0}")]
    RelationViolated(String),
    #[error("modules live over different groups")]
    GroupMismatch,
    #[error("map is not equivariant under generator {0}")]
    NotEquivariant(usize),
    #[error("submodule is not stable under the action")]
    NotStable,
    #[error("subgroup does not act trivially")]
    NontrivialAction,
}

/// Integer matrix acting on coordinate groups; entry `(j, i)` lives in `Z/m_j` of the target.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ModMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Reduces row `j` modulo `moduli[j]`.
    pub fn reduced(mut self, moduli: &[u64]) -> Self {
        for i in 0..self.rows {
            for j in 0..self.cols {
                self.data[i * self.cols + j] %= moduli[i];
            }
        }
        self
    }

    /// `self · other`, rows reduced by `moduli`.
    pub fn mul(&self, other: &ModMatrix, moduli: &[u64]) -> ModMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ModMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let m = moduli[i] as u128;
            let mut acc = vec![0u128; other.cols];
            for l in 0..self.cols {
                let a = self.get(i, l) as u128;
                if a == 0 {
                    continue;
                }
                for (j, x) in other.row(l).iter().enumerate() {
                    if *x != 0 {
                        acc[j] = (acc[j] + a * *x as u128) % m;
                    }
                }
            }
            for (j, v) in acc.into_iter().enumerate() {
                out.data[i * other.cols + j] = v as u64;
            }
        }
        out
    }

    pub fn apply(&self, x: &[u64], moduli: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|i| {
                let m = moduli[i] as u128;
                let mut acc = 0u128;
                for (a, b) in self.row(i).iter().zip(x) {
                    acc = (acc + *a as u128 * *b as u128) % m;
                }
                acc as u64
            })
            .collect()
    }

    pub fn is_identity(&self, moduli: &[u64]) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) % moduli[i] == u64::from(i == j) % moduli[i]))
    }

    fn to_int(&self) -> IntMatrix {
        IntMatrix::from_fn(self.rows, self.cols, |i, j| BigInt::from(self.get(i, j)))
    }
}

/// Checks `m_i · A_{ji} ≡ 0 (mod n_j)`.
pub fn is_well_defined(a: &ModMatrix, src: &[u64], tgt: &[u64]) -> bool {
    (0..a.rows).all(|j| (0..a.cols).all(|i| (a.get(j, i) as u128 * src[i] as u128).is_multiple_of(tgt[j] as u128)))
}

fn to_big(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn diag_big(moduli: &[u64]) -> IntMatrix {
    let d: Vec<BigInt> = moduli.iter().map(|&m| BigInt::from(m)).collect();
    IntMatrix::diagonal(&d)
}

fn cols_to_int(vectors: &[Vec<u64>], n: usize) -> IntMatrix {
    IntMatrix::from_fn(n, vectors.len(), |i, j| BigInt::from(vectors[j][i]))
}

/// Subgroup of `⊕ Z/m_i` spanned by vectors.
pub fn coordinate_span(moduli: &[u64], gens: &[Vec<u64>]) -> Subquotient {
    let n = moduli.len();
    Subquotient::new(&diag_big(moduli), &cols_to_int(gens, n), &IntMatrix::zeros(n, 0))
}

/// Kernel of `f : ⊕ Z/src → ⊕ Z/tgt` as a subgroup of the source.
pub fn coordinate_kernel(f: &ModMatrix, src: &[u64], tgt: &[u64]) -> Subquotient {
    let k = integer_kernel(&f.to_int().hcat(&diag_big(tgt)));
    let z = k.select_rows(&(0..src.len()).collect::<Vec<_>>());
    Subquotient::new(&diag_big(src), &z, &IntMatrix::zeros(src.len(), 0))
}

/// Quotient of `⊕ Z/m_i` by the span of vectors.
pub fn coordinate_quotient(moduli: &[u64], rels: &[Vec<u64>]) -> Subquotient {
    let n = moduli.len();
    Subquotient::new(&diag_big(moduli), &IntMatrix::identity(n), &cols_to_int(rels, n))
}

fn reps_as_u64(sq: &Subquotient, moduli: &[u64]) -> Vec<Vec<u64>> {
    let r = &sq.representatives;
    (0..r.cols())
        .map(|j| {
            (0..r.rows())
                .map(|i| {
                    let m = BigInt::from(moduli[i]);
                    big_to_u64(&num_integer::Integer::mod_floor(r.get(i, j), &m))
                })
                .collect()
        })
        .collect()
}

fn coords_u64(sq: &Subquotient, x: &[u64]) -> Option<Vec<u64>> {
    sq.coordinates(&to_big(x)).map(|c| c.iter().map(big_to_u64).collect())
}

fn group_moduli(g: &FgAbelianGroup) -> Vec<u64> {
    assert!(g.is_finite(), "modules are finite");
    g.torsion.iter().map(|d| d.to_u64().expect("modulus exceeds u64")).collect()
}

const ELEMENT_TABLE_BUDGET: usize = 2_000_000;
const ABELIAN_TABLE_ORDER: usize = 4096;

#[derive(Clone, Debug)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    moduli: Vec<u64>,
    gens: Vec<ModMatrix>,
    elems: Option<Arc<Vec<ModMatrix>>>,
}

impl PartialEq for GModule {
    fn eq(&self, other: &Self) -> bool {
        *self.group == *other.group && self.moduli == other.moduli && self.gens == other.gens
    }
}

impl GModule {
    /// Module with coordinates `⊕ Z/moduli[i]` and one action matrix per group generator.
    pub fn new(group: Arc<FiniteGroup>, moduli: Vec<u64>, gens: Vec<ModMatrix>) -> Result<Self, ModuleError> {
        if moduli.contains(&0) {
            return Err(ModuleError::ZeroModulus);
        }
        let ng = group.generators().len();
        if gens.len() != ng {
            return Err(ModuleError::WrongGeneratorCount { expected: ng, got: gens.len() });
        }
        let k = moduli.len();
        for g in &gens {
            if g.rows != k || g.cols != k {
                return Err(ModuleError::WrongShape { rows: g.rows, cols: g.cols, expected: k });
            }
            if !is_well_defined(g, &moduli, &moduli) {
                return Err(ModuleError::NotWellDefined("action matrix".into()));
            }
        }
        let gens: Vec<ModMatrix> = gens.into_iter().map(|g| g.reduced(&moduli)).collect();
        let mut m = GModule { group, moduli, gens, elems: None };
        m.validate_and_tabulate()?;
        Ok(m)
    }

    fn validate_and_tabulate(&mut self) -> Result<(), ModuleError> {
        let k = self.moduli.len();
        let n = self.group.order();
        let affordable = n <= ABELIAN_TABLE_ORDER && n.saturating_mul(k * k + 1) <= ELEMENT_TABLE_BUDGET;
        if let Some(moduli) = self.group.cyclic_moduli().map(|m| m.to_vec()) {
            for (i, g) in self.gens.iter().enumerate() {
                if !self.matrix_power(g, moduli[i]).is_identity(&self.moduli) {
                    return Err(ModuleError::RelationViolated(format!("generator {i} has the wrong order")));
                }
                for h in &self.gens[..i] {
                    if g.mul(h, &self.moduli) != h.mul(g, &self.moduli) {
                        return Err(ModuleError::RelationViolated("generator actions do not commute".into()));
                    }
                }
            }
            if affordable {
                let table: Vec<ModMatrix> = (0..n).map(|x| self.abelian_action(x)).collect();
                self.elems = Some(Arc::new(table));
            }
            return Ok(());
        }
        let gens = self.group.generators().to_vec();
        let mut table: Vec<Option<ModMatrix>> = vec![None; n];
        table[0] = Some(ModMatrix::identity(k));
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (s, &g) in gens.iter().enumerate() {
                let y = self.group.mul(x, g);
                if table[y].is_none() {
                    let m = table[x].as_ref().unwrap().mul(&self.gens[s], &self.moduli);
                    table[y] = Some(m);
                    queue.push_back(y);
                }
            }
        }
        let table: Vec<ModMatrix> = table.into_iter().map(|m| m.expect("generators generate")).collect();
        for x in 0..n {
            for (s, &g) in gens.iter().enumerate() {
                let y = self.group.mul(x, g);
                if table[x].mul(&self.gens[s], &self.moduli) != table[y] {
                    return Err(ModuleError::RelationViolated(format!("action of element {y} is inconsistent")));
                }
            }
        }
        self.elems = Some(Arc::new(table));
        Ok(())
    }

    fn matrix_power(&self, a: &ModMatrix, mut e: u64) -> ModMatrix {
        let mut base = a.clone();
        let mut acc = ModMatrix::identity(a.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, &self.moduli);
            }
            base = base.mul(&base, &self.moduli);
            e >>= 1;
        }
        acc
    }

    fn abelian_action(&self, x: usize) -> ModMatrix {
        let e = self.group.exponents(x);
        let mut acc = ModMatrix::identity(self.dim());
        for (i, &ei) in e.iter().enumerate() {
            if ei > 0 {
                acc = acc.mul(&self.matrix_power(&self.gens[i], ei), &self.moduli);
            }
        }
        acc
    }

    pub fn trivial(group: Arc<FiniteGroup>, factors: &[u64]) -> Result<Self, ModuleError> {
        let moduli: Vec<u64> = factors.iter().copied().filter(|&m| m != 1).collect();
        let k = moduli.len();
        let gens = vec![ModMatrix::identity(k); group.generators().len()];
        Self::new(group, moduli, gens)
    }

    /// One coordinate `Z/m` with generator `i` acting by `scalars[i]`.
    pub fn from_character(group: Arc<FiniteGroup>, m: u64, scalars: &[u64]) -> Result<Self, ModuleError> {
        let gens = scalars.iter().map(|&s| ModMatrix::from_rows(&[vec![s % m]])).collect();
        Self::new(group, vec![m], gens)
    }

    /// Group ring `Z/m[G]` with left multiplication, coordinates indexed by elements.
    pub fn regular(group: Arc<FiniteGroup>, m: u64) -> Result<Self, ModuleError> {
        let n = group.order();
        let gens = group
            .generators()
            .iter()
            .map(|&g| {
                let mut a = ModMatrix::zeros(n, n);
                for x in 0..n {
                    a.set(group.mul(g, x), x, 1);
                }
                a
            })
            .collect();
        Self::new(group, vec![m; n], gens)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn dim(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> BigUint {
        self.moduli.iter().fold(BigUint::one(), |a, &m| a * m)
    }

    pub fn exponent(&self) -> u64 {
        self.moduli.iter().fold(1, |a, &m| lcm(a, m))
    }

    pub fn underlying(&self) -> FgAbelianGroup {
        FgAbelianGroup::from_orders(&self.moduli)
    }

    pub fn generator_actions(&self) -> &[ModMatrix] {
        &self.gens
    }

    /// Action matrix of an arbitrary element.
    pub fn action(&self, x: usize) -> ModMatrix {
        match &self.elems {
            Some(t) => t[x].clone(),
            None => self.abelian_action(x),
        }
    }

    pub fn action_ref(&self, x: usize) -> Option<&ModMatrix> {
        self.elems.as_ref().map(|t| &t[x])
    }

    pub fn act(&self, x: usize, v: &[u64]) -> Vec<u64> {
        match &self.elems {
            Some(t) => t[x].apply(v, &self.moduli),
            None => self.abelian_action(x).apply(v, &self.moduli),
        }
    }

    pub fn is_trivial_action(&self) -> bool {
        self.gens.iter().all(|g| g.is_identity(&self.moduli))
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        v.iter().zip(&self.moduli).map(|(x, m)| x % m).collect()
    }

    /// Enumerates all elements; intended for small modules.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            let mut next = Vec::new();
            for p in &out {
                for v in 0..m {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    /// `(g - 1)` stacked over the generators, as a map `M → M^{#gens}`.
    fn augmentation_stack(&self) -> (ModMatrix, Vec<u64>) {
        let k = self.dim();
        let s = self.gens.len();
        let mut f = ModMatrix::zeros(k * s, k);
        let mut tgt = Vec::with_capacity(k * s);
        for (b, g) in self.gens.iter().enumerate() {
            for j in 0..k {
                for i in 0..k {
                    let m = self.moduli[j];
                    let v = (g.get(j, i) + m - u64::from(i == j)) % m;
                    f.set(b * k + j, i, v);
                }
            }
            tgt.extend_from_slice(&self.moduli);
        }
        (f, tgt)
    }

    /// Submodule spanned by vectors, re-coordinatized by invariant factors.
    pub fn submodule(&self, gens: &[Vec<u64>]) -> Result<(GModule, ModuleMap), ModuleError> {
        let sq = coordinate_span(&self.moduli, gens);
        self.submodule_from(&sq)
    }

    fn submodule_from(&self, sq: &Subquotient) -> Result<(GModule, ModuleMap), ModuleError> {
        let reps = reps_as_u64(sq, &self.moduli);
        let sub_moduli = group_moduli(&sq.group);
        let mut actions = Vec::new();
        for g in &self.gens {
            let mut a = ModMatrix::zeros(reps.len(), reps.len());
            for (j, r) in reps.iter().enumerate() {
                let img = g.apply(r, &self.moduli);
                let c = coords_u64(sq, &img).ok_or(ModuleError::NotStable)?;
                for (i, v) in c.into_iter().enumerate() {
                    a.set(i, j, v);
                }
            }
            actions.push(a);
        }
        let sub = GModule::new(self.group.clone(), sub_moduli, actions)?;
        let mut inc = ModMatrix::zeros(self.dim(), reps.len());
        for (j, r) in reps.iter().enumerate() {
            for (i, &v) in r.iter().enumerate() {
                inc.set(i, j, v);
            }
        }
        let map = ModuleMap::new(sub.clone(), self.clone(), inc)?;
        Ok((sub, map))
    }

    /// Quotient module by the span of vectors (which must be a submodule).
    pub fn quotient(&self, rels: &[Vec<u64>]) -> Result<(GModule, ModuleMap), ModuleError> {
        let sq = coordinate_quotient(&self.moduli, rels);
        let qm = group_moduli(&sq.group);
        let k = self.dim();
        let mut proj = ModMatrix::zeros(qm.len(), k);
        for i in 0..k {
            let mut e = vec![0u64; k];
            e[i] = 1;
            let c = coords_u64(&sq, &e).expect("ambient vector");
            for (j, v) in c.into_iter().enumerate() {
                proj.set(j, i, v);
            }
        }
        let reps = reps_as_u64(&sq, &self.moduli);
        let mut actions = Vec::new();
        for g in &self.gens {
            let mut a = ModMatrix::zeros(qm.len(), qm.len());
            for (j, r) in reps.iter().enumerate() {
                let img = proj.apply(&g.apply(r, &self.moduli), &qm);
                for (i, v) in img.into_iter().enumerate() {
                    a.set(i, j, v);
                }
            }
            actions.push(a);
        }
        let q = GModule::new(self.group.clone(), qm, actions)?;
        let map = ModuleMap::new(self.clone(), q.clone(), proj)?;
        Ok((q, map))
    }

    /// Restriction of scalars along `φ : H → G`.
    pub fn restrict_along(&self, phi: &Homomorphism) -> Result<GModule, ModuleError> {
        if *phi.target != *self.group {
            return Err(ModuleError::GroupMismatch);
        }
        let gens = phi.generator_images().iter().map(|&y| self.action(y)).collect();
        GModule::new(phi.source.clone(), self.moduli.clone(), gens)
    }

    /// Module over `G/N` from a module on which `N = ker(proj)` acts trivially.
    pub fn descend(&self, proj: &Homomorphism) -> Result<GModule, ModuleError> {
        if *proj.source != *self.group {
            return Err(ModuleError::GroupMismatch);
        }
        for x in proj.kernel() {
            if !self.action(x).is_identity(&self.moduli) {
                return Err(ModuleError::NontrivialAction);
            }
        }
        let q = proj.target.clone();
        let mut lift = vec![usize::MAX; q.order()];
        for x in self.group.elements() {
            let y = proj.image(x);
            if lift[y] == usize::MAX {
                lift[y] = x;
            }
        }
        let gens = q.generators().iter().map(|&y| self.action(lift[y])).collect();
        GModule::new(q, self.moduli.clone(), gens)
    }

    /// Same abelian group viewed as a module over a subgroup.
    pub fn restrict_to(&self, sub: &SubgroupWithTransversal) -> Result<GModule, ModuleError> {
        self.restrict_along(&sub.inclusion())
    }
}

/// Fixed points `M^G` with their inclusion.
pub fn invariants(m: &GModule) -> (FgAbelianGroup, ModuleMap) {
    let (f, tgt) = m.augmentation_stack();
    let sq = coordinate_kernel(&f, &m.moduli, &tgt);
    let (sub, map) = m.submodule_from(&sq).expect("fixed points form a submodule");
    (FgAbelianGroup::from_orders(sub.moduli()), map)
}

/// Fixed points of a normal subgroup, as a module over the ambient group.
pub fn invariants_under(m: &GModule, members: &[usize]) -> Result<(GModule, ModuleMap), ModuleError> {
    let k = m.dim();
    let mut f = ModMatrix::zeros(k * members.len(), k);
    let mut tgt = Vec::new();
    for (b, &x) in members.iter().enumerate() {
        let a = m.action(x);
        for j in 0..k {
            for i in 0..k {
                let md = m.moduli[j];
                f.set(b * k + j, i, (a.get(j, i) + md - u64::from(i == j)) % md);
            }
        }
        tgt.extend_from_slice(&m.moduli);
    }
    let sq = coordinate_kernel(&f, &m.moduli, &tgt);
    m.submodule_from(&sq)
}

/// Coinvariants `M_G` with the projection.
pub fn coinvariants(m: &GModule) -> (FgAbelianGroup, ModuleMap) {
    let k = m.dim();
    let mut rels = Vec::new();
    for g in &m.gens {
        for i in 0..k {
            let mut v: Vec<u64> = (0..k).map(|j| g.get(j, i)).collect();
            v[i] = (v[i] + m.moduli[i] - 1) % m.moduli[i];
            rels.push(v);
        }
    }
    let (q, map) = m.quotient(&rels).expect("augmentation span is a submodule");
    (FgAbelianGroup::from_orders(q.moduli()), map)
}

/// `M ⊗_Z N` with the diagonal action.
pub fn tensor_product(m: &GModule, n: &GModule) -> Result<GModule, ModuleError> {
    if *m.group != *n.group {
        return Err(ModuleError::GroupMismatch);
    }
    let mut index = Vec::new();
    let mut moduli = Vec::new();
    for i in 0..m.dim() {
        for k in 0..n.dim() {
            let g = gcd(m.moduli[i], n.moduli[k]);
            if g > 1 {
                index.push((i, k));
                moduli.push(g);
            }
        }
    }
    let gens = m
        .gens
        .iter()
        .zip(&n.gens)
        .map(|(a, b)| {
            let d = index.len();
            let mut t = ModMatrix::zeros(d, d);
            for (r, &(j, l)) in index.iter().enumerate() {
                for (c, &(i, k)) in index.iter().enumerate() {
                    let v = (a.get(j, i) as u128 * b.get(l, k) as u128) % moduli[r] as u128;
                    t.set(r, c, v as u64);
                }
            }
            t
        })
        .collect();
    GModule::new(m.group.clone(), moduli, gens)
}

/// Dual of a map `F : ⊕Z/src → ⊕Z/tgt` in character coordinates: `D_{ij} = F_{ji} src_i / tgt_j`.
pub fn dual_matrix(f: &ModMatrix, src: &[u64], tgt: &[u64]) -> ModMatrix {
    let mut d = ModMatrix::zeros(src.len(), tgt.len());
    for i in 0..src.len() {
        for j in 0..tgt.len() {
            let num = f.get(j, i) as u128 * src[i] as u128;
            debug_assert_eq!(num % tgt[j] as u128, 0);
            d.set(i, j, ((num / tgt[j] as u128) % src[i] as u128) as u64);
        }
    }
    d
}

/// `Hom(M, Q/Z)` with `(g·χ)(m) = χ(g⁻¹ m)`.
pub fn pontryagin_dual(m: &GModule) -> GModule {
    let gens = m
        .group
        .generators()
        .iter()
        .map(|&g| dual_matrix(&m.action(m.group.inv(g)), &m.moduli, &m.moduli))
        .collect();
    GModule::new(m.group.clone(), m.moduli.clone(), gens).expect("dual of a valid module")
}

/// Evaluation `M → M**`, the identity in character coordinates.
pub fn evaluation_map(m: &GModule) -> ModuleMap {
    let dd = pontryagin_dual(&pontryagin_dual(m));
    ModuleMap::new(m.clone(), dd, ModMatrix::identity(m.dim())).expect("evaluation is equivariant")
}

/// Left coset representatives `l` with `G = ⊔ l H`, smallest element of each coset, identity first.
pub fn left_transversal(sub: &SubgroupWithTransversal) -> Vec<usize> {
    let g = &sub.ambient;
    let mut seen = vec![false; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if !seen[x] {
            reps.push(x);
            for &h in &sub.members {
                seen[g.mul(x, h)] = true;
            }
        }
    }
    reps
}

/// `Z[G] ⊗_{Z[H]} A` on the basis `l ⊗ a` over left coset representatives.
pub fn induce(sub: &SubgroupWithTransversal, a: &GModule) -> Result<GModule, ModuleError> {
    if *a.group != *sub.group {
        return Err(ModuleError::GroupMismatch);
    }
    let g = &sub.ambient;
    let left = left_transversal(sub);
    let pos = |x: usize| -> (usize, usize) {
        // x = l_j h
        for (j, &l) in left.iter().enumerate() {
            let h = g.mul(g.inv(l), x);
            if sub.contains(h) {
                return (j, sub.local(h));
            }
        }
        unreachable!("every element lies in a left coset")
    };
    let k = a.dim();
    let r = left.len();
    let moduli: Vec<u64> = (0..r).flat_map(|_| a.moduli.iter().copied()).collect();
    let gens = g
        .generators()
        .iter()
        .map(|&s| {
            let mut t = ModMatrix::zeros(r * k, r * k);
            for (i, &l) in left.iter().enumerate() {
                let (j, h) = pos(g.mul(s, l));
                let ah = a.action(h);
                for p in 0..k {
                    for q in 0..k {
                        t.set(j * k + p, i * k + q, ah.get(p, q));
                    }
                }
            }
            t
        })
        .collect();
    GModule::new(g.clone(), moduli, gens)
}

/// `Hom_{Z[H]}(Z[G], A)` on the values at right coset representatives.
pub fn coinduce(sub: &SubgroupWithTransversal, a: &GModule) -> Result<GModule, ModuleError> {
    if *a.group != *sub.group {
        return Err(ModuleError::GroupMismatch);
    }
    let g = &sub.ambient;
    let k = a.dim();
    let r = sub.index();
    let moduli: Vec<u64> = (0..r).flat_map(|_| a.moduli.iter().copied()).collect();
    let gens = g
        .generators()
        .iter()
        .map(|&s| {
            let mut t = ModMatrix::zeros(r * k, r * k);
            for (i, &ti) in sub.transversal.iter().enumerate() {
                let (h, c) = sub.decompose(g.mul(ti, s));
                let ah = a.action(h);
                for p in 0..k {
                    for q in 0..k {
                        t.set(i * k + p, c * k + q, ah.get(p, q));
                    }
                }
            }
            t
        })
        .collect();
    GModule::new(g.clone(), moduli, gens)
}

/// The standard isomorphism `Ind → Coind`, `l ⊗ a ↦ (x ↦ (x l)·a if x l ∈ H)`.
pub fn induce_to_coinduce(sub: &SubgroupWithTransversal, a: &GModule) -> Result<ModuleMap, ModuleError> {
    let ind = induce(sub, a)?;
    let coind = coinduce(sub, a)?;
    let g = &sub.ambient;
    let left = left_transversal(sub);
    let k = a.dim();
    let mut f = ModMatrix::zeros(coind.dim(), ind.dim());
    for (i, &l) in left.iter().enumerate() {
        for (c, &t) in sub.transversal.iter().enumerate() {
            let x = g.mul(t, l);
            if sub.contains(x) {
                let ah = a.action(sub.local(x));
                for p in 0..k {
                    for q in 0..k {
                        f.set(c * k + p, i * k + q, ah.get(p, q));
                    }
                }
            }
        }
    }
    ModuleMap::new(ind, coind, f)
}

/// Equivariant map between modules over the same group.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub source: GModule,
    pub target: GModule,
    pub matrix: ModMatrix,
}

impl ModuleMap {
    pub fn new(source: GModule, target: GModule, matrix: ModMatrix) -> Result<Self, ModuleError> {
        if *source.group != *target.group {
            return Err(ModuleError::GroupMismatch);
        }
        if matrix.rows != target.dim() || matrix.cols != source.dim() {
            return Err(ModuleError::WrongShape { rows: matrix.rows, cols: matrix.cols, expected: target.dim() });
        }
        if !is_well_defined(&matrix, &source.moduli, &target.moduli) {
            return Err(ModuleError::NotWellDefined("module map".into()));
        }
        let matrix = matrix.reduced(&target.moduli);
        for (s, (a, b)) in source.gens.iter().zip(&target.gens).enumerate() {
            if matrix.mul(a, &target.moduli) != b.mul(&matrix, &target.moduli) {
                return Err(ModuleError::NotEquivariant(s));
            }
        }
        Ok(ModuleMap { source, target, matrix })
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.matrix.apply(x, &self.target.moduli)
    }

    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap, ModuleError> {
        ModuleMap::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix, &self.target.moduli))
    }

    pub fn kernel_order(&self) -> BigUint {
        let sq = coordinate_kernel(&self.matrix, &self.source.moduli, &self.target.moduli);
        sq.group.order().expect("finite")
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_order().is_one()
    }

    pub fn is_surjective(&self) -> bool {
        let cols: Vec<Vec<u64>> = (0..self.matrix.cols).map(|i| (0..self.matrix.rows).map(|j| self.matrix.get(j, i)).collect()).collect();
        coordinate_span(&self.target.moduli, &cols).group.order() == Some(self.target.order())
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    /// Dual map `N* → M*`.
    pub fn dual(&self) -> ModuleMap {
        let d = dual_matrix(&self.matrix, &self.source.moduli, &self.target.moduli);
        ModuleMap::new(pontryagin_dual(&self.target), pontryagin_dual(&self.source), d).expect("dual of an equivariant map")
    }
}

/// Outcome of an isomorphism test between modules.
#[derive(Clone, Debug)]
pub enum IsoVerdict {
    /// Certified by an explicit equivariant bijection.
    Isomorphic(ModuleMap),
    /// Certified by exhaustive search or an invariant mismatch.
    NotIsomorphic(String),
    /// Every invariant in the battery agrees, but no witness was found.
    Undecided(String),
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic(_))
    }
}

/// `Hom_G(M, N)` as a subgroup of the coordinate group of matrices.
pub struct HomG {
    pub group: FgAbelianGroup,
    generators: Vec<ModMatrix>,
    orders: Vec<u64>,
}

impl HomG {
    pub fn generators(&self) -> &[ModMatrix] {
        &self.generators
    }

    pub fn generator_orders(&self) -> &[u64] {
        &self.orders
    }
}

/// Computes `Hom_G(M, N)` by solving the equivariance equations.
pub fn hom_g(m: &GModule, n: &GModule) -> Result<HomG, ModuleError> {
    if *m.group != *n.group {
        return Err(ModuleError::GroupMismatch);
    }
    let (km, kn) = (m.dim(), n.dim());
    // X_{ji} = (n_j / g_ji) y_ji with y_ji ∈ Z/g_ji
    let mut var_mod = Vec::new();
    let mut scale = Vec::new();
    for j in 0..kn {
        for i in 0..km {
            let g = gcd(m.moduli[i], n.moduli[j]);
            var_mod.push(g);
            scale.push(n.moduli[j] / g);
        }
    }
    let nv = var_mod.len();
    let ns = m.gens.len();
    let mut eq = ModMatrix::zeros(ns * nv, nv);
    let mut tgt = Vec::new();
    for (s, (a, b)) in m.gens.iter().zip(&n.gens).enumerate() {
        // (X A - B X)_{ji} = Σ_l X_{jl} A_{li} - Σ_l B_{jl} X_{li}
        for j in 0..kn {
            let mj = n.moduli[j];
            for i in 0..km {
                let row = s * nv + j * km + i;
                for l in 0..km {
                    let v = j * km + l;
                    let c = (scale[v] as u128 * a.get(l, i) as u128 % mj as u128) as u64;
                    eq.set(row, v, (eq.get(row, v) + c) % mj);
                }
                for l in 0..kn {
                    let v = l * km + i;
                    let c = (scale[v] as u128 * b.get(j, l) as u128 % mj as u128) as u64;
                    eq.set(row, v, (eq.get(row, v) + mj - c) % mj);
                }
                tgt.push(mj);
            }
        }
    }
    let sq = coordinate_kernel(&eq, &var_mod, &tgt);
    let reps = reps_as_u64(&sq, &var_mod);
    let generators = reps
        .iter()
        .map(|y| {
            let mut x = ModMatrix::zeros(kn, km);
            for j in 0..kn {
                for i in 0..km {
                    let v = j * km + i;
                    x.set(j, i, (y[v] as u128 * scale[v] as u128 % n.moduli[j] as u128) as u64);
                }
            }
            x
        })
        .collect();
    let orders = group_moduli(&sq.group);
    Ok(HomG { group: sq.group, generators, orders })
}

fn invariant_battery(m: &GModule) -> Vec<String> {
    let mut out = vec![m.underlying().to_string(), invariants(m).0.to_string(), coinvariants(m).0.to_string()];
    let g = m.group();
    let mut fixed: Vec<String> = g
        .elements()
        .map(|x| {
            let mut f = ModMatrix::zeros(m.dim(), m.dim());
            let a = m.action(x);
            for j in 0..m.dim() {
                for i in 0..m.dim() {
                    let md = m.moduli[j];
                    f.set(j, i, (a.get(j, i) + md - u64::from(i == j)) % md);
                }
            }
            coordinate_kernel(&f, &m.moduli, &m.moduli).group.to_string()
        })
        .collect();
    fixed.sort();
    out.extend(fixed);
    out
}

const EXHAUSTIVE_LIMIT: u64 = 64;
const ENUMERATION_LIMIT: u64 = 1 << 16;
const RANDOM_TRIALS: usize = 64;

/// Decides `M ≅ N` as modules: witnesses are searched in `Hom_G(M, N)`.
pub fn is_isomorphic(m: &GModule, n: &GModule) -> Result<IsoVerdict, ModuleError> {
    if *m.group != *n.group {
        return Err(ModuleError::GroupMismatch);
    }
    let (bm, bn) = (invariant_battery(m), invariant_battery(n));
    if bm != bn {
        return Ok(IsoVerdict::NotIsomorphic("invariant mismatch".into()));
    }
    if m.moduli == n.moduli {
        if let Ok(f) = ModuleMap::new(m.clone(), n.clone(), ModMatrix::identity(m.dim())) {
            return Ok(IsoVerdict::Isomorphic(f));
        }
    }
    let hom = hom_g(m, n)?;
    let try_matrix = |x: ModMatrix| -> Option<ModuleMap> {
        let f = ModuleMap::new(m.clone(), n.clone(), x).ok()?;
        f.is_isomorphism().then_some(f)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_TRIALS {
        let mut x = ModMatrix::zeros(n.dim(), m.dim());
        for (g, &o) in hom.generators.iter().zip(&hom.orders) {
            let c = rng.gen_range(0..o);
            for (d, s) in x.data.iter_mut().zip(&g.data) {
                *d += c * s;
            }
        }
        let x = x.reduced(&n.moduli);
        if let Some(f) = try_matrix(x) {
            return Ok(IsoVerdict::Isomorphic(f));
        }
    }
    let total = hom.group.order().and_then(|o| o.to_u64()).unwrap_or(u64::MAX);
    let small = m.order() <= BigUint::from(EXHAUSTIVE_LIMIT);
    if small || total <= ENUMERATION_LIMIT {
        for idx in 0..total {
            let mut rest = idx;
            let mut x = ModMatrix::zeros(n.dim(), m.dim());
            for (g, &o) in hom.generators.iter().zip(&hom.orders) {
                let c = rest % o;
                rest /= o;
                if c > 0 {
                    for (d, s) in x.data.iter_mut().zip(&g.data) {
                        *d += c * s;
                    }
                }
            }
            if let Some(f) = try_matrix(x.reduced(&n.moduli)) {
                return Ok(IsoVerdict::Isomorphic(f));
            }
        }
        return Ok(IsoVerdict::NotIsomorphic("no equivariant bijection exists".into()));
    }
    Ok(IsoVerdict::Undecided("invariant battery agrees; search space too large".into()))
}
