//! Induced maps on cohomology: inflation, restriction, conjugation and coefficient change.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::exact_algebra::{IntMatrix, SubquotientMap};
use crate::gmodules::{GModule, ModuleMap};
use crate::groups::{FiniteGroup, Homomorphism, SubgroupWithTransversal};

use super::bar::{tuple_digits, tuple_index};
use super::{cohomology, cohomology_periodic, CochainModel, CohomologyError, CohomologyGroup, PeriodicComplex};

/// A homomorphism `H^n(·) → H^n(·)` with its source and target computations.
#[derive(Clone, Debug)]
pub struct CohomologyMap {
    pub source: CohomologyGroup,
    pub target: CohomologyGroup,
    pub map: SubquotientMap,
}

impl CohomologyMap {
    /// Map sending the `i`-th source generator to the class of `images[i]`.
    pub fn from_cochains(
        source: CohomologyGroup,
        target: CohomologyGroup,
        images: &[Vec<u64>],
    ) -> Result<Self, CohomologyError> {
        let mut m = IntMatrix::zeros(target.value.num_generators(), source.value.num_generators());
        for (j, f) in images.iter().enumerate() {
            if !target.is_cocycle(f)? {
                return Err(CohomologyError::Internal("image cochain is not a cocycle".into()));
            }
            for (i, c) in target.decode(f)?.into_iter().enumerate() {
                m.set(i, j, BigInt::from(c));
            }
        }
        let map = SubquotientMap::new(source.value.clone(), target.value.clone(), m)?;
        Ok(CohomologyMap { source, target, map })
    }

    pub fn compose(&self, first: &CohomologyMap) -> Result<SubquotientMap, CohomologyError> {
        Ok(self.map.compose(&first.map)?)
    }
}

/// `f ↦ (y ↦ A(f(φ(y_1), …, φ(y_n))))` for a bar cochain over the target of `φ`.
pub(crate) fn pull_back(
    f: &[u64],
    n: usize,
    src_order: usize,
    tgt_order: usize,
    phi: &dyn Fn(usize) -> usize,
    k: usize,
) -> Vec<u64> {
    let tuples = src_order.pow(n as u32);
    let mut out = vec![0u64; tuples * k];
    let mut y = vec![0usize; n];
    for idx in 0..tuples {
        tuple_digits(src_order, idx, n, &mut y);
        for v in y.iter_mut() {
            *v = phi(*v);
        }
        let t = tuple_index(tgt_order, &y);
        out[idx * k..(idx + 1) * k].copy_from_slice(&f[t * k..(t + 1) * k]);
    }
    out
}

/// `inf : H^n(Q, M) → H^n(G, M)` along a surjection `π : G → Q`.
pub fn inflation_map(proj: &Homomorphism, m: &GModule, n: usize) -> Result<CohomologyMap, CohomologyError> {
    if !proj.is_surjective() {
        return Err(CohomologyError::NotSurjective);
    }
    if **m.group() != *proj.target {
        return Err(CohomologyError::GroupMismatch);
    }
    let inflated = m.restrict_along(proj)?;
    let source = cohomology(&proj.target, m, n)?;
    let target = cohomology(&proj.source, &inflated, n)?;
    inflation_between(proj, source, target)
}

/// Bar-model inflation between already computed groups `H^n(Q, M)` and `H^n(G, π^*M)`.
pub(crate) fn inflation_between(
    proj: &Homomorphism,
    source: CohomologyGroup,
    target: CohomologyGroup,
) -> Result<CohomologyMap, CohomologyError> {
    let n = source.degree;
    let (g, q) = (proj.source.order(), proj.target.order());
    let k = source.module().dim();
    let images: Vec<Vec<u64>> =
        source.representatives.iter().map(|f| pull_back(f, n, g, q, &|x| proj.image(x), k)).collect();
    CohomologyMap::from_cochains(source, target, &images)
}
/// `res : H^n(G, M) → H^n(H, M)`.
pub fn restriction_map(sub: &SubgroupWithTransversal, m: &GModule, n: usize) -> Result<CohomologyMap, CohomologyError> {
    if **m.group() != *sub.ambient {
        return Err(CohomologyError::GroupMismatch);
    }
    let restricted = m.restrict_to(sub)?;
    let source = cohomology(&sub.ambient, m, n)?;
    let target = cohomology(&sub.group, &restricted, n)?;
    let images: Vec<Vec<u64>> = source
        .representatives
        .iter()
        .map(|f| pull_back(f, n, sub.group.order(), sub.ambient.order(), &|x| sub.embedding[x], m.dim()))
        .collect();
    CohomologyMap::from_cochains(source, target, &images)
}

/// Action of `g ∈ G` on `H^n(N, M)` for a normal subgroup `N`: `f ↦ g·f(g⁻¹ y_1 g, …)`.
pub fn conjugation_action(
    nsub: &SubgroupWithTransversal,
    m: &GModule,
    n: usize,
    g: usize,
) -> Result<CohomologyMap, CohomologyError> {
    if !nsub.is_normal() {
        return Err(CohomologyError::NotNormal);
    }
    let h = cohomology(&nsub.group, &m.restrict_to(nsub)?, n)?;
    let images = conjugate_cochains(nsub, m, n, g, &h.representatives);
    CohomologyMap::from_cochains(h.clone(), h, &images)
}

pub(crate) fn conjugate_cochains(
    nsub: &SubgroupWithTransversal,
    m: &GModule,
    n: usize,
    g: usize,
    cochains: &[Vec<u64>],
) -> Vec<Vec<u64>> {
    let amb = &nsub.ambient;
    let gi = amb.inv(g);
    let no = nsub.group.order();
    let conj = |x: usize| nsub.local(amb.mul(amb.mul(gi, nsub.embedding[x]), g));
    let a = m.action(g);
    let moduli = m.moduli();
    let k = moduli.len();
    cochains
        .iter()
        .map(|f| {
            let mut out = pull_back(f, n, no, no, &conj, k);
            for chunk in out.chunks_mut(k.max(1)) {
                if k > 0 {
                    let v = a.apply(chunk, moduli);
                    chunk.copy_from_slice(&v);
                }
            }
            out
        })
        .collect()
}

/// `H^n(G, M) → H^n(G, M')` induced by a module map.
pub fn coefficient_map(f: &ModuleMap, n: usize) -> Result<CohomologyMap, CohomologyError> {
    let g = f.source.group().clone();
    let source = cohomology(&g, &f.source, n)?;
    let target = cohomology(&g, &f.target, n)?;
    let images = apply_coefficients(f, &source.representatives, g.order().pow(n as u32));
    CohomologyMap::from_cochains(source, target, &images)
}

/// Coefficient map between already computed groups of the same model.
pub(crate) fn coefficient_map_between(
    f: &ModuleMap,
    source: CohomologyGroup,
    target: CohomologyGroup,
) -> Result<CohomologyMap, CohomologyError> {
    if source.model != target.model || source.tuples != target.tuples {
        return Err(CohomologyError::Internal("coefficient map between different cochain models".into()));
    }
    let images = apply_coefficients(f, &source.representatives, source.tuples);
    CohomologyMap::from_cochains(source, target, &images)
}

fn apply_coefficients(f: &ModuleMap, cochains: &[Vec<u64>], tuples: usize) -> Vec<Vec<u64>> {
    let (k, kt) = (f.source.dim(), f.target.dim());
    cochains
        .iter()
        .map(|c| {
            let mut out = Vec::with_capacity(tuples * kt);
            for t in 0..tuples {
                out.extend(f.apply(&c[t * k..(t + 1) * k]));
            }
            out
        })
        .collect()
}

/// Periodic-model coefficient map for cyclic-product groups.
pub fn periodic_coefficient_map(f: &ModuleMap, n: usize) -> Result<CohomologyMap, CohomologyError> {
    let source = cohomology_periodic(&f.source, n)?;
    let target = cohomology_periodic(&f.target, n)?;
    let images = apply_coefficients(f, &source.representatives, target.cochain_len() / f.target.dim().max(1));
    CohomologyMap::from_cochains(source, target, &images)
}

/// Periodic-model inflation along a reduction `Π Z/N_i → Π Z/n_i` sending generators to generators.
pub fn periodic_inflation(proj: &Homomorphism, m: &GModule, n: usize) -> Result<CohomologyMap, CohomologyError> {
    if **m.group() != *proj.target {
        return Err(CohomologyError::GroupMismatch);
    }
    let inflated = m.restrict_along(proj)?;
    let source = cohomology_periodic(m, n)?;
    let target = cohomology_periodic(&inflated, n)?;
    periodic_inflation_between(proj, source, target)
}

/// Periodic inflation between already computed groups.
///
/// The comparison map of resolutions multiplies the shape `κ` by `Π (N_i/n_i)^{⌊κ_i/2⌋}` and
/// kills every shape that uses a factor with `n_i = 1`.
pub(crate) fn periodic_inflation_between(
    proj: &Homomorphism,
    source: CohomologyGroup,
    target: CohomologyGroup,
) -> Result<CohomologyMap, CohomologyError> {
    let (Some(big), Some(small)) = (proj.source.cyclic_moduli(), proj.target.cyclic_moduli()) else {
        return Err(CohomologyError::Unsupported("periodic inflation needs cyclic-product groups".into()));
    };
    if big.len() != small.len() || !is_standard_reduction(proj) {
        return Err(CohomologyError::Unsupported("periodic inflation needs a generator-preserving reduction".into()));
    }
    let n = source.degree;
    let m = source.module();
    let pc_small = PeriodicComplex::new(&proj.target, m)?;
    let pc_big = PeriodicComplex::new(&proj.source, target.module())?;
    let modulus = m.exponent().max(1) as u128;
    let small_shapes: HashMap<Vec<usize>, usize> =
        pc_small.shapes(n).into_iter().enumerate().map(|(i, s)| (s, i)).collect();
    let plan: Vec<Option<(usize, u128)>> = pc_big
        .shapes(n)
        .iter()
        .map(|kappa| {
            let mut reduced = Vec::with_capacity(pc_small.rank());
            let mut scalar = 1 % modulus;
            for (pos, &f) in pc_big.factors.iter().enumerate() {
                match pc_small.factors.iter().position(|&x| x == f) {
                    Some(_) => {
                        reduced.push(kappa[pos]);
                        let ratio = (big[f] / small[f]) as u128 % modulus;
                        for _ in 0..kappa[pos] / 2 {
                            scalar = scalar * ratio % modulus;
                        }
                    }
                    None if kappa[pos] > 0 => return None,
                    None => {}
                }
            }
            Some((small_shapes[&reduced], scalar))
        })
        .collect();
    let moduli = m.moduli();
    let k = moduli.len();
    let images: Vec<Vec<u64>> = source
        .representatives
        .iter()
        .map(|f| {
            let mut out = vec![0u64; plan.len() * k];
            for (s, entry) in plan.iter().enumerate() {
                if let Some((t, c)) = *entry {
                    for j in 0..k {
                        let md = moduli[j] as u128;
                        out[s * k + j] = ((f[t * k + j] as u128 * (c % md)) % md) as u64;
                    }
                }
            }
            out
        })
        .collect();
    debug_assert_eq!(source.model, CochainModel::Periodic);
    CohomologyMap::from_cochains(source, target, &images)
}

fn is_standard_reduction(proj: &Homomorphism) -> bool {
    let src: &Arc<FiniteGroup> = &proj.source;
    let tgt = &proj.target;
    src.generators().len() == tgt.generators().len()
        && src.generators().iter().zip(tgt.generators()).all(|(&s, &t)| proj.image(s) == t)
}
