//! Inflation-restriction and the transgression `H^1(N, A)^{G/N} → H^2(G/N, A^N)`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;

use crate::exact_algebra::{solve_integer, FgAbelianGroup, IntMatrix, Subquotient, SubquotientMap};
use crate::gmodules::{invariants_under, GModule, ModuleMap};
use crate::groups::{quotient_by, FiniteGroup, Homomorphism, SubgroupWithTransversal};

use super::bar::tuple_index;
use super::maps::{conjugate_cochains, pull_back};
use super::{cohomology, CohomologyError, CohomologyGroup};

/// The transgression on the `G/N`-invariant part of `H^1(N, A)`.
#[derive(Clone, Debug)]
pub struct Transgression {
    /// `H^1(N, A)^{G/N}` inside `H^1(N, A)`.
    pub invariant: Subquotient,
    pub map: SubquotientMap,
    pub h1_n: CohomologyGroup,
    pub h2_q: CohomologyGroup,
    pub quotient: Arc<FiniteGroup>,
    pub projection: Homomorphism,
    /// `A^N` as a `G/N`-module and its inclusion into `A` over `G`.
    pub fixed: GModule,
    pub fixed_inclusion: ModuleMap,
}

#[derive(Clone)]
struct Setup {
    q: Arc<FiniteGroup>,
    proj: Homomorphism,
    fixed_q: GModule,
    incl: ModuleMap,
    h1_n: CohomologyGroup,
    invariant: Subquotient,
}

fn setup(nsub: &SubgroupWithTransversal, a: &GModule) -> Result<Setup, CohomologyError> {
    if !nsub.is_normal() {
        return Err(CohomologyError::NotNormal);
    }
    if **a.group() != *nsub.ambient {
        return Err(CohomologyError::GroupMismatch);
    }
    let g = &nsub.ambient;
    let (q, proj) = quotient_by(g, &nsub.members)?;
    let (fixed_g, incl) = invariants_under(a, &nsub.members)?;
    let fixed_q = fixed_g.descend(&proj)?;
    let h1_n = cohomology(&nsub.group, &a.restrict_to(nsub)?, 1)?;

    let src = h1_n.value.clone();
    let gens: Vec<usize> = g.generators().to_vec();
    let mut stacked = IntMatrix::zeros(src.num_generators() * gens.len(), src.num_generators());
    let mut torsion: Vec<BigUint> = Vec::new();
    for (b, &x) in gens.iter().enumerate() {
        let images = conjugate_cochains(nsub, a, 1, x, &h1_n.representatives);
        for (j, f) in images.iter().enumerate() {
            let c = h1_n.decode(f)?;
            for (i, v) in c.into_iter().enumerate() {
                let d = BigInt::from(v) - BigInt::from(u64::from(i == j));
                stacked.set(b * src.num_generators() + i, j, d);
            }
        }
        torsion.extend(src.generator_orders());
    }
    let mut order: Vec<usize> = (0..torsion.len()).collect();
    order.sort_by(|&i, &j| torsion[i].cmp(&torsion[j]));
    let mut sorted = IntMatrix::zeros(stacked.rows(), stacked.cols());
    for (r, &i) in order.iter().enumerate() {
        for c in 0..stacked.cols() {
            sorted.set(r, c, stacked.get(i, c).clone());
        }
    }
    let sum = FgAbelianGroup::new(0, order.iter().map(|&i| torsion[i].clone()).collect())?;
    let sum_ordered = SubquotientMap::new(src.clone(), sum, sorted);
    let invariant = match sum_ordered {
        Ok(m) => m.kernel(),
        Err(_) => {
            return Err(CohomologyError::Internal("conjugation matrices are not well defined".into()));
        }
    };
    Ok(Setup { q, proj, fixed_q, incl, h1_n, invariant })
}

/// Solves `x·a − a = v(x)` for all generators `x` of `N`.
fn coboundary_witness(
    nsub: &SubgroupWithTransversal,
    a: &GModule,
    v: &dyn Fn(usize) -> Vec<u64>,
) -> Result<Vec<u64>, CohomologyError> {
    let moduli = a.moduli();
    let k = moduli.len();
    let ngens: Vec<usize> = nsub.group.generators().iter().map(|&i| nsub.embedding[i]).collect();
    let rows = k * ngens.len();
    let mut m = IntMatrix::zeros(rows, k + rows);
    let mut rhs = vec![BigInt::from(0); rows];
    for (b, &x) in ngens.iter().enumerate() {
        let act = a.action(x);
        let target = v(x);
        for j in 0..k {
            let r = b * k + j;
            for l in 0..k {
                let e = act.get(j, l) as i128 - i128::from(j == l);
                m.set(r, l, BigInt::from(e));
            }
            m.set(r, k + r, BigInt::from(moduli[j]));
            rhs[r] = BigInt::from(target[j]);
        }
    }
    let sol = solve_integer(&m, &rhs)
        .ok_or_else(|| CohomologyError::Internal("class is not invariant under conjugation".into()))?;
    Ok((0..k).map(|j| u64::try_from(sol[j].mod_floor(&BigInt::from(moduli[j]))).unwrap()).collect())
}

/// 2-cochain on `G/N` with values in `A^N` obtained from an invariant 1-cocycle `f` on `N`.
fn transgress_cocycle(
    nsub: &SubgroupWithTransversal,
    a: &GModule,
    st: &Setup,
    f: &[u64],
) -> Result<Vec<u64>, CohomologyError> {
    let g = &nsub.ambient;
    let moduli = a.moduli();
    let k = moduli.len();
    let fval = |x: usize| -> Vec<u64> { f[nsub.local(x) * k..(nsub.local(x) + 1) * k].to_vec() };

    let mut shifts: Vec<Vec<u64>> = Vec::with_capacity(nsub.transversal.len());
    for &t in &nsub.transversal {
        let ti = g.inv(t);
        let at = a.action(t);
        let shift = coboundary_witness(nsub, a, &|x| {
            let conj = g.mul(g.mul(ti, x), t);
            let tf = at.apply(&fval(conj), moduli);
            let fx = fval(x);
            (0..k).map(|j| (tf[j] + moduli[j] - fx[j]) % moduli[j]).collect()
        })?;
        shifts.push(shift);
    }
    let big_f = |x: usize| -> Vec<u64> {
        let (h, c) = nsub.decompose(x);
        let n = nsub.embedding[h];
        let na = a.act(n, &shifts[c]);
        let fx = fval(n);
        (0..k).map(|j| (fx[j] + na[j]) % moduli[j]).collect()
    };

    let qo = st.q.order();
    let mut rep_of = vec![usize::MAX; qo];
    for &t in &nsub.transversal {
        rep_of[st.proj.image(t)] = t;
    }
    let incl = &st.incl.matrix;
    let kn = st.fixed_q.dim();
    let mut solve_m = IntMatrix::zeros(k, kn + k);
    for j in 0..k {
        for l in 0..kn {
            solve_m.set(j, l, BigInt::from(incl.get(j, l)));
        }
        solve_m.set(j, kn + j, BigInt::from(moduli[j]));
    }
    let sub_moduli = st.fixed_q.moduli();
    let mut c = vec![0u64; qo * qo * kn];
    for q1 in 0..qo {
        for q2 in 0..qo {
            let (g1, g2) = (rep_of[q1], rep_of[q2]);
            let a1 = a.act(g1, &big_f(g2));
            let f12 = big_f(g.mul(g1, g2));
            let f1 = big_f(g1);
            let rhs: Vec<BigInt> =
                (0..k).map(|j| BigInt::from((a1[j] + 2 * moduli[j] - f12[j] + f1[j]) % moduli[j])).collect();
            let sol = solve_integer(&solve_m, &rhs)
                .ok_or_else(|| CohomologyError::Internal("transgression value outside A^N".into()))?;
            let idx = tuple_index(qo, &[q1, q2]);
            for l in 0..kn {
                c[idx * kn + l] = u64::try_from(sol[l].mod_floor(&BigInt::from(sub_moduli[l]))).unwrap();
            }
        }
    }
    Ok(c)
}

/// `tg : H^1(N, A)^{G/N} → H^2(G/N, A^N)` using the transversal carried by `nsub`.
pub fn transgression(nsub: &SubgroupWithTransversal, a: &GModule) -> Result<Transgression, CohomologyError> {
    let st = setup(nsub, a)?;
    build_transgression(nsub, a, st)
}

fn build_transgression(
    nsub: &SubgroupWithTransversal,
    a: &GModule,
    st: Setup,
) -> Result<Transgression, CohomologyError> {
    let h2_q = cohomology(&st.q, &st.fixed_q, 2)?;
    let inv = &st.invariant;
    let mut m = IntMatrix::zeros(h2_q.value.num_generators(), inv.group.num_generators());
    for j in 0..inv.group.num_generators() {
        let coeffs = inv.representatives.column(j);
        let f = st.h1_n.combination(&coeffs);
        let c = transgress_cocycle(nsub, a, &st, &f)?;
        if !h2_q.is_cocycle(&c)? {
            return Err(CohomologyError::Internal("transgressed cochain is not a cocycle".into()));
        }
        for (i, v) in h2_q.decode(&c)?.into_iter().enumerate() {
            m.set(i, j, BigInt::from(v));
        }
    }
    let map = SubquotientMap::new(inv.group.clone(), h2_q.value.clone(), m)?;
    Ok(Transgression {
        invariant: st.invariant.clone(),
        map,
        h1_n: st.h1_n.clone(),
        h2_q,
        quotient: st.q.clone(),
        projection: st.proj.clone(),
        fixed: st.fixed_q.clone(),
        fixed_inclusion: st.incl.clone(),
    })
}

/// Orders and exactness verdicts for
/// `0 → H^1(G/N, A^N) → H^1(G, A) → H^1(N, A)^{G/N} → H^2(G/N, A^N) → H^2(G, A)`.
#[derive(Clone, Debug)]
pub struct FiveTermReport {
    pub h1_quotient: FgAbelianGroup,
    pub h1_group: FgAbelianGroup,
    pub h1_normal_invariant: FgAbelianGroup,
    pub h2_quotient: FgAbelianGroup,
    pub h2_group: FgAbelianGroup,
    pub inflation_injective: bool,
    pub exact_at_h1_group: bool,
    pub exact_at_invariants: bool,
    pub exact_at_h2_quotient: bool,
    pub transgression: SubquotientMap,
}

impl FiveTermReport {
    pub fn is_exact(&self) -> bool {
        self.inflation_injective && self.exact_at_h1_group && self.exact_at_invariants && self.exact_at_h2_quotient
    }
}

/// Inflation `H^n(G/N, A^N) → H^n(G, A)` as a cochain map.
fn inflate_into(
    st: &Setup,
    a: &GModule,
    n: usize,
    source: &CohomologyGroup,
    target: &CohomologyGroup,
) -> Result<SubquotientMap, CohomologyError> {
    let g = &st.proj.source;
    let kn = st.fixed_q.dim();
    let k = a.dim();
    let tuples = g.order().pow(n as u32);
    let mut m = IntMatrix::zeros(target.value.num_generators(), source.value.num_generators());
    for (j, f) in source.representatives.iter().enumerate() {
        let pulled = pull_back(f, n, g.order(), st.q.order(), &|x| st.proj.image(x), kn);
        let mut img = Vec::with_capacity(tuples * k);
        for t in 0..tuples {
            img.extend(st.incl.apply(&pulled[t * kn..(t + 1) * kn]));
        }
        for (i, v) in target.decode(&img)?.into_iter().enumerate() {
            m.set(i, j, BigInt::from(v));
        }
    }
    Ok(SubquotientMap::new(source.value.clone(), target.value.clone(), m)?)
}

fn order_of(sq: &Subquotient) -> BigUint {
    sq.group.order().expect("finite cohomology")
}

pub fn five_term_check(nsub: &SubgroupWithTransversal, a: &GModule) -> Result<FiveTermReport, CohomologyError> {
    let st = setup(nsub, a)?;
    let g = nsub.ambient.clone();
    let h1_q = cohomology(&st.q, &st.fixed_q, 1)?;
    let h1_g = cohomology(&g, a, 1)?;
    let h2_g = cohomology(&g, a, 2)?;
    let inf1 = inflate_into(&st, a, 1, &h1_q, &h1_g)?;

    let k = a.dim();
    let no = nsub.group.order();
    let inv = st.invariant.clone();
    let mut res_m = IntMatrix::zeros(inv.group.num_generators(), h1_g.value.num_generators());
    for (j, f) in h1_g.representatives.iter().enumerate() {
        let r = pull_back(f, 1, no, g.order(), &|x| nsub.embedding[x], k);
        let c: Vec<BigInt> = st.h1_n.decode(&r)?.into_iter().map(BigInt::from).collect();
        let coords = inv
            .coordinates(&c)
            .ok_or_else(|| CohomologyError::Internal("restriction is not conjugation invariant".into()))?;
        for (i, v) in coords.into_iter().enumerate() {
            res_m.set(i, j, v);
        }
    }
    let res = SubquotientMap::new(h1_g.value.clone(), inv.group.clone(), res_m)?;

    let tg = build_transgression(nsub, a, st.clone())?;
    let inf2 = inflate_into(&st, a, 2, &tg.h2_q, &h2_g)?;

    let exact = |first: &SubquotientMap, second: &SubquotientMap| -> Result<bool, CohomologyError> {
        let comp = second.compose(first)?;
        Ok(comp.is_zero() && order_of(&first.image()) == order_of(&second.kernel()))
    };
    Ok(FiveTermReport {
        h1_quotient: h1_q.value.clone(),
        h1_group: h1_g.value.clone(),
        h1_normal_invariant: inv.group.clone(),
        h2_quotient: tg.h2_q.value.clone(),
        h2_group: h2_g.value.clone(),
        inflation_injective: inf1.is_injective(),
        exact_at_h1_group: exact(&inf1, &res)?,
        exact_at_invariants: exact(&res, &tg.map)?,
        exact_at_h2_quotient: exact(&tg.map, &inf2)?,
        transgression: tg.map,
    })
}
