//! Universal coefficient check for trivial coefficients.
//!
//! `H_j(G, Ẑ)` is read off the levels `H_j(G, Z/m!)`: each level splits as
//! `H_j(G, Z)/m! ⊕ Tor(H_{j−1}(G, Z), Z/m!)`, so once `H_{j−1}` is known the Tor summand is cancelled
//! and the remainder is split into summands of full order `m!` (free rank) and the rest (torsion).
//! A degree is conclusive when rank and torsion agree over the last `window + 1` levels and `|G|` divides
//! every `m!` in that window (`|G|` kills the torsion of `H_j(G, Z)` for `j ≥ 1`).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::exact_algebra::local::factorize;
use crate::exact_algebra::{hom_and_ext, tensor_and_tor, FgAbelianGroup};
use crate::gmodules::GModule;
use crate::groups::FiniteGroup;

use super::{cohomology, cohomology_periodic, homology, CohomologyError};

pub const DEFAULT_COEFFICIENT_CAP: u64 = 13;
pub const DEFAULT_WINDOW: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UctVerdict {
    Holds,
    Fails(String),
    Inconclusive(String),
}

#[derive(Clone, Debug)]
pub struct UctReport {
    pub degree: usize,
    pub coefficient_cap: u64,
    pub window: usize,
    /// `levels[j][m − 1] = H_j(G, Z/m!)` for `j ≤ degree`, `1 ≤ m ≤ cap`.
    pub levels: Vec<Vec<FgAbelianGroup>>,
    /// Stabilized `H_j(G, Ẑ)`, `None` when not conclusive.
    pub integral: Vec<Option<FgAbelianGroup>>,
    pub cohomology: FgAbelianGroup,
    pub homology: FgAbelianGroup,
    pub ext: Option<FgAbelianGroup>,
    pub hom: Option<FgAbelianGroup>,
    pub tensor: Option<FgAbelianGroup>,
    pub tor: Option<FgAbelianGroup>,
    pub verdict: UctVerdict,
}

fn factorial(m: u64) -> Option<u64> {
    (1..=m).try_fold(1u64, |acc, x| acc.checked_mul(x))
}

fn prime_powers(g: &FgAbelianGroup) -> BTreeMap<(u64, u32), usize> {
    let mut out = BTreeMap::new();
    for d in g.generator_orders() {
        let d = d.to_u64().expect("level factor fits in u64");
        for (p, e) in factorize(d) {
            *out.entry((p, e)).or_insert(0) += 1;
        }
    }
    out
}

fn from_prime_powers(pp: &BTreeMap<(u64, u32), usize>) -> FgAbelianGroup {
    let mut per_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (&(p, e), &c) in pp {
        per_prime.entry(p).or_default().extend(std::iter::repeat_n(e, c));
    }
    let width = per_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut orders = vec![BigUint::from(1u32); width];
    for (p, mut es) in per_prime {
        es.sort_unstable();
        let off = width - es.len();
        for (i, e) in es.into_iter().enumerate() {
            orders[off + i] *= BigUint::from(p).pow(e);
        }
    }
    FgAbelianGroup::from_big_orders(&orders)
}

/// `level ⊖ tor` as finite abelian groups, or `None` if `tor` is not a summand.
fn cancel(level: &FgAbelianGroup, tor: &FgAbelianGroup) -> Option<FgAbelianGroup> {
    let mut a = prime_powers(level);
    for (k, c) in prime_powers(tor) {
        let slot = a.get_mut(&k)?;
        if *slot < c {
            return None;
        }
        *slot -= c;
    }
    a.retain(|_, c| *c > 0);
    Some(from_prime_powers(&a))
}

/// Free rank and torsion of `H_j(G, Z)/m!` for one level.
fn split_level(q: &FgAbelianGroup, full: u64) -> (usize, FgAbelianGroup) {
    let full = BigUint::from(full);
    let orders = q.generator_orders();
    let rank = orders.iter().filter(|d| **d == full).count();
    let rest: Vec<BigUint> = orders.into_iter().filter(|d| *d != full).collect();
    (rank, FgAbelianGroup::from_big_orders(&rest))
}

fn level_group(group: &Arc<FiniteGroup>, m: u64, j: usize) -> Result<FgAbelianGroup, CohomologyError> {
    let module = GModule::trivial(group.clone(), &[m])?;
    if group.cyclic_moduli().is_some() {
        Ok(cohomology_periodic(&module, j)?.value)
    } else {
        homology(group, &module, j)
    }
}

pub fn uct_check(
    group: &Arc<FiniteGroup>,
    a: &GModule,
    degree: usize,
    coefficient_cap: u64,
    window: usize,
) -> Result<UctReport, CohomologyError> {
    if !a.is_trivial_action() {
        return Err(CohomologyError::NontrivialAction);
    }
    if **a.group() != **group {
        return Err(CohomologyError::GroupMismatch);
    }
    if factorial(coefficient_cap).is_none() {
        return Err(CohomologyError::Unsupported(format!("coefficient cap {coefficient_cap} overflows u64 levels")));
    }
    let levels: Vec<Vec<FgAbelianGroup>> = (0..=degree)
        .map(|j| {
            (1..=coefficient_cap)
                .map(|m| level_group(group, factorial(m).unwrap(), j))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut integral: Vec<Option<FgAbelianGroup>> = Vec::with_capacity(degree + 1);
    for j in 0..=degree {
        let prev = if j == 0 { Some(FgAbelianGroup::trivial()) } else { integral[j - 1].clone() };
        let value = prev.and_then(|prev| {
            let prev_torsion = FgAbelianGroup::from_big_orders(&prev.torsion);
            let first = (coefficient_cap as usize).saturating_sub(window).max(1);
            let mut seen: Option<(usize, FgAbelianGroup)> = None;
            for m in first..=coefficient_cap as usize {
                let full = factorial(m as u64).unwrap();
                let (_, tor) = tensor_and_tor(&prev_torsion, &FgAbelianGroup::cyclic(full));
                let q = cancel(&levels[j][m - 1], &tor)?;
                let split = split_level(&q, full);
                if !full.is_multiple_of(group.order() as u64) || seen.as_ref().is_some_and(|s| *s != split) {
                    return None;
                }
                seen = Some(split);
            }
            seen.map(|(r, t)| FgAbelianGroup::new(r, t.torsion.clone()).expect("divisor chain"))
        });
        integral.push(value);
    }

    let coh = cohomology(group, a, degree)?.value;
    let hom_group = homology(group, a, degree)?;
    let coeff = a.underlying();
    let mut report = UctReport {
        degree,
        coefficient_cap,
        window,
        levels,
        integral: integral.clone(),
        cohomology: coh.clone(),
        homology: hom_group.clone(),
        ext: None,
        hom: None,
        tensor: None,
        tor: None,
        verdict: UctVerdict::Inconclusive(String::new()),
    };
    let lower = if degree == 0 { Some(FgAbelianGroup::trivial()) } else { integral[degree - 1].clone() };
    let (Some(hi), Some(hlo)) = (integral[degree].clone(), lower) else {
        report.verdict = UctVerdict::Inconclusive(format!(
            "H_{degree}(G, Ẑ) did not stabilize over levels Z/m!, m ≤ {coefficient_cap}"
        ));
        return Ok(report);
    };
    let (hom, _) = hom_and_ext(&hi, &coeff);
    let (_, ext) = hom_and_ext(&hlo, &coeff);
    let (tensor, _) = tensor_and_tor(&hi, &coeff);
    let (_, tor) = tensor_and_tor(&hlo, &coeff);
    let mut problems = Vec::new();
    if ext.direct_sum(&hom) != coh {
        problems.push(format!("H^{degree} has the wrong structure for Ext ⊕ Hom"));
    }
    if tensor.direct_sum(&tor) != hom_group {
        problems.push(format!("H_{degree} has the wrong structure for ⊗ ⊕ Tor"));
    }
    report.ext = Some(ext);
    report.hom = Some(hom);
    report.tensor = Some(tensor);
    report.tor = Some(tor);
    report.verdict = if problems.is_empty() { UctVerdict::Holds } else { UctVerdict::Fails(problems.join("; ")) };
    Ok(report)
}
