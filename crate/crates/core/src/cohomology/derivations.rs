//! `H^1(G, M) = Der(G, M) / PDer(G, M)` from crossed homomorphisms.

use std::sync::Arc;

use crate::exact_algebra::local::LocalRing;
use crate::exact_algebra::FgAbelianGroup;
use crate::gmodules::{coordinate_quotient, invariants, GModule};
use crate::groups::FiniteGroup;

use super::solver::{LocalProblem, Sparse};
use super::{assemble, combine_layout, embed_primary, local_actions, PrimaryPiece, CochainModel, CohomologyError, CohomologyGroup, Problem};

/// Unknowns `D(x)` for every `x ∈ G`; one equation `D(sh) = D(s) + s·D(h)` per generator `s`.
pub(crate) struct DerivationProblem {
    ring: LocalRing,
    ne: usize,
    k: usize,
    exps: Vec<u32>,
    act: Vec<Vec<u64>>,
    gens: Vec<usize>,
    mul: Vec<usize>,
}

impl DerivationProblem {
    fn new(group: &FiniteGroup, ring: LocalRing, exps: &[u32], act: Vec<Vec<u64>>) -> Self {
        let ne = group.order();
        let mut gens: Vec<usize> = group.generators().iter().copied().filter(|&s| s != 0).collect();
        gens.dedup();
        let mul = (0..ne * ne).map(|i| group.mul(i / ne, i % ne)).collect();
        DerivationProblem { ring, ne, k: exps.len(), exps: exps.to_vec(), act, gens, mul }
    }
}

impl LocalProblem for DerivationProblem {
    fn ring(&self) -> LocalRing {
        self.ring
    }

    fn num_params(&self) -> usize {
        self.ne * self.k
    }

    fn param_exps(&self) -> Vec<u32> {
        (0..self.ne).flat_map(|_| self.exps.iter().copied()).collect()
    }

    fn initial_rows(&self) -> Vec<Vec<u64>> {
        let (r, k, ne) = (&self.ring, self.k, self.ne);
        let mut rows = Vec::new();
        let mut push = |row: Vec<u64>, j: usize| {
            let s = r.pow_p(r.a - self.exps[j]);
            let row: Vec<u64> = row.into_iter().map(|x| r.mul(x, s)).collect();
            if row.iter().any(|&x| x != 0) {
                rows.push(row);
            }
        };
        for j in 0..k {
            let mut row = vec![0u64; ne * k];
            row[j] = 1;
            push(row, j);
        }
        for &s in &self.gens {
            let a = &self.act[s];
            for h in 0..ne {
                let sh = self.mul[s * ne + h];
                for j in 0..k {
                    let mut row = vec![0u64; ne * k];
                    row[sh * k + j] = r.add(row[sh * k + j], 1);
                    row[s * k + j] = r.sub(row[s * k + j], 1);
                    for l in 0..k {
                        row[h * k + l] = r.sub(row[h * k + l], a[j * k + l]);
                    }
                    push(row, j);
                }
            }
        }
        rows
    }

    fn violations(&self, _z: &[u64], _limit: usize) -> Vec<Vec<u64>> {
        Vec::new()
    }

    fn coboundaries(&self) -> Vec<Sparse> {
        let (r, k) = (&self.ring, self.k);
        (0..k)
            .map(|l| {
                let mut col = Vec::new();
                for x in 0..self.ne {
                    let a = &self.act[x];
                    for j in 0..k {
                        let v = r.sub(a[j * k + l], u64::from(j == l));
                        if v != 0 {
                            col.push(((x * k + j) as u32, v));
                        }
                    }
                }
                col
            })
            .collect()
    }
}

/// `H^1` together with the groups of derivations and principal derivations.
#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub value: CohomologyGroup,
    pub der: FgAbelianGroup,
    pub pder: FgAbelianGroup,
    /// Generating derivations of `der`, as value tables `x ↦ D(x)`.
    pub der_basis: Vec<Vec<u64>>,
    /// The principal derivations `x ↦ x·e_l − e_l`.
    pub pder_basis: Vec<Vec<u64>>,
}

pub fn h1_via_derivations(group: &Arc<FiniteGroup>, m: &GModule) -> Result<DerivationReport, CohomologyError> {
    if **m.group() != **group {
        return Err(CohomologyError::GroupMismatch);
    }
    let ne = group.order();
    let value = assemble(group, m, 1, CochainModel::Bar, ne, true, |ring, coords, exps| {
        Problem::Derivation(DerivationProblem::new(group, ring, exps, local_actions(m, coords, ring)))
    })?;

    let cocycle_parts: Vec<(u64, &[u32])> = value
        .parts
        .iter()
        .map(|pp| (pp.p, pp.solution.cocycles.as_ref().map(|c| c.0.as_slice()).unwrap_or(&[])))
        .collect();
    let (orders, layout) = combine_layout(&cocycle_parts);
    let der = FgAbelianGroup::from_big_orders(&orders);
    let der_basis = layout
        .iter()
        .map(|comps| {
            let pieces: Vec<PrimaryPiece> = comps
                .iter()
                .map(|&(pi, t)| {
                    let pp = &value.parts[pi];
                    let reps = &pp.solution.cocycles.as_ref().expect("cocycles requested").1;
                    (pp.p, pp.coords.as_slice(), pp.exps.as_slice(), reps[t].as_slice())
                })
                .collect();
            embed_primary(m.moduli(), ne, &pieces)
        })
        .collect();

    let moduli = m.moduli();
    let k = moduli.len();
    let pder_basis: Vec<Vec<u64>> = (0..k)
        .map(|l| {
            let mut d = vec![0u64; ne * k];
            for x in group.elements() {
                let a = m.action(x);
                for j in 0..k {
                    d[x * k + j] = (a.get(j, l) + moduli[j] - u64::from(j == l) % moduli[j]) % moduli[j];
                }
            }
            d
        })
        .collect();
    let (_, inc) = invariants(m);
    let fixed: Vec<Vec<u64>> =
        (0..inc.matrix.cols).map(|c| (0..inc.matrix.rows).map(|r| inc.matrix.get(r, c)).collect()).collect();
    let pder = coordinate_quotient(moduli, &fixed).group;
    Ok(DerivationReport { value, der, pder, der_basis, pder_basis })
}
