//! Cohomology and homology of finite groups with coefficients in finite modules.
//!
//! Each computation splits the module into primary parts `M_p` and solves over `Z/p^a`.
//! Two cochain models are available: the unnormalized bar complex (any group) and the
//! tensor product of periodic resolutions (products of cyclic groups only).

pub mod bar;
mod derivations;
mod five_term;
mod maps;
pub mod periodic;
pub(crate) mod solver;
mod uct;

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::exact_algebra::local::{crt_idempotent, factorize, valuation, LocalRing};
use crate::exact_algebra::{AlgebraError, FgAbelianGroup};
use crate::gmodules::{pontryagin_dual, GModule, ModuleError};
use crate::groups::{FiniteGroup, GroupError};
use crate::limits::caps;

pub use bar::{cochain_dimension, BarCochainComplex};
pub use derivations::{h1_via_derivations, DerivationReport};
pub use five_term::{five_term_check, transgression, FiveTermReport, Transgression};
pub use maps::{
    coefficient_map, conjugation_action, inflation_map, periodic_coefficient_map, periodic_inflation, restriction_map,
    CohomologyMap,
};
pub(crate) use maps::{coefficient_map_between, inflation_between, periodic_inflation_between};
pub use periodic::PeriodicComplex;
pub use uct::{uct_check, UctReport, UctVerdict, DEFAULT_COEFFICIENT_CAP, DEFAULT_WINDOW};

use bar::{mul_table, BarProblem};
use periodic::PeriodicProblem;
use solver::{LocalProblem, LocalSolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("cochain space needs {required} coordinates, cap is {cap}")]
    SizeCapExceeded { required: u128, cap: usize },
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("module is defined over a different group")]
    GroupMismatch,
    #[error("projection is not surjective")]
    NotSurjective,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("coefficients must carry the trivial action")]
    NontrivialAction,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Cochain model in which representatives are expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CochainModel {
    Bar,
    Periodic,
}

#[derive(Clone, Debug)]
struct PrimePart {
    p: u64,
    coords: Vec<usize>,
    exps: Vec<u32>,
    param_tuples: Vec<usize>,
    solution: LocalSolution,
}

/// `H^n(G, M)` with explicit cocycle representatives.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub value: FgAbelianGroup,
    pub degree: usize,
    pub model: CochainModel,
    /// One cocycle per generator of `value`, in the cochain coordinates of `model`.
    pub representatives: Vec<Vec<u64>>,
    group: Arc<FiniteGroup>,
    module: GModule,
    tuples: usize,
    parts: Vec<PrimePart>,
    /// For each generator of `value`, the contributing `(part, factor)` pairs.
    layout: Vec<Vec<(usize, usize)>>,
}

enum Problem {
    Bar(BarProblem),
    Periodic(PeriodicProblem),
    Derivation(derivations::DerivationProblem),
}

impl Problem {
    fn as_dyn(&self) -> &dyn LocalProblem {
        match self {
            Problem::Bar(b) => b,
            Problem::Periodic(p) => p,
            Problem::Derivation(d) => d,
        }
    }

    fn lift(&self, z: &[u64]) -> Vec<u64> {
        match self {
            Problem::Bar(b) => b.lift(z),
            _ => z.to_vec(),
        }
    }
}

/// Coordinates of `M` carrying `p`-torsion, with their exponents.
fn primary_coords(module: &GModule, p: u64) -> (Vec<usize>, Vec<u32>) {
    let mut coords = Vec::new();
    let mut exps = Vec::new();
    for (j, &m) in module.moduli().iter().enumerate() {
        let v = valuation(m, p);
        if v > 0 {
            coords.push(j);
            exps.push(v);
        }
    }
    (coords, exps)
}

fn local_actions(module: &GModule, coords: &[usize], ring: LocalRing) -> Vec<Vec<u64>> {
    let k = coords.len();
    module
        .group()
        .elements()
        .map(|x| {
            let a = module.action(x);
            let mut out = vec![0u64; k * k];
            for (r, &jr) in coords.iter().enumerate() {
                for (c, &jc) in coords.iter().enumerate() {
                    out[r * k + c] = a.get(jr, jc) % ring.q;
                }
            }
            out
        })
        .collect()
}

/// Aligns primary factor lists (ascending) into invariant factors of the sum.
pub(crate) fn combine_layout(parts: &[(u64, &[u32])]) -> (Vec<BigUint>, Vec<Vec<(usize, usize)>>) {
    let width = parts.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut layout = Vec::with_capacity(width);
    let mut orders = Vec::with_capacity(width);
    for i in 0..width {
        let mut comps = Vec::new();
        let mut d = BigUint::from(1u32);
        for (pi, (p, e)) in parts.iter().enumerate() {
            if i + e.len() >= width {
                let t = i + e.len() - width;
                comps.push((pi, t));
                d *= BigUint::from(*p).pow(e[t]);
            }
        }
        layout.push(comps);
        orders.push(d);
    }
    (orders, layout)
}

/// A `p`-primary cochain: the prime, its coordinates, their exponents and the local values.
pub(crate) type PrimaryPiece<'a> = (u64, &'a [usize], &'a [u32], &'a [u64]);

/// Sums primary cochains `σ_p(local)` into one cochain over all coordinates of `M`.
pub(crate) fn embed_primary(
    moduli: &[u64],
    tuples: usize,
    pieces: &[PrimaryPiece],
) -> Vec<u64> {
    let k = moduli.len();
    let mut f = vec![0u64; tuples * k];
    for &(p, coords, exps, local) in pieces {
        let kp = coords.len();
        for (jj, &j) in coords.iter().enumerate() {
            let pa = p.pow(exps[jj]);
            let eps = crt_idempotent(moduli[j], p) as u128;
            for tup in 0..tuples {
                let v = (local[tup * kp + jj] % pa) as u128 * eps % moduli[j] as u128;
                let slot = &mut f[tup * k + j];
                *slot = ((*slot as u128 + v) % moduli[j] as u128) as u64;
            }
        }
    }
    f
}

fn build(
    group: &Arc<FiniteGroup>,
    module: &GModule,
    degree: usize,
    model: CochainModel,
) -> Result<CohomologyGroup, CohomologyError> {
    if **module.group() != **group {
        return Err(CohomologyError::GroupMismatch);
    }
    match model {
        CochainModel::Bar => {
            cochain_dimension(group, module, degree)?;
            let tuples = group.order().pow(degree as u32);
            let mul = mul_table(group);
            assemble(group, module, degree, model, tuples, false, |ring, coords, exps| {
                let act = local_actions(module, coords, ring);
                Problem::Bar(BarProblem::new(group, mul.clone(), ring, exps.to_vec(), act, degree))
            })
        }
        CochainModel::Periodic => {
            let pc = PeriodicComplex::new(group, module)?;
            let dim = pc.dimension(degree + 1).max(pc.dimension(degree));
            if dim > caps().cochain {
                return Err(CohomologyError::SizeCapExceeded { required: dim as u128, cap: caps().cochain });
            }
            let tuples = pc.shapes(degree).len();
            assemble(group, module, degree, model, tuples, false, |ring, coords, exps| {
                Problem::Periodic(pc.local_problem(ring, coords, exps, degree))
            })
        }
    }
}

fn assemble<F>(
    group: &Arc<FiniteGroup>,
    module: &GModule,
    degree: usize,
    model: CochainModel,
    tuples: usize,
    want_cocycles: bool,
    make: F,
) -> Result<CohomologyGroup, CohomologyError>
where
    F: Fn(LocalRing, &[usize], &[u32]) -> Problem,
{
    let mut parts = Vec::new();
    let mut lifted: Vec<Vec<Vec<u64>>> = Vec::new();
    for (p, _) in factorize(module.exponent()) {
        let (coords, exps) = primary_coords(module, p);
        let a = *exps.iter().max().unwrap();
        let ring = LocalRing::new(p, a);
        let problem = make(ring, &coords, &exps);
        let solution = solver::solve(problem.as_dyn(), want_cocycles)?;
        let param_tuples = match &problem {
            Problem::Bar(b) => b.param_tuples(),
            _ => (0..tuples).collect(),
        };
        lifted.push(solution.reps.iter().map(|z| problem.lift(z)).collect());
        parts.push(PrimePart { p, coords, exps, param_tuples, solution });
    }
    let exps: Vec<(u64, &[u32])> = parts.iter().map(|pp| (pp.p, pp.solution.exps())).collect();
    let (orders, layout) = combine_layout(&exps);
    let value = FgAbelianGroup::from_big_orders(&orders);
    if value.generator_orders() != orders {
        return Err(CohomologyError::Internal("primary factors do not form a divisor chain".into()));
    }
    let representatives = layout
        .iter()
        .map(|comps| {
            let pieces: Vec<PrimaryPiece> = comps
                .iter()
                .map(|&(pi, t)| {
                    let pp = &parts[pi];
                    (pp.p, pp.coords.as_slice(), pp.exps.as_slice(), lifted[pi][t].as_slice())
                })
                .collect();
            embed_primary(module.moduli(), tuples, &pieces)
        })
        .collect();
    Ok(CohomologyGroup {
        value,
        degree,
        model,
        representatives,
        group: group.clone(),
        module: module.clone(),
        tuples,
        parts,
        layout,
    })
}

/// `H^n(G, M)` from the bar complex.
pub fn cohomology(group: &Arc<FiniteGroup>, module: &GModule, n: usize) -> Result<CohomologyGroup, CohomologyError> {
    build(group, module, n, CochainModel::Bar)
}

/// `H^n(G, M)` from periodic resolutions, for products of cyclic groups.
pub fn cohomology_periodic(module: &GModule, n: usize) -> Result<CohomologyGroup, CohomologyError> {
    build(module.group(), module, n, CochainModel::Periodic)
}

/// `H_n(G, M)`, computed as the dual of `H^n(G, M*)`.
pub fn homology(group: &Arc<FiniteGroup>, module: &GModule, n: usize) -> Result<FgAbelianGroup, CohomologyError> {
    Ok(homology_dual_group(group, module, n)?.value)
}

/// The group `H^n(G, M*)` whose dual is `H_n(G, M)`.
pub fn homology_dual_group(
    group: &Arc<FiniteGroup>,
    module: &GModule,
    n: usize,
) -> Result<CohomologyGroup, CohomologyError> {
    cohomology(group, &pontryagin_dual(module), n)
}

impl CohomologyGroup {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn module(&self) -> &GModule {
        &self.module
    }

    /// Length of a cochain vector in this model.
    pub fn cochain_len(&self) -> usize {
        self.tuples * self.module.dim()
    }

    /// Number of verification rounds used per primary part.
    pub fn solver_rounds(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.solution.rounds).collect()
    }

    /// Coboundary of a cochain of this degree.
    pub fn coboundary(&self, f: &[u64]) -> Result<Vec<u64>, CohomologyError> {
        match self.model {
            CochainModel::Bar => {
                let actions: Vec<_> = self.group.elements().map(|x| self.module.action(x)).collect();
                Ok(bar::bar_differential(&self.group, &actions, self.module.moduli(), self.degree, f))
            }
            CochainModel::Periodic => {
                Ok(PeriodicComplex::new(&self.group, &self.module)?.differential_apply(self.degree, f))
            }
        }
    }

    pub fn is_cocycle(&self, f: &[u64]) -> Result<bool, CohomologyError> {
        Ok(self.coboundary(f)?.iter().all(|&x| x == 0))
    }

    /// Coordinates of the class of a cocycle with respect to the generators of `value`.
    pub fn decode(&self, f: &[u64]) -> Result<Vec<u64>, CohomologyError> {
        let k = self.module.dim();
        if f.len() != self.cochain_len() {
            return Err(CohomologyError::Internal("cochain has the wrong length".into()));
        }
        let mut local = Vec::with_capacity(self.parts.len());
        for pp in &self.parts {
            let mut z = Vec::with_capacity(pp.param_tuples.len() * pp.coords.len());
            for &t in &pp.param_tuples {
                for (jj, &j) in pp.coords.iter().enumerate() {
                    z.push(f[t * k + j] % pp.p.pow(pp.exps[jj]));
                }
            }
            local.push(pp.solution.decode(&z)?);
        }
        let orders = self.value.generator_orders();
        Ok(self
            .layout
            .iter()
            .zip(&orders)
            .map(|(comps, d)| {
                let d = u128::try_from(d).expect("cohomology factor fits in u128");
                let mut x = 0u128;
                for &(pi, t) in comps {
                    let e = crt_idempotent(d as u64, self.parts[pi].p) as u128;
                    x = (x + local[pi][t] as u128 * e) % d;
                }
                x as u64
            })
            .collect())
    }

    /// Cochain representing `Σ c_i · rep_i`.
    pub fn combination(&self, coeffs: &[BigInt]) -> Vec<u64> {
        let moduli = self.module.moduli();
        let k = moduli.len();
        let mut f = vec![0u64; self.cochain_len()];
        for (c, rep) in coeffs.iter().zip(&self.representatives) {
            for (idx, x) in f.iter_mut().enumerate() {
                let m = moduli[idx % k];
                let cm = num_integer::Integer::mod_floor(c, &BigInt::from(m));
                let cm = u64::try_from(&cm).unwrap();
                *x = ((*x as u128 + cm as u128 * rep[idx] as u128) % m as u128) as u64;
            }
        }
        f
    }
}
