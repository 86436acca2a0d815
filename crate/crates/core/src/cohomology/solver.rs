//! `p`-local cocycle/coboundary solver shared by the cochain models.

use crate::exact_algebra::local::{local_snf, LocalCokernel, LocalKernel, LocalMatrix, LocalRing};
use crate::par;

use super::CohomologyError;

/// Sparse vector over parameter coordinates.
pub(crate) type Sparse = Vec<(u32, u64)>;

/// A cochain problem over `Z/p^a` presented through a parameter space.
///
/// Cocycles are determined by their parameter values; constraint rows are scaled so that every
/// equation holds modulo `p^a`.
pub(crate) trait LocalProblem: Sync {
    fn ring(&self) -> LocalRing;
    fn num_params(&self) -> usize;
    /// Exponent `a_j` of the summand `Z/p^{a_j}` carried by each parameter.
    fn param_exps(&self) -> Vec<u32>;
    fn initial_rows(&self) -> Vec<Vec<u64>>;
    /// Constraint rows violated by the cochain lifted from `z`, at most `limit`.
    fn violations(&self, z: &[u64], limit: usize) -> Vec<Vec<u64>>;
    /// Coboundaries restricted to the parameters.
    fn coboundaries(&self) -> Vec<Sparse>;
}

/// `H^n` of one primary part, in parameter coordinates.
#[derive(Clone, Debug)]
pub(crate) struct LocalSolution {
    pub ring: LocalRing,
    active_vinv: Vec<Vec<u64>>,
    active_c: Vec<u32>,
    cokernel: LocalCokernel,
    /// One parameter vector per cyclic factor.
    pub reps: Vec<Vec<u64>>,
    pub rounds: usize,
    /// Structure of the cocycle group itself: exponents and parameter representatives.
    pub cocycles: Option<(Vec<u32>, Vec<Vec<u64>>)>,
}

const VIOLATIONS_PER_GENERATOR: usize = 3;

pub(crate) fn solve(problem: &dyn LocalProblem, want_cocycles: bool) -> Result<LocalSolution, CohomologyError> {
    let ring = problem.ring();
    let np = problem.num_params();
    let mut rows = problem.initial_rows();
    let mut rounds = 0;
    let kernel = loop {
        rounds += 1;
        let mut m = LocalMatrix::zeros(0, np);
        for r in &rows {
            m.push_row(r);
        }
        let kernel = LocalKernel::from_snf(local_snf(ring, m, false, true));
        let gens = kernel.generators();
        let bad: Vec<Vec<Vec<u64>>> = par::map(&gens, |z| problem.violations(z, VIOLATIONS_PER_GENERATOR));
        if bad.iter().all(|b| b.is_empty()) {
            break kernel;
        }
        let mut next: Vec<Vec<u64>> = (0..np)
            .filter(|&t| kernel.c[t] > 0)
            .map(|t| {
                let s = ring.pow_p(ring.a - kernel.c[t]);
                kernel.vinv.row(t).iter().map(|&x| ring.mul(x, s)).collect()
            })
            .collect();
        let mut fresh: Vec<Vec<u64>> = bad.into_iter().flatten().collect();
        fresh.sort();
        fresh.dedup();
        next.extend(fresh);
        rows = next;
    };

    let active = kernel.active();
    let active_vinv: Vec<Vec<u64>> = active.iter().map(|&i| kernel.vinv.row(i).to_vec()).collect();
    let active_c: Vec<u32> = active.iter().map(|&i| kernel.c[i]).collect();
    let exps = problem.param_exps();

    let to_w = |y: Vec<u64>| -> Result<Vec<u64>, CohomologyError> {
        y.into_iter()
            .zip(&active_c)
            .map(|(yi, &c)| {
                if ring.val(yi) < c {
                    Err(CohomologyError::Internal("coboundary outside the cocycle module".into()))
                } else {
                    Ok(ring.div_pow(yi, c))
                }
            })
            .collect()
    };

    let mut relations: Vec<Vec<u64>> = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        if e < ring.a {
            let s = ring.pow_p(e);
            let y: Vec<u64> = active_vinv.iter().map(|row| ring.mul(row[i], s)).collect();
            relations.push(to_w(y)?);
        }
    }
    let row_exps: Vec<u32> = active_c.iter().map(|&c| ring.a - c).collect();
    let lift = |wt: &[u64]| -> Vec<u64> {
        let mut x = vec![0u64; np];
        for (k, &i) in active.iter().enumerate() {
            let yi = ring.mul(wt[k], ring.pow_p(active_c[k]));
            if yi != 0 {
                crate::exact_algebra::local::axpy(&ring, &mut x, kernel.vt.row(i), yi);
            }
        }
        x
    };
    let to_matrix = |cols: &[Vec<u64>]| -> LocalMatrix {
        let mut w = LocalMatrix::zeros(active.len(), cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                w.set(i, j, v);
            }
        }
        w
    };
    let cocycles = want_cocycles.then(|| {
        let ck = LocalCokernel::compute(ring, &to_matrix(&relations), &row_exps);
        let reps = (0..ck.num_factors()).map(|t| lift(ck.representative(t))).collect();
        (ck.exps.clone(), reps)
    });

    let cobs = problem.coboundaries();
    let mut columns: Vec<Vec<u64>> = par::map(&cobs, |b| {
        active_vinv
            .iter()
            .map(|row| b.iter().fold(0u64, |acc, &(i, v)| ring.add(acc, ring.mul(row[i as usize], v))))
            .collect::<Vec<u64>>()
    })
    .into_iter()
    .map(to_w)
    .collect::<Result<_, _>>()?;
    columns.extend(relations);
    let cokernel = LocalCokernel::compute(ring, &to_matrix(&columns), &row_exps);
    let reps = (0..cokernel.num_factors()).map(|t| lift(cokernel.representative(t))).collect();
    Ok(LocalSolution { ring, active_vinv, active_c, cokernel, reps, rounds, cocycles })
}

impl LocalSolution {
    /// Exponents of the cyclic factors `Z/p^e`, ascending.
    pub fn exps(&self) -> &[u32] {
        &self.cokernel.exps
    }

    /// Class coordinates of a cocycle given by its parameter values.
    pub fn decode(&self, z: &[u64]) -> Result<Vec<u64>, CohomologyError> {
        let ring = self.ring;
        let mut w = Vec::with_capacity(self.active_c.len());
        for (row, &c) in self.active_vinv.iter().zip(&self.active_c) {
            let y = crate::exact_algebra::local::dot(&ring, row, z);
            if ring.val(y) < c {
                return Err(CohomologyError::Internal("decoded vector is not a cocycle".into()));
            }
            w.push(ring.div_pow(y, c));
        }
        Ok(self.cokernel.coordinates(&w))
    }
}
