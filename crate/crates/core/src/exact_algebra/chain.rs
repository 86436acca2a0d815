use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::abelian::{Subquotient, SubquotientMap};
use super::snf::{integer_kernel, solve_integer};
use super::{AlgebraError, FgAbelianGroup, IntMatrix};

/// Presented abelian group `Z^generators / ⟨columns of relations⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: usize,
    pub relations: IntMatrix,
}

impl Presentation {
    pub fn free(n: usize) -> Self {
        Presentation { generators: n, relations: IntMatrix::zeros(n, 0) }
    }

    pub fn cyclic_sum(orders: &[u64]) -> Self {
        let n = orders.len();
        let mut r = IntMatrix::zeros(n, n);
        for (i, &o) in orders.iter().enumerate() {
            r.set(i, i, BigInt::from(o));
        }
        Presentation { generators: n, relations: r }
    }

    fn contains(&self, x: &[BigInt]) -> bool {
        if x.iter().all(|v| v == &BigInt::from(0)) {
            return true;
        }
        self.relations.cols() > 0 && solve_integer(&self.relations, x).is_some()
    }
}

/// Chain complex of presented abelian groups with `d_k : C_k → C_{k-1}`.
#[derive(Clone, Debug)]
pub struct ChainComplexSpec {
    low: i64,
    groups: Vec<Presentation>,
    differentials: BTreeMap<i64, IntMatrix>,
}

impl ChainComplexSpec {
    /// `groups[i]` sits in degree `low + i`; `differentials[k]` maps degree `k` to `k - 1`.
    pub fn new(low: i64, groups: Vec<Presentation>, differentials: BTreeMap<i64, IntMatrix>) -> Result<Self, AlgebraError> {
        for g in &groups {
            if g.relations.rows() != g.generators {
                return Err(AlgebraError::DimensionMismatch("relation matrix rows must match generators".into()));
            }
        }
        let c = ChainComplexSpec { low, groups, differentials };
        let high = c.high();
        for (&k, d) in &c.differentials {
            if k <= c.low || k > high {
                return Err(AlgebraError::DimensionMismatch(format!("differential in degree {k} outside the complex")));
            }
            let (src, dst) = (c.group(k).unwrap(), c.group(k - 1).unwrap());
            if d.rows() != dst.generators || d.cols() != src.generators {
                return Err(AlgebraError::DimensionMismatch(format!("differential in degree {k} has wrong shape")));
            }
            let img = d.mul(&src.relations);
            for j in 0..img.cols() {
                if !dst.contains(&img.column(j)) {
                    return Err(AlgebraError::NotWellDefined(format!("differential in degree {k} does not respect relations")));
                }
            }
        }
        for k in c.low + 2..=high {
            if let (Some(a), Some(b)) = (c.differentials.get(&(k - 1)), c.differentials.get(&k)) {
                let dd = a.mul(b);
                let dst = c.group(k - 2).unwrap();
                for j in 0..dd.cols() {
                    if !dst.contains(&dd.column(j)) {
                        return Err(AlgebraError::MalformedComplex { degree: k });
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn high(&self) -> i64 {
        self.low + self.groups.len() as i64 - 1
    }

    pub fn group(&self, k: i64) -> Option<&Presentation> {
        if k < self.low {
            return None;
        }
        self.groups.get((k - self.low) as usize)
    }

    pub fn differential(&self, k: i64) -> Option<&IntMatrix> {
        self.differentials.get(&k)
    }
}

/// Homology group in one degree, with cycle representatives.
#[derive(Clone, Debug)]
pub struct HomologyGroup {
    pub degree: i64,
    pub subquotient: Subquotient,
}

impl HomologyGroup {
    pub fn group(&self) -> &FgAbelianGroup {
        &self.subquotient.group
    }

    /// Cycle representatives as columns in the generators of `C_k`.
    pub fn representatives(&self) -> &IntMatrix {
        &self.subquotient.representatives
    }
}

pub fn homology_at(c: &ChainComplexSpec, k: i64) -> Result<HomologyGroup, AlgebraError> {
    let ck = c.group(k).ok_or(AlgebraError::DegreeOutOfRange(k))?;
    let n = ck.generators;
    let cycles = match (c.differential(k), c.group(k - 1)) {
        (Some(d), Some(prev)) => {
            let ker = integer_kernel(&d.hcat(&prev.relations));
            ker.select_rows(&(0..n).collect::<Vec<_>>())
        }
        _ => IntMatrix::identity(n),
    };
    let boundaries = match c.differential(k + 1) {
        Some(d) => d.clone(),
        None => IntMatrix::zeros(n, 0),
    };
    Ok(HomologyGroup { degree: k, subquotient: Subquotient::new(&ck.relations, &cycles, &boundaries) })
}

/// Map on `H_k` induced by a chain map given degreewise.
pub fn induced_map_on_homology(
    source: &ChainComplexSpec,
    target: &ChainComplexSpec,
    chain_map: &BTreeMap<i64, IntMatrix>,
    k: i64,
) -> Result<SubquotientMap, AlgebraError> {
    for (&j, f) in chain_map {
        let (Some(s), Some(t)) = (source.group(j), target.group(j)) else {
            return Err(AlgebraError::DegreeOutOfRange(j));
        };
        if f.rows() != t.generators || f.cols() != s.generators {
            return Err(AlgebraError::DimensionMismatch(format!("chain map in degree {j} has wrong shape")));
        }
        let rel = f.mul(&s.relations);
        for col in 0..rel.cols() {
            if !t.contains(&rel.column(col)) {
                return Err(AlgebraError::NotWellDefined(format!("chain map in degree {j} does not respect relations")));
            }
        }
    }
    for (&j, f) in chain_map {
        let (Some(ds), Some(dt), Some(g)) = (source.differential(j), target.differential(j), chain_map.get(&(j - 1))) else {
            continue;
        };
        let lhs = dt.mul(f);
        let rhs = g.mul(ds);
        let t = target.group(j - 1).unwrap();
        for col in 0..lhs.cols() {
            let diff: Vec<BigInt> = lhs.column(col).iter().zip(rhs.column(col)).map(|(a, b)| a - b).collect();
            if !t.contains(&diff) {
                return Err(AlgebraError::NonCommutingSquare { degree: j });
            }
        }
    }
    let f = chain_map.get(&k).ok_or(AlgebraError::DegreeOutOfRange(k))?;
    let hs = homology_at(source, k)?;
    let ht = homology_at(target, k)?;
    let reps = hs.representatives();
    let mut cols = Vec::new();
    for j in 0..reps.cols() {
        let img = f.mul_vec(&reps.column(j));
        cols.push(ht.subquotient.coordinates(&img).ok_or(AlgebraError::NotWellDefined("image of a cycle is not a cycle".into()))?);
    }
    let m = IntMatrix::from_fn(ht.group().num_generators(), cols.len(), |i, j| cols[j][i].clone());
    SubquotientMap::new(hs.group().clone(), ht.group().clone(), m)
}
