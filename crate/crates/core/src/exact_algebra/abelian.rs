use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::snf::{integer_kernel, smith_normal_form, solve_integer};
use super::{AlgebraError, IntMatrix};

/// Finitely generated abelian group `Z^r ⊕ Z/d_1 ⊕ … ⊕ Z/d_k` with `d_i | d_{i+1}`, `d_i > 1`.
///
/// Generators are ordered torsion first (ascending), then the free part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigUint>,
}

impl FgAbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigUint>) -> Result<Self, AlgebraError> {
        for (i, d) in torsion.iter().enumerate() {
            if *d <= BigUint::one() {
                return Err(AlgebraError::InvalidInvariantFactors(format!("factor {d} must exceed 1")));
            }
            if i > 0 && !d.is_multiple_of(&torsion[i - 1]) {
                return Err(AlgebraError::InvalidInvariantFactors(format!(
                    "{} does not divide {d}",
                    torsion[i - 1]
                )));
            }
        }
        Ok(FgAbelianGroup { free_rank, torsion })
    }

    pub fn trivial() -> Self {
        FgAbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn cyclic(n: u64) -> Self {
        if n == 0 {
            Self::free(1)
        } else {
            Self::from_orders(&[n])
        }
    }

    /// Normalizes an arbitrary list of cyclic orders (0 meaning `Z`).
    pub fn from_orders(orders: &[u64]) -> Self {
        let big: Vec<BigUint> = orders.iter().map(|&o| BigUint::from(o)).collect();
        Self::from_big_orders(&big)
    }

    pub fn from_big_orders(orders: &[BigUint]) -> Self {
        let free_rank = orders.iter().filter(|o| o.is_zero()).count();
        let finite: Vec<BigInt> =
            orders.iter().filter(|o| !o.is_zero() && !o.is_one()).map(|o| BigInt::from(o.clone())).collect();
        if finite.is_empty() {
            return Self::free(free_rank);
        }
        let s = smith_normal_form(&IntMatrix::diagonal(&finite));
        let torsion = s
            .diagonal
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.magnitude().clone())
            .collect();
        FgAbelianGroup { free_rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_cyclic(&self) -> bool {
        self.torsion.len() + self.free_rank <= 1
    }

    /// Order of a finite group; `None` when a free summand is present.
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().fold(BigUint::one(), |a, b| a * b))
        }
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|o| o.to_u64())
    }

    pub fn exponent(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.last().cloned().unwrap_or_else(BigUint::one))
        }
    }

    pub fn num_generators(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Order of each generator, `0` for free generators.
    pub fn generator_orders(&self) -> Vec<BigUint> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat_n(BigUint::zero(), self.free_rank));
        v
    }

    /// Relation matrix of the canonical presentation (square diagonal).
    pub fn relation_matrix(&self) -> IntMatrix {
        let d: Vec<BigInt> = self.generator_orders().into_iter().map(BigInt::from).collect();
        IntMatrix::diagonal(&d)
    }

    pub fn direct_sum(&self, other: &FgAbelianGroup) -> FgAbelianGroup {
        let mut o = self.generator_orders();
        o.extend(other.generator_orders());
        Self::from_big_orders(&o)
    }

    /// Reduces a coordinate vector to canonical residues.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        let orders = self.generator_orders();
        x.iter()
            .zip(&orders)
            .map(|(v, o)| if o.is_zero() { v.clone() } else { v.mod_floor(&BigInt::from(o.clone())) })
            .collect()
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(|v| v.is_zero())
    }

    /// Subgroup generated by the given columns (coordinates in this group's generators).
    pub fn subgroup(&self, gens: &IntMatrix) -> Subquotient {
        Subquotient::new(&self.relation_matrix(), gens, &IntMatrix::zeros(self.num_generators(), 0))
    }

    /// Enumerates all elements of a finite group as coordinate vectors.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        assert!(self.is_finite(), "cannot enumerate an infinite group");
        let orders: Vec<u64> = self.torsion.iter().map(|o| o.to_u64().expect("order too large")).collect();
        let mut out = vec![vec![]];
        for &o in &orders {
            let mut next = Vec::with_capacity(out.len() * o as usize);
            for prefix in &out {
                for v in 0..o {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Subquotient `(Z + R) / (B + R)` of `Z^n / R` with an adapted generating set.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub group: FgAbelianGroup,
    /// Representatives of the group generators, as columns in the ambient `Z^n`.
    pub representatives: IntMatrix,
    zgens: IntMatrix,
    solve_matrix: IntMatrix,
    to_coords: IntMatrix,
    kept: Vec<usize>,
}

impl Subquotient {
    pub fn new(relations: &IntMatrix, zgens: &IntMatrix, bgens: &IntMatrix) -> Self {
        let n = relations.rows();
        assert_eq!(zgens.rows(), n);
        assert_eq!(bgens.rows(), n);
        let p = zgens.cols();
        let all = zgens.hcat(bgens).hcat(relations);
        let ker = integer_kernel(&all);
        let rel = ker.select_rows(&(0..p).collect::<Vec<_>>());
        let s = smith_normal_form(&rel);
        let mut orders = Vec::new();
        let mut kept = Vec::new();
        for i in 0..p {
            let d = if i < s.diagonal.len() { s.diagonal[i].clone() } else { BigInt::zero() };
            if !d.is_one() {
                kept.push(i);
                orders.push(d.magnitude().clone());
            }
        }
        let group = FgAbelianGroup::from_big_orders(&orders);
        debug_assert_eq!(group.generator_orders(), orders);
        let representatives = zgens.mul(&s.u_inv.select_columns(&kept));
        let to_coords = s.u.select_rows(&kept);
        let solve_matrix = zgens.hcat(bgens).hcat(relations);
        Subquotient { group, representatives, zgens: zgens.clone(), solve_matrix, to_coords, kept }
    }

    /// Coordinates of an ambient element lying in `Z + R`, or `None` if it does not.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let sol = solve_integer(&self.solve_matrix, x)?;
        let y = &sol[..self.zgens.cols()];
        let c = self.to_coords.mul_vec(y);
        Some(self.group.reduce(&c))
    }

    pub fn num_generators(&self) -> usize {
        self.kept.len()
    }
}

/// Homomorphism between finitely generated abelian groups in their canonical generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubquotientMap {
    pub source: FgAbelianGroup,
    pub target: FgAbelianGroup,
    /// `target.num_generators() × source.num_generators()`.
    pub matrix: IntMatrix,
}

impl SubquotientMap {
    pub fn new(source: FgAbelianGroup, target: FgAbelianGroup, matrix: IntMatrix) -> Result<Self, AlgebraError> {
        if matrix.rows() != target.num_generators() || matrix.cols() != source.num_generators() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.num_generators(),
                source.num_generators()
            )));
        }
        let so = source.generator_orders();
        for (j, o) in so.iter().enumerate() {
            let col: Vec<BigInt> = matrix.column(j).iter().map(|v| v * BigInt::from(o.clone())).collect();
            if !target.is_zero_element(&col) {
                return Err(AlgebraError::NotWellDefined(format!("generator {j} of order {o} maps to an element of larger order")));
            }
        }
        let mut m = matrix;
        for j in 0..m.cols() {
            let col = target.reduce(&m.column(j));
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(SubquotientMap { source, target, matrix: m })
    }

    pub fn identity(g: &FgAbelianGroup) -> Self {
        SubquotientMap { source: g.clone(), target: g.clone(), matrix: IntMatrix::identity(g.num_generators()) }
    }

    pub fn zero(source: &FgAbelianGroup, target: &FgAbelianGroup) -> Self {
        SubquotientMap {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.num_generators(), source.num_generators()),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SubquotientMap) -> Result<SubquotientMap, AlgebraError> {
        if first.target != self.source {
            return Err(AlgebraError::DimensionMismatch("composition of incompatible maps".into()));
        }
        SubquotientMap::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.target.reduce(&self.matrix.mul_vec(x))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.matrix == IntMatrix::identity(self.source.num_generators())
    }

    /// Image as a subquotient of the target.
    pub fn image(&self) -> Subquotient {
        self.target.subgroup(&self.matrix)
    }

    /// Kernel as a subquotient of the source.
    pub fn kernel(&self) -> Subquotient {
        let m = self.matrix.hcat(&self.target.relation_matrix());
        let ker = integer_kernel(&m);
        let k = ker.select_rows(&(0..self.source.num_generators()).collect::<Vec<_>>());
        self.source.subgroup(&k)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().group.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        let img = self.image();
        if self.target.is_finite() {
            return img.group.order() == self.target.order();
        }
        (0..self.target.num_generators()).all(|i| {
            let mut e = vec![BigInt::zero(); self.target.num_generators()];
            e[i] = BigInt::one();
            img.coordinates(&e).is_some()
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Pontryagin dual of a map between finite groups, in the dual character bases.
    pub fn dual(&self) -> Result<SubquotientMap, AlgebraError> {
        if !self.source.is_finite() || !self.target.is_finite() {
            return Err(AlgebraError::InfiniteGroup("dual of a map with free summands".into()));
        }
        let a = &self.source.torsion;
        let b = &self.target.torsion;
        let m = IntMatrix::from_fn(a.len(), b.len(), |i, j| {
            let num = self.matrix.get(j, i) * BigInt::from(a[i].clone());
            let den = BigInt::from(b[j].clone());
            debug_assert!(num.is_multiple_of(&den));
            (num / den).mod_floor(&BigInt::from(a[i].clone()))
        });
        SubquotientMap::new(self.target.clone(), self.source.clone(), m)
    }
}

fn gcd_big(a: &BigUint, b: &BigUint) -> BigUint {
    a.gcd(b)
}

/// `Hom(A, B)` and `Ext¹(A, B)` computed summand-wise from invariant factors.
pub fn hom_and_ext(a: &FgAbelianGroup, b: &FgAbelianGroup) -> (FgAbelianGroup, FgAbelianGroup) {
    let mut hom = Vec::new();
    let mut ext = Vec::new();
    for x in a.generator_orders() {
        for y in b.generator_orders() {
            match (x.is_zero(), y.is_zero()) {
                (true, _) => hom.push(y.clone()),
                (false, true) => ext.push(x.clone()),
                (false, false) => {
                    let g = gcd_big(&x, &y);
                    hom.push(g.clone());
                    ext.push(g);
                }
            }
        }
    }
    (FgAbelianGroup::from_big_orders(&hom), FgAbelianGroup::from_big_orders(&ext))
}

/// `A ⊗ B` and `Tor₁(A, B)`.
pub fn tensor_and_tor(a: &FgAbelianGroup, b: &FgAbelianGroup) -> (FgAbelianGroup, FgAbelianGroup) {
    let mut ten = Vec::new();
    let mut tor = Vec::new();
    for x in a.generator_orders() {
        for y in b.generator_orders() {
            match (x.is_zero(), y.is_zero()) {
                (true, true) => ten.push(BigUint::zero()),
                (true, false) => ten.push(y.clone()),
                (false, true) => ten.push(x.clone()),
                (false, false) => {
                    let g = gcd_big(&x, &y);
                    ten.push(g.clone());
                    tor.push(g);
                }
            }
        }
    }
    (FgAbelianGroup::from_big_orders(&ten), FgAbelianGroup::from_big_orders(&tor))
}

/// Cokernel of `a : Z^cols → Z^rows` with the projection from `Z^rows`.
pub fn cokernel_structure(a: &IntMatrix) -> (FgAbelianGroup, SubquotientMap) {
    let n = a.rows();
    let sq = Subquotient::new(a, &IntMatrix::identity(n), &IntMatrix::zeros(n, 0));
    let mut cols = Vec::new();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        cols.push(sq.coordinates(&e).expect("every vector lies in the ambient"));
    }
    let k = sq.group.num_generators();
    let m = IntMatrix::from_fn(k, n, |i, j| cols[j][i].clone());
    let proj = SubquotientMap::new(FgAbelianGroup::free(n), sq.group.clone(), m).expect("projection is well defined");
    (sq.group, proj)
}

pub(crate) fn big_to_u64(x: &BigInt) -> u64 {
    match x.sign() {
        Sign::Minus => panic!("negative value where a residue was expected"),
        _ => x.to_u64().expect("value exceeds u64"),
    }
}
