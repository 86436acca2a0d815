//! Finite groups, homomorphisms, quotients and coset transversals.
//!
//! Elements are indices `0..order` with `0` the identity. A group is stored either
//! as a full multiplication table or, for products of cyclic groups, implicitly by
//! its cyclic moduli (element index = mixed-radix exponent vector).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::exact_algebra::FgAbelianGroup;
use crate::limits::caps;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order {order} exceeds the cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("table is not a group: {0}")]
    InvalidTable(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("subgroup is not normal: conjugating {element} by generator {generator} leaves it")]
    NotNormal { generator: usize, element: usize },
    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("generators do not generate the group")]
    NotGenerating,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Debug)]
enum Repr {
    Table { mul: Vec<u32>, inv: Vec<u32> },
    Abelian { moduli: Vec<u64>, strides: Vec<u64> },
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    repr: Repr,
    generators: Vec<usize>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        if self.order != other.order || self.generators != other.generators {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Abelian { moduli: a, .. }, Repr::Abelian { moduli: b, .. }) => a == b,
            (Repr::Table { mul: a, .. }, Repr::Table { mul: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Product of cyclic groups `Z/n_1 × … × Z/n_r` with standard generators.
    pub fn abelian(moduli: &[u64]) -> Result<Self, GroupError> {
        if moduli.contains(&0) {
            return Err(GroupError::InvalidParameter("cyclic factors must have positive order".into()));
        }
        let mut order: u64 = 1;
        for &m in moduli {
            order = order.checked_mul(m).ok_or(GroupError::InvalidParameter("order overflow".into()))?;
        }
        let mut strides = vec![1u64; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1];
        }
        let generators = (0..moduli.len()).map(|i| if moduli[i] == 1 { 0 } else { strides[i] as usize }).collect();
        let name = if moduli.is_empty() {
            "1".to_string()
        } else {
            moduli.iter().map(|m| format!("Z/{m}")).collect::<Vec<_>>().join("×")
        };
        Ok(FiniteGroup { name, order: order as usize, repr: Repr::Abelian { moduli: moduli.to_vec(), strides }, generators })
    }

    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        let mut g = Self::abelian(&[n])?;
        g.name = format!("C{n}");
        Ok(g)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1).expect("trivial group")
    }

    /// Group from a full multiplication table; index 0 must be the identity.
    pub fn from_table(name: &str, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        let cap = caps().order;
        if n > cap {
            return Err(GroupError::OrderCapExceeded { order: n, cap });
        }
        let mut mul = vec![0u32; n * n];
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!("row {a} has length {}", row.len())));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(GroupError::InvalidTable(format!("entry {c} out of range")));
                }
                mul[a * n + b] = c as u32;
            }
        }
        Self::from_mul(name, n, mul, generators)
    }

    fn from_mul(name: &str, n: usize, mul: Vec<u32>, generators: Vec<usize>) -> Result<Self, GroupError> {
        for x in 0..n {
            if mul[x] as usize != x || mul[x * n] as usize != x {
                return Err(GroupError::InvalidTable("element 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for b in 0..n {
                let r = mul[a * n + b] as usize;
                let c = mul[b * n + a] as usize;
                if seen_row[r] || seen_col[c] {
                    return Err(GroupError::InvalidTable("table is not a Latin square".into()));
                }
                seen_row[r] = true;
                seen_col[c] = true;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a * n + b] as usize;
                for c in 0..n {
                    if mul[ab * n + c] != mul[a * n + mul[b * n + c] as usize] {
                        return Err(GroupError::InvalidTable(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                }
            }
        }
        if generators.iter().any(|&g| g >= n) {
            return Err(GroupError::InvalidTable("generator out of range".into()));
        }
        let g = FiniteGroup { name: name.to_string(), order: n, repr: Repr::Table { mul, inv }, generators };
        if g.closure(&g.generators).len() != n {
            return Err(GroupError::NotGenerating);
        }
        Ok(g)
    }

    /// Table group from a multiplication closure; `elements[0]` must be the identity.
    fn from_closure<T: Clone + Eq + std::hash::Hash>(
        name: &str,
        elements: Vec<T>,
        op: impl Fn(&T, &T) -> T,
        generators: Vec<usize>,
    ) -> Result<Self, GroupError> {
        let n = elements.len();
        let cap = caps().order;
        if n > cap {
            return Err(GroupError::OrderCapExceeded { order: n, cap });
        }
        let index: HashMap<T, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let c = op(&elements[a], &elements[b]);
                mul[a * n + b] = *index.get(&c).ok_or(GroupError::InvalidTable("not closed".into()))? as u32;
            }
        }
        Self::from_mul(name, n, mul, generators)
    }

    /// Symmetric group on `n ≤ 5` letters; permutations in lexicographic order.
    pub fn symmetric(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidParameter("symmetric group needs n ≥ 1".into()));
        }
        let order: usize = (1..=n).product();
        let cap = caps().order;
        if order > cap {
            return Err(GroupError::OrderCapExceeded { order, cap });
        }
        let perms = permutations(n);
        let gens = Self::perm_generators(n, &perms);
        Self::from_closure(&format!("S{n}"), perms, |a, b| compose_perm(a, b), gens)
    }

    fn perm_generators(n: usize, perms: &[Vec<usize>]) -> Vec<usize> {
        if n < 2 {
            return vec![];
        }
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut g = vec![perms.iter().position(|p| *p == swap).unwrap()];
        if n > 2 {
            g.push(perms.iter().position(|p| *p == cycle).unwrap());
        }
        g
    }

    /// Alternating group on `n ≤ 6` letters.
    pub fn alternating(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidParameter("alternating group needs n ≥ 1".into()));
        }
        let perms: Vec<Vec<usize>> = permutations(n).into_iter().filter(|p| is_even(p)).collect();
        let cap = caps().order;
        if perms.len() > cap {
            return Err(GroupError::OrderCapExceeded { order: perms.len(), cap });
        }
        let mut gens = Vec::new();
        for k in 0..n.saturating_sub(2) {
            let c: Vec<usize> = (0..n).map(|i| if i == k { k + 1 } else if i == k + 1 { k + 2 } else if i == k + 2 { k } else { i }).collect();
            gens.push(perms.iter().position(|p| *p == c).unwrap());
        }
        Self::from_closure(&format!("A{n}"), perms, |a, b| compose_perm(a, b), gens)
    }

    /// Dihedral group of order `2n`, elements `r^i s^j` at index `i + n j`.
    pub fn dihedral(n: u64) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::InvalidParameter("dihedral group needs n ≥ 1".into()));
        }
        let elems: Vec<(u64, u64)> = (0..2).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
        let op = move |a: &(u64, u64), b: &(u64, u64)| {
            let i = if a.1 == 0 { (a.0 + b.0) % n } else { (a.0 + n - b.0) % n };
            (i, (a.1 + b.1) % 2)
        };
        let mut gens = vec![n as usize];
        if n > 1 {
            gens.insert(0, 1);
        }
        Self::from_closure(&format!("D{n}"), elems, op, gens)
    }

    /// Quaternion group of order 8, elements `a^i b^j` at index `i + 4 j`.
    pub fn quaternion() -> Result<Self, GroupError> {
        let elems: Vec<(u64, u64)> = (0..2).flat_map(|j| (0..4).map(move |i| (i, j))).collect();
        let op = |x: &(u64, u64), y: &(u64, u64)| {
            if x.1 == 0 {
                ((x.0 + y.0) % 4, y.1)
            } else if y.1 == 0 {
                ((x.0 + 4 - y.0) % 4, 1)
            } else {
                ((x.0 + 4 - y.0 + 2) % 4, 0)
            }
        };
        Self::from_closure("Q8", elems, op, vec![1, 4])
    }

    /// Direct product; element `(x, y)` has index `x·|h| + y`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self, GroupError> {
        if let (Repr::Abelian { moduli: a, .. }, Repr::Abelian { moduli: b, .. }) = (&g.repr, &h.repr) {
            let mut m = a.clone();
            m.extend(b);
            let mut p = Self::abelian(&m)?;
            p.name = format!("{}×{}", g.name, h.name);
            return Ok(p);
        }
        let n = g.order * h.order;
        let cap = caps().order;
        if n > cap {
            return Err(GroupError::OrderCapExceeded { order: n, cap });
        }
        let ho = h.order;
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let x = g.mul(a / ho, b / ho);
                let y = h.mul(a % ho, b % ho);
                mul[a * n + b] = (x * ho + y) as u32;
            }
        }
        let mut gens: Vec<usize> = g.generators.iter().map(|&x| x * ho).collect();
        gens.extend(h.generators.iter().copied());
        Self::from_mul(&format!("{}×{}", g.name, h.name), n, mul, gens)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Cyclic moduli when the group is stored as a product of cyclic groups.
    pub fn cyclic_moduli(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Abelian { moduli, .. } => Some(moduli),
            Repr::Table { .. } => None,
        }
    }

    pub fn has_table(&self) -> bool {
        matches!(self.repr, Repr::Table { .. })
    }

    /// Exponent vector of an element of a cyclic-product group.
    pub fn exponents(&self, x: usize) -> Vec<u64> {
        match &self.repr {
            Repr::Abelian { moduli, strides } => {
                moduli.iter().zip(strides).map(|(&m, &s)| (x as u64 / s) % m).collect()
            }
            Repr::Table { .. } => panic!("exponents requested for a table group"),
        }
    }

    pub fn from_exponents(&self, e: &[u64]) -> usize {
        match &self.repr {
            Repr::Abelian { moduli, strides } => {
                e.iter().zip(moduli).zip(strides).map(|((&x, &m), &s)| (x % m) * s).sum::<u64>() as usize
            }
            Repr::Table { .. } => panic!("exponents requested for a table group"),
        }
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.repr {
            Repr::Table { mul, .. } => mul[a * self.order + b] as usize,
            Repr::Abelian { moduli, strides } => {
                let mut out = 0u64;
                for (&m, &s) in moduli.iter().zip(strides) {
                    let x = (a as u64 / s) % m;
                    let y = (b as u64 / s) % m;
                    out += ((x + y) % m) * s;
                }
                out as usize
            }
        }
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        match &self.repr {
            Repr::Table { inv, .. } => inv[a] as usize,
            Repr::Abelian { moduli, strides } => {
                let mut out = 0u64;
                for (&m, &s) in moduli.iter().zip(strides) {
                    let x = (a as u64 / s) % m;
                    out += ((m - x) % m) * s;
                }
                out as usize
            }
        }
    }

    pub fn pow(&self, a: usize, mut k: u64) -> usize {
        let mut base = a;
        let mut acc = 0;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// `g x g⁻¹`
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        match self.repr {
            Repr::Abelian { .. } => true,
            Repr::Table { .. } => {
                self.generators.iter().all(|&a| self.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
            }
        }
    }

    /// Subgroup generated by a set of elements, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        seen.insert(0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn is_subgroup(&self, members: &[usize]) -> bool {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        set.contains(&0) && set.iter().all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, self.inv(b)))))
    }

    pub fn is_normal(&self, members: &[usize]) -> bool {
        self.normality_witness(members).is_none()
    }

    /// A generator `g` and member `n` with `g n g⁻¹` outside `members`, if any.
    pub fn normality_witness(&self, members: &[usize]) -> Option<(usize, usize)> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        self.generators
            .iter()
            .find_map(|&g| set.iter().find(|&&n| !set.contains(&self.conjugate(g, n))).map(|&n| (g, n)))
    }

    /// All subgroups, each as a sorted member list, ordered by size then lexicographically.
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let mut subs: BTreeSet<Vec<usize>> = BTreeSet::new();
        let cyclic: BTreeSet<Vec<usize>> = self.elements().map(|x| self.closure(&[x])).collect();
        let mut frontier: Vec<Vec<usize>> = cyclic.iter().cloned().collect();
        subs.extend(cyclic.iter().cloned());
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for c in &cyclic {
                    if c.iter().all(|x| s.binary_search(x).is_ok()) {
                        continue;
                    }
                    let mut gens = s.clone();
                    gens.extend(c);
                    let j = self.closure(&gens);
                    if subs.insert(j.clone()) {
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        let mut v: Vec<Vec<usize>> = subs.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        v
    }

    pub fn normal_subgroups(&self) -> Vec<Vec<usize>> {
        self.all_subgroups().into_iter().filter(|s| self.is_normal(s)).collect()
    }

    /// Invariant factors of the abelianization.
    pub fn abelian_invariants(&self) -> FgAbelianGroup {
        if let Some(m) = self.cyclic_moduli() {
            return FgAbelianGroup::from_orders(m);
        }
        let mut comms = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                comms.push(c);
            }
        }
        comms.sort_unstable();
        comms.dedup();
        let derived = self.closure(&comms);
        let (q, _) = quotient_by(self, &derived).expect("derived subgroup is normal");
        abelian_structure(&q)
    }

    /// Sorted multiset of element orders, an isomorphism invariant.
    pub fn order_statistics(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements().map(|x| self.element_order(x)).collect();
        v.sort_unstable();
        v
    }
}

/// Invariant factors of an abelian group from counts of `p^k`-torsion elements.
fn abelian_structure(g: &FiniteGroup) -> FgAbelianGroup {
    if let Some(m) = g.cyclic_moduli() {
        return FgAbelianGroup::from_orders(m);
    }
    let orders: Vec<usize> = g.elements().map(|x| g.element_order(x)).collect();
    let mut factors = Vec::new();
    for (p, _) in crate::exact_algebra::local::factorize(g.order() as u64) {
        let p = p as usize;
        let mut prev = 1usize;
        let mut k = 1u32;
        let mut counts = Vec::new();
        loop {
            let pk = p.pow(k);
            let c = orders.iter().filter(|&&o| pk.is_multiple_of(o)).count();
            if c == prev {
                break;
            }
            counts.push((c as f64 / prev as f64).log(p as f64).round() as usize);
            prev = c;
            k += 1;
        }
        // counts[k-1] = number of cyclic p-factors of exponent ≥ k
        for (i, &n_ge) in counts.iter().enumerate() {
            let n_next = counts.get(i + 1).copied().unwrap_or(0);
            for _ in 0..n_ge - n_next {
                factors.push((p as u64).pow(i as u32 + 1));
            }
        }
    }
    FgAbelianGroup::from_orders(&factors)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

fn is_even(p: &[usize]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

const HOM_TABLE_LIMIT: usize = 1 << 16;

/// Group homomorphism determined by generator images.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    pub source: Arc<FiniteGroup>,
    pub target: Arc<FiniteGroup>,
    gen_images: Vec<usize>,
    table: Option<Vec<usize>>,
}

impl Homomorphism {
    pub fn from_generator_images(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        gen_images: Vec<usize>,
    ) -> Result<Self, GroupError> {
        if gen_images.len() != source.generators.len() {
            return Err(GroupError::NotHomomorphism("one image per generator required".into()));
        }
        if let Some(&x) = gen_images.iter().find(|&&x| x >= target.order) {
            return Err(GroupError::ElementOutOfRange(x));
        }
        if let Some(moduli) = source.cyclic_moduli() {
            let moduli = moduli.to_vec();
            for (i, &img) in gen_images.iter().enumerate() {
                if target.pow(img, moduli[i]) != 0 {
                    return Err(GroupError::NotHomomorphism(format!("relation of generator {i} fails")));
                }
                for &other in &gen_images[..i] {
                    if target.mul(img, other) != target.mul(other, img) {
                        return Err(GroupError::NotHomomorphism("images of generators do not commute".into()));
                    }
                }
            }
            let mut h = Homomorphism { source, target, gen_images, table: None };
            if h.source.order <= HOM_TABLE_LIMIT {
                h.table = Some(h.source.elements().map(|x| h.image_abelian(x)).collect());
            }
            return Ok(h);
        }
        let n = source.order;
        let mut table = vec![usize::MAX; n];
        table[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, &g) in source.generators.iter().enumerate() {
                let y = source.mul(x, g);
                let img = target.mul(table[x], gen_images[k]);
                if table[y] == usize::MAX {
                    table[y] = img;
                    queue.push_back(y);
                }
            }
        }
        for x in 0..n {
            for (k, &g) in source.generators.iter().enumerate() {
                if table[source.mul(x, g)] != target.mul(table[x], gen_images[k]) {
                    return Err(GroupError::NotHomomorphism(format!("inconsistent on element {x}")));
                }
            }
        }
        Ok(Homomorphism { source, target, gen_images, table: Some(table) })
    }

    /// Homomorphism given by a full image table, verified on all pairs.
    pub fn from_table(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, table: Vec<usize>) -> Result<Self, GroupError> {
        if table.len() != source.order {
            return Err(GroupError::NotHomomorphism("table length must equal source order".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if table[source.mul(a, b)] != target.mul(table[a], table[b]) {
                    return Err(GroupError::NotHomomorphism(format!("fails on ({a},{b})")));
                }
            }
        }
        let gen_images = source.generators.iter().map(|&g| table[g]).collect();
        Ok(Homomorphism { source, target, gen_images, table: Some(table) })
    }

    /// Reduction `Π Z/N_i → Π Z/n_i` between cyclic-product groups with `n_i | N_i`.
    pub fn reduction(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>) -> Result<Self, GroupError> {
        let (Some(a), Some(b)) = (source.cyclic_moduli(), target.cyclic_moduli()) else {
            return Err(GroupError::NotHomomorphism("reduction needs cyclic-product groups".into()));
        };
        if a.len() != b.len() || a.iter().zip(b).any(|(&x, &y)| x % y != 0) {
            return Err(GroupError::NotHomomorphism("moduli are not compatible".into()));
        }
        let images = target.generators.to_vec();
        Self::from_generator_images(source, target, images)
    }

    fn image_abelian(&self, x: usize) -> usize {
        let e = self.source.exponents(x);
        let mut acc = 0;
        for (k, &ek) in e.iter().enumerate() {
            acc = self.target.mul(acc, self.target.pow(self.gen_images[k], ek));
        }
        acc
    }

    pub fn image(&self, x: usize) -> usize {
        match &self.table {
            Some(t) => t[x],
            None => self.image_abelian(x),
        }
    }

    pub fn generator_images(&self) -> &[usize] {
        &self.gen_images
    }

    pub fn compose(&self, first: &Homomorphism) -> Result<Homomorphism, GroupError> {
        if *first.target != *self.source {
            return Err(GroupError::NotHomomorphism("incompatible composition".into()));
        }
        let imgs = first.gen_images.iter().map(|&y| self.image(y)).collect();
        Homomorphism::from_generator_images(first.source.clone(), self.target.clone(), imgs)
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.source.elements().filter(|&x| self.image(x) == 0).collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.target.closure(&self.gen_images).len() == self.target.order
    }
}

/// Quotient `G/N` with its projection; cosets are ordered by their smallest element.
pub fn quotient_by(g: &FiniteGroup, normal: &[usize]) -> Result<(Arc<FiniteGroup>, Homomorphism), GroupError> {
    if !g.is_subgroup(normal) {
        return Err(GroupError::InvalidSubgroup("not a subgroup".into()));
    }
    if let Some((generator, element)) = g.normality_witness(normal) {
        return Err(GroupError::NotNormal { generator, element });
    }
    let n = g.order;
    let mut coset = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if coset[x] == usize::MAX {
            let idx = reps.len();
            reps.push(x);
            for &m in normal {
                coset[g.mul(x, m)] = idx;
            }
        }
    }
    let k = reps.len();
    let mut mul = vec![0u32; k * k];
    for a in 0..k {
        for b in 0..k {
            mul[a * k + b] = coset[g.mul(reps[a], reps[b])] as u32;
        }
    }
    let mut gens: Vec<usize> = Vec::new();
    for &s in &g.generators {
        let c = coset[s];
        if c != 0 && !gens.contains(&c) {
            gens.push(c);
        }
    }
    let q = Arc::new(FiniteGroup::from_mul(&format!("{}/N", g.name), k, mul, gens)?);
    let src = Arc::new(g.clone());
    let imgs = g.generators.iter().map(|&s| coset[s]).collect();
    let proj = Homomorphism::from_generator_images(src, q.clone(), imgs)?;
    Ok((q, proj))
}

/// Subgroup `H ≤ G` with a right transversal (`G = ⊔ H t`) and `H` as a group in its own right.
#[derive(Clone, Debug)]
pub struct SubgroupWithTransversal {
    pub ambient: Arc<FiniteGroup>,
    /// Sorted members of `H` in the ambient indexing.
    pub members: Vec<usize>,
    /// Right coset representatives; `transversal[0]` is the identity.
    pub transversal: Vec<usize>,
    /// `H` as a group; its element `i` is the ambient element `embedding[i]`.
    pub group: Arc<FiniteGroup>,
    pub embedding: Vec<usize>,
    coset_of: Vec<usize>,
    local_index: HashMap<usize, usize>,
}

impl SubgroupWithTransversal {
    /// Subgroup generated by ambient elements; those elements become the generators of `H`.
    pub fn generated_by(ambient: Arc<FiniteGroup>, gens: &[usize]) -> Result<Self, GroupError> {
        if let Some(&x) = gens.iter().find(|&&x| x >= ambient.order) {
            return Err(GroupError::ElementOutOfRange(x));
        }
        let members = ambient.closure(gens);
        Self::build(ambient, members, gens.to_vec(), None)
    }

    /// Subgroup from its member list, generated greedily.
    pub fn from_members(ambient: Arc<FiniteGroup>, members: &[usize]) -> Result<Self, GroupError> {
        let mut m: Vec<usize> = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if !ambient.is_subgroup(&m) {
            return Err(GroupError::InvalidSubgroup("members are not closed".into()));
        }
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for &x in &m {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = ambient.closure(&gens);
            }
        }
        Self::build(ambient, m, gens, None)
    }

    /// Same subgroup with a different right transversal (each entry must lie in a distinct coset).
    pub fn with_transversal(&self, transversal: Vec<usize>) -> Result<Self, GroupError> {
        let gens: Vec<usize> = self.group.generators().iter().map(|&i| self.embedding[i]).collect();
        Self::build(self.ambient.clone(), self.members.clone(), gens, Some(transversal))
    }

    fn build(
        ambient: Arc<FiniteGroup>,
        members: Vec<usize>,
        gens: Vec<usize>,
        transversal: Option<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        let n = ambient.order;
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if coset_of[x] == usize::MAX {
                let idx = reps.len();
                reps.push(x);
                for &h in &members {
                    coset_of[ambient.mul(h, x)] = idx;
                }
            }
        }
        if let Some(t) = transversal {
            if t.len() != reps.len() || t.first() != Some(&0) {
                return Err(GroupError::InvalidSubgroup("transversal must list one element per coset, identity first".into()));
            }
            let mut seen = vec![false; reps.len()];
            for &x in &t {
                if x >= n || seen[coset_of[x]] {
                    return Err(GroupError::InvalidSubgroup("transversal repeats a coset".into()));
                }
                seen[coset_of[x]] = true;
            }
            let mut new_coset = vec![0usize; n];
            for x in 0..n {
                new_coset[x] = t.iter().position(|&r| coset_of[r] == coset_of[x]).unwrap();
            }
            coset_of = new_coset;
            reps = t;
        }
        let local_index: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let k = members.len();
        let mut mul = vec![0u32; k * k];
        for a in 0..k {
            for b in 0..k {
                mul[a * k + b] = local_index[&ambient.mul(members[a], members[b])] as u32;
            }
        }
        let local_gens = gens.iter().map(|g| local_index[g]).collect();
        let group = Arc::new(FiniteGroup::from_mul(&format!("H≤{}", ambient.name), k, mul, local_gens)?);
        Ok(SubgroupWithTransversal {
            ambient,
            embedding: members.clone(),
            members,
            transversal: reps,
            group,
            coset_of,
            local_index,
        })
    }

    pub fn index(&self) -> usize {
        self.transversal.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.local_index.contains_key(&x)
    }

    /// Index of `H` element corresponding to an ambient element of `H`.
    pub fn local(&self, x: usize) -> usize {
        self.local_index[&x]
    }

    /// Position in the transversal of the coset `H x`.
    pub fn coset(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    /// Writes `x = h · t` and returns `(local index of h, coset position of t)`.
    pub fn decompose(&self, x: usize) -> (usize, usize) {
        let c = self.coset_of[x];
        let t = self.transversal[c];
        let h = self.ambient.mul(x, self.ambient.inv(t));
        (self.local(h), c)
    }

    pub fn inclusion(&self) -> Homomorphism {
        let table = self.embedding.clone();
        let imgs = self.group.generators().iter().map(|&g| table[g]).collect();
        Homomorphism { source: self.group.clone(), target: self.ambient.clone(), gen_images: imgs, table: Some(table) }
    }

    pub fn is_normal(&self) -> bool {
        self.ambient.is_normal(&self.members)
    }
}

pub fn transversal(g: Arc<FiniteGroup>, members: &[usize]) -> Result<SubgroupWithTransversal, GroupError> {
    SubgroupWithTransversal::from_members(g, members)
}
