//! Linear algebra over `Z/p^a`.

/// The local ring `Z/p^a` with `p^a < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalRing {
    pub p: u64,
    pub a: u32,
    pub q: u64,
}

impl LocalRing {
    pub fn new(p: u64, a: u32) -> Self {
        let q = p.checked_pow(a).expect("modulus overflow");
        assert!(q < (1 << 31), "local modulus {q} too large");
        LocalRing { p, a, q }
    }

    #[inline]
    pub fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.q
    }

    #[inline]
    pub fn add(&self, x: u64, y: u64) -> u64 {
        let s = x + y;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, x: u64, y: u64) -> u64 {
        if x >= y {
            x - y
        } else {
            x + self.q - y
        }
    }

    #[inline]
    pub fn neg(&self, x: u64) -> u64 {
        if x == 0 {
            0
        } else {
            self.q - x
        }
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    pub fn pow_p(&self, v: u32) -> u64 {
        if v >= self.a {
            0
        } else {
            self.p.pow(v)
        }
    }

    /// `p`-adic valuation, `a` for zero.
    pub fn val(&self, mut x: u64) -> u32 {
        if x == 0 {
            return self.a;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit.
    pub fn inv(&self, x: u64) -> u64 {
        let (mut r0, mut r1) = (self.q as i64, (x % self.q) as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let t = r0 / r1;
            (r0, r1) = (r1, r0 - t * r1);
            (s0, s1) = (s1, s0 - t * s1);
        }
        assert_eq!(r0, 1, "{x} is not a unit mod {}", self.q);
        s0.rem_euclid(self.q as i64) as u64
    }

    /// Splits `x ≠ 0` as `p^v · u` and returns `(v, u)`.
    pub fn split(&self, x: u64) -> (u32, u64) {
        let v = self.val(x);
        (v, x / self.p.pow(v))
    }

    /// Exact division of `x` by `p^v`, as a residue mod `q`.
    pub fn div_pow(&self, x: u64, v: u32) -> u64 {
        debug_assert!(self.val(x) >= v);
        if x == 0 {
            0
        } else {
            x / self.p.pow(v)
        }
    }
}

/// Dense row-major matrix of residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl LocalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LocalMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<u64>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols);
            data.extend(row);
        }
        LocalMatrix { rows: r, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[u64]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            let c = self.cols;
            let (lo, hi) = (a.min(b), a.max(b));
            let (x, y) = self.data.split_at_mut(hi * c);
            x[lo * c..lo * c + c].swap_with_slice(&mut y[..c]);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f·row[src]
    fn axpy_row(&mut self, ring: &LocalRing, dst: usize, src: usize, f: u64) {
        if f == 0 || dst == src {
            return;
        }
        let c = self.cols;
        let (d, s) = if dst < src {
            let (x, y) = self.data.split_at_mut(src * c);
            (&mut x[dst * c..dst * c + c], &y[..c])
        } else {
            let (x, y) = self.data.split_at_mut(dst * c);
            (&mut y[..c], &x[src * c..src * c + c])
        };
        axpy(ring, d, s, f);
    }

    fn scale_row(&mut self, ring: &LocalRing, i: usize, f: u64) {
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x = ring.mul(*x, f);
        }
    }

    pub fn mul_vec(&self, ring: &LocalRing, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(ring, self.row(i), v)).collect()
    }
}

#[inline]
pub fn axpy(ring: &LocalRing, dst: &mut [u64], src: &[u64], f: u64) {
    let q = ring.q;
    for (d, &s) in dst.iter_mut().zip(src) {
        if s != 0 {
            *d = (*d + f * s) % q;
        }
    }
}

#[inline]
pub fn dot(ring: &LocalRing, a: &[u64], b: &[u64]) -> u64 {
    let mut acc: u64 = 0;
    for (&x, &y) in a.iter().zip(b) {
        acc = (acc + x * y) % ring.q;
    }
    acc
}

/// Smith form `U A V = D` over `Z/p^a`; `D` has entries `p^{vals[t]}` on its first `rank` diagonal slots.
///
/// Transforms are stored so that the needed access pattern is contiguous: `vt` holds the
/// columns of `V` as rows and `uinv_t` holds the columns of `U⁻¹` as rows.
#[derive(Clone, Debug)]
pub struct LocalSnf {
    pub ring: LocalRing,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub vals: Vec<u32>,
    pub u: Option<LocalMatrix>,
    pub uinv_t: Option<LocalMatrix>,
    pub vt: Option<LocalMatrix>,
    pub vinv: Option<LocalMatrix>,
}

pub fn local_snf(ring: LocalRing, mut a: LocalMatrix, track_u: bool, track_v: bool) -> LocalSnf {
    let (r, c) = (a.rows, a.cols);
    let mut u = track_u.then(|| LocalMatrix::identity(r));
    let mut uinv_t = track_u.then(|| LocalMatrix::identity(r));
    let mut vt = track_v.then(|| LocalMatrix::identity(c));
    let mut vinv = track_v.then(|| LocalMatrix::identity(c));
    let mut vals = Vec::new();
    let mut t = 0;
    let mut pattern: Vec<usize> = Vec::with_capacity(c);
    while t < r.min(c) {
        // pivot of minimal valuation, stopping at the first unit
        let mut best: Option<(usize, usize, u32)> = None;
        'scan: for i in t..r {
            let row = &a.data[i * c..(i + 1) * c];
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = if x % ring.p != 0 { 0 } else { ring.val(x) };
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                        if v == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        if let Some(ui) = uinv_t.as_mut() {
            ui.swap_rows(t, pi);
        }
        if let Some(vt) = vt.as_mut() {
            vt.swap_rows(t, pj);
        }
        if let Some(vi) = vinv.as_mut() {
            vi.swap_rows(t, pj);
        }
        let (_, unit) = ring.split(a.get(t, t));
        if unit != 1 {
            let ui = ring.inv(unit);
            a.scale_row(&ring, t, ui);
            if let Some(u) = u.as_mut() {
                u.scale_row(&ring, t, ui);
            }
            if let Some(x) = uinv_t.as_mut() {
                x.scale_row(&ring, t, unit);
            }
        }
        pattern.clear();
        pattern.extend((t + 1..c).filter(|&j| a.get(t, j) != 0));
        for i in t + 1..r {
            let x = a.get(i, t);
            if x == 0 {
                continue;
            }
            let f = ring.div_pow(x, v);
            let nf = ring.neg(f);
            a.set(i, t, 0);
            let (top, bottom) = a.data.split_at_mut(i * c);
            let prow = &top[t * c..t * c + c];
            let drow = &mut bottom[..c];
            for &j in &pattern {
                drow[j] = (drow[j] + nf * prow[j]) % ring.q;
            }
            if let Some(u) = u.as_mut() {
                u.axpy_row(&ring, i, t, nf);
            }
            if let Some(x) = uinv_t.as_mut() {
                x.axpy_row(&ring, t, i, f);
            }
        }
        for &j in &pattern {
            let f = ring.div_pow(a.get(t, j), v);
            a.set(t, j, 0);
            if let Some(vt) = vt.as_mut() {
                vt.axpy_row(&ring, j, t, ring.neg(f));
            }
            if let Some(vi) = vinv.as_mut() {
                vi.axpy_row(&ring, t, j, f);
            }
        }
        vals.push(v);
        t += 1;
    }
    LocalSnf { ring, rows: r, cols: c, rank: vals.len(), vals, u, uinv_t, vt, vinv }
}

/// Kernel `{x : A x = 0}` in adapted coordinates: `x = V y` with `y_i ∈ p^{c_i}·Z/p^a`.
#[derive(Clone, Debug)]
pub struct LocalKernel {
    pub ring: LocalRing,
    pub dim: usize,
    pub vt: LocalMatrix,
    pub vinv: LocalMatrix,
    pub c: Vec<u32>,
}

impl LocalKernel {
    pub fn from_snf(s: LocalSnf) -> Self {
        let ring = s.ring;
        let mut c = vec![0u32; s.cols];
        for (i, &v) in s.vals.iter().enumerate() {
            c[i] = ring.a - v;
        }
        LocalKernel { ring, dim: s.cols, vt: s.vt.expect("V required"), vinv: s.vinv.expect("V⁻¹ required"), c }
    }

    pub fn compute(ring: LocalRing, a: LocalMatrix) -> Self {
        Self::from_snf(local_snf(ring, a, false, true))
    }

    /// Indices of adapted coordinates along which the kernel is nonzero.
    pub fn active(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.c[i] < self.ring.a).collect()
    }

    /// Generator `p^{c_i} V e_i`.
    pub fn generator(&self, i: usize) -> Vec<u64> {
        let s = self.ring.pow_p(self.c[i]);
        self.vt.row(i).iter().map(|&x| self.ring.mul(x, s)).collect()
    }

    pub fn generators(&self) -> Vec<Vec<u64>> {
        self.active().into_iter().map(|i| self.generator(i)).collect()
    }

    /// Number of elements, as a power of `p`.
    pub fn log_order(&self) -> u32 {
        self.c.iter().map(|&c| self.ring.a - c).sum()
    }
}

/// Cokernel of `gens` inside `⊕ Z/p^{e_i}` (one summand per row).
#[derive(Clone, Debug)]
pub struct LocalCokernel {
    pub ring: LocalRing,
    /// Exponents of the cyclic factors, ascending, all positive.
    pub exps: Vec<u32>,
    coords: Vec<Vec<u64>>,
    reps: Vec<Vec<u64>>,
}

impl LocalCokernel {
    pub fn compute(ring: LocalRing, gens: &LocalMatrix, row_exps: &[u32]) -> Self {
        let r = gens.rows;
        assert_eq!(row_exps.len(), r);
        let mut m = LocalMatrix::zeros(r, gens.cols + r);
        for i in 0..r {
            m.data[i * m.cols..i * m.cols + gens.cols].copy_from_slice(gens.row(i));
            m.set(i, gens.cols + i, ring.pow_p(row_exps[i]));
        }
        let s = local_snf(ring, m, true, false);
        let u = s.u.unwrap();
        let uinv_t = s.uinv_t.unwrap();
        let mut exps = Vec::new();
        let mut coords = Vec::new();
        let mut reps = Vec::new();
        for t in 0..r {
            let e = if t < s.rank { s.vals[t] } else { ring.a };
            if e > 0 {
                exps.push(e);
                coords.push(u.row(t).to_vec());
                reps.push(uinv_t.row(t).to_vec());
            }
        }
        LocalCokernel { ring, exps, coords, reps }
    }

    pub fn num_factors(&self) -> usize {
        self.exps.len()
    }

    /// Representative (in the ambient) of factor `t`.
    pub fn representative(&self, t: usize) -> &[u64] {
        &self.reps[t]
    }

    /// Coordinates of an ambient vector, reduced mod `p^{exps[t]}`.
    pub fn coordinates(&self, w: &[u64]) -> Vec<u64> {
        self.coords
            .iter()
            .zip(&self.exps)
            .map(|(row, &e)| dot(&self.ring, row, w) % self.ring.p.pow(e))
            .collect()
    }
}

/// Solves `A x = b`, returning one solution if any.
pub fn local_solve(ring: LocalRing, a: &LocalMatrix, b: &[u64]) -> Option<Vec<u64>> {
    assert_eq!(b.len(), a.rows);
    let s = local_snf(ring, a.clone(), true, true);
    let ub = s.u.as_ref().unwrap().mul_vec(&ring, b);
    let vt = s.vt.as_ref().unwrap();
    let mut x = vec![0u64; a.cols];
    for (i, &val) in ub.iter().enumerate() {
        if i < s.rank {
            if ring.val(val) < s.vals[i] {
                return None;
            }
            let yi = ring.div_pow(val, s.vals[i]);
            axpy(&ring, &mut x, vt.row(i), yi);
        } else if val != 0 {
            return None;
        }
    }
    Some(x)
}

/// Prime factorization of a small integer as `(p, e)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Idempotent `ε ≡ 1 (mod p^v)`, `ε ≡ 0 (mod m / p^v)` in `Z/m`, where `p^v ∥ m`.
pub fn crt_idempotent(m: u64, p: u64) -> u64 {
    let v = valuation(m, p);
    let pv = p.pow(v);
    let rest = m / pv;
    if rest == 1 {
        return 1 % m;
    }
    // ε = rest · (rest⁻¹ mod p^v)
    let ring = LocalRing { p, a: v, q: pv };
    let inv = ring.inv(rest % pv);
    ((rest as u128 * inv as u128) % m as u128) as u64
}
