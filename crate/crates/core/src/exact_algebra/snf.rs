use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `u * a * v = d` with unimodular `u`, `v`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal of `d`, length `min(rows, cols)`, forming a divisibility chain.
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

struct Work {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    // row[dst] += f row[src]
    fn row_op(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.a.add_row_multiple(dst, src, f);
        self.u.add_row_multiple(dst, src, f);
        self.u_inv.add_col_multiple(src, dst, &-f);
    }

    // col[dst] += f col[src]
    fn col_op(&mut self, dst: usize, src: usize, f: &BigInt) {
        self.a.add_col_multiple(dst, src, f);
        self.v.add_col_multiple(dst, src, f);
        self.v_inv.add_row_multiple(src, dst, &-f);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

fn min_abs_in(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
                if x.abs() == BigInt::from(1) {
                    return best;
                }
            }
        }
    }
    best
}

/// Nearest-integer quotient, keeping remainders small.
fn round_div(x: &BigInt, p: &BigInt) -> BigInt {
    let (q, r) = x.div_mod_floor(p);
    if (&r + &r).abs() > p.abs() {
        q + 1
    } else {
        q
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (r, c) = (a.rows(), a.cols());
    let mut w = Work {
        a: a.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
        v_inv: IntMatrix::identity(c),
    };
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = min_abs_in(&w.a, t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let p = w.a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                if !w.a.get(i, t).is_zero() {
                    let q = round_div(w.a.get(i, t), &p);
                    w.row_op(i, t, &-q);
                    if !w.a.get(i, t).is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..c {
                if !w.a.get(t, j).is_zero() {
                    let q = round_div(w.a.get(t, j), &p);
                    w.col_op(j, t, &-q);
                    if !w.a.get(t, j).is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                let mut best = (t, t);
                for i in t + 1..r {
                    let x = w.a.get(i, t);
                    if !x.is_zero() && x.abs() < w.a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..c {
                    let x = w.a.get(t, j);
                    if !x.is_zero() && x.abs() < w.a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => w.row_op(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let diagonal: Vec<BigInt> = (0..r.min(c)).map(|i| w.a.get(i, i).clone()).collect();
    let rank = diagonal.iter().filter(|x| !x.is_zero()).count();
    SmithForm { diagonal, rank, d: w.a, u: w.u, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv }
}

/// Basis of the integer kernel `{x : a x = 0}` as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    let cols: Vec<usize> = (s.rank..a.cols()).collect();
    s.v.select_columns(&cols)
}

/// Solves `a x = b` over the integers, if possible.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let s = smith_normal_form(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, val) in ub.iter().enumerate() {
        if i < s.rank {
            let (q, rem) = val.div_mod_floor(&s.diagonal[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !val.is_zero() {
            return None;
        }
    }
    Some(s.v.mul_vec(&y))
}
