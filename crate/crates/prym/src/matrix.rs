//! Exact integer and rational matrix algebra: Smith normal form, integer
//! kernels, ranks, and linear solves. Plain elimination with big integers;
//! the matrices here stay small.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = self.at(i, k) * other.at(k, j);
                    *out.at_mut(i, j) += prod;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        out
    }

    pub fn scale(&self, k: i64) -> IntMatrix {
        let mut out = self.clone();
        for x in &mut out.data {
            *x *= BigInt::from(k);
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.add(&other.scale(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let m: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| BigRational::from(self.at(i, j).clone())).collect())
            .collect();
        rational_rank(m)
    }

    /// Determinant via rational elimination (square matrices only).
    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| BigRational::from(self.at(i, j).clone())).collect())
            .collect();
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot = match (k..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => p,
                None => return BigRational::zero(),
            };
            if pivot != k {
                m.swap(pivot, k);
                det = -det;
            }
            det *= &m[k][k];
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] / &m[k][k];
                for j in k..n {
                    let sub = &f * &m[k][j];
                    m[i][j] -= sub;
                }
            }
        }
        det
    }

    /// Columns form a Z-basis of { x : Mx = 0 }. Deterministic: integer
    /// column elimination scanning rows top to bottom.
    pub fn kernel_basis(&self) -> IntMatrix {
        let mut m = self.clone();
        let mut u = IntMatrix::identity(self.cols);
        let mut c = 0; // first unprocessed column
        for i in 0..m.rows {
            if c >= m.cols {
                break;
            }
            // gcd elimination across columns c..cols on row i
            loop {
                let mut best: Option<usize> = None;
                for j in c..m.cols {
                    if m.at(i, j).is_zero() {
                        continue;
                    }
                    best = match best {
                        None => Some(j),
                        Some(b) => {
                            if m.at(i, j).abs() < m.at(i, b).abs() {
                                Some(j)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
                let p = match best {
                    None => break,
                    Some(p) => p,
                };
                let mut done = true;
                for j in c..m.cols {
                    if j == p || m.at(i, j).is_zero() {
                        continue;
                    }
                    let q = floor_div(m.at(i, j), m.at(i, p));
                    if !q.is_zero() {
                        col_axpy(&mut m, j, p, &-q.clone());
                        col_axpy(&mut u, j, p, &-q);
                    }
                    if !m.at(i, j).is_zero() {
                        done = false;
                    }
                }
                if done {
                    // move pivot column to position c
                    if p != c {
                        col_swap(&mut m, p, c);
                        col_swap(&mut u, p, c);
                    }
                    c += 1;
                    break;
                }
            }
        }
        // columns c.. of u are a kernel basis
        let mut out = IntMatrix::zero(self.cols, self.cols - c);
        for j in c..self.cols {
            for i in 0..self.cols {
                *out.at_mut(i, j - c) = u.at(i, j).clone();
            }
        }
        out
    }

    /// Smith normal form: U * M * V = D, diagonal with divisibility chain,
    /// U and V unimodular. Pivot choice: smallest nonzero absolute value,
    /// ties broken by position.
    pub fn snf(&self) -> SnfResult {
        let mut d = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        for t in 0..n {
            loop {
                // pick pivot among (i,j) with i,j >= t
                let mut pivot: Option<(usize, usize)> = None;
                for i in t..d.rows {
                    for j in t..d.cols {
                        if d.at(i, j).is_zero() {
                            continue;
                        }
                        pivot = match pivot {
                            None => Some((i, j)),
                            Some((pi, pj)) => {
                                if d.at(i, j).abs() < d.at(pi, pj).abs() {
                                    Some((i, j))
                                } else {
                                    Some((pi, pj))
                                }
                            }
                        };
                    }
                }
                let (pi, pj) = match pivot {
                    None => break,
                    Some(p) => p,
                };
                if pi != t {
                    row_swap(&mut d, pi, t);
                    row_swap(&mut u, pi, t);
                }
                if pj != t {
                    col_swap(&mut d, pj, t);
                    col_swap(&mut v, pj, t);
                }
                let mut clean = true;
                for i in t + 1..d.rows {
                    if d.at(i, t).is_zero() {
                        continue;
                    }
                    let q = floor_div(d.at(i, t), d.at(t, t));
                    row_axpy(&mut d, i, t, &-q.clone());
                    row_axpy(&mut u, i, t, &-q);
                    if !d.at(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..d.cols {
                    if d.at(t, j).is_zero() {
                        continue;
                    }
                    let q = floor_div(d.at(t, j), d.at(t, t));
                    col_axpy(&mut d, j, t, &-q.clone());
                    col_axpy(&mut v, j, t, &-q);
                    if !d.at(t, j).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
        }
        // sign normalization and divisibility chain
        for t in 0..n {
            if d.at(t, t).is_negative() {
                for j in 0..d.cols {
                    let x = -d.at(t, j).clone();
                    *d.at_mut(t, j) = x;
                }
                for j in 0..u.cols {
                    let x = -u.at(t, j).clone();
                    *u.at_mut(t, j) = x;
                }
            }
        }
        let mut again = true;
        while again {
            again = false;
            for t in 0..n.saturating_sub(1) {
                let a = d.at(t, t).clone();
                let b = d.at(t + 1, t + 1).clone();
                if a.is_zero() && !b.is_zero() {
                    row_swap(&mut d, t, t + 1);
                    row_swap(&mut u, t, t + 1);
                    col_swap(&mut d, t, t + 1);
                    col_swap(&mut v, t, t + 1);
                    again = true;
                } else if !a.is_zero() && !(&b % &a).is_zero() {
                    // fold d[t+1] into d[t]: standard 2x2 gcd step
                    col_axpy(&mut d, t, t + 1, &BigInt::one());
                    col_axpy(&mut v, t, t + 1, &BigInt::one());
                    let sub = snf_2x2(&mut d, &mut u, &mut v, t);
                    debug_assert!(sub);
                    again = true;
                }
            }
        }
        SnfResult { d, u, v }
    }
}

/// One localized SNF pass on rows/cols t, t+1. Returns true when it
/// terminated with a clean diagonal block.
fn snf_2x2(d: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, t: usize) -> bool {
    for _ in 0..256 {
        let mut clean = true;
        // pivot: smaller abs of the 2x2 block corner entries
        if !d.at(t + 1, t).is_zero() || !d.at(t, t + 1).is_zero() || {
            let a = d.at(t, t);
            let b = d.at(t + 1, t + 1);
            !a.is_zero() && !b.is_zero() && !(b % a).is_zero()
        } {
            clean = false;
        }
        if d.at(t, t).is_zero() || (!d.at(t + 1, t).is_zero() && d.at(t + 1, t).abs() < d.at(t, t).abs()) {
            row_swap(d, t, t + 1);
            row_swap(u, t, t + 1);
        }
        if !d.at(t, t + 1).is_zero() && (d.at(t, t).is_zero() || d.at(t, t + 1).abs() < d.at(t, t).abs()) {
            col_swap(d, t, t + 1);
            col_swap(v, t, t + 1);
        }
        if !d.at(t + 1, t).is_zero() {
            let q = floor_div(d.at(t + 1, t), d.at(t, t));
            row_axpy(d, t + 1, t, &-q.clone());
            row_axpy(u, t + 1, t, &-q);
        }
        if !d.at(t, t + 1).is_zero() {
            let q = floor_div(d.at(t, t + 1), d.at(t, t));
            col_axpy(d, t + 1, t, &-q.clone());
            col_axpy(v, t + 1, t, &-q);
        }
        if clean && d.at(t + 1, t).is_zero() && d.at(t, t + 1).is_zero() {
            if d.at(t, t).is_negative() {
                for j in 0..d.cols {
                    let x = -d.at(t, j).clone();
                    *d.at_mut(t, j) = x;
                }
                for j in 0..u.cols {
                    let x = -u.at(t, j).clone();
                    *u.at_mut(t, j) = x;
                }
            }
            if d.at(t + 1, t + 1).is_negative() {
                for j in 0..d.cols {
                    let x = -d.at(t + 1, j).clone();
                    *d.at_mut(t + 1, j) = x;
                }
                for j in 0..u.cols {
                    let x = -u.at(t + 1, j).clone();
                    *u.at_mut(t + 1, j) = x;
                }
            }
            return true;
        }
    }
    false
}

#[derive(Clone, Debug)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.at(i, i).clone()).collect()
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    // rounded-toward-nearest quotient keeps entries small
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if (&r * 2u8).abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn col_swap(m: &mut IntMatrix, a: usize, b: usize) {
    for i in 0..m.rows {
        let x = m.at(i, a).clone();
        *m.at_mut(i, a) = m.at(i, b).clone();
        *m.at_mut(i, b) = x;
    }
}

fn row_swap(m: &mut IntMatrix, a: usize, b: usize) {
    for j in 0..m.cols {
        let x = m.at(a, j).clone();
        *m.at_mut(a, j) = m.at(b, j).clone();
        *m.at_mut(b, j) = x;
    }
}

/// column[a] += k * column[b]
fn col_axpy(m: &mut IntMatrix, a: usize, b: usize, k: &BigInt) {
    for i in 0..m.rows {
        let add = m.at(i, b) * k;
        *m.at_mut(i, a) += add;
    }
}

/// row[a] += k * row[b]
fn row_axpy(m: &mut IntMatrix, a: usize, b: usize, k: &BigInt) {
    for j in 0..m.cols {
        let add = m.at(b, j) * k;
        *m.at_mut(a, j) += add;
    }
}

pub fn rational_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for j in 0..cols {
        let pivot = match (rank..rows).find(|&i| !m[i][j].is_zero()) {
            None => continue,
            Some(p) => p,
        };
        m.swap(rank, pivot);
        for i in 0..rows {
            if i != rank && !m[i][j].is_zero() {
                let f = &m[i][j] / &m[rank][j];
                for k in j..cols {
                    let sub = &f * &m[rank][k];
                    m[i][k] -= sub;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Solves A x = b exactly over the rationals, where the columns of `a` are
/// the generators. Returns None when the system is inconsistent; when the
/// solution is underdetermined any one solution is returned.
pub fn rational_solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = b.len();
    let cols = a.len();
    assert!(a.iter().all(|c| c.len() == rows));
    // augmented row-major matrix
    let mut m: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..cols).map(|j| a[j][i].clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut pivot_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0;
    for j in 0..cols {
        let p = match (r..rows).find(|&i| !m[i][j].is_zero()) {
            None => continue,
            Some(p) => p,
        };
        m.swap(r, p);
        let inv = m[r][j].clone();
        for k in j..=cols {
            m[r][k] = &m[r][k] / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][j].is_zero() {
                let f = m[i][j].clone();
                for k in j..=cols {
                    let sub = &f * &m[r][k];
                    m[i][k] -= sub;
                }
            }
        }
        pivot_col[j] = Some(r);
        r += 1;
        if r == rows {
            break;
        }
    }
    // inconsistent if some zero row has nonzero rhs
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for j in 0..cols {
        if let Some(pr) = pivot_col[j] {
            x[j] = m[pr][cols].clone();
        }
    }
    Some(x)
}

/// Checks that a rational vector is integral and converts it.
pub fn to_integers(xs: &[BigRational]) -> Result<Vec<BigInt>, Error> {
    xs.iter()
        .map(|x| {
            if x.is_integer() {
                Ok(x.to_integer())
            } else {
                Err(Error::Internal(format!("expected integer entry, got {x}")))
            }
        })
        .collect()
}
