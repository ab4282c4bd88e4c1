//! Dense linear algebra for small matrices.
//!
//! Everything here targets the desk scale this crate operates at (n < 100):
//! LU factorization with partial pivoting, determinants, adjugates, a
//! rank-revealing solve with complete pivoting for singular-but-consistent
//! systems, and Householder least squares for polynomial fits.

use serde::{Deserialize, Serialize};

/// Relative pivot threshold: a factorization whose smallest pivot falls below
/// `PIVOT_REL_TOL` times its largest pivot is treated as numerically singular.
pub const PIVOT_REL_TOL: f64 = 1e-12;

/// Condition estimate above which the adjugate switches from `det * inverse`
/// to cofactor expansion.
pub const ADJUGATE_COND_MAX: f64 = 1e8;

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Matrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n_rows: usize, n_cols: usize, mut f: F) -> Self {
        let mut m = Matrix::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = if n_rows == 0 { 0 } else { rows[0].len() };
        assert!(
            rows.iter().all(|r| r.len() == n_cols),
            "ragged rows passed to Matrix::from_rows"
        );
        Matrix {
            n_rows,
            n_cols,
            data: rows.concat(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_cols.max(1))
    }

    /// Sum of all entries.
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Entrywise map, preserving shape.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Matrix {
        Matrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_cols + j]
    }
}

/// LU factorization with partial pivoting, kept in packed form.
///
/// Zero pivots are recorded rather than reported as errors; `det` is then
/// exactly zero and `solve` refuses to divide.
pub struct LuDecomposition {
    lu: Matrix,
    row_perm: Vec<usize>,
    sign: f64,
    pivot_abs: Vec<f64>,
}

pub fn lu_decompose(a: &Matrix) -> LuDecomposition {
    assert!(a.is_square(), "LU factorization requires a square matrix");
    let n = a.n_rows();
    let mut lu = a.clone();
    let mut row_perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut pivot_abs = Vec::with_capacity(n);

    for k in 0..n {
        let mut p = k;
        let mut best = lu.get(k, k).abs();
        for i in (k + 1)..n {
            let v = lu.get(i, k).abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(p, j));
                lu.set(p, j, tmp);
            }
            row_perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu.get(k, k);
        pivot_abs.push(pivot.abs());
        if pivot == 0.0 {
            continue; // leave the column; determinant is zero regardless
        }
        for i in (k + 1)..n {
            let factor = lu.get(i, k) / pivot;
            lu.set(i, k, factor);
            for j in (k + 1)..n {
                lu.set(i, j, lu.get(i, j) - factor * lu.get(k, j));
            }
        }
    }

    LuDecomposition {
        lu,
        row_perm,
        sign,
        pivot_abs,
    }
}

impl LuDecomposition {
    pub fn det(&self) -> f64 {
        let n = self.lu.n_rows();
        let mut d = self.sign;
        for k in 0..n {
            d *= self.lu.get(k, k);
        }
        d
    }

    pub fn max_pivot(&self) -> f64 {
        self.pivot_abs.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    pub fn min_pivot(&self) -> f64 {
        self.pivot_abs.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Ratio of largest to smallest pivot, a cheap surrogate for the
    /// condition number. Infinite when a pivot vanished.
    pub fn condition_estimate(&self) -> f64 {
        if self.pivot_abs.is_empty() {
            return 1.0;
        }
        let max = self.max_pivot();
        let min = self.min_pivot();
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    pub fn is_numerically_singular(&self, rel_tol: f64) -> bool {
        if self.pivot_abs.is_empty() {
            return false;
        }
        self.min_pivot() < rel_tol * self.max_pivot()
    }

    /// Solves `A x = b`. Returns `None` if a pivot vanished exactly.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.lu.n_rows();
        assert_eq!(b.len(), n);
        if self.pivot_abs.contains(&0.0) {
            return None;
        }
        // forward substitution with the permuted right-hand side
        let mut x: Vec<f64> = self.row_perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for (j, xj) in x.iter().enumerate().take(i) {
                s -= self.lu.get(i, j) * xj;
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for (j, xj) in x.iter().enumerate().take(n).skip(i + 1) {
                s -= self.lu.get(i, j) * xj;
            }
            x[i] = s / self.lu.get(i, i);
        }
        Some(x)
    }
}

pub fn det(a: &Matrix) -> f64 {
    if a.n_rows() == 0 {
        return 1.0;
    }
    lu_decompose(a).det()
}

pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    lu_decompose(a).solve(b)
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.n_rows();
    let lu = lu_decompose(a);
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = lu.solve(&e)?;
        e[j] = 0.0;
        for (i, v) in col.iter().enumerate() {
            inv.set(i, j, *v);
        }
    }
    Some(inv)
}

/// Adjugate (transposed cofactor matrix), satisfying `A * adj(A) = det(A) * I`.
///
/// Uses `det(A) * A^{-1}` while the factorization is well conditioned and
/// falls back to cofactor expansion near singularity, where the inverse
/// route loses all accuracy.
pub fn adjugate(a: &Matrix) -> Matrix {
    let n = a.n_rows();
    assert!(a.is_square());
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    if n == 1 {
        return Matrix::identity(1);
    }
    let lu = lu_decompose(a);
    if !lu.is_numerically_singular(PIVOT_REL_TOL) && lu.condition_estimate() <= ADJUGATE_COND_MAX {
        if let Some(inv) = inverse(a) {
            let d = lu.det();
            return inv.map(|v| v * d);
        }
    }
    adjugate_by_cofactors(a)
}

fn adjugate_by_cofactors(a: &Matrix) -> Matrix {
    let n = a.n_rows();
    let mut adj = Matrix::zeros(n, n);
    let mut minor = Matrix::zeros(n - 1, n - 1);
    for i in 0..n {
        for j in 0..n {
            for (mi, r) in (0..n).filter(|&r| r != i).enumerate() {
                for (mj, c) in (0..n).filter(|&c| c != j).enumerate() {
                    minor.set(mi, mj, a.get(r, c));
                }
            }
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            // adj(A)[j][i] = (-1)^{i+j} det(minor_{ij})
            adj.set(j, i, sign * det(&minor));
        }
    }
    adj
}

/// Particular solution of `A x = b` by Gaussian elimination with complete
/// pivoting, with free variables pinned to zero.
///
/// Always returns a candidate; the caller decides acceptance by checking the
/// residual against the original system. Ranks are cut where a pivot falls
/// below `rel_tol` times the largest pivot seen.
pub fn rank_revealing_particular_solution(a: &Matrix, b: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = a.n_rows();
    assert!(a.is_square());
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut max_pivot = 0.0f64;
    let mut rank = n;

    for k in 0..n {
        let mut p = (k, k);
        let mut best = 0.0f64;
        for i in k..n {
            for j in k..n {
                let v = m.get(i, j).abs();
                if v > best {
                    best = v;
                    p = (i, j);
                }
            }
        }
        if best == 0.0 || (max_pivot > 0.0 && best < rel_tol * max_pivot) {
            rank = k;
            break;
        }
        max_pivot = max_pivot.max(best);
        let (pr, pc) = p;
        if pr != k {
            for j in 0..n {
                let tmp = m.get(k, j);
                m.set(k, j, m.get(pr, j));
                m.set(pr, j, tmp);
            }
            rhs.swap(k, pr);
        }
        if pc != k {
            for i in 0..n {
                let tmp = m.get(i, k);
                m.set(i, k, m.get(i, pc));
                m.set(i, pc, tmp);
            }
            col_perm.swap(k, pc);
        }
        let pivot = m.get(k, k);
        for i in (k + 1)..n {
            let factor = m.get(i, k) / pivot;
            for j in k..n {
                m.set(i, j, m.get(i, j) - factor * m.get(k, j));
            }
            rhs[i] -= factor * rhs[k];
        }
    }

    // back substitution on the rank x rank leading block, free variables zero
    let mut y = vec![0.0; n];
    for k in (0..rank).rev() {
        let mut s = rhs[k];
        for (j, yj) in y.iter().enumerate().take(rank).skip(k + 1) {
            s -= m.get(k, j) * yj;
        }
        y[k] = s / m.get(k, k);
    }
    let mut x = vec![0.0; n];
    for k in 0..n {
        x[col_perm[k]] = y[k];
    }
    x
}

/// Least-squares solution of the overdetermined system `A x = b` by
/// Householder QR. Requires `A.n_rows() >= A.n_cols()`.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let m = a.n_rows();
    let n = a.n_cols();
    assert!(m >= n, "least_squares needs at least as many rows as columns");
    assert_eq!(b.len(), m);
    let mut r = a.clone();
    let mut qtb = b.to_vec();

    for k in 0..n {
        // Householder vector for column k below the diagonal
        let mut norm = 0.0;
        for i in k..m {
            norm += r.get(i, k) * r.get(i, k);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r.get(k, k) >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r.get(i, k)).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // apply H = I - 2 v v^T / v^T v to the trailing columns and to b
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r.get(i, j)).sum();
            let scale = 2.0 * dot / vtv;
            for i in k..m {
                r.set(i, j, r.get(i, j) - scale * v[i - k]);
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum();
        let scale = 2.0 * dot / vtv;
        for i in k..m {
            qtb[i] -= scale * v[i - k];
        }
    }

    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = qtb[k];
        for (j, xj) in x.iter().enumerate().take(n).skip(k + 1) {
            s -= r.get(k, j) * xj;
        }
        let diag = r.get(k, k);
        x[k] = if diag == 0.0 { 0.0 } else { s / diag };
    }
    x
}

/// Max-norm of the residual `A x - b`.
pub fn residual_max_norm(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
    a.mat_vec(x)
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (ax, bi)| m.max((ax - bi).abs()))
}
