//! Small dense linear algebra for the handful of parameters these models carry.

use crate::error::{MprError, Result};
use crate::scalar::Scalar;
use serde::Serialize;
use std::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(MprError::Dimension(format!(
                "{} values for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MprError::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Submatrix picking the given rows and columns, in order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn max_abs_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Lower Cholesky factor of a symmetric positive definite matrix.
    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        if self.rows != self.cols {
            return Err(MprError::Dimension("cholesky of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(MprError::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { l })
    }

    /// Inverse of a symmetric positive definite matrix, symmetrised.
    pub fn inverse_spd(&self) -> Result<Self> {
        let chol = self.cholesky()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = chol.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        let half = T::lit(0.5);
        for i in 0..n {
            for j in 0..i {
                let m = half * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = m;
                inv[(j, i)] = m;
            }
        }
        Ok(inv)
    }

    /// Column-pivoted Householder QR. Returns the column order chosen by the
    /// pivoting and the absolute diagonal of R in that order.
    pub fn pivoted_qr_diagonal(&self) -> (Vec<usize>, Vec<T>) {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut norms: Vec<T> = (0..n)
            .map(|j| (0..m).map(|i| a[(i, j)] * a[(i, j)]).sum())
            .collect();
        let steps = m.min(n);
        let mut diag = Vec::with_capacity(n);
        for k in 0..steps {
            let (best, _) = norms[k..]
                .iter()
                .enumerate()
                .fold((k, T::neg_infinity()), |acc, (off, &v)| {
                    if v > acc.1 {
                        (k + off, v)
                    } else {
                        acc
                    }
                });
            if best != k {
                norms.swap(k, best);
                perm.swap(k, best);
                for i in 0..m {
                    let tmp = a[(i, k)];
                    a[(i, k)] = a[(i, best)];
                    a[(i, best)] = tmp;
                }
            }
            let norm_x: T = (k..m).map(|i| a[(i, k)] * a[(i, k)]).sum::<T>().sqrt();
            if norm_x == T::zero() {
                diag.push(T::zero());
                continue;
            }
            let alpha = if a[(k, k)] > T::zero() { -norm_x } else { norm_x };
            let mut v: Vec<T> = (k..m).map(|i| a[(i, k)]).collect();
            v[0] = v[0] - alpha;
            let vnorm2: T = v.iter().map(|&x| x * x).sum();
            if vnorm2 > T::zero() {
                for j in k..n {
                    let s: T = (k..m).map(|i| v[i - k] * a[(i, j)]).sum();
                    let f = (s + s) / vnorm2;
                    for i in k..m {
                        a[(i, j)] = a[(i, j)] - f * v[i - k];
                    }
                }
            }
            diag.push(a[(k, k)].abs());
            for j in k + 1..n {
                norms[j] = (k + 1..m).map(|i| a[(i, j)] * a[(i, j)]).sum();
            }
        }
        diag.extend(std::iter::repeat(T::zero()).take(n - steps));
        (perm, diag)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.nrows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `vᵀ A v` for square `A`.
pub fn quadratic_form<T: Scalar>(a: &Matrix<T>, v: &[T]) -> T {
    dot(v, &a.mul_vec(v))
}

/// Eigen-decomposition of a symmetric 2×2 matrix: eigenvalues in descending
/// order with unit eigenvectors as columns.
pub fn symmetric_eigen_2x2<T: Scalar>(m: &Matrix<T>) -> ([T; 2], [[T; 2]; 2]) {
    let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let two = T::lit(2.0);
    let mean = (a + d) / two;
    let radius = (((a - d) / two).powi(2) + b * b).sqrt();
    let l1 = mean + radius;
    let l2 = mean - radius;
    if b.abs() <= T::epsilon() * (a.abs() + d.abs()) {
        return if a >= d {
            ([a, d], [[T::one(), T::zero()], [T::zero(), T::one()]])
        } else {
            ([d, a], [[T::zero(), T::one()], [T::one(), T::zero()]])
        };
    }
    // (b, l1 - a) is an eigenvector for l1; the second is its rotation.
    let (vx, vy) = (b, l1 - a);
    let norm = (vx * vx + vy * vy).sqrt();
    let (ux, uy) = (vx / norm, vy / norm);
    ([l1, l2], [[ux, -uy], [uy, ux]])
}
