//! Dense square matrices sized for the point dimension `k`.
//!
//! Everything here works on small `k×k` problems (k is the spatial dimension
//! of a time series, typically 1 to 5), so plain row-major storage and
//! textbook algorithms are enough.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::Scalar;

/// Square `k×k` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Diagonal matrix with `-1` in the first entry and `+1` elsewhere.
    pub fn reflection(dim: usize) -> Self {
        let mut m = Self::identity(dim);
        if dim > 0 {
            m[(0, 0)] = -T::one();
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            crate::error::check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            crate::error::check_dim(dim, col.len())?;
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let k = self.dim;
        let mut out = Self::zeros(k);
        for i in 0..k {
            for l in 0..k {
                let a = self[(i, l)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..k {
                    out.data[i * k + j] = out.data[i * k + j] + a * rhs.data[l * k + j];
                }
            }
        }
        out
    }

    /// Writes `self · x` into `out`.
    #[inline]
    pub fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = row.iter().zip(x).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    /// `‖M·Mᵀ − I‖_F`.
    pub fn orthogonality_residual(&self) -> T {
        let k = self.dim;
        let mut acc = T::zero();
        for i in 0..k {
            for j in 0..k {
                let dot = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .fold(T::zero(), |a, (&x, &y)| a + x * y);
                let target = if i == j { T::one() } else { T::zero() };
                acc = acc + (dot - target) * (dot - target);
            }
        }
        acc.sqrt()
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> T {
        let k = self.dim;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&x, &y| {
                    a[x * k + col]
                        .abs()
                        .partial_cmp(&a[y * k + col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot * k + col] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..k {
                    a.swap(pivot * k + j, col * k + j);
                }
                det = -det;
            }
            let p = a[col * k + col];
            det = det * p;
            for r in col + 1..k {
                let factor = a[r * k + col] / p;
                for j in col..k {
                    a[r * k + j] = a[r * k + j] - factor * a[col * k + j];
                }
            }
        }
        det
    }

    /// Skew-symmetric matrix from its `k(k−1)/2` upper-triangle entries.
    pub fn skew_from_params(dim: usize, params: &[T]) -> Self {
        assert_eq!(params.len(), skew_param_count(dim), "wrong skew parameter count");
        let mut m = Self::zeros(dim);
        let mut idx = 0;
        for i in 0..dim {
            for j in i + 1..dim {
                m[(i, j)] = params[idx];
                m[(j, i)] = -params[idx];
                idx += 1;
            }
        }
        m
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn expm(&self) -> Self {
        let k = self.dim;
        let norm = self.frobenius_norm();
        let half = T::lit(0.5);
        let mut squarings = 0u32;
        let mut scaled_norm = norm;
        while scaled_norm > half {
            scaled_norm = scaled_norm * half;
            squarings += 1;
        }
        let a = self.scale(T::one() / T::lit(2f64.powi(squarings as i32)));

        let mut result = Self::identity(k);
        let mut term = Self::identity(k);
        for n in 1..=30 {
            term = term.matmul(&a).scale(T::one() / T::lit(n as f64));
            let mag = term.frobenius_norm();
            for (r, &t) in result.data.iter_mut().zip(&term.data) {
                *r = *r + t;
            }
            if mag <= T::epsilon() {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }

    /// Orthonormalizes the columns with two passes of modified Gram–Schmidt.
    ///
    /// A column that collapses to (numerically) zero is replaced by the first
    /// standard basis vector that is independent of the preceding columns.
    pub fn orthonormalize_columns(&self) -> Self {
        let k = self.dim;
        let mut cols: Vec<Vec<T>> = (0..k).map(|j| self.column(j)).collect();
        let tiny = T::epsilon().sqrt();
        for j in 0..k {
            let original = norm(&cols[j]);
            for _ in 0..2 {
                for p in 0..j {
                    let (done, rest) = cols.split_at_mut(j);
                    project_out(&mut rest[0], &done[p]);
                }
            }
            let n = norm(&cols[j]);
            if n <= tiny * original.max(T::one()) {
                cols[j] = complete_basis_vector(&cols[..j], k);
            } else {
                for x in cols[j].iter_mut() {
                    *x = *x / n;
                }
            }
        }
        Self::from_columns(&cols).expect("square by construction")
    }

    /// Singular value decomposition `self = U · diag(σ) · Vᵀ` via one-sided
    /// Jacobi rotations. Singular values are sorted descending; left singular
    /// vectors for zero singular values are completed to an orthonormal basis.
    pub fn svd(&self) -> Svd<T> {
        let k = self.dim;
        let mut w: Vec<Vec<T>> = (0..k).map(|j| self.column(j)).collect();
        let mut v: Vec<Vec<T>> = (0..k)
            .map(|j| (0..k).map(|i| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let eps = T::epsilon();

        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..k {
                for q in p + 1..k {
                    let alpha = dot(&w[p], &w[p]);
                    let beta = dot(&w[q], &w[q]);
                    let gamma = dot(&w[p], &w[q]);
                    if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    rotate_pair(&mut w, p, q, c, s);
                    rotate_pair(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }

        let mut order: Vec<usize> = (0..k).collect();
        let sigma_raw: Vec<T> = w.iter().map(|c| norm(c)).collect();
        order.sort_by(|&a, &b| {
            sigma_raw[b]
                .partial_cmp(&sigma_raw[a])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let sigma: Vec<T> = order.iter().map(|&i| sigma_raw[i]).collect();
        let sigma_max = sigma.first().copied().unwrap_or_else(T::zero);
        let cutoff = sigma_max * eps * T::lit(k.max(1) as f64 * 16.0);

        let mut u_cols: Vec<Vec<T>> = Vec::with_capacity(k);
        let mut rank = 0;
        for &i in &order {
            if sigma_raw[i] > cutoff && sigma_raw[i] > T::zero() {
                u_cols.push(w[i].iter().map(|&x| x / sigma_raw[i]).collect());
                rank += 1;
            }
        }
        while u_cols.len() < k {
            let next = complete_basis_vector(&u_cols, k);
            u_cols.push(next);
        }
        let v_cols: Vec<Vec<T>> = order.iter().map(|&i| v[i].clone()).collect();

        Svd {
            u: Self::from_columns(&u_cols).expect("square"),
            singular_values: sigma,
            v: Self::from_columns(&v_cols).expect("square"),
            rank,
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

/// Result of [`Matrix::svd`]. Columns of `u` and `v` are the singular vectors.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub singular_values: Vec<T>,
    pub v: Matrix<T>,
    /// Number of singular values above the numerical cutoff.
    pub rank: usize,
}

/// Number of free parameters of a `k×k` skew-symmetric matrix.
#[inline]
pub fn skew_param_count(dim: usize) -> usize {
    dim * dim.saturating_sub(1) / 2
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn project_out<T: Scalar>(target: &mut [T], unit: &[T]) {
    let d = dot(target, unit);
    for (t, &u) in target.iter_mut().zip(unit) {
        *t = *t - d * u;
    }
}

fn rotate_pair<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Unit vector orthogonal to every vector in `basis` (assumed orthonormal),
/// taken from the standard basis direction with the largest residual.
fn complete_basis_vector<T: Scalar>(basis: &[Vec<T>], dim: usize) -> Vec<T> {
    let mut best: Option<(T, Vec<T>)> = None;
    for e in 0..dim {
        let mut cand: Vec<T> = (0..dim)
            .map(|i| if i == e { T::one() } else { T::zero() })
            .collect();
        for _ in 0..2 {
            for b in basis {
                project_out(&mut cand, b);
            }
        }
        let n = norm(&cand);
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, cand));
        }
    }
    let (n, mut v) = best.expect("dim >= 1");
    for x in v.iter_mut() {
        *x = *x / n;
    }
    v
}
