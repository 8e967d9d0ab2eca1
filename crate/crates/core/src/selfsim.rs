use crate::series::TimeSeries;
use crate::Scalar;

/// Matrix of pairwise Euclidean distances within one time series.
///
/// Only the upper triangle is computed; the lower triangle is a mirror copy,
/// so the matrix is exactly symmetric with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SelfSimMatrix<T> {
    /// Side length `n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Entries `(i, (i + offset) % n)` for `i = 0..n`.
    pub fn wrapped_diagonal(&self, offset: usize) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, (i + offset) % self.n)).collect()
    }
}

/// Computes `ΔT = (d(t_i, t_j))_{i,j}`.
pub fn self_similarity<T: Scalar>(series: &TimeSeries<T>) -> SelfSimMatrix<T> {
    let n = series.len();
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = series.point_distance(i, j);
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    SelfSimMatrix { n, data }
}
