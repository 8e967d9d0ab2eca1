use crate::error::{check_dim, Error, Result};
use crate::Scalar;

/// Ordered sequence of `n ≥ 1` points in `k`-dimensional space, `k ≥ 1`.
///
/// Points are stored contiguously (`n·k` scalars, point-major). Duplicate
/// consecutive points are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> TimeSeries<T> {
    pub fn new(points: Vec<Vec<T>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("time series needs at least one point".into()))?;
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in &points {
            check_dim(dim, p.len())?;
            data.extend_from_slice(p);
        }
        Self::from_flat(data, dim)
    }

    /// Builds a series from point-major coordinates.
    pub fn from_flat(data: Vec<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if data.is_empty() {
            return Err(Error::InvalidInput("time series needs at least one point".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    /// Convenience constructor for one-dimensional series.
    pub fn from_scalars(values: &[T]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    /// Number of points `n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Always false; kept for API symmetry with collections.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Point dimension `k`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn to_points(&self) -> Vec<Vec<T>> {
        self.points().map(<[T]>::to_vec).collect()
    }

    /// Projection onto coordinate `j`.
    pub fn projection(&self, j: usize) -> Vec<T> {
        self.points().map(|p| p[j]).collect()
    }

    pub fn centroid(&self) -> Vec<T> {
        let mut c = vec![T::zero(); self.dim];
        for p in self.points() {
            for (a, &x) in c.iter_mut().zip(p) {
                *a = *a + x;
            }
        }
        let n = T::lit(self.len() as f64);
        c.iter_mut().for_each(|a| *a = *a / n);
        c
    }

    /// Euclidean distance between points `i` and `j` of this series.
    #[inline]
    pub fn point_distance(&self, i: usize, j: usize) -> T {
        dist(self.point(i), self.point(j))
    }

    /// Polyline length `Σ d(t_i, t_{i+1})`.
    pub fn arc_length(&self) -> T {
        (1..self.len()).map(|i| self.point_distance(i - 1, i)).sum()
    }
}

/// Errors unless both series have the same length and dimension.
pub(crate) fn check_same_shape<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<()> {
    check_dim(s.dim(), t.dim())?;
    if s.len() != t.len() {
        return Err(Error::LengthMismatch {
            left: s.len(),
            right: t.len(),
        });
    }
    Ok(())
}

/// Euclidean distance `‖a − b‖₂`.
pub fn euclid<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    check_dim(a.len(), b.len())?;
    Ok(dist(a, b))
}

#[inline]
pub(crate) fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| {
            let d = x - y;
            acc + d * d
        })
        .sqrt()
}
