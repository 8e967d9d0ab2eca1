use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::series::TimeSeries;
use crate::Scalar;

/// Distance-preserving map `x ↦ M·x + v` with `M` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry<T> {
    rotation: Matrix<T>,
    translation: Vec<T>,
}

impl<T: Scalar> Isometry<T> {
    /// Validates orthogonality (`‖M·Mᵀ − I‖_F` within [`Scalar::ORTHOGONALITY_TOLERANCE`]).
    pub fn new(rotation: Matrix<T>, translation: Vec<T>) -> Result<Self> {
        check_dim(rotation.dim(), translation.len())?;
        if rotation.dim() == 0 {
            return Err(Error::InvalidInput("isometry dimension must be at least 1".into()));
        }
        let residual = rotation.orthogonality_residual().as_f64();
        if residual > T::ORTHOGONALITY_TOLERANCE || residual.is_nan() {
            return Err(Error::InvalidInput(format!(
                "matrix is not orthogonal: ‖M·Mᵀ − I‖_F = {residual:e}"
            )));
        }
        Ok(Self {
            rotation,
            translation,
        })
    }

    pub(crate) fn new_unchecked(rotation: Matrix<T>, translation: Vec<T>) -> Self {
        debug_assert_eq!(rotation.dim(), translation.len());
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            rotation: Matrix::identity(dim),
            translation: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn rotation(&self) -> &Matrix<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    /// `M·x + v` written into `out`.
    #[inline]
    pub fn apply_into(&self, x: &[T], out: &mut [T]) {
        self.rotation.mul_vec_into(x, out);
        for (o, &v) in out.iter_mut().zip(&self.translation) {
            *o = *o + v;
        }
    }

    pub fn apply_point(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.dim(), x.len())?;
        let mut out = vec![T::zero(); x.len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }
}

/// Applies `g` to every point: `(M·t_0 + v, …, M·t_{n−1} + v)`.
pub fn apply_isometry<T: Scalar>(series: &TimeSeries<T>, g: &Isometry<T>) -> Result<TimeSeries<T>> {
    check_dim(g.dim(), series.dim())?;
    let k = series.dim();
    let mut data = vec![T::zero(); series.as_flat().len()];
    for (p, out) in series.points().zip(data.chunks_exact_mut(k)) {
        g.apply_into(p, out);
    }
    TimeSeries::from_flat(data, k)
}

/// Seeded random orthogonal `k×k` matrix.
///
/// Orthonormalizes a Gaussian matrix, then negates the first column on a
/// seed-derived coin flip so both determinant signs occur. Not Haar-uniform.
pub fn random_orthogonal<T: Scalar>(dim: usize, seed: u64) -> Matrix<T> {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian: Vec<T> = (0..dim * dim)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            T::lit(x)
        })
        .collect();
    let mut q = Matrix::from_row_major(dim, gaussian)
        .expect("square")
        .orthonormalize_columns();
    if rng.random::<bool>() {
        for i in 0..dim {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// Random orthogonal matrix with a Gaussian translation of standard deviation
/// `translation_scale`.
pub fn random_isometry<T: Scalar>(dim: usize, seed: u64, translation_scale: f64) -> Isometry<T> {
    let rotation = random_orthogonal(dim, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let translation = (0..dim)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            T::lit(x * translation_scale)
        })
        .collect();
    Isometry::new_unchecked(rotation, translation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selfsim::self_similarity;
    use proptest::prelude::*;

    #[test]
    fn identity_leaves_series_unchanged() {
        let t = TimeSeries::new(vec![vec![1.0, 2.0], vec![-3.0, 0.5]]).unwrap();
        assert_eq!(apply_isometry(&t, &Isometry::identity(2)).unwrap(), t);
    }

    #[test]
    fn quarter_turn() {
        let t = TimeSeries::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let rot = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let g = Isometry::new(rot, vec![0.0, 0.0]).unwrap();
        let out = apply_isometry(&t, &g).unwrap();
        assert_eq!(out.to_points(), vec![vec![0.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let skewed = Matrix::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]).unwrap();
        assert!(Isometry::new(skewed, vec![0.0, 0.0]).is_err());
        assert!(Isometry::<f64>::new(Matrix::identity(2), vec![0.0]).is_err());
        let t = TimeSeries::new(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        assert!(apply_isometry(&t, &Isometry::identity(2)).is_err());
    }

    #[test]
    fn one_dimensional_orthogonal_is_sign() {
        let mut seen = [false; 2];
        for seed in 0..32 {
            let m: Matrix<f64> = random_orthogonal(1, seed);
            let x = m[(0, 0)];
            assert!(x == 1.0 || x == -1.0, "{x}");
            seen[(x > 0.0) as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn random_orthogonal_properties() {
        let mut signs = [false; 2];
        for seed in 0..64 {
            let m: Matrix<f64> = random_orthogonal(3, seed);
            assert!(m.orthogonality_residual() < 1e-9);
            let det = m.determinant();
            assert!((det.abs() - 1.0).abs() < 1e-9);
            signs[(det > 0.0) as usize] = true;
        }
        assert!(signs[0] && signs[1], "both determinant signs reachable");
        let a: Matrix<f64> = random_orthogonal(4, 17);
        let b: Matrix<f64> = random_orthogonal(4, 17);
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn self_similarity_is_isometry_invariant(
            k in 1usize..5,
            n in 1usize..20,
            seed in any::<u64>(),
            coords in prop::collection::vec(-5.0f64..5.0, 100),
        ) {
            let t = TimeSeries::from_flat(coords[..n * k].to_vec(), k).unwrap();
            let g = random_isometry::<f64>(k, seed, 3.0);
            let moved = apply_isometry(&t, &g).unwrap();
            let (a, b) = (self_similarity(&t), self_similarity(&moved));
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-9);
                }
            }
        }
    }
}
