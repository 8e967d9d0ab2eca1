use crate::congruence::objective;
use crate::error::Result;
use crate::isometry::Isometry;
use crate::linalg::Matrix;
use crate::series::{check_same_shape, TimeSeries};
use crate::Scalar;

/// Closed-form minimizer of the squared analogue `Σ ‖s_i − (M·t_i + v)‖²`
/// (orthogonal Procrustes), used to seed the L1 search.
///
/// Both determinant branches `V·Uᵀ` and `V·D·Uᵀ` (smallest singular direction
/// flipped) are scored with the L1 objective and the better one is kept, the
/// proper branch on ties. Rank-deficient covariances are completed to a full
/// orthonormal basis, so a constant `t` yields `M = I`, `v = s̄ − t_0`.
pub fn kabsch_init<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<Isometry<T>> {
    check_same_shape(s, t)?;
    let k = s.dim();
    let s_mean = s.centroid();
    let t_mean = t.centroid();

    let mut cov = Matrix::<T>::zeros(k);
    for (sp, tp) in s.points().zip(t.points()) {
        for a in 0..k {
            let ta = tp[a] - t_mean[a];
            for b in 0..k {
                cov[(a, b)] = cov[(a, b)] + ta * (sp[b] - s_mean[b]);
            }
        }
    }

    let svd = cov.svd();
    let ut = svd.u.transpose();
    let proper = svd.v.matmul(&ut);
    let mut flipped_v = svd.v.clone();
    for i in 0..k {
        flipped_v[(i, k - 1)] = -flipped_v[(i, k - 1)];
    }
    let flipped = flipped_v.matmul(&ut);

    let candidate = |m: Matrix<T>| -> Result<(T, Isometry<T>)> {
        let mt = m.mul_vec(&t_mean);
        let v = s_mean.iter().zip(&mt).map(|(&a, &b)| a - b).collect();
        let iso = Isometry::new(m, v)?;
        Ok((objective(s, t, &iso)?, iso))
    };
    let (c1, g1) = candidate(proper)?;
    let (c2, g2) = candidate(flipped)?;
    Ok(if c2 < c1 { g2 } else { g1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{apply_isometry, random_isometry};

    fn sample(k: usize, n: usize, phase: f64) -> TimeSeries<f64> {
        let data = (0..n * k)
            .map(|i| ((i as f64 + phase) * 0.91).sin() * 2.0 + (i as f64 * 0.13).cos())
            .collect();
        TimeSeries::from_flat(data, k).unwrap()
    }

    #[test]
    fn identical_series() {
        let s = sample(3, 10, 0.0);
        let g = kabsch_init(&s, &s).unwrap();
        assert!(objective(&s, &s, &g).unwrap() <= 1e-9);
    }

    #[test]
    fn recovers_rigid_motion_in_every_dimension() {
        for k in 1..=5 {
            for seed in 0..10 {
                let t = sample(k, 12, seed as f64);
                let g = random_isometry::<f64>(k, seed, 5.0);
                let s = apply_isometry(&t, &g).unwrap();
                let found = kabsch_init(&s, &t).unwrap();
                assert!(objective(&s, &t, &found).unwrap() <= 1e-9, "k={k} seed={seed}");
                assert!(found.rotation().orthogonality_residual() <= 1e-9);
            }
        }
    }

    #[test]
    fn constant_target_policy() {
        let s = sample(2, 5, 1.0);
        let t = TimeSeries::new(vec![vec![3.0, -1.0]; 5]).unwrap();
        let g = kabsch_init(&s, &t).unwrap();
        assert_eq!(g.rotation(), &Matrix::identity(2));
        let c = s.centroid();
        assert!((g.translation()[0] - (c[0] - 3.0)).abs() < 1e-12);
        assert!((g.translation()[1] - (c[1] + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn collinear_series_stay_orthogonal() {
        let u = 5f64.sqrt();
        let s = TimeSeries::new((0..6).map(|i| vec![i as f64 / u, 2.0 * i as f64 / u, 0.0]).collect())
            .unwrap();
        let t = TimeSeries::new((0..6).map(|i| vec![0.0, 0.0, i as f64]).collect()).unwrap();
        let g = kabsch_init(&s, &t).unwrap();
        assert!(g.rotation().orthogonality_residual() <= 1e-9);
        assert!(objective(&s, &t, &g).unwrap() < 1e-9);
    }
}
