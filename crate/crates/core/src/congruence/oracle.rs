use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::series::{check_same_shape, TimeSeries};
use crate::Scalar;

use super::median::geometric_median;

/// Brute-force congruence distance for `k ≤ 2`, independent of the local
/// search in [`congruence_upper`](super::congruence_upper).
///
/// For `k = 2` every angle `2π·j/angle_steps` is tried for both the rotation
/// `R(θ)` and the reflection `R(θ)·diag(1, −1)`, with the translation solved
/// exactly as a geometric median. For `k = 1` the two matrices `±1` are tried.
///
/// The result is never below the true distance and exceeds it by at most
/// `(2π / angle_steps) · Σ_i ‖t_i − t̄‖`.
pub fn congruence_oracle_2d<T: Scalar>(
    s: &TimeSeries<T>,
    t: &TimeSeries<T>,
    angle_steps: usize,
) -> Result<T> {
    check_same_shape(s, t)?;
    let k = s.dim();
    if k > 2 {
        return Err(Error::InvalidInput(format!(
            "brute-force oracle supports k <= 2, got k = {k}"
        )));
    }

    let cost_of = |m: &Matrix<T>| -> T {
        let mut residuals = Vec::with_capacity(s.as_flat().len());
        for (sp, tp) in s.points().zip(t.points()) {
            let mt = m.mul_vec(tp);
            residuals.extend(sp.iter().zip(&mt).map(|(&a, &b)| a - b));
        }
        geometric_median(&residuals, k, T::lit(1e-14), 2000).1
    };

    if k == 1 {
        let plus = cost_of(&Matrix::identity(1));
        let minus = cost_of(&Matrix::reflection(1));
        return Ok(plus.min(minus));
    }
    if angle_steps == 0 {
        return Err(Error::InvalidInput("angle_steps must be at least 1".into()));
    }

    let mut best = T::infinity();
    for step in 0..angle_steps {
        let theta = T::lit(std::f64::consts::TAU * step as f64 / angle_steps as f64);
        let (sin, cos) = theta.sin_cos();
        let rotation = Matrix::from_row_major(2, vec![cos, -sin, sin, cos]).expect("2x2");
        let reflection = Matrix::from_row_major(2, vec![cos, sin, sin, -cos]).expect("2x2");
        best = best.min(cost_of(&rotation)).min(cost_of(&reflection));
    }
    Ok(best)
}
