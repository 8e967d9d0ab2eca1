//! Congruence distance `min_{M,v} Σ_i d(s_i, M·t_i + v)` over orthogonal `M`
//! and translations `v`.
//!
//! The search never leaves the orthogonal group: each start `M₀` is
//! perturbed as `M₀·exp(A)` with `A` skew-symmetric, so `det M` stays equal to
//! `det M₀` and starts of both signs are always included. For a fixed `M` the
//! best translation is the geometric median of `{s_i − M·t_i}`, computed
//! exactly, which leaves only the `k(k−1)/2` rotation parameters to a
//! Nelder–Mead search.
//!
//! The returned value is an upper bound on the true distance: the search is
//! local, and multiple starts only make a global miss less likely.

mod kabsch;
mod median;
mod oracle;
mod simplex;

pub use kabsch::kabsch_init;
pub use median::weiszfeld_median;
pub use oracle::congruence_oracle_2d;

use crate::error::{check_dim, Error, Result};
use crate::isometry::{random_orthogonal, Isometry};
use crate::linalg::{skew_param_count, Matrix};
use crate::series::{check_same_shape, dist, TimeSeries};
use crate::Scalar;

use median::geometric_median;
use simplex::{nelder_mead, SimplexOptions};

/// Tunables for [`congruence_upper`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Simplex iterations allowed per start.
    pub max_iterations: usize,
    /// A start stops once the simplex value spread drops below this.
    pub objective_tolerance: f64,
    /// Largest `‖M·Mᵀ − I‖_F` accepted for a converged result.
    pub constraint_tolerance: f64,
    /// Number of starting rotations: identity, Procrustes, then random ones.
    pub multistart_count: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            objective_tolerance: 1e-10,
            constraint_tolerance: 1e-9,
            multistart_count: 8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.multistart_count == 0 {
            return Err(Error::InvalidInput(
                "max_iterations and multistart_count must be at least 1".into(),
            ));
        }
        if !(self.objective_tolerance > 0.0 && self.constraint_tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Outcome of [`congruence_upper`].
#[derive(Debug, Clone)]
pub struct OptimizerResult<T> {
    /// Objective at `isometry`; an upper bound on the congruence distance.
    pub value: T,
    pub isometry: Isometry<T>,
    /// Simplex iterations summed over all starts.
    pub iterations_used: usize,
    /// The winning start reached its tolerances and the rotation is orthogonal
    /// within `constraint_tolerance`.
    pub converged: bool,
    pub orthogonality_residual: T,
}

/// `f(M, v) = Σ_i d(s_i, M·t_i + v)`.
pub fn objective<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>, g: &Isometry<T>) -> Result<T> {
    check_same_shape(s, t)?;
    check_dim(s.dim(), g.dim())?;
    let mut moved = vec![T::zero(); s.dim()];
    let mut total = T::zero();
    for (sp, tp) in s.points().zip(t.points()) {
        g.apply_into(tp, &mut moved);
        total = total + dist(sp, &moved);
    }
    Ok(total)
}

/// Minimizes the congruence objective by multistart local search.
///
/// Non-convergence is reported through [`OptimizerResult::converged`], not
/// as an error. Deterministic for a fixed `cfg.seed`.
pub fn congruence_upper<T: Scalar>(
    s: &TimeSeries<T>,
    t: &TimeSeries<T>,
    cfg: &OptimizerConfig,
) -> Result<OptimizerResult<T>> {
    check_same_shape(s, t)?;
    cfg.validate()?;
    let k = s.dim();
    let problem = ReducedProblem::new(s, t);

    let mut iterations_used = 0;
    let mut best: Option<(T, Matrix<T>, bool)> = None;
    for start in start_rotations(s, t, cfg)? {
        let (value, rotation, iterations, converged) = problem.local_search(&start, cfg);
        iterations_used += iterations;
        if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
            best = Some((value, rotation, converged));
        }
    }
    let (_, rotation, converged) = best.expect("at least one start");

    let translation = problem.best_translation(&rotation).0;
    let residual = rotation.orthogonality_residual();
    let isometry = Isometry::new_unchecked(rotation, translation);
    let value = objective(s, t, &isometry)?;
    debug_assert_eq!(isometry.dim(), k);
    Ok(OptimizerResult {
        value,
        converged: converged && residual.as_f64() <= cfg.constraint_tolerance,
        orthogonality_residual: residual,
        isometry,
        iterations_used,
    })
}

/// Starting rotations: identity, Procrustes, then seeded random matrices with
/// alternating determinant sign. Guarantees at least one start per sign.
fn start_rotations<T: Scalar>(
    s: &TimeSeries<T>,
    t: &TimeSeries<T>,
    cfg: &OptimizerConfig,
) -> Result<Vec<Matrix<T>>> {
    let k = s.dim();
    let mut starts = vec![Matrix::identity(k)];
    if cfg.multistart_count >= 2 {
        starts.push(kabsch_init(s, t)?.rotation().clone());
    }
    for idx in 0..cfg.multistart_count.saturating_sub(2) {
        let mut m: Matrix<T> = random_orthogonal(k, sub_seed(cfg.seed, idx as u64));
        let want_negative = idx % 2 == 0;
        if (m.determinant() < T::zero()) != want_negative {
            for i in 0..k {
                m[(i, 0)] = -m[(i, 0)];
            }
        }
        starts.push(m);
    }
    if starts.iter().all(|m| m.determinant() > T::zero()) {
        starts.push(Matrix::reflection(k));
    } else if starts.iter().all(|m| m.determinant() < T::zero()) {
        starts.push(Matrix::identity(k));
    }
    Ok(starts)
}

fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ (index.wrapping_add(1)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The objective with the translation minimized out.
struct ReducedProblem<'a, T> {
    s: &'a TimeSeries<T>,
    t: &'a TimeSeries<T>,
    median_tolerance: T,
}

impl<'a, T: Scalar> ReducedProblem<'a, T> {
    const MEDIAN_MAX_ITER: usize = 500;

    fn new(s: &'a TimeSeries<T>, t: &'a TimeSeries<T>) -> Self {
        let scale = |x: &TimeSeries<T>| {
            let c = x.centroid();
            x.points().map(|p| dist(p, &c)).fold(T::zero(), T::max)
        };
        let extent = scale(s) + scale(t) + T::one();
        Self {
            s,
            t,
            median_tolerance: extent * T::lit(1e-13),
        }
    }

    /// Geometric median of `{s_i − M·t_i}` and its cost.
    fn best_translation(&self, rotation: &Matrix<T>) -> (Vec<T>, T) {
        let k = self.s.dim();
        let mut residuals = vec![T::zero(); self.s.as_flat().len()];
        let mut moved = vec![T::zero(); k];
        for ((sp, tp), out) in self
            .s
            .points()
            .zip(self.t.points())
            .zip(residuals.chunks_exact_mut(k))
        {
            rotation.mul_vec_into(tp, &mut moved);
            for a in 0..k {
                out[a] = sp[a] - moved[a];
            }
        }
        geometric_median(&residuals, k, self.median_tolerance, Self::MEDIAN_MAX_ITER)
    }

    fn rotation_at(&self, start: &Matrix<T>, params: &[T]) -> Matrix<T> {
        let k = start.dim();
        start.matmul(&Matrix::skew_from_params(k, params).expm())
    }

    /// Local search around `start`; returns (value, rotation, iterations, converged).
    fn local_search(&self, start: &Matrix<T>, cfg: &OptimizerConfig) -> (T, Matrix<T>, usize, bool) {
        let k = start.dim();
        let n_params = skew_param_count(k);
        if n_params == 0 {
            let value = self.best_translation(start).1;
            return (value, start.clone(), 0, true);
        }

        let f = |p: &[T]| self.best_translation(&self.rotation_at(start, p)).1;
        let mut opts = SimplexOptions {
            initial_step: T::lit(0.5),
            value_tolerance: T::lit(cfg.objective_tolerance),
            point_tolerance: T::lit(1e-9),
            max_iterations: cfg.max_iterations,
        };

        let mut point = vec![T::zero(); n_params];
        let mut value = f(&point);
        let mut iterations = 0;
        let mut converged = false;
        // Restarting from the best vertex undoes premature simplex collapse.
        for _restart in 0..4 {
            let out = nelder_mead(&f, &point, &opts);
            iterations += out.iterations;
            converged = out.converged;
            let improved = value - out.value > T::lit(cfg.objective_tolerance);
            if out.value < value {
                value = out.value;
                point = out.point;
            }
            if !improved || !converged {
                break;
            }
            opts.initial_step = opts.initial_step * T::lit(0.25);
        }
        (value, self.rotation_at(start, &point), iterations, converged)
    }
}
