//! Geometric median by Weiszfeld iteration with the Vardi–Zhang correction
//! for iterates that land on a data point.

use crate::error::{Error, Result};
use crate::series::dist;
use crate::Scalar;

/// Point minimizing `Σ_i ‖p_i − v‖`.
///
/// When several points are optimal (e.g. two points, any location on the
/// segment) one of them is returned; only the cost is well defined.
pub fn weiszfeld_median<T: Scalar>(points: &[Vec<T>], tolerance: T, max_iter: usize) -> Result<Vec<T>> {
    let dim = points
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidInput("geometric median of an empty set".into()))?;
    let mut flat = Vec::with_capacity(points.len() * dim);
    for p in points {
        crate::error::check_dim(dim, p.len())?;
        flat.extend_from_slice(p);
    }
    if dim == 0 {
        return Ok(Vec::new());
    }
    Ok(geometric_median(&flat, dim, tolerance, max_iter).0)
}

/// Returns the median and its cost for point-major `data`.
pub(crate) fn geometric_median<T: Scalar>(
    data: &[T],
    dim: usize,
    tolerance: T,
    max_iter: usize,
) -> (Vec<T>, T) {
    let n = data.len() / dim;
    let point = |i: usize| &data[i * dim..(i + 1) * dim];
    if n == 1 {
        return (point(0).to_vec(), T::zero());
    }

    let scale = data.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    let coincide = T::epsilon() * T::lit(16.0) * (T::one() + scale);

    // The optimum is frequently a data point (the subgradient condition
    // ‖R_j‖ ≤ multiplicity holds there); Weiszfeld converges slowly to such
    // points, so test the cheapest data point first.
    let mut best_j = 0;
    let mut best_point_cost = T::infinity();
    for j in 0..n {
        let c = (0..n).map(|i| dist(point(i), point(j))).sum::<T>();
        if c < best_point_cost {
            best_point_cost = c;
            best_j = j;
        }
    }
    let anchor = point(best_j).to_vec();
    let (pull, multiplicity) = resultant(data, dim, &anchor, coincide);
    if crate::linalg::norm(&pull) <= T::lit(multiplicity as f64) {
        return (anchor, best_point_cost);
    }

    let mut y = centroid(data, dim);
    let mut best = (anchor, best_point_cost);
    let mut next = vec![T::zero(); dim];
    for _ in 0..max_iter {
        let mut weight_sum = T::zero();
        let mut weighted = vec![T::zero(); dim];
        let mut pull = vec![T::zero(); dim];
        let mut multiplicity = 0usize;
        let mut cost = T::zero();
        for i in 0..n {
            let p = point(i);
            let d = dist(p, &y);
            cost = cost + d;
            if d <= coincide {
                multiplicity += 1;
                continue;
            }
            let w = T::one() / d;
            weight_sum = weight_sum + w;
            for a in 0..dim {
                weighted[a] = weighted[a] + w * p[a];
                pull[a] = pull[a] + w * (p[a] - y[a]);
            }
        }
        if cost < best.1 {
            best = (y.clone(), cost);
        }
        if weight_sum == T::zero() {
            break;
        }
        let gamma = if multiplicity == 0 {
            T::zero()
        } else {
            let r = crate::linalg::norm(&pull);
            if r <= T::lit(multiplicity as f64) {
                break;
            }
            T::lit(multiplicity as f64) / r
        };
        for a in 0..dim {
            next[a] = (T::one() - gamma) * weighted[a] / weight_sum + gamma * y[a];
        }
        let step = dist(&next, &y);
        std::mem::swap(&mut y, &mut next);
        if step <= tolerance {
            break;
        }
    }
    let final_cost = (0..n).map(|i| dist(point(i), &y)).sum::<T>();
    if final_cost < best.1 {
        best = (y, final_cost);
    }
    best
}

/// Sum of unit vectors from `at` towards every non-coincident point, and the
/// number of points coinciding with `at`.
fn resultant<T: Scalar>(data: &[T], dim: usize, at: &[T], coincide: T) -> (Vec<T>, usize) {
    let mut pull = vec![T::zero(); dim];
    let mut multiplicity = 0;
    for p in data.chunks_exact(dim) {
        let d = dist(p, at);
        if d <= coincide {
            multiplicity += 1;
            continue;
        }
        for a in 0..dim {
            pull[a] = pull[a] + (p[a] - at[a]) / d;
        }
    }
    (pull, multiplicity)
}

fn centroid<T: Scalar>(data: &[T], dim: usize) -> Vec<T> {
    let n = T::lit((data.len() / dim) as f64);
    let mut c = vec![T::zero(); dim];
    for p in data.chunks_exact(dim) {
        for a in 0..dim {
            c[a] = c[a] + p[a];
        }
    }
    c.iter_mut().for_each(|x| *x = *x / n);
    c
}
