//! Nelder–Mead downhill simplex, used for the rotation parameters once the
//! translation has been eliminated exactly.

use crate::Scalar;

pub(crate) struct SimplexOutcome<T> {
    pub point: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct SimplexOptions<T> {
    pub initial_step: T,
    pub value_tolerance: T,
    pub point_tolerance: T,
    pub max_iterations: usize,
}

/// Minimizes `f` from `start`. Converged means both the spread of function
/// values and the simplex radius fell below their tolerances.
pub(crate) fn nelder_mead<T, F>(mut f: F, start: &[T], opts: &SimplexOptions<T>) -> SimplexOutcome<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
{
    let dim = start.len();
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let mut vertices: Vec<Vec<T>> = Vec::with_capacity(dim + 1);
    vertices.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] = v[i] + opts.initial_step;
        vertices.push(v);
    }
    let mut values: Vec<T> = vertices.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        vertices = order.iter().map(|&i| vertices[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[dim] - values[0];
        let radius = vertices[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&vertices[0]).map(|(&a, &b)| (a - b).abs()))
            .fold(T::zero(), T::max);
        if spread <= opts.value_tolerance && radius <= opts.point_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![T::zero(); dim];
        for v in &vertices[..dim] {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c = *c + x;
            }
        }
        let inv = T::one() / T::lit(dim as f64);
        centroid.iter_mut().for_each(|c| *c = *c * inv);

        let along = |coef: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&vertices[dim])
                .map(|(&c, &w)| c + coef * (c - w))
                .collect()
        };

        let reflected = along(T::one());
        let f_reflected = f(&reflected);
        if f_reflected < values[0] {
            let expanded = along(two);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                vertices[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                vertices[dim] = reflected;
                values[dim] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[dim - 1] {
            vertices[dim] = reflected;
            values[dim] = f_reflected;
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < values[dim] {
            let c = along(half);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(-half);
            let fc = f(&c);
            (c, fc)
        };
        if f_contracted < values[dim].min(f_reflected) {
            vertices[dim] = contracted;
            values[dim] = f_contracted;
            continue;
        }
        // Shrink towards the best vertex.
        let best = vertices[0].clone();
        for i in 1..=dim {
            for (x, &b) in vertices[i].iter_mut().zip(&best) {
                *x = b + half * (*x - b);
            }
            values[i] = f(&vertices[i]);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    SimplexOutcome {
        point: vertices.swap_remove(best),
        value: values[best],
        iterations,
        converged,
    }
}
