//! Constant-speed reinterpolation ("dewarping") of a trajectory.
//!
//! Output points lie on the input polyline, start and end at its endpoints,
//! and consecutive output points are the same Euclidean distance apart.
//!
//! Positions start at uniform arc-length spacing and are corrected by damped
//! Newton steps on the chord differences (the Jacobian is tridiagonal).
//!
//! Equal chords through both endpoints do not always exist: a 1-D path
//! 0 → 1 → 0 has no 4-point sampling with equal steps. When Newton fails,
//! points are marched along the path with the longest common chord that still
//! fits `m` points; the last point then stops short of the final vertex.

use crate::error::{Error, Result};
use crate::series::{dist, TimeSeries};
use crate::Scalar;

/// Resamples `series` to `m` points at equal spacing along its path.
///
/// A series of zero length (all points equal) yields `m` copies of its first
/// point.
pub fn arc_length_resample<T: Scalar>(series: &TimeSeries<T>, m: usize) -> Result<TimeSeries<T>> {
    if m < 2 || series.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "resampling needs at least 2 input and 2 output points (got {} -> {m})",
            series.len()
        )));
    }
    let k = series.dim();
    let first = series.point(0);
    let last = series.point(series.len() - 1);
    let path = Polyline::new(series);
    if path.total == T::zero() {
        return TimeSeries::from_flat(first.repeat(m), k);
    }
    if m == 2 {
        return TimeSeries::from_flat([first, last].concat(), k);
    }

    let tolerance = path.total * T::lit(1e-13);
    let points = match equalize_chords(&path, m, tolerance) {
        Ok((points, _)) => points,
        Err((newton, newton_spread)) => {
            let marched = shoot(series, m);
            if chord_spread(&marched, k) <= newton_spread {
                marched
            } else {
                newton
            }
        }
    };
    TimeSeries::from_flat(points, k)
}

/// Arc-length parameterization of a polyline.
struct Polyline<'a, T> {
    series: &'a TimeSeries<T>,
    /// `cumulative[i]` is the path length up to vertex `i`.
    cumulative: Vec<T>,
    total: T,
}

impl<'a, T: Scalar> Polyline<'a, T> {
    fn new(series: &'a TimeSeries<T>) -> Self {
        let mut cumulative = Vec::with_capacity(series.len());
        let mut acc = T::zero();
        cumulative.push(acc);
        for i in 1..series.len() {
            acc = acc + series.point_distance(i - 1, i);
            cumulative.push(acc);
        }
        Self {
            series,
            cumulative,
            total: acc,
        }
    }

    /// Point at arc position `s` and the unit tangent of its segment.
    fn locate(&self, s: T) -> (Vec<T>, Vec<T>) {
        let s = s.max(T::zero()).min(self.total);
        let last_seg = self.series.len() - 2;
        // First non-degenerate segment whose end is at or beyond `s`.
        let mut seg = self.cumulative.partition_point(|&c| c < s).saturating_sub(1).min(last_seg);
        while seg < last_seg && self.cumulative[seg + 1] <= self.cumulative[seg] {
            seg += 1;
        }
        while seg > 0 && self.cumulative[seg + 1] <= self.cumulative[seg] {
            seg -= 1;
        }
        let a = self.series.point(seg);
        let b = self.series.point(seg + 1);
        let len = self.cumulative[seg + 1] - self.cumulative[seg];
        if len <= T::zero() {
            return (a.to_vec(), vec![T::zero(); a.len()]);
        }
        let u = ((s - self.cumulative[seg]) / len).max(T::zero()).min(T::one());
        let point = a.iter().zip(b).map(|(&x, &y)| x + u * (y - x)).collect();
        let tangent = a.iter().zip(b).map(|(&x, &y)| (y - x) / len).collect();
        (point, tangent)
    }
}

/// Largest difference between consecutive chord lengths.
fn chord_spread<T: Scalar>(points: &[T], k: usize) -> T {
    let chords: Vec<T> = points
        .chunks_exact(k)
        .zip(points.chunks_exact(k).skip(1))
        .map(|(a, b)| dist(a, b))
        .collect();
    chords
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(T::zero(), T::max)
}

/// Newton iteration for interior arc positions `a_1 … a_{m−2}` such that all
/// chords `‖γ(a_i) − γ(a_{i−1})‖` are equal. On failure returns the best
/// points found with their chord spread.
fn equalize_chords<T: Scalar>(
    path: &Polyline<'_, T>,
    m: usize,
    tolerance: T,
) -> std::result::Result<(Vec<T>, T), (Vec<T>, T)> {
    let k = path.series.dim();
    let total = path.total;
    let step = total / T::lit((m - 1) as f64);
    let mut positions: Vec<T> = (0..m).map(|i| step * T::lit(i as f64)).collect();
    positions[m - 1] = total;

    let evaluate = |positions: &[T]| {
        let located: Vec<(Vec<T>, Vec<T>)> = positions.iter().map(|&s| path.locate(s)).collect();
        let chords: Vec<T> = located.windows(2).map(|w| dist(&w[0].0, &w[1].0)).collect();
        let residual: Vec<T> = chords.windows(2).map(|w| w[0] - w[1]).collect();
        let worst = residual.iter().fold(T::zero(), |a, r| a.max(r.abs()));
        (located, chords, residual, worst)
    };
    let flatten = |located: &[(Vec<T>, Vec<T>)]| -> Vec<T> {
        let mut out: Vec<T> = located.iter().flat_map(|(p, _)| p.iter().copied()).collect();
        out[..k].copy_from_slice(path.series.point(0));
        let tail = out.len() - k;
        out[tail..].copy_from_slice(path.series.point(path.series.len() - 1));
        out
    };

    let (mut located, mut chords, mut residual, mut worst) = evaluate(&positions);
    let unknowns = m - 2;
    for _ in 0..100 {
        if worst <= tolerance {
            return Ok((flatten(&located), worst));
        }
        // Unit chord directions u_i for chords 1..m−1 (index i−1 here).
        let units: Vec<Vec<T>> = located
            .windows(2)
            .zip(&chords)
            .map(|(w, &c)| {
                if c > T::zero() {
                    w[1].0.iter().zip(&w[0].0).map(|(&b, &a)| (b - a) / c).collect()
                } else {
                    vec![T::zero(); k]
                }
            })
            .collect();
        let dot = crate::linalg::dot::<T>;
        // Row r (unknown a_{r+1}): residual c_{r+1} − c_{r+2}.
        let mut lower = vec![T::zero(); unknowns];
        let mut diag = vec![T::zero(); unknowns];
        let mut upper = vec![T::zero(); unknowns];
        for r in 0..unknowns {
            let i = r + 1;
            let tangent = &located[i].1;
            diag[r] = dot(&units[i - 1], tangent) + dot(&units[i], tangent);
            if r > 0 {
                lower[r] = -dot(&units[i - 1], &located[i - 1].1);
            }
            if r + 1 < unknowns {
                upper[r] = -dot(&units[i], &located[i + 1].1);
            }
        }
        let Some(delta) = solve_tridiagonal(&lower, &diag, &upper, &residual) else {
            break;
        };

        let mut damping = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = positions.clone();
            for r in 0..unknowns {
                trial[r + 1] = positions[r + 1] - damping * delta[r];
            }
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered {
                let next = evaluate(&trial);
                if next.3 < worst {
                    positions = trial;
                    (located, chords, residual, worst) = next;
                    accepted = true;
                    break;
                }
            }
            damping = damping * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    if worst <= tolerance {
        Ok((flatten(&located), worst))
    } else {
        Err((flatten(&located), worst))
    }
}

/// Thomas algorithm; `None` on a vanishing pivot.
fn solve_tridiagonal<T: Scalar>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Option<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let tiny = T::epsilon();
    for i in 0..n {
        let denom = diag[i] - if i > 0 { lower[i] * c[i - 1] } else { T::zero() };
        if denom.abs() <= tiny || denom.is_nan() {
            return None;
        }
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - if i > 0 { lower[i] * d[i - 1] } else { T::zero() }) / denom;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    d.iter().all(|x| x.is_finite()).then_some(d)
}

/// Longest common chord for which [`march`] fits `m` points, found by
/// bisection, and the marched points.
fn shoot<T: Scalar>(series: &TimeSeries<T>, m: usize) -> Vec<T> {
    let steps = m - 1;
    let mut hi = series.arc_length() / T::lit(steps as f64);
    let mut lo = T::zero();
    match march(series, hi, steps) {
        Some(points) => points,
        None => {
            let mut best = march(series, lo, steps).expect("zero chord always fits");
            for _ in 0..200 {
                let mid = (lo + hi) * T::lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                match march(series, mid, steps) {
                    Some(p) => {
                        lo = mid;
                        best = p;
                    }
                    None => hi = mid,
                }
            }
            best
        }
    }
}

/// Places `steps` points after the first vertex, each exactly `chord` away
/// from its predecessor at the first such location further along the path.
/// Returns `None` if the path ends first.
fn march<T: Scalar>(series: &TimeSeries<T>, chord: T, steps: usize) -> Option<Vec<T>> {
    let k = series.dim();
    let n = series.len();
    let mut out = Vec::with_capacity((steps + 1) * k);
    out.extend_from_slice(series.point(0));
    if chord <= T::zero() {
        return Some(series.point(0).repeat(steps + 1));
    }
    let mut current = series.point(0).to_vec();
    let mut segment = 0usize;
    let mut along = T::zero();
    let chord_sq = chord * chord;

    for _ in 0..steps {
        let mut placed = false;
        while segment + 1 < n {
            let a = series.point(segment);
            let b = series.point(segment + 1);
            if dist(b, &current) < chord {
                segment += 1;
                along = T::zero();
                continue;
            }
            let dir: Vec<T> = b.iter().zip(a).map(|(&x, &y)| x - y).collect();
            let off: Vec<T> = a.iter().zip(&current).map(|(&x, &y)| x - y).collect();
            let qa = crate::linalg::dot(&dir, &dir);
            let qb = crate::linalg::dot(&off, &dir);
            let qc = crate::linalg::dot(&off, &off) - chord_sq;
            let disc = (qb * qb - qa * qc).max(T::zero()).sqrt();
            // Larger root of qa·τ² + 2·qb·τ + qc, computed without cancellation.
            let tau = if qb <= T::zero() {
                (disc - qb) / qa
            } else {
                let q = -(qb + disc);
                if q == T::zero() {
                    T::one()
                } else {
                    qc / q
                }
            };
            let tau = tau.max(along).min(T::one());
            current = a.iter().zip(&dir).map(|(&x, &d)| x + tau * d).collect();
            along = tau;
            out.extend_from_slice(&current);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(out)
}
