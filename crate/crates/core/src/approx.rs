//! Lower bounds on the congruence distance computed from self-similarity
//! matrices, and the DTW baseline.
//!
//! Every bound rests on the same inequality: for any orthogonal `M` and any
//! translation `v`,
//!
//! ```text
//! |d(s_i, s_j) − d(t_i, t_j)| ≤ d(s_i, M·t_i + v) + d(s_j, M·t_j + v)
//! ```
//!
//! so any selection of index pairs in which each index is charged a bounded
//! number of times yields a lower bound on `Σ_i d(s_i, M·t_i + v)`.
//!
//! | function                          | selection                                   | cost        |
//! |-----------------------------------|---------------------------------------------|-------------|
//! | [`delta_distance`]                | best cyclic diagonal, halved                | `O(n²k)`    |
//! | [`fast_delta_distance`]           | best power-of-two cyclic diagonal, halved   | `O(nk log n)` |
//! | [`greedy_delta_distance`]         | greedy disjoint pairs over all `i < j`      | `O(n² log n)` |
//! | [`fast_greedy_delta_distance`]    | greedy disjoint pairs with `j − i = 2^m`    | `O(n log² n)` |
//!
//! Only [`delta_distance`] is a pseudo-metric.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::selfsim::SelfSimMatrix;
use crate::series::{check_same_shape, dist, TimeSeries};
use crate::Scalar;

/// Index pair `i < j` scored by `|d(s_i, s_j) − d(t_i, t_j)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredPair<T> {
    pub i: usize,
    pub j: usize,
    pub score: T,
}

/// The four self-similarity lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approximation {
    Delta,
    FastDelta,
    Greedy,
    FastGreedy,
}

impl Approximation {
    pub const ALL: [Approximation; 4] = [
        Approximation::Delta,
        Approximation::FastDelta,
        Approximation::Greedy,
        Approximation::FastGreedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Approximation::Delta => "delta",
            Approximation::FastDelta => "fast-delta",
            Approximation::Greedy => "greedy",
            Approximation::FastGreedy => "fast-greedy",
        }
    }

    pub fn evaluate<T: Scalar>(self, s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<T> {
        match self {
            Approximation::Delta => delta_distance(s, t),
            Approximation::FastDelta => fast_delta_distance(s, t),
            Approximation::Greedy => greedy_delta_distance(s, t),
            Approximation::FastGreedy => fast_greedy_delta_distance(s, t),
        }
    }
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approximation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Approximation::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown approximation `{s}`")))
    }
}

/// `Σ_i |d(s_i, s_{(i+δ)%n}) − d(t_i, t_{(i+δ)%n})|`.
pub(crate) fn diagonal_sum<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>, offset: usize) -> T {
    let n = s.len();
    let mut acc = T::zero();
    for i in 0..n {
        let j = (i + offset) % n;
        acc = acc + (s.point_distance(i, j) - t.point_distance(i, j)).abs();
    }
    acc
}

/// Delta distance: half the largest L1 difference between corresponding
/// wrapped diagonals of `ΔS` and `ΔT`.
///
/// Returns 0 for single-point series. The diagonals at offsets `δ` and `n − δ`
/// hold the same entries, so only `δ ≤ n/2` is visited.
pub fn delta_distance<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<T> {
    check_same_shape(s, t)?;
    let n = s.len();
    let best = (1..=n / 2)
        .map(|offset| diagonal_sum(s, t, offset))
        .fold(T::zero(), T::max);
    Ok(best * T::lit(0.5))
}

/// Delta distance restricted to power-of-two offsets `δ ∈ {1, 2, 4, …} ∩ (0, n)`.
///
/// Never exceeds [`delta_distance`]. Only the `O(n log n)` needed distances are
/// evaluated.
pub fn fast_delta_distance<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<T> {
    check_same_shape(s, t)?;
    let best = powers_of_two_below(s.len())
        .map(|offset| diagonal_sum(s, t, offset))
        .fold(T::zero(), T::max);
    Ok(best * T::lit(0.5))
}

/// [`delta_distance`] on precomputed self-similarity matrices, useful when the
/// matrices are cached across many comparisons.
pub fn delta_distance_from_matrices<T: Scalar>(
    ds: &SelfSimMatrix<T>,
    dt: &SelfSimMatrix<T>,
) -> Result<T> {
    if ds.len() != dt.len() {
        return Err(Error::LengthMismatch {
            left: ds.len(),
            right: dt.len(),
        });
    }
    let n = ds.len();
    let mut best = T::zero();
    for offset in 1..n {
        let mut acc = T::zero();
        for i in 0..n {
            let j = (i + offset) % n;
            acc = acc + (ds.get(i, j) - dt.get(i, j)).abs();
        }
        best = best.max(acc);
    }
    Ok(best * T::lit(0.5))
}

/// All pairs `0 ≤ i < j < n` with their scores.
pub fn scored_pairs<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<Vec<ScoredPair<T>>> {
    check_same_shape(s, t)?;
    let n = s.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(score(s, t, i, j));
        }
    }
    Ok(pairs)
}

/// Pairs `(i, i + 2^m)` with `i + 2^m ≤ n − 1`, with their scores.
pub fn power_of_two_pairs<T: Scalar>(
    s: &TimeSeries<T>,
    t: &TimeSeries<T>,
) -> Result<Vec<ScoredPair<T>>> {
    check_same_shape(s, t)?;
    let n = s.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for offset in powers_of_two_below(n - i) {
            pairs.push(score(s, t, i, i + offset));
        }
    }
    Ok(pairs)
}

/// Greedy delta distance: sort all pair scores descending and sum them
/// greedily, skipping any pair that touches an already used index.
pub fn greedy_delta_distance<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<T> {
    let pairs = scored_pairs(s, t)?;
    Ok(greedy_select(s.len(), pairs))
}

/// Greedy selection over pairs whose temporal gap `j − i` is a power of two.
pub fn fast_greedy_delta_distance<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<T> {
    let pairs = power_of_two_pairs(s, t)?;
    Ok(greedy_select(s.len(), pairs))
}

/// Sums disjoint pairs in descending score order. Ties are broken by `(i, j)`
/// ascending so the result is independent of the sort implementation.
pub fn greedy_select<T: Scalar>(n: usize, mut pairs: Vec<ScoredPair<T>>) -> T {
    pairs.sort_unstable_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| (a.i, a.j).cmp(&(b.i, b.j)))
    });
    let mut used = vec![false; n];
    let mut free = n;
    let mut total = T::zero();
    for p in pairs {
        if free < 2 || p.score <= T::zero() {
            break;
        }
        if used[p.i] || used[p.j] {
            continue;
        }
        used[p.i] = true;
        used[p.j] = true;
        free -= 2;
        total = total + p.score;
    }
    total
}

/// Dynamic time warping with Euclidean local cost and steps
/// `(i+1, j)`, `(i, j+1)`, `(i+1, j+1)`. Lengths may differ.
pub fn dtw_distance<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>) -> Result<T> {
    check_dim(s.dim(), t.dim())?;
    let m = t.len();
    let inf = T::infinity();
    let mut prev = vec![inf; m + 1];
    let mut curr = vec![inf; m + 1];
    prev[0] = T::zero();
    for si in s.points() {
        curr[0] = inf;
        for j in 1..=m {
            let cost = dist(si, t.point(j - 1));
            let best = prev[j].min(curr[j - 1]).min(prev[j - 1]);
            curr[j] = cost + best;
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m])
}

#[inline]
fn score<T: Scalar>(s: &TimeSeries<T>, t: &TimeSeries<T>, i: usize, j: usize) -> ScoredPair<T> {
    ScoredPair {
        i,
        j,
        score: (s.point_distance(i, j) - t.point_distance(i, j)).abs(),
    }
}

/// `1, 2, 4, …` strictly below `bound`.
fn powers_of_two_below(bound: usize) -> impl Iterator<Item = usize> {
    std::iter::successors(Some(1usize), |&p| p.checked_mul(2)).take_while(move |&p| p < bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{apply_isometry, random_isometry};
    use crate::selfsim::self_similarity;
    use proptest::prelude::*;

    fn pair2() -> (TimeSeries<f64>, TimeSeries<f64>) {
        (
            TimeSeries::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap(),
            TimeSeries::new(vec![vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap(),
        )
    }

    fn six_point_pair() -> (TimeSeries<f64>, TimeSeries<f64>) {
        (
            TimeSeries::from_scalars(&[0.0; 6]).unwrap(),
            TimeSeries::from_scalars(&[0.0, 0.0, 0.0, 3.0, 3.0, 3.0]).unwrap(),
        )
    }

    /// Definition-level brute force: every offset, every entry, from full matrices.
    fn delta_brute(s: &TimeSeries<f64>, t: &TimeSeries<f64>, powers_only: bool) -> f64 {
        let (ds, dt) = (self_similarity(s), self_similarity(t));
        let n = s.len();
        let mut best = 0.0f64;
        for offset in 1..n {
            if powers_only && !offset.is_power_of_two() {
                continue;
            }
            let sum: f64 = (0..n)
                .map(|i| (ds.get(i, (i + offset) % n) - dt.get(i, (i + offset) % n)).abs())
                .sum();
            best = best.max(sum);
        }
        best / 2.0
    }

    #[test]
    fn length_two_pair() {
        let (s, t) = pair2();
        for a in Approximation::ALL {
            assert_eq!(a.evaluate(&s, &t).unwrap(), 1.0, "{a}");
        }
    }

    #[test]
    fn six_point_pair_values() {
        let (s, t) = six_point_pair();
        assert_eq!(delta_distance(&s, &t).unwrap(), 9.0);
        assert_eq!(fast_delta_distance(&s, &t).unwrap(), 6.0);
        assert_eq!(greedy_delta_distance(&s, &t).unwrap(), 9.0);
        assert_eq!(fast_greedy_delta_distance(&s, &t).unwrap(), 6.0);
    }

    #[test]
    fn identical_and_single_point_series_give_zero() {
        let s = TimeSeries::new(vec![vec![1.0, 2.0], vec![0.5, -1.0], vec![3.0, 3.0]]).unwrap();
        let one = TimeSeries::new(vec![vec![4.0, 4.0]]).unwrap();
        let other = TimeSeries::new(vec![vec![-1.0, 7.0]]).unwrap();
        for a in Approximation::ALL {
            assert_eq!(a.evaluate(&s, &s).unwrap(), 0.0);
            assert_eq!(a.evaluate(&one, &other).unwrap(), 0.0);
        }
        assert_eq!(dtw_distance(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let (s, _) = pair2();
        let longer = TimeSeries::new(vec![vec![0.0, 0.0]; 3]).unwrap();
        let flat = TimeSeries::from_scalars(&[0.0, 1.0]).unwrap();
        for a in Approximation::ALL {
            assert!(matches!(a.evaluate(&s, &longer), Err(Error::LengthMismatch { .. })));
            assert!(matches!(a.evaluate(&s, &flat), Err(Error::DimensionMismatch { .. })));
        }
        assert!(dtw_distance(&s, &flat).is_err());
        assert!(dtw_distance(&s, &longer).is_ok());
    }

    #[test]
    fn dtw_examples() {
        let s = TimeSeries::from_scalars(&[0.0, 1.0, 2.0]).unwrap();
        let t = TimeSeries::from_scalars(&[0.0, 2.0]).unwrap();
        assert_eq!(dtw_distance(&s, &t).unwrap(), 1.0);
        let s = TimeSeries::from_scalars(&[0.0, 0.0]).unwrap();
        let t = TimeSeries::from_scalars(&[5.0]).unwrap();
        assert_eq!(dtw_distance(&s, &t).unwrap(), 10.0);
    }

    #[test]
    fn fast_greedy_only_uses_power_of_two_gaps() {
        let (s, t) = six_point_pair();
        let pairs = power_of_two_pairs(&s, &t).unwrap();
        let gaps: Vec<(usize, usize)> = pairs.iter().map(|p| (p.i, p.j)).collect();
        assert_eq!(
            gaps,
            vec![
                (0, 1), (0, 2), (0, 4),
                (1, 2), (1, 3), (1, 5),
                (2, 3), (2, 4),
                (3, 4), (3, 5),
                (4, 5),
            ]
        );
    }

    #[test]
    fn matrix_route_matches_point_route() {
        let s = TimeSeries::from_scalars(&[0.0, 2.0, -1.0, 4.0, 0.5]).unwrap();
        let t = TimeSeries::from_scalars(&[1.0, 1.0, 3.0, -2.0, 0.0]).unwrap();
        let a: f64 = delta_distance(&s, &t).unwrap();
        let b = delta_distance_from_matrices(&self_similarity(&s), &self_similarity(&t)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn approximations_work_in_single_precision() {
        let s = TimeSeries::from_scalars(&[0.0f32; 6]).unwrap();
        let t = TimeSeries::from_scalars(&[0.0f32, 0.0, 0.0, 3.0, 3.0, 3.0]).unwrap();
        assert_eq!(greedy_delta_distance(&s, &t).unwrap(), 9.0f32);
        assert_eq!(fast_delta_distance(&s, &t).unwrap(), 6.0f32);
    }

    fn series_strategy() -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>, Vec<f64>)> {
        (1usize..4, 1usize..24).prop_flat_map(|(k, n)| {
            let v = || prop::collection::vec(-3.0f64..3.0, n * k);
            (Just(k), Just(n), v(), v(), v())
        })
    }

    proptest! {
        #[test]
        fn delta_matches_brute_force((k, _n, a, b, _c) in series_strategy()) {
            let s = TimeSeries::from_flat(a, k).unwrap();
            let t = TimeSeries::from_flat(b, k).unwrap();
            prop_assert!((delta_distance(&s, &t).unwrap() - delta_brute(&s, &t, false)).abs() < 1e-9);
            prop_assert!((fast_delta_distance(&s, &t).unwrap() - delta_brute(&s, &t, true)).abs() < 1e-9);
        }

        #[test]
        fn fast_delta_never_exceeds_delta((k, _n, a, b, _c) in series_strategy()) {
            let s = TimeSeries::from_flat(a, k).unwrap();
            let t = TimeSeries::from_flat(b, k).unwrap();
            prop_assert!(fast_delta_distance(&s, &t).unwrap() <= delta_distance(&s, &t).unwrap() + 1e-12);
        }

        #[test]
        fn delta_triangle_inequality((k, _n, a, b, c) in series_strategy()) {
            let r = TimeSeries::from_flat(a, k).unwrap();
            let s = TimeSeries::from_flat(b, k).unwrap();
            let t = TimeSeries::from_flat(c, k).unwrap();
            let rt = delta_distance(&r, &t).unwrap();
            let rs = delta_distance(&r, &s).unwrap();
            let st = delta_distance(&s, &t).unwrap();
            prop_assert!(rt <= rs + st + 1e-9);
        }

        #[test]
        fn symmetric_under_swap((k, _n, a, b, _c) in series_strategy()) {
            let s = TimeSeries::from_flat(a, k).unwrap();
            let t = TimeSeries::from_flat(b, k).unwrap();
            for ap in Approximation::ALL {
                let x = ap.evaluate(&s, &t).unwrap();
                let y = ap.evaluate(&t, &s).unwrap();
                prop_assert!((x - y).abs() <= 1e-12, "{}: {} vs {}", ap, x, y);
            }
        }

        #[test]
        fn invariant_under_isometries((k, _n, a, b, _c) in series_strategy(), seed in any::<u64>()) {
            let s = TimeSeries::from_flat(a, k).unwrap();
            let t = TimeSeries::from_flat(b, k).unwrap();
            let g = random_isometry::<f64>(k, seed, 2.0);
            let h = random_isometry::<f64>(k, seed.wrapping_add(1), 2.0);
            let gs = apply_isometry(&s, &g).unwrap();
            let ht = apply_isometry(&t, &h).unwrap();
            for ap in Approximation::ALL {
                let base = ap.evaluate(&s, &t).unwrap();
                prop_assert!((ap.evaluate(&gs, &t).unwrap() - base).abs() <= 1e-9);
                prop_assert!((ap.evaluate(&s, &ht).unwrap() - base).abs() <= 1e-9);
                prop_assert!(ap.evaluate(&s, &gs).unwrap() <= 1e-9);
            }
        }

        #[test]
        fn wrapped_diagonals_pair_up((k, n, a, b, _c) in series_strategy()) {
            let s = TimeSeries::from_flat(a, k).unwrap();
            let t = TimeSeries::from_flat(b, k).unwrap();
            for offset in 1..n {
                let x = diagonal_sum(&s, &t, offset);
                let y = diagonal_sum(&s, &t, n - offset);
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
