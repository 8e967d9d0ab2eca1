//! Wall-clock measurement on the monotonic clock.

use std::time::{Duration, Instant};

/// A single measurement keeps calling `f` until this much time has passed,
/// then reports the mean per call. Keeps sub-microsecond calls measurable.
pub const MIN_BATCH: Duration = Duration::from_millis(2);

/// Per-call seconds of one batched measurement.
pub fn measure<F: FnMut()>(mut f: F) -> f64 {
    let start = Instant::now();
    let mut calls = 0u64;
    loop {
        f();
        calls += 1;
        let elapsed = start.elapsed();
        if elapsed >= MIN_BATCH {
            return elapsed.as_secs_f64() / calls as f64;
        }
    }
}

/// Fastest of `reps` batched measurements.
pub fn best_of<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    (0..reps.max(1))
        .map(|_| measure(&mut f))
        .fold(f64::INFINITY, f64::min)
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}
