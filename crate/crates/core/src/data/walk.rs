use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::Scalar;

/// Parameters of the smoothed Gaussian random walk generator.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkParams {
    pub dim: usize,
    pub len: usize,
    /// Standard deviation of each coordinate step.
    pub step_scale: f64,
    /// Width of the centered moving average applied after integration.
    pub smoothing_window: usize,
    pub seed: u64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            dim: 2,
            len: 32,
            step_scale: 1.0,
            smoothing_window: 3,
            seed: 0,
        }
    }
}

impl WalkParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 || self.len < 2 || self.smoothing_window < 1 {
            return Err(Error::InvalidInput(format!(
                "walk needs dim >= 1, len >= 2, smoothing_window >= 1 (got {}, {}, {})",
                self.dim, self.len, self.smoothing_window
            )));
        }
        if !(self.step_scale >= 0.0 && self.step_scale.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "step_scale must be finite and non-negative, got {}",
                self.step_scale
            )));
        }
        Ok(())
    }
}

/// Synthetic trajectory: cumulative sum of seeded Gaussian steps starting at
/// the origin, smoothed by a centered moving average (truncated at the ends).
pub fn generate_walk<T: Scalar>(params: &WalkParams) -> Result<TimeSeries<T>> {
    params.validate()?;
    let (k, n) = (params.dim, params.len);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let normal = Normal::new(0.0, params.step_scale)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;

    let mut raw = vec![0.0f64; n * k];
    let mut pos = vec![0.0f64; k];
    for i in 0..n {
        for (a, p) in pos.iter_mut().enumerate() {
            *p += normal.sample(&mut rng);
            raw[i * k + a] = *p;
        }
    }

    let w = params.smoothing_window;
    let back = (w - 1) / 2;
    let ahead = w / 2;
    let mut data = Vec::with_capacity(n * k);
    for i in 0..n {
        let lo = i.saturating_sub(back);
        let hi = (i + ahead).min(n - 1);
        let count = (hi - lo + 1) as f64;
        for a in 0..k {
            let sum: f64 = (lo..=hi).map(|j| raw[j * k + a]).sum();
            data.push(T::lit(sum / count));
        }
    }
    TimeSeries::from_flat(data, k)
}
