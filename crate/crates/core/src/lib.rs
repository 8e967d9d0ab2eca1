//! Congruence distance between multi-dimensional time series.
//!
//! Two series `S`, `T` of equal length are congruent when one is a rigid
//! motion (rotation, mirroring, translation) of the other. The congruence
//! distance `min_{M,v} Σ_i ‖s_i − (M·t_i + v)‖` is expensive to compute, so
//! this crate provides:
//!
//! * [`congruence_upper`]: multistart local search over the orthogonal group,
//!   an upper bound on the distance, with [`congruence_oracle_2d`] as a
//!   brute-force cross-check in one and two dimensions;
//! * four lower bounds built from self-similarity matrices
//!   ([`delta_distance`], [`fast_delta_distance`], [`greedy_delta_distance`],
//!   [`fast_greedy_delta_distance`]) that are orders of magnitude faster;
//! * dataset helpers: synthetic walks, constant-speed resampling and file I/O.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! name the double precision instantiations.

pub mod approx;
pub mod congruence;
pub mod data;
mod error;
pub mod isometry;
pub mod linalg;
mod scalar;
pub mod selfsim;
pub mod series;

pub use approx::{
    delta_distance, dtw_distance, fast_delta_distance, fast_greedy_delta_distance,
    greedy_delta_distance, Approximation, ScoredPair,
};
pub use congruence::{
    congruence_oracle_2d, congruence_upper, kabsch_init, objective, weiszfeld_median,
    OptimizerConfig, OptimizerResult,
};
pub use data::{arc_length_resample, generate_walk, load_dataset, save_dataset, Dataset, DatasetEntry, Format, WalkParams};
pub use error::{Error, Result};
pub use isometry::{apply_isometry, random_isometry, random_orthogonal, Isometry};
pub use linalg::Matrix;
pub use scalar::Scalar;
pub use selfsim::{self_similarity, SelfSimMatrix};
pub use series::{euclid, TimeSeries};

pub type TimeSeries64 = TimeSeries<f64>;
pub type TimeSeries32 = TimeSeries<f32>;
pub type SelfSimMatrix64 = SelfSimMatrix<f64>;
pub type SelfSimMatrix32 = SelfSimMatrix<f32>;
pub type Isometry64 = Isometry<f64>;
pub type Isometry32 = Isometry<f32>;
pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type OptimizerResult64 = OptimizerResult<f64>;
pub type Dataset64 = Dataset<f64>;
