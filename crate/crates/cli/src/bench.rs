//! Experiment harness: congruent-pair sanity runs, tightness and speedup of
//! the lower bounds against the optimizer.

use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use congruence_core::{
    apply_isometry, arc_length_resample, congruence_upper, generate_walk, random_isometry,
    Approximation, Dataset64, OptimizerConfig, TimeSeries64, WalkParams,
};
use rayon::prelude::*;

use crate::timing::{best_of, median};

/// Optimizer values above this are treated as failed runs, not distances.
pub const FAILED_RUN_THRESHOLD: f64 = 100.0;
/// Slack allowed when checking `approximation ≤ d_opt`.
pub const BOUND_SLACK: f64 = 1e-6;
/// `d_opt` at or below this counts as zero; tightness ratios are then undefined.
pub const ZERO_DISTANCE: f64 = 1e-9;
/// Sanity runs at or below this value recovered the congruence.
pub const RECOVERED: f64 = 1e-3;

/// First line of every report.
pub const SCHEMA_LINE: &str = "# schema=1";

/// One compared pair.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub pair_id: String,
    pub k: usize,
    pub n: usize,
    pub d_opt: f64,
    /// Indexed like [`Approximation::ALL`].
    pub d_approx: [f64; 4],
    pub t_opt: f64,
    pub t_approx: [f64; 4],
    pub converged: bool,
}

impl BenchRecord {
    /// `ℓ / d_opt`, undefined when `d_opt` is numerically zero.
    pub fn tightness(&self) -> [Option<f64>; 4] {
        self.d_approx
            .map(|d| (self.d_opt > ZERO_DISTANCE).then(|| d / self.d_opt))
    }

    pub fn speedup(&self) -> [f64; 4] {
        self.t_approx.map(|t| self.t_opt / t)
    }

    /// An approximation above the optimizer value on a converged run.
    pub fn violation(&self) -> bool {
        if !self.converged {
            return false;
        }
        let over_bound = self.d_approx.iter().any(|&d| d > self.d_opt + BOUND_SLACK);
        let over_ratio = self
            .tightness()
            .iter()
            .flatten()
            .any(|&r| r > 1.0 + BOUND_SLACK);
        over_bound || over_ratio
    }
}

/// How to time the evaluations of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    /// One call each; indicative only when pairs run in parallel.
    Single,
    /// Best of `reps` batched measurements, run on the calling thread.
    BestOf(usize),
}

/// A named pair of equal-shape series.
#[derive(Debug, Clone)]
pub struct Pair {
    pub id: String,
    pub s: TimeSeries64,
    pub t: TimeSeries64,
}

/// Computes every distance for one pair.
pub fn evaluate_pair(pair: &Pair, cfg: &OptimizerConfig, timing: Timing) -> Result<BenchRecord> {
    let (s, t) = (&pair.s, &pair.t);
    let start = Instant::now();
    let opt = congruence_upper(s, t, cfg).with_context(|| format!("pair {}", pair.id))?;
    let mut t_opt = start.elapsed().as_secs_f64();

    let mut d_approx = [0.0; 4];
    let mut t_approx = [0.0; 4];
    for (slot, approx) in Approximation::ALL.into_iter().enumerate() {
        let start = Instant::now();
        d_approx[slot] = approx.evaluate(s, t)?;
        t_approx[slot] = start.elapsed().as_secs_f64();
    }

    if let Timing::BestOf(reps) = timing {
        t_opt = best_of(reps, || {
            std::hint::black_box(congruence_upper(s, t, cfg).ok());
        });
        for (slot, approx) in Approximation::ALL.into_iter().enumerate() {
            t_approx[slot] = best_of(reps, || {
                std::hint::black_box(approx.evaluate(s, t).ok());
            });
        }
    }

    Ok(BenchRecord {
        pair_id: pair.id.clone(),
        k: s.dim(),
        n: s.len(),
        d_opt: opt.value,
        d_approx,
        t_opt,
        t_approx,
        converged: opt.converged,
    })
}

/// Parameters for generated pairs: `pairs_per_cell` independent walk pairs for
/// every `(k, n)` combination.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub dims: Vec<usize>,
    pub lengths: Vec<usize>,
    pub pairs_per_cell: usize,
    pub step_scale: f64,
    pub smoothing_window: usize,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 3],
            lengths: vec![16, 32, 64],
            pairs_per_cell: 20,
            step_scale: 1.0,
            smoothing_window: 3,
            seed: 0,
        }
    }
}

fn cell_seed(seed: u64, k: usize, n: usize, idx: usize, which: u64) -> u64 {
    seed.wrapping_mul(0x0000_0100_0000_01b3)
        ^ ((k as u64) << 48)
        ^ ((n as u64) << 24)
        ^ ((idx as u64) << 2)
        ^ which
}

pub fn generate_pairs(spec: &GeneratorSpec, dewarp: bool) -> Result<Vec<Pair>> {
    let mut pairs = Vec::new();
    for &k in &spec.dims {
        for &n in &spec.lengths {
            for idx in 0..spec.pairs_per_cell {
                let walk = |which| {
                    generate_walk::<f64>(&WalkParams {
                        dim: k,
                        len: n,
                        step_scale: spec.step_scale,
                        smoothing_window: spec.smoothing_window,
                        seed: cell_seed(spec.seed, k, n, idx, which),
                    })
                };
                let (mut s, mut t) = (walk(0)?, walk(1)?);
                if dewarp {
                    s = arc_length_resample(&s, n)?;
                    t = arc_length_resample(&t, n)?;
                }
                pairs.push(Pair {
                    id: format!("k{k}-n{n}-{idx}"),
                    s,
                    t,
                });
            }
        }
    }
    Ok(pairs)
}

/// Pairs consecutive dataset entries `(0, 1), (2, 3), …`, at most `limit` pairs.
/// With `resample_to`, every series is dewarped to that length first.
pub fn dataset_pairs(ds: &Dataset64, limit: usize, resample_to: Option<usize>) -> Result<Vec<Pair>> {
    let entries = ds.entries();
    let mut pairs = Vec::new();
    for chunk in entries.chunks_exact(2).take(limit) {
        let (a, b) = (&chunk[0], &chunk[1]);
        let (s, t) = match resample_to {
            Some(m) => (
                arc_length_resample(&a.series, m)?,
                arc_length_resample(&b.series, m)?,
            ),
            None => (a.series.clone(), b.series.clone()),
        };
        if s.len() != t.len() {
            bail!(
                "entries `{}` and `{}` differ in length ({} vs {}); use --dewarp to resample",
                a.id,
                b.id,
                s.len(),
                t.len()
            );
        }
        pairs.push(Pair {
            id: format!("{}|{}", a.id, b.id),
            s,
            t,
        });
    }
    Ok(pairs)
}

/// Evaluates pairs in parallel with single-shot timings.
pub fn run_tightness(pairs: &[Pair], cfg: &OptimizerConfig) -> Result<Vec<BenchRecord>> {
    pairs
        .par_iter()
        .map(|p| evaluate_pair(p, cfg, Timing::Single))
        .collect()
}

/// Evaluates pairs one at a time with best-of-`reps` timings.
pub fn run_speedup(pairs: &[Pair], cfg: &OptimizerConfig, reps: usize) -> Result<Vec<BenchRecord>> {
    pairs
        .iter()
        .map(|p| evaluate_pair(p, cfg, Timing::BestOf(reps)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Tightness,
    Speedup,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.17e}")).unwrap_or_default()
}

pub fn write_report<W: Write>(mut out: W, kind: ReportKind, records: &[BenchRecord]) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    let names = Approximation::ALL.map(|a| a.name().replace('-', "_"));
    let mut header = vec!["pair_id".to_string(), "k".into(), "n".into(), "d_opt".into()];
    header.extend(names.iter().map(|n| format!("d_{n}")));
    header.push("t_opt".into());
    header.extend(names.iter().map(|n| format!("t_{n}")));
    match kind {
        ReportKind::Tightness => header.extend(names.iter().map(|n| format!("ratio_{n}"))),
        ReportKind::Speedup => header.extend(names.iter().map(|n| format!("speedup_{n}"))),
    }
    header.push("converged".into());
    header.push("violation".into());
    w.write_record(&header)?;

    for r in records {
        let mut row = vec![
            r.pair_id.clone(),
            r.k.to_string(),
            r.n.to_string(),
            format!("{:.17e}", r.d_opt),
        ];
        row.extend(r.d_approx.iter().map(|d| format!("{d:.17e}")));
        row.push(format!("{:e}", r.t_opt));
        row.extend(r.t_approx.iter().map(|t| format!("{t:e}")));
        match kind {
            ReportKind::Tightness => row.extend(r.tightness().into_iter().map(fmt_opt)),
            ReportKind::Speedup => row.extend(r.speedup().iter().map(|s| format!("{s:e}"))),
        }
        row.push(r.converged.to_string());
        row.push(r.violation().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Aggregates printed after a benchmark.
#[derive(Debug, Clone)]
pub struct Summary {
    pub pairs: usize,
    pub violations: usize,
    /// Mean tightness per approximation over pairs where it is defined.
    pub mean_tightness: [Option<f64>; 4],
    pub median_speedup: [Option<f64>; 4],
    pub median_time: [Option<f64>; 4],
}

impl Summary {
    pub fn of(records: &[BenchRecord]) -> Self {
        let mut mean_tightness = [None; 4];
        let mut median_speedup = [None; 4];
        let mut median_time = [None; 4];
        for slot in 0..4 {
            let ratios: Vec<f64> = records.iter().filter_map(|r| r.tightness()[slot]).collect();
            if !ratios.is_empty() {
                mean_tightness[slot] = Some(ratios.iter().sum::<f64>() / ratios.len() as f64);
            }
            median_speedup[slot] = median(&mut records.iter().map(|r| r.speedup()[slot]).collect::<Vec<_>>());
            median_time[slot] = median(&mut records.iter().map(|r| r.t_approx[slot]).collect::<Vec<_>>());
        }
        Self {
            pairs: records.len(),
            violations: records.iter().filter(|r| r.violation()).count(),
            mean_tightness,
            median_speedup,
            median_time,
        }
    }

    /// Soft expectation: the greedy bound is on average at least as tight as
    /// the delta bound.
    pub fn greedy_tightest(&self) -> Option<bool> {
        Some(self.mean_tightness[2]? >= self.mean_tightness[0]?)
    }

    /// Soft expectation: fast delta has the lowest median time.
    pub fn fast_delta_fastest(&self) -> Option<bool> {
        let fast = self.median_time[1]?;
        Some(self.median_time.iter().flatten().all(|&t| fast <= t))
    }

    pub fn log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "pairs: {}  violations: {}", self.pairs, self.violations)?;
        for (slot, a) in Approximation::ALL.iter().enumerate() {
            let tight = self.mean_tightness[slot].map_or("n/a".to_string(), |v| format!("{:.1}%", v * 100.0));
            let speed = self.median_speedup[slot].map_or("n/a".to_string(), |v| format!("{v:.0}x"));
            writeln!(out, "  {:<12} mean tightness {:>7}  median speedup {:>8}", a.name(), tight, speed)?;
        }
        let verdict = |x: Option<bool>| match x {
            Some(true) => "yes",
            Some(false) => "no",
            None => "n/a",
        };
        writeln!(out, "  greedy tightest on average: {}", verdict(self.greedy_tightest()))?;
        writeln!(out, "  fast delta fastest (median): {}", verdict(self.fast_delta_fastest()))?;
        Ok(())
    }
}

/// One congruent-pair optimizer run.
#[derive(Debug, Clone)]
pub struct SanityRow {
    pub trial: usize,
    pub k: usize,
    pub n: usize,
    pub value: f64,
    pub seconds: f64,
    pub iterations: usize,
    pub converged: bool,
    pub orthogonality_residual: f64,
}

impl SanityRow {
    /// Run discarded as "no reasonable solution found".
    pub fn filtered(&self) -> bool {
        self.value > FAILED_RUN_THRESHOLD || self.value.is_nan()
    }

    pub fn recovered(&self) -> bool {
        self.value <= RECOVERED
    }
}

#[derive(Debug, Clone)]
pub struct SanitySpec {
    pub dims: Vec<usize>,
    pub len: usize,
    pub trials: usize,
    pub step_scale: f64,
    pub smoothing_window: usize,
    /// Standard deviation of the random translation.
    pub translation_scale: f64,
    pub seed: u64,
}

impl Default for SanitySpec {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 3],
            len: 32,
            trials: 20,
            step_scale: 1.0,
            smoothing_window: 3,
            translation_scale: 1.0,
            seed: 0,
        }
    }
}

/// Optimizer on `(g(T), T)` for random walks `T` and random isometries `g`,
/// where the true distance is zero. Failures are recorded, not raised.
pub fn run_sanity(spec: &SanitySpec, cfg: &OptimizerConfig) -> Result<Vec<SanityRow>> {
    let jobs: Vec<(usize, usize)> = spec
        .dims
        .iter()
        .flat_map(|&k| (0..spec.trials).map(move |trial| (k, trial)))
        .collect();
    jobs.into_iter()
        .map(|(k, trial)| {
            let seed = cell_seed(spec.seed, k, spec.len, trial, 3);
            let t = generate_walk::<f64>(&WalkParams {
                dim: k,
                len: spec.len,
                step_scale: spec.step_scale,
                smoothing_window: spec.smoothing_window,
                seed,
            })?;
            let g = random_isometry::<f64>(k, seed ^ 0x5eed, spec.translation_scale);
            let s = apply_isometry(&t, &g)?;
            let start = Instant::now();
            let r = congruence_upper(&s, &t, cfg)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(SanityRow {
                trial,
                k,
                n: spec.len,
                value: r.value,
                seconds,
                iterations: r.iterations_used,
                converged: r.converged,
                orthogonality_residual: r.orthogonality_residual,
            })
        })
        .collect()
}

pub fn write_sanity<W: Write>(mut out: W, rows: &[SanityRow]) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "k",
        "n",
        "value",
        "time_s",
        "iterations",
        "converged",
        "orthogonality_residual",
        "filtered",
        "recovered",
    ])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.k.to_string(),
            r.n.to_string(),
            format!("{:.17e}", r.value),
            format!("{:e}", r.seconds),
            r.iterations.to_string(),
            r.converged.to_string(),
            format!("{:e}", r.orthogonality_residual),
            r.filtered().to_string(),
            r.recovered().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fraction of unfiltered runs that recovered the congruence, per dimension.
pub fn sanity_recovery(rows: &[SanityRow]) -> Vec<(usize, usize, f64)> {
    let mut dims: Vec<usize> = rows.iter().map(|r| r.k).collect();
    dims.sort_unstable();
    dims.dedup();
    dims.into_iter()
        .map(|k| {
            let kept: Vec<&SanityRow> = rows.iter().filter(|r| r.k == k && !r.filtered()).collect();
            let ok = kept.iter().filter(|r| r.recovered()).count();
            let frac = if kept.is_empty() { 0.0 } else { ok as f64 / kept.len() as f64 };
            (k, kept.len(), frac)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(d_opt: f64, d: [f64; 4], converged: bool) -> BenchRecord {
        BenchRecord {
            pair_id: "p".into(),
            k: 2,
            n: 4,
            d_opt,
            d_approx: d,
            t_opt: 1.0,
            t_approx: [0.01, 0.001, 0.1, 0.002],
            converged,
        }
    }

    #[test]
    fn zero_distance_ratios_are_undefined() {
        let r = record(0.0, [0.0; 4], true);
        assert_eq!(r.tightness(), [None; 4]);
        assert!(!r.violation());
    }

    #[test]
    fn violations_are_flagged_only_when_converged() {
        let d = [1.0, 0.5, 2.5, 0.1];
        assert!(record(2.0, d, true).violation());
        assert!(!record(2.0, d, false).violation());
        assert!(!record(3.0, d, true).violation());
    }

    #[test]
    fn speedups_and_summary() {
        let r = record(2.0, [1.0, 0.5, 1.5, 0.2], true);
        assert_eq!(r.speedup(), [100.0, 1000.0, 10.0, 500.0]);
        let s = Summary::of(&[r]);
        assert_eq!(s.greedy_tightest(), Some(true));
        assert_eq!(s.fast_delta_fastest(), Some(true));
        assert_eq!(s.mean_tightness[0], Some(0.5));
    }

    #[test]
    fn report_layout() {
        let mut buf = Vec::new();
        write_report(&mut buf, ReportKind::Tightness, &[record(0.0, [0.0; 4], true)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SCHEMA_LINE));
        let header = lines.next().unwrap();
        assert!(header.starts_with("pair_id,k,n,d_opt,d_delta,d_fast_delta,d_greedy,d_fast_greedy,t_opt"));
        assert!(header.contains("ratio_fast_greedy"));
        assert!(lines.next().unwrap().contains(",,,,true,false"));
    }

    #[test]
    fn generated_pairs_cover_every_cell() {
        let spec = GeneratorSpec {
            dims: vec![1, 3],
            lengths: vec![8, 16],
            pairs_per_cell: 2,
            ..Default::default()
        };
        let pairs = generate_pairs(&spec, true).unwrap();
        assert_eq!(pairs.len(), 8);
        assert!(pairs.iter().all(|p| p.s.len() == p.t.len()));
    }
}
