//! Method comparison tables: error, time and threshold comparisons per EER
//! configuration, and the GA fitness speedup of the polytomous EER.
//!
//! Timings use a monotonic clock around the EER call only, after one warm-up
//! run, and report the median of the repetitions. Labels follow the
//! `classic_N` / `polyto_I_P` scheme.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::fast_eer::PolytomousConfig;
use crate::fusion::FusionFamily;
use crate::ga::{optimize, GaConfig, GaError, OptimizationReport};
use crate::method::EerMethod;
use crate::rates::EerError;
use crate::scalar::Scalar;
use crate::scores::{MultiScoreSet, ScoreSet};

pub const MIN_REPETITIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub label: String,
    /// `|FAR - FRR| * 100` at the returned threshold.
    pub error_pct: Option<f64>,
    /// Median wall time of one EER computation.
    pub time_ms: f64,
    pub comparisons: Option<usize>,
    /// Set when the method failed; `comparisons` then holds the work done.
    pub failure: Option<String>,
}

/// Classic with 50, 100, 500 and 1000 steps, then polytomous with 3..=7
/// steps at precisions 0.01, 0.005 and 0.003.
pub fn default_grid() -> Vec<EerMethod> {
    let mut grid: Vec<EerMethod> = [50, 100, 500, 1000].into_iter().map(|steps| EerMethod::Classic { steps }).collect();
    for steps in 3..=7 {
        for precision in [0.01, 0.005, 0.003] {
            grid.push(EerMethod::Polytomous(PolytomousConfig::new(steps, precision)));
        }
    }
    grid
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(|a, b| a.partial_cmp(b).expect("comparable timings"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Runs `f` once to warm up, then `repetitions` timed runs; returns the
/// median in milliseconds together with the last output.
pub fn time_median<R>(repetitions: usize, mut f: impl FnMut() -> R) -> (f64, R) {
    let mut out = f();
    let mut times = Vec::with_capacity(repetitions);
    for _ in 0..repetitions.max(1) {
        let t = Instant::now();
        out = f();
        times.push(t.elapsed().as_secs_f64() * 1e3);
    }
    (median(&mut times), out)
}

/// One row per method. `repetitions` is raised to [`MIN_REPETITIONS`].
pub fn bench_eer_methods<T: Scalar>(set: &ScoreSet<T>, grid: &[EerMethod], repetitions: usize) -> Vec<BenchRow> {
    let reps = repetitions.max(MIN_REPETITIONS);
    grid.iter()
        .map(|method| {
            let (time_ms, outcome) = time_median(reps, || method.compute(set));
            let label = method.label();
            match outcome {
                Ok(r) => BenchRow {
                    label,
                    error_pct: Some(r.achieved_error.to_f64_lossless() * 100.0),
                    time_ms,
                    comparisons: Some(r.comparisons),
                    failure: None,
                },
                Err(e) => {
                    let comparisons = match &e {
                        EerError::NoSignChange { comparisons } => Some(*comparisons),
                        EerError::PrecisionUnreachable { best } => Some(best.comparisons),
                        _ => None,
                    };
                    BenchRow { label, error_pct: None, time_ms, comparisons, failure: Some(e.to_string()) }
                }
            }
        })
        .collect()
}

/// CSV `label,error_pct,time_ms,comparisons`; failed rows leave the error
/// column empty.
pub fn write_csv<W: Write>(rows: &[BenchRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "label,error_pct,time_ms,comparisons")?;
    for r in rows {
        let err = r.error_pct.map(|e| format!("{e:.4}")).unwrap_or_default();
        let comp = r.comparisons.map(|c| c.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{:.3},{}", r.label, err, r.time_ms, comp)?;
    }
    Ok(())
}

pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = format!("{:<18} {:>10} {:>12} {:>8}\n", "LABEL", "ERROR (%)", "TIME (ms)", "COMP.");
    for r in rows {
        let err = match (&r.error_pct, &r.failure) {
            (Some(e), _) => format!("{e:.2}"),
            (None, Some(_)) => "failed".to_string(),
            _ => "-".to_string(),
        };
        let comp = r.comparisons.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!("{:<18} {:>10} {:>12.3} {:>8}\n", r.label, err, r.time_ms, comp));
    }
    out
}

/// Spearman rank correlation, average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[idx[k]] = avg;
        }
        i = j + 1;
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FitnessGain<T> {
    /// Median wall time of the polytomous-fitness runs.
    pub polytomous_ms: f64,
    pub classic_ms: f64,
    /// `100 (t_classic - t_polytomous) / t_classic`.
    pub gain_pct: f64,
    pub polytomous: OptimizationReport<T>,
    pub classic: OptimizationReport<T>,
}

/// Runs the same GA with polytomous (5 steps, precision 0.01) and classic
/// (100 steps) fitness and compares their wall times, as medians over
/// [`MIN_REPETITIONS`] alternating runs.
pub fn bench_ga_fitness_gain<T: Scalar>(
    tuples: &MultiScoreSet<T>,
    family: FusionFamily,
    cfg: &GaConfig,
) -> Result<FitnessGain<T>, GaError> {
    bench_ga_fitness_gain_repeated(tuples, family, cfg, MIN_REPETITIONS)
}

/// [`bench_ga_fitness_gain`] with an explicit repetition count. The GA is
/// deterministic, so repetitions only differ in timing.
pub fn bench_ga_fitness_gain_repeated<T: Scalar>(
    tuples: &MultiScoreSet<T>,
    family: FusionFamily,
    cfg: &GaConfig,
    repetitions: usize,
) -> Result<FitnessGain<T>, GaError> {
    let poly_cfg = GaConfig { fitness: EerMethod::Polytomous(PolytomousConfig::new(5, 0.01)), ..cfg.clone() };
    let classic_cfg = GaConfig { fitness: EerMethod::Classic { steps: 100 }, ..cfg.clone() };
    let (mut tp, mut tc) = (Vec::new(), Vec::new());
    let mut last = None;
    for _ in 0..repetitions.max(1) {
        let p = optimize(tuples, family, &poly_cfg)?;
        let c = optimize(tuples, family, &classic_cfg)?;
        tp.push(p.wall_time_ms);
        tc.push(c.wall_time_ms);
        last = Some((p, c));
    }
    let (polytomous, classic) = last.expect("at least one repetition");
    let (tp, tc) = (median(&mut tp), median(&mut tc));
    Ok(FitnessGain { polytomous_ms: tp, classic_ms: tc, gain_pct: 100.0 * (tc - tp) / tc, polytomous, classic })
}
