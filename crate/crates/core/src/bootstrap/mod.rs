//! Non-parametric bootstrap confidence interval of the EER.
//!
//! 1. `χ̂` is the EER of the original scores.
//! 2. Replicate `i` (`1..=K`) resamples `#intra` genuine and `#inter`
//!    impostor scores with replacement, seeded with
//!    [`mix(master_seed, i)`](crate::rng::mix).
//! 3. `χ^i` is the EER of replicate `i`; residuals are `e^i = χ̂ - χ^i`.
//! 4. The `100(1 - α)%` interval is `[χ̂ - e(1 - α/2), χ̂ - e(α/2)]` where
//!    `e(p)` is the `p`-quantile of the residuals (linear interpolation at
//!    zero-based rank `p (K - 1)`), clamped to `[0, 1]`.
//!
//! Because each replicate owns its seed, the interval does not depend on the
//! execution strategy: single-threaded, a local thread pool, or remote
//! workers (see [`coordinator`] and [`worker`]) give bit-identical results.

pub mod coordinator;
pub mod protocol;
pub mod worker;

use std::ops::Range;
use std::time::Duration;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::method::EerMethod;
use crate::rng;
use crate::scalar::Scalar;
use crate::scores::{Class, ScoreError, ScoreSet};

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error("EER of the original scores failed: {0}")]
    PointEstimate(String),
    #[error("all {k} bootstrap replicates failed")]
    AllReplicatesFailed { k: usize },
    #[error("worker {endpoint} unreachable: {source}")]
    WorkerUnreachable {
        endpoint: String,
        #[source]
        source: std::io::Error,
    },
    #[error("subwork starting at replicate {start_index} ({count} replicates) failed: {reason}")]
    WorkerFailed { start_index: usize, count: usize, reason: String },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Scores(#[from] ScoreError),
}

/// Remote execution settings.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DistributedConfig {
    /// `host:port` of every worker.
    pub endpoints: Vec<String>,
    /// Explicit subwork sizes `S_1..S_T`; must sum to `K`.
    pub subworks: Option<Vec<usize>>,
    /// Per-endpoint static weights used when `subworks` is unset.
    pub weights: Option<Vec<f64>>,
    pub connect_timeout: Option<Duration>,
    pub io_timeout: Option<Duration>,
}

impl DistributedConfig {
    pub fn new(endpoints: Vec<String>) -> Self {
        Self { endpoints, ..Self::default() }
    }

    /// Subwork sizes for `k` replicates.
    pub fn subwork_sizes(&self, k: usize) -> Result<Vec<usize>, BootstrapError> {
        let sizes = match (&self.subworks, &self.weights) {
            (Some(s), _) => s.clone(),
            (None, Some(w)) => split_weighted(k, w)?,
            (None, None) => split_uniform(k, self.endpoints.len().max(1)),
        };
        let total: usize = sizes.iter().sum();
        if total != k {
            return Err(BootstrapError::InvalidConfig(format!(
                "subwork sizes sum to {total}, expected K = {k}"
            )));
        }
        Ok(sizes)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Single,
    /// Local thread pool; `None` uses every available processing unit.
    Parallel { threads: Option<usize> },
    Distributed(DistributedConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub k: usize,
    pub alpha: f64,
    pub method: EerMethod,
    pub master_seed: u64,
    pub strategy: Strategy,
}

impl BootstrapConfig {
    pub fn new(k: usize, alpha: f64, method: EerMethod, master_seed: u64) -> Self {
        Self { k, alpha, method, master_seed, strategy: Strategy::Single }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn validate(&self) -> Result<(), BootstrapError> {
        if self.k == 0 {
            return Err(BootstrapError::InvalidConfig("K must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(BootstrapError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        self.method.validate().map_err(BootstrapError::InvalidConfig)?;
        match &self.strategy {
            Strategy::Parallel { threads: Some(0) } => {
                Err(BootstrapError::InvalidConfig("thread count must be >= 1".into()))
            }
            Strategy::Distributed(d) => {
                if d.endpoints.is_empty() {
                    return Err(BootstrapError::InvalidConfig("no worker endpoints".into()));
                }
                d.subwork_sizes(self.k).map(|_| ())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub index: usize,
    pub cause: String,
}

/// Outcome of replicate `index`.
pub type ReplicateOutcome<T> = (usize, Result<T, String>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConfidenceInterval<T> {
    pub point_estimate: T,
    pub lower: T,
    pub upper: T,
    pub alpha: f64,
    /// EERs of the successful replicates, by replicate index.
    pub replicate_eers: Vec<T>,
    /// `point_estimate - replicate_eers[i]`.
    pub residuals: Vec<T>,
    pub failures: Vec<ReplicateFailure>,
}

impl<T: Scalar> ConfidenceInterval<T> {
    pub fn k_effective(&self) -> usize {
        self.replicate_eers.len()
    }

    pub fn contains(&self, eer: T) -> bool {
        self.lower <= eer && eer <= self.upper
    }
}

/// Draws a same-size resample of each class with replacement.
pub fn resample<T: Scalar>(set: &ScoreSet<T>, seed: u64) -> ScoreSet<T> {
    let mut rng = rng::seeded(seed);
    let mut draw = |src: &[T]| -> Vec<T> {
        (0..src.len()).map(|_| src[rng.random_range(0..src.len())]).collect()
    };
    let intra = draw(set.intra());
    let inter = draw(set.inter());
    ScoreSet::new(intra, inter).expect("resample of a valid set is valid")
}

/// Resamples from raw class vectors, as received over the wire.
pub fn resample_parts<T: Scalar>(intra: &[T], inter: &[T], seed: u64) -> Result<ScoreSet<T>, ScoreError> {
    if intra.is_empty() {
        return Err(ScoreError::EmptyClass(Class::Intra));
    }
    if inter.is_empty() {
        return Err(ScoreError::EmptyClass(Class::Inter));
    }
    let set = ScoreSet::new(intra.to_vec(), inter.to_vec())?;
    Ok(resample(&set, seed))
}

/// EER of replicate `index`.
pub fn replicate_eer<T: Scalar>(
    set: &ScoreSet<T>,
    method: &EerMethod,
    master_seed: u64,
    index: usize,
) -> Result<T, String> {
    let sample = resample(set, rng::mix(master_seed, index as u64));
    method.compute(&sample).map(|r| r.eer).map_err(|e| e.to_string())
}

/// Computes replicates `indices` sequentially.
pub fn run_replicates<T: Scalar>(
    set: &ScoreSet<T>,
    method: &EerMethod,
    master_seed: u64,
    indices: Range<usize>,
) -> Vec<ReplicateOutcome<T>> {
    indices.map(|i| (i, replicate_eer(set, method, master_seed, i))).collect()
}

/// Computes replicates `indices` on a local pool of `threads` workers
/// (all processing units when `None`), keeping index order.
pub fn run_replicates_parallel<T: Scalar>(
    set: &ScoreSet<T>,
    method: &EerMethod,
    master_seed: u64,
    indices: Range<usize>,
    threads: Option<usize>,
) -> Result<Vec<ReplicateOutcome<T>>, BootstrapError> {
    let work = || {
        indices
            .clone()
            .into_par_iter()
            .map(|i| (i, replicate_eer(set, method, master_seed, i)))
            .collect()
    };
    match threads {
        None => Ok(work()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| BootstrapError::InvalidConfig(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

/// Quantile of ascending `sorted` at level `p`, interpolating linearly
/// between order statistics at zero-based rank `p (n - 1)`.
pub fn percentile<T: Scalar>(sorted: &[T], p: f64) -> T {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = T::from_f64_lossy(pos - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Forms the interval from the point estimate and replicate outcomes.
pub fn assemble<T: Scalar>(
    point_estimate: T,
    alpha: f64,
    mut outcomes: Vec<ReplicateOutcome<T>>,
) -> Result<ConfidenceInterval<T>, BootstrapError> {
    outcomes.sort_by_key(|(i, _)| *i);
    let k = outcomes.len();
    let mut replicate_eers = Vec::with_capacity(k);
    let mut failures = Vec::new();
    for (index, outcome) in outcomes {
        match outcome {
            Ok(eer) => replicate_eers.push(eer),
            Err(cause) => {
                log::warn!("bootstrap replicate {index} skipped: {cause}");
                failures.push(ReplicateFailure { index, cause });
            }
        }
    }
    if replicate_eers.is_empty() {
        return Err(BootstrapError::AllReplicatesFailed { k });
    }
    let residuals: Vec<T> = replicate_eers.iter().map(|&x| point_estimate - x).collect();
    let mut sorted = residuals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite residuals"));
    let unit = |v: T| v.max(T::zero()).min(T::one());
    let lower = unit(point_estimate - percentile(&sorted, 1.0 - alpha / 2.0));
    let upper = unit(point_estimate - percentile(&sorted, alpha / 2.0));
    Ok(ConfidenceInterval { point_estimate, lower, upper, alpha, replicate_eers, residuals, failures })
}

/// Bootstrap confidence interval of the EER of `set`.
pub fn bootstrap_ci<T: Scalar>(
    set: &ScoreSet<T>,
    cfg: &BootstrapConfig,
) -> Result<ConfidenceInterval<T>, BootstrapError> {
    cfg.validate()?;
    let point = cfg
        .method
        .compute(set)
        .map_err(|e| BootstrapError::PointEstimate(e.to_string()))?
        .eer;
    let indices = 1..cfg.k + 1;
    let outcomes = match &cfg.strategy {
        Strategy::Single => run_replicates(set, &cfg.method, cfg.master_seed, indices),
        Strategy::Parallel { threads } => {
            run_replicates_parallel(set, &cfg.method, cfg.master_seed, indices, *threads)?
        }
        Strategy::Distributed(d) => coordinator::coordinate(set, &cfg.method, cfg.master_seed, cfg.k, d)?,
    };
    assemble(point, cfg.alpha, outcomes)
}

/// Uniform split: `ceil(k / t)` per subwork, the remainder in the last one.
pub fn split_uniform(k: usize, t: usize) -> Vec<usize> {
    let t = t.clamp(1, k.max(1));
    let chunk = k.div_ceil(t);
    let mut sizes = Vec::with_capacity(t);
    let mut left = k;
    while left > 0 {
        let s = chunk.min(left);
        sizes.push(s);
        left -= s;
    }
    if sizes.is_empty() {
        sizes.push(0);
    }
    sizes
}

/// Split proportional to `weights` (largest remainders get the leftovers).
pub fn split_weighted(k: usize, weights: &[f64]) -> Result<Vec<usize>, BootstrapError> {
    if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(BootstrapError::InvalidConfig("weights must be positive and finite".into()));
    }
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| k as f64 * w / total).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut left = k - sizes.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    Ok(sizes)
}
