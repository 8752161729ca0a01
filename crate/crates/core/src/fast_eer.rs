//! Polytomous EER search.
//!
//! `FRR - FAR` is non-increasing in the threshold, going from positive below
//! the genuine scores to `-1` at the highest score. Each iteration evaluates
//! `steps` thresholds evenly spread over the current bracket (endpoints
//! included), stops as soon as one of them has `|FAR - FRR| < precision`, and
//! otherwise narrows the bracket to the first pair of neighbouring thresholds
//! where the sign of `FRR - FAR` flips. Rates are cached per exact threshold
//! value, so bracket endpoints carried over from the previous iteration are
//! never recounted and `comparisons` counts distinct thresholds only.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::rates::{linspace, rates_at, EerError, EerResult, RocPoint};
use crate::scalar::{lit, Scalar};
use crate::scores::ScoreSet;

/// Relative width below which a bracket is considered collapsed.
pub const COLLAPSE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolytomousConfig {
    /// Thresholds evaluated per iteration, at least 3.
    pub steps: usize,
    /// Target bound on `|FAR - FRR|`, in `(0, 1)`.
    pub precision: f64,
    pub max_iterations: usize,
}

impl Default for PolytomousConfig {
    fn default() -> Self {
        Self { steps: 3, precision: 0.01, max_iterations: 100 }
    }
}

impl PolytomousConfig {
    pub fn new(steps: usize, precision: f64) -> Self {
        Self { steps, precision, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.steps < 3 {
            return Err(format!("steps must be >= 3, got {}", self.steps));
        }
        if !(self.precision > 0.0 && self.precision < 1.0) {
            return Err(format!("precision must lie in (0, 1), got {}", self.precision));
        }
        if self.max_iterations == 0 {
            return Err("max_iterations must be >= 1".into());
        }
        Ok(())
    }

    /// Label used in benchmark tables, e.g. `polyto_3_0.010`.
    pub fn label(&self) -> String {
        format!("polyto_{}_{:.3}", self.steps, self.precision)
    }
}

/// Search bookkeeping exposed for inspection.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolytomousTrace<T> {
    /// Iterations started.
    pub iterations: usize,
    /// `[start, end]` bracket at the start of every iteration.
    pub brackets: Vec<(T, T)>,
}

fn sign<T: Scalar>(x: T) -> i8 {
    if x > T::zero() {
        1
    } else if x < T::zero() {
        -1
    } else {
        0
    }
}

struct RateCache<'a, T> {
    set: &'a ScoreSet<T>,
    map: HashMap<u64, RocPoint<T>>,
    computed: Vec<RocPoint<T>>,
}

impl<'a, T: Scalar> RateCache<'a, T> {
    fn new(set: &'a ScoreSet<T>) -> Self {
        Self { set, map: HashMap::new(), computed: Vec::new() }
    }

    fn get(&mut self, thr: T) -> RocPoint<T> {
        if let Some(p) = self.map.get(&thr.cache_key()) {
            return *p;
        }
        let p = rates_at(self.set, thr);
        self.map.insert(thr.cache_key(), p);
        self.computed.push(p);
        p
    }

    fn best(&self) -> RocPoint<T> {
        *self
            .computed
            .iter()
            .reduce(|a, b| {
                let (ea, eb) = (a.abs_error(), b.abs_error());
                if eb < ea || (eb == ea && b.threshold < a.threshold) {
                    b
                } else {
                    a
                }
            })
            .expect("at least one threshold evaluated")
    }

    fn finish(self, point: RocPoint<T>) -> EerResult<T> {
        let n = self.computed.len();
        EerResult::at(point, n, self.computed)
    }
}

pub fn eer_polytomous<T: Scalar>(set: &ScoreSet<T>, cfg: &PolytomousConfig) -> Result<EerResult<T>, EerError<T>> {
    eer_polytomous_traced(set, cfg).0
}

/// Same as [`eer_polytomous`], also returning the bracket history.
pub fn eer_polytomous_traced<T: Scalar>(
    set: &ScoreSet<T>,
    cfg: &PolytomousConfig,
) -> (Result<EerResult<T>, EerError<T>>, PolytomousTrace<T>) {
    let mut trace = PolytomousTrace { iterations: 0, brackets: Vec::new() };
    if let Err(msg) = cfg.validate() {
        return (Err(EerError::InvalidConfig(msg)), trace);
    }
    let precision: T = lit(cfg.precision);
    let (lo, hi) = set.bounds();
    let collapse = lit::<T>(COLLAPSE_EPSILON) * (hi - lo);
    let mut cache = RateCache::new(set);
    let (mut start, mut end) = (lo, hi);
    let mut diffs = Vec::with_capacity(cfg.steps);

    for _ in 0..cfg.max_iterations {
        trace.iterations += 1;
        trace.brackets.push((start, end));
        let thresholds = linspace(start, end, cfg.steps);
        diffs.clear();
        for &t in &thresholds {
            let p = cache.get(t);
            if p.abs_error() < precision {
                return (Ok(cache.finish(p)), trace);
            }
            diffs.push(sign(p.diff()));
        }
        let Some(k) = diffs.windows(2).position(|w| w[0] != w[1]) else {
            let comparisons = cache.computed.len();
            return (Err(EerError::NoSignChange { comparisons }), trace);
        };
        start = thresholds[k];
        end = thresholds[k + 1];
        if end - start <= collapse {
            break;
        }
    }
    let best = cache.best();
    let best = Box::new(cache.finish(best));
    (Err(EerError::PrecisionUnreachable { best }), trace)
}
