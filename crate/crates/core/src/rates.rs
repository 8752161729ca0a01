//! FAR/FRR at a threshold, ROC sweeps and the reference EER methods.
//!
//! Under the distance convention a comparison is accepted when its score is
//! `<= threshold`:
//!
//! * `FRR(t) = #{intra > t} / #intra`
//! * `FAR(t) = #{inter <= t} / #inter`
//!
//! The EER is reported at the threshold minimizing `|FAR - FRR|` as
//! `(FAR + FRR) / 2`. Ties go to the first (lowest) threshold evaluated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, Scalar};
use crate::scores::{Class, ScoreSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RocPoint<T> {
    pub threshold: T,
    pub far: T,
    pub frr: T,
}

impl<T: Scalar> RocPoint<T> {
    /// Signed gap `FRR - FAR`, non-increasing in the threshold.
    pub fn diff(&self) -> T {
        self.frr - self.far
    }

    pub fn abs_error(&self) -> T {
        (self.far - self.frr).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EerResult<T> {
    pub eer: T,
    pub threshold: T,
    pub far: T,
    pub frr: T,
    /// `|far - frr|` at the returned threshold.
    pub achieved_error: T,
    /// Number of distinct thresholds whose rates were counted.
    pub comparisons: usize,
    /// Every point computed, in evaluation order.
    pub roc_points: Vec<RocPoint<T>>,
}

impl<T: Scalar> EerResult<T> {
    pub fn at(point: RocPoint<T>, comparisons: usize, roc_points: Vec<RocPoint<T>>) -> Self {
        Self {
            eer: (point.far + point.frr) / lit(2.0),
            threshold: point.threshold,
            far: point.far,
            frr: point.frr,
            achieved_error: point.abs_error(),
            comparisons,
            roc_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EerError<T: Scalar> {
    #[error("no {0} scores")]
    EmptyClass(Class),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("FRR - FAR never changes sign across the {comparisons} computed thresholds")]
    NoSignChange { comparisons: usize },
    #[error(
        "precision unreachable: best |FAR - FRR| = {} after {} comparisons",
        best.achieved_error,
        best.comparisons
    )]
    PrecisionUnreachable { best: Box<EerResult<T>> },
}

#[inline]
fn count_above<T: Scalar>(scores: &[T], thr: T) -> usize {
    scores.iter().map(|&s| (s > thr) as usize).sum()
}

#[inline]
fn count_at_or_below<T: Scalar>(scores: &[T], thr: T) -> usize {
    scores.iter().map(|&s| (s <= thr) as usize).sum()
}

pub fn frr_at<T: Scalar>(intra: &[T], thr: T) -> Result<T, EerError<T>> {
    if intra.is_empty() {
        return Err(EerError::EmptyClass(Class::Intra));
    }
    Ok(T::from_count(count_above(intra, thr)) / T::from_count(intra.len()))
}

pub fn far_at<T: Scalar>(inter: &[T], thr: T) -> Result<T, EerError<T>> {
    if inter.is_empty() {
        return Err(EerError::EmptyClass(Class::Inter));
    }
    Ok(T::from_count(count_at_or_below(inter, thr)) / T::from_count(inter.len()))
}

/// Counts both rates at `thr`. [`ScoreSet`] guarantees nonempty classes.
#[inline]
pub fn rates_at<T: Scalar>(set: &ScoreSet<T>, thr: T) -> RocPoint<T> {
    let frr = T::from_count(count_above(set.intra(), thr)) / T::from_count(set.intra().len());
    let far = T::from_count(count_at_or_below(set.inter(), thr)) / T::from_count(set.inter().len());
    RocPoint { threshold: thr, far, frr }
}

/// `n >= 2` thresholds evenly spaced on `[start, end]`, endpoints exact.
pub fn linspace<T: Scalar>(start: T, end: T, n: usize) -> Vec<T> {
    debug_assert!(n >= 2);
    let last = T::from_count(n - 1);
    (0..n)
        .map(|k| {
            if k == 0 {
                start
            } else if k == n - 1 {
                end
            } else {
                start + (end - start) * T::from_count(k) / last
            }
        })
        .collect()
}

fn check_steps<T: Scalar>(n_steps: usize) -> Result<(), EerError<T>> {
    if n_steps < 2 {
        return Err(EerError::InvalidConfig(format!("n_steps must be >= 2, got {n_steps}")));
    }
    Ok(())
}

/// Index of the first point with the smallest `|FAR - FRR|`.
pub(crate) fn argmin_error<T: Scalar>(points: &[RocPoint<T>]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate().skip(1) {
        if p.abs_error() < points[best].abs_error() {
            best = i;
        }
    }
    best
}

/// ROC points at `n_steps` thresholds evenly spaced from the lowest to the
/// highest score, inclusive, in ascending threshold order.
pub fn roc_curve<T: Scalar>(set: &ScoreSet<T>, n_steps: usize) -> Result<Vec<RocPoint<T>>, EerError<T>> {
    check_steps(n_steps)?;
    let (lo, hi) = set.bounds();
    Ok(linspace(lo, hi, n_steps).into_iter().map(|t| rates_at(set, t)).collect())
}

/// Classical fixed-grid EER: every grid threshold is evaluated.
pub fn eer_classic<T: Scalar>(set: &ScoreSet<T>, n_steps: usize) -> Result<EerResult<T>, EerError<T>> {
    let roc = roc_curve(set, n_steps)?;
    let best = roc[argmin_error(&roc)];
    Ok(EerResult::at(best, n_steps, roc))
}

/// Exhaustive EER over every distinct score value used as a threshold.
///
/// Rates are recounted for each threshold, so the cost is
/// `O(unique scores * total scores)`.
pub fn eer_whole<T: Scalar>(set: &ScoreSet<T>) -> Result<EerResult<T>, EerError<T>> {
    let thresholds = unique_sorted(set);
    let roc: Vec<RocPoint<T>> = thresholds.iter().map(|&t| rates_at(set, t)).collect();
    let best = roc[argmin_error(&roc)];
    Ok(EerResult::at(best, roc.len(), roc))
}

/// Sorted distinct values of `intra ∪ inter`.
pub fn unique_sorted<T: Scalar>(set: &ScoreSet<T>) -> Vec<T> {
    let mut all: Vec<T> = set.iter_all().collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
    all.dedup();
    all
}
