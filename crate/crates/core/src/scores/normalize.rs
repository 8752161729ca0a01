//! Score normalization: min-max, z-score and tanh.
//!
//! Statistics are fitted once on a reference set and frozen; applying a
//! normalizer never refits. Standard deviations use the population divisor
//! `n`. The tanh estimator uses the plain mean/std:
//! `0.5 * (tanh(0.01 * (s - mean) / std) + 1)`.
//!
//! Min-max is not clamped: scores outside the reference range map outside
//! `[0, 1]`.

use serde::{Deserialize, Serialize};

use super::{MultiScoreSet, ScoreError, ScoreSet};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationKind {
    MinMax,
    ZScore,
    Tanh,
}

impl std::str::FromStr for NormalizationKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "minmax" => Ok(Self::MinMax),
            "zscore" => Ok(Self::ZScore),
            "tanh" => Ok(Self::Tanh),
            _ => Err(format!("unknown normalization `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Statistics<T> {
    pub mean: T,
    pub std: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Statistics<T> {
    pub fn of(reference: &[T]) -> Result<Self, ScoreError> {
        if reference.is_empty() {
            return Err(ScoreError::DegenerateStatistics("empty reference".into()));
        }
        let n = T::from_count(reference.len());
        let mut sum = T::zero();
        let (mut min, mut max) = (T::infinity(), T::neg_infinity());
        for &s in reference {
            sum += s;
            min = min.min(s);
            max = max.max(s);
        }
        let mean = sum / n;
        let var = reference.iter().map(|&s| (s - mean) * (s - mean)).fold(T::zero(), |a, b| a + b) / n;
        Ok(Self { mean, std: var.sqrt(), min, max })
    }
}

/// A fitted single-system normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Normalizer<T> {
    pub kind: NormalizationKind,
    pub stats: Statistics<T>,
}

impl<T: Scalar> Normalizer<T> {
    pub fn fit(reference: &[T], kind: NormalizationKind) -> Result<Self, ScoreError> {
        let stats = Statistics::of(reference)?;
        Self::from_stats(kind, stats)
    }

    /// Fits on both classes of `set`.
    pub fn fit_set(set: &ScoreSet<T>, kind: NormalizationKind) -> Result<Self, ScoreError> {
        let all: Vec<T> = set.iter_all().collect();
        Self::fit(&all, kind)
    }

    // negated comparisons so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_stats(kind: NormalizationKind, stats: Statistics<T>) -> Result<Self, ScoreError> {
        match kind {
            NormalizationKind::MinMax if !(stats.max > stats.min) => Err(
                ScoreError::DegenerateStatistics(format!("max == min == {}", stats.min)),
            ),
            NormalizationKind::ZScore | NormalizationKind::Tanh if !(stats.std > T::zero()) => {
                Err(ScoreError::DegenerateStatistics("zero standard deviation".into()))
            }
            _ => Ok(Self { kind, stats }),
        }
    }

    #[inline]
    pub fn apply(&self, s: T) -> T {
        let st = &self.stats;
        match self.kind {
            NormalizationKind::MinMax => (s - st.min) / (st.max - st.min),
            NormalizationKind::ZScore => (s - st.mean) / st.std,
            NormalizationKind::Tanh => {
                lit::<T>(0.5) * ((lit::<T>(0.01) * (s - st.mean) / st.std).tanh() + T::one())
            }
        }
    }

    pub fn apply_slice(&self, scores: &[T]) -> Vec<T> {
        scores.iter().map(|&s| self.apply(s)).collect()
    }

    pub fn apply_set(&self, set: &ScoreSet<T>) -> Result<ScoreSet<T>, ScoreError> {
        set.try_map(|s| self.apply(s))
    }
}

/// One normalizer per system of a [`MultiScoreSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MultiNormalizer<T> {
    pub systems: Vec<Normalizer<T>>,
}

impl<T: Scalar> MultiNormalizer<T> {
    /// Fits system `j` on column `j` (both classes) of `reference`.
    pub fn fit(reference: &MultiScoreSet<T>, kind: NormalizationKind) -> Result<Self, ScoreError> {
        let systems = (0..reference.n_systems())
            .map(|j| Normalizer::fit_set(&reference.column(j), kind))
            .collect::<Result<_, _>>()?;
        Ok(Self { systems })
    }

    pub fn apply(&self, set: &MultiScoreSet<T>) -> Result<MultiScoreSet<T>, ScoreError> {
        if set.n_systems() != self.systems.len() {
            return Err(ScoreError::InvalidParameter(format!(
                "normalizer fitted on {} systems, got {}",
                self.systems.len(),
                set.n_systems()
            )));
        }
        set.try_map(|j, s| self.systems[j].apply(s))
    }
}
