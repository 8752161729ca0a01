//! Score sets, CSV ingestion, synthetic generation and normalization.
//!
//! Scores follow the distance convention throughout the crate: a lower score
//! means a more likely genuine comparison. Similarity scores must be negated
//! (see [`ScoreSet::negated`]) before any metric is computed.

mod io;
mod normalize;
mod synthetic;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use io::{
    load_scores, read_multi, read_simple, write_multi, write_simple, LoadedScores, ScoreFormat,
};
pub use normalize::{MultiNormalizer, NormalizationKind, Normalizer, Statistics};
pub use synthetic::{generate_multi_synthetic, generate_synthetic, ClassParams, SyntheticSpec};

/// Comparison class of a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    /// Genuine comparison.
    Intra,
    /// Impostor comparison.
    Inter,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Intra => "intra",
            Class::Inter => "inter",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("no {0} scores")]
    EmptyClass(Class),
    #[error("non-finite {class} score at position {index}")]
    NonFinite { class: Class, index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn check_class<T: Scalar>(class: Class, scores: &[T]) -> Result<(), ScoreError> {
    if scores.is_empty() {
        return Err(ScoreError::EmptyClass(class));
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(ScoreError::NonFinite { class, index });
    }
    Ok(())
}

/// Genuine (intra) and impostor (inter) distance scores of one system.
///
/// Both classes are nonempty and every score is finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSet<T> {
    intra: Vec<T>,
    inter: Vec<T>,
}

impl<T: Scalar> ScoreSet<T> {
    pub fn new(intra: Vec<T>, inter: Vec<T>) -> Result<Self, ScoreError> {
        check_class(Class::Intra, &intra)?;
        check_class(Class::Inter, &inter)?;
        Ok(Self { intra, inter })
    }

    pub fn intra(&self) -> &[T] {
        &self.intra
    }

    pub fn inter(&self) -> &[T] {
        &self.inter
    }

    pub fn len(&self) -> usize {
        self.intra.len() + self.inter.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter_all(&self) -> impl Iterator<Item = T> + '_ {
        self.intra.iter().chain(self.inter.iter()).copied()
    }

    /// Smallest and largest score over both classes.
    pub fn bounds(&self) -> (T, T) {
        self.iter_all().fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| {
            (lo.min(s), hi.max(s))
        })
    }

    /// Converts similarity scores into distances.
    pub fn negated(&self) -> Self {
        Self {
            intra: self.intra.iter().map(|s| -*s).collect(),
            inter: self.inter.iter().map(|s| -*s).collect(),
        }
    }

    /// Applies `f` to every score, revalidating finiteness.
    pub fn try_map(&self, f: impl Fn(T) -> T) -> Result<Self, ScoreError> {
        Self::new(
            self.intra.iter().map(|s| f(*s)).collect(),
            self.inter.iter().map(|s| f(*s)).collect(),
        )
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<T>) {
        (self.intra, self.inter)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ScoreSet<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            intra: Vec<T>,
            inter: Vec<T>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        ScoreSet::new(raw.intra, raw.inter).map_err(serde::de::Error::custom)
    }
}

/// Aligned score tuples of `n_systems` systems, one tuple per comparison.
///
/// Column `j` across all tuples is the [`ScoreSet`] of system `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiScoreSet<T> {
    n_systems: usize,
    intra: Vec<Vec<T>>,
    inter: Vec<Vec<T>>,
}

impl<T: Scalar> MultiScoreSet<T> {
    pub fn new(n_systems: usize, intra: Vec<Vec<T>>, inter: Vec<Vec<T>>) -> Result<Self, ScoreError> {
        if n_systems == 0 {
            return Err(ScoreError::InvalidParameter("n_systems must be positive".into()));
        }
        for (class, tuples) in [(Class::Intra, &intra), (Class::Inter, &inter)] {
            if tuples.is_empty() {
                return Err(ScoreError::EmptyClass(class));
            }
            for (index, t) in tuples.iter().enumerate() {
                if t.len() != n_systems {
                    return Err(ScoreError::InvalidParameter(format!(
                        "{class} tuple {index} has {} entries, expected {n_systems}",
                        t.len()
                    )));
                }
                if t.iter().any(|s| !s.is_finite()) {
                    return Err(ScoreError::NonFinite { class, index });
                }
            }
        }
        Ok(Self { n_systems, intra, inter })
    }

    pub fn n_systems(&self) -> usize {
        self.n_systems
    }

    pub fn intra(&self) -> &[Vec<T>] {
        &self.intra
    }

    pub fn inter(&self) -> &[Vec<T>] {
        &self.inter
    }

    /// Score set of system `j`.
    pub fn column(&self, j: usize) -> ScoreSet<T> {
        assert!(j < self.n_systems, "system index {j} out of range");
        ScoreSet {
            intra: self.intra.iter().map(|t| t[j]).collect(),
            inter: self.inter.iter().map(|t| t[j]).collect(),
        }
    }

    /// Restricts the set to the given tuple indices, in the given order.
    pub fn select(&self, intra_idx: &[usize], inter_idx: &[usize]) -> Result<Self, ScoreError> {
        Self::new(
            self.n_systems,
            intra_idx.iter().map(|&i| self.intra[i].clone()).collect(),
            inter_idx.iter().map(|&i| self.inter[i].clone()).collect(),
        )
    }

    /// Applies `f(system, score)` to every entry.
    pub fn try_map(&self, f: impl Fn(usize, T) -> T) -> Result<Self, ScoreError> {
        let map = |tuples: &[Vec<T>]| -> Vec<Vec<T>> {
            tuples
                .iter()
                .map(|t| t.iter().enumerate().map(|(j, s)| f(j, *s)).collect())
                .collect()
        };
        Self::new(self.n_systems, map(&self.intra), map(&self.inter))
    }

    pub fn negated(&self) -> Self {
        self.try_map(|_, s| -s).expect("negation keeps scores finite")
    }
}
