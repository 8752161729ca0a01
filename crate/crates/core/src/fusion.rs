//! Score-level fusion.
//!
//! Parametric families over a tuple `s` of `n` scores:
//!
//! * `ga1 = Σ w_i s_i`
//! * `ga2 = Π s_i^x_i`
//! * `ga3 = Σ w_i s_i^x_i`
//!
//! and the parameter-free baselines `sum`, `min` and `mul`.
//!
//! Real exponents are only defined on positive bases, so `ga2` and `ga3`
//! floor the score at [`EXPONENT_FLOOR`] wherever `s^x` is undefined or
//! infinite: a non-integer exponent, or a zero base with a negative exponent.
//! Integer exponents keep the exact power, so unit exponents reduce to `mul`
//! and `ga1`. Inputs are expected to be min-max normalized first; a [`FusionSpec`] can carry the
//! fitted normalizer so that the same mapping is replayed on new data.
//! Fused scores keep the distance convention.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, Scalar};
use crate::scores::{MultiNormalizer, MultiScoreSet, ScoreError, ScoreSet};

pub const EXPONENT_FLOOR: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("arity mismatch: {what} has {found} entries, expected {expected}")]
    ArityMismatch { what: &'static str, expected: usize, found: usize },
    #[error("fusion produced a non-finite score: {0}")]
    DomainError(String),
    #[error(transparent)]
    Scores(#[from] ScoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionFamily {
    Ga1,
    Ga2,
    Ga3,
    Sum,
    Min,
    Mul,
}

impl FusionFamily {
    pub const ALL: [FusionFamily; 6] = [Self::Ga1, Self::Ga2, Self::Ga3, Self::Sum, Self::Min, Self::Mul];

    pub fn is_parametric(self) -> bool {
        matches!(self, Self::Ga1 | Self::Ga2 | Self::Ga3)
    }

    /// Chromosome length for `n` systems.
    pub fn gene_len(self, n: usize) -> usize {
        match self {
            Self::Ga1 | Self::Ga2 => n,
            Self::Ga3 => 2 * n,
            Self::Sum | Self::Min | Self::Mul => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ga1 => "ga1",
            Self::Ga2 => "ga2",
            Self::Ga3 => "ga3",
            Self::Sum => "sum",
            Self::Min => "min",
            Self::Mul => "mul",
        }
    }
}

impl fmt::Display for FusionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown fusion family `{s}`"))
    }
}

/// A fusion function: family plus weights and/or exponents.
///
/// JSON form: `{"family":"ga3","weights":[..],"exponents":[..]}`, with an
/// optional `normalization` object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FusionSpec<T> {
    pub family: FusionFamily,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights: Vec<T>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<MultiNormalizer<T>>,
}

impl<T: Scalar> FusionSpec<T> {
    pub fn baseline(family: FusionFamily) -> Self {
        assert!(!family.is_parametric(), "{family} needs parameters");
        Self { family, weights: Vec::new(), exponents: Vec::new(), normalization: None }
    }

    pub fn ga1(weights: Vec<T>) -> Self {
        Self { family: FusionFamily::Ga1, weights, exponents: Vec::new(), normalization: None }
    }

    pub fn ga2(exponents: Vec<T>) -> Self {
        Self { family: FusionFamily::Ga2, weights: Vec::new(), exponents, normalization: None }
    }

    pub fn ga3(weights: Vec<T>, exponents: Vec<T>) -> Self {
        Self { family: FusionFamily::Ga3, weights, exponents, normalization: None }
    }

    /// Decodes a chromosome: weights first, then exponents for `ga3`.
    pub fn from_genes(family: FusionFamily, genes: &[T]) -> Self {
        match family {
            FusionFamily::Ga1 => Self::ga1(genes.to_vec()),
            FusionFamily::Ga2 => Self::ga2(genes.to_vec()),
            FusionFamily::Ga3 => {
                let n = genes.len() / 2;
                Self::ga3(genes[..n].to_vec(), genes[n..].to_vec())
            }
            other => Self::baseline(other),
        }
    }

    pub fn with_normalization(mut self, norm: MultiNormalizer<T>) -> Self {
        self.normalization = Some(norm);
        self
    }

    /// Checks parameter counts against `n` systems.
    pub fn check_arity(&self, n: usize) -> Result<(), FusionError> {
        let (w, x) = match self.family {
            FusionFamily::Ga1 => (n, 0),
            FusionFamily::Ga2 => (0, n),
            FusionFamily::Ga3 => (n, n),
            _ => (0, 0),
        };
        if self.weights.len() != w {
            return Err(FusionError::ArityMismatch { what: "weights", expected: w, found: self.weights.len() });
        }
        if self.exponents.len() != x {
            return Err(FusionError::ArityMismatch { what: "exponents", expected: x, found: self.exponents.len() });
        }
        if let Some(norm) = &self.normalization {
            if norm.systems.len() != n {
                return Err(FusionError::ArityMismatch {
                    what: "normalization",
                    expected: n,
                    found: norm.systems.len(),
                });
            }
        }
        Ok(())
    }

    /// Fuses one tuple. Arity must already be checked.
    #[inline]
    pub fn fuse_tuple(&self, s: &[T]) -> T {
        match self.family {
            FusionFamily::Ga1 => s.iter().zip(&self.weights).fold(T::zero(), |acc, (&v, &w)| acc + w * v),
            FusionFamily::Ga2 => {
                s.iter().zip(&self.exponents).fold(T::one(), |acc, (&v, &x)| acc * power(v, x))
            }
            FusionFamily::Ga3 => s
                .iter()
                .zip(self.weights.iter().zip(&self.exponents))
                .fold(T::zero(), |acc, (&v, (&w, &x))| acc + w * power(v, x)),
            FusionFamily::Sum => s.iter().fold(T::zero(), |acc, &v| acc + v),
            FusionFamily::Min => s.iter().copied().reduce(T::min).expect("nonempty tuple"),
            FusionFamily::Mul => s.iter().fold(T::one(), |acc, &v| acc * v),
        }
    }
}

/// `s^x`, with the base floored where the real power is undefined.
#[inline]
fn power<T: Scalar>(s: T, x: T) -> T {
    let exact = x.fract() == T::zero() && !(s == T::zero() && x < T::zero());
    if exact {
        s.powf(x)
    } else {
        s.max(lit(EXPONENT_FLOOR)).powf(x)
    }
}

/// Fuses every intra and inter tuple into one score each.
pub fn fuse<T: Scalar>(tuples: &MultiScoreSet<T>, spec: &FusionSpec<T>) -> Result<ScoreSet<T>, FusionError> {
    spec.check_arity(tuples.n_systems())?;
    let normalized;
    let tuples = match &spec.normalization {
        Some(norm) => {
            normalized = norm.apply(tuples)?;
            &normalized
        }
        None => tuples,
    };
    let run = |rows: &[Vec<T>]| -> Result<Vec<T>, FusionError> {
        rows.iter()
            .map(|t| {
                let v = spec.fuse_tuple(t);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FusionError::DomainError(format!("{} of {:?} gave {v}", spec.family, t)))
                }
            })
            .collect()
    };
    Ok(ScoreSet::new(run(tuples.intra())?, run(tuples.inter())?)?)
}
