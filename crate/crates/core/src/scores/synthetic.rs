//! Gaussian synthetic score sets standing in for real benchmark databases.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{MultiScoreSet, ScoreError, ScoreSet};
use crate::rng;
use crate::scalar::Scalar;

/// Mean and standard deviation of one class of scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub mean: f64,
    pub std: f64,
}

impl ClassParams {
    pub fn new(mean: f64, std: f64) -> Self {
        Self { mean, std }
    }

    fn normal(&self) -> Result<Normal<f64>, ScoreError> {
        if !(self.std > 0.0 && self.std.is_finite() && self.mean.is_finite()) {
            return Err(ScoreError::InvalidParameter(format!(
                "need finite mean and std > 0, got mean={} std={}",
                self.mean, self.std
            )));
        }
        Normal::new(self.mean, self.std).map_err(|e| ScoreError::InvalidParameter(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_intra: usize,
    pub n_inter: usize,
    pub intra: ClassParams,
    pub inter: ClassParams,
}

impl SyntheticSpec {
    pub fn new(n_intra: usize, n_inter: usize, intra: ClassParams, inter: ClassParams) -> Self {
        Self { n_intra, n_inter, intra, inter }
    }
}

/// Draws `n_intra` genuine then `n_inter` impostor scores from one seeded
/// stream. Samples are drawn in `f64` and narrowed to `T`.
pub fn generate_synthetic<T: Scalar>(spec: &SyntheticSpec, seed: u64) -> Result<ScoreSet<T>, ScoreError> {
    if spec.n_intra == 0 || spec.n_inter == 0 {
        return Err(ScoreError::InvalidParameter("class sizes must be at least 1".into()));
    }
    let intra_dist = spec.intra.normal()?;
    let inter_dist = spec.inter.normal()?;
    let mut rng = rng::seeded(seed);
    let intra = (0..spec.n_intra)
        .map(|_| T::from_f64_lossy(intra_dist.sample(&mut rng)))
        .collect();
    let inter = (0..spec.n_inter)
        .map(|_| T::from_f64_lossy(inter_dist.sample(&mut rng)))
        .collect();
    ScoreSet::new(intra, inter)
}

/// Draws independent per-system Gaussian tuples. `systems[j]` gives the
/// (intra, inter) parameters of system `j`.
pub fn generate_multi_synthetic<T: Scalar>(
    n_intra: usize,
    n_inter: usize,
    systems: &[(ClassParams, ClassParams)],
    seed: u64,
) -> Result<MultiScoreSet<T>, ScoreError> {
    if n_intra == 0 || n_inter == 0 || systems.is_empty() {
        return Err(ScoreError::InvalidParameter(
            "need at least one tuple per class and one system".into(),
        ));
    }
    let dists = systems
        .iter()
        .map(|(a, b)| Ok((a.normal()?, b.normal()?)))
        .collect::<Result<Vec<_>, ScoreError>>()?;
    let mut rng = rng::seeded(seed);
    let intra = (0..n_intra)
        .map(|_| dists.iter().map(|(d, _)| T::from_f64_lossy(d.sample(&mut rng))).collect())
        .collect();
    let inter = (0..n_inter)
        .map(|_| dists.iter().map(|(_, d)| T::from_f64_lossy(d.sample(&mut rng))).collect())
        .collect();
    MultiScoreSet::new(systems.len(), intra, inter)
}
