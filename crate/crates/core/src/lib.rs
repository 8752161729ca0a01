//! Toolkit for evaluating score-based verification systems.
//!
//! * [`rates`]: FAR/FRR, ROC sweeps, the classical grid EER and the
//!   exhaustive ("whole") EER.
//! * [`fast_eer`]: polytomous EER search with threshold caching.
//! * [`bootstrap`]: EER confidence intervals, single-threaded, on a local
//!   pool, or spread over TCP workers.
//! * [`fusion`] and [`ga`]: score-level fusion functions tuned by a
//!   real-coded genetic algorithm.
//! * [`bench`]: method comparison tables.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.
//!
//! ```
//! use fasteer::{eer_polytomous, eer_whole, PolytomousConfig, ScoreSet64};
//!
//! let set = ScoreSet64::new(vec![0.1, 0.2, 0.35], vec![0.3, 0.8, 0.9]).unwrap();
//! let fast = eer_polytomous(&set, &PolytomousConfig::default());
//! let exact = eer_whole(&set).unwrap();
//! assert!(exact.eer <= 0.5);
//! # let _ = fast;
//! ```

pub mod bench;
pub mod bootstrap;
pub mod fast_eer;
pub mod fusion;
pub mod ga;
pub mod method;
pub mod rates;
pub mod rng;
pub mod scalar;
pub mod scores;

pub use bootstrap::{
    bootstrap_ci, resample, BootstrapConfig, BootstrapError, ConfidenceInterval, DistributedConfig, Strategy,
};
pub use fast_eer::{eer_polytomous, PolytomousConfig};
pub use fusion::{fuse, FusionError, FusionFamily, FusionSpec};
pub use ga::{optimize, GaConfig, GaError, OptimizationReport};
pub use method::EerMethod;
pub use rates::{eer_classic, eer_whole, far_at, frr_at, roc_curve, EerError, EerResult, RocPoint};
pub use scalar::Scalar;
pub use scores::{MultiScoreSet, NormalizationKind, Normalizer, ScoreError, ScoreSet};

pub type ScoreSet64 = ScoreSet<f64>;
pub type ScoreSet32 = ScoreSet<f32>;
pub type MultiScoreSet64 = MultiScoreSet<f64>;
pub type MultiScoreSet32 = MultiScoreSet<f32>;
pub type EerResult64 = EerResult<f64>;
pub type EerResult32 = EerResult<f32>;
pub type RocPoint64 = RocPoint<f64>;
pub type ConfidenceInterval64 = ConfidenceInterval<f64>;
pub type FusionSpec64 = FusionSpec<f64>;
pub type OptimizationReport64 = OptimizationReport<f64>;
