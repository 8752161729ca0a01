//! Genetic tuning of fusion parameters.
//!
//! The tuples are split half/half into learning and validation parts, each
//! system is min-max normalized with statistics of the learning part, and a
//! generational real-coded GA searches the weights/exponents of a `ga1`,
//! `ga2` or `ga3` fusion function. Fitness is the EER (by default the
//! polytomous estimate with 5 steps and precision 0.01) of the fused
//! learning scores; an individual whose EER cannot be computed gets the
//! worst fitness, 1.0.
//!
//! Generation schedule: the best individual is copied unchanged (elitism),
//! and the remaining slots are filled by pairs of parents drawn by
//! normalized geometric selection, recombined with heuristic crossover with
//! probability `crossover_rate` (otherwise copied), and then mutated by one
//! operator drawn uniformly from `mutations`. Gen 0 is uniform in the gene
//! bounds plus one all-ones chromosome, which makes the unweighted baseline
//! a fitness floor.

pub mod operators;
mod split;

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use operators::{
    crossover_heuristic, geometric_probabilities, mutate, rank_ascending, select_parents, Bounds, Chromosome,
    GeometricSelection, MutationKind,
};
pub use split::split_learning_validation;

use crate::fast_eer::PolytomousConfig;
use crate::fusion::{fuse, FusionError, FusionFamily, FusionSpec};
use crate::method::EerMethod;
use crate::rates::eer_whole;
use crate::rng;
use crate::scalar::Scalar;
use crate::scores::{MultiNormalizer, MultiScoreSet, NormalizationKind, ScoreError};

#[derive(Debug, Error)]
pub enum GaError {
    #[error("need at least 2 intra and 2 inter tuples, got {intra} and {inter}")]
    TooFewTuples { intra: usize, inter: usize },
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Scores(#[from] ScoreError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    /// Probability of the best rank in geometric selection.
    pub selection_q: f64,
    pub crossover_rate: f64,
    pub crossover_retries: usize,
    pub elitism: bool,
    pub bounds: Bounds,
    /// Operators drawn from uniformly; empty disables mutation.
    pub mutations: Vec<MutationKind>,
    /// Shape `b` of the non-uniform mutations.
    pub non_uniform_shape: f64,
    pub seed: u64,
    pub fitness: EerMethod,
    /// Adds the all-ones chromosome to generation 0.
    pub seed_unit_chromosome: bool,
    /// Skips re-evaluating the unchanged elite.
    pub reuse_elite_fitness: bool,
    /// Fitness evaluation pool size; all processing units when `None`.
    pub threads: Option<usize>,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 50,
            selection_q: 0.9,
            crossover_rate: 0.9,
            crossover_retries: 3,
            elitism: true,
            bounds: Bounds::default(),
            mutations: MutationKind::ALL.to_vec(),
            non_uniform_shape: 3.0,
            seed: 1,
            fitness: EerMethod::Polytomous(PolytomousConfig::new(5, 0.01)),
            seed_unit_chromosome: true,
            reuse_elite_fitness: false,
            threads: None,
        }
    }
}

impl GaConfig {
    /// Population 5000 over 500 generations.
    pub fn paper_scale() -> Self {
        Self { population: 5000, generations: 500, ..Self::default() }
    }

    // negated comparisons so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |m: String| Err(GaError::InvalidConfig(m));
        if self.population < 2 {
            return bad(format!("population must be >= 2, got {}", self.population));
        }
        if self.generations < 1 {
            return bad("generations must be >= 1".into());
        }
        if !(self.selection_q > 0.0 && self.selection_q < 1.0) {
            return bad(format!("selection_q must lie in (0, 1), got {}", self.selection_q));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate must lie in [0, 1], got {}", self.crossover_rate));
        }
        if !(self.bounds.lower < self.bounds.upper) {
            return bad("lower bound must be below upper bound".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be >= 1".into());
        }
        self.fitness.validate().map_err(GaError::InvalidConfig)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct OptimizationReport<T> {
    pub family: FusionFamily,
    /// Best fusion function, carrying the learning-set normalizer.
    pub best_spec: FusionSpec<T>,
    /// Fitness of `best_spec` on the learning part.
    pub train_eer: T,
    /// Exhaustive EER of `best_spec` on the validation part.
    pub validation_eer: T,
    /// Best fitness of generation 0, 1, ..., `generations`.
    pub history: Vec<T>,
    pub fitness_evaluations: usize,
    /// Evaluations that fell back to the worst fitness.
    pub fitness_failures: usize,
    /// Exhaustive validation EER of every single system and baseline.
    pub validation_baselines: BTreeMap<String, T>,
    pub fitness_method: EerMethod,
    /// Time spent in the generational loop, fitness included.
    pub wall_time_ms: f64,
}

impl<T: Scalar> OptimizationReport<T> {
    /// Copy without the timing field, for determinism checks.
    pub fn without_timing(&self) -> Self {
        Self { wall_time_ms: 0.0, ..self.clone() }
    }
}

struct Fitness<'a, T> {
    learning: &'a MultiScoreSet<T>,
    family: FusionFamily,
    method: EerMethod,
}

impl<T: Scalar> Fitness<'_, T> {
    fn eval(&self, c: &Chromosome<T>) -> Option<T> {
        let spec = FusionSpec::from_genes(self.family, &c.genes);
        let fused = fuse(self.learning, &spec).ok()?;
        self.method.compute(&fused).ok().map(|r| r.eer)
    }
}

/// Normalized learning part, normalized validation part, and the normalizer.
pub type Prepared<T> = (MultiScoreSet<T>, MultiScoreSet<T>, MultiNormalizer<T>);

/// Learning/validation parts, normalized with learning statistics.
pub fn prepare<T: Scalar>(
    tuples: &MultiScoreSet<T>,
    seed: u64,
) -> Result<Prepared<T>, GaError> {
    let (learning, validation) = split_learning_validation(tuples, rng::mix(seed, 0))?;
    let norm = MultiNormalizer::fit(&learning, NormalizationKind::MinMax)?;
    Ok((norm.apply(&learning)?, norm.apply(&validation)?, norm))
}

/// Exhaustive EERs of each system and of the baselines on `validation`.
pub fn baseline_eers<T: Scalar>(validation: &MultiScoreSet<T>) -> BTreeMap<String, T> {
    let mut out = BTreeMap::new();
    for j in 0..validation.n_systems() {
        if let Ok(r) = eer_whole(&validation.column(j)) {
            out.insert(format!("s{}", j + 1), r.eer);
        }
    }
    for fam in [FusionFamily::Sum, FusionFamily::Min, FusionFamily::Mul] {
        if let Ok(fused) = fuse(validation, &FusionSpec::baseline(fam)) {
            if let Ok(r) = eer_whole(&fused) {
                out.insert(fam.to_string(), r.eer);
            }
        }
    }
    out
}

/// Tunes a `ga1`/`ga2`/`ga3` fusion function on `tuples`.
pub fn optimize<T: Scalar>(
    tuples: &MultiScoreSet<T>,
    family: FusionFamily,
    cfg: &GaConfig,
) -> Result<OptimizationReport<T>, GaError> {
    cfg.validate()?;
    if !family.is_parametric() {
        return Err(GaError::InvalidConfig(format!("{family} has no parameters to optimize")));
    }
    let (learning, validation, norm) = prepare(tuples, cfg.seed)?;
    let pool = match cfg.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| GaError::InvalidConfig(e.to_string()))?,
        ),
        None => None,
    };
    let fitness = Fitness { learning: &learning, family, method: cfg.fitness };
    let mut failures = 0usize;
    let mut evaluations = 0usize;
    let mut evaluate = |pop: &[Chromosome<T>]| -> Vec<T> {
        let run = || pop.par_iter().map(|c| fitness.eval(c)).collect::<Vec<_>>();
        let raw = match &pool {
            Some(p) => p.install(run),
            None => run(),
        };
        evaluations += raw.len();
        raw.into_iter()
            .map(|f| {
                f.unwrap_or_else(|| {
                    failures += 1;
                    T::one()
                })
            })
            .collect()
    };

    let started = Instant::now();
    let len = family.gene_len(tuples.n_systems());
    let bounds = cfg.bounds;
    let mut rng = rng::seeded(rng::mix(cfg.seed, 1));
    let mut population: Vec<Chromosome<T>> = Vec::with_capacity(cfg.population);
    if cfg.seed_unit_chromosome {
        population.push(Chromosome::new(vec![T::one(); len]));
    }
    while population.len() < cfg.population {
        population.push(Chromosome::random(len, &bounds, &mut rng));
    }
    let mut scores = evaluate(&population);
    let best_of = |s: &[T]| rank_ascending(s)[0];
    let mut history = vec![scores[best_of(&scores)]];

    for g in 1..=cfg.generations {
        let selection = GeometricSelection::new(&scores, cfg.selection_q);
        let elite = selection.by_rank(0);
        let mut next: Vec<Chromosome<T>> = Vec::with_capacity(cfg.population);
        if cfg.elitism {
            next.push(population[elite].clone());
        }
        while next.len() < cfg.population {
            let (a, b) = (selection.pick(&mut rng), selection.pick(&mut rng));
            let (better, worse) = if scores[b] < scores[a] { (b, a) } else { (a, b) };
            let (c1, c2) = if rng.random::<f64>() < cfg.crossover_rate {
                crossover_heuristic(&population[better], &population[worse], &bounds, cfg.crossover_retries, &mut rng)
            } else {
                (population[a].clone(), population[b].clone())
            };
            for child in [c1, c2] {
                if next.len() == cfg.population {
                    break;
                }
                let child = if cfg.mutations.is_empty() {
                    child
                } else {
                    let kind = cfg.mutations[rng.random_range(0..cfg.mutations.len())];
                    mutate(&child, kind, g, cfg.generations, cfg.non_uniform_shape, &bounds, &mut rng)
                };
                next.push(child);
            }
        }
        let next_scores = if cfg.elitism && cfg.reuse_elite_fitness {
            let mut s = vec![scores[elite]];
            s.extend(evaluate(&next[1..]));
            s
        } else {
            evaluate(&next)
        };
        population = next;
        scores = next_scores;
        history.push(scores[best_of(&scores)]);
    }
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;

    let best = best_of(&scores);
    let raw_spec = FusionSpec::from_genes(family, &population[best].genes);
    let validation_eer = fuse(&validation, &raw_spec)
        .ok()
        .and_then(|s| eer_whole(&s).ok())
        .map_or(T::one(), |r| r.eer);
    Ok(OptimizationReport {
        family,
        best_spec: raw_spec.with_normalization(norm),
        train_eer: scores[best],
        validation_eer,
        history,
        fitness_evaluations: evaluations,
        fitness_failures: failures,
        validation_baselines: baseline_eers(&validation),
        fitness_method: cfg.fitness,
        wall_time_ms,
    })
}
