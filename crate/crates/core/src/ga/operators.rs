//! Real-coded GA operators: normalized geometric selection, heuristic
//! crossover and the boundary / uniform / non-uniform / multi-non-uniform
//! mutations. Every operator keeps genes inside `[lower, upper]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Gene vector of one individual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Chromosome<T> {
    pub genes: Vec<T>,
}

impl<T: Scalar> Chromosome<T> {
    pub fn new(genes: Vec<T>) -> Self {
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn within(&self, bounds: &Bounds) -> bool {
        self.genes.iter().all(|g| bounds.contains(g.to_f64_lossless()))
    }

    pub fn random(len: usize, bounds: &Bounds, rng: &mut impl Rng) -> Self {
        Self::new((0..len).map(|_| T::from_f64_lossy(rng.random_range(bounds.lower..=bounds.upper))).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self { lower: -10.0, upper: 10.0 }
    }
}

impl Bounds {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Rank-based selection: rank `r` (1 = lowest fitness) is drawn with
/// probability `q' (1 - q)^(r - 1)`, `q' = q / (1 - (1 - q)^P)`.
#[derive(Debug, Clone)]
pub struct GeometricSelection {
    /// Individual indices by rank.
    ranked: Vec<usize>,
    cumulative: Vec<f64>,
}

impl GeometricSelection {
    pub fn new<T: Scalar>(fitnesses: &[T], q: f64) -> Self {
        assert!(!fitnesses.is_empty(), "empty population");
        let ranked = rank_ascending(fitnesses);
        let probs = geometric_probabilities(fitnesses.len(), q);
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { ranked, cumulative }
    }

    pub fn pick(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        let rank = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.ranked.len() - 1);
        self.ranked[rank]
    }

    /// Individual index of rank `r` (0-based).
    pub fn by_rank(&self, r: usize) -> usize {
        self.ranked[r]
    }
}

/// Selection probability of each rank for a population of `p`.
pub fn geometric_probabilities(p: usize, q: f64) -> Vec<f64> {
    let q_norm = q / (1.0 - (1.0 - q).powi(p as i32));
    (0..p).map(|r| q_norm * (1.0 - q).powi(r as i32)).collect()
}

/// Indices sorted by ascending fitness; ties keep index order.
pub fn rank_ascending<T: Scalar>(fitnesses: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitnesses.len()).collect();
    idx.sort_by(|&a, &b| {
        fitnesses[a]
            .partial_cmp(&fitnesses[b])
            .unwrap_or_else(|| fitnesses[a].is_nan().cmp(&fitnesses[b].is_nan()))
    });
    idx
}

/// Draws `n_pairs` parent pairs by normalized geometric selection.
pub fn select_parents<T: Scalar>(fitnesses: &[T], q: f64, n_pairs: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let sel = GeometricSelection::new(fitnesses, q);
    (0..n_pairs).map(|_| (sel.pick(rng), sel.pick(rng))).collect()
}

/// Heuristic crossover. `child1 = better + u (better - worse)`, `u ~ U(0,1)`,
/// redrawn up to `retries` times while a gene leaves the bounds, falling back
/// to a copy of `better`. `child2` is a copy of `better`.
pub fn crossover_heuristic<T: Scalar>(
    better: &Chromosome<T>,
    worse: &Chromosome<T>,
    bounds: &Bounds,
    retries: usize,
    rng: &mut impl Rng,
) -> (Chromosome<T>, Chromosome<T>) {
    assert_eq!(better.len(), worse.len(), "parents differ in length");
    for _ in 0..=retries {
        let u = T::from_f64_lossy(rng.random::<f64>());
        let child: Vec<T> = better
            .genes
            .iter()
            .zip(&worse.genes)
            .map(|(&b, &w)| b + u * (b - w))
            .collect();
        let child = Chromosome::new(child);
        if child.within(bounds) {
            return (child, better.clone());
        }
    }
    (better.clone(), better.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    Boundary,
    Uniform,
    NonUniform,
    MultiNonUniform,
}

impl MutationKind {
    pub const ALL: [MutationKind; 4] = [Self::Boundary, Self::Uniform, Self::NonUniform, Self::MultiNonUniform];
}

/// Non-uniform step of gene `x` at generation `g` of `max_g`: moves toward a
/// fair-coin bound by `(bound - x)(1 - u^((1 - g/max_g)^b))`.
fn non_uniform_gene<T: Scalar>(x: T, g: usize, max_g: usize, shape: f64, bounds: &Bounds, rng: &mut impl Rng) -> T {
    let toward_upper: bool = rng.random();
    let u: f64 = rng.random();
    let t = if max_g == 0 { 1.0 } else { g as f64 / max_g as f64 };
    let step = 1.0 - u.powf((1.0 - t).powf(shape));
    let xf = x.to_f64_lossless();
    let bound = if toward_upper { bounds.upper } else { bounds.lower };
    let moved = xf + (bound - xf) * step;
    T::from_f64_lossy(moved.clamp(bounds.lower, bounds.upper))
}

/// Applies one mutation of `kind` at generation `g` out of `max_g`.
pub fn mutate<T: Scalar>(
    chrom: &Chromosome<T>,
    kind: MutationKind,
    g: usize,
    max_g: usize,
    shape: f64,
    bounds: &Bounds,
    rng: &mut impl Rng,
) -> Chromosome<T> {
    let mut out = chrom.clone();
    if out.is_empty() {
        return out;
    }
    match kind {
        MutationKind::Boundary => {
            let i = rng.random_range(0..out.len());
            let v = if rng.random::<bool>() { bounds.upper } else { bounds.lower };
            out.genes[i] = T::from_f64_lossy(v);
        }
        MutationKind::Uniform => {
            let i = rng.random_range(0..out.len());
            out.genes[i] = T::from_f64_lossy(rng.random_range(bounds.lower..=bounds.upper));
        }
        MutationKind::NonUniform => {
            let i = rng.random_range(0..out.len());
            out.genes[i] = non_uniform_gene(out.genes[i], g, max_g, shape, bounds, rng);
        }
        MutationKind::MultiNonUniform => {
            for gene in out.genes.iter_mut() {
                *gene = non_uniform_gene(*gene, g, max_g, shape, bounds, rng);
            }
        }
    }
    out
}
