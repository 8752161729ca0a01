#![allow(dead_code)]

use fasteer::rng;
use fasteer::scores::{generate_synthetic, ClassParams, SyntheticSpec};
use fasteer::ScoreSet;
use rand::Rng;

/// Exhaustive EER computed by sorting once and sweeping every distinct score,
/// independent of the library's per-threshold counting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle {
    pub eer: f64,
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
    pub achieved_error: f64,
    pub unique: usize,
}

pub fn whole_sweep(set: &ScoreSet<f64>) -> Oracle {
    let mut intra = set.intra().to_vec();
    let mut inter = set.inter().to_vec();
    intra.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inter.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut all: Vec<f64> = intra.iter().chain(inter.iter()).copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();
    let (ni, ne) = (intra.len() as f64, inter.len() as f64);
    let mut best: Option<Oracle> = None;
    for &t in &all {
        let frr = (intra.len() - intra.partition_point(|&s| s <= t)) as f64 / ni;
        let far = inter.partition_point(|&s| s <= t) as f64 / ne;
        let err = (far - frr).abs();
        if best.is_none_or(|b| err < b.achieved_error) {
            best = Some(Oracle { eer: (far + frr) / 2.0, threshold: t, far, frr, achieved_error: err, unique: 0 });
        }
    }
    Oracle { unique: all.len(), ..best.unwrap() }
}

/// Brute-force rates at one threshold.
pub fn recount(set: &ScoreSet<f64>, t: f64) -> (f64, f64) {
    let far = set.inter().iter().filter(|&&s| s <= t).count() as f64 / set.inter().len() as f64;
    let frr = set.intra().iter().filter(|&&s| s > t).count() as f64 / set.intra().len() as f64;
    (far, frr)
}

/// Parameters of member `k` of the seeded synthetic suite: overlapping
/// Gaussians, total size log-spaced from 10^3 to 10^5, separation d' in
/// [1, 3].
pub fn suite_spec(k: usize, n_sets: usize) -> (SyntheticSpec, u64) {
    let seed = 10_000 + k as u64;
    let mut r = rng::seeded(rng::mix(0x5EED, k as u64));
    let exponent = 3.0 + 2.0 * k as f64 / (n_sets.max(2) - 1) as f64;
    let total = 10f64.powf(exponent).round() as usize;
    let intra_share = r.random_range(0.3..0.7);
    let n_intra = ((total as f64 * intra_share) as usize).max(1);
    let n_inter = (total - n_intra).max(1);
    let intra_std = r.random_range(0.05..0.15);
    let inter_std = r.random_range(0.05..0.15);
    let d_prime = r.random_range(1.0..3.0);
    let intra_mean = r.random_range(0.2..0.4);
    let inter_mean = intra_mean + d_prime * (intra_std + inter_std) / 2.0;
    (
        SyntheticSpec::new(n_intra, n_inter, ClassParams::new(intra_mean, intra_std), ClassParams::new(inter_mean, inter_std)),
        seed,
    )
}

pub fn suite(n_sets: usize) -> Vec<ScoreSet<f64>> {
    (0..n_sets)
        .map(|k| {
            let (spec, seed) = suite_spec(k, n_sets);
            generate_synthetic(&spec, seed).unwrap()
        })
        .collect()
}

/// Small random Gaussian set for property checks.
pub fn random_gaussian_set(seed: u64, max_per_class: usize) -> ScoreSet<f64> {
    let mut r = rng::seeded(seed);
    let n_intra = r.random_range(20..max_per_class);
    let n_inter = r.random_range(20..max_per_class);
    let mi = r.random_range(-1.0..1.0);
    let si = r.random_range(0.1..1.0);
    let me = mi + r.random_range(0.0..3.0);
    let se = r.random_range(0.1..1.0);
    let spec = SyntheticSpec::new(n_intra, n_inter, ClassParams::new(mi, si), ClassParams::new(me, se));
    generate_synthetic(&spec, r.random()).unwrap()
}

/// Four systems of clearly different quality (single-system EERs from
/// roughly 0.1 to 0.4).
pub fn four_systems() -> [(ClassParams, ClassParams); 4] {
    [
        (ClassParams::new(0.30, 0.10), ClassParams::new(0.55, 0.10)),
        (ClassParams::new(0.40, 0.15), ClassParams::new(0.60, 0.15)),
        (ClassParams::new(0.20, 0.10), ClassParams::new(0.35, 0.12)),
        (ClassParams::new(0.50, 0.20), ClassParams::new(0.60, 0.20)),
    ]
}

pub fn four_system_set(per_class: usize, seed: u64) -> fasteer::MultiScoreSet64 {
    fasteer::scores::generate_multi_synthetic(per_class, per_class, &four_systems(), seed).unwrap()
}
