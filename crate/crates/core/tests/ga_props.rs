mod common;

use fasteer::ga::operators::{crossover_heuristic, mutate, select_parents, Bounds, Chromosome, MutationKind};
use fasteer::ga::split_learning_validation;
use fasteer::scores::{generate_multi_synthetic, ClassParams};
use fasteer::{optimize, FusionFamily, GaConfig, MultiScoreSet64};
use rand::Rng;

fn small_cfg() -> GaConfig {
    GaConfig { population: 30, generations: 15, seed: 4, ..GaConfig::default() }
}

#[test]
fn operators_preserve_bounds_over_1e5_draws() {
    let bounds = Bounds::default();
    let mut rng = fasteer::rng::seeded(77);
    for n in 0..100_000 {
        let len = rng.random_range(1..9);
        let a: Chromosome<f64> = Chromosome::random(len, &bounds, &mut rng);
        let b = Chromosome::random(len, &bounds, &mut rng);
        let (c1, c2) = crossover_heuristic(&a, &b, &bounds, 3, &mut rng);
        assert!(c1.within(&bounds) && c2.within(&bounds), "draw {n}");
        let kind = MutationKind::ALL[n % 4];
        let g = rng.random_range(0..=50);
        let m = mutate(&c1, kind, g, 50, 3.0, &bounds, &mut rng);
        assert!(m.within(&bounds), "draw {n} {kind:?}");
    }
}

#[test]
fn selection_pairs_are_in_range() {
    let mut rng = fasteer::rng::seeded(1);
    let fit = [0.3, 0.1, 0.2, 0.5];
    for (a, b) in select_parents(&fit, 0.9, 1000, &mut rng) {
        assert!(a < 4 && b < 4);
    }
}

#[test]
fn split_is_a_partition() {
    let t = common::four_system_set(101, 2);
    let (l, v) = split_learning_validation(&t, 5).unwrap();
    assert_eq!((l.intra().len(), v.intra().len()), (51, 50));
    let mut all: Vec<Vec<f64>> = l.intra().iter().chain(v.intra()).cloned().collect();
    let mut orig = t.intra().to_vec();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    orig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(all, orig);
}

#[test]
fn optimize_is_deterministic_and_counts_evaluations() {
    let t = common::four_system_set(300, 3);
    let cfg = small_cfg();
    let a = optimize(&t, FusionFamily::Ga3, &cfg).unwrap();
    let b = optimize(&t, FusionFamily::Ga3, &GaConfig { threads: Some(2), ..cfg.clone() }).unwrap();
    assert_eq!(a.without_timing(), b.without_timing());
    assert_eq!(a.fitness_evaluations, cfg.population * (cfg.generations + 1));
    assert_eq!(a.history.len(), cfg.generations + 1);
    assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
    let reused = optimize(&t, FusionFamily::Ga3, &GaConfig { reuse_elite_fitness: true, ..cfg.clone() }).unwrap();
    assert_eq!(reused.fitness_evaluations, cfg.population + cfg.generations * (cfg.population - 1));
    for g in a.best_spec.weights.iter().chain(&a.best_spec.exponents) {
        assert!((-10.0..=10.0).contains(g));
    }
}

#[test]
fn ga3_without_mutation_never_loses_to_sum() {
    let t = common::four_system_set(300, 8);
    let cfg = GaConfig { mutations: vec![], ..small_cfg() };
    let r = optimize(&t, FusionFamily::Ga3, &cfg).unwrap();
    // train EER of the unit chromosome equals the sum baseline's fitness
    assert!(r.train_eer <= r.history[0]);
    let (learning, _, _) = fasteer::ga::prepare(&t, cfg.seed).unwrap();
    let sum = fasteer::fuse(&learning, &fasteer::FusionSpec::baseline(FusionFamily::Sum)).unwrap();
    let sum_fit = cfg.fitness.compute(&sum).unwrap().eer;
    assert!(r.train_eer <= sum_fit);
}

#[test]
fn separable_system_dominates_noise() {
    let systems = [
        (ClassParams::new(0.2, 0.05), ClassParams::new(0.8, 0.05)),
        (ClassParams::new(0.5, 0.2), ClassParams::new(0.5, 0.2)),
    ];
    let t: MultiScoreSet64 = generate_multi_synthetic(400, 400, &systems, 6).unwrap();
    let r = optimize(&t, FusionFamily::Ga1, &small_cfg()).unwrap();
    let b = &r.validation_baselines;
    assert!(r.validation_eer <= b["sum"]);
    assert!(r.validation_eer <= b["s1"].min(b["s2"]));
}

#[test]
fn improvement_is_concentrated_early() {
    let t = common::four_system_set(1000, 12);
    let cfg = GaConfig::default();
    for fam in [FusionFamily::Ga1, FusionFamily::Ga2, FusionFamily::Ga3] {
        let h = optimize(&t, fam, &cfg).unwrap().history;
        let total = h[0] - h[h.len() - 1];
        let early = h[0] - h[h.len() / 2];
        assert!(total == 0.0 || early >= 0.9 * total, "{fam}: {early} of {total}");
    }
}
