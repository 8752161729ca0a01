//! Acceptance suite. Runs every criterion in sequence (timings need an
//! otherwise idle process), prints one line per criterion and exits nonzero
//! if any fails.

mod common;

use std::io::Write;
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use common::{four_system_set, recount, suite, whole_sweep};
use fasteer::bench::{bench_ga_fitness_gain, time_median, MIN_REPETITIONS};
use fasteer::bootstrap::run_replicates;
use fasteer::bootstrap::worker::Worker;
use fasteer::ga::operators::{crossover_heuristic, mutate, Bounds, Chromosome, MutationKind};
use fasteer::ga::{prepare, split_learning_validation};
use fasteer::rates::rates_at;
use fasteer::scores::{generate_multi_synthetic, generate_synthetic, ClassParams, SyntheticSpec};
use fasteer::{
    bootstrap_ci, eer_classic, eer_polytomous, fuse, resample, BootstrapConfig, DistributedConfig, EerError,
    EerMethod, FusionFamily, FusionSpec, GaConfig, MultiScoreSet64, PolytomousConfig, ScoreSet64, Strategy as CiStrategy,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

// criterion 1
const C1_SETS: usize = 100;
const C1_MAX_SECS: f64 = 120.0;
const ORACLE_SLACK: f64 = 1e-12;
const STEPS: [usize; 5] = [3, 4, 5, 6, 7];
const PRECISIONS: [f64; 3] = [0.01, 0.005, 0.003];
// criterion 2
const C2_CLASSIC_50: usize = 50;
const C2_MEDIAN_RANGE: (usize, usize) = (5, 35);
/// Comparisons of polytomous (3, 0.01) on every suite member, frozen.
const C2_FROZEN_COUNTS: [usize; C1_SETS] = [
    9, 9, 7, 6, 9, 7, 9, 5, 7, 9, 10, 11, 10, 9, 10, 10, 11, 10, 9, 10,
    7, 10, 8, 11, 10, 9, 6, 9, 9, 10, 8, 7, 9, 9, 8, 10, 9, 11, 10, 10,
    9, 9, 10, 10, 10, 10, 7, 9, 7, 10, 9, 11, 10, 10, 8, 10, 10, 9, 10, 9,
    7, 10, 9, 9, 9, 10, 10, 9, 2, 9, 11, 10, 9, 11, 8, 10, 10, 10, 11, 10,
    10, 9, 10, 10, 10, 10, 9, 10, 10, 10, 9, 10, 10, 10, 9, 10, 10, 11, 11, 10,
];
// criterion 3
const C3_MIN_SPEEDUP: f64 = 10.0;
const C3_MAX_SECS: f64 = 60.0;
// criterion 4
const C4_K: usize = 200;
const C4_ALPHA: f64 = 0.10;
const C4_MAX_SECS: f64 = 120.0;
// criterion 5
const C5_K: usize = 100;
const C5_K_WHOLE: usize = 20;
const C5_MIN_PARALLEL_SPEEDUP: f64 = 1.5;
const C5_MIN_UNITS: usize = 4;
const C5_MAX_SECS: f64 = 1200.0;
// criterion 6
const C6_TRIALS: usize = 100;
const C6_MIN_COVERED: usize = 80;
const C6_K: usize = 200;
const C6_ALPHA: f64 = 0.10;
const C6_MAX_SECS: f64 = 300.0;
// criterion 7
const C7_SETS: usize = 200;
// criteria 8 and 9
const C8_PER_CLASS: usize = 2500;
const C8_SEED: u64 = 5;
const C8_MAX_SECS: f64 = 600.0;
const C9_MIN_GAIN_PCT: f64 = 25.0;
const C9_MAX_SECS: f64 = 900.0;
// criterion 10
const C10_CASES: u32 = 1000;
const C10_MAX_SECS: f64 = 300.0;

enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

struct Report {
    lines: Vec<(usize, Verdict, String)>,
}

impl Report {
    fn record(&mut self, id: usize, ok: bool, detail: String) {
        self.emit(id, if ok { Verdict::Pass } else { Verdict::Fail }, detail);
    }

    fn emit(&mut self, id: usize, v: Verdict, detail: String) {
        let tag = match v {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N/A ",
        };
        let line = format!("[{tag}] criterion {id:>2}: {detail}");
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{line}");
        let _ = out.flush();
        self.lines.push((id, v, line));
    }
}

fn big_set(seed: u64) -> ScoreSet64 {
    let spec = SyntheticSpec::new(50_000, 50_000, ClassParams::new(0.4, 0.1), ClassParams::new(0.6, 0.1));
    generate_synthetic(&spec, seed).unwrap()
}

fn spawn_worker() -> String {
    let w = Worker::<f64>::bind("127.0.0.1:0").unwrap();
    let addr = w.local_addr().unwrap().to_string();
    thread::spawn(move || w.serve());
    addr
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn oracle_equivalence(sets: &[ScoreSet64], r: &mut Report) {
    let t = Instant::now();
    let (mut runs, mut errors, mut violations) = (0, 0, 0);
    for set in sets {
        let o = whole_sweep(set);
        for steps in STEPS {
            for p in PRECISIONS {
                runs += 1;
                match eer_polytomous(set, &PolytomousConfig::new(steps, p)) {
                    Ok(res) => {
                        let bound = p / 2.0 + o.achieved_error / 2.0 + ORACLE_SLACK;
                        if (res.eer - o.eer).abs() > bound || res.achieved_error >= p {
                            violations += 1;
                        }
                    }
                    Err(_) => errors += 1,
                }
            }
        }
    }
    let s = secs(t);
    r.record(
        1,
        violations == 0 && s < C1_MAX_SECS,
        format!("oracle equivalence: {runs} runs, {violations} bound violations, {errors} explicit errors, {s:.1}s"),
    );
}

fn comparison_counts(sets: &[ScoreSet64], r: &mut Report) {
    let mut max_seen = 0;
    let mut over = 0;
    for set in sets {
        for steps in STEPS {
            for p in PRECISIONS {
                if let Ok(res) = eer_polytomous(set, &PolytomousConfig::new(steps, p)) {
                    max_seen = max_seen.max(res.comparisons);
                    if res.comparisons >= C2_CLASSIC_50 {
                        over += 1;
                    }
                }
            }
        }
    }
    let counts: Vec<usize> = sets
        .iter()
        .map(|s| eer_polytomous(s, &PolytomousConfig::new(3, 0.01)).map_or(0, |res| res.comparisons))
        .collect();
    let mut sorted = counts.clone();
    sorted.sort_unstable();
    let median = sorted[sorted.len() / 2];
    let locked = counts == C2_FROZEN_COUNTS;
    if !locked {
        println!("observed counts: {counts:?}");
    }
    let in_range = (C2_MEDIAN_RANGE.0..=C2_MEDIAN_RANGE.1).contains(&median);
    r.record(
        2,
        over == 0 && in_range && locked,
        format!(
            "comparisons: max {max_seen} (< {C2_CLASSIC_50}: {}), median (3, 0.01) {median} in {:?}, counts locked: {locked}",
            over == 0,
            C2_MEDIAN_RANGE
        ),
    );
}

fn speed_ratio(r: &mut Report) {
    let t = Instant::now();
    let set = big_set(31);
    let cfg = PolytomousConfig::new(3, 0.01);
    let (poly_ms, _) = time_median(MIN_REPETITIONS, || eer_polytomous(&set, &cfg).unwrap());
    let (classic_ms, _) = time_median(MIN_REPETITIONS, || eer_classic(&set, 1000).unwrap());
    let ratio = classic_ms / poly_ms;
    let s = secs(t);
    r.record(
        3,
        ratio >= C3_MIN_SPEEDUP && s < C3_MAX_SECS,
        format!(
            "speed on {} scores: polyto_3_0.010 {poly_ms:.2} ms, classic_1000 {classic_ms:.2} ms, ratio {ratio:.1} (>= {C3_MIN_SPEEDUP}), {s:.1}s",
            set.len()
        ),
    );
}

fn strategy_invisibility(r: &mut Report) {
    let t = Instant::now();
    let set = big_set(32);
    let cfg = BootstrapConfig::new(C4_K, C4_ALPHA, EerMethod::Polytomous(PolytomousConfig::default()), 2024);
    let single = bootstrap_ci(&set, &cfg).unwrap();
    let parallel = bootstrap_ci(&set, &cfg.clone().with_strategy(CiStrategy::Parallel { threads: None })).unwrap();
    let dist = CiStrategy::Distributed(DistributedConfig::new(vec![spawn_worker(), spawn_worker()]));
    let distributed = bootstrap_ci(&set, &cfg.clone().with_strategy(dist)).unwrap();
    let same = single == parallel && single == distributed;
    let s = secs(t);
    r.record(
        4,
        same && s < C4_MAX_SECS,
        format!(
            "K={C4_K} single/parallel/distributed(2 workers) bit-identical: {same}, CI [{:.4}, {:.4}], {s:.1}s",
            single.lower, single.upper
        ),
    );
}

fn bootstrap_ordering(r: &mut Report) {
    let t = Instant::now();
    let set = big_set(33);
    let timed = |method: EerMethod, k: usize, strategy: CiStrategy| {
        let cfg = BootstrapConfig::new(k, 0.10, method, 7).with_strategy(strategy);
        let t = Instant::now();
        bootstrap_ci(&set, &cfg).unwrap();
        secs(t)
    };
    let poly = timed(EerMethod::Polytomous(PolytomousConfig::default()), C5_K, CiStrategy::Single);
    let classic = timed(EerMethod::Classic { steps: 1000 }, C5_K, CiStrategy::Single);
    let whole = timed(EerMethod::Whole, C5_K_WHOLE, CiStrategy::Single);
    let ordered = poly < classic && classic < whole;
    let s = secs(t);
    r.record(
        5,
        ordered && s < C5_MAX_SECS,
        format!(
            "CI time on {} scores: polytomous(K={C5_K}) {poly:.2}s < classic_1000(K={C5_K}) {classic:.2}s < whole(K={C5_K_WHOLE}) {whole:.2}s: {ordered}",
            set.len()
        ),
    );
    let units = thread::available_parallelism().map_or(1, |n| n.get());
    if units >= C5_MIN_UNITS {
        let method = EerMethod::Classic { steps: 1000 };
        let single = timed(method, C5_K, CiStrategy::Single);
        let parallel = timed(method, C5_K, CiStrategy::Parallel { threads: None });
        let speedup = single / parallel;
        r.record(
            5,
            speedup >= C5_MIN_PARALLEL_SPEEDUP,
            format!("parallel speedup on {units} units: {speedup:.2}x (>= {C5_MIN_PARALLEL_SPEEDUP}x)"),
        );
    } else {
        r.emit(
            5,
            Verdict::NotApplicable,
            format!("parallel speedup leg needs >= {C5_MIN_UNITS} processing units, this machine has {units}"),
        );
    }
}

/// Distributions for the coverage trials: (intra, inter, per-class size).
fn coverage_designs() -> [(ClassParams, ClassParams, usize); 5] {
    [
        (ClassParams::new(0.40, 0.10), ClassParams::new(0.60, 0.10), 1000),
        (ClassParams::new(0.30, 0.08), ClassParams::new(0.50, 0.12), 800),
        (ClassParams::new(0.20, 0.10), ClassParams::new(0.50, 0.10), 1200),
        (ClassParams::new(0.50, 0.15), ClassParams::new(0.65, 0.10), 1000),
        (ClassParams::new(0.35, 0.05), ClassParams::new(0.45, 0.08), 600),
    ]
}

fn coverage(r: &mut Report) {
    let t = Instant::now();
    let designs = coverage_designs();
    let truth: Vec<f64> = designs
        .iter()
        .enumerate()
        .map(|(d, (a, b, _))| {
            let big = generate_synthetic(&SyntheticSpec::new(200_000, 200_000, *a, *b), 900 + d as u64).unwrap();
            whole_sweep(&big).eer
        })
        .collect();
    let mut covered = 0;
    for trial in 0..C6_TRIALS {
        let d = trial % designs.len();
        let (a, b, n) = designs[d];
        let set = generate_synthetic(&SyntheticSpec::new(n, n, a, b), 5000 + trial as u64).unwrap();
        let cfg = BootstrapConfig::new(C6_K, C6_ALPHA, EerMethod::Whole, trial as u64);
        if bootstrap_ci(&set, &cfg).unwrap().contains(truth[d]) {
            covered += 1;
        }
    }
    let s = secs(t);
    r.record(
        6,
        covered >= C6_MIN_COVERED && s < C6_MAX_SECS,
        format!("90% CI covers large-sample EER in {covered}/{C6_TRIALS} trials (>= {C6_MIN_COVERED}), {s:.1}s"),
    );
}

fn random_tuples(seed: u64) -> MultiScoreSet64 {
    let mut rng = fasteer::rng::seeded(seed);
    let n = 1 + (seed as usize % 6);
    let systems: Vec<(ClassParams, ClassParams)> = (0..n)
        .map(|_| {
            use rand::Rng;
            let m = rng.random_range(0.5..2.0);
            (ClassParams::new(m, 0.2), ClassParams::new(m + 0.3, 0.2))
        })
        .collect();
    generate_multi_synthetic(50, 70, &systems, seed).unwrap()
}

fn fusion_identities(r: &mut Report) {
    let mut mismatches = 0;
    let mut scores = 0;
    for seed in 0..C7_SETS as u64 {
        let t = random_tuples(seed);
        let n = t.n_systems();
        let sum = fuse(&t, &FusionSpec::baseline(FusionFamily::Sum)).unwrap();
        let mul = fuse(&t, &FusionSpec::baseline(FusionFamily::Mul)).unwrap();
        let pairs = [
            (fuse(&t, &FusionSpec::ga1(vec![1.0; n])).unwrap(), &sum),
            (fuse(&t, &FusionSpec::ga2(vec![1.0; n])).unwrap(), &mul),
            (fuse(&t, &FusionSpec::ga3(vec![1.0; n], vec![1.0; n])).unwrap(), &sum),
        ];
        for (got, want) in pairs {
            scores += got.len();
            if got.intra() != want.intra() || got.inter() != want.inter() {
                mismatches += 1;
            }
        }
    }
    r.record(
        7,
        mismatches == 0,
        format!("ga1(1)=sum, ga2(1)=mul, ga3(1,1)=sum exactly on {C7_SETS} sets ({scores} fused scores), {mismatches} mismatches"),
    );
}

fn ga_criteria(r: &mut Report) {
    let tuples = four_system_set(C8_PER_CLASS, C8_SEED);
    let cfg = GaConfig::default();
    let (_, validation_norm, _) = prepare(&tuples, cfg.seed).unwrap();
    let (_, validation_raw) = split_learning_validation(&tuples, fasteer::rng::mix(cfg.seed, 0)).unwrap();
    let singles: Vec<f64> =
        (0..tuples.n_systems()).map(|j| whole_sweep(&validation_norm.column(j)).eer).collect();
    let best_single = singles.iter().copied().fold(f64::INFINITY, f64::min);
    let sum = whole_sweep(&fuse(&validation_norm, &FusionSpec::baseline(FusionFamily::Sum)).unwrap()).eer;

    let t = Instant::now();
    let mut c8 = Vec::new();
    let mut c9 = Vec::new();
    let mut poly_secs = 0.0;
    for family in [FusionFamily::Ga1, FusionFamily::Ga2, FusionFamily::Ga3] {
        let gain = bench_ga_fitness_gain(&tuples, family, &cfg).unwrap();
        let rep = &gain.polytomous;
        poly_secs += rep.wall_time_ms / 1e3;
        let val = whole_sweep(&fuse(&validation_raw, &rep.best_spec).unwrap()).eer;
        c8.push((family, val, val <= sum && val <= best_single));
        c9.push((family, gain.gain_pct, gain.polytomous_ms, gain.classic_ms));
    }
    let s = secs(t);
    let detail8: Vec<String> = c8.iter().map(|(f, v, _)| format!("{f} {v:.4}")).collect();
    r.record(
        8,
        c8.iter().all(|c| c.2) && poly_secs < C8_MAX_SECS,
        format!(
            "GA validation EER {} vs sum {sum:.4}, best single {best_single:.4} ({} scores, pop {}, gen {})",
            detail8.join(", "),
            tuples.n_systems() * (tuples.intra().len() + tuples.inter().len()),
            cfg.population,
            cfg.generations
        ),
    );
    let detail9: Vec<String> =
        c9.iter().map(|(f, g, p, c)| format!("{f} {g:.1}% ({p:.0} vs {c:.0} ms)")).collect();
    r.record(
        9,
        c9.iter().all(|c| c.1 > C9_MIN_GAIN_PCT) && s < C9_MAX_SECS,
        format!("fitness gain (> {C9_MIN_GAIN_PCT}%): {}, {s:.1}s", detail9.join(", ")),
    );
}

fn arb_set() -> impl Strategy<Value = ScoreSet64> {
    (prop::collection::vec(-3.0f64..3.0, 1..120), prop::collection::vec(-3.0f64..3.0, 1..120), 0.0f64..2.0)
        .prop_map(|(a, b, shift)| ScoreSet64::new(a, b.into_iter().map(|s| s + shift).collect()).unwrap())
}

fn property_suites(r: &mut Report) {
    let t = Instant::now();
    let runner = || TestRunner::new(Config { cases: C10_CASES, failure_persistence: None, ..Config::default() });
    let mut results: Vec<(&str, Result<(), String>)> = Vec::new();
    let bounds = Bounds::default();

    let res = runner().run(
        &(prop::collection::vec(-10.0f64..=10.0, 1..8), prop::collection::vec(-10.0f64..=10.0, 1..8), any::<u64>(), 0usize..=50),
        |(a, b, seed, g)| {
            let n = a.len().min(b.len());
            let (a, b) = (Chromosome::new(a[..n].to_vec()), Chromosome::new(b[..n].to_vec()));
            let mut rng = fasteer::rng::seeded(seed);
            let (c1, c2) = crossover_heuristic(&a, &b, &bounds, 3, &mut rng);
            prop_assert!(c1.within(&bounds) && c2.within(&bounds));
            for kind in MutationKind::ALL {
                prop_assert!(mutate(&c1, kind, g, 50, 3.0, &bounds, &mut rng).within(&bounds));
            }
            Ok(())
        },
    );
    results.push(("GA bounds preservation", res.map_err(|e| e.to_string())));

    let res = runner().run(&(arb_set(), -4.0f64..5.0, 0.0f64..1.0), |(set, t1, dt)| {
        let (a, b) = (rates_at(&set, t1), rates_at(&set, t1 + dt));
        prop_assert!(a.far <= b.far && a.frr >= b.frr);
        Ok(())
    });
    results.push(("FAR/FRR monotonicity", res.map_err(|e| e.to_string())));

    let res = runner().run(&(arb_set(), any::<u64>()), |(set, seed)| {
        let a = resample(&set, seed);
        prop_assert_eq!(&a, &resample(&set, seed));
        prop_assert_eq!((a.intra().len(), a.inter().len()), (set.intra().len(), set.inter().len()));
        Ok(())
    });
    results.push(("resampling determinism", res.map_err(|e| e.to_string())));

    let res = runner().run(&(arb_set(), 3usize..8, prop::sample::select(PRECISIONS.to_vec())), |(set, steps, p)| {
        let points = match eer_polytomous(&set, &PolytomousConfig::new(steps, p)) {
            Ok(res) => res.roc_points,
            Err(EerError::PrecisionUnreachable { best }) => best.roc_points,
            Err(_) => return Ok(()),
        };
        for pt in points {
            prop_assert_eq!((pt.far, pt.frr), recount(&set, pt.threshold));
        }
        Ok(())
    });
    results.push(("polytomous cache correctness", res.map_err(|e| e.to_string())));

    let small = big_set(34).try_map(|s| s).unwrap();
    let small = resample(&small, 1);
    let small = ScoreSet64::new(small.intra()[..200].to_vec(), small.inter()[..200].to_vec()).unwrap();
    let method = EerMethod::Polytomous(PolytomousConfig::default());
    let reference = run_replicates(&small, &method, 3, 1..41);
    let res = runner().run(&prop::collection::vec(1usize..10, 1..10), |cuts| {
        let mut merged = Vec::new();
        let mut start = 1;
        for c in cuts {
            let end = (start + c).min(41);
            merged.extend(run_replicates(&small, &method, 3, start..end));
            start = end;
        }
        merged.extend(run_replicates(&small, &method, 3, start..41));
        prop_assert_eq!(&merged, &reference);
        Ok(())
    });
    results.push(("bootstrap partition invariance", res.map_err(|e| e.to_string())));

    let failed: Vec<String> =
        results.iter().filter_map(|(n, res)| res.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    let s = secs(t);
    let names: Vec<&str> = results.iter().map(|(n, _)| *n).collect();
    r.record(
        10,
        failed.is_empty() && s < C10_MAX_SECS,
        if failed.is_empty() {
            format!("{} suites x {C10_CASES} cases ({}), {s:.1}s", results.len(), names.join(", "))
        } else {
            format!("failing suites: {}", failed.join("; "))
        },
    );
}

fn main() -> ExitCode {
    let mut r = Report { lines: Vec::new() };
    let sets = suite(C1_SETS);
    oracle_equivalence(&sets, &mut r);
    comparison_counts(&sets, &mut r);
    speed_ratio(&mut r);
    strategy_invisibility(&mut r);
    bootstrap_ordering(&mut r);
    coverage(&mut r);
    fusion_identities(&mut r);
    ga_criteria(&mut r);
    property_suites(&mut r);

    let failed = r.lines.iter().filter(|(_, v, _)| matches!(v, Verdict::Fail)).count();
    println!("\nacceptance summary:");
    for (_, _, line) in &r.lines {
        println!("{line}");
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
