//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use earspo2::cli::{cmd_evaluate, cmd_extract, cmd_generate, EvalMode, RunConfig};
use earspo2::dsp::find_peaks;
use earspo2::features::{normalize_per_subject, Category, EpochFeatures, Feature};
use earspo2::learner::{best_split, kfold_cv, loso_cv, CvReport, Dataset, ForestConfig};
use earspo2::metrics::{anova_by_level, one_way_anova};
use earspo2::pipeline::{analyse_trial, cohort_features};
use earspo2::synth::{r_from_spo2, synthesize_cohort, CohortParams, Span, SyntheticTrial};
use earspo2::vitals::spo2_from_r;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn features_of(trials: &[SyntheticTrial]) -> Vec<EpochFeatures> {
    cohort_features(trials.iter().map(|t| (&t.record, &t.manifest)).collect::<Vec<_>>()).expect("cohort extracts")
}

fn spo2_round_trip() -> Outcome {
    let at_one = spo2_from_r(1.0).unwrap();
    let exact = at_one == 87.0;
    let mut worst: f64 = 0.0;
    for k in 0..=30_000 {
        let s = 70.0 + k as f64 * 1e-3;
        worst = worst.max((spo2_from_r(r_from_spo2(s).unwrap()).unwrap() - s).abs());
    }
    outcome(exact && worst <= 1e-9, format!("spo2_from_r(1.0) = {at_one}, worst round-trip error {worst:.2e}"))
}

fn oracle_recovery() -> Outcome {
    let params = CohortParams {
        spo2: Span::new(90.0, 99.0),
        heart_rate: Span::new(60.0, 100.0),
        resp_rate: Span::new(10.0, 18.0),
        noise_sd: 0.0,
        epoch_jitter_sd: [0.0; 3],
        ..CohortParams::default()
    };
    let trials = synthesize_cohort(&params).unwrap();
    let mut hits = [0usize; 3];
    let mut n = 0;
    for t in &trials {
        for e in analyse_trial(&t.record, &t.manifest).unwrap().epochs {
            let i = e.epoch_index;
            n += 1;
            hits[0] += usize::from((e.get(Feature::Spo2Mean) - t.truth.spo2_at(i)).abs() <= 0.2);
            hits[1] += usize::from((e.get(Feature::HeartRateMean) - t.truth.heart_rate_at(i)).abs() <= 0.5);
            hits[2] += usize::from((e.get(Feature::BreathingRateMean) - t.truth.resp_rate_at(i)).abs() <= 0.5);
        }
    }
    let frac = hits.map(|h| h as f64 / n as f64);
    outcome(
        frac.iter().all(|&f| f >= 0.95),
        format!(
            "within tolerance over {n} epochs: SpO2 {:.2}%, HR {:.2}%, RR {:.2}% (need >= 95%)",
            100.0 * frac[0],
            100.0 * frac[1],
            100.0 * frac[2]
        ),
    )
}

fn peaks_vs_brute_force() -> Outcome {
    let mut rng = common::rng(11);
    let mut mismatches = 0;
    let mut peaks = 0;
    for case in 0..100 {
        let len = rng.random_range(0..=5000);
        let x = common::random_signal(&mut rng, len, case % 2 == 0);
        let threshold = [0.0, 0.5, 2.0, 5.0][case % 4];
        let fast = find_peaks(&x, threshold);
        let slow = common::brute_force_peaks(&x, threshold);
        let fast: Vec<(usize, f64)> = fast.indices.iter().copied().zip(fast.prominences.iter().copied()).collect();
        peaks += slow.len();
        mismatches += usize::from(fast != slow);
    }
    outcome(mismatches == 0, format!("{mismatches} of 100 signals differ ({peaks} oracle peaks)"))
}

fn dataset_shape_and_anova() -> Outcome {
    let trials = synthesize_cohort(&CohortParams::default()).unwrap();
    let rows = normalize_per_subject(&features_of(&trials)).unwrap();
    let a = anova_by_level(&rows, Feature::Spo2Mean).unwrap();

    // sums of squares from raw sums on integer data, so the oracle is exact
    let groups: [&[f64]; 3] = [&[3.0, 5.0, 4.0, 8.0], &[6.0, 9.0, 7.0], &[1.0, 2.0, 2.0, 4.0, 3.0]];
    let sum = |g: &[f64]| g.iter().sum::<f64>();
    let sum_sq = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>();
    let all: Vec<f64> = groups.concat();
    let n = all.len() as f64;
    let ss_total = sum_sq(&all) - sum(&all).powi(2) / n;
    let ss_within: f64 = groups.iter().map(|g| sum_sq(g) - sum(g).powi(2) / g.len() as f64).sum();
    let f_oracle = ((ss_total - ss_within) / 2.0) / (ss_within / (n - 3.0));
    let d2 = n - 3.0;
    // F(2, d2) has the closed-form tail (1 + 2f/d2)^(−d2/2)
    let p_oracle = (1.0 + 2.0 * f_oracle / d2).powf(-d2 / 2.0);
    let small = one_way_anova(&groups).unwrap();

    // four groups of two: F(3, 4)
    let g4: [&[f64]; 4] = [&[1.0, 2.0], &[2.0, 4.0], &[5.0, 4.0], &[7.0, 9.0]];
    let all4: Vec<f64> = g4.concat();
    let ssw4: f64 = g4.iter().map(|g| sum_sq(g) - sum(g).powi(2) / 2.0).sum();
    let sst4 = sum_sq(&all4) - sum(&all4).powi(2) / 8.0;
    let f4 = ((sst4 - ssw4) / 3.0) / (ssw4 / 4.0);
    let small4 = one_way_anova(&g4).unwrap();
    let f4_oracle_p = {
        // F(3, 4) cdf is I_x(3/2, 2) with x = 3f / (3f + 4), and
        // I_x(a, 2) = x^a (1 + a(1 − x))
        let x = 3.0 * f4 / (3.0 * f4 + 4.0);
        1.0 - x.powf(1.5) * (1.0 + 1.5 * (1.0 - x))
    };

    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
    let ok = rows.len() == 1984
        && (a.df_between, a.df_within) == (3, 1980)
        && rel(small.f_statistic, f_oracle) <= 1e-9
        && rel(small.p_value, p_oracle) <= 1e-9
        && rel(small4.f_statistic, f4) <= 1e-9
        && rel(small4.p_value, f4_oracle_p) <= 1e-9;
    outcome(
        ok,
        format!(
            "{} epochs, df ({}, {}); small groups F {:.6} vs {:.6}, p {:.6e} vs {:.6e}; F(3,4) p {:.6e} vs {:.6e}",
            rows.len(),
            a.df_between,
            a.df_within,
            small.f_statistic,
            f_oracle,
            small.p_value,
            p_oracle,
            small4.p_value,
            f4_oracle_p
        ),
    )
}

/// Standard deviation of extracted minus true epoch SpO₂.
fn epoch_spo2_noise(trials: &[SyntheticTrial], rows: &[EpochFeatures]) -> f64 {
    let truth: BTreeMap<(&str, u8), &SyntheticTrial> =
        trials.iter().map(|t| ((t.manifest.subject_id.as_str(), t.manifest.nback_level), t)).collect();
    let err: Vec<f64> = rows
        .iter()
        .map(|e| e.get(Feature::Spo2Mean) - truth[&(e.subject_id.as_str(), e.nback_level)].truth.spo2_at(e.epoch_index))
        .collect();
    let mean = err.iter().sum::<f64>() / err.len() as f64;
    (err.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / err.len() as f64).sqrt()
}

const SEPARABLE_SHIFTS: [f64; 4] = [0.0, -0.25, -0.5, -0.75];

struct Separable {
    noise: f64,
    report: CvReport,
}

fn separable_cohort() -> Separable {
    let params = CohortParams { spo2_shift_per_level: SEPARABLE_SHIFTS, ..CohortParams::default() };
    let trials = synthesize_cohort(&params).unwrap();
    let raw = features_of(&trials);
    let noise = epoch_spo2_noise(&trials, &raw);
    let data = Dataset::from_epochs(&normalize_per_subject(&raw).unwrap());
    let report = kfold_cv(&data, 10, &ForestConfig::default(), 0).unwrap();
    Separable { noise, report }
}

fn min_gap(shifts: &[f64; 4]) -> f64 {
    shifts.windows(2).map(|w| (w[1] - w[0]).abs()).fold(f64::INFINITY, f64::min)
}

fn classification(s: &Separable) -> Outcome {
    let gap = min_gap(&SEPARABLE_SHIFTS);
    let acc = &s.report.per_class_accuracy;
    let ends = acc[0].min(acc[3]);
    let middle = acc[1].max(acc[2]);
    let ok = gap >= 5.0 * s.noise && s.report.overall_accuracy > 0.90 && ends >= middle;
    outcome(
        ok,
        format!(
            "shift step {gap} vs epoch SpO2 noise {:.4} ({:.1}x); accuracy {:.4}; per class {:?}",
            s.noise,
            gap / s.noise,
            s.report.overall_accuracy,
            acc.iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn importance_ordering(s: &Separable) -> Outcome {
    let mut ranked: Vec<(f64, Feature)> = s.report.importances.iter().copied().zip(Feature::ALL).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let top: Vec<Feature> = ranked.iter().take(5).map(|r| r.1).collect();
    outcome(
        top.iter().all(|f| f.category() == Category::Spo2),
        format!("top 5: {}", top.iter().map(|f| f.name()).collect::<Vec<_>>().join(", ")),
    )
}

fn one_subject_per_fold(report: &CvReport, data: &Dataset) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    report.folds.iter().all(|f| {
        let Some(g) = &f.test_group else { return false };
        let size = data.groups.iter().filter(|s| *s == g).count();
        seen.insert(g.clone()) && f.test_size == size
    })
}

fn loso_harness() -> Outcome {
    let shifts = SEPARABLE_SHIFTS;
    let homogeneous = CohortParams {
        spo2_shift_per_level: shifts,
        spo2: Span::fixed(97.4),
        heart_rate: Span::fixed(82.0),
        resp_rate: Span::fixed(13.0),
        resp_mod_depth: Span::fixed(0.22),
        dc_red: Span::fixed(17_000.0),
        dc_ir: Span::fixed(50_000.0),
        perfusion_ir: Span::fixed(0.007),
        ..CohortParams::default()
    };
    let heterogeneous = CohortParams {
        spo2_shift_per_level: shifts,
        response_gain: Span::new(-0.5, 1.5),
        trial_offset_sd: [0.6, 3.0, 1.0],
        ..CohortParams::default()
    };
    let mut lines = Vec::new();
    let mut ok = true;
    let mut scores = Vec::new();
    for (name, params) in [("homogeneous", homogeneous), ("heterogeneous", heterogeneous)] {
        let trials = synthesize_cohort(&params).unwrap();
        let data = Dataset::from_epochs(&normalize_per_subject(&features_of(&trials)).unwrap());
        let config = ForestConfig::default();
        let kfold = kfold_cv(&data, 10, &config, 0).unwrap();
        let loso = loso_cv(&data, &config).unwrap();
        ok &= loso.folds.len() == 8 && one_subject_per_fold(&loso, &data);
        lines.push(format!("{name}: 10-fold {:.4}, LOSO {:.4}", kfold.overall_accuracy, loso.mean_fold_accuracy));
        scores.push((kfold.overall_accuracy, loso.mean_fold_accuracy));
    }
    ok &= (scores[0].0 - scores[0].1).abs() <= 0.10;
    ok &= scores[1].1 < scores[1].0;
    outcome(ok, lines.join("; "))
}

fn cart_equivalence() -> Outcome {
    let mut rng = common::rng(5);
    let mut mismatches = 0;
    for case in 0..200 {
        let (data, weights) = common::random_dataset(&mut rng, case % 2 == 1);
        let samples: Vec<usize> = (0..data.len()).collect();
        let order: Vec<usize> = (0..data.n_features()).collect();
        let fast = best_split(&data, &weights, &samples, &order, data.n_features()).map(|c| (c.feature, c.threshold));
        let slow = common::brute_force_split(&data, &weights).map(|(f, t, _)| (f, t));
        mismatches += usize::from(fast != slow);
    }
    outcome(mismatches == 0, format!("{mismatches} of 200 datasets disagree"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::default();
    config.paths.output = dir.path().to_path_buf();
    config.generator.n_subjects = 2;
    config.forest.n_trees = 20;
    cmd_generate(&config).unwrap();
    cmd_extract(&config).unwrap();
    let mut same = true;
    for mode in [EvalMode::Kfold10, EvalMode::Loso] {
        let (path, _) = cmd_evaluate(&config, mode).unwrap();
        let first = std::fs::read(&path).unwrap();
        cmd_evaluate(&config, mode).unwrap();
        same &= first == std::fs::read(&path).unwrap();
    }
    outcome(same, "kfold10 and loso reports byte-identical across re-runs".to_string())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t0 = Instant::now();
    let v = f();
    (v, t0.elapsed())
}

fn main() {
    let mut results: Vec<(&str, Outcome, Duration, Option<Duration>)> = Vec::new();
    let mut record = |name, limit: Option<u64>, (o, d): (Outcome, Duration)| {
        results.push((name, o, d, limit.map(Duration::from_secs)));
    };
    record("spo2 equation arithmetic", Some(1), timed(spo2_round_trip));
    record("oracle recovery", Some(30), timed(oracle_recovery));
    record("peak detection vs brute force", Some(10), timed(peaks_vs_brute_force));
    record("dataset shape and anova", None, timed(dataset_shape_and_anova));
    let (separable, cohort_time) = timed(separable_cohort);
    record("classification", Some(300), (classification(&separable), cohort_time));
    record("feature importance ordering", None, (importance_ordering(&separable), cohort_time));
    record("loso harness", None, timed(loso_harness));
    record("cart split equivalence", None, timed(cart_equivalence));
    record("determinism", None, timed(determinism));

    let mut failed = 0;
    for (name, o, took, limit) in &results {
        let in_time = limit.is_none_or(|l| *took < l);
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
        println!("{} {name}: {} [{:.2}s{budget}]", if pass { "PASS" } else { "FAIL" }, o.detail, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
