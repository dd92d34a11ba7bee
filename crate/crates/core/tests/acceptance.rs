//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//! Every expected value is either pinned arithmetic or an independent oracle
//! recomputed here, never the implementation under test.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::separable_corpus;
use rootcause::balance::{smote, LabeledDataset, SmoteConfig};
use rootcause::corpus::{BugEvent, BugReport, Corpus, EventKind, Resolution, RootCause, Source, NUM_CLASSES};
use rootcause::evaluate::{
    auc_roc, cross_validate, f_measure, mcc, precision, recall, stratified_kfold, ConfusionMatrix,
    EvalConfig,
};
use rootcause::model::{objective, objective_gradient, Hyperparams};
use rootcause::textprep::{PrepConfig, TokenStream};
use rootcause::timefix::{compute_delays, delay_stats, quantile, DelayMetric};
use rootcause::topics::{lda_ga, top_terms, GaConfig};
use rootcause::vectorize::{fit_vocabulary, tfidf};

fn verdict(number: u8, description: &str, passed: bool, details: String) {
    println!(
        "{} [{number:02}] {description} ({details})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "[{number:02}] {description}: {details}");
}

fn assert_budget(number: u8, description: &str, elapsed: Duration, budget: Duration) {
    assert!(
        elapsed <= budget,
        "[{number:02}] {description}: took {elapsed:.2?}, budget {budget:?}"
    );
}

// Criterion 1: TF-IDF weights match a naive two-loop oracle within 1e-9 on
// 200 random corpora of up to 30 documents over up to 50 terms.
#[test]
fn criterion_01_tfidf_matches_naive_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut max_err = 0.0f64;
    for case in 0..200 {
        let term_pool: Vec<String> = (0..rng.gen_range(2..=50))
            .map(|i| format!("term{i}"))
            .collect();
        let num_docs = rng.gen_range(1..=30);
        let docs: Vec<TokenStream> = (0..num_docs)
            .map(|d| TokenStream {
                tokens: (0..rng.gen_range(0..=20))
                    .map(|_| term_pool[rng.gen_range(0..term_pool.len())].clone())
                    .collect(),
                source_id: format!("doc{d}"),
            })
            .collect();
        let min_df = rng.gen_range(1..=2);
        let max_df_ratio = [0.6, 0.9, 1.0][rng.gen_range(0..3)];

        // Independent oracle: recompute document frequencies and weights by
        // direct looping.
        let naive_df = |term: &str| -> usize {
            docs.iter()
                .filter(|d| d.tokens.iter().any(|t| t == term))
                .count()
        };
        let mut oracle_vocab: Vec<&String> = term_pool
            .iter()
            .filter(|t| {
                let df = naive_df(t);
                df >= min_df as usize && df as f64 <= max_df_ratio * num_docs as f64
            })
            .collect();
        oracle_vocab.sort();

        let fitted = fit_vocabulary(&docs, min_df, max_df_ratio);
        let Ok(vocab) = fitted else {
            assert!(
                oracle_vocab.is_empty(),
                "case {case}: fit failed but oracle retains terms"
            );
            continue;
        };
        let fitted_terms: Vec<&String> = vocab.terms().iter().collect();
        assert_eq!(fitted_terms, oracle_vocab, "case {case}: vocabulary differs");

        for doc in &docs {
            let vector = tfidf(doc, &vocab);
            for (i, term) in vocab.terms().iter().enumerate() {
                let count = doc.tokens.iter().filter(|t| *t == term).count();
                let expected =
                    count as f64 * ((num_docs as f64) / (naive_df(term) as f64)).ln();
                let got = vector.get(i);
                max_err = max_err.max((got - expected).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "tf-idf equals the two-loop oracle on 200 random corpora",
        max_err < 1e-9,
        format!("max abs err {max_err:.2e}, {elapsed:.2?}"),
    );
    assert_budget(1, "tf-idf oracle", elapsed, Duration::from_secs(5));
}

// Criterion 2: precision/recall/F/MCC match brute-force oracles on 1,000
// random confusion matrices (MCC within 1e-12); AUC matches O(n^2) pair
// counting exactly on 500 random score sets; perfect prediction scores
// MCC +1 and F 1.
#[test]
fn criterion_02_metrics_match_brute_force_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);

    let mut checked = 0u64;
    let mut max_mcc_err = 0.0f64;
    for _ in 0..1000 {
        let mut counts = [[0u64; NUM_CLASSES]; NUM_CLASSES];
        for row in counts.iter_mut() {
            for cell in row.iter_mut() {
                *cell = rng.gen_range(0..40);
            }
        }
        let cm = ConfusionMatrix::from_counts(counts);
        for class in RootCause::ALL {
            // Brute-force one-vs-rest quadrants by scanning every cell.
            let c = class.index();
            let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
            for (actual, row) in counts.iter().enumerate() {
                for (predicted, &n) in row.iter().enumerate() {
                    match (actual == c, predicted == c) {
                        (true, true) => tp += n,
                        (false, true) => fp += n,
                        (true, false) => fn_ += n,
                        (false, false) => tn += n,
                    }
                }
            }
            let oracle_precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
            let oracle_recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
            let oracle_f = if oracle_precision + oracle_recall == 0.0 {
                0.0
            } else {
                2.0 * oracle_precision * oracle_recall / (oracle_precision + oracle_recall)
            };
            let denom = ((tp + fp) as f64 * (tp + fn_) as f64 * (tn + fp) as f64
                * (tn + fn_) as f64)
                .sqrt();
            let oracle_mcc = if denom == 0.0 {
                0.0
            } else {
                (tp as i128 * tn as i128 - fp as i128 * fn_ as i128) as f64 / denom
            };

            assert_eq!(precision(&cm, class), oracle_precision);
            assert_eq!(recall(&cm, class), oracle_recall);
            assert_eq!(f_measure(&cm, class), oracle_f);
            max_mcc_err = max_mcc_err.max((mcc(&cm, class) - oracle_mcc).abs());
            checked += 1;
        }
    }
    assert!(max_mcc_err < 1e-12, "max mcc err {max_mcc_err:.2e}");

    // Perfect prediction pins the endpoints.
    let mut perfect = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    for (i, row) in perfect.iter_mut().enumerate() {
        row[i] = 7 + i as u64;
    }
    let perfect = ConfusionMatrix::from_counts(perfect);
    for class in RootCause::ALL {
        assert_eq!(mcc(&perfect, class), 1.0);
        assert_eq!(f_measure(&perfect, class), 1.0);
    }

    let mut auc_checked = 0u64;
    for _ in 0..500 {
        let n = rng.gen_range(2..60);
        // Coarse scores force plenty of ties.
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64 / 8.0).collect();
        let truths: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let n_pos = truths.iter().filter(|&&t| t).count() as u64;
        let n_neg = n as u64 - n_pos;
        // O(n^2) pair-counting oracle with half-weight ties.
        let oracle = if n_pos == 0 || n_neg == 0 {
            None
        } else {
            let mut doubled_wins = 0u64;
            for (i, &pos) in truths.iter().enumerate() {
                if !pos {
                    continue;
                }
                for (j, &other) in truths.iter().enumerate() {
                    if other {
                        continue;
                    }
                    if scores[i] > scores[j] {
                        doubled_wins += 2;
                    } else if scores[i] == scores[j] {
                        doubled_wins += 1;
                    }
                }
            }
            Some(doubled_wins as f64 / (2 * n_pos * n_neg) as f64)
        };
        assert_eq!(auc_roc(&scores, &truths), oracle);
        auc_checked += 1;
    }

    let elapsed = start.elapsed();
    verdict(
        2,
        "classification metrics equal brute-force oracles",
        true,
        format!(
            "{checked} matrix checks, {auc_checked} auc sets, max mcc err {max_mcc_err:.1e}, {elapsed:.2?}"
        ),
    );
    assert_budget(2, "metric oracles", elapsed, Duration::from_secs(10));
}

// Criterion 3: on 500 random label lists, per-class per-fold counts deviate
// from class_count/k by at most 1.
#[test]
fn criterion_03_stratification_spreads_classes_evenly() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let n = rng.gen_range(4..=300);
        let num_classes = rng.gen_range(1..=NUM_CLASSES);
        let labels: Vec<RootCause> = (0..n)
            .map(|_| RootCause::ALL[rng.gen_range(0..num_classes)])
            .collect();
        let k = rng.gen_range(2..=10.min(n));
        let folds = stratified_kfold(&labels, k, case as u64).unwrap();

        // Partition check.
        let mut seen: Vec<usize> = folds.iter().flatten().cloned().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..n).collect::<Vec<_>>(), "case {case}: not a partition");

        for class in RootCause::ALL.iter().take(num_classes) {
            let class_count = labels.iter().filter(|l| *l == class).count();
            for fold in &folds {
                let in_fold = fold.iter().filter(|&&i| labels[i] == *class).count();
                let deviation = (in_fold as f64 - class_count as f64 / k as f64).abs();
                worst = worst.max(deviation);
                assert!(
                    deviation <= 1.0,
                    "case {case}: class {class} deviates by {deviation}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        3,
        "stratified folds stay within one of proportional counts",
        true,
        format!("500 label lists, worst deviation {worst:.3}, {elapsed:.2?}"),
    );
}

// Criterion 4: SMOTE balances every class to exactly the majority count,
// synthesizes only convex combinations, and is bit-identical per seed.
#[test]
fn criterion_04_smote_contract() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut synthetic_checked = 0u64;
    for case in 0..60 {
        let dim = rng.gen_range(2..=8);
        let num_classes = rng.gen_range(2..=5);
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for class in RootCause::ALL.iter().take(num_classes) {
            let count = rng.gen_range(4..=20);
            for _ in 0..count {
                let mut entries = Vec::new();
                for d in 0..dim {
                    if rng.gen_bool(0.8) {
                        entries.push((d as u32, rng.gen_range(-3.0..3.0)));
                    }
                }
                vectors.push(rootcause::vectorize::FeatureVector::new(entries, dim));
                labels.push(*class);
            }
        }
        let data = LabeledDataset::from_parts(vectors, labels).unwrap();
        let config = SmoteConfig::default();

        let a = smote(&data, &config, case as u64).unwrap();
        let b = smote(&data, &config, case as u64).unwrap();
        assert_eq!(a.data, b.data, "case {case}: same seed differs");

        let counts = a.data.class_counts();
        let max = counts.values().max().unwrap();
        let min = counts.values().min().unwrap();
        assert_eq!(max, min, "case {case}: classes not exactly balanced");

        // Originals preserved verbatim, first.
        assert_eq!(&a.data.vectors[..data.len()], &data.vectors[..]);

        for i in data.len()..a.data.len() {
            assert!(a.data.synthetic_mask[i]);
            let class = a.data.labels[i];
            let synth = &a.data.vectors[i];
            let originals: Vec<&rootcause::vectorize::FeatureVector> = (0..data.len())
                .filter(|&j| data.labels[j] == class)
                .map(|j| &data.vectors[j])
                .collect();
            let bounded = originals.iter().enumerate().any(|(px, x)| {
                originals.iter().skip(px).any(|y| {
                    (0..dim).all(|d| {
                        let (lo, hi) = (x.get(d).min(y.get(d)), x.get(d).max(y.get(d)));
                        synth.get(d) >= lo - 1e-12 && synth.get(d) <= hi + 1e-12
                    })
                })
            });
            assert!(bounded, "case {case}: synthetic row {i} is not a convex combination");
            synthetic_checked += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        4,
        "smote balances exactly, interpolates convexly, and is seed-deterministic",
        true,
        format!("60 datasets, {synthetic_checked} synthetic rows checked, {elapsed:.2?}"),
    );
}

// Criterion 5: analytic gradients match central finite differences
// (h = 1e-5) with relative error below 1e-4 on 50 random instances.
#[test]
fn criterion_05_gradient_matches_finite_differences() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let dim = rng.gen_range(2..=6);
        let rows = rng.gen_range(5..=20);
        let num_classes = rng.gen_range(2..=NUM_CLASSES);
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..rows {
            let mut entries = Vec::new();
            for d in 0..dim {
                if rng.gen_bool(0.7) {
                    entries.push((d as u32, rng.gen_range(-2.0..2.0)));
                }
            }
            vectors.push(rootcause::vectorize::FeatureVector::new(entries, dim));
            labels.push(RootCause::ALL[rng.gen_range(0..num_classes)]);
        }
        let data = LabeledDataset::from_parts(vectors, labels).unwrap();
        let l2 = [0.0, 0.01, 0.5][case % 3];
        let params: Vec<f64> = (0..NUM_CLASSES * dim + NUM_CLASSES)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();

        let analytic = objective_gradient(&params, &data, l2);
        let h = 1e-5;
        let mut numeric = Vec::with_capacity(params.len());
        for i in 0..params.len() {
            let mut plus = params.clone();
            plus[i] += h;
            let mut minus = params.clone();
            minus[i] -= h;
            numeric.push((objective(&plus, &data, l2) - objective(&minus, &data, l2)) / (2.0 * h));
        }
        let diff_norm: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, n)| (a - n) * (a - n))
            .sum::<f64>()
            .sqrt();
        let scale = analytic
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt()
            .max(numeric.iter().map(|n| n * n).sum::<f64>().sqrt())
            .max(1e-12);
        let relative = diff_norm / scale;
        worst = worst.max(relative);
        assert!(relative < 1e-4, "case {case}: relative error {relative:.2e}");
    }
    let elapsed = start.elapsed();
    verdict(
        5,
        "analytic gradient agrees with central differences",
        true,
        format!("50 instances, worst relative error {worst:.2e}, {elapsed:.2?}"),
    );
}

// Criterion 6: a 9-class corpus with disjoint 10-word vocabularies plus 30
// shared noise words (120 reports per class), evaluated with runs=3, k=10,
// reaches macro F >= 0.95 and per-class AUC >= 0.98 in under 60 s on one
// thread.
#[test]
fn criterion_06_end_to_end_separable_corpus() {
    let start = Instant::now();
    let corpus = separable_corpus(&[120; 9], 606);
    let config = EvalConfig {
        runs: 3,
        folds: 10,
        seed: 11,
        ..EvalConfig::default()
    };
    let report = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| {
            cross_validate(
                &corpus,
                &PrepConfig::classifier(),
                &Hyperparams::default(),
                &config,
            )
        })
        .unwrap();
    let elapsed = start.elapsed();

    let macro_f = report.overall.f_measure;
    let min_auc = report
        .per_class
        .iter()
        .map(|m| m.auc_roc.unwrap_or(0.0))
        .fold(f64::INFINITY, f64::min);
    verdict(
        6,
        "separable 1080-report corpus evaluates near-perfectly",
        macro_f >= 0.95 && min_auc >= 0.98,
        format!("macro F {macro_f:.4}, min per-class AUC {min_auc:.4}, {elapsed:.2?} single-threaded"),
    );
    assert_budget(6, "end-to-end evaluation", elapsed, Duration::from_secs(60));
}

// Criterion 7: with the database class downsampled to ~3%, minority recall
// with SMOTE is at least the recall without it, across 3 seeds.
#[test]
fn criterion_07_smote_does_not_hurt_minority_recall() {
    let start = Instant::now();
    let mut plan = [120usize; 9];
    plan[RootCause::DatabaseIssue.index()] = 30; // 30 / 990 = 3.0%
    let corpus = separable_corpus(&plan, 707);
    let minority = RootCause::DatabaseIssue.index();

    let recall_with = |smote_on: bool, seed: u64| -> f64 {
        let config = EvalConfig {
            runs: 1,
            folds: 10,
            seed,
            smote: if smote_on {
                Some(SmoteConfig::default())
            } else {
                None
            },
            ..EvalConfig::default()
        };
        cross_validate(
            &corpus,
            &PrepConfig::classifier(),
            &Hyperparams::default(),
            &config,
        )
        .unwrap()
        .per_class[minority]
            .recall
    };

    let seeds = [19u64, 20, 21];
    let with: Vec<f64> = seeds.iter().map(|&s| recall_with(true, s)).collect();
    let without: Vec<f64> = seeds.iter().map(|&s| recall_with(false, s)).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let elapsed = start.elapsed();
    verdict(
        7,
        "balancing does not reduce minority-class recall",
        mean(&with) >= mean(&without),
        format!(
            "recall with smote {:?}, without {:?}, {elapsed:.2?}",
            with, without
        ),
    );
}

// Criterion 8: on a two-planted-topic corpus the genetic search picks k=2
// from [2,8] in at least 4 of 5 seeds, with disjoint, correctly assigned
// top-5 term sets; under 120 s.
#[test]
fn criterion_08_lda_ga_recovers_planted_topics() {
    let start = Instant::now();
    let vocab_a: Vec<String> = (0..10).map(|i| format!("alphaterm{i:02}")).collect();
    let vocab_b: Vec<String> = (0..10).map(|i| format!("betaterm{i:02}")).collect();
    let mut corpus_rng = ChaCha8Rng::seed_from_u64(808);
    let docs: Vec<TokenStream> = (0..100)
        .map(|d| {
            let vocab = if d < 50 { &vocab_a } else { &vocab_b };
            let len = corpus_rng.gen_range(14..24);
            TokenStream {
                tokens: (0..len)
                    .map(|_| vocab[corpus_rng.gen_range(0..vocab.len())].clone())
                    .collect(),
                source_id: format!("doc{d}"),
            }
        })
        .collect();

    let ga = GaConfig {
        population: 8,
        generations: 5,
        k_min: 2,
        k_max: 8,
        ..GaConfig::default()
    };
    let mut successes = 0;
    let mut detail = Vec::new();
    for seed in [1u64, 2, 3, 4, 5] {
        let outcome = lda_ga(&docs, &ga, 400, seed).unwrap();
        detail.push(outcome.best_k);
        if outcome.best_k != 2 {
            continue;
        }
        let top0: Vec<String> = top_terms(&outcome.model, 0, 5)
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let top1: Vec<String> = top_terms(&outcome.model, 1, 5)
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let disjoint = top0.iter().all(|t| !top1.contains(t));
        let all_a = |v: &[String]| v.iter().all(|t| vocab_a.contains(t));
        let all_b = |v: &[String]| v.iter().all(|t| vocab_b.contains(t));
        let assigned = (all_a(&top0) && all_b(&top1)) || (all_b(&top0) && all_a(&top1));
        if disjoint && assigned {
            successes += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        8,
        "genetic search recovers the planted two-topic structure",
        successes >= 4,
        format!("{successes}/5 seeds, selected k per seed {detail:?}, {elapsed:.2?}"),
    );
    assert_budget(8, "planted-topic recovery", elapsed, Duration::from_secs(120));
}

// Criterion 9: twenty hand-built timelines match hand-computed delays
// exactly, and box statistics match a sort-based oracle.
#[test]
fn criterion_09_time_to_fix_exactness() {
    let start = Instant::now();
    // (id, label, [reported, first-response, assigned, commit-start,
    // commit-end, resolved] minute offsets) with hand-computed hour deltas.
    type Timeline = (
        &'static str,
        RootCause,
        [Option<i64>; 6],
        [Option<f64>; 5],
    );
    const SEC: RootCause = RootCause::SecurityIssue;
    const GUI: RootCause = RootCause::GuiIssue;
    const NET: RootCause = RootCause::NetworkIssue;
    let timelines: Vec<Timeline> = vec![
        ("t01", SEC, [Some(0), Some(120), Some(180), Some(240), Some(300), Some(360)],
         [Some(2.0), Some(1.0), Some(1.0), Some(1.0), Some(1.0)]),
        ("t02", SEC, [Some(0), Some(0), Some(0), Some(0), Some(0), Some(0)],
         [Some(0.0), Some(0.0), Some(0.0), Some(0.0), Some(0.0)]),
        ("t03", SEC, [Some(0), Some(120), None, None, None, Some(600)],
         [Some(2.0), None, None, None, None]),
        ("t04", SEC, [Some(0), Some(135), Some(255), Some(300), Some(420), Some(480)],
         [Some(2.25), Some(2.0), Some(0.75), Some(2.0), Some(1.0)]),
        ("t05", SEC, [Some(60), Some(180), Some(300), Some(480), Some(720), Some(780)],
         [Some(2.0), Some(2.0), Some(3.0), Some(4.0), Some(1.0)]),
        ("t06", GUI, [Some(0), Some(45), Some(90), Some(135), Some(180), Some(225)],
         [Some(0.75), Some(0.75), Some(0.75), Some(0.75), Some(0.75)]),
        ("t07", GUI, [Some(0), Some(1440), Some(2880), Some(4320), Some(5760), Some(7200)],
         [Some(24.0), Some(24.0), Some(24.0), Some(24.0), Some(24.0)]),
        ("t08", GUI, [None, Some(60), Some(120), Some(180), Some(240), Some(300)],
         [None, Some(1.0), Some(1.0), Some(1.0), Some(1.0)]),
        ("t09", GUI, [Some(0), None, Some(120), Some(180), Some(240), Some(300)],
         [None, None, Some(1.0), Some(1.0), Some(1.0)]),
        ("t10", GUI, [Some(0), Some(30), None, Some(180), Some(240), Some(300)],
         [Some(0.5), None, None, Some(1.0), Some(1.0)]),
        ("t11", GUI, [Some(0), Some(30), Some(60), None, Some(240), Some(300)],
         [Some(0.5), Some(0.5), None, None, Some(1.0)]),
        ("t12", GUI, [Some(0), Some(30), Some(60), Some(90), None, Some(300)],
         [Some(0.5), Some(0.5), Some(0.5), None, None]),
        ("t13", GUI, [Some(0), Some(30), Some(60), Some(90), Some(120), None],
         [Some(0.5), Some(0.5), Some(0.5), Some(0.5), None]),
        ("t14", NET, [Some(0), Some(15), Some(30), Some(45), Some(60), Some(75)],
         [Some(0.25), Some(0.25), Some(0.25), Some(0.25), Some(0.25)]),
        ("t15", NET, [Some(0), Some(600), Some(630), Some(690), Some(2130), Some(2160)],
         [Some(10.0), Some(0.5), Some(1.0), Some(24.0), Some(0.5)]),
        ("t16", NET, [Some(0), Some(90), Some(90), Some(90), Some(6090), Some(6120)],
         [Some(1.5), Some(0.0), Some(0.0), Some(100.0), Some(0.5)]),
        ("t17", NET, [None, None, None, None, None, None],
         [None, None, None, None, None]),
        ("t18", NET, [Some(0), Some(240), Some(240), Some(255), Some(315), Some(375)],
         [Some(4.0), Some(0.0), Some(0.25), Some(1.0), Some(1.0)]),
        ("t19", NET, [Some(0), Some(2880), Some(5760), Some(5775), Some(5805), Some(5820)],
         [Some(48.0), Some(48.0), Some(0.25), Some(0.5), Some(0.25)]),
        ("t20", SEC, [Some(0), Some(105), Some(225), Some(345), Some(465), Some(585)],
         [Some(1.75), Some(2.0), Some(2.0), Some(2.0), Some(2.0)]),
    ];
    assert_eq!(timelines.len(), 20);

    let base = chrono::DateTime::parse_from_rfc3339("2015-08-15T00:00:00Z")
        .unwrap()
        .with_timezone(&chrono::Utc);
    let mut reports = Vec::new();
    for (id, label, offsets, expected) in &timelines {
        let mut events = Vec::new();
        for (kind, offset) in EventKind::ALL.iter().zip(offsets) {
            if let Some(minutes) = offset {
                events.push(BugEvent {
                    kind: *kind,
                    ts: base + chrono::Duration::minutes(*minutes),
                });
            }
        }
        events.sort_by_key(|e| (e.ts, e.kind));
        let report = BugReport {
            id: id.to_string(),
            ecosystem: String::new(),
            project: String::new(),
            title: String::new(),
            summary: String::new(),
            label: Some(*label),
            events,
            resolution: Resolution::Fixed,
        };
        let delays = compute_delays(&report).unwrap();
        let got = [delays.dbr, delays.dba, delays.dbc, delays.dbf, delays.dac];
        assert_eq!(&got, expected, "timeline {id}");
        reports.push(report);
    }

    // Box statistics against a sort-based oracle.
    let corpus = Corpus::from_reports(reports.clone(), Source::Memory).unwrap();
    let mut stat_checks = 0;
    for metric in DelayMetric::ALL {
        let stats = delay_stats(&corpus, metric);
        for class in [SEC, GUI, NET] {
            let mut values: Vec<f64> = reports
                .iter()
                .filter(|r| r.label == Some(class))
                .filter_map(|r| compute_delays(r).unwrap().get(metric))
                .collect();
            if values.is_empty() {
                assert!(!stats.per_category.contains_key(&class));
                continue;
            }
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let b = stats.per_category[&class];
            assert_eq!(b.n, values.len());
            assert_eq!(b.min, values[0]);
            assert_eq!(b.max, values[values.len() - 1]);
            assert_eq!(b.q1, quantile(&values, 0.25));
            assert_eq!(b.median, quantile(&values, 0.5));
            assert_eq!(b.q3, quantile(&values, 0.75));
            assert_eq!(b.mean, values.iter().sum::<f64>() / values.len() as f64);
            stat_checks += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        9,
        "twenty hand-built timelines match hand-computed delays",
        true,
        format!("100 delay values, {stat_checks} box summaries, {elapsed:.2?}"),
    );
}

// Criterion 10 (conditional): when a full-scale labeled dataset is provided
// in the documented JSONL schema, 10x10-fold evaluation lands within +-10
// percentage points of the 64% overall macro F reference. Skipped (not
// failed) when the dataset is absent.
#[test]
fn criterion_10_full_scale_dataset_when_available() {
    let path = std::env::var("ROOTCAUSE_DATASET")
        .unwrap_or_else(|_| "data/reference-corpus.jsonl".to_string());
    if !std::path::Path::new(&path).exists() {
        println!(
            "SKIP [10] full-scale reference check (optional dataset not present at {path})"
        );
        return;
    }
    let start = Instant::now();
    let outcome = rootcause::corpus::load_corpus(&path, rootcause::corpus::Format::Jsonl).unwrap();
    let config = EvalConfig {
        runs: 10,
        folds: 10,
        seed: 42,
        ..EvalConfig::default()
    };
    let report = cross_validate(
        &outcome.corpus,
        &PrepConfig::classifier(),
        &Hyperparams::default(),
        &config,
    )
    .unwrap();
    let macro_f = report.overall.f_measure;
    let elapsed = start.elapsed();
    verdict(
        10,
        "full-scale overall macro F within 10 points of the 64% reference",
        (macro_f - 0.64).abs() <= 0.10,
        format!("macro F {macro_f:.4}, {elapsed:.2?}"),
    );
}
