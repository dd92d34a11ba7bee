//! Repeated stratified k-fold cross-validation and the metric suite:
//! per-class precision, recall, F-measure, AUC-ROC, and MCC.
//!
//! Conventions (also printed in the report footer): zero-denominator
//! precision/recall/F and zero-denominator MCC report 0; AUC is omitted for a
//! class whose pooled truth vector is single-class. Within a run, fold
//! confusion counts are summed before computing per-class metrics; AUC pools
//! the run's predicted probabilities per class. Per-class values are then
//! averaged over runs, and the overall row is the unweighted macro-average
//! over the nine classes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::balance::{smote, LabeledDataset, SmoteConfig};
use crate::corpus::{Corpus, RootCause, NUM_CLASSES};
use crate::model::{predict_proba, train, Hyperparams, ModelError};
use crate::seeds;
use crate::textprep::{normalize, PrepConfig};
use crate::vectorize::{fit_vocabulary, tfidf};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("corpus has no labeled reports")]
    EmptyLabeledSubset,
    #[error("fold count must be at least 2, got {0}")]
    BadFoldCount(usize),
    #[error("cannot split {total} instances into {k} folds")]
    MoreFoldsThanInstances { k: usize, total: usize },
    #[error("no fold trained successfully")]
    NoSuccessfulFolds,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// 9x9 confusion counts; rows are actual classes, columns predicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self::new()
    }
}

impl ConfusionMatrix {
    pub fn new() -> ConfusionMatrix {
        ConfusionMatrix {
            counts: [[0; NUM_CLASSES]; NUM_CLASSES],
        }
    }

    pub fn from_counts(counts: [[u64; NUM_CLASSES]; NUM_CLASSES]) -> ConfusionMatrix {
        ConfusionMatrix { counts }
    }

    pub fn add(&mut self, actual: RootCause, predicted: RootCause) {
        self.counts[actual.index()][predicted.index()] += 1;
    }

    pub fn count(&self, actual: RootCause, predicted: RootCause) -> u64 {
        self.counts[actual.index()][predicted.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (cell, other_cell) in row.iter_mut().zip(other_row) {
                *cell += other_cell;
            }
        }
    }

    /// One-vs-rest quadrants `(tp, fp, fn, tn)` for a class.
    pub fn one_vs_rest(&self, class: RootCause) -> (u64, u64, u64, u64) {
        let c = class.index();
        let tp = self.counts[c][c];
        let fp: u64 = (0..NUM_CLASSES)
            .filter(|&r| r != c)
            .map(|r| self.counts[r][c])
            .sum();
        let fn_: u64 = (0..NUM_CLASSES)
            .filter(|&p| p != c)
            .map(|p| self.counts[c][p])
            .sum();
        let tn = self.total() - tp - fp - fn_;
        (tp, fp, fn_, tn)
    }
}

/// TP / (TP + FP); 0 when the denominator is 0.
pub fn precision(cm: &ConfusionMatrix, class: RootCause) -> f64 {
    let (tp, fp, _, _) = cm.one_vs_rest(class);
    if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    }
}

/// TP / (TP + FN); 0 when the denominator is 0.
pub fn recall(cm: &ConfusionMatrix, class: RootCause) -> f64 {
    let (tp, _, fn_, _) = cm.one_vs_rest(class);
    if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(cm: &ConfusionMatrix, class: RootCause) -> f64 {
    let p = precision(cm, class);
    let r = recall(cm, class);
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Matthews correlation coefficient on the one-vs-rest binarization; 0 when
/// the denominator is 0.
pub fn mcc(cm: &ConfusionMatrix, class: RootCause) -> f64 {
    let (tp, fp, fn_, tn) = cm.one_vs_rest(class);
    let numerator = (tp as i128 * tn as i128 - fp as i128 * fn_ as i128) as f64;
    let denominator = ((tp + fp) as f64 * (tp + fn_) as f64 * (tn + fp) as f64 * (tn + fn_) as f64)
        .sqrt();
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

/// One-vs-rest AUC by the Mann-Whitney rank statistic, tied scores
/// contributing one half. `None` when the truth vector is single-class.
pub fn auc_roc(scores: &[f64], truths: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), truths.len());
    let n_pos = truths.iter().filter(|&&t| t).count() as u64;
    let n_neg = truths.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // Doubled average ranks keep everything in integers: the rank block
    // [i+1, j] has doubled mean i+1+j.
    let mut doubled_rank_sum: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let doubled_rank = (i + 1 + j) as u64;
        for &idx in &order[i..j] {
            if truths[idx] {
                doubled_rank_sum += doubled_rank;
            }
        }
        i = j;
    }
    let numerator = doubled_rank_sum - n_pos * (n_pos + 1);
    Some(numerator as f64 / (2 * n_pos * n_neg) as f64)
}

/// Splits indices into k disjoint folds preserving class proportions:
/// per-class counts across folds differ by at most one. Deterministic for a
/// given seed; folds come back sorted.
pub fn stratified_kfold(
    labels: &[RootCause],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::BadFoldCount(k));
    }
    if k > labels.len() {
        return Err(EvalError::MoreFoldsThanInstances {
            k,
            total: labels.len(),
        });
    }
    let mut folds = vec![Vec::new(); k];
    let mut offset = 0usize;
    for class in RootCause::ALL {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.is_empty() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seeds::component_seed(
            seed,
            seeds::STRATIFY,
            class.index() as u64,
        ));
        members.shuffle(&mut rng);
        // Continue dealing where the previous class left off so overall fold
        // sizes also stay within one of each other.
        for idx in members {
            folds[offset % k].push(idx);
            offset += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Cross-validation settings.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub folds: usize,
    pub runs: usize,
    pub seed: u64,
    /// `None` disables training-fold balancing.
    pub smote: Option<SmoteConfig>,
    pub min_df: u32,
    pub max_df_ratio: f64,
    pub l2_normalize: bool,
    pub include_title: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 10,
            runs: 100,
            seed: 42,
            smote: Some(SmoteConfig::default()),
            min_df: 2,
            max_df_ratio: 0.95,
            l2_normalize: false,
            include_title: false,
        }
    }
}

/// Metric values for one class (or the overall macro row).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub auc_roc: Option<f64>,
    pub mcc: f64,
}

/// Aggregated cross-validation results.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Indexed by canonical class order.
    pub per_class: Vec<ClassMetrics>,
    pub overall: ClassMetrics,
    pub runs: usize,
    pub folds: usize,
    pub seed: u64,
    pub warnings: Vec<String>,
}

struct RunOutcome {
    metrics: Vec<ClassMetrics>,
    warnings: Vec<String>,
    successful_folds: usize,
}

/// Repeated stratified k-fold cross-validation of the full pipeline.
///
/// For each run `r` the run seed is `seed + r`. Within a fold, the
/// vocabulary is fitted and SMOTE applied on the training split only.
pub fn cross_validate(
    corpus: &Corpus,
    prep: &PrepConfig,
    hyper: &Hyperparams,
    config: &EvalConfig,
) -> Result<MetricsReport, EvalError> {
    let labeled = corpus.labeled_subset();
    if labeled.is_empty() {
        return Err(EvalError::EmptyLabeledSubset);
    }
    let labels: Vec<RootCause> = labeled.iter().map(|r| r.label.unwrap()).collect();
    let streams: Vec<_> = labeled
        .iter()
        .map(|r| normalize(&r.text(config.include_title), prep).with_source(r.id.clone()))
        .collect();

    let outcomes: Result<Vec<RunOutcome>, EvalError> = (0..config.runs)
        .into_par_iter()
        .map(|run| run_once(run, &labels, &streams, prep, hyper, config))
        .collect();
    let outcomes = outcomes?;

    let successful: usize = outcomes.iter().map(|o| o.successful_folds).sum();
    if successful == 0 {
        return Err(EvalError::NoSuccessfulFolds);
    }

    let mut warnings = Vec::new();
    for outcome in &outcomes {
        warnings.extend(outcome.warnings.iter().cloned());
    }

    let per_class: Vec<ClassMetrics> = (0..NUM_CLASSES)
        .map(|c| {
            let runs = config.runs as f64;
            let mean = |f: &dyn Fn(&ClassMetrics) -> f64| {
                outcomes.iter().map(|o| f(&o.metrics[c])).sum::<f64>() / runs
            };
            let aucs: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.metrics[c].auc_roc)
                .collect();
            ClassMetrics {
                precision: mean(&|m| m.precision),
                recall: mean(&|m| m.recall),
                f_measure: mean(&|m| m.f_measure),
                auc_roc: if aucs.is_empty() {
                    None
                } else {
                    Some(aucs.iter().sum::<f64>() / aucs.len() as f64)
                },
                mcc: mean(&|m| m.mcc),
            }
        })
        .collect();

    let overall = macro_average(&per_class);
    Ok(MetricsReport {
        per_class,
        overall,
        runs: config.runs,
        folds: config.folds,
        seed: config.seed,
        warnings,
    })
}

fn macro_average(per_class: &[ClassMetrics]) -> ClassMetrics {
    let n = per_class.len() as f64;
    let aucs: Vec<f64> = per_class.iter().filter_map(|m| m.auc_roc).collect();
    ClassMetrics {
        precision: per_class.iter().map(|m| m.precision).sum::<f64>() / n,
        recall: per_class.iter().map(|m| m.recall).sum::<f64>() / n,
        f_measure: per_class.iter().map(|m| m.f_measure).sum::<f64>() / n,
        auc_roc: if aucs.is_empty() {
            None
        } else {
            Some(aucs.iter().sum::<f64>() / aucs.len() as f64)
        },
        mcc: per_class.iter().map(|m| m.mcc).sum::<f64>() / n,
    }
}

fn run_once(
    run: usize,
    labels: &[RootCause],
    streams: &[crate::textprep::TokenStream],
    _prep: &PrepConfig,
    hyper: &Hyperparams,
    config: &EvalConfig,
) -> Result<RunOutcome, EvalError> {
    let run_seed = config.seed.wrapping_add(run as u64);
    let folds = stratified_kfold(labels, config.folds, run_seed)?;

    let mut confusion = ConfusionMatrix::new();
    let mut pooled: Vec<Vec<(f64, bool)>> = vec![Vec::new(); NUM_CLASSES];
    let mut warnings = Vec::new();
    let mut successful_folds = 0;

    for (fold_idx, test_idx) in folds.iter().enumerate() {
        let in_test = |i: usize| test_idx.binary_search(&i).is_ok();
        let train_streams: Vec<_> = (0..labels.len())
            .filter(|&i| !in_test(i))
            .map(|i| streams[i].clone())
            .collect();
        let train_labels: Vec<RootCause> = (0..labels.len())
            .filter(|&i| !in_test(i))
            .map(|i| labels[i])
            .collect();

        let vocab = match fit_vocabulary(&train_streams, config.min_df, config.max_df_ratio) {
            Ok(v) => v,
            Err(e) => {
                warnings.push(format!("run {run} fold {fold_idx}: {e}"));
                continue;
            }
        };
        let vectorize_one = |stream: &crate::textprep::TokenStream| {
            let v = tfidf(stream, &vocab);
            if config.l2_normalize {
                v.l2_normalized()
            } else {
                v
            }
        };
        let train_vectors: Vec<_> = train_streams.iter().map(&vectorize_one).collect();
        let mut train_set = LabeledDataset::from_parts(train_vectors, train_labels)
            .expect("parallel vectors and labels");

        if let Some(smote_config) = &config.smote {
            match smote(
                &train_set,
                smote_config,
                seeds::component_seed(run_seed, seeds::SMOTE, fold_idx as u64),
            ) {
                Ok(outcome) => {
                    for w in outcome.warnings {
                        warnings.push(format!("run {run} fold {fold_idx}: {w}"));
                    }
                    train_set = outcome.data;
                }
                Err(e) => {
                    warnings.push(format!(
                        "run {run} fold {fold_idx}: balancing skipped: {e}"
                    ));
                }
            }
        }

        let model = match train(
            &train_set,
            hyper,
            seeds::component_seed(run_seed, seeds::TRAIN, fold_idx as u64),
        ) {
            Ok(m) => m,
            Err(e) => {
                warnings.push(format!("run {run} fold {fold_idx}: {e}"));
                continue;
            }
        };

        for &i in test_idx {
            let x = vectorize_one(&streams[i]);
            let probs = predict_proba(&model, &x)?;
            let predicted = crate::model::argmax_class(&probs);
            confusion.add(labels[i], predicted);
            for (class, pool) in pooled.iter_mut().enumerate() {
                pool.push((probs[class], labels[i].index() == class));
            }
        }
        successful_folds += 1;
    }

    let metrics = RootCause::ALL
        .iter()
        .map(|&class| {
            let (scores, truths): (Vec<f64>, Vec<bool>) =
                pooled[class.index()].iter().cloned().unzip();
            ClassMetrics {
                precision: precision(&confusion, class),
                recall: recall(&confusion, class),
                f_measure: f_measure(&confusion, class),
                auc_roc: if scores.is_empty() {
                    None
                } else {
                    auc_roc(&scores, &truths)
                },
                mcc: mcc(&confusion, class),
            }
        })
        .collect();

    Ok(RunOutcome {
        metrics,
        warnings,
        successful_folds,
    })
}

impl MetricsReport {
    /// Human-readable table with values as integer percentages.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let pct = |v: f64| format!("{:>4}", (v * 100.0).round() as i64);
        let auc = |v: Option<f64>| match v {
            Some(v) => format!("{:>4}", (v * 100.0).round() as i64),
            None => format!("{:>4}", "-"),
        };
        out.push_str(&format!(
            "{:<30} {:>4} {:>4} {:>4} {:>4} {:>4}\n",
            "Categories", "P", "R", "F-M", "AR", "MCC"
        ));
        for (class, m) in RootCause::ALL.iter().zip(&self.per_class) {
            out.push_str(&format!(
                "{:<30} {} {} {} {} {}\n",
                class.human_label(),
                pct(m.precision),
                pct(m.recall),
                pct(m.f_measure),
                auc(m.auc_roc),
                pct(m.mcc)
            ));
        }
        out.push_str(&format!(
            "{:<30} {} {} {} {} {}\n",
            "Overall",
            pct(self.overall.precision),
            pct(self.overall.recall),
            pct(self.overall.f_measure),
            auc(self.overall.auc_roc),
            pct(self.overall.mcc)
        ));
        out.push_str(&format!(
            "\nMeans over {} run(s) of stratified {}-fold cross-validation (seed {}).\n",
            self.runs, self.folds, self.seed
        ));
        out.push_str(
            "Zero-denominator precision/recall/F and MCC report 0; AUC is omitted for single-class pools.\n",
        );
        if !self.warnings.is_empty() {
            out.push_str(&format!("Warnings: {}\n", self.warnings.len()));
        }
        out
    }

    /// Machine-readable form with full-precision values.
    pub fn to_json(&self) -> serde_json::Value {
        let classes: Vec<serde_json::Value> = RootCause::ALL
            .iter()
            .zip(&self.per_class)
            .map(|(class, m)| {
                serde_json::json!({
                    "category": class.as_str(),
                    "precision": m.precision,
                    "recall": m.recall,
                    "f_measure": m.f_measure,
                    "auc_roc": m.auc_roc,
                    "mcc": m.mcc,
                })
            })
            .collect();
        serde_json::json!({
            "runs": self.runs,
            "folds": self.folds,
            "seed": self.seed,
            "classes": classes,
            "overall": {
                "precision": self.overall.precision,
                "recall": self.overall.recall,
                "f_measure": self.overall.f_measure,
                "auc_roc": self.overall.auc_roc,
                "mcc": self.overall.mcc,
            },
            "warnings": self.warnings,
        })
    }
}
