//! Multinomial logistic regression over TF-IDF features.
//!
//! Training minimizes L2-regularized softmax cross-entropy by deterministic
//! full-batch gradient descent with step-halving: a step that would increase
//! the loss is retried at half the rate, so the loss never increases across
//! accepted steps. Weights start at zero (the objective is convex), which
//! makes training bit-reproducible; the seed is recorded for provenance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{smote, LabeledDataset, SmoteConfig};
use crate::corpus::{RootCause, NUM_CLASSES};
use crate::evaluate::{f_measure, stratified_kfold, ConfusionMatrix};
use crate::seeds;
use crate::vectorize::FeatureVector;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data is empty")]
    EmptyData,
    #[error("vector dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training diverged: loss became non-finite (learning rate too high)")]
    Diverged,
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("grid search needs at least 2 folds, got {0}")]
    TooFewFolds(usize),
    #[error("cross-validation error: {0}")]
    Eval(String),
}

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub l2_strength: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub convergence_tol: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            l2_strength: 0.001,
            learning_rate: 1.0,
            max_epochs: 200,
            convergence_tol: 1e-6,
        }
    }
}

/// Trained classifier: per-class weight rows plus bias, in canonical
/// [`RootCause`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    /// `NUM_CLASSES * dim`, row-major by class.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub dim: usize,
    pub hyper: Hyperparams,
    pub seed: u64,
}

impl Model {
    fn logits(&self, x: &FeatureVector) -> [f64; NUM_CLASSES] {
        let mut logits = [0.0; NUM_CLASSES];
        for (class, logit) in logits.iter_mut().enumerate() {
            let row = &self.weights[class * self.dim..(class + 1) * self.dim];
            let mut acc = self.bias[class];
            for &(i, w) in x.entries() {
                acc += row[i as usize] * w;
            }
            *logit = acc;
        }
        logits
    }
}

fn softmax(logits: &[f64; NUM_CLASSES]) -> [f64; NUM_CLASSES] {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_CLASSES];
    let mut sum = 0.0;
    for (o, &l) in out.iter_mut().zip(logits.iter()) {
        *o = (l - max).exp();
        sum += *o;
    }
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// Class probabilities for one feature vector.
pub fn predict_proba(model: &Model, x: &FeatureVector) -> Result<[f64; NUM_CLASSES], ModelError> {
    if x.dimension() != model.dim {
        return Err(ModelError::DimensionMismatch {
            expected: model.dim,
            found: x.dimension(),
        });
    }
    Ok(softmax(&model.logits(x)))
}

/// Predicted category: the argmax of [`predict_proba`], ties resolved by
/// canonical category order.
pub fn predict(model: &Model, x: &FeatureVector) -> Result<RootCause, ModelError> {
    let probs = predict_proba(model, x)?;
    Ok(argmax_class(&probs))
}

/// First class attaining the maximum probability, in canonical order.
pub fn argmax_class(probs: &[f64; NUM_CLASSES]) -> RootCause {
    let mut best = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = i;
        }
    }
    RootCause::from_index(best).unwrap()
}

/// Flattened parameter layout used by the objective: all weight rows, then
/// the bias vector.
fn param_len(dim: usize) -> usize {
    NUM_CLASSES * dim + NUM_CLASSES
}

/// Regularized mean cross-entropy at `params` (weights ++ bias).
pub fn objective(params: &[f64], data: &LabeledDataset, l2_strength: f64) -> f64 {
    let n = data.len();
    let dim = data.vectors[0].dimension();
    debug_assert_eq!(params.len(), param_len(dim));
    let (weights, bias) = params.split_at(NUM_CLASSES * dim);
    let mut loss = 0.0;
    for (x, label) in data.vectors.iter().zip(&data.labels) {
        let mut logits = [0.0; NUM_CLASSES];
        for (class, logit) in logits.iter_mut().enumerate() {
            let row = &weights[class * dim..(class + 1) * dim];
            let mut acc = bias[class];
            for &(i, w) in x.entries() {
                acc += row[i as usize] * w;
            }
            *logit = acc;
        }
        let probs = softmax(&logits);
        loss -= probs[label.index()].ln();
    }
    loss /= n as f64;
    let penalty: f64 = weights.iter().map(|w| w * w).sum();
    loss + 0.5 * l2_strength * penalty
}

/// Analytic gradient of [`objective`]. The bias is not regularized.
pub fn objective_gradient(params: &[f64], data: &LabeledDataset, l2_strength: f64) -> Vec<f64> {
    let n = data.len();
    let dim = data.vectors[0].dimension();
    debug_assert_eq!(params.len(), param_len(dim));
    let (weights, bias) = params.split_at(NUM_CLASSES * dim);
    let mut grad = vec![0.0; params.len()];
    let scale = 1.0 / n as f64;
    for (x, label) in data.vectors.iter().zip(&data.labels) {
        let mut logits = [0.0; NUM_CLASSES];
        for (class, logit) in logits.iter_mut().enumerate() {
            let row = &weights[class * dim..(class + 1) * dim];
            let mut acc = bias[class];
            for &(i, w) in x.entries() {
                acc += row[i as usize] * w;
            }
            *logit = acc;
        }
        let probs = softmax(&logits);
        for class in 0..NUM_CLASSES {
            let delta = scale * (probs[class] - if class == label.index() { 1.0 } else { 0.0 });
            for &(i, w) in x.entries() {
                grad[class * dim + i as usize] += delta * w;
            }
            grad[NUM_CLASSES * dim + class] += delta;
        }
    }
    for (g, w) in grad[..NUM_CLASSES * dim].iter_mut().zip(weights) {
        *g += l2_strength * w;
    }
    grad
}

/// Fits the classifier on a labeled dataset. Absent classes keep zero rows
/// but remain in the output space.
pub fn train(data: &LabeledDataset, hyper: &Hyperparams, seed: u64) -> Result<Model, ModelError> {
    if data.is_empty() {
        return Err(ModelError::EmptyData);
    }
    let dim = data.vectors[0].dimension();
    for v in &data.vectors {
        if v.dimension() != dim {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                found: v.dimension(),
            });
        }
    }

    let mut params = vec![0.0; param_len(dim)];
    let mut loss = objective(&params, data, hyper.l2_strength);
    if !loss.is_finite() {
        return Err(ModelError::Diverged);
    }

    for _ in 0..hyper.max_epochs {
        let grad = objective_gradient(&params, data, hyper.l2_strength);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(ModelError::Diverged);
        }
        let mut rate = hyper.learning_rate;
        let mut candidate: Vec<f64>;
        let mut candidate_loss;
        // Halve the step until the loss does not increase.
        loop {
            candidate = params
                .iter()
                .zip(&grad)
                .map(|(p, g)| p - rate * g)
                .collect();
            candidate_loss = objective(&candidate, data, hyper.l2_strength);
            if candidate_loss.is_finite() && candidate_loss <= loss {
                break;
            }
            rate *= 0.5;
            if rate < 1e-18 {
                // No descent possible at any step size; already at a minimum.
                candidate = params.clone();
                candidate_loss = loss;
                break;
            }
        }
        let improvement = loss - candidate_loss;
        params = candidate;
        loss = candidate_loss;
        if improvement < hyper.convergence_tol {
            break;
        }
    }

    let bias = params.split_off(NUM_CLASSES * dim);
    Ok(Model {
        weights: params,
        bias,
        dim,
        hyper: hyper.clone(),
        seed,
    })
}

/// Cartesian hyperparameter grid. Combinations are enumerated with
/// `l2_strength` outermost, then `learning_rate`, `max_epochs`, and
/// `convergence_tol`; ties on score pick the earliest combination.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamGrid {
    pub l2_strength: Vec<f64>,
    pub learning_rate: Vec<f64>,
    pub max_epochs: Vec<usize>,
    pub convergence_tol: Vec<f64>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        let base = Hyperparams::default();
        ParamGrid {
            l2_strength: vec![0.0001, 0.001, 0.01, 0.1, 1.0],
            learning_rate: vec![0.1, 1.0],
            max_epochs: vec![base.max_epochs],
            convergence_tol: vec![base.convergence_tol],
        }
    }
}

impl ParamGrid {
    fn combinations(&self) -> Vec<Hyperparams> {
        let mut out = Vec::new();
        for &l2 in &self.l2_strength {
            for &lr in &self.learning_rate {
                for &epochs in &self.max_epochs {
                    for &tol in &self.convergence_tol {
                        out.push(Hyperparams {
                            l2_strength: l2,
                            learning_rate: lr,
                            max_epochs: epochs,
                            convergence_tol: tol,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One scored grid combination.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub hyper: Hyperparams,
    /// Mean macro F-measure over the inner folds; 0 when any fold diverged.
    pub score: f64,
    pub diverged_folds: usize,
}

/// Scores every grid combination by inner stratified cross-validation on
/// macro F-measure and returns the best one with the full score table.
/// SMOTE, when given, is applied inside each inner training fold.
pub fn grid_search(
    grid: &ParamGrid,
    data: &LabeledDataset,
    folds: usize,
    seed: u64,
    smote_config: Option<&SmoteConfig>,
) -> Result<(Hyperparams, Vec<GridRow>), ModelError> {
    let combinations = grid.combinations();
    if combinations.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    if folds < 2 {
        return Err(ModelError::TooFewFolds(folds));
    }
    let fold_sets = stratified_kfold(&data.labels, folds, seed)
        .map_err(|e| ModelError::Eval(e.to_string()))?;

    let mut table = Vec::with_capacity(combinations.len());
    for hyper in &combinations {
        let mut confusion = ConfusionMatrix::new();
        let mut diverged_folds = 0;
        for (fold_idx, test_idx) in fold_sets.iter().enumerate() {
            let in_test = |i: usize| test_idx.binary_search(&i).is_ok();
            let mut train_vectors = Vec::new();
            let mut train_labels = Vec::new();
            for i in 0..data.len() {
                if !in_test(i) {
                    train_vectors.push(data.vectors[i].clone());
                    train_labels.push(data.labels[i]);
                }
            }
            let mut train_set = LabeledDataset::from_parts(train_vectors, train_labels)
                .map_err(|e| ModelError::Eval(e.to_string()))?;
            if let Some(cfg) = smote_config {
                if let Ok(outcome) = smote(
                    &train_set,
                    cfg,
                    seeds::component_seed(seed, seeds::SMOTE, fold_idx as u64),
                ) {
                    train_set = outcome.data;
                }
            }
            match train(
                &train_set,
                hyper,
                seeds::component_seed(seed, seeds::TRAIN, fold_idx as u64),
            ) {
                Err(ModelError::Diverged) => diverged_folds += 1,
                Err(e) => return Err(e),
                Ok(model) => {
                    for &i in test_idx {
                        let predicted = predict(&model, &data.vectors[i])?;
                        confusion.add(data.labels[i], predicted);
                    }
                }
            }
        }
        let score = if diverged_folds > 0 {
            0.0
        } else {
            let macro_f: f64 = RootCause::ALL
                .iter()
                .map(|&c| f_measure(&confusion, c))
                .sum::<f64>()
                / NUM_CLASSES as f64;
            macro_f
        };
        table.push(GridRow {
            hyper: hyper.clone(),
            score,
            diverged_folds,
        });
    }

    let best = table
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.score
                .partial_cmp(&b.score)
                .unwrap()
                .then(ib.cmp(ia)) // earlier combination wins ties
        })
        .map(|(_, row)| row.hyper.clone())
        .unwrap();
    Ok((best, table))
}
