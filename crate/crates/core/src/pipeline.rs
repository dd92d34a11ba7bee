//! End-to-end classifier pipeline: normalization settings, fitted vocabulary,
//! and trained model, with versioned on-disk formats.
//!
//! The model file pins the vocabulary by content hash and the term lists by
//! hash, so classify-time preprocessing provably matches train-time
//! preprocessing. The vocabulary itself lives in its own JSON file.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{smote, BalanceError, LabeledDataset, SmoteConfig};
use crate::corpus::{BugReport, Corpus, RootCause, NUM_CLASSES};
use crate::model::{
    grid_search, predict_proba, train, GridRow, Hyperparams, Model, ModelError, ParamGrid,
};
use crate::seeds;
use crate::textprep::{normalize, Pipeline, PrepConfig};
use crate::vectorize::{fit_vocabulary, tfidf, VectorizeError, Vocabulary};

const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("corpus has no labeled reports to train on")]
    NoLabeledReports,
    #[error("model file does not match vocabulary: expected hash {expected}, found {found}")]
    VocabHashMismatch { expected: String, found: String },
    #[error("preprocessing mismatch: {0}; pass the term lists the model was trained with")]
    PrepMismatch(String),
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn term_list_hash(terms: &BTreeSet<String>) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for term in terms {
        hasher.update(term.as_bytes());
        hasher.update(b"\n");
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Preprocessing fingerprint stored in the model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepSettings {
    pub pipeline: Pipeline,
    pub min_token_len: usize,
    pub spell_correction: bool,
    pub pos_filter: bool,
    pub stopword_hash: String,
    pub keyword_hash: String,
    pub lexicon_hash: String,
    pub include_title: bool,
}

impl PrepSettings {
    fn from_config(config: &PrepConfig, include_title: bool) -> PrepSettings {
        PrepSettings {
            pipeline: config.pipeline,
            min_token_len: config.min_token_len,
            spell_correction: config.spell_correction,
            pos_filter: config.pos_filter,
            stopword_hash: term_list_hash(&config.stopwords),
            keyword_hash: term_list_hash(&config.keywords),
            lexicon_hash: term_list_hash(&config.lexicon),
            include_title,
        }
    }

    fn verify(&self, config: &PrepConfig) -> Result<(), PipelineError> {
        let current = PrepSettings::from_config(config, self.include_title);
        if current != *self {
            let mut mismatches = Vec::new();
            if current.stopword_hash != self.stopword_hash {
                mismatches.push("stopword list");
            }
            if current.keyword_hash != self.keyword_hash {
                mismatches.push("keyword list");
            }
            if current.lexicon_hash != self.lexicon_hash {
                mismatches.push("word-class lexicon");
            }
            if current.pipeline != self.pipeline
                || current.min_token_len != self.min_token_len
                || current.spell_correction != self.spell_correction
                || current.pos_filter != self.pos_filter
            {
                mismatches.push("pipeline settings");
            }
            return Err(PipelineError::PrepMismatch(mismatches.join(", ")));
        }
        Ok(())
    }
}

/// Training options beyond the optimizer hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub min_df: u32,
    pub max_df_ratio: f64,
    pub l2_normalize: bool,
    /// `None` trains on the raw class balance.
    pub smote: Option<SmoteConfig>,
    pub include_title: bool,
    /// When set, grid search picks the hyperparameters first.
    pub grid: Option<ParamGrid>,
    pub grid_folds: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            min_df: 2,
            max_df_ratio: 0.95,
            l2_normalize: false,
            smote: Some(SmoteConfig::default()),
            include_title: false,
            grid: None,
            grid_folds: 5,
        }
    }
}

/// What training reported back.
#[derive(Debug)]
pub struct TrainReport {
    pub hyper: Hyperparams,
    pub grid_table: Option<Vec<GridRow>>,
    pub vocabulary_size: usize,
    pub training_rows: usize,
    pub synthetic_rows: usize,
    pub warnings: Vec<String>,
}

/// One classified report.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub label: RootCause,
    pub probabilities: Vec<f64>,
    /// True when the summary normalized to an empty token stream (the
    /// prediction then rests on the bias alone).
    pub zero_vector: bool,
}

/// A trained classifier with everything needed to score new reports.
#[derive(Debug, Clone)]
pub struct ClassifierPipeline {
    pub model: Model,
    pub vocab: Vocabulary,
    pub prep: PrepConfig,
    pub include_title: bool,
    pub l2_normalize: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    root_cause_order: Vec<String>,
    vocab_hash: String,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    hyperparams: Hyperparams,
    seed: u64,
    prep: PrepSettings,
    l2_normalize: bool,
}

/// Trains the full pipeline on the labeled subset of a corpus.
pub fn train_pipeline(
    corpus: &Corpus,
    prep: PrepConfig,
    hyper: &Hyperparams,
    options: &TrainOptions,
    seed: u64,
) -> Result<(ClassifierPipeline, TrainReport), PipelineError> {
    let labeled = corpus.labeled_subset();
    if labeled.is_empty() {
        return Err(PipelineError::NoLabeledReports);
    }
    let streams: Vec<_> = labeled
        .iter()
        .map(|r| normalize(&r.text(options.include_title), &prep).with_source(r.id.clone()))
        .collect();
    let vocab = fit_vocabulary(&streams, options.min_df, options.max_df_ratio)?;
    let vectors: Vec<_> = streams
        .iter()
        .map(|s| {
            let v = tfidf(s, &vocab);
            if options.l2_normalize {
                v.l2_normalized()
            } else {
                v
            }
        })
        .collect();
    let labels: Vec<RootCause> = labeled.iter().map(|r| r.label.unwrap()).collect();
    let mut dataset = LabeledDataset::from_parts(vectors, labels)?;

    let mut warnings = Vec::new();
    let mut synthetic_rows = 0;
    if let Some(smote_config) = &options.smote {
        match smote(&dataset, smote_config, seeds::component_seed(seed, seeds::SMOTE, 0)) {
            Ok(outcome) => {
                warnings.extend(outcome.warnings);
                synthetic_rows = outcome.data.len() - dataset.len();
                dataset = outcome.data;
            }
            Err(e) => warnings.push(format!("balancing skipped: {e}")),
        }
    }

    let (hyper, grid_table) = match &options.grid {
        None => (hyper.clone(), None),
        Some(grid) => {
            let (best, table) = grid_search(
                grid,
                &dataset,
                options.grid_folds,
                seed,
                options.smote.as_ref(),
            )?;
            (best, Some(table))
        }
    };

    let model = train(&dataset, &hyper, seeds::component_seed(seed, seeds::TRAIN, 0))?;
    let report = TrainReport {
        hyper: hyper.clone(),
        grid_table,
        vocabulary_size: vocab.len(),
        training_rows: dataset.len(),
        synthetic_rows,
        warnings,
    };
    Ok((
        ClassifierPipeline {
            model,
            vocab,
            prep,
            include_title: options.include_title,
            l2_normalize: options.l2_normalize,
        },
        report,
    ))
}

impl ClassifierPipeline {
    /// Scores free text.
    pub fn classify_text(&self, text: &str) -> Result<Classification, PipelineError> {
        let stream = normalize(text, &self.prep);
        let mut vector = tfidf(&stream, &self.vocab);
        if self.l2_normalize {
            vector = vector.l2_normalized();
        }
        let zero_vector = vector.is_zero();
        let probabilities = predict_proba(&self.model, &vector)?;
        let label = crate::model::argmax_class(&probabilities);
        Ok(Classification {
            label,
            probabilities: probabilities.to_vec(),
            zero_vector,
        })
    }

    /// Scores a report, honoring the pipeline's title setting.
    pub fn classify_report(&self, report: &BugReport) -> Result<Classification, PipelineError> {
        self.classify_text(&report.text(self.include_title))
    }

    /// Writes the model and vocabulary files.
    pub fn save(
        &self,
        model_path: impl AsRef<Path>,
        vocab_path: impl AsRef<Path>,
    ) -> Result<(), PipelineError> {
        self.vocab.save(vocab_path)?;
        let dim = self.model.dim;
        let file = ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            root_cause_order: RootCause::ALL.iter().map(|c| c.as_str().to_string()).collect(),
            vocab_hash: self.vocab.content_hash(),
            weights: (0..NUM_CLASSES)
                .map(|c| self.model.weights[c * dim..(c + 1) * dim].to_vec())
                .collect(),
            bias: self.model.bias.clone(),
            hyperparams: self.model.hyper.clone(),
            seed: self.model.seed,
            prep: PrepSettings::from_config(&self.prep, self.include_title),
            l2_normalize: self.l2_normalize,
        };
        let json =
            serde_json::to_string_pretty(&file).map_err(|e| PipelineError::Malformed(e.to_string()))?;
        std::fs::write(model_path, json)?;
        Ok(())
    }

    /// Loads a model/vocabulary pair, verifying the vocabulary content hash,
    /// the class order, and that `prep` matches the training-time settings.
    pub fn load(
        model_path: impl AsRef<Path>,
        vocab_path: impl AsRef<Path>,
        prep: PrepConfig,
    ) -> Result<ClassifierPipeline, PipelineError> {
        let text = std::fs::read_to_string(model_path.as_ref())?;
        let file: ModelFile =
            serde_json::from_str(&text).map_err(|e| PipelineError::Malformed(e.to_string()))?;
        if file.schema_version != MODEL_SCHEMA_VERSION {
            return Err(PipelineError::Malformed(format!(
                "unsupported model schema version {}",
                file.schema_version
            )));
        }
        let expected_order: Vec<String> =
            RootCause::ALL.iter().map(|c| c.as_str().to_string()).collect();
        if file.root_cause_order != expected_order {
            return Err(PipelineError::Malformed(
                "unexpected root-cause order".to_string(),
            ));
        }
        let vocab = Vocabulary::load(vocab_path)?;
        let found = vocab.content_hash();
        if found != file.vocab_hash {
            return Err(PipelineError::VocabHashMismatch {
                expected: file.vocab_hash,
                found,
            });
        }
        file.prep.verify(&prep)?;
        let dim = vocab.len();
        if file.weights.len() != NUM_CLASSES
            || file.weights.iter().any(|row| row.len() != dim)
            || file.bias.len() != NUM_CLASSES
        {
            return Err(PipelineError::Malformed(
                "weight dimensions do not match the vocabulary".to_string(),
            ));
        }
        let include_title = file.prep.include_title;
        Ok(ClassifierPipeline {
            model: Model {
                weights: file.weights.into_iter().flatten().collect(),
                bias: file.bias,
                dim,
                hyper: file.hyperparams,
                seed: file.seed,
            },
            vocab,
            prep,
            include_title,
            l2_normalize: file.l2_normalize,
        })
    }
}
