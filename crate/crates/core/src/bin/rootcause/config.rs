//! Layered run configuration: built-in defaults, then the TOML config file,
//! then CLI flags. `--dump-config` prints the effective result as TOML.

use serde::{Deserialize, Serialize};

use rootcause::balance::{DistanceMetric, SmoteConfig};
use rootcause::evaluate::EvalConfig;
use rootcause::model::{Hyperparams, ParamGrid};
use rootcause::pipeline::TrainOptions;
use rootcause::textprep::{self, PrepConfig};
use rootcause::topics::GaConfig;

/// The flat key set shared by the config file and the effective dump.
/// Every field has a default, so partial files are fine.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads for parallel sections; 0 means all cores.
    pub jobs: usize,
    pub prep: PrepSection,
    pub vectorize: VectorizeSection,
    pub smote: SmoteSection,
    pub model: ModelSection,
    pub evaluate: EvaluateSection,
    pub topics: TopicsSection,
    pub tracker: TrackerSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            jobs: 0,
            prep: PrepSection::default(),
            vectorize: VectorizeSection::default(),
            smote: SmoteSection::default(),
            model: ModelSection::default(),
            evaluate: EvaluateSection::default(),
            topics: TopicsSection::default(),
            tracker: TrackerSection::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepSection {
    pub min_token_len: usize,
    pub spell_correction: bool,
    pub pos_filter: bool,
    pub include_title: bool,
    /// Optional list-override files, one term per line.
    pub stopwords: Option<String>,
    pub keywords: Option<String>,
    pub lexicon: Option<String>,
}

impl Default for PrepSection {
    fn default() -> Self {
        PrepSection {
            min_token_len: 2,
            spell_correction: false,
            pos_filter: false,
            include_title: false,
            stopwords: None,
            keywords: None,
            lexicon: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VectorizeSection {
    pub min_df: u32,
    pub max_df_ratio: f64,
    pub l2_normalize: bool,
}

impl Default for VectorizeSection {
    fn default() -> Self {
        VectorizeSection {
            min_df: 2,
            max_df_ratio: 0.95,
            l2_normalize: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoteSection {
    pub enabled: bool,
    pub k: usize,
    pub metric: DistanceMetric,
}

impl Default for SmoteSection {
    fn default() -> Self {
        SmoteSection {
            enabled: true,
            k: 5,
            metric: DistanceMetric::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub l2_strength: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub convergence_tol: f64,
    pub grid_search: bool,
    pub grid_folds: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        let h = Hyperparams::default();
        ModelSection {
            l2_strength: h.l2_strength,
            learning_rate: h.learning_rate,
            max_epochs: h.max_epochs,
            convergence_tol: h.convergence_tol,
            grid_search: false,
            grid_folds: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub runs: usize,
    pub folds: usize,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection { runs: 100, folds: 10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicsSection {
    pub population: usize,
    pub generations: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub lda_iterations: usize,
    pub top_terms: usize,
}

impl Default for TopicsSection {
    fn default() -> Self {
        let ga = GaConfig::default();
        TopicsSection {
            population: ga.population,
            generations: ga.generations,
            k_min: ga.k_min,
            k_max: ga.k_max,
            mutation_rate: ga.mutation_rate,
            elitism: ga.elitism,
            lda_iterations: 500,
            top_terms: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerSection {
    pub page_size: usize,
    pub max_retries: u32,
    pub retry_base_ms: u64,
    pub token: Option<String>,
}

impl Default for TrackerSection {
    fn default() -> Self {
        TrackerSection {
            page_size: 100,
            max_retries: 3,
            retry_base_ms: 500,
            token: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &str) -> Result<RunConfig, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("cannot read config {path}: {e}"))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {path}: {e}"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Builds the normalization config for the given pipeline, applying any
    /// list-override files.
    pub fn prep_config(
        &self,
        pipeline: rootcause::textprep::Pipeline,
    ) -> Result<PrepConfig, String> {
        let mut config = match pipeline {
            rootcause::textprep::Pipeline::Classifier => PrepConfig::classifier(),
            rootcause::textprep::Pipeline::Lda => PrepConfig::lda(),
        };
        config.min_token_len = self.prep.min_token_len;
        config.spell_correction = self.prep.spell_correction;
        config.pos_filter = self.prep.pos_filter;
        let load = |path: &str| {
            textprep::load_term_list(path).map_err(|e| format!("cannot read term list {path}: {e}"))
        };
        if let Some(path) = &self.prep.stopwords {
            config.stopwords = load(path)?;
        }
        if let Some(path) = &self.prep.keywords {
            config.keywords = load(path)?;
        }
        if let Some(path) = &self.prep.lexicon {
            config.lexicon = load(path)?;
        }
        Ok(config)
    }

    pub fn smote_config(&self) -> Option<SmoteConfig> {
        if self.smote.enabled {
            Some(SmoteConfig {
                k: self.smote.k,
                metric: self.smote.metric,
            })
        } else {
            None
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            l2_strength: self.model.l2_strength,
            learning_rate: self.model.learning_rate,
            max_epochs: self.model.max_epochs,
            convergence_tol: self.model.convergence_tol,
        }
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            min_df: self.vectorize.min_df,
            max_df_ratio: self.vectorize.max_df_ratio,
            l2_normalize: self.vectorize.l2_normalize,
            smote: self.smote_config(),
            include_title: self.prep.include_title,
            grid: if self.model.grid_search {
                Some(ParamGrid::default())
            } else {
                None
            },
            grid_folds: self.model.grid_folds,
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            folds: self.evaluate.folds,
            runs: self.evaluate.runs,
            seed: self.seed,
            smote: self.smote_config(),
            min_df: self.vectorize.min_df,
            max_df_ratio: self.vectorize.max_df_ratio,
            l2_normalize: self.vectorize.l2_normalize,
            include_title: self.prep.include_title,
        }
    }

    pub fn ga_config(&self) -> GaConfig {
        GaConfig {
            population: self.topics.population,
            generations: self.topics.generations,
            k_min: self.topics.k_min,
            k_max: self.topics.k_max,
            mutation_rate: self.topics.mutation_rate,
            elitism: self.topics.elitism,
        }
    }
}
