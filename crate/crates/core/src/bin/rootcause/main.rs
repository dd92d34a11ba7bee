//! `rootcause`: bug-report ingestion, root-cause classification, and
//! characterization (frequency, topics, time-to-fix) as one CLI.
//!
//! Exit codes: 0 success, 1 fatal error (structured JSON on stderr),
//! 2 completed with rejected rows.

mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use rootcause::corpus::{
    self, corpus_from_raw_records, frequency, load_corpus, save_corpus, tracker, Corpus, Format,
    RejectedRow, Source,
};
use rootcause::evaluate::cross_validate;
use rootcause::pipeline::ClassifierPipeline;
use rootcause::textprep::Pipeline;
use rootcause::timefix::{delay_stats, render_csv, DelayMetric};
use rootcause::topics::topics_by_category;
use rootcause::RootCause;

#[derive(Parser)]
#[command(
    name = "rootcause",
    version,
    about = "Classify and characterize the root causes of software bug reports"
)]
struct Cli {
    /// Root seed; all randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Emit machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Option<Command>,
}

/// Flags mirroring every config-file key.
#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    min_token_len: Option<usize>,
    #[arg(long, global = true)]
    spell_correction: Option<bool>,
    #[arg(long, global = true)]
    pos_filter: Option<bool>,
    #[arg(long, global = true)]
    include_title: Option<bool>,
    /// Stopword list override file (one term per line).
    #[arg(long, global = true)]
    stopwords: Option<String>,
    /// Programming-keyword list override file.
    #[arg(long, global = true)]
    keywords: Option<String>,
    /// Word-class lexicon override file.
    #[arg(long, global = true)]
    lexicon: Option<String>,

    #[arg(long, global = true)]
    min_df: Option<u32>,
    #[arg(long, global = true)]
    max_df_ratio: Option<f64>,
    #[arg(long, global = true)]
    l2_normalize: Option<bool>,

    /// Enable or disable SMOTE balancing of training folds.
    #[arg(long, global = true)]
    smote: Option<bool>,
    #[arg(long, global = true)]
    smote_k: Option<usize>,
    /// Neighbor distance: euclidean or cosine.
    #[arg(long, global = true)]
    smote_metric: Option<String>,

    #[arg(long, global = true)]
    l2_strength: Option<f64>,
    #[arg(long, global = true)]
    learning_rate: Option<f64>,
    #[arg(long, global = true)]
    max_epochs: Option<usize>,
    #[arg(long, global = true)]
    convergence_tol: Option<f64>,
    /// Select hyperparameters by grid search before training.
    #[arg(long, global = true)]
    grid_search: Option<bool>,
    #[arg(long, global = true)]
    grid_folds: Option<usize>,

    #[arg(long, global = true)]
    runs: Option<usize>,
    #[arg(long, global = true)]
    folds: Option<usize>,

    #[arg(long, global = true)]
    population: Option<usize>,
    #[arg(long, global = true)]
    generations: Option<usize>,
    #[arg(long, global = true)]
    k_min: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
    #[arg(long, global = true)]
    mutation_rate: Option<f64>,
    #[arg(long, global = true)]
    elitism: Option<usize>,
    #[arg(long, global = true)]
    lda_iterations: Option<usize>,
    #[arg(long, global = true)]
    top_terms: Option<usize>,

    #[arg(long, global = true)]
    page_size: Option<usize>,
    #[arg(long, global = true)]
    max_retries: Option<u32>,
    #[arg(long, global = true)]
    retry_base_ms: Option<u64>,
    /// Bearer token for tracker requests.
    #[arg(long, global = true)]
    token: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus from a file or a tracker endpoint, validate it, and
    /// write it back in canonical form plus a reject report.
    Ingest {
        /// Input corpus file (alternative to --endpoint).
        #[arg(long)]
        input: Option<String>,
        /// Input format: csv or jsonl (default: by file extension).
        #[arg(long)]
        format: Option<String>,
        /// Tracker base URL (alternative to --input).
        #[arg(long, requires = "query", requires = "mapping")]
        endpoint: Option<String>,
        /// Tracker query string.
        #[arg(long)]
        query: Option<String>,
        /// Field-mapping file for tracker records.
        #[arg(long)]
        mapping: Option<String>,
        /// Output corpus file.
        #[arg(long)]
        out: String,
        /// Output format: csv or jsonl (default jsonl).
        #[arg(long)]
        out_format: Option<String>,
        /// Reject-report sidecar path (default: <out>.rejects.jsonl).
        #[arg(long)]
        rejects: Option<String>,
    },
    /// Category frequency table over the labeled reports.
    Stats {
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        format: Option<String>,
    },
    /// Train the classifier and write model + vocabulary files.
    Train {
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        model_out: String,
        #[arg(long)]
        vocab_out: String,
    },
    /// Classify reports with a trained model; appends predicted label and
    /// probability vector to each record.
    Classify {
        #[arg(long)]
        model: String,
        #[arg(long)]
        vocab: String,
        #[arg(long)]
        input: String,
        #[arg(long)]
        format: Option<String>,
        /// Output JSONL (default: stdout).
        #[arg(long)]
        out: Option<String>,
    },
    /// Repeated stratified cross-validation with the full metric suite.
    Evaluate {
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        format: Option<String>,
    },
    /// Per-category topic extraction (LDA with genetic topic-count search).
    Topics {
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        format: Option<String>,
    },
    /// Per-category time-to-fix delay statistics as box-plot CSV.
    Timefix {
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        format: Option<String>,
        /// One of dbr, dba, dbc, dbf, dac, or all.
        #[arg(long, default_value = "all")]
        metric: String,
        /// Output CSV path (default: stdout).
        #[arg(long)]
        out: Option<String>,
    },
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl ToString) -> Failure {
        Failure {
            kind,
            message: message.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            let payload = serde_json::json!({
                "error": failure.message,
                "kind": failure.kind,
            });
            eprintln!("{payload}");
            ExitCode::from(1)
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut run = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| Failure::new("config", e))?,
        None => RunConfig::default(),
    };
    let o = &cli.overrides;
    macro_rules! set {
        ($target:expr, $source:expr) => {
            if let Some(v) = &$source {
                $target = v.clone();
            }
        };
    }
    set!(run.seed, cli.seed);
    set!(run.jobs, cli.jobs);
    set!(run.prep.min_token_len, o.min_token_len);
    set!(run.prep.spell_correction, o.spell_correction);
    set!(run.prep.pos_filter, o.pos_filter);
    set!(run.prep.include_title, o.include_title);
    set!(run.prep.stopwords, o.stopwords.clone().map(Some));
    set!(run.prep.keywords, o.keywords.clone().map(Some));
    set!(run.prep.lexicon, o.lexicon.clone().map(Some));
    set!(run.vectorize.min_df, o.min_df);
    set!(run.vectorize.max_df_ratio, o.max_df_ratio);
    set!(run.vectorize.l2_normalize, o.l2_normalize);
    set!(run.smote.enabled, o.smote);
    set!(run.smote.k, o.smote_k);
    if let Some(metric) = &o.smote_metric {
        run.smote.metric = match metric.as_str() {
            "euclidean" => rootcause::balance::DistanceMetric::Euclidean,
            "cosine" => rootcause::balance::DistanceMetric::Cosine,
            other => {
                return Err(Failure::new(
                    "config",
                    format!("unknown smote metric {other:?}"),
                ))
            }
        };
    }
    set!(run.model.l2_strength, o.l2_strength);
    set!(run.model.learning_rate, o.learning_rate);
    set!(run.model.max_epochs, o.max_epochs);
    set!(run.model.convergence_tol, o.convergence_tol);
    set!(run.model.grid_search, o.grid_search);
    set!(run.model.grid_folds, o.grid_folds);
    set!(run.evaluate.runs, o.runs);
    set!(run.evaluate.folds, o.folds);
    set!(run.topics.population, o.population);
    set!(run.topics.generations, o.generations);
    set!(run.topics.k_min, o.k_min);
    set!(run.topics.k_max, o.k_max);
    set!(run.topics.mutation_rate, o.mutation_rate);
    set!(run.topics.elitism, o.elitism);
    set!(run.topics.lda_iterations, o.lda_iterations);
    set!(run.topics.top_terms, o.top_terms);
    set!(run.tracker.page_size, o.page_size);
    set!(run.tracker.max_retries, o.max_retries);
    set!(run.tracker.retry_base_ms, o.retry_base_ms);
    set!(run.tracker.token, o.token.clone().map(Some));
    Ok(run)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let run = effective_config(&cli)?;
    if cli.dump_config {
        print!("{}", run.to_toml());
        return Ok(0);
    }
    if run.jobs > 0 {
        // A pool may already exist when run() is reentered from tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(run.jobs)
            .build_global();
    }
    let Some(command) = cli.command else {
        return Err(Failure::new("usage", "missing subcommand; see --help"));
    };
    match command {
        Command::Ingest {
            input,
            format,
            endpoint,
            query,
            mapping,
            out,
            out_format,
            rejects,
        } => cmd_ingest(
            &run, input, format, endpoint, query, mapping, out, out_format, rejects,
        ),
        Command::Stats { corpus, format } => cmd_stats(cli.json, &corpus, format),
        Command::Train {
            corpus,
            format,
            model_out,
            vocab_out,
        } => cmd_train(&run, cli.json, &corpus, format, &model_out, &vocab_out),
        Command::Classify {
            model,
            vocab,
            input,
            format,
            out,
        } => cmd_classify(&run, &model, &vocab, &input, format, out),
        Command::Evaluate { corpus, format } => cmd_evaluate(&run, cli.json, &corpus, format),
        Command::Topics { corpus, format } => cmd_topics(&run, cli.json, &corpus, format),
        Command::Timefix {
            corpus,
            format,
            metric,
            out,
        } => cmd_timefix(cli.json, &corpus, format, &metric, out),
    }
}

fn parse_format(path: &str, flag: Option<String>) -> Result<Format, Failure> {
    match flag {
        Some(name) => name
            .parse::<Format>()
            .map_err(|e| Failure::new("format", e)),
        None => {
            if path.ends_with(".csv") {
                Ok(Format::Csv)
            } else {
                Ok(Format::Jsonl)
            }
        }
    }
}

/// Loads a corpus, reporting rejected rows on stderr. The second return
/// value is the exit-code contribution (2 when rows were rejected).
fn load_input(path: &str, format: Option<String>) -> Result<(Corpus, u8), Failure> {
    let format = parse_format(path, format)?;
    let outcome = load_corpus(path, format).map_err(|e| Failure::new("corpus", e))?;
    let code = report_rejects(&outcome.rejected);
    Ok((outcome.corpus, code))
}

fn report_rejects(rejected: &[RejectedRow]) -> u8 {
    if rejected.is_empty() {
        return 0;
    }
    let payload = serde_json::json!({
        "warning": "rejected rows",
        "count": rejected.len(),
        "rows": rejected,
    });
    eprintln!("{payload}");
    2
}

#[allow(clippy::too_many_arguments)]
fn cmd_ingest(
    run: &RunConfig,
    input: Option<String>,
    format: Option<String>,
    endpoint: Option<String>,
    query: Option<String>,
    mapping: Option<String>,
    out: String,
    out_format: Option<String>,
    rejects_path: Option<String>,
) -> Result<u8, Failure> {
    let outcome = match (&input, &endpoint) {
        (Some(path), None) => {
            let format = parse_format(path, format)?;
            load_corpus(path, format).map_err(|e| Failure::new("corpus", e))?
        }
        (None, Some(url)) => {
            let query = query.expect("clap enforces --query with --endpoint");
            let mapping_path = mapping.expect("clap enforces --mapping with --endpoint");
            let mapping = tracker::FieldMapping::load(&mapping_path)
                .map_err(|e| Failure::new("tracker", e))?;
            let tracker_config = tracker::TrackerConfig {
                page_size: run.tracker.page_size,
                max_retries: run.tracker.max_retries,
                retry_base: Duration::from_millis(run.tracker.retry_base_ms),
                bearer_token: run.tracker.token.clone(),
                timeout: Duration::from_secs(30),
            };
            let records = tracker::fetch_raw_records(url, &query, &tracker_config)
                .map_err(|e| Failure::new("tracker", e))?;
            corpus_from_raw_records(
                records,
                &mapping,
                Source::Tracker {
                    endpoint: url.clone(),
                    query,
                },
            )
        }
        _ => {
            return Err(Failure::new(
                "usage",
                "ingest needs exactly one of --input or --endpoint",
            ))
        }
    };

    let out_format = match out_format {
        Some(name) => name
            .parse::<Format>()
            .map_err(|e| Failure::new("format", e))?,
        None => Format::Jsonl,
    };
    save_corpus(&outcome.corpus, &out, out_format).map_err(|e| Failure::new("corpus", e))?;

    let rejects_path = rejects_path.unwrap_or_else(|| format!("{out}.rejects.jsonl"));
    if !outcome.rejected.is_empty() {
        let mut sidecar = String::new();
        for row in &outcome.rejected {
            sidecar.push_str(&serde_json::to_string(row).expect("reject rows serialize"));
            sidecar.push('\n');
        }
        std::fs::write(&rejects_path, sidecar).map_err(|e| Failure::new("io", e))?;
    }

    println!(
        "{}",
        serde_json::json!({
            "accepted": outcome.corpus.len(),
            "rejected": outcome.rejected.len(),
            "out": out,
            "rejects": if outcome.rejected.is_empty() { None } else { Some(&rejects_path) },
        })
    );
    Ok(if outcome.rejected.is_empty() { 0 } else { 2 })
}

fn cmd_stats(json: bool, corpus_path: &str, format: Option<String>) -> Result<u8, Failure> {
    let (corpus, code) = load_input(corpus_path, format)?;
    let freq = frequency(&corpus).map_err(|e| Failure::new("stats", e))?;
    let total: usize = freq.values().map(|f| f.count).sum();
    if json {
        let entries: Vec<serde_json::Value> = freq
            .iter()
            .map(|(cause, f)| {
                serde_json::json!({
                    "category": cause.as_str(),
                    "count": f.count,
                    "share": f.share,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({"total_labeled": total, "frequencies": entries})
        );
    } else {
        println!("{:<30} {:>7} {:>7}", "Category", "Count", "Share");
        for cause in RootCause::ALL {
            if let Some(f) = freq.get(&cause) {
                println!(
                    "{:<30} {:>7} {:>6.1}%",
                    cause.human_label(),
                    f.count,
                    f.share * 100.0
                );
            }
        }
        println!("{:<30} {:>7}", "Total labeled", total);
    }
    Ok(code)
}

fn cmd_train(
    run: &RunConfig,
    json: bool,
    corpus_path: &str,
    format: Option<String>,
    model_out: &str,
    vocab_out: &str,
) -> Result<u8, Failure> {
    let (corpus, code) = load_input(corpus_path, format)?;
    let prep = run
        .prep_config(Pipeline::Classifier)
        .map_err(|e| Failure::new("config", e))?;
    let (pipeline, report) = rootcause::pipeline::train_pipeline(
        &corpus,
        prep,
        &run.hyperparams(),
        &run.train_options(),
        run.seed,
    )
    .map_err(|e| Failure::new("train", e))?;
    pipeline
        .save(model_out, vocab_out)
        .map_err(|e| Failure::new("train", e))?;

    if json {
        let grid: Option<Vec<serde_json::Value>> = report.grid_table.as_ref().map(|rows| {
            rows.iter()
                .map(|r| {
                    serde_json::json!({
                        "l2_strength": r.hyper.l2_strength,
                        "learning_rate": r.hyper.learning_rate,
                        "max_epochs": r.hyper.max_epochs,
                        "convergence_tol": r.hyper.convergence_tol,
                        "score": r.score,
                        "diverged_folds": r.diverged_folds,
                    })
                })
                .collect()
        });
        println!(
            "{}",
            serde_json::json!({
                "model": model_out,
                "vocab": vocab_out,
                "vocabulary_size": report.vocabulary_size,
                "training_rows": report.training_rows,
                "synthetic_rows": report.synthetic_rows,
                "hyperparams": {
                    "l2_strength": report.hyper.l2_strength,
                    "learning_rate": report.hyper.learning_rate,
                    "max_epochs": report.hyper.max_epochs,
                    "convergence_tol": report.hyper.convergence_tol,
                },
                "grid": grid,
                "warnings": report.warnings,
            })
        );
    } else {
        println!(
            "trained on {} rows ({} synthetic)",
            report.training_rows, report.synthetic_rows
        );
        println!("vocabulary: {} terms", report.vocabulary_size);
        println!(
            "hyperparameters: l2 {} rate {} epochs {} tol {}",
            report.hyper.l2_strength,
            report.hyper.learning_rate,
            report.hyper.max_epochs,
            report.hyper.convergence_tol
        );
        if let Some(rows) = &report.grid_table {
            println!("grid search ({} combinations):", rows.len());
            for row in rows {
                println!(
                    "  l2 {:<8} rate {:<5} -> macro-F {:.4}{}",
                    row.hyper.l2_strength,
                    row.hyper.learning_rate,
                    row.score,
                    if row.diverged_folds > 0 {
                        format!(" ({} diverged folds)", row.diverged_folds)
                    } else {
                        String::new()
                    }
                );
            }
        }
        for warning in &report.warnings {
            println!("warning: {warning}");
        }
        println!("model written to {model_out}, vocabulary to {vocab_out}");
    }
    Ok(code)
}

fn cmd_classify(
    run: &RunConfig,
    model_path: &str,
    vocab_path: &str,
    input: &str,
    format: Option<String>,
    out: Option<String>,
) -> Result<u8, Failure> {
    let prep = run
        .prep_config(Pipeline::Classifier)
        .map_err(|e| Failure::new("config", e))?;
    let pipeline = ClassifierPipeline::load(model_path, vocab_path, prep)
        .map_err(|e| Failure::new("classify", e))?;
    let (corpus, code) = load_input(input, format)?;

    let mut lines = String::new();
    for report in corpus.reports() {
        let classification = pipeline
            .classify_report(report)
            .map_err(|e| Failure::new("classify", e))?;
        let events: Vec<serde_json::Value> = report
            .events
            .iter()
            .map(|e| {
                serde_json::json!({
                    "kind": e.kind.as_str(),
                    "ts": e.ts.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                })
            })
            .collect();
        let record = serde_json::json!({
            "id": report.id,
            "ecosystem": report.ecosystem,
            "project": report.project,
            "title": report.title,
            "summary": report.summary,
            "label": report.label.map(|l| l.as_str()),
            "resolution": match report.resolution {
                corpus::Resolution::Fixed => Some("fixed"),
                corpus::Resolution::NotFixed => Some("not-fixed"),
                corpus::Resolution::Unknown => None,
            },
            "events": events,
            "predicted_label": classification.label.as_str(),
            "probabilities": classification.probabilities,
            "zero_vector": classification.zero_vector,
        });
        lines.push_str(&record.to_string());
        lines.push('\n');
    }
    match out {
        Some(path) => std::fs::write(&path, lines).map_err(|e| Failure::new("io", e))?,
        None => print!("{lines}"),
    }
    Ok(code)
}

fn cmd_evaluate(
    run: &RunConfig,
    json: bool,
    corpus_path: &str,
    format: Option<String>,
) -> Result<u8, Failure> {
    let (corpus, code) = load_input(corpus_path, format)?;
    let prep = run
        .prep_config(Pipeline::Classifier)
        .map_err(|e| Failure::new("config", e))?;
    let report = cross_validate(&corpus, &prep, &run.hyperparams(), &run.eval_config())
        .map_err(|e| Failure::new("evaluate", e))?;
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_table());
    }
    Ok(code)
}

fn cmd_topics(
    run: &RunConfig,
    json: bool,
    corpus_path: &str,
    format: Option<String>,
) -> Result<u8, Failure> {
    let (corpus, code) = load_input(corpus_path, format)?;
    let prep = run
        .prep_config(Pipeline::Lda)
        .map_err(|e| Failure::new("config", e))?;
    let result = topics_by_category(
        &corpus,
        &prep,
        &run.ga_config(),
        run.topics.lda_iterations,
        run.topics.top_terms,
        run.seed,
    )
    .map_err(|e| Failure::new("topics", e))?;

    if json {
        let categories: Vec<serde_json::Value> = result
            .topics
            .iter()
            .map(|(cause, topics)| {
                let topics: Vec<serde_json::Value> = topics
                    .iter()
                    .map(|terms| {
                        terms
                            .iter()
                            .map(|(t, p)| serde_json::json!({"term": t, "probability": p}))
                            .collect::<Vec<_>>()
                            .into()
                    })
                    .collect();
                serde_json::json!({"category": cause.as_str(), "topics": topics})
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "categories": categories,
                "skipped": result.skipped.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
                "warnings": result.warnings,
            })
        );
    } else {
        const MAX_COLUMNS: usize = 5;
        print!("{:<30}", "Categories");
        for i in 1..=MAX_COLUMNS {
            print!(" {:<14}", format!("Topic {i}"));
        }
        println!();
        for cause in RootCause::ALL {
            let Some(topics) = result.topics.get(&cause) else {
                continue;
            };
            print!("{:<30}", cause.human_label());
            for i in 0..MAX_COLUMNS {
                let cell = topics
                    .get(i)
                    .and_then(|terms| terms.first())
                    .map(|(t, _)| t.as_str())
                    .unwrap_or("-");
                print!(" {cell:<14}");
            }
            println!();
        }
        for warning in &result.warnings {
            println!("warning: {warning}");
        }
    }
    Ok(code)
}

fn cmd_timefix(
    json: bool,
    corpus_path: &str,
    format: Option<String>,
    metric: &str,
    out: Option<String>,
) -> Result<u8, Failure> {
    let (corpus, code) = load_input(corpus_path, format)?;
    let metrics: Vec<DelayMetric> = if metric == "all" {
        DelayMetric::ALL.to_vec()
    } else {
        vec![metric
            .parse()
            .map_err(|e: String| Failure::new("timefix", e))?]
    };
    let mut all = BTreeMap::new();
    for m in metrics {
        all.insert(m, delay_stats(&corpus, m));
    }

    if json {
        let mut metrics_json = serde_json::Map::new();
        for (m, stats) in &all {
            let mut per_category = serde_json::Map::new();
            for (cause, b) in &stats.per_category {
                per_category.insert(
                    cause.as_str().to_string(),
                    serde_json::to_value(b).expect("box stats serialize"),
                );
            }
            metrics_json.insert(
                m.as_str().to_string(),
                serde_json::json!({
                    "per_category": per_category,
                    "skipped": stats.skipped.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
                    "warnings": stats.warnings,
                }),
            );
        }
        println!("{}", serde_json::Value::Object(metrics_json));
        return Ok(code);
    }

    let csv = render_csv(&all);
    match out {
        Some(path) => std::fs::write(&path, csv).map_err(|e| Failure::new("io", e))?,
        None => print!("{csv}"),
    }
    let mut notes = Vec::new();
    for (m, stats) in &all {
        for cause in &stats.skipped {
            notes.push(format!("{m}: no values for {cause}"));
        }
        notes.extend(stats.warnings.iter().cloned());
    }
    if !notes.is_empty() {
        let mut err = std::io::stderr().lock();
        for note in notes {
            let _ = writeln!(err, "warning: {note}");
        }
    }
    Ok(code)
}
