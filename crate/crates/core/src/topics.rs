//! Topic extraction per root-cause category: LDA fitted by collapsed Gibbs
//! sampling, with the topic count chosen by a genetic search that maximizes
//! the silhouette of documents clustered by their dominant topic (cosine
//! distance on document-topic rows).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{Corpus, RootCause};
use crate::seeds;
use crate::textprep::{normalize_corpus, PrepConfig, TokenStream};

#[derive(Debug, Error)]
pub enum TopicsError {
    #[error("no terms survive normalization; cannot fit topics")]
    EmptyVocabulary,
    #[error("topic count k must be at least 1")]
    ZeroTopics,
    #[error("topic {topic} out of range for a {k}-topic model")]
    TopicOutOfRange { topic: usize, k: usize },
    #[error("need at least 4 documents for the genetic search, got {0}")]
    TooFewDocs(usize),
    #[error("invalid genetic-search settings: {0}")]
    InvalidGaConfig(String),
}

/// Fitted LDA model: word-topic rows (`phi`), document-topic rows (`theta`),
/// and the term list they are indexed by.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub k: usize,
    pub terms: Vec<String>,
    /// `k x terms.len()`, row-major; every row sums to 1.
    phi: Vec<f64>,
    /// `docs x k`, row-major; every row sums to 1.
    theta: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl TopicModel {
    pub fn num_docs(&self) -> usize {
        self.theta.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn phi_row(&self, topic: usize) -> &[f64] {
        let v = self.terms.len();
        &self.phi[topic * v..(topic + 1) * v]
    }

    pub fn theta_row(&self, doc: usize) -> &[f64] {
        &self.theta[doc * self.k..(doc + 1) * self.k]
    }

    /// Topic with the highest share in a document, ties to the lowest index.
    pub fn dominant_topic(&self, doc: usize) -> usize {
        let row = self.theta_row(doc);
        let mut best = 0;
        for (t, &p) in row.iter().enumerate() {
            if p > row[best] {
                best = t;
            }
        }
        best
    }
}

/// Collapsed Gibbs sampling for the stated number of sweeps; phi and theta
/// are estimated from the final counts with alpha/beta smoothing.
/// Deterministic for a given seed.
pub fn lda_fit(
    docs: &[TokenStream],
    k: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
) -> Result<TopicModel, TopicsError> {
    if k == 0 {
        return Err(TopicsError::ZeroTopics);
    }
    let mut terms: Vec<String> = docs
        .iter()
        .flat_map(|d| d.tokens.iter().cloned())
        .collect();
    terms.sort_unstable();
    terms.dedup();
    if terms.is_empty() {
        return Err(TopicsError::EmptyVocabulary);
    }
    let v = terms.len();
    let term_index: BTreeMap<&str, usize> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let word_docs: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.tokens.iter().map(|t| term_index[t.as_str()]).collect())
        .collect();
    let d = docs.len();

    let mut n_dk = vec![0u32; d * k];
    let mut n_kw = vec![0u32; k * v];
    let mut n_k = vec![0u32; k];
    let mut assignments: Vec<Vec<usize>> = Vec::with_capacity(d);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (di, words) in word_docs.iter().enumerate() {
        let mut z = Vec::with_capacity(words.len());
        for &w in words {
            let t = rng.gen_range(0..k);
            n_dk[di * k + t] += 1;
            n_kw[t * v + w] += 1;
            n_k[t] += 1;
            z.push(t);
        }
        assignments.push(z);
    }

    let total_tokens: u32 = word_docs.iter().map(|w| w.len() as u32).sum();
    let mut weights = vec![0.0f64; k];
    for _ in 0..iterations {
        for (di, words) in word_docs.iter().enumerate() {
            for (pos, &w) in words.iter().enumerate() {
                let old = assignments[di][pos];
                n_dk[di * k + old] -= 1;
                n_kw[old * v + w] -= 1;
                n_k[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (n_dk[di * k + t] as f64 + alpha)
                        * (n_kw[t * v + w] as f64 + beta)
                        / (n_k[t] as f64 + v as f64 * beta);
                    weights[t] = p;
                    total += p;
                }
                let mut target = rng.gen::<f64>() * total;
                let mut new = k - 1;
                for (t, &p) in weights.iter().enumerate() {
                    if target < p {
                        new = t;
                        break;
                    }
                    target -= p;
                }

                n_dk[di * k + new] += 1;
                n_kw[new * v + w] += 1;
                n_k[new] += 1;
                assignments[di][pos] = new;
            }
        }
        debug_assert_eq!(n_k.iter().sum::<u32>(), total_tokens);
    }

    let mut phi = vec![0.0f64; k * v];
    for t in 0..k {
        let denom = n_k[t] as f64 + v as f64 * beta;
        for w in 0..v {
            phi[t * v + w] = (n_kw[t * v + w] as f64 + beta) / denom;
        }
    }
    let mut theta = vec![0.0f64; d * k];
    for (di, words) in word_docs.iter().enumerate() {
        let denom = words.len() as f64 + k as f64 * alpha;
        for t in 0..k {
            theta[di * k + t] = (n_dk[di * k + t] as f64 + alpha) / denom;
        }
    }

    Ok(TopicModel {
        k,
        terms,
        phi,
        theta,
        alpha,
        beta,
        iterations,
        seed,
    })
}

/// The `n` highest-probability terms of a topic, descending, ties broken by
/// lexicographic term order.
pub fn top_terms(
    model: &TopicModel,
    topic: usize,
    n: usize,
) -> Result<Vec<(String, f64)>, TopicsError> {
    if topic >= model.k {
        return Err(TopicsError::TopicOutOfRange {
            topic,
            k: model.k,
        });
    }
    let row = model.phi_row(topic);
    let mut order: Vec<usize> = (0..model.terms.len()).collect();
    order.sort_by(|&a, &b| {
        row[b]
            .partial_cmp(&row[a])
            .unwrap()
            .then_with(|| model.terms[a].cmp(&model.terms[b]))
    });
    Ok(order
        .into_iter()
        .take(n)
        .map(|i| (model.terms[i].clone(), row[i]))
        .collect())
}

fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        1.0
    } else {
        1.0 - dot / (na * nb)
    }
}

/// Mean silhouette of documents clustered by dominant topic, with cosine
/// distance on theta rows. `None` when fewer than two clusters are
/// non-empty. Members of singleton clusters score 0.
pub fn dominant_topic_silhouette(model: &TopicModel) -> Option<f64> {
    let d = model.num_docs();
    let clusters: Vec<usize> = (0..d).map(|i| model.dominant_topic(i)).collect();
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (doc, &c) in clusters.iter().enumerate() {
        members.entry(c).or_default().push(doc);
    }
    if members.len() < 2 {
        return None;
    }
    let mut total = 0.0;
    for (doc, &own) in clusters.iter().enumerate() {
        let own_members = &members[&own];
        if own_members.len() == 1 {
            continue; // silhouette 0 for singleton clusters
        }
        let a: f64 = own_members
            .iter()
            .filter(|&&j| j != doc)
            .map(|&j| cosine_distance(model.theta_row(doc), model.theta_row(j)))
            .sum::<f64>()
            / (own_members.len() - 1) as f64;
        let b = members
            .iter()
            .filter(|(&c, _)| c != own)
            .map(|(_, m)| {
                m.iter()
                    .map(|&j| cosine_distance(model.theta_row(doc), model.theta_row(j)))
                    .sum::<f64>()
                    / m.len() as f64
            })
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Some(total / d as f64)
}

/// Genetic-search settings over the topic-count genome.
#[derive(Debug, Clone)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub mutation_rate: f64,
    pub elitism: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 10,
            generations: 6,
            k_min: 2,
            k_max: 8,
            mutation_rate: 0.2,
            elitism: 2,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<(), TopicsError> {
        let fail = |msg: &str| Err(TopicsError::InvalidGaConfig(msg.to_string()));
        if self.k_min < 2 {
            return fail("k_min must be at least 2");
        }
        if self.k_max <= self.k_min {
            return fail("k_max must exceed k_min");
        }
        if self.population < 2 {
            return fail("population must be at least 2");
        }
        if self.elitism == 0 || self.elitism > self.population {
            return fail("elitism must be in 1..=population");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return fail("mutation_rate must be within [0, 1]");
        }
        Ok(())
    }
}

/// Result of the genetic search.
#[derive(Debug)]
pub struct LdaGaOutcome {
    pub best_k: usize,
    pub model: TopicModel,
    /// Best fitness per generation; non-decreasing thanks to elitism.
    pub history: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Genetic search over `k` in `[k_min, k_max]`: tournament selection,
/// integer-blend crossover, plus/minus-one mutation, and elitism. Fitness is
/// the dominant-topic silhouette; a candidate whose clustering collapses to
/// one cluster scores -1. Every LDA fit uses `alpha = 50/k`, `beta = 0.01`,
/// and a seed derived from (seed, k), so fitness is a pure function of `k`
/// and can be cached.
pub fn lda_ga(
    docs: &[TokenStream],
    ga: &GaConfig,
    lda_iterations: usize,
    seed: u64,
) -> Result<LdaGaOutcome, TopicsError> {
    ga.validate()?;
    if docs.len() < 4 {
        return Err(TopicsError::TooFewDocs(docs.len()));
    }

    fn fitness(
        cache: &mut BTreeMap<usize, (f64, TopicModel)>,
        docs: &[TokenStream],
        lda_iterations: usize,
        seed: u64,
        k: usize,
    ) -> Result<f64, TopicsError> {
        if let Some((f, _)) = cache.get(&k) {
            return Ok(*f);
        }
        let model = lda_fit(
            docs,
            k,
            50.0 / k as f64,
            0.01,
            lda_iterations,
            seeds::component_seed(seed, seeds::LDA, k as u64),
        )?;
        let f = dominant_topic_silhouette(&model).unwrap_or(-1.0);
        cache.insert(k, (f, model));
        Ok(f)
    }

    let mut cache: BTreeMap<usize, (f64, TopicModel)> = BTreeMap::new();

    let mut rng = ChaCha8Rng::seed_from_u64(seeds::component_seed(seed, seeds::GA, 0));
    let mut population: Vec<usize> = (0..ga.population)
        .map(|_| rng.gen_range(ga.k_min..=ga.k_max))
        .collect();

    let mut history = Vec::with_capacity(ga.generations);
    for generation in 0..ga.generations {
        let mut scored: Vec<(usize, f64)> = Vec::with_capacity(population.len());
        for &k in &population {
            scored.push((k, fitness(&mut cache, docs, lda_iterations, seed, k)?));
        }
        // Fitter first; ties prefer fewer topics.
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        history.push(scored[0].1);

        if generation + 1 == ga.generations {
            break;
        }

        let mut next: Vec<usize> = scored.iter().take(ga.elitism).map(|(k, _)| *k).collect();
        while next.len() < ga.population {
            let tournament = |rng: &mut ChaCha8Rng| -> usize {
                let a = scored[rng.gen_range(0..scored.len())];
                let b = scored[rng.gen_range(0..scored.len())];
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b.0
                } else {
                    a.0
                }
            };
            let p1 = tournament(&mut rng);
            let p2 = tournament(&mut rng);
            let u: f64 = rng.gen();
            let mut child = (u * p1 as f64 + (1.0 - u) * p2 as f64).round() as usize;
            if rng.gen::<f64>() < ga.mutation_rate {
                if rng.gen_bool(0.5) {
                    child += 1;
                } else {
                    child = child.saturating_sub(1);
                }
            }
            next.push(child.clamp(ga.k_min, ga.k_max));
        }
        population = next;
    }

    let (best_k, best_fitness) = cache
        .iter()
        .max_by(|(ka, (fa, _)), (kb, (fb, _))| fa.partial_cmp(fb).unwrap().then(kb.cmp(ka)))
        .map(|(k, (f, _))| (*k, *f))
        .expect("population is never empty");

    let mut warnings = Vec::new();
    if best_fitness <= -1.0 {
        warnings.push(
            "every candidate clustering collapsed to a single cluster; returning k_min".to_string(),
        );
        let k = ga.k_min;
        fitness(&mut cache, docs, lda_iterations, seed, k)?;
        let model = cache.remove(&k).unwrap().1;
        return Ok(LdaGaOutcome {
            best_k: k,
            model,
            history,
            warnings,
        });
    }

    let model = cache.remove(&best_k).unwrap().1;
    Ok(LdaGaOutcome {
        best_k,
        model,
        history,
        warnings,
    })
}

/// Topics of one category: each inner list is one topic's top terms.
#[derive(Debug)]
pub struct CategoryTopics {
    pub topics: BTreeMap<RootCause, Vec<Vec<(String, f64)>>>,
    /// Categories with fewer than 4 labeled reports, skipped entirely.
    pub skipped: Vec<RootCause>,
    pub warnings: Vec<String>,
}

/// Runs the LDA preparation pipeline and the genetic search per category.
/// Topics are ordered by the number of documents they dominate, descending.
pub fn topics_by_category(
    corpus: &Corpus,
    prep: &PrepConfig,
    ga: &GaConfig,
    lda_iterations: usize,
    top_n: usize,
    seed: u64,
) -> Result<CategoryTopics, TopicsError> {
    let mut result = CategoryTopics {
        topics: BTreeMap::new(),
        skipped: Vec::new(),
        warnings: Vec::new(),
    };
    for cause in RootCause::ALL {
        let docs: Vec<(String, String)> = corpus
            .reports()
            .iter()
            .filter(|r| r.label == Some(cause))
            .map(|r| (r.id.clone(), r.summary.clone()))
            .collect();
        if docs.len() < 4 {
            result.skipped.push(cause);
            result
                .warnings
                .push(format!("{cause}: {} labeled report(s), need 4", docs.len()));
            continue;
        }
        let streams = normalize_corpus(&docs, prep);
        let outcome = match lda_ga(
            &streams,
            ga,
            lda_iterations,
            seeds::component_seed(seed, seeds::CATEGORY, cause.index() as u64),
        ) {
            Ok(o) => o,
            Err(e) => {
                result.skipped.push(cause);
                result.warnings.push(format!("{cause}: {e}"));
                continue;
            }
        };
        for w in outcome.warnings {
            result.warnings.push(format!("{cause}: {w}"));
        }
        let model = &outcome.model;
        let mut dominated = vec![0usize; model.k];
        for doc in 0..model.num_docs() {
            dominated[model.dominant_topic(doc)] += 1;
        }
        let mut order: Vec<usize> = (0..model.k).collect();
        order.sort_by_key(|&t| (std::cmp::Reverse(dominated[t]), t));
        let mut lists = Vec::new();
        for t in order {
            lists.push(top_terms(model, t, top_n)?);
        }
        result.topics.insert(cause, lists);
    }
    Ok(result)
}
