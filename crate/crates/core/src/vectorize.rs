//! TF-IDF features over a fitted term vocabulary.
//!
//! A term's weight in a document is `count_in_doc * ln(corpus_size / doc_freq)`;
//! the log base is fixed to the natural logarithm and the IDF carries no
//! smoothing term. Document frequencies are computed on normalized (stemmed)
//! token streams.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenStream;

const VOCABULARY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("cannot fit a vocabulary on an empty document list")]
    EmptyCorpus,
    #[error("every term was filtered out (min_df {min_df}, max_df_ratio {max_df_ratio})")]
    AllTermsFiltered { min_df: u32, max_df_ratio: f64 },
    #[error("vector dimension {vector} does not match vocabulary size {vocabulary}")]
    DimensionMismatch { vector: usize, vocabulary: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed vocabulary file: {0}")]
    Malformed(String),
}

/// Fitted term dictionary: lexicographically ordered terms with their
/// document frequencies and the size of the fitting corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    schema_version: u32,
    terms: Vec<String>,
    doc_freq: Vec<u32>,
    corpus_size: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    /// Document frequency of the term at a vocabulary index.
    pub fn doc_freq(&self, index: usize) -> u32 {
        self.doc_freq[index]
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    fn build_index(&mut self) {
        self.index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), VectorizeError> {
        let json = serde_json::to_string(self).map_err(|e| VectorizeError::Malformed(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vocabulary, VectorizeError> {
        let text = std::fs::read_to_string(path)?;
        let mut vocab: Vocabulary =
            serde_json::from_str(&text).map_err(|e| VectorizeError::Malformed(e.to_string()))?;
        if vocab.schema_version != VOCABULARY_SCHEMA_VERSION {
            return Err(VectorizeError::Malformed(format!(
                "unsupported vocabulary schema version {}",
                vocab.schema_version
            )));
        }
        if vocab.terms.len() != vocab.doc_freq.len() {
            return Err(VectorizeError::Malformed(
                "terms and doc_freq lengths differ".to_string(),
            ));
        }
        vocab.build_index();
        Ok(vocab)
    }

    /// Content hash used by model files to pin the vocabulary they were
    /// trained against.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.corpus_size.to_le_bytes());
        for (term, df) in self.terms.iter().zip(&self.doc_freq) {
            hasher.update(term.as_bytes());
            hasher.update([0u8]);
            hasher.update(df.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Sparse non-negative feature vector over a vocabulary. Zero weights are
/// never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// `(term_index, weight)` pairs sorted by term index.
    entries: Vec<(u32, f64)>,
    dimension: usize,
}

impl FeatureVector {
    pub fn new(mut entries: Vec<(u32, f64)>, dimension: usize) -> FeatureVector {
        entries.retain(|(_, w)| *w != 0.0);
        entries.sort_by_key(|(i, _)| *i);
        FeatureVector { entries, dimension }
    }

    pub fn zero(dimension: usize) -> FeatureVector {
        FeatureVector {
            entries: Vec::new(),
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(index as u32), |(i, _)| *i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, w)| w * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Unit-norm copy; zero vectors stay zero.
    pub fn l2_normalized(&self) -> FeatureVector {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return self.clone();
        }
        FeatureVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w / norm)).collect(),
            dimension: self.dimension,
        }
    }

    /// Euclidean distance between two vectors of the same dimension.
    pub fn euclidean_distance(&self, other: &FeatureVector) -> f64 {
        self.merged_fold(other, 0.0, |acc, a, b| {
            let d = a - b;
            acc + d * d
        })
        .sqrt()
    }

    /// Cosine distance (1 - cosine similarity); zero vectors are at distance
    /// 1 from everything.
    pub fn cosine_distance(&self, other: &FeatureVector) -> f64 {
        let dot = self.merged_fold(other, 0.0, |acc, a, b| acc + a * b);
        let denom = self.l2_norm() * other.l2_norm();
        if denom == 0.0 {
            1.0
        } else {
            1.0 - dot / denom
        }
    }

    /// The point `self + u * (other - self)`.
    pub fn interpolate(&self, other: &FeatureVector, u: f64) -> FeatureVector {
        let mut entries = Vec::new();
        self.merged_for_each(other, |index, a, b| {
            let w = a + u * (b - a);
            if w != 0.0 {
                entries.push((index, w));
            }
        });
        FeatureVector {
            entries,
            dimension: self.dimension,
        }
    }

    fn merged_fold(&self, other: &FeatureVector, init: f64, mut f: impl FnMut(f64, f64, f64) -> f64) -> f64 {
        let mut acc = init;
        self.merged_for_each(other, |_, a, b| acc = f(acc, a, b));
        acc
    }

    /// Visits the union of both supports in index order.
    fn merged_for_each(&self, other: &FeatureVector, mut f: impl FnMut(u32, f64, f64)) {
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let a = self.entries.get(i);
            let b = other.entries.get(j);
            match (a, b) {
                (Some(&(ia, wa)), Some(&(ib, wb))) => {
                    if ia == ib {
                        f(ia, wa, wb);
                        i += 1;
                        j += 1;
                    } else if ia < ib {
                        f(ia, wa, 0.0);
                        i += 1;
                    } else {
                        f(ib, 0.0, wb);
                        j += 1;
                    }
                }
                (Some(&(ia, wa)), None) => {
                    f(ia, wa, 0.0);
                    i += 1;
                }
                (None, Some(&(ib, wb))) => {
                    f(ib, 0.0, wb);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
    }
}

/// Fits a vocabulary on normalized documents, keeping terms whose document
/// frequency satisfies `min_df <= df <= max_df_ratio * corpus_size`.
pub fn fit_vocabulary(
    docs: &[TokenStream],
    min_df: u32,
    max_df_ratio: f64,
) -> Result<Vocabulary, VectorizeError> {
    if docs.is_empty() {
        return Err(VectorizeError::EmptyCorpus);
    }
    let corpus_size = docs.len();
    let mut df: BTreeMap<&str, u32> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.tokens.iter().map(String::as_str).collect();
        seen.sort_unstable();
        seen.dedup();
        for term in seen {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let max_df = max_df_ratio * corpus_size as f64;
    let mut terms = Vec::new();
    let mut doc_freq = Vec::new();
    for (term, freq) in df {
        if freq >= min_df && (freq as f64) <= max_df {
            terms.push(term.to_string());
            doc_freq.push(freq);
        }
    }
    if terms.is_empty() {
        return Err(VectorizeError::AllTermsFiltered { min_df, max_df_ratio });
    }
    let mut vocab = Vocabulary {
        schema_version: VOCABULARY_SCHEMA_VERSION,
        terms,
        doc_freq,
        corpus_size,
        index: HashMap::new(),
    };
    vocab.build_index();
    Ok(vocab)
}

/// TF-IDF vector of one document over a fitted vocabulary. Terms outside the
/// vocabulary contribute nothing; an empty document yields the zero vector.
pub fn tfidf(doc: &TokenStream, vocab: &Vocabulary) -> FeatureVector {
    let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
    for token in &doc.tokens {
        if let Some(index) = vocab.term_index(token) {
            *counts.entry(index).or_insert(0) += 1;
        }
    }
    let entries = counts
        .into_iter()
        .map(|(index, count)| {
            let idf = ((vocab.corpus_size as f64) / (vocab.doc_freq[index] as f64)).ln();
            (index as u32, count as f64 * idf)
        })
        .filter(|(_, w)| *w != 0.0)
        .collect();
    FeatureVector::new(entries, vocab.len())
}
