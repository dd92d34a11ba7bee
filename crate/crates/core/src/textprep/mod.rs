//! Text normalization: turns free-text bug summaries into token streams.
//!
//! One engine, two configurations. The classifier pipeline applies camel-case
//! splitting, lowercasing, special-character/keyword/stopword removal, and
//! Porter stemming. The LDA pipeline additionally expands contractions,
//! optionally spell-corrects and filters by word class, and singularizes
//! before the shared tail.
//!
//! The stopword, programming-keyword, and word-class lists are vendored into
//! the crate so results stay reproducible; each can be overridden with a
//! plain-text one-term-per-line file.

mod porter;

pub use porter::porter_stem;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Default stopword list (~170 common English words).
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
/// Default programming-keyword list (Java and XML reserved words).
pub const DEFAULT_KEYWORDS: &str = include_str!("../../data/keywords.txt");
/// Default word-class list: words that are neither nouns nor verbs, dropped
/// when `pos_filter` is enabled. Words absent from the list are kept.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.txt");

/// Ordered lowercase tokens produced by [`normalize`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub tokens: Vec<String>,
    pub source_id: String,
}

impl TokenStream {
    pub fn with_source(mut self, id: impl Into<String>) -> TokenStream {
        self.source_id = id.into();
        self
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Which normalization pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pipeline {
    Classifier,
    Lda,
}

/// Normalization settings plus the active term lists.
#[derive(Debug, Clone)]
pub struct PrepConfig {
    pub pipeline: Pipeline,
    pub stopwords: BTreeSet<String>,
    pub keywords: BTreeSet<String>,
    pub lexicon: BTreeSet<String>,
    pub min_token_len: usize,
    /// Edit-distance-1 correction of corpus-frequency-1 words against
    /// frequency>=5 neighbors. Only applies in [`normalize_corpus`].
    pub spell_correction: bool,
    /// Drop words listed in the word-class lexicon.
    pub pos_filter: bool,
}

impl PrepConfig {
    /// The lighter pipeline used for classifier features.
    pub fn classifier() -> PrepConfig {
        PrepConfig {
            pipeline: Pipeline::Classifier,
            stopwords: parse_term_list(DEFAULT_STOPWORDS),
            keywords: parse_term_list(DEFAULT_KEYWORDS),
            lexicon: parse_term_list(DEFAULT_LEXICON),
            min_token_len: 2,
            spell_correction: false,
            pos_filter: false,
        }
    }

    /// The fuller pipeline used for topic extraction. Contraction expansion
    /// and singularization are always on; spell correction and word-class
    /// filtering stay opt-in.
    pub fn lda() -> PrepConfig {
        PrepConfig {
            pipeline: Pipeline::Lda,
            ..PrepConfig::classifier()
        }
    }
}

/// Parses a one-term-per-line list; blank lines and `#` comments are skipped.
pub fn parse_term_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

/// Loads a term list from a file.
pub fn load_term_list(path: impl AsRef<Path>) -> std::io::Result<BTreeSet<String>> {
    Ok(parse_term_list(&std::fs::read_to_string(path)?))
}

const CONTRACTIONS: [(&str, &str); 36] = [
    ("ain't", "is not"),
    ("aren't", "are not"),
    ("can't", "cannot"),
    ("couldn't", "could not"),
    ("didn't", "did not"),
    ("doesn't", "does not"),
    ("don't", "do not"),
    ("hadn't", "had not"),
    ("hasn't", "has not"),
    ("haven't", "have not"),
    ("he's", "he is"),
    ("i'd", "i would"),
    ("i'll", "i will"),
    ("i'm", "i am"),
    ("i've", "i have"),
    ("isn't", "is not"),
    ("it's", "it is"),
    ("let's", "let us"),
    ("mightn't", "might not"),
    ("mustn't", "must not"),
    ("needn't", "need not"),
    ("shan't", "shall not"),
    ("she's", "she is"),
    ("shouldn't", "should not"),
    ("that's", "that is"),
    ("there's", "there is"),
    ("they'll", "they will"),
    ("they're", "they are"),
    ("they've", "they have"),
    ("wasn't", "was not"),
    ("we're", "we are"),
    ("we've", "we have"),
    ("weren't", "were not"),
    ("what's", "what is"),
    ("won't", "will not"),
    ("wouldn't", "would not"),
];

/// Splits an identifier at underscores, digit boundaries, lower-to-upper
/// transitions, and upper-to-upper-followed-by-lower transitions. Digits and
/// underscores are discarded; segment case is preserved.
pub fn camel_split(identifier: &str) -> Vec<String> {
    let chars: Vec<char> = identifier.chars().collect();
    let mut segments = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '_' || c.is_ascii_digit() {
            if !current.is_empty() {
                segments.push(std::mem::take(&mut current));
            }
            continue;
        }
        if !current.is_empty() && i > 0 {
            let prev = chars[i - 1];
            let lower_to_upper = prev.is_lowercase() && c.is_uppercase();
            let upper_run_end = prev.is_uppercase()
                && c.is_uppercase()
                && chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if lower_to_upper || upper_run_end {
                segments.push(std::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        segments.push(current);
    }
    segments
}

fn expand_contractions(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    for word in text.split_whitespace() {
        let key: String = word
            .trim_matches(|c: char| !c.is_alphanumeric() && c != '\'' && c != '\u{2019}')
            .replace('\u{2019}', "'")
            .to_lowercase();
        match CONTRACTIONS.iter().find(|(c, _)| *c == key) {
            Some((_, expansion)) => {
                words.extend(expansion.split(' ').map(str::to_string));
            }
            None => words.push(word.to_string()),
        }
    }
    words
}

fn singularize(word: &str) -> String {
    let lower = word.to_lowercase();
    let strip = |n: usize| word[..word.len() - n].to_string();
    if lower.ends_with("sses") {
        return strip(2);
    }
    if lower.ends_with("ies") && lower.len() > 4 {
        let mut w = strip(3);
        w.push('y');
        return w;
    }
    for suffix in ["ches", "shes", "xes", "zes", "oes"] {
        if lower.ends_with(suffix) {
            return strip(2);
        }
    }
    if lower.ends_with('s')
        && !lower.ends_with("ss")
        && !lower.ends_with("us")
        && !lower.ends_with("is")
        && lower.len() > 3
    {
        return strip(1);
    }
    word.to_string()
}

/// First stage shared by per-document and corpus-level normalization: raw
/// words after (for the LDA pipeline) contraction expansion.
fn raw_words(text: &str, config: &PrepConfig) -> Vec<String> {
    match config.pipeline {
        Pipeline::Lda => expand_contractions(text),
        Pipeline::Classifier => text.split_whitespace().map(str::to_string).collect(),
    }
}

fn lookup_key(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}

/// Remaining stages after the (optional) corpus-level spell correction.
fn finish(words: Vec<String>, config: &PrepConfig) -> Vec<String> {
    let mut words = words;
    if config.pipeline == Pipeline::Lda {
        if config.pos_filter {
            words.retain(|w| !config.lexicon.contains(&lookup_key(w)));
        }
        words = words.iter().map(|w| singularize(w)).collect();
    }
    let mut tokens = Vec::new();
    for word in &words {
        for piece in word.split(|c: char| !c.is_alphanumeric() && c != '_') {
            if piece.is_empty() {
                continue;
            }
            for segment in camel_split(piece) {
                let token = segment.to_lowercase();
                if survives_filters(&token, config) {
                    let stem = porter_stem(&token);
                    if survives_filters(&stem, config) {
                        tokens.push(stem);
                    }
                }
            }
        }
    }
    tokens
}

/// Whether a token passes the length, character-set, and term-list filters.
/// Holds for every emitted token, stems included.
pub fn survives_filters(token: &str, config: &PrepConfig) -> bool {
    token.len() >= config.min_token_len
        && !token.is_empty()
        && token.bytes().all(|b| b.is_ascii_lowercase())
        && !config.stopwords.contains(token)
        && !config.keywords.contains(token)
}

/// Normalizes one document. Spell correction needs corpus context and is
/// skipped here; use [`normalize_corpus`] for it.
pub fn normalize(text: &str, config: &PrepConfig) -> TokenStream {
    TokenStream {
        tokens: finish(raw_words(text, config), config),
        source_id: String::new(),
    }
}

/// Normalizes a whole corpus of `(source_id, text)` documents, applying
/// corpus-level spell correction when enabled: a word with corpus frequency 1
/// is replaced by its most frequent edit-distance-1 neighbor, provided that
/// neighbor occurs at least 5 times (ties pick the lexicographically
/// smallest neighbor).
pub fn normalize_corpus(docs: &[(String, String)], config: &PrepConfig) -> Vec<TokenStream> {
    let mut staged: Vec<Vec<String>> = docs
        .iter()
        .map(|(_, text)| raw_words(text, config))
        .collect();

    if config.pipeline == Pipeline::Lda && config.spell_correction {
        let mut freq: HashMap<String, usize> = HashMap::new();
        for words in &staged {
            for w in words {
                *freq.entry(lookup_key(w)).or_insert(0) += 1;
            }
        }
        let frequent: Vec<(&String, usize)> = freq
            .iter()
            .filter(|(w, &n)| n >= 5 && !w.is_empty())
            .map(|(w, &n)| (w, n))
            .collect();
        for words in &mut staged {
            for word in words.iter_mut() {
                let key = lookup_key(word);
                if key.is_empty() || freq[&key] != 1 {
                    continue;
                }
                let mut best: Option<(&String, usize)> = None;
                for &(candidate, count) in &frequent {
                    if edit_distance_one(&key, candidate) {
                        best = match best {
                            None => Some((candidate, count)),
                            Some((bw, bc)) => {
                                if count > bc || (count == bc && candidate < bw) {
                                    Some((candidate, count))
                                } else {
                                    Some((bw, bc))
                                }
                            }
                        };
                    }
                }
                if let Some((replacement, _)) = best {
                    *word = replacement.clone();
                }
            }
        }
    }

    staged
        .into_iter()
        .zip(docs)
        .map(|(words, (id, _))| TokenStream {
            tokens: finish(words, config),
            source_id: id.clone(),
        })
        .collect()
}

/// True when `a` and `b` differ by exactly one edit (insert, delete, or
/// substitute one character).
fn edit_distance_one(a: &str, b: &str) -> bool {
    let (a, b): (Vec<u8>, Vec<u8>) = (a.bytes().collect(), b.bytes().collect());
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    match long.len() - short.len() {
        0 => {
            let diffs = short.iter().zip(long.iter()).filter(|(x, y)| x != y).count();
            diffs == 1
        }
        1 => {
            let mut i = 0;
            let mut j = 0;
            let mut skipped = false;
            while i < short.len() && j < long.len() {
                if short[i] == long[j] {
                    i += 1;
                    j += 1;
                } else if skipped {
                    return false;
                } else {
                    skipped = true;
                    j += 1;
                }
            }
            true
        }
        _ => false,
    }
}
