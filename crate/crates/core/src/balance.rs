//! SMOTE oversampling: synthesizes minority-class points on segments between
//! nearest same-class neighbors until every class matches the majority count.
//!
//! Original rows are preserved verbatim and come first in the output;
//! synthetic rows follow, grouped by class in canonical order, each class's
//! rows in generation order. Given the same seed the output is bit-identical.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::RootCause;
use crate::seeds;
use crate::vectorize::FeatureVector;

#[derive(Debug, Error)]
pub enum BalanceError {
    #[error("vectors ({vectors}) and labels ({labels}) lengths differ")]
    LengthMismatch { vectors: usize, labels: usize },
    #[error("class {class} has {count} member(s); at least 2 are needed to interpolate")]
    ClassTooSmall { class: RootCause, count: usize },
    #[error("neighbor count k must be at least 1")]
    ZeroK,
    #[error("dataset is empty")]
    Empty,
}

/// Feature vectors with parallel labels and a synthetic-row mask.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<RootCause>,
    pub synthetic_mask: Vec<bool>,
}

impl LabeledDataset {
    /// Wraps original (non-synthetic) rows.
    pub fn from_parts(
        vectors: Vec<FeatureVector>,
        labels: Vec<RootCause>,
    ) -> Result<LabeledDataset, BalanceError> {
        if vectors.len() != labels.len() {
            return Err(BalanceError::LengthMismatch {
                vectors: vectors.len(),
                labels: labels.len(),
            });
        }
        let synthetic_mask = vec![false; vectors.len()];
        Ok(LabeledDataset {
            vectors,
            labels,
            synthetic_mask,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Per-class row counts, present classes only.
    pub fn class_counts(&self) -> BTreeMap<RootCause, usize> {
        let mut counts = BTreeMap::new();
        for label in &self.labels {
            *counts.entry(*label).or_insert(0) += 1;
        }
        counts
    }
}

/// Distance used for the nearest-neighbor search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    #[default]
    Euclidean,
    Cosine,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoteConfig {
    /// Neighbors considered per sample; clamped (with a warning) to
    /// `class_size - 1` for classes smaller than `k + 1`.
    pub k: usize,
    pub metric: DistanceMetric,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k: 5,
            metric: DistanceMetric::Euclidean,
        }
    }
}

#[derive(Debug)]
pub struct SmoteOutcome {
    pub data: LabeledDataset,
    pub warnings: Vec<String>,
}

/// Oversamples every minority class up to the majority count. Each synthetic
/// vector is `x_i + u * (x_j - x_i)` with `u ~ Uniform(0,1)` and `x_j` one of
/// the k nearest same-class neighbors of `x_i`.
pub fn smote(
    data: &LabeledDataset,
    config: &SmoteConfig,
    seed: u64,
) -> Result<SmoteOutcome, BalanceError> {
    if config.k == 0 {
        return Err(BalanceError::ZeroK);
    }
    if data.is_empty() {
        return Err(BalanceError::Empty);
    }
    let counts = data.class_counts();
    let majority = *counts.values().max().unwrap();

    let mut warnings = Vec::new();
    let mut out = data.clone();

    for class in RootCause::ALL {
        let Some(&count) = counts.get(&class) else {
            continue;
        };
        if count >= majority {
            continue;
        }
        if count < 2 {
            return Err(BalanceError::ClassTooSmall { class, count });
        }
        let k = if config.k > count - 1 {
            warnings.push(format!(
                "class {class}: k clamped from {} to {}",
                config.k,
                count - 1
            ));
            count - 1
        } else {
            config.k
        };

        let members: Vec<usize> = (0..data.len())
            .filter(|&i| data.labels[i] == class)
            .collect();

        // k nearest same-class neighbors per member, ties broken by index.
        let neighbors: Vec<Vec<usize>> = members
            .iter()
            .map(|&i| {
                let mut dists: Vec<(f64, usize)> = members
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| {
                        let d = match config.metric {
                            DistanceMetric::Euclidean => {
                                data.vectors[i].euclidean_distance(&data.vectors[j])
                            }
                            DistanceMetric::Cosine => {
                                data.vectors[i].cosine_distance(&data.vectors[j])
                            }
                        };
                        (d, j)
                    })
                    .collect();
                dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
                dists.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect();

        let mut rng =
            ChaCha8Rng::seed_from_u64(seeds::component_seed(seed, seeds::SMOTE, class.index() as u64));
        for j in 0..(majority - count) {
            let base_pos = j % members.len();
            let base = members[base_pos];
            let neighbor = neighbors[base_pos][rng.gen_range(0..k)];
            let u: f64 = rng.gen();
            let synth = data.vectors[base].interpolate(&data.vectors[neighbor], u);
            out.vectors.push(synth);
            out.labels.push(class);
            out.synthetic_mask.push(true);
        }
    }

    Ok(SmoteOutcome {
        data: out,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(x: f64, y: f64) -> FeatureVector {
        FeatureVector::new(vec![(0, x), (1, y)], 2)
    }

    fn dataset(spec: &[(RootCause, usize)]) -> LabeledDataset {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for (class, n) in spec {
            for i in 0..*n {
                vectors.push(vec2(class.index() as f64 * 10.0 + i as f64, i as f64));
                labels.push(*class);
            }
        }
        LabeledDataset::from_parts(vectors, labels).unwrap()
    }

    #[test]
    fn balanced_input_is_returned_unchanged() {
        let data = dataset(&[(RootCause::GuiIssue, 4), (RootCause::SecurityIssue, 4)]);
        let outcome = smote(&data, &SmoteConfig::default(), 7).unwrap();
        assert_eq!(outcome.data, data);
        assert!(!outcome.data.synthetic_mask.iter().any(|&s| s));
    }

    #[test]
    fn minority_is_raised_to_majority_count() {
        let data = dataset(&[(RootCause::GuiIssue, 10), (RootCause::NetworkIssue, 5)]);
        let outcome = smote(&data, &SmoteConfig::default(), 7).unwrap();
        let counts = outcome.data.class_counts();
        assert_eq!(counts[&RootCause::GuiIssue], 10);
        assert_eq!(counts[&RootCause::NetworkIssue], 10);
        let synthetic = outcome.data.synthetic_mask.iter().filter(|&&s| s).count();
        assert_eq!(synthetic, 5);
        // k = 5 exceeds class_size - 1 = 4.
        assert_eq!(outcome.warnings.len(), 1);
    }

    #[test]
    fn originals_are_preserved_verbatim_and_first() {
        let data = dataset(&[(RootCause::GuiIssue, 6), (RootCause::DatabaseIssue, 3)]);
        let outcome = smote(&data, &SmoteConfig::default(), 3).unwrap();
        assert_eq!(&outcome.data.vectors[..data.len()], &data.vectors[..]);
        assert_eq!(&outcome.data.labels[..data.len()], &data.labels[..]);
        assert!(outcome.data.synthetic_mask[..data.len()].iter().all(|&s| !s));
        assert!(outcome.data.synthetic_mask[data.len()..].iter().all(|&s| s));
    }

    #[test]
    fn two_point_class_synthesizes_on_the_segment() {
        let mut data = dataset(&[(RootCause::GuiIssue, 8)]);
        data.vectors.push(vec2(0.0, 0.0));
        data.labels.push(RootCause::DatabaseIssue);
        data.synthetic_mask.push(false);
        data.vectors.push(vec2(1.0, 1.0));
        data.labels.push(RootCause::DatabaseIssue);
        data.synthetic_mask.push(false);

        let config = SmoteConfig {
            k: 1,
            ..SmoteConfig::default()
        };
        let outcome = smote(&data, &config, 11).unwrap();
        for (i, synthetic) in outcome.data.synthetic_mask.iter().enumerate() {
            if *synthetic {
                let x = outcome.data.vectors[i].get(0);
                let y = outcome.data.vectors[i].get(1);
                assert!((x - y).abs() < 1e-12, "point must lie on the diagonal");
                assert!((0.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical_and_seeds_change_points() {
        let data = dataset(&[(RootCause::GuiIssue, 9), (RootCause::NetworkIssue, 4)]);
        let a = smote(&data, &SmoteConfig::default(), 5).unwrap();
        let b = smote(&data, &SmoteConfig::default(), 5).unwrap();
        assert_eq!(a.data, b.data);
        let c = smote(&data, &SmoteConfig::default(), 6).unwrap();
        assert_eq!(a.data.class_counts(), c.data.class_counts());
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn singleton_class_is_an_error() {
        let data = dataset(&[(RootCause::GuiIssue, 5), (RootCause::SecurityIssue, 1)]);
        assert!(matches!(
            smote(&data, &SmoteConfig::default(), 1),
            Err(BalanceError::ClassTooSmall { .. })
        ));
    }

    #[test]
    fn synthetic_rows_are_convex_combinations() {
        let data = dataset(&[(RootCause::GuiIssue, 12), (RootCause::PerformanceIssue, 4)]);
        let outcome = smote(&data, &SmoteConfig::default(), 21).unwrap();
        let originals: Vec<&FeatureVector> = data
            .vectors
            .iter()
            .zip(&data.labels)
            .filter(|(_, l)| **l == RootCause::PerformanceIssue)
            .map(|(v, _)| v)
            .collect();
        for (i, synthetic) in outcome.data.synthetic_mask.iter().enumerate() {
            if !*synthetic {
                continue;
            }
            let s = &outcome.data.vectors[i];
            // Some original pair must bound the synthetic point
            // coordinate-wise.
            let bounded = originals.iter().any(|a| {
                originals.iter().any(|b| {
                    (0..2).all(|d| {
                        let (lo, hi) = (a.get(d).min(b.get(d)), a.get(d).max(b.get(d)));
                        s.get(d) >= lo - 1e-12 && s.get(d) <= hi + 1e-12
                    })
                })
            });
            assert!(bounded);
        }
    }
}
