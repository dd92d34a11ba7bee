//! Bug-fixing delay metrics over report event timelines.
//!
//! Five intervals, each in fractional hours: response (reported to first
//! response), assignment (first response to assigned), change start (assigned
//! to first commit), fixing duration (first to last commit), and integration
//! (last commit to resolved). A metric is absent when either event is
//! missing; a negative raw interval means the timeline is corrupt and is an
//! error.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{BugReport, Corpus, EventKind, Resolution, RootCause};

#[derive(Debug, Error)]
pub enum TimefixError {
    #[error("report {id}: {metric} interval is negative ({hours:.4} h); events out of order")]
    OutOfOrder {
        id: String,
        metric: DelayMetric,
        hours: f64,
    },
}

/// The five delay metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DelayMetric {
    Dbr,
    Dba,
    Dbc,
    Dbf,
    Dac,
}

impl DelayMetric {
    pub const ALL: [DelayMetric; 5] = [
        DelayMetric::Dbr,
        DelayMetric::Dba,
        DelayMetric::Dbc,
        DelayMetric::Dbf,
        DelayMetric::Dac,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DelayMetric::Dbr => "dbr",
            DelayMetric::Dba => "dba",
            DelayMetric::Dbc => "dbc",
            DelayMetric::Dbf => "dbf",
            DelayMetric::Dac => "dac",
        }
    }

    /// `(from, to)` event pair whose interval defines the metric.
    pub fn events(self) -> (EventKind, EventKind) {
        match self {
            DelayMetric::Dbr => (EventKind::Reported, EventKind::FirstResponse),
            DelayMetric::Dba => (EventKind::FirstResponse, EventKind::Assigned),
            DelayMetric::Dbc => (EventKind::Assigned, EventKind::CommitStart),
            DelayMetric::Dbf => (EventKind::CommitStart, EventKind::CommitEnd),
            DelayMetric::Dac => (EventKind::CommitEnd, EventKind::Resolved),
        }
    }
}

impl fmt::Display for DelayMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DelayMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .find(|m| m.as_str() == s.to_lowercase())
            .copied()
            .ok_or_else(|| format!("unknown delay metric {s:?}"))
    }
}

/// Per-report delay values in hours; absent when events are missing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DelaySet {
    pub dbr: Option<f64>,
    pub dba: Option<f64>,
    pub dbc: Option<f64>,
    pub dbf: Option<f64>,
    pub dac: Option<f64>,
}

impl DelaySet {
    pub fn get(&self, metric: DelayMetric) -> Option<f64> {
        match metric {
            DelayMetric::Dbr => self.dbr,
            DelayMetric::Dba => self.dba,
            DelayMetric::Dbc => self.dbc,
            DelayMetric::Dbf => self.dbf,
            DelayMetric::Dac => self.dac,
        }
    }

    fn set(&mut self, metric: DelayMetric, value: f64) {
        let slot = match metric {
            DelayMetric::Dbr => &mut self.dbr,
            DelayMetric::Dba => &mut self.dba,
            DelayMetric::Dbc => &mut self.dbc,
            DelayMetric::Dbf => &mut self.dbf,
            DelayMetric::Dac => &mut self.dac,
        };
        *slot = Some(value);
    }
}

/// Computes every delay whose event pair is present on the report.
pub fn compute_delays(report: &BugReport) -> Result<DelaySet, TimefixError> {
    let mut delays = DelaySet::default();
    for metric in DelayMetric::ALL {
        let (from, to) = metric.events();
        if let (Some(start), Some(end)) = (report.event_ts(from), report.event_ts(to)) {
            let hours = (end - start).num_seconds() as f64 / 3600.0;
            if hours < 0.0 {
                return Err(TimefixError::OutOfOrder {
                    id: report.id.clone(),
                    metric,
                    hours,
                });
            }
            delays.set(metric, hours);
        }
    }
    Ok(delays)
}

/// Five-number summary plus mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear interpolation between closest ranks (the common "type 7" rule).
/// `values` must be sorted ascending and non-empty.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    values[lo] + (h - lo as f64) * (values[hi] - values[lo])
}

fn box_stats(mut values: Vec<f64>) -> BoxStats {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    BoxStats {
        n,
        min: values[0],
        q1: quantile(&values, 0.25),
        median: quantile(&values, 0.5),
        mean: values.iter().sum::<f64>() / n as f64,
        q3: quantile(&values, 0.75),
        max: values[n - 1],
    }
}

/// Per-category descriptive statistics of one delay metric.
#[derive(Debug)]
pub struct DelayStats {
    pub per_category: BTreeMap<RootCause, BoxStats>,
    /// Labeled categories with no present value for the metric.
    pub skipped: Vec<RootCause>,
    /// Reports whose timeline was corrupt for this metric.
    pub warnings: Vec<String>,
}

/// Aggregates one metric over the fixed-resolution labeled reports of a
/// corpus. Categories with no present values are skipped with a warning
/// entry rather than reported as empty.
pub fn delay_stats(corpus: &Corpus, metric: DelayMetric) -> DelayStats {
    let mut values: BTreeMap<RootCause, Vec<f64>> = BTreeMap::new();
    let mut seen: BTreeMap<RootCause, usize> = BTreeMap::new();
    let mut warnings = Vec::new();
    for report in corpus.reports() {
        if report.resolution != Resolution::Fixed {
            continue;
        }
        let Some(label) = report.label else {
            continue;
        };
        *seen.entry(label).or_insert(0) += 1;
        match compute_delays(report) {
            Err(e) => warnings.push(e.to_string()),
            Ok(delays) => {
                if let Some(hours) = delays.get(metric) {
                    values.entry(label).or_default().push(hours);
                }
            }
        }
    }
    let per_category: BTreeMap<RootCause, BoxStats> = values
        .into_iter()
        .map(|(cause, vals)| (cause, box_stats(vals)))
        .collect();
    let skipped = seen
        .keys()
        .filter(|c| !per_category.contains_key(c))
        .copied()
        .collect();
    DelayStats {
        per_category,
        skipped,
        warnings,
    }
}

/// Renders box-plot data as CSV
/// (`category,metric,n,min,q1,median,mean,q3,max`).
pub fn render_csv(stats: &BTreeMap<DelayMetric, DelayStats>) -> String {
    let mut out = String::from("category,metric,n,min,q1,median,mean,q3,max\n");
    for (metric, stat) in stats {
        for (cause, b) in &stat.per_category {
            out.push_str(&format!(
                "{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
                cause, metric, b.n, b.min, b.q1, b.median, b.mean, b.q3, b.max
            ));
        }
    }
    out
}
