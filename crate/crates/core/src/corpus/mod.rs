//! Bug-report data model: loading, validation, and frequency analysis.
//!
//! Two on-disk formats are supported. JSON-lines is canonical (it holds the
//! event list natively); CSV flattens events into fixed `ts_*` columns for
//! spreadsheet interop. Rows that fail validation are collected into a reject
//! list, never silently dropped.

pub mod tracker;

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Timelike, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Closed set of root-cause categories a bug report can be labeled with.
///
/// The variant order below is the canonical order used everywhere a
/// deterministic ordering is needed (class indices, tie-breaking, reports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootCause {
    ConfigurationIssue,
    NetworkIssue,
    DatabaseIssue,
    GuiIssue,
    PerformanceIssue,
    PermissionDeprecationIssue,
    SecurityIssue,
    ProgramAnomalyIssue,
    TestCodeIssue,
}

/// Number of root-cause categories.
pub const NUM_CLASSES: usize = 9;

impl RootCause {
    /// All categories in canonical order.
    pub const ALL: [RootCause; NUM_CLASSES] = [
        RootCause::ConfigurationIssue,
        RootCause::NetworkIssue,
        RootCause::DatabaseIssue,
        RootCause::GuiIssue,
        RootCause::PerformanceIssue,
        RootCause::PermissionDeprecationIssue,
        RootCause::SecurityIssue,
        RootCause::ProgramAnomalyIssue,
        RootCause::TestCodeIssue,
    ];

    /// Position of this category in the canonical order.
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap()
    }

    /// Category at a canonical index, if in range.
    pub fn from_index(index: usize) -> Option<RootCause> {
        Self::ALL.get(index).copied()
    }

    /// Stable kebab-case form; round-trips through [`RootCause::from_str`].
    pub fn as_str(self) -> &'static str {
        match self {
            RootCause::ConfigurationIssue => "configuration-issue",
            RootCause::NetworkIssue => "network-issue",
            RootCause::DatabaseIssue => "database-issue",
            RootCause::GuiIssue => "gui-issue",
            RootCause::PerformanceIssue => "performance-issue",
            RootCause::PermissionDeprecationIssue => "permission-deprecation-issue",
            RootCause::SecurityIssue => "security-issue",
            RootCause::ProgramAnomalyIssue => "program-anomaly-issue",
            RootCause::TestCodeIssue => "test-code-issue",
        }
    }

    /// Display name used in human-readable tables.
    pub fn human_label(self) -> &'static str {
        match self {
            RootCause::ConfigurationIssue => "Configuration issue",
            RootCause::NetworkIssue => "Network issue",
            RootCause::DatabaseIssue => "Database-related issue",
            RootCause::GuiIssue => "GUI-related issue",
            RootCause::PerformanceIssue => "Performance issue",
            RootCause::PermissionDeprecationIssue => "Permission/Deprecation issue",
            RootCause::SecurityIssue => "Security issue",
            RootCause::ProgramAnomalyIssue => "Program Anomaly issue",
            RootCause::TestCodeIssue => "Test Code-related issue",
        }
    }
}

impl fmt::Display for RootCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RootCause {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .find(|c| c.as_str() == s)
            .copied()
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

impl Serialize for RootCause {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RootCause {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Error returned when a label string is not one of the nine categories.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown label {0:?}")]
pub struct UnknownLabel(pub String);

/// Milestones in a bug's lifecycle captured by the issue tracker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Reported,
    FirstResponse,
    Assigned,
    CommitStart,
    CommitEnd,
    Resolved,
}

impl EventKind {
    pub const ALL: [EventKind; 6] = [
        EventKind::Reported,
        EventKind::FirstResponse,
        EventKind::Assigned,
        EventKind::CommitStart,
        EventKind::CommitEnd,
        EventKind::Resolved,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Reported => "reported",
            EventKind::FirstResponse => "first-response",
            EventKind::Assigned => "assigned",
            EventKind::CommitStart => "commit-start",
            EventKind::CommitEnd => "commit-end",
            EventKind::Resolved => "resolved",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .find(|k| k.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown event kind {s:?}"))
    }
}

impl Serialize for EventKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for EventKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A timestamped lifecycle event. Timestamps are UTC with second precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugEvent {
    pub kind: EventKind,
    #[serde(with = "rfc3339_seconds")]
    pub ts: DateTime<Utc>,
}

mod rfc3339_seconds {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ts.to_rfc3339_opts(SecondsFormat::Secs, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse_timestamp(&raw).map_err(serde::de::Error::custom)
    }
}

/// Parses an RFC 3339 timestamp, normalizing to UTC and truncating to seconds.
pub fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(raw)
        .map(|d| {
            d.with_timezone(&Utc)
                .with_nanosecond(0)
                .expect("zero nanoseconds is always valid")
        })
        .map_err(|e| format!("malformed timestamp {raw:?}: {e}"))
}

/// Final resolution state of a report. Anything other than the two known
/// strings maps to `Unknown`; only the time-to-fix analysis filters on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resolution {
    Fixed,
    NotFixed,
    #[default]
    Unknown,
}

impl Resolution {
    fn from_raw(raw: Option<&str>) -> Resolution {
        match raw {
            Some("fixed") => Resolution::Fixed,
            Some("not-fixed") => Resolution::NotFixed,
            _ => Resolution::Unknown,
        }
    }

    fn to_raw(self) -> Option<&'static str> {
        match self {
            Resolution::Fixed => Some("fixed"),
            Resolution::NotFixed => Some("not-fixed"),
            Resolution::Unknown => None,
        }
    }
}

/// One issue-tracker record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BugReport {
    pub id: String,
    pub ecosystem: String,
    pub project: String,
    pub title: String,
    pub summary: String,
    pub label: Option<RootCause>,
    /// Sorted by timestamp ascending, at most one event per kind.
    pub events: Vec<BugEvent>,
    pub resolution: Resolution,
}

impl BugReport {
    /// Timestamp of the given event kind, if present.
    pub fn event_ts(&self, kind: EventKind) -> Option<DateTime<Utc>> {
        self.events.iter().find(|e| e.kind == kind).map(|e| e.ts)
    }

    /// Text fed to the classifier. Titles are excluded by default; pass
    /// `include_title` to prepend them.
    pub fn text(&self, include_title: bool) -> String {
        if include_title && !self.title.is_empty() {
            format!("{} {}", self.title, self.summary)
        } else {
            self.summary.clone()
        }
    }
}

/// Where a corpus came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    File { path: String, format: Format },
    Tracker { endpoint: String, query: String },
    Memory,
}

/// On-disk corpus formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

/// An immutable collection of validated bug reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    reports: Vec<BugReport>,
    provenance: Source,
}

impl Corpus {
    /// Builds a corpus from already-validated reports, checking id uniqueness.
    pub fn from_reports(reports: Vec<BugReport>, provenance: Source) -> Result<Corpus, CorpusError> {
        let mut seen = HashSet::new();
        for r in &reports {
            if r.id.is_empty() {
                return Err(CorpusError::EmptyId);
            }
            if !seen.insert(r.id.clone()) {
                return Err(CorpusError::DuplicateId(r.id.clone()));
            }
        }
        Ok(Corpus { reports, provenance })
    }

    pub fn reports(&self) -> &[BugReport] {
        &self.reports
    }

    pub fn provenance(&self) -> &Source {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    /// Reports that carry a root-cause label.
    pub fn labeled_subset(&self) -> Vec<&BugReport> {
        self.reports.iter().filter(|r| r.label.is_some()).collect()
    }

    /// Reports whose resolution is `Fixed`.
    pub fn fixed_subset(&self) -> Vec<&BugReport> {
        self.reports
            .iter()
            .filter(|r| r.resolution == Resolution::Fixed)
            .collect()
    }
}

/// Why a row was rejected during load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    /// 1-based line (JSONL) or record (CSV) number.
    pub line: usize,
    /// Report id when one could be read from the row.
    pub id: Option<String>,
    pub reason: String,
}

/// Result of loading a corpus: validated reports plus the reject list.
/// Accepted + rejected always accounts for every input row.
#[derive(Debug)]
pub struct LoadOutcome {
    pub corpus: Corpus,
    pub rejected: Vec<RejectedRow>,
}

/// Errors that abort a load entirely (row-level problems go to the reject list).
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown corpus format {0:?} (expected \"csv\" or \"jsonl\")")]
    UnknownFormat(String),
    #[error("csv header mismatch: expected {expected:?}, found {found:?}")]
    BadCsvHeader { expected: String, found: String },
    #[error("duplicate report id {0:?}")]
    DuplicateId(String),
    #[error("report id must be non-empty")]
    EmptyId,
    #[error("corpus has no labeled reports")]
    EmptyLabeledSubset,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Wire schema for one JSONL row.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawReport {
    id: String,
    #[serde(default)]
    ecosystem: String,
    #[serde(default)]
    project: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    summary: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    resolution: Option<String>,
    #[serde(default)]
    events: Vec<RawEvent>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawEvent {
    kind: String,
    ts: String,
}

impl RawReport {
    fn from_report(report: &BugReport) -> RawReport {
        RawReport {
            id: report.id.clone(),
            ecosystem: report.ecosystem.clone(),
            project: report.project.clone(),
            title: report.title.clone(),
            summary: report.summary.clone(),
            label: report.label.map(|l| l.as_str().to_string()),
            resolution: report.resolution.to_raw().map(str::to_string),
            events: report
                .events
                .iter()
                .map(|e| RawEvent {
                    kind: e.kind.as_str().to_string(),
                    ts: e.ts.to_rfc3339_opts(SecondsFormat::Secs, true),
                })
                .collect(),
        }
    }

    /// Row-level validation shared by the file loaders and the tracker client.
    fn validate(self) -> Result<BugReport, String> {
        if self.id.is_empty() {
            return Err("report id must be non-empty".to_string());
        }
        let label = match &self.label {
            None => None,
            Some(raw) => Some(raw.parse::<RootCause>().map_err(|e| e.to_string())?),
        };
        let mut events = Vec::with_capacity(self.events.len());
        let mut kinds_seen = HashSet::new();
        for raw in &self.events {
            let kind: EventKind = raw.kind.parse()?;
            if !kinds_seen.insert(kind) {
                return Err(format!("duplicate event kind {kind:?}"));
            }
            let ts = parse_timestamp(&raw.ts)?;
            events.push(BugEvent { kind, ts });
        }
        events.sort_by_key(|e| (e.ts, e.kind));
        Ok(BugReport {
            id: self.id,
            ecosystem: self.ecosystem,
            project: self.project,
            title: self.title,
            summary: self.summary,
            label,
            events,
            resolution: Resolution::from_raw(self.resolution.as_deref()),
        })
    }
}

const CSV_HEADER: [&str; 13] = [
    "id",
    "ecosystem",
    "project",
    "title",
    "summary",
    "label",
    "resolution",
    "ts_reported",
    "ts_first_response",
    "ts_assigned",
    "ts_commit_start",
    "ts_commit_end",
    "ts_resolved",
];

const CSV_EVENT_COLUMNS: [EventKind; 6] = [
    EventKind::Reported,
    EventKind::FirstResponse,
    EventKind::Assigned,
    EventKind::CommitStart,
    EventKind::CommitEnd,
    EventKind::Resolved,
];

/// Loads and validates a corpus from a local file.
pub fn load_corpus(path: impl AsRef<Path>, format: Format) -> Result<LoadOutcome, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Unreadable {
        path: path.display().to_string(),
        source,
    })?;
    let provenance = Source::File {
        path: path.display().to_string(),
        format,
    };
    load_corpus_from_reader(file, format, provenance)
}

/// Same as [`load_corpus`] but over any reader.
pub fn load_corpus_from_reader(
    reader: impl Read,
    format: Format,
    provenance: Source,
) -> Result<LoadOutcome, CorpusError> {
    match format {
        Format::Jsonl => load_jsonl(reader, provenance),
        Format::Csv => load_csv(reader, provenance),
    }
}

fn load_jsonl(reader: impl Read, provenance: Source) -> Result<LoadOutcome, CorpusError> {
    let reader = BufReader::new(reader);
    let mut raws = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawReport>(&line) {
            Ok(raw) => raws.push((line_no, Ok(raw))),
            Err(e) => raws.push((line_no, Err(format!("invalid json: {e}")))),
        }
    }
    Ok(collect_rows(raws, provenance))
}

fn load_csv(reader: impl Read, provenance: Source) -> Result<LoadOutcome, CorpusError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?
        .clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != CSV_HEADER {
        return Err(CorpusError::BadCsvHeader {
            expected: CSV_HEADER.join(","),
            found: found.join(","),
        });
    }
    let mut raws = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let line_no = idx + 1;
        match record {
            Err(e) => raws.push((line_no, Err(format!("invalid csv record: {e}")))),
            Ok(record) => {
                let cell = |i: usize| record.get(i).unwrap_or("").to_string();
                let opt_cell = |i: usize| {
                    let v = cell(i);
                    if v.is_empty() {
                        None
                    } else {
                        Some(v)
                    }
                };
                let mut events = Vec::new();
                for (offset, kind) in CSV_EVENT_COLUMNS.iter().enumerate() {
                    if let Some(ts) = opt_cell(7 + offset) {
                        events.push(RawEvent {
                            kind: kind.as_str().to_string(),
                            ts,
                        });
                    }
                }
                raws.push((
                    line_no,
                    Ok(RawReport {
                        id: cell(0),
                        ecosystem: cell(1),
                        project: cell(2),
                        title: cell(3),
                        summary: cell(4),
                        label: opt_cell(5),
                        resolution: opt_cell(6),
                        events,
                    }),
                ));
            }
        }
    }
    Ok(collect_rows(raws, provenance))
}

/// Validates parsed rows, separating accepted reports from rejects.
/// Duplicate ids reject the later row; the first occurrence wins.
fn collect_rows(raws: Vec<(usize, Result<RawReport, String>)>, provenance: Source) -> LoadOutcome {
    let mut reports = Vec::new();
    let mut rejected = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    for (line, raw) in raws {
        match raw {
            Err(reason) => rejected.push(RejectedRow {
                line,
                id: None,
                reason,
            }),
            Ok(raw) => {
                let id = if raw.id.is_empty() {
                    None
                } else {
                    Some(raw.id.clone())
                };
                match raw.validate() {
                    Err(reason) => rejected.push(RejectedRow { line, id, reason }),
                    Ok(report) => {
                        if !seen_ids.insert(report.id.clone()) {
                            rejected.push(RejectedRow {
                                line,
                                id,
                                reason: format!("duplicate report id {:?}", report.id),
                            });
                        } else {
                            reports.push(report);
                        }
                    }
                }
            }
        }
    }
    LoadOutcome {
        corpus: Corpus {
            reports,
            provenance,
        },
        rejected,
    }
}

/// Converts raw tracker records into a corpus using the same row validation
/// as the file loaders.
pub fn corpus_from_raw_records(
    records: Vec<serde_json::Value>,
    mapping: &tracker::FieldMapping,
    provenance: Source,
) -> LoadOutcome {
    let raws = records
        .into_iter()
        .enumerate()
        .map(|(idx, value)| (idx + 1, Ok(mapping.apply(&value))))
        .collect();
    collect_rows(raws, provenance)
}

/// Writes a corpus in the requested format.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: Format) -> Result<(), CorpusError> {
    let mut file = File::create(path.as_ref())?;
    write_corpus(corpus, &mut file, format)
}

/// Writes a corpus to any writer.
pub fn write_corpus(corpus: &Corpus, writer: &mut impl Write, format: Format) -> Result<(), CorpusError> {
    match format {
        Format::Jsonl => {
            for report in &corpus.reports {
                let raw = RawReport::from_report(report);
                serde_json::to_writer(&mut *writer, &raw)
                    .map_err(std::io::Error::other)?;
                writer.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut csv_writer = csv::Writer::from_writer(writer);
            csv_writer
                .write_record(CSV_HEADER)
                .map_err(std::io::Error::other)?;
            for report in &corpus.reports {
                let mut record = vec![
                    report.id.clone(),
                    report.ecosystem.clone(),
                    report.project.clone(),
                    report.title.clone(),
                    report.summary.clone(),
                    report.label.map(|l| l.as_str().to_string()).unwrap_or_default(),
                    report
                        .resolution
                        .to_raw()
                        .map(str::to_string)
                        .unwrap_or_default(),
                ];
                for kind in CSV_EVENT_COLUMNS {
                    record.push(
                        report
                            .event_ts(kind)
                            .map(|ts| ts.to_rfc3339_opts(SecondsFormat::Secs, true))
                            .unwrap_or_default(),
                    );
                }
                csv_writer
                    .write_record(&record)
                    .map_err(std::io::Error::other)?;
            }
            csv_writer
                .flush()
                .map_err(std::io::Error::other)?;
        }
    }
    Ok(())
}

/// Count and share of labeled reports per category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency {
    pub count: usize,
    pub share: f64,
}

/// How often each category appears among the labeled reports.
/// Shares are `count / labeled_total` exactly and sum to 1.
pub fn frequency(corpus: &Corpus) -> Result<BTreeMap<RootCause, Frequency>, CorpusError> {
    let labeled = corpus.labeled_subset();
    if labeled.is_empty() {
        return Err(CorpusError::EmptyLabeledSubset);
    }
    let total = labeled.len();
    let mut counts: BTreeMap<RootCause, usize> = BTreeMap::new();
    for report in labeled {
        *counts.entry(report.label.unwrap()).or_insert(0) += 1;
    }
    Ok(counts
        .into_iter()
        .map(|(cause, count)| {
            (
                cause,
                Frequency {
                    count,
                    share: count as f64 / total as f64,
                },
            )
        })
        .collect())
}
