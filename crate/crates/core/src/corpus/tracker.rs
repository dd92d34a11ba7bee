//! Schema-generic issue-tracker client.
//!
//! Speaks a documented REST shape rather than any one tracker's API:
//!
//! ```text
//! GET {endpoint}?query={query}&limit={page_size}&offset={offset}
//! -> 200 {"records": [ {...}, {...} ]}
//! ```
//!
//! Pages are fetched until a page comes back shorter than `page_size`.
//! Remote records are mapped onto the report schema through a key-value
//! mapping file, then run through the same row validation as file loads.

use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use super::{EventKind, RawEvent, RawReport};

/// Connection settings for [`fetch_raw_records`].
#[derive(Debug, Clone)]
pub struct TrackerConfig {
    pub page_size: usize,
    /// Retries per page request on transport errors and 5xx/429 responses.
    pub max_retries: u32,
    /// First retry delay; doubles on each subsequent attempt.
    pub retry_base: Duration,
    /// Sent as `Authorization: Bearer <token>` when present.
    pub bearer_token: Option<String>,
    pub timeout: Duration,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            page_size: 100,
            max_retries: 3,
            retry_base: Duration::from_millis(500),
            bearer_token: None,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Error)]
pub enum TrackerError {
    #[error("network failure after {attempts} attempts: {message}")]
    Network { attempts: u32, message: String },
    #[error("tracker returned http {status}")]
    Http { status: u16 },
    #[error("response does not match the expected schema: {0}")]
    SchemaMismatch(String),
    #[error("invalid field mapping: {0}")]
    InvalidMapping(String),
    #[error("page_size must be positive")]
    ZeroPageSize,
}

#[derive(Debug, Deserialize)]
struct Page {
    records: Vec<serde_json::Value>,
}

/// Fetches every raw record for `query`, following offset pagination.
pub fn fetch_raw_records(
    endpoint: &str,
    query: &str,
    config: &TrackerConfig,
) -> Result<Vec<serde_json::Value>, TrackerError> {
    if config.page_size == 0 {
        return Err(TrackerError::ZeroPageSize);
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(config.timeout))
        .build()
        .into();

    let mut records = Vec::new();
    let mut offset = 0usize;
    loop {
        let page = fetch_page(&agent, endpoint, query, offset, config)?;
        let len = page.records.len();
        records.extend(page.records);
        if len < config.page_size {
            break;
        }
        offset += config.page_size;
    }
    Ok(records)
}

fn fetch_page(
    agent: &ureq::Agent,
    endpoint: &str,
    query: &str,
    offset: usize,
    config: &TrackerConfig,
) -> Result<Page, TrackerError> {
    let mut attempt = 0u32;
    loop {
        let mut request = agent
            .get(endpoint)
            .query("query", query)
            .query("limit", config.page_size.to_string())
            .query("offset", offset.to_string());
        if let Some(token) = &config.bearer_token {
            request = request.header("Authorization", format!("Bearer {token}"));
        }
        let message: String = match request.call() {
            Err(e) => e.to_string(),
            Ok(mut response) => {
                let status = response.status().as_u16();
                if (200..300).contains(&status) {
                    let body = response
                        .body_mut()
                        .read_to_string()
                        .map_err(|e| TrackerError::SchemaMismatch(e.to_string()))?;
                    let page: Page = serde_json::from_str(&body)
                        .map_err(|e| TrackerError::SchemaMismatch(e.to_string()))?;
                    return Ok(page);
                } else if status >= 500 || status == 429 {
                    format!("http {status}")
                } else {
                    return Err(TrackerError::Http { status });
                }
            }
        };
        if attempt >= config.max_retries {
            return Err(TrackerError::Network {
                attempts: attempt + 1,
                message,
            });
        }
        std::thread::sleep(config.retry_base * 2u32.pow(attempt));
        attempt += 1;
    }
}

/// Report fields a remote record can be mapped onto.
#[derive(Debug, Clone, PartialEq, Eq)]
enum TargetField {
    Id,
    Ecosystem,
    Project,
    Title,
    Summary,
    Label,
    Resolution,
    Event(EventKind),
}

impl TargetField {
    fn parse(name: &str) -> Result<TargetField, TrackerError> {
        if let Some(kind) = name.strip_prefix("events.") {
            let kind: EventKind = kind
                .parse()
                .map_err(|e: String| TrackerError::InvalidMapping(e))?;
            return Ok(TargetField::Event(kind));
        }
        match name {
            "id" => Ok(TargetField::Id),
            "ecosystem" => Ok(TargetField::Ecosystem),
            "project" => Ok(TargetField::Project),
            "title" => Ok(TargetField::Title),
            "summary" => Ok(TargetField::Summary),
            "label" => Ok(TargetField::Label),
            "resolution" => Ok(TargetField::Resolution),
            other => Err(TrackerError::InvalidMapping(format!(
                "unknown target field {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
enum MappingValue {
    /// Dot-separated path into the remote JSON; numeric segments index arrays.
    Path(Vec<String>),
    /// Constant value, written as a double-quoted string in the mapping file.
    Literal(String),
}

impl MappingValue {
    fn resolve(&self, record: &serde_json::Value) -> Option<String> {
        match self {
            MappingValue::Literal(s) => Some(s.clone()),
            MappingValue::Path(segments) => {
                let mut current = record;
                for segment in segments {
                    current = match current {
                        serde_json::Value::Object(map) => map.get(segment)?,
                        serde_json::Value::Array(items) => {
                            items.get(segment.parse::<usize>().ok()?)?
                        }
                        _ => return None,
                    };
                }
                match current {
                    serde_json::Value::String(s) => Some(s.clone()),
                    serde_json::Value::Number(n) => Some(n.to_string()),
                    serde_json::Value::Bool(b) => Some(b.to_string()),
                    _ => None,
                }
            }
        }
    }
}

/// Maps remote JSON paths onto report fields.
///
/// File format, one assignment per line (`#` starts a comment):
///
/// ```text
/// id = key
/// summary = fields.description
/// project = "hbase"
/// events.reported = fields.created_at
/// ```
#[derive(Debug, Clone)]
pub struct FieldMapping {
    entries: Vec<(TargetField, MappingValue)>,
}

impl FieldMapping {
    pub fn parse(text: &str) -> Result<FieldMapping, TrackerError> {
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, value) = line.split_once('=').ok_or_else(|| {
                TrackerError::InvalidMapping(format!("line {}: expected `field = value`", idx + 1))
            })?;
            let target = TargetField::parse(name.trim())?;
            let value = value.trim();
            let value = if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
                MappingValue::Literal(value[1..value.len() - 1].to_string())
            } else if value.is_empty() {
                return Err(TrackerError::InvalidMapping(format!(
                    "line {}: empty value",
                    idx + 1
                )));
            } else {
                MappingValue::Path(value.split('.').map(str::to_string).collect())
            };
            entries.push((target, value));
        }
        if !entries.iter().any(|(t, _)| *t == TargetField::Id) {
            return Err(TrackerError::InvalidMapping(
                "mapping must assign `id`".to_string(),
            ));
        }
        Ok(FieldMapping { entries })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<FieldMapping, TrackerError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TrackerError::InvalidMapping(e.to_string()))?;
        FieldMapping::parse(&text)
    }

    /// Projects one remote record into the row schema; validation happens
    /// later, in the shared row validator.
    pub(super) fn apply(&self, record: &serde_json::Value) -> RawReport {
        let mut raw = RawReport {
            id: String::new(),
            ecosystem: String::new(),
            project: String::new(),
            title: String::new(),
            summary: String::new(),
            label: None,
            resolution: None,
            events: Vec::new(),
        };
        for (target, value) in &self.entries {
            let resolved = value.resolve(record);
            match target {
                TargetField::Id => raw.id = resolved.unwrap_or_default(),
                TargetField::Ecosystem => raw.ecosystem = resolved.unwrap_or_default(),
                TargetField::Project => raw.project = resolved.unwrap_or_default(),
                TargetField::Title => raw.title = resolved.unwrap_or_default(),
                TargetField::Summary => raw.summary = resolved.unwrap_or_default(),
                TargetField::Label => raw.label = resolved,
                TargetField::Resolution => raw.resolution = resolved,
                TargetField::Event(kind) => {
                    if let Some(ts) = resolved {
                        raw.events.push(RawEvent {
                            kind: kind.as_str().to_string(),
                            ts,
                        });
                    }
                }
            }
        }
        raw
    }
}
