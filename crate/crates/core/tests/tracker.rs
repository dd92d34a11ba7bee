//! Tracker client behavior against a scripted mock server.

mod common;

use std::time::Duration;

use common::{spawn_mock_tracker, tracker_page};
use rootcause::corpus::tracker::{fetch_raw_records, FieldMapping, TrackerConfig, TrackerError};
use rootcause::corpus::{corpus_from_raw_records, Source};

fn fast_config(page_size: usize) -> TrackerConfig {
    TrackerConfig {
        page_size,
        max_retries: 3,
        retry_base: Duration::from_millis(1),
        bearer_token: None,
        timeout: Duration::from_secs(5),
    }
}

#[test]
fn two_pages_of_fifty_yield_one_hundred_records() {
    let server = spawn_mock_tracker(|_, info| {
        let offset: usize = info.query["offset"].parse().unwrap();
        match offset {
            0 => (200, tracker_page(0, 50)),
            50 => (200, tracker_page(50, 50)),
            _ => (200, r#"{"records":[]}"#.to_string()),
        }
    });
    let records = fetch_raw_records(&server.url, "type=bug", &fast_config(50)).unwrap();
    assert_eq!(records.len(), 100);
    assert_eq!(records[0]["key"], "BUG-0");
    assert_eq!(records[99]["key"], "BUG-99");
}

#[test]
fn empty_result_is_an_empty_stream() {
    let server = spawn_mock_tracker(|_, _| (200, r#"{"records":[]}"#.to_string()));
    let records = fetch_raw_records(&server.url, "none", &fast_config(20)).unwrap();
    assert!(records.is_empty());
    assert_eq!(server.hits.load(std::sync::atomic::Ordering::SeqCst), 1);
}

#[test]
fn two_503s_then_200_succeeds_after_retries() {
    let server = spawn_mock_tracker(|hit, _| {
        if hit < 2 {
            (503, String::new())
        } else {
            (200, tracker_page(0, 3))
        }
    });
    let records = fetch_raw_records(&server.url, "q", &fast_config(10)).unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(server.hits.load(std::sync::atomic::Ordering::SeqCst), 3);
}

#[test]
fn persistent_503_exhausts_retries() {
    let server = spawn_mock_tracker(|_, _| (503, String::new()));
    let err = fetch_raw_records(&server.url, "q", &fast_config(10)).unwrap_err();
    assert!(matches!(err, TrackerError::Network { attempts: 4, .. }));
}

#[test]
fn client_errors_are_not_retried() {
    let server = spawn_mock_tracker(|_, _| (404, String::new()));
    let err = fetch_raw_records(&server.url, "q", &fast_config(10)).unwrap_err();
    assert!(matches!(err, TrackerError::Http { status: 404 }));
    assert_eq!(server.hits.load(std::sync::atomic::Ordering::SeqCst), 1);
}

#[test]
fn malformed_body_is_a_schema_mismatch() {
    let server = spawn_mock_tracker(|_, _| (200, r#"{"items": []}"#.to_string()));
    let err = fetch_raw_records(&server.url, "q", &fast_config(10)).unwrap_err();
    assert!(matches!(err, TrackerError::SchemaMismatch(_)));
}

#[test]
fn bearer_token_is_sent_as_authorization_header() {
    let server = spawn_mock_tracker(|_, info| {
        let authorized = info
            .headers
            .iter()
            .any(|(name, value)| name == "authorization" && value == "Bearer sesame");
        if authorized {
            (200, r#"{"records":[]}"#.to_string())
        } else {
            (404, String::new())
        }
    });
    let mut config = fast_config(10);
    config.bearer_token = Some("sesame".to_string());
    assert!(fetch_raw_records(&server.url, "q", &config).is_ok());
}

#[test]
fn fetched_records_validate_like_file_rows() {
    let server = spawn_mock_tracker(|_, _| (200, tracker_page(0, 4)));
    let records = fetch_raw_records(&server.url, "q", &fast_config(10)).unwrap();
    let mapping = FieldMapping::parse(
        "id = key\nsummary = fields.description\nevents.reported = created\nproject = \"demo\"\n",
    )
    .unwrap();
    let outcome = corpus_from_raw_records(
        records,
        &mapping,
        Source::Tracker {
            endpoint: server.url.clone(),
            query: "q".to_string(),
        },
    );
    assert_eq!(outcome.corpus.len(), 4);
    assert!(outcome.rejected.is_empty());
    let report = &outcome.corpus.reports()[0];
    assert_eq!(report.id, "BUG-0");
    assert_eq!(report.project, "demo");
    assert_eq!(report.events.len(), 1);
}
