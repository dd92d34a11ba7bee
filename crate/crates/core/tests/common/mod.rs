//! Shared fixtures: a scripted mock tracker server and synthetic corpora
//! with planted, separable category vocabularies.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rootcause::corpus::{BugReport, Corpus, Resolution, RootCause, Source};

/// One parsed mock-server request.
pub struct RequestInfo {
    pub path: String,
    pub query: BTreeMap<String, String>,
    pub headers: Vec<(String, String)>,
}

pub struct MockTracker {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
}

/// Starts a scripted HTTP server on a random local port. The handler gets
/// the zero-based hit number and the parsed request and returns
/// `(status, body)`. The serving thread lives for the rest of the test
/// process.
pub fn spawn_mock_tracker<F>(handler: F) -> MockTracker
where
    F: Fn(usize, &RequestInfo) -> (u16, String) + Send + 'static,
{
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind mock tracker");
    let addr = listener.local_addr().unwrap();
    let hits = Arc::new(AtomicUsize::new(0));
    let hits_for_thread = hits.clone();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().expect("clone stream"));
            let mut request_line = String::new();
            if reader.read_line(&mut request_line).is_err() || request_line.is_empty() {
                continue;
            }
            let target = request_line.split_whitespace().nth(1).unwrap_or("/");
            let (path, raw_query) = match target.split_once('?') {
                Some((p, q)) => (p.to_string(), q.to_string()),
                None => (target.to_string(), String::new()),
            };
            let mut query = BTreeMap::new();
            for pair in raw_query.split('&').filter(|p| !p.is_empty()) {
                let (k, v) = pair.split_once('=').unwrap_or((pair, ""));
                query.insert(k.to_string(), v.to_string());
            }
            let mut headers = Vec::new();
            loop {
                let mut line = String::new();
                if reader.read_line(&mut line).is_err() {
                    break;
                }
                let line = line.trim_end().to_string();
                if line.is_empty() {
                    break;
                }
                if let Some((name, value)) = line.split_once(':') {
                    headers.push((name.trim().to_lowercase(), value.trim().to_string()));
                }
            }
            let info = RequestInfo {
                path,
                query,
                headers,
            };
            let hit = hits_for_thread.fetch_add(1, Ordering::SeqCst);
            let (status, body) = handler(hit, &info);
            let reason = match status {
                200 => "OK",
                404 => "Not Found",
                429 => "Too Many Requests",
                503 => "Service Unavailable",
                _ => "Status",
            };
            let response = format!(
                "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    MockTracker {
        url: format!("http://{addr}/records"),
        hits,
    }
}

/// JSON for `count` raw tracker records starting at `start`.
pub fn tracker_page(start: usize, count: usize) -> String {
    let records: Vec<String> = (start..start + count)
        .map(|i| {
            format!(
                r#"{{"key":"BUG-{i}","fields":{{"description":"record number {i}"}},"created":"2020-01-01T00:00:00Z"}}"#
            )
        })
        .collect();
    format!(r#"{{"records":[{}]}}"#, records.join(","))
}

const CLASS_BASES: [&str; 9] = [
    "zorb", "quim", "flax", "drup", "melk", "vint", "gosp", "tarn", "luft",
];
const NOISE_BASES: [&str; 3] = ["plon", "snib", "crov"];
const WORD_TAILS: [&str; 10] = [
    "ak", "ek", "ik", "ok", "uk", "arn", "ern", "irn", "orn", "urn",
];

/// Ten planted words unique to one category; stable under stemming.
pub fn class_vocabulary(class: RootCause) -> Vec<String> {
    WORD_TAILS
        .iter()
        .map(|tail| format!("{}{tail}", CLASS_BASES[class.index()]))
        .collect()
}

/// Thirty noise words shared across every category.
pub fn noise_vocabulary() -> Vec<String> {
    NOISE_BASES
        .iter()
        .flat_map(|base| WORD_TAILS.iter().map(move |tail| format!("{base}{tail}")))
        .collect()
}

/// A corpus with disjoint ten-word category vocabularies plus shared noise:
/// each summary draws 10 category words and 3 noise words.
pub fn separable_corpus(per_class: &[usize; 9], seed: u64) -> Corpus {
    let noise = noise_vocabulary();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for class in RootCause::ALL {
        let vocab = class_vocabulary(class);
        for i in 0..per_class[class.index()] {
            let mut words = Vec::with_capacity(13);
            for _ in 0..10 {
                words.push(vocab[rng.gen_range(0..vocab.len())].clone());
            }
            for _ in 0..3 {
                words.push(noise[rng.gen_range(0..noise.len())].clone());
            }
            reports.push(BugReport {
                id: format!("{}-{i}", class.as_str()),
                ecosystem: "synthetic".to_string(),
                project: "fixture".to_string(),
                title: String::new(),
                summary: words.join(" "),
                label: Some(class),
                events: vec![],
                resolution: Resolution::Unknown,
            });
        }
    }
    Corpus::from_reports(reports, Source::Memory).unwrap()
}
