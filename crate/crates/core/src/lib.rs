//! Root-cause analysis of software bug reports.
//!
//! This crate ingests issue-tracker exports, classifies each report into one
//! of nine root-cause categories with a TF-IDF + multinomial logistic
//! regression pipeline, and characterizes the categories by frequency,
//! dominant topics (LDA with a genetic search over the topic count), and
//! time-to-fix delay statistics.
//!
//! The `rootcause` binary exposes every stage as a subcommand; see the crate
//! README for the file formats and the CLI reference.

pub mod balance;
pub mod corpus;
pub mod evaluate;
pub mod model;
pub mod pipeline;
pub mod seeds;
pub mod textprep;
pub mod timefix;
pub mod topics;
pub mod vectorize;

pub use corpus::{BugReport, Corpus, RootCause};
