//! Static detection of quality issues in EvoSuite-generated JUnit suites.
//!
//! [`pipeline::run_analysis`] walks a corpus, pairs each `*_ESTest.java` with
//! the source of its class under test, and runs the detectors in [`detect`].
//! Without that source the detectors fall back to naming conventions.
//! [`report`] turns findings into per-kind frequencies and a co-occurrence
//! matrix.

pub mod error;
pub mod java;
pub mod source;
pub mod cut;
pub mod config;
pub mod detect;
pub mod report;
pub mod corpus;
pub mod pipeline;
