//! `hypiso-record v1`: one JSON object per line, the first being the header.
//!
//! Exact values are `"p/q"` strings. Floating-point fields are named `approx`
//! (or carry an `approx_` prefix) and are for display only.

use hypiso_core::combiner::{HypothesisReport, Verification};
use hypiso_core::{Certificate, DeltaEstimate, GroupWord, IsometryClass};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const RECORD_FORMAT: &str = "hypiso-record v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Header {
        format: String,
    },
    Command {
        command: String,
        max_exponent: u32,
        orbit_depth: u32,
        ball_radius: u32,
        seed: u64,
    },
    Classification {
        action: usize,
        action_name: String,
        word: GroupWord,
        /// `|trace|` as `"p/q"`, half-plane actions only.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        abs_trace: Option<String>,
        class: IsometryClass,
    },
    Hypotheses {
        report: HypothesisReport,
    },
    Certificate {
        certificate: Certificate,
    },
    Verification {
        verification: Verification,
    },
    Delta {
        action: usize,
        model: String,
        four_point: DeltaEstimate,
        insize: DeltaEstimate,
    },
    NorthSouth {
        action: usize,
        word: GroupWord,
        threshold: f64,
        sample_size: usize,
        n: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        failure: Option<String>,
    },
    Separation {
        action: usize,
        f: GroupWord,
        g: GroupWord,
        independent: bool,
        n: Option<u32>,
        powers_tested: Vec<u32>,
        passed: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        failure: Option<String>,
    },
    QuasiGeodesic {
        action: usize,
        word: GroupWord,
        periods: u32,
        lambda: Option<f64>,
        epsilon: Option<f64>,
        approx_scale: f64,
        pairs_tested: usize,
    },
    Projection {
        action: usize,
        word: GroupWord,
        points: usize,
        approx_max_defect: f64,
    },
    Error {
        kind: String,
        message: String,
    },
    Exit {
        status: i32,
    },
}

impl Record {
    pub fn header() -> Self {
        Record::Header { format: RECORD_FORMAT.to_string() }
    }
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("missing or unsupported header, expected {RECORD_FORMAT:?}")]
    Header,
}

pub fn write_records(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn read_records(text: &str) -> Result<Vec<Record>, RecordError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let r: Record = serde_json::from_str(line).map_err(|source| RecordError::Json { line: i + 1, source })?;
        out.push(r);
    }
    match out.first() {
        Some(Record::Header { format }) if format == RECORD_FORMAT => Ok(out),
        _ => Err(RecordError::Header),
    }
}

/// The last certificate in a record stream.
pub fn find_certificate(records: &[Record]) -> Option<&Certificate> {
    records.iter().rev().find_map(|r| match r {
        Record::Certificate { certificate } => Some(certificate),
        _ => None,
    })
}
