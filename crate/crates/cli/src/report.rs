//! Analysis reports.
//!
//! Reports carry no timestamps or host data, so identical inputs and seeds
//! serialize to identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::format::SCHEMA_VERSION;

/// A number together with its accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    /// Absolute accuracy in the value's own units.
    pub tolerance: f64,
    /// False when the value comes from a search that may miss the optimum.
    pub exact: bool,
}

impl Measured {
    pub fn exact(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            exact: true,
        }
    }

    pub fn heuristic(value: f64, tolerance: f64) -> Self {
        Self {
            value,
            tolerance,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub kind: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    /// File name to lowercase hex SHA-256 of its bytes.
    pub input_digests: BTreeMap<String, String>,
    pub seeds: BTreeMap<&'static str, u64>,
    pub body: serde_json::Value,
}

impl AnalysisReport {
    pub fn new(command: impl Into<String>, body: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: "report",
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            input_digests: BTreeMap::new(),
            seeds: BTreeMap::new(),
            body,
        }
    }

    pub fn with_input(mut self, name: impl Into<String>, bytes: &[u8]) -> Self {
        self.input_digests.insert(name.into(), sha256_hex(bytes));
        self
    }

    pub fn with_seed(mut self, name: &'static str, seed: u64) -> Self {
        self.seeds.insert(name, seed);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
