//! JSON report schema (versioned, `"schema": 1`).
//!
//! Reports parse back into these structs; re-serializing a parsed report is
//! byte-identical because field order is fixed by the struct layout and
//! floats print in shortest round-trip form.

use loplab::LopReport;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: InputEcho,
    pub methods: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub llsm: Option<LlsmSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub em: Option<EmSection>,
    /// True when every requested method preserves the stated preferences.
    pub lop_satisfied: bool,
    pub timing_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    /// "pattern" or "matrix".
    pub kind: String,
    pub n: usize,
    /// Preference edges (from, to) when the input is ordinal; empty for a
    /// general matrix.
    pub edges: Vec<(usize, usize)>,
    /// Known comparisons.
    pub known_pairs: usize,
    /// Intensity used to realize a pattern, or inferred from an ordinal
    /// matrix; absent for general matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Whether a relabeling sorts all preferences above the diagonal
    /// (absent when the input is not ordinal).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_linear_order: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlsmSection {
    pub weights: Vec<f64>,
    /// Exact rational coefficients of log b (ordinal input only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<String>>,
    pub objective: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lop: Option<LopReport>,
    /// Smallest weight gap over preference edges (ordinal input only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmSection {
    pub weights: Vec<f64>,
    pub lambda_max: f64,
    /// Positions filled by the eigenvalue-minimizing completion.
    pub filled: Vec<(usize, usize, f64)>,
    pub completion_sweeps: usize,
    pub cr: CrReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lop: Option<LopReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrReport {
    /// Consistency ratio of the (completed) matrix.
    pub value: f64,
    /// Monte Carlo mean dominant eigenvalue of random matrices of this size.
    pub random_index: f64,
    pub samples: usize,
    pub seed: u64,
    /// The conventional acceptability reading, reported but never enforced.
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: u32,
    pub n: usize,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_grid: Vec<f64>,
    pub scanned: u64,
    pub connected: u64,
    pub hits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_edge_count: Option<usize>,
    /// Hits up to isomorphic relabeling.
    pub isomorphism_classes: usize,
    pub timing_ms: f64,
}
