//! The JSON certificate written by `certify`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exactrank::RankCertificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    /// Forced by the mathematics; failure fails the run.
    Hard,
    /// A reference number that may depend on construction conventions.
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub severity: Severity,
    pub status: Status,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn hard(name: &str, ok: bool, expected: impl ToString, actual: impl ToString) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Self { name: name.into(), severity: Severity::Hard, status, expected: expected.to_string(), actual: actual.to_string() }
    }

    /// Passes on an exact match of the rendered values, warns otherwise.
    pub fn soft(name: &str, expected: impl ToString, actual: impl ToString) -> Self {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let status = if expected == actual { Status::Pass } else { Status::Warn };
        Self { name: name.into(), severity: Severity::Soft, status, expected, actual }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameters {
    pub levels: u32,
    pub sub_level: u32,
    pub nu: String,
    /// `(e, s, x1, x2, x3)` as exact rationals.
    pub point: Vec<String>,
    pub primes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSummary {
    pub trajectory_holds: bool,
    pub crosscheck_matched: usize,
    /// Identifiers of the documented misprints that were observed.
    pub documented_deviations: Vec<String>,
    pub undocumented_deviations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSummary {
    pub rows: usize,
    pub cols: usize,
    /// `(rows, cols)` of the first-equation / `z1` block.
    pub a1: [usize; 2],
    /// Entries that are nonzero as polynomials (`Θ`).
    pub nnz_symbolic: usize,
    /// Entries that are nonzero at the point (`Θ⁰`).
    pub nnz_evaluated: usize,
    pub avg_nnz_per_row: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullColumnSummary {
    pub count: usize,
    pub all_symbolically_null: bool,
    pub symbolic_survivors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SprankSummary {
    /// Shape of the matrix with null columns removed.
    pub rows: usize,
    pub cols: usize,
    pub sprank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReorderSummary {
    pub selected: [usize; 2],
    /// Sizes of the under-, well- and overdetermined matched parts.
    pub coarse_parts: [usize; 3],
    pub overdetermined_unmatched_rows: usize,
    pub square_block: [usize; 2],
    pub square_block_sprank: usize,
    pub block_count: usize,
    pub largest_block: usize,
    pub last_block: [usize; 2],
    pub zero_block: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub all_in_p: bool,
    /// 1-based positions of `∂1z1, ∂2z1, ∂3z1, ∂1z2, ∂2z2, ∂3z2` among P's
    /// columns.
    pub positions: Vec<Option<usize>>,
    pub z1_columns_in_p: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobustnessSummary {
    /// `Θ∖Θ⁰`, entries lost by evaluation.
    pub lost_entries: usize,
    /// Symbolic entries inside the zero block (first few listed).
    pub violations: usize,
    pub first_violations: Vec<[usize; 2]>,
}

/// Which derivative of which equation makes up each row of P, and which
/// derivative of which unknown each column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StencilManifest {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// Largest differentiation order applied to a pressure-free equation.
    pub max_row_level: u32,
    /// Order of the resulting operator on the original adjoint equations:
    /// the first two pressure-free equations already carry one derivative.
    pub operator_order: u32,
    /// Row count per `(equation, level)`, keyed `eq<k>/<level>`.
    pub levels: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub tool: String,
    pub parameters: Parameters,
    pub system: Option<SystemSummary>,
    pub matrix: Option<MatrixSummary>,
    pub null_columns: Option<NullColumnSummary>,
    pub sprank: Option<SprankSummary>,
    pub reordering: Option<ReorderSummary>,
    /// Rank of the square overdetermined block; informational.
    pub square_block_rank: Option<RankCertificate>,
    pub p_rank: Option<RankCertificate>,
    pub targets: Option<TargetSummary>,
    pub robustness: Option<RobustnessSummary>,
    pub manifest: Option<StencilManifest>,
    pub checks: Vec<Check>,
    pub errors: Vec<StageError>,
    /// SHA-256 of serialized matrices, keyed by artifact name.
    pub hashes: BTreeMap<String, String>,
    pub passed: bool,
}

impl Certificate {
    pub fn new(tool: String, parameters: Parameters) -> Self {
        Self {
            tool,
            parameters,
            system: None,
            matrix: None,
            null_columns: None,
            sprank: None,
            reordering: None,
            square_block_rank: None,
            p_rank: None,
            targets: None,
            robustness: None,
            manifest: None,
            checks: Vec::new(),
            errors: Vec::new(),
            hashes: BTreeMap::new(),
            passed: false,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn hard_failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.severity == Severity::Hard && c.status != Status::Pass)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Warn)
    }

    /// Recomputes `passed`: every hard check passes and there is at least one.
    pub fn settle(&mut self) {
        self.passed = !self.checks.is_empty() && self.hard_failures().next().is_none();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
