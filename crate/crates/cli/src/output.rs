//! Report rows and their CSV and JSON encodings.

use std::io::Write;
use std::path::Path;

use kg_core::arith::Rational;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub d: u64,
    pub a: i64,
    pub b: u64,
    pub error: Rational,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureRow {
    pub d: i64,
    pub delta: Rational,
    pub variant: String,
    pub closed_form: Rational,
    pub oracle: Rational,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiaRow {
    #[serde(rename = "Q")]
    pub q: u64,
    pub s1: Rational,
    pub s2: Rational,
    pub ratio: Rational,
    pub ratio_approx: String,
    pub disjointness_violations: u64,
    pub step2_lhs: Rational,
    pub step2_rhs: Rational,
    pub step3_lhs: Rational,
    pub step3_rhs: Rational,
    pub degenerate: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Hypotheses not met; nothing is claimed.
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessRow {
    pub d: i64,
    pub e: i64,
    pub q: u64,
    pub r: u64,
    pub y: Rational,
    pub measure: Rational,
    pub violations: String,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GallagherRow {
    pub a: Rational,
    pub b: Rational,
    pub m: usize,
    pub sum: Rational,
    pub rhs: Rational,
    pub constant: Rational,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyRow {
    #[serde(rename = "Q0")]
    pub q0: u64,
    #[serde(rename = "Q1")]
    pub q1: u64,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub tail_bound: Rational,
    pub floor: Option<Rational>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Results of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "rows", rename_all = "kebab-case")]
pub enum Results {
    DirichletPairs(Vec<PairRow>),
    Measure(Vec<MeasureRow>),
    Qia(Vec<QiaRow>),
    Disjointness(Vec<DisjointnessRow>),
    Gallagher(Vec<GallagherRow>),
    Dichotomy(Vec<DichotomyRow>),
    VerifySuite(Vec<CriterionRow>),
}

impl Results {
    pub fn to_csv(&self) -> Result<String, CliError> {
        match self {
            Results::DirichletPairs(r) => csv_rows(r),
            Results::Measure(r) => csv_rows(r),
            Results::Qia(r) => csv_rows(r),
            Results::Disjointness(r) => csv_rows(r),
            Results::Gallagher(r) => csv_rows(r),
            Results::Dichotomy(r) => csv_rows(r),
            Results::VerifySuite(r) => csv_rows(r),
        }
    }
}

/// The JSON summary: the effective config and the results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub results: Results,
}

impl Summary {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::io(e.to_string()))
}

/// Renders the report in the configured format.
pub fn render(summary: &Summary) -> Result<String, CliError> {
    match summary.config.format {
        Format::Csv => summary.results.to_csv(),
        Format::Json => summary.to_json(),
    }
}

/// Writes `text` to `path`, or to stdout when there is none.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    }
}
