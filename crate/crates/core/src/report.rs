//! Verification reports and their JSON/CSV serialization.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`) so that output
//! is byte-identical across runs; non-finite values are written as `null`
//! in JSON and as `nan`/`inf`/`-inf` in CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Slack absorbed on bound-tight checks.
pub const PASS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The finite truncation could not certify the hypothesis of the check.
    Inconclusive,
}

/// Which side of the bound the measured quantity must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `measured <= bound`
    AtMost,
    /// `measured >= bound`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma_id: String,
    pub params: BTreeMap<String, f64>,
    pub measured: f64,
    pub bound: f64,
    /// Slack in the direction of the check; nonnegative means satisfied.
    pub margin: f64,
    pub pass: bool,
    pub status: Status,
    pub direction: Direction,
    /// Secondary measured quantities behind the verdict.
    pub details: BTreeMap<String, f64>,
    pub notes: String,
}

impl VerificationReport {
    fn build(lemma_id: &str, params: BTreeMap<String, f64>, measured: f64, bound: f64, direction: Direction) -> Self {
        let margin = match direction {
            Direction::AtMost => bound - measured,
            Direction::AtLeast => measured - bound,
        };
        let pass = margin >= -PASS_SLACK;
        Self {
            lemma_id: lemma_id.to_owned(),
            params,
            measured,
            bound,
            margin,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            direction,
            details: BTreeMap::new(),
            notes: String::new(),
        }
    }

    /// Passes iff `measured <= bound + PASS_SLACK`.
    pub fn at_most(lemma_id: &str, params: BTreeMap<String, f64>, measured: f64, bound: f64) -> Self {
        Self::build(lemma_id, params, measured, bound, Direction::AtMost)
    }

    /// Passes iff `measured >= bound - PASS_SLACK`.
    pub fn at_least(lemma_id: &str, params: BTreeMap<String, f64>, measured: f64, bound: f64) -> Self {
        Self::build(lemma_id, params, measured, bound, Direction::AtLeast)
    }

    /// A check whose hypothesis the truncation could not certify. Counts as
    /// a pass with a warning.
    pub fn inconclusive(lemma_id: &str, params: BTreeMap<String, f64>, notes: impl Into<String>) -> Self {
        Self {
            lemma_id: lemma_id.to_owned(),
            params,
            measured: f64::NAN,
            bound: f64::NAN,
            margin: f64::NAN,
            pass: true,
            status: Status::Inconclusive,
            direction: Direction::AtMost,
            details: BTreeMap::new(),
            notes: notes.into(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_owned(), value);
        self
    }

    pub fn with_note(mut self, note: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
        self
    }

    /// Forces failure (used when a sub-check other than the headline one fails).
    pub fn fail_with(mut self, note: impl AsRef<str>) -> Self {
        self.pass = false;
        self.status = Status::Fail;
        self.with_note(note)
    }

    pub fn is_inconclusive(&self) -> bool {
        self.status == Status::Inconclusive
    }
}

/// Builds a params map from `(name, value)` pairs.
pub fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_owned(), v)).collect()
}

/// Collapses a family of reports into one: the first failure if any,
/// otherwise the conclusive report with the smallest margin relative to
/// `max(1, |bound|)`, otherwise the first report. `trials` is recorded in
/// the params.
pub fn worst_report(reports: Vec<VerificationReport>) -> Option<VerificationReport> {
    let trials = reports.len();
    let rel = |r: &VerificationReport| r.margin / r.bound.abs().max(1.0);
    let pick = reports
        .iter()
        .position(|r| !r.pass)
        .or_else(|| {
            reports
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.is_inconclusive())
                .min_by(|(_, a), (_, b)| rel(a).total_cmp(&rel(b)))
                .map(|(i, _)| i)
        })
        .or(if trials > 0 { Some(0) } else { None })?;
    let mut r = reports.into_iter().nth(pick)?;
    r.params.insert("trials".into(), trials as f64);
    Some(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("refusing to write an empty report set")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv encoding failed: {0}")]
    Csv(#[from] csv::Error),
}

/// 17 significant digits.
pub fn fmt_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() { fmt_number(x) } else { "null".into() }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

fn json_map(m: &BTreeMap<String, f64>) -> String {
    let body: Vec<String> = m.iter().map(|(k, v)| format!("{}: {}", json_string(k), json_number(*v))).collect();
    format!("{{{}}}", body.join(", "))
}

fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("unit enum serializes to a string"),
    }
}

/// JSON array of reports with a fixed field order.
pub fn to_json(reports: &[VerificationReport]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        let _ = write!(
            out,
            "  {{\"lemma_id\": {}, \"params\": {}, \"measured\": {}, \"bound\": {}, \"margin\": {}, \"pass\": {}, \"status\": {}, \"direction\": {}, \"details\": {}, \"notes\": {}}}",
            json_string(&r.lemma_id),
            json_map(&r.params),
            json_number(r.measured),
            json_number(r.bound),
            json_number(r.margin),
            r.pass,
            json_string(&enum_name(&r.status)),
            json_string(&enum_name(&r.direction)),
            json_map(&r.details),
            json_string(&r.notes),
        );
        out.push_str(if i + 1 < reports.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}

fn flatten(m: &BTreeMap<String, f64>) -> String {
    m.iter().map(|(k, v)| format!("{k}={}", fmt_number(*v))).collect::<Vec<_>>().join(";")
}

pub const CSV_HEADER: [&str; 10] = ["lemma_id", "params", "measured", "bound", "margin", "pass", "status", "direction", "details", "notes"];

pub fn to_csv(reports: &[VerificationReport]) -> Result<String, EmitError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.lemma_id.clone(),
            flatten(&r.params),
            fmt_number(r.measured),
            fmt_number(r.bound),
            fmt_number(r.margin),
            r.pass.to_string(),
            enum_name(&r.status),
            enum_name(&r.direction),
            flatten(&r.details),
            r.notes.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| EmitError::Io { path: PathBuf::from("<memory>"), source: e.into_error() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(reports: &[VerificationReport], format: Format) -> Result<String, EmitError> {
    if reports.is_empty() {
        return Err(EmitError::Empty);
    }
    match format {
        Format::Json => Ok(to_json(reports)),
        Format::Csv => to_csv(reports),
    }
}

/// Writes the reports to `path`. Nothing is written for an empty set.
pub fn emit_report(reports: &[VerificationReport], format: Format, path: &Path) -> Result<(), EmitError> {
    let text = render(reports, format)?;
    fs::write(path, text).map_err(|source| EmitError::Io { path: path.to_owned(), source })
}
