//! Verification report rows and their JSON form.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const REPORT_SCHEMA: u32 = 1;

/// How a row compares its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|lhs − rhs| ≤ tol·|rhs|` (or `|lhs| ≤ tol` when `rhs = 0`).
    EqRel,
    /// `|lhs − rhs| ≤ tol`.
    EqAbs,
    /// `lhs ≤ rhs + tol·|rhs|`.
    AtMost,
    /// `lhs ≤ rhs + tol`.
    AtMostAbs,
    /// `lhs ≥ rhs − tol·|rhs|`.
    AtLeast,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        if !(lhs.is_finite() && rhs.is_finite()) {
            return false;
        }
        match self {
            Relation::EqRel => {
                if rhs == 0.0 {
                    lhs.abs() <= tol
                } else {
                    (lhs - rhs).abs() <= tol * rhs.abs()
                }
            }
            Relation::EqAbs => (lhs - rhs).abs() <= tol,
            Relation::AtMost => lhs <= rhs + tol * rhs.abs(),
            Relation::AtMostAbs => lhs <= rhs + tol,
            Relation::AtLeast => lhs >= rhs - tol * rhs.abs(),
        }
    }
}

/// One checked statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    /// Name of the statement being checked.
    #[serde(rename = "paper_ref")]
    pub statement: String,
    pub curve: String,
    /// Which instance of the statement (function, point, parameter).
    pub case: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl ReportRow {
    pub fn new(id: &str, statement: &str, curve: &str, case: &str, relation: Relation, lhs: f64, rhs: f64, tol: f64) -> Self {
        ReportRow {
            id: id.to_string(),
            statement: statement.to_string(),
            curve: curve.to_string(),
            case: case.to_string(),
            relation,
            lhs,
            rhs,
            tol,
            pass: relation.holds(lhs, rhs, tol),
            seconds: None,
            note: None,
        }
    }

    /// Complex equality `|lhs − rhs| ≤ tol`; the row shows real parts and
    /// records the full values in the note.
    pub fn eq_complex(id: &str, statement: &str, curve: &str, case: &str, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let mut row = Self::new(id, statement, curve, case, Relation::EqAbs, lhs.re, rhs.re, tol);
        let ok = (lhs - rhs).norm() <= tol && lhs.re.is_finite() && lhs.im.is_finite();
        row.pass = ok;
        row.note = Some(format!("lhs = {lhs}, rhs = {rhs}, |lhs - rhs| = {:.3e}", (lhs - rhs).norm()));
        row
    }

    /// A row recording that a computation failed.
    pub fn failed(id: &str, statement: &str, curve: &str, case: &str, relation: Relation, tol: f64, err: &crate::Error) -> Self {
        let mut row = Self::new(id, statement, curve, case, relation, f64::NAN, f64::NAN, tol);
        row.pass = false;
        row.note = Some(err.to_string());
        row
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Runs `check`, turning an error into a failed row, and records the time.
pub(crate) fn timed_row<F>(id: &str, statement: &str, curve: &str, case: &str, relation: Relation, tol: f64, check: F) -> ReportRow
where
    F: FnOnce() -> Result<ReportRow>,
{
    let start = Instant::now();
    let mut row = check().unwrap_or_else(|e| ReportRow::failed(id, statement, curve, case, relation, tol, &e));
    row.seconds = Some(start.elapsed().as_secs_f64());
    row
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub pass: bool,
    pub rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub fn new(rows: Vec<ReportRow>) -> Self {
        VerificationReport {
            schema: REPORT_SCHEMA,
            pass: rows.iter().all(|r| r.pass),
            rows,
        }
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Drops wall-clock timings so that the JSON depends only on the inputs.
    pub fn without_timings(mut self) -> Self {
        for r in &mut self.rows {
            r.seconds = None;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
