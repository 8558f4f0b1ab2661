//! Verification reports.

use std::fmt;

use serde::Serialize;
use serde_json::Value;

use ctasep::count::{Comparison, Mismatch};

/// How a failed check is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    /// A proved statement; a mismatch is a bug and fails the run.
    Theorem,
    /// A conjecture or an observation; a mismatch is a finding.
    Conjecture,
    /// Outside any stated range; reported only.
    Exploratory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ProvedMatch,
    ConjectureMatch,
    Mismatch,
    Skipped,
}

/// Largest number of witnesses kept per report.
/// The serialized kebab-case name.
fn kebab(v: impl Serialize) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => unreachable!("unit variants serialize as strings"),
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&kebab(self))
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&kebab(self))
    }
}

pub const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub criterion: u8,
    pub params: Value,
    pub kind: Severity,
    pub status: Status,
    pub checked: u64,
    /// Mismatches, smallest witness first.
    pub witnesses: Vec<Mismatch>,
    pub mismatch_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn from_comparison(
        id: &str,
        criterion: u8,
        kind: Severity,
        params: Value,
        mut cmp: Comparison,
        note: Option<String>,
        runtime_ms: u64,
    ) -> Self {
        let status = if !cmp.mismatches.is_empty() || cmp.checked == 0 {
            Status::Mismatch
        } else if kind == Severity::Theorem {
            Status::ProvedMatch
        } else {
            Status::ConjectureMatch
        };
        if cmp.checked == 0 && cmp.mismatches.is_empty() {
            cmp.mismatches.push(Mismatch {
                witness: "nothing was checked".into(),
                expected: "at least one case".into(),
                got: "0".into(),
            });
        }
        cmp.mismatches
            .sort_by_key(|m| (m.witness.len(), m.witness.clone()));
        let mismatch_count = cmp.mismatches.len();
        cmp.mismatches.truncate(MAX_WITNESSES);
        Self {
            id: id.to_string(),
            criterion,
            params,
            kind,
            status,
            checked: cmp.checked,
            witnesses: cmp.mismatches,
            mismatch_count,
            note,
            runtime_ms,
        }
    }

    pub fn skipped(id: &str, criterion: u8, kind: Severity, params: Value, note: String) -> Self {
        Self {
            id: id.to_string(),
            criterion,
            params,
            kind,
            status: Status::Skipped,
            checked: 0,
            witnesses: Vec::new(),
            mismatch_count: 0,
            note: Some(note),
            runtime_ms: 0,
        }
    }

    pub fn is_mismatch(&self) -> bool {
        self.status == Status::Mismatch
    }

    /// A theorem-severity mismatch, which makes the run fail.
    pub fn is_failure(&self) -> bool {
        self.is_mismatch() && self.kind == Severity::Theorem
    }
}
