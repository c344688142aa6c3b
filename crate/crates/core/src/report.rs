//! Per-identity verification records.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::padic::{format_rational, ExactRational, PadicNumber};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisViolation,
    Budget,
    /// Recorded for the reader, never counted as a failure.
    Informational,
}

impl Status {
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Budget)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::HypothesisViolation => "HYPOTHESIS-VIOLATION",
            Status::Budget => "BUDGET",
            Status::Informational => "INFO",
        })
    }
}

/// Outcome of checking one identity at one grid point.
///
/// Precisions and the agreement depth are absolute p-adic digit counts;
/// `None` stands for "exact" (exact rationals, or both sides the exact zero).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub params: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
    pub lhs_precision: Option<i64>,
    pub rhs_precision: Option<i64>,
    pub agreement_depth: Option<i64>,
    pub required_depth: Option<i64>,
    pub slack: i64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Digits by which the depth falls short of what the identity claims;
    /// zero when it reaches it. Used to measure oracle slack.
    pub fn shortfall(&self) -> i64 {
        let guaranteed = match (self.lhs_precision, self.rhs_precision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let want = match (guaranteed, self.required_depth) {
            (Some(g), Some(r)) => Some(g.max(r)),
            (g, None) => g,
            (None, r) => r,
        };
        match (want, self.agreement_depth) {
            (Some(w), Some(d)) => (w - d).max(0),
            _ => 0,
        }
    }

    pub fn render_line(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let show = |d: Option<i64>| d.map_or("exact".to_string(), |d| d.to_string());
        let mut line = format!(
            "{} {} [{}] depth={} lhs_prec={} rhs_prec={}",
            self.status,
            self.identity,
            params,
            show(self.agreement_depth),
            show(self.lhs_precision),
            show(self.rhs_precision),
        );
        if let Some(note) = &self.note {
            line.push_str(" # ");
            line.push_str(note);
        }
        line
    }
}

/// Builder for reports.
#[derive(Clone, Debug)]
pub struct Check {
    identity: String,
    params: BTreeMap<String, String>,
    note: Option<String>,
    informational: bool,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Check {
    pub fn new(identity: &str) -> Self {
        Check {
            identity: identity.to_string(),
            params: BTreeMap::new(),
            note: None,
            informational: false,
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn rational_param(self, key: &str, value: &ExactRational) -> Self {
        self.param(key, format_rational(value))
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Marks the record as reported-only.
    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    fn finish(
        self,
        lhs: String,
        rhs: String,
        lhs_precision: Option<i64>,
        rhs_precision: Option<i64>,
        agreement_depth: Option<i64>,
        required_depth: Option<i64>,
        slack: i64,
        status: Status,
    ) -> VerificationReport {
        VerificationReport {
            identity: self.identity,
            params: self.params,
            lhs,
            rhs,
            lhs_precision,
            rhs_precision,
            agreement_depth,
            required_depth,
            slack,
            status: if self.informational { Status::Informational } else { status },
            note: self.note,
        }
    }

    /// Compares two p-adic values. `lhs_cap`/`rhs_cap` bound what a side can
    /// claim beyond its arithmetic precision (the truncation depth of an
    /// oracle, for instance). Passes when the depth reaches both the smaller
    /// guaranteed precision minus `slack` and `required` (if given).
    pub fn compare(
        self,
        lhs: &PadicNumber,
        rhs: &PadicNumber,
        lhs_cap: Option<i64>,
        rhs_cap: Option<i64>,
        required: Option<i64>,
        slack: i64,
    ) -> VerificationReport {
        let lp = min_opt(lhs.absprec(), lhs_cap);
        let rp = min_opt(rhs.absprec(), rhs_cap);
        let guaranteed = min_opt(lp, rp);
        let depth = min_opt(lhs.agreement_depth(rhs), guaranteed);
        let reaches = |target: Option<i64>| match (depth, target) {
            (None, _) | (_, None) => true,
            (Some(d), Some(t)) => d >= t,
        };
        let ok = reaches(guaranteed.map(|g| g - slack)) && reaches(required);
        let status = if ok { Status::Pass } else { Status::Fail };
        self.finish(
            lhs.render_text(),
            rhs.render_text(),
            lp,
            rp,
            depth,
            required,
            slack,
            status,
        )
    }

    /// Exact rational comparison with zero tolerance.
    pub fn compare_exact(self, lhs: &ExactRational, rhs: &ExactRational) -> VerificationReport {
        let equal = lhs == rhs;
        let (depth, status) = if equal { (None, Status::Pass) } else { (Some(0), Status::Fail) };
        self.finish(
            format_rational(lhs),
            format_rational(rhs),
            None,
            None,
            depth,
            None,
            0,
            status,
        )
    }

    /// Records an evaluation error: budget errors become `Budget`, domain
    /// errors `HypothesisViolation`.
    pub fn error(self, err: &Error) -> VerificationReport {
        let status = match err {
            Error::BudgetExhausted { .. } | Error::TruncationCapExceeded { .. } => Status::Budget,
            _ => Status::HypothesisViolation,
        };
        let mut check = self;
        check.note = Some(match check.note.take() {
            Some(n) => format!("{n}; {}: {err}", err.kind()),
            None => format!("{}: {err}", err.kind()),
        });
        check.informational = false;
        check.finish(String::new(), String::new(), None, None, None, None, 0, status)
    }
}

/// Runs `f` and turns an error into a report through [`Check::error`].
pub fn checked(
    check: Check,
    f: impl FnOnce(Check) -> crate::Result<VerificationReport>,
) -> VerificationReport {
    let fallback = check.clone();
    match f(check) {
        Ok(r) => r,
        Err(e) => fallback.error(&e),
    }
}
