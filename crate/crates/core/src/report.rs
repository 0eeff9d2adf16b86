//! Named pass/fail/n-a entries produced by the verification routines.

use crate::tolerance::rel_deviation;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub witness: Option<String>,
    pub deviation: Option<f64>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            witness: None,
            deviation: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
            deviation: None,
        }
    }

    /// Not applicable; `reason` goes in the witness slot.
    pub fn not_applicable(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::NotApplicable,
            witness: Some(reason.into()),
            deviation: None,
        }
    }

    /// Pass iff the relative deviation of `lhs` from `rhs` is at most `tol`.
    pub fn compare(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64, witness: impl Into<String>) -> Self {
        Self::from_deviation(name, rel_deviation(lhs, rhs), tol, witness)
    }

    /// Pass iff `deviation ≤ tol`; the witness is kept only on failure.
    pub fn from_deviation(name: impl Into<String>, deviation: f64, tol: f64, witness: impl Into<String>) -> Self {
        let mut c = if deviation <= tol {
            Check::pass(name)
        } else {
            Check::fail(name, witness)
        };
        c.deviation = Some(deviation);
        c
    }

    pub fn with_deviation(mut self, deviation: f64) -> Self {
        self.deviation = Some(deviation);
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }
}

/// True iff no entry failed; n/a entries never count.
pub fn all_pass(checks: &[Check]) -> bool {
    !checks.iter().any(Check::is_fail)
}

/// Sort by name, the canonical report order.
pub fn sort_checks(checks: &mut [Check]) {
    checks.sort_by(|a, b| a.name.cmp(&b.name));
}

/// Largest finite deviation among the entries, if any carries one.
pub fn max_deviation(checks: &[Check]) -> Option<f64> {
    checks.iter().filter_map(|c| c.deviation).reduce(f64::max)
}
