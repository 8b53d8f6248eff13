//! Check reports shared by every verification entry point.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// `reported` marks informational comparisons that never fail a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Reported,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub claim: String,
    /// Stable key naming the claim being checked.
    pub paper_ref: String,
    pub status: Status,
    pub witnesses: Vec<Value>,
}

impl Check {
    pub fn new(claim: impl Into<String>, key: impl Into<String>, status: Status, witnesses: Vec<Value>) -> Check {
        Check {
            claim: claim.into(),
            paper_ref: key.into(),
            status,
            witnesses,
        }
    }

    pub fn pass_if(claim: impl Into<String>, key: impl Into<String>, ok: bool, witnesses: Vec<Value>) -> Check {
        Check::new(claim, key, Status::from_bool(ok), witnesses)
    }
}

/// Whether any check in `checks` failed.
pub fn any_failed(checks: &[Check]) -> bool {
    checks.iter().any(|c| c.status == Status::Fail)
}
