//! Outcome records produced by every check.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Result of one named check. A failing check carries a witness: the
/// offending inputs and both sides of the violated identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// The identity being verified.
    pub anchor: String,
    pub status: Status,
    pub witness: Option<String>,
    pub detail: String,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, anchor: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Pass,
            witness: None,
            detail: detail.into(),
        }
    }

    pub fn fail(name: impl Into<String>, anchor: impl Into<String>, witness: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
            detail: String::new(),
        }
    }

    pub fn skipped(name: impl Into<String>, anchor: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Skipped,
            witness: None,
            detail: reason.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// Rename, keeping everything else.
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Fold a sequence of sub-results into one report under `name`: the first
/// failure wins, otherwise a pass summarising the count.
pub fn combine(name: &str, anchor: &str, parts: Vec<CheckReport>) -> CheckReport {
    let total = parts.len();
    match parts.into_iter().find(|p| p.failed()) {
        Some(bad) => CheckReport {
            name: name.to_string(),
            anchor: anchor.to_string(),
            status: Status::Fail,
            witness: bad.witness.map(|w| format!("{}: {w}", bad.name)),
            detail: String::new(),
        },
        None => CheckReport::pass(name, anchor, format!("{total} sub-checks")),
    }
}
