//! Structured outcomes of identity checks.

use std::fmt;

use serde::Serialize;

use crate::series::{MSeries, PolyMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A precondition of the identity does not hold for this input.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub status: CheckStatus,
    /// Total degree through which the comparison was made.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub through_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityCheck {
    pub fn pass(identity: impl Into<String>) -> Self {
        IdentityCheck {
            identity: identity.into(),
            status: CheckStatus::Pass,
            through_degree: None,
            first_failure: None,
            note: None,
        }
    }

    pub fn fail(identity: impl Into<String>, why: impl Into<String>) -> Self {
        IdentityCheck {
            status: CheckStatus::Fail,
            first_failure: Some(why.into()),
            ..IdentityCheck::pass(identity)
        }
    }

    pub fn skipped(identity: impl Into<String>, why: impl Into<String>) -> Self {
        IdentityCheck {
            status: CheckStatus::Skipped,
            note: Some(why.into()),
            ..IdentityCheck::pass(identity)
        }
    }

    pub fn from_bool(identity: impl Into<String>, ok: bool, why: impl FnOnce() -> String) -> Self {
        if ok {
            IdentityCheck::pass(identity)
        } else {
            IdentityCheck::fail(identity, why())
        }
    }

    /// Compares two maps coefficient-wise through degree `d`.
    pub fn maps_equal(identity: impl Into<String>, lhs: &PolyMap, rhs: &PolyMap, d: u32) -> Self {
        let mut c = match lhs.first_difference(rhs, d) {
            None => IdentityCheck::pass(identity),
            Some((i, e, a, b)) => IdentityCheck::fail(
                identity,
                format!(
                    "component {}, exponent {:?}: {} vs {}",
                    i + 1,
                    e.as_slice(),
                    a,
                    b
                ),
            ),
        };
        c.through_degree = Some(d);
        c
    }

    /// Checks that a map vanishes through degree `d`.
    pub fn map_vanishes(identity: impl Into<String>, m: &PolyMap, d: u32) -> Self {
        let zero = PolyMap::zero_with_vars(m.len(), m.nvars(), d);
        IdentityCheck::maps_equal(identity, m, &zero, d)
    }

    pub fn series_equal(identity: impl Into<String>, lhs: &MSeries, rhs: &MSeries, d: u32) -> Self {
        let mut c = match lhs.first_difference(rhs, d) {
            None => IdentityCheck::pass(identity),
            Some((e, a, b)) => IdentityCheck::fail(
                identity,
                format!("exponent {:?}: {} vs {}", e.as_slice(), a, b),
            ),
        };
        c.through_degree = Some(d);
        c
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// A named collection of checks plus free-form findings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub checks: Vec<IdentityCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, check: IdentityCheck) {
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// True when no check failed (skipped checks do not count as failures).
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skip",
            };
            write!(f, "  [{status}] {}", c.identity)?;
            if let Some(d) = c.through_degree {
                write!(f, " (through degree {d})")?;
            }
            if let Some(why) = &c.first_failure {
                write!(f, ": {why}")?;
            }
            if let Some(note) = &c.note {
                write!(f, " -- {note}")?;
            }
            writeln!(f)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
