//! Structured pass/fail records produced by the verification drivers.
//!
//! Every check emits one record: a stable name, the mathematical subject
//! being checked, a status, and a witness string on failure. Records
//! serialize as line-delimited JSON; the emission order is fixed by the
//! check registries, never by completion order.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub subject: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn pass(name: impl Into<String>, subject: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            subject: subject.into(),
            status: CheckStatus::Pass,
            witness: None,
        }
    }

    pub fn fail(
        name: impl Into<String>,
        subject: impl Into<String>,
        witness: impl Into<String>,
    ) -> Self {
        CheckRecord {
            name: name.into(),
            subject: subject.into(),
            status: CheckStatus::Fail,
            witness: Some(witness.into()),
        }
    }

    /// Pass/fail from a boolean, with the witness used only on failure.
    pub fn expect(
        name: impl Into<String>,
        subject: impl Into<String>,
        ok: bool,
        witness: impl Into<String>,
    ) -> Self {
        if ok {
            CheckRecord::pass(name, subject)
        } else {
            CheckRecord::fail(name, subject, witness)
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            CheckStatus::Pass => write!(f, "ok   {} :: {}", self.name, self.subject),
            CheckStatus::Fail => write!(
                f,
                "FAIL {} :: {} :: {}",
                self.name,
                self.subject,
                self.witness.as_deref().unwrap_or("")
            ),
        }
    }
}

pub fn all_passed(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.passed())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_are_stable() {
        let r = CheckRecord::pass("a/b", "x = y");
        assert_eq!(
            r.to_json_line(),
            r#"{"name":"a/b","subject":"x = y","status":"pass"}"#
        );
        let f = CheckRecord::fail("a/c", "u = v", "difference nonzero");
        assert!(f.to_json_line().contains("\"witness\""));
        assert!(!all_passed(&[r, f]));
    }
}
