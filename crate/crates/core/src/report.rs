//! Verdicts, named residual checks and JSON helpers shared by the reports.

use serde::{Deserialize, Serialize};

use crate::linalg::{CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Inconclusive,
}

/// One residual compared against one tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes iff `residual <= tolerance` (NaN fails).
    pub fn at_most(name: &str, residual: f64, tolerance: f64) -> Self {
        let pass = residual <= tolerance;
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            pass,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            note: None,
        }
    }

    pub fn not_applicable(name: &str, reason: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            residual: 0.0,
            tolerance: 0.0,
            pass: false,
            verdict: Verdict::NotApplicable,
            note: Some(reason.into()),
        }
    }

    /// Measured but not decidable; recorded without a pass/fail.
    pub fn inconclusive(name: &str, residual: f64, tolerance: f64, reason: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            pass: false,
            verdict: Verdict::Inconclusive,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Sorts checks by name (stable for equal names).
pub fn sort_checks(checks: &mut [Check]) {
    checks.sort_by(|a, b| a.name.cmp(&b.name));
}

/// Counts of verdicts over a set of checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub not_applicable: usize,
    pub inconclusive: usize,
}

impl Tally {
    pub fn of<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Self {
        let mut t = Self::default();
        for c in checks {
            t.add(c.verdict);
        }
        t
    }

    pub fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::NotApplicable => self.not_applicable += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn merge(&mut self, other: Tally) {
        self.pass += other.pass;
        self.fail += other.fail;
        self.not_applicable += other.not_applicable;
        self.inconclusive += other.inconclusive;
    }

    /// Overall verdict: any failure fails; otherwise pass if anything
    /// applicable passed; otherwise not applicable.
    pub fn overall(&self) -> Verdict {
        if self.fail > 0 {
            Verdict::Fail
        } else if self.pass > 0 {
            Verdict::Pass
        } else {
            Verdict::NotApplicable
        }
    }
}

pub fn complex_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Row-major matrix of `[re, im]` pairs.
pub fn matrix_pairs(a: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| complex_pair(a[(i, j)])).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).pass);
        assert!(Check::at_most("x", 1.0, 1.0).pass);
    }

    #[test]
    fn tally_overall() {
        let checks = [
            Check::at_most("a", 0.0, 1.0),
            Check::not_applicable("b", "r < m"),
        ];
        assert_eq!(Tally::of(&checks).overall(), Verdict::Pass);
        let none = [Check::not_applicable("b", "r < m")];
        assert_eq!(Tally::of(&none).overall(), Verdict::NotApplicable);
        let bad = [Check::at_most("a", 2.0, 1.0), Check::at_most("c", 0.0, 1.0)];
        assert_eq!(Tally::of(&bad).overall(), Verdict::Fail);
    }

    #[test]
    fn checks_serialize_with_schema_fields() {
        let json = serde_json::to_value(Check::at_most("x", 0.5, 1.0)).unwrap();
        for key in ["name", "residual", "tolerance", "pass"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
