//! Machine-readable reports. Field order is fixed by the struct layout, so
//! serialization is byte-stable for identical inputs.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "coxarith-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::Pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    /// A place such as `real:id` or a prime ideal, or a short label.
    pub place: String,
    /// Exact values as expression strings.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub inputs: Vec<String>,
    pub verdict: Verdict,
    pub expected: Option<String>,
    pub observed: String,
    pub witnesses: Vec<Witness>,
    /// Wall-clock milliseconds, present only when timing was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl Check {
    pub fn new(name: impl Into<String>, inputs: &[&str], observed: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            verdict: Verdict::Pass,
            expected: None,
            observed: observed.into(),
            witnesses: Vec::new(),
            millis: None,
        }
    }

    /// Sets the expectation and compares it with the observation.
    pub fn expect(mut self, expected: impl Into<String>) -> Check {
        let e = expected.into();
        self.verdict = self.verdict.combine(Verdict::from_bool(e == self.observed));
        self.expected = Some(e);
        self
    }

    pub fn require(mut self, ok: bool) -> Check {
        self.verdict = self.verdict.combine(Verdict::from_bool(ok));
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Check {
        self.verdict = self.verdict.combine(v);
        self
    }

    pub fn witness(mut self, place: impl Into<String>, value: impl Into<String>) -> Check {
        self.witnesses.push(Witness {
            place: place.into(),
            value: value.into(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>, checks: Vec<Check>) -> Report {
        let verdict = checks
            .iter()
            .fold(Verdict::Pass, |acc, c| acc.combine(c.verdict));
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            verdict,
            checks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn exit_code(&self) -> i32 {
        if self.verdict == Verdict::Pass {
            0
        } else {
            1
        }
    }

    /// Checks whose verdict is not pass.
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict != Verdict::Pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_combine() {
        use Verdict::*;
        assert_eq!(Pass.combine(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.combine(Fail), Fail);
        assert_eq!(Pass.combine(Pass), Pass);
    }

    #[test]
    fn round_trip() {
        let r = Report::new(
            "x",
            vec![Check::new("a", &["f"], "1").expect("1").witness("real:id", "-1")],
        );
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.exit_code(), 0);
        let bad = Report::new("x", vec![Check::new("a", &[], "1").expect("2")]);
        assert_eq!(bad.exit_code(), 1);
        assert_eq!(bad.failures().count(), 1);
    }
}
