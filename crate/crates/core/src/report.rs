//! Residual statistics and report structures.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// What a check's values must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "threshold", rename_all = "snake_case")]
pub enum Expectation {
    /// Every value `≤ tol`.
    Below(f64),
    /// Every value `> threshold` (negative controls that must fail everywhere).
    AboveAll(f64),
    /// Largest value `> threshold`.
    AboveSome(f64),
    /// Reported, never asserted.
    Informational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Informational,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Informational => "informational",
            Self::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub max: f64,
    pub mean: f64,
    pub p95: f64,
    pub min: f64,
    pub nan: usize,
}

impl Stats {
    pub fn of(values: &[f64]) -> Self {
        let nan = values.iter().filter(|v| v.is_nan()).count();
        let mut finite: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
        finite.sort_by(f64::total_cmp);
        let n = finite.len();
        if n == 0 {
            return Self { n: 0, max: 0.0, mean: 0.0, p95: 0.0, min: 0.0, nan };
        }
        let mean = finite.iter().sum::<f64>() / n as f64;
        // nearest-rank percentile
        let rank = (95 * n).div_ceil(100).max(1);
        Self { n, max: finite[n - 1], mean, p95: finite[rank - 1], min: finite[0], nan }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub expectation: Expectation,
    pub stats: Stats,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn evaluate(name: &str, expectation: Expectation, values: &[f64]) -> Self {
        let stats = Stats::of(values);
        let status = judge(expectation, &stats);
        Self { name: name.into(), expectation, stats, status, note: None }
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }
}

fn judge(expectation: Expectation, s: &Stats) -> Status {
    let ok = match expectation {
        Expectation::Informational => return Status::Informational,
        _ if s.nan > 0 || s.n == 0 => false,
        Expectation::Below(tol) => s.max <= tol,
        Expectation::AboveAll(t) => s.min > t,
        Expectation::AboveSome(t) => s.max > t,
    };
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: Status,
    pub points: usize,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl SuiteReport {
    pub fn from_checks(suite: &str, points: usize, checks: Vec<CheckReport>) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if checks.iter().any(|c| c.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Informational
        };
        Self { suite: suite.into(), status, points, checks, note: None }
    }

    pub fn skipped(suite: &str, reason: &str) -> Self {
        Self { suite: suite.into(), status: Status::Skipped, points: 0, checks: Vec::new(), note: Some(reason.into()) }
    }

    pub fn failed(suite: &str, reason: &str) -> Self {
        Self { suite: suite.into(), status: Status::Fail, points: 0, checks: Vec::new(), note: Some(reason.into()) }
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Sign and normalization conventions, copied into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub omega: String,
    pub d_c: String,
    pub wedge: String,
    pub trace: String,
    pub alternative: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            omega: "omega(X,Y) = g(JX,Y)".into(),
            d_c: "d^c f(X) = -df(JX)".into(),
            wedge: "(a^b)(X,Y) = a(X)b(Y) - a(Y)b(X)".into(),
            trace: "tr_omega phi = (1/2) tr(g^-1 phi J), tr_omega omega = n".into(),
            alternative: "with d^c f = df o J the Hamiltonian identity holds with X and JX exchanged and phi_from_s changes sign".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    pub description: String,
    pub parameters: crate::models::ModelSpec,
    pub seed: u64,
    pub points: usize,
    pub fd_step: f64,
    pub boundary_margin: f64,
    pub conventions: Conventions,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl Report {
    pub fn suite(&self, id: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_basic() {
        let v: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        let s = Stats::of(&v);
        assert_eq!((s.n, s.max, s.min, s.p95), (100, 100.0, 1.0, 95.0));
        assert_eq!(s.mean, 50.5);
    }

    #[test]
    fn nan_fails() {
        let c = CheckReport::evaluate("x", Expectation::Below(1.0), &[0.0, f64::NAN]);
        assert_eq!(c.status, Status::Fail);
        let c = CheckReport::evaluate("x", Expectation::Informational, &[f64::NAN]);
        assert_eq!(c.status, Status::Informational);
    }

    #[test]
    fn expectations() {
        assert_eq!(CheckReport::evaluate("a", Expectation::AboveSome(1.0), &[0.0, 2.0]).status, Status::Pass);
        assert_eq!(CheckReport::evaluate("a", Expectation::AboveAll(1.0), &[0.0, 2.0]).status, Status::Fail);
        assert_eq!(CheckReport::evaluate("a", Expectation::Below(1.0), &[]).status, Status::Fail);
    }
}
