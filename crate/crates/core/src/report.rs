//! Suite reports: one record per case plus an aggregate, serialized as JSON.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Floating deviation against a tolerance, or an exact integer defect that must be 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    MaxDeviation(f64),
    Defect(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    /// Hypothesis flags the case was run under, e.g. "E1 c, B d".
    pub hypotheses: Vec<String>,
    #[serde(flatten)]
    pub outcome: Outcome,
    /// Bound for `max_deviation`; absent for exact defects.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub detail: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub runtime_ms: f64,
    pub pass: bool,
}

impl Case {
    pub fn deviation(name: impl Into<String>, dev: f64, tol: f64) -> Self {
        Case {
            name: name.into(),
            hypotheses: vec![],
            outcome: Outcome::MaxDeviation(dev),
            tol: Some(tol),
            detail: BTreeMap::new(),
            error: None,
            runtime_ms: 0.0,
            // NaN fails
            pass: dev <= tol,
        }
    }

    pub fn defect(name: impl Into<String>, defect: u64) -> Self {
        Case {
            name: name.into(),
            hypotheses: vec![],
            outcome: Outcome::Defect(defect),
            tol: None,
            detail: BTreeMap::new(),
            error: None,
            runtime_ms: 0.0,
            pass: defect == 0,
        }
    }

    /// A case whose computation returned an error: recorded as a failure.
    pub fn failed(name: impl Into<String>, err: impl ToString) -> Self {
        let mut c = Case::defect(name, 1);
        c.error = Some(err.to_string());
        c.pass = false;
        c
    }

    pub fn hyp(mut self, h: impl Into<String>) -> Self {
        let h = h.into();
        if !h.is_empty() {
            self.hypotheses.push(h);
        }
        self
    }

    pub fn with(mut self, key: &str, v: impl Serialize) -> Self {
        self.detail.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    /// Extra requirement on top of the tolerance, e.g. a nondegenerate left side.
    pub fn require(mut self, ok: bool, what: &str) -> Self {
        if !ok {
            self.pass = false;
            self.error = Some(format!("requirement failed: {what}"));
        }
        self
    }

    pub fn value(&self) -> f64 {
        match self.outcome {
            Outcome::MaxDeviation(d) => d,
            Outcome::Defect(d) => d as f64,
        }
    }
}

/// Runs `f`, turning errors into failed cases and stamping the runtime.
pub fn timed(name: &str, f: impl FnOnce() -> Result<Vec<Case>>) -> Vec<Case> {
    let start = Instant::now();
    let mut cases = match f() {
        Ok(c) => c,
        Err(e) => vec![Case::failed(name, e)],
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let share = ms / cases.len().max(1) as f64;
    for c in &mut cases {
        c.runtime_ms = share;
    }
    cases
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest `max_deviation` over all cases.
    pub max_deviation: f64,
    /// Sum of exact defects.
    pub total_defect: u64,
    pub runtime_ms: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub tol: f64,
    pub params: Value,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Report {
    pub fn new(suite: &str, seed: u64, tol: f64, params: Value, cases: Vec<Case>) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        let max_deviation = cases
            .iter()
            .filter_map(|c| match c.outcome {
                Outcome::MaxDeviation(d) => Some(d),
                _ => None,
            })
            .fold(0.0, f64::max);
        let total_defect = cases
            .iter()
            .map(|c| match c.outcome {
                Outcome::Defect(d) => d,
                _ => 0,
            })
            .sum();
        let summary = Summary {
            cases: cases.len(),
            passed,
            failed: cases.len() - passed,
            max_deviation,
            total_defect,
            runtime_ms: cases.iter().map(|c| c.runtime_ms).sum(),
            pass: passed == cases.len() && !cases.is_empty(),
        };
        Report { schema_version: SCHEMA_VERSION, suite: suite.into(), seed, tol, params, cases, summary }
    }

    pub fn pass(&self) -> bool {
        self.summary.pass
    }

    /// The report with all timings zeroed; equal across runs with the same seed.
    pub fn body(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.cases {
            c.runtime_ms = 0.0;
        }
        r.summary.runtime_ms = 0.0;
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text summary, one line per failing case plus a total.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for c in self.cases.iter().filter(|c| !c.pass) {
            let why = c.error.as_deref().unwrap_or("");
            out.push_str(&format!("FAIL {} {:?} {}\n", c.name, c.outcome, why));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "{}: {} {}/{} cases, max deviation {:.3e}, defect {}, {:.0} ms\n",
            self.suite,
            if s.pass { "PASS" } else { "FAIL" },
            s.passed,
            s.cases,
            s.max_deviation,
            s.total_defect,
            s.runtime_ms
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_pass_rules() {
        assert!(Case::deviation("a", 1e-12, 1e-9).pass);
        assert!(!Case::deviation("a", 1e-8, 1e-9).pass);
        assert!(!Case::deviation("a", f64::NAN, 1e-9).pass);
        assert!(Case::defect("b", 0).pass);
        assert!(!Case::defect("b", 2).pass);
        assert!(!Case::deviation("c", 0.0, 1.0).require(false, "x").pass);
    }

    #[test]
    fn json_shape() {
        let c = Case::deviation("a", 0.5, 1.0).hyp("E1 c");
        let v: Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["max_deviation"], 0.5);
        assert_eq!(v["hypotheses"][0], "E1 c");
        let d: Value = serde_json::to_value(Case::defect("b", 3)).unwrap();
        assert_eq!(d["defect"], 3);
        assert!(d.get("tol").is_none());
        let back: Case = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn aggregate() {
        let r = Report::new("s", 1, 1e-9, Value::Null, vec![Case::deviation("a", 1e-10, 1e-9), Case::defect("b", 2)]);
        assert_eq!((r.summary.passed, r.summary.failed, r.summary.total_defect), (1, 1, 2));
        assert!(!r.pass());
        assert!(!Report::new("s", 1, 1e-9, Value::Null, vec![]).pass());
    }

    #[test]
    fn body_drops_timing() {
        let mut a = Case::defect("b", 0);
        a.runtime_ms = 3.0;
        let r = Report::new("s", 0, 1e-9, Value::Null, vec![a]);
        assert_eq!(r.body().summary.runtime_ms, 0.0);
        assert_eq!(r.body().cases[0].runtime_ms, 0.0);
    }
}
