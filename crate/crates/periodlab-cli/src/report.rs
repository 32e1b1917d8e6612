//! Reports and their two renderings.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub tolerance: Option<String>,
    pub verdict: Verdict,
}

impl Record {
    pub fn exact(name: impl Into<String>, expected: impl ToString, got: impl ToString) -> Self {
        let (expected, got) = (expected.to_string(), got.to_string());
        let verdict = Verdict::from_bool(expected == got);
        Record { name: name.into(), expected, got, tolerance: None, verdict }
    }

    pub fn approx(name: impl Into<String>, expected: Complex64, got: Complex64, tol: f64) -> Self {
        let err = (got - expected).norm() / expected.norm().max(1.0);
        Record {
            name: name.into(),
            expected: fmt_c(expected),
            got: fmt_c(got),
            tolerance: Some(fmt_f(tol)),
            verdict: Verdict::from_bool(err <= tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, records: Vec<Record>) -> Self {
        let passed = records.iter().filter(|r| r.verdict == Verdict::Pass).count();
        let summary = Summary { total: records.len(), passed, failed: records.len() - passed };
        Report { command: command.into(), inputs, records, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_records(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let head = ["name", "expected", "got", "tolerance", "verdict"];
        let rows: Vec<[String; 5]> = self
            .records
            .iter()
            .map(|r| {
                let v = match r.verdict {
                    Verdict::Pass => "PASS",
                    Verdict::Fail => "FAIL",
                };
                [r.name.clone(), r.expected.clone(), r.got.clone(), r.tolerance.clone().unwrap_or_else(|| "-".into()), v.into()]
            })
            .collect();
        let mut width = head.map(|h| h.chars().count());
        for row in &rows {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut out = String::new();
            for (i, (c, w)) in cells.iter().zip(width).enumerate() {
                if i + 1 == cells.len() {
                    out.push_str(c);
                } else {
                    out.push_str(c);
                    out.push_str(&" ".repeat(w - c.chars().count() + 2));
                }
            }
            out.push('\n');
            out
        };
        let mut out = format!("# {}\n", self.command);
        for (k, v) in &self.inputs {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&line(&head.map(String::from)));
        for row in &rows {
            out.push_str(&line(row));
        }
        out.push_str(&format!(
            "{} records, {} passed, {} failed\n",
            self.summary.total, self.summary.passed, self.summary.failed
        ));
        out
    }
}

/// 15 significant digits.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn fmt_c(z: Complex64) -> String {
    format!("{}{}{}i", fmt_f(z.re), if z.im.is_sign_negative() { "-" } else { "+" }, fmt_f(z.im.abs()))
}
