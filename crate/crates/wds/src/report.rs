//! Machine-readable run reports. Every CLI invocation produces exactly one
//! `Report`; batch runs produce an `AggregateReport` over named cases.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Outcome of a single invocation: the command line as given, a content
/// digest per input file, the result payload, free-form diagnostics and the
/// process exit code (0 for any completed computation, 2 for input errors).
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: ReportKind,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub result: Value,
    pub diagnostics: Vec<String>,
    pub exit_status: i32,
    pub tool_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Single,
    Aggregate,
}

impl Report {
    pub fn new(command: String) -> Report {
        Report {
            kind: ReportKind::Single,
            command,
            inputs: BTreeMap::new(),
            result: Value::Null,
            diagnostics: Vec::new(),
            exit_status: 0,
            tool_version: crate::certify::TOOL_VERSION.into(),
        }
    }

    /// Records an input under the name it was given on the command line,
    /// digesting the bytes actually read.
    pub fn record_input(&mut self, name: &str, bytes: &[u8]) {
        let mut h = Sha256::new();
        h.update(bytes);
        self.inputs.insert(name.to_string(), format!("{:x}", h.finalize()));
    }

    pub fn input_error(mut self, message: String) -> Report {
        self.diagnostics.push(message);
        self.exit_status = 2;
        self
    }

    /// Canonical JSON rendering, one line, trailing newline. Field order is
    /// fixed by the struct; map keys are sorted. This is the byte-exact
    /// format the corpus sidecars store.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).unwrap();
        s.push('\n');
        s
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap();
        s.push('\n');
        s
    }

    /// Plain-text rendering for terminals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for (name, digest) in &self.inputs {
            out.push_str(&format!("input: {name} sha256:{digest}\n"));
        }
        for d in &self.diagnostics {
            out.push_str(&format!("note: {d}\n"));
        }
        render_value(&mut out, "result", &self.result);
        out.push_str(&format!("exit: {}\n", self.exit_status));
        out
    }
}

fn render_value(out: &mut String, label: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                render_value(out, &format!("{label}.{k}"), inner);
            }
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                render_value(out, &format!("{label}[{i}]"), inner);
            }
        }
        other => out.push_str(&format!("{label}: {other}\n")),
    }
}

/// One corpus case: the stored command line was replayed and its JSON output
/// compared byte for byte against the expected sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct CaseOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateReport {
    pub kind: ReportKind,
    pub command: String,
    pub cases: Vec<CaseOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub exit_status: i32,
    pub tool_version: String,
}

impl AggregateReport {
    pub fn new(command: String, cases: Vec<CaseOutcome>) -> AggregateReport {
        let passed = cases.iter().filter(|c| c.passed).count();
        let failed = cases.len() - passed;
        AggregateReport {
            kind: ReportKind::Aggregate,
            command,
            cases,
            passed,
            failed,
            exit_status: 0,
            tool_version: crate::certify::TOOL_VERSION.into(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).unwrap();
        s.push('\n');
        s
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).unwrap();
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for c in &self.cases {
            let mark = if c.passed { "pass" } else { "FAIL" };
            out.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
        }
        out.push_str(&format!("passed: {} failed: {}\n", self.passed, self.failed));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_is_stable() {
        let mut r = Report::new("demo --flag".into());
        r.record_input("a.pd", b"hello");
        r.result = serde_json::json!({"b": 1, "a": 2});
        let one = r.to_json();
        assert_eq!(one, r.to_json());
        assert!(one.ends_with('\n'));
        assert!(one.contains("\"command\":\"demo --flag\""));
        // sha256 of "hello"
        assert!(one.contains("2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"));
    }

    #[test]
    fn aggregate_counts() {
        let agg = AggregateReport::new(
            "corpus".into(),
            vec![
                CaseOutcome { name: "a".into(), passed: true, detail: "ok".into() },
                CaseOutcome { name: "b".into(), passed: false, detail: "mismatch".into() },
            ],
        );
        assert_eq!((agg.passed, agg.failed), (1, 1));
        assert_eq!(agg.exit_status, 0);
    }
}
