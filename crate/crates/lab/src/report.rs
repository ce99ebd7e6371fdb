//! Machine-readable check records.

use serde::Serialize;
use serde_json::{Map, Value};

/// One check: what was run, the exact quantities involved (fractions as
/// `"num/den"` strings) and whether it passed. `pass` is `None` when the
/// check does not apply to the instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: Value,
    pub values: Map<String, Value>,
    pub pass: Option<bool>,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, inputs: Value) -> Self {
        CheckRecord {
            name: name.into(),
            inputs,
            values: Map::new(),
            pass: None,
        }
    }

    pub fn value(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.values.insert(key.to_string(), v.into());
        self
    }

    pub fn verdict(mut self, pass: Option<bool>) -> Self {
        self.pass = pass;
        self
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialise")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteReport {
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass == Some(true)).count()
    }

    pub fn failed(&self) -> usize {
        self.records.iter().filter(|r| r.failed()).count()
    }

    pub fn skipped(&self) -> usize {
        self.records.iter().filter(|r| r.pass.is_none()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    /// One JSON line per record.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_json_line());
            s.push('\n');
        }
        s
    }
}
