//! The line-delimited output record and its JSON/CSV renderings.
//!
//! One record per evaluation. Inputs and diagnostics are ordered maps so
//! identical invocations produce byte-identical output.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    /// The computed value; absent when `error` is set.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    /// Error tag; errors are records, not bare exits.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub diagnostics: BTreeMap<String, Value>,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            value: None,
            error: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_error(mut self, error: impl std::fmt::Display) -> Self {
        self.error = Some(error.to_string());
        self
    }

    pub fn diag(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub const CSV_HEADER: &'static str = "x,value,error";

    /// Tabular rendering for sweeps: the swept coordinate, the value, and
    /// the error tag if any.
    pub fn to_csv_row(&self) -> String {
        let x = match self.inputs.get("x") {
            Some(Value::Number(n)) => n.as_f64().map(|v| v.to_string()).unwrap_or_default(),
            _ => String::new(),
        };
        let value = self.value.map(|v| v.to_string()).unwrap_or_default();
        let error = self.error.as_deref().map(csv_escape).unwrap_or_default();
        format!("{x},{value},{error}")
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let record = OutputRecord::new("derive")
            .input("op", "dilation:q=2")
            .input("x", 3.0)
            .with_value(9.0)
            .diag("omega_x", 6.0);
        let json = record.to_json();
        let back: OutputRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn error_record_round_trip() {
        let record = OutputRecord::new("apply")
            .input("x", 2.0)
            .with_error("domain error");
        let back: OutputRecord = serde_json::from_str(&record.to_json()).unwrap();
        assert_eq!(back.error.as_deref(), Some("domain error"));
        assert!(back.value.is_none());
    }

    #[test]
    fn csv_escaping() {
        let record = OutputRecord::new("apply")
            .input("x", 1.0)
            .with_error("bad, \"quoted\"");
        assert_eq!(record.to_csv_row(), "1,,\"bad, \"\"quoted\"\"\"");
    }
}
