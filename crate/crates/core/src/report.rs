//! Deterministic JSON report envelopes: identical input and command
//! produce byte-identical output (insertion-ordered maps, stable basis
//! and pivot orders upstream).

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::scheme::Window;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone)]
pub struct ReportEnvelope {
    pub tool_version: String,
    pub input_sha256: String,
    pub command: String,
    pub args: Vec<(String, String)>,
    pub window: Window,
    pub pmax: usize,
    pub results: Value,
    pub warnings: Vec<String>,
    pub assumptions: Vec<String>,
}

pub fn digest(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    hex_string(&h.finalize())
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl ReportEnvelope {
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("report_version".into(), REPORT_VERSION.into());
        m.insert("tool_version".into(), self.tool_version.clone().into());
        m.insert("input_sha256".into(), self.input_sha256.clone().into());
        m.insert("command".into(), self.command.clone().into());
        let mut args = Map::new();
        for (k, v) in &self.args {
            args.insert(k.clone(), v.clone().into());
        }
        m.insert("args".into(), Value::Object(args));
        let mut w = Map::new();
        w.insert("lo".into(), self.window.lo.into());
        w.insert("hi".into(), self.window.hi.into());
        w.insert("length_cap".into(), (self.window.length_cap as u64).into());
        w.insert("pmax".into(), (self.pmax as u64).into());
        m.insert("window".into(), Value::Object(w));
        m.insert("results".into(), self.results.clone());
        m.insert(
            "warnings".into(),
            Value::Array(self.warnings.iter().map(|s| s.clone().into()).collect()),
        );
        m.insert(
            "assumptions".into(),
            Value::Array(self.assumptions.iter().map(|s| s.clone().into()).collect()),
        );
        Value::Object(m)
    }

    pub fn to_string_pretty(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json()).expect("report serialization");
        out.push('\n');
        out
    }
}
