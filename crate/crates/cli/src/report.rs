use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// Result of one subcommand. Field order and map ordering are fixed so that
/// identical inputs give byte-identical output.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
    pub values: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: &str, inputs: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            checks: Vec::new(),
            outputs: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn check(&mut self, name: &str, holds: bool, witness: Option<Value>) {
        debug_assert!(holds || witness.is_some(), "failed checks carry a witness");
        self.checks.push(Check {
            name: name.to_string(),
            holds,
            witness,
        });
    }

    pub fn value(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub fn output(&mut self, path: &str) {
        self.outputs.push(path.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.command, self.inputs.join(" "));
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.holds { "ok" } else { "FAIL" };
            let _ = write!(out, "  {:width$}  {status}", c.name);
            if let Some(w) = &c.witness {
                let _ = write!(out, "  at {}", compact(w));
            }
            out.push('\n');
        }
        for (k, v) in &self.values {
            let _ = writeln!(out, "  {k} = {}", compact(v));
        }
        for p in &self.outputs {
            let _ = writeln!(out, "  wrote {p}");
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
