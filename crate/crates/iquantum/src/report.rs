//! JSON reports. Contents depend only on the configuration, so identical
//! configs give identical reports.

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, RunConfig};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: Value) -> Self {
        Check { name: name.into(), pass, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, cfg: &RunConfig, checks: Vec<Check>, data: Value) -> Self {
        let passed = checks.iter().all(|c| c.pass);
        Report { command: command.into(), config: cfg.clone(), checks, data, error: None, passed }
    }

    pub fn failure(command: &str, cfg: &RunConfig, e: &CliError) -> Self {
        Report {
            command: command.into(),
            config: cfg.clone(),
            checks: Vec::new(),
            data: Value::Null,
            error: Some(ErrorRecord { kind: e.kind(), message: e.to_string() }),
            passed: false,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match (&self.error, self.passed) {
            (Some(_), _) => 2,
            (None, true) => 0,
            (None, false) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per check plus a verdict.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!("{} {}\n", if c.pass { "ok  " } else { "FAIL" }, c.name));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!("error [{}]: {}\n", e.kind, e.message));
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        s.push_str(&format!(
            "{}: {} — {} checks, {} failed\n",
            self.command,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed
        ));
        s
    }
}
