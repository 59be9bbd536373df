//! Machine-readable run reports.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// A deviation compared against its tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A reported quantity with no pass/fail meaning.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_sha256: String,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
    pub pass: bool,
    /// Only present with `--timing`, so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, inputs_sha256: String) -> Self {
        Self {
            command: command.to_string(),
            inputs_sha256,
            checks: Vec::new(),
            observations: Vec::new(),
            data: None,
            pass: true,
            wall_time_s: None,
        }
    }

    /// Records a check; NaN deviations fail.
    pub fn check(&mut self, name: &str, deviation: f64, tolerance: f64) {
        let pass = deviation <= tolerance;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            deviation,
            tolerance,
            pass,
        });
    }

    /// Records a yes/no condition as deviation `0` or `1` with tolerance `0`.
    pub fn require(&mut self, name: &str, ok: bool) {
        self.check(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    pub fn observe(&mut self, name: &str, value: f64) {
        self.observations.push(Observation {
            name: name.to_string(),
            value,
        });
    }

    pub fn to_json(&self) -> String {
        crate::formats::to_pretty(self)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict} {:<28} deviation {:.3e} (tolerance {:.1e})",
                c.name, c.deviation, c.tolerance
            );
        }
        for o in &self.observations {
            let _ = writeln!(out, "     {:<28} {}", o.name, o.value);
        }
        if let Some(t) = self.wall_time_s {
            let _ = writeln!(out, "wall time {t:.3} s");
        }
        let _ = writeln!(
            out,
            "{}: {}",
            self.command,
            if self.pass { "pass" } else { "FAIL" }
        );
        out
    }
}
