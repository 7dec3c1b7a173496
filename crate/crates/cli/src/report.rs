//! JSON run reports.
//!
//! Object keys are sorted and no timings are recorded, so a report depends
//! only on the scenario, the command line and the build.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::scenario::Scenario;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// Informational value, never affects the exit code.
    Info,
    /// Not applicable to this scenario.
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// `|measured − target| / |target|`, or the absolute difference when
    /// the target is zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub fn relative_error(measured: f64, target: f64) -> f64 {
    if target == 0.0 {
        measured.abs()
    } else {
        (measured - target).abs() / target.abs()
    }
}

impl Check {
    fn bare(name: impl Into<String>, status: Status) -> Check {
        Check { name: name.into(), status, measured: None, target: None, error: None, tolerance: None, detail: None }
    }

    /// PASS iff [`relative_error`] is at most `tol`.
    pub fn relative(name: impl Into<String>, measured: f64, target: f64, tol: f64) -> Check {
        Check::against(name, measured, target, relative_error(measured, target), tol)
    }

    /// PASS iff `error` is at most `tol`.
    pub fn against(name: impl Into<String>, measured: f64, target: f64, error: f64, tol: f64) -> Check {
        let status = if error <= tol { Status::Pass } else { Status::Fail };
        Check { measured: Some(measured), target: Some(target), error: Some(error), tolerance: Some(tol), ..Check::bare(name, status) }
    }

    /// PASS iff `measured ≤ tol`.
    pub fn bound(name: impl Into<String>, measured: f64, tol: f64) -> Check {
        let status = if measured <= tol { Status::Pass } else { Status::Fail };
        Check { measured: Some(measured), tolerance: Some(tol), ..Check::bare(name, status) }
    }

    pub fn info(name: impl Into<String>, measured: f64) -> Check {
        Check { measured: Some(measured), ..Check::bare(name, Status::Info) }
    }

    pub fn skip(name: impl Into<String>, reason: impl Into<String>) -> Check {
        Check { detail: Some(reason.into()), ..Check::bare(name, Status::Skip) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Check {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub level: usize,
    pub values: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: impl Into<String>, level: usize) -> Report {
        Report { command: command.into(), level, values: Map::new(), checks: Vec::new() }
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) {
        self.values.insert(key.to_string(), serde_json::to_value(v).expect("plain data"));
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_json(&self, s: &Scenario) -> Value {
        json!({
            "tool": "helixforms",
            "version": env!("CARGO_PKG_VERSION"),
            "report_schema": REPORT_SCHEMA,
            "command": self.command,
            "scenario": s.file,
            "quadrature": { "level": self.level, "n_t": s.settings.n_t },
            "values": self.values,
            "checks": self.checks,
            "status": if self.passed() { Status::Pass } else { Status::Fail },
        })
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
                Status::Skip => "SKIP",
            };
            out.push_str(&format!("{tag} {}", c.name));
            if let Some(m) = c.measured {
                out.push_str(&format!(": {m:.10e}"));
            }
            if let Some(t) = c.target {
                out.push_str(&format!(" (target {t:.10e}"));
                if let (Some(e), Some(tol)) = (c.error, c.tolerance) {
                    out.push_str(&format!(", error {e:.2e} <= {tol:.0e}?"));
                }
                out.push(')');
            } else if let Some(tol) = c.tolerance {
                out.push_str(&format!(" (<= {tol:.0e}?)"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!(" [{d}]"));
            }
            out.push('\n');
        }
        out.push_str(if self.passed() { "overall: PASS\n" } else { "overall: FAIL\n" });
        out
    }
}
