//! Machine-consumable results of the verification suite: one record per
//! named check, aggregated into a report with summary counts.

use std::collections::BTreeMap;

use serde::Serialize;

/// Outcome of one named check. `passed` holds exactly when
/// `max_error <= tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_ms: f64,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, String>,
        max_error: f64,
        tolerance: f64,
        runtime_ms: f64,
    ) -> Self {
        Self {
            name: name.into(),
            params,
            max_error,
            tolerance,
            passed: max_error.is_finite() && max_error <= tolerance,
            runtime_ms,
        }
    }

    fn param_summary(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
    pub wall_ms: f64,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64, checks: Vec<CheckResult>, wall_ms: f64) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        let failed = checks.len() - passed;
        Self {
            suite: suite.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            checks,
            summary: Summary { passed, failed },
            wall_ms,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// One JSON document.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV rows: name,param_summary,max_error,tolerance,passed,runtime_ms.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("name,param_summary,max_error,tolerance,passed,runtime_ms\n");
        for check in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                check.name,
                check.param_summary(),
                check.max_error,
                check.tolerance,
                check.passed,
                check.runtime_ms
            ));
        }
        out
    }

    /// Copy with wall-clock fields zeroed. Everything else in a report is a
    /// deterministic function of the seed and flags, so this is the content
    /// that is byte-stable across runs.
    pub fn normalized(&self) -> Report {
        let mut out = self.clone();
        out.wall_ms = 0.0;
        for check in &mut out.checks {
            check.runtime_ms = 0.0;
        }
        out
    }
}
