//! Suite reports and their markdown rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::SuiteConfig;

/// Version of the report layout described by `schemas/report.v1.schema.json`.
pub const REPORT_VERSION: u32 = 1;

/// Witnesses kept per report; further failures are only counted.
pub const MAX_WITNESSES: usize = 32;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub count: usize,
    pub failed: usize,
    pub max_violation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSummary {
    pub name: String,
    pub cases: usize,
    pub failed: usize,
    pub runtime_ms: u64,
}

/// A failing check with enough context to re-run the case
/// (`replay_case(config, section, case)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub section: String,
    pub case: usize,
    pub check: String,
    pub violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub instance: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub report_version: u32,
    pub generator_version: u32,
    pub suite: String,
    pub config: SuiteConfig,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest violation over all checks.
    pub max_violation: f64,
    /// Largest tolerance declared by any check; each check is held to its own.
    pub tolerance: f64,
    pub checks: BTreeMap<String, CheckSummary>,
    pub sections: Vec<SectionSummary>,
    pub witnesses: Vec<Witness>,
    pub witnesses_omitted: usize,
    pub runtime_ms: u64,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// The report with every timing field zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> SuiteReport {
        let mut r = self.clone();
        r.runtime_ms = 0;
        for s in &mut r.sections {
            s.runtime_ms = 0;
        }
        r
    }
}

fn sci(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:.3e}")
    }
}

/// Human summary of a list of reports.
pub fn render_markdown(reports: &[SuiteReport]) -> String {
    let mut s = String::new();
    let all_ok = reports.iter().all(SuiteReport::ok);
    let _ = writeln!(s, "# condan suite report\n");
    let _ = writeln!(s, "Overall: **{}**\n", if all_ok { "PASS" } else { "FAIL" });
    let _ = writeln!(s, "| suite | cases | passed | failed | max violation | tolerance | runtime (ms) |");
    let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|---:|");
    for r in reports {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            r.suite,
            r.cases,
            r.passed,
            r.failed,
            sci(r.max_violation),
            sci(r.tolerance),
            r.runtime_ms
        );
    }
    for r in reports {
        let c = &r.config;
        let _ = writeln!(
            s,
            "\n## {}\n\natoms={} seed={} tol={} trunc={} cases={} dim_cap={}\n",
            r.suite, c.atoms, c.seed, c.tol, c.trunc, c.cases, c.dim_cap
        );
        let _ = writeln!(s, "| check | count | failed | max violation | tolerance |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|");
        for (name, k) in &r.checks {
            let _ = writeln!(s, "| {name} | {} | {} | {} | {} |", k.count, k.failed, sci(k.max_violation), sci(k.tolerance));
        }
        if !r.witnesses.is_empty() {
            let _ = writeln!(s, "\nWitnesses:\n");
            for w in &r.witnesses {
                let _ = writeln!(
                    s,
                    "- `{}` case {} check `{}`: violation {} > {}{}",
                    w.section,
                    w.case,
                    w.check,
                    sci(w.violation),
                    sci(w.tolerance),
                    w.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
                );
            }
            if r.witnesses_omitted > 0 {
                let _ = writeln!(s, "- … {} more failures not listed", r.witnesses_omitted);
            }
        }
    }
    s
}
