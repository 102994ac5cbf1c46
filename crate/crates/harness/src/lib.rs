//! Seeded, reproducible property suites over the `condan` engine.
//!
//! Each suite binds one result of conditional analysis to the operations
//! that implement it, draws instances from fixed generators, re-verifies
//! the generators' hypotheses and then checks the conclusions. Reports are
//! deterministic under a [`SuiteConfig`] apart from their timing fields.

pub mod case;
pub mod generate;
pub mod report;
pub mod suites;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use case::Case;
pub use generate::{generate_instance, Instance, InstanceKind};
pub use report::{render_markdown, CheckSummary, SectionSummary, SuiteReport, Witness, REPORT_VERSION};
pub use generate::GENERATOR_VERSION;

/// Suite names accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: [&str; 12] = [
    "core",
    "numbers",
    "gauge",
    "linear",
    "embedding",
    "baire",
    "ubp",
    "heine_borel",
    "eberlein_smulian",
    "amir_lindenstrauss",
    "l2_duality",
    "cauchy_schwarz",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    pub atoms: usize,
    pub seed: u64,
    pub tol: f64,
    pub trunc: usize,
    pub cases: usize,
    /// Upper bound on per-atom dimensions; suites also apply their own caps.
    pub dim_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { suite: "all".into(), atoms: 2, seed: 0, tol: 1e-9, trunc: 40, cases: 1000, dim_cap: 5 }
    }
}

impl SuiteConfig {
    pub fn named(suite: &str) -> Self {
        Self { suite: suite.into(), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.atoms == 0 || self.atoms > condan::algebra::DEFAULT_MAX_ATOMS {
            return Err(HarnessError::InvalidConfig(format!(
                "atoms must be between 1 and {}, got {}",
                condan::algebra::DEFAULT_MAX_ATOMS,
                self.atoms
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(HarnessError::InvalidConfig(format!("tol must be a positive number, got {}", self.tol)));
        }
        if self.trunc == 0 {
            return Err(HarnessError::InvalidConfig("trunc must be at least 1".into()));
        }
        if self.dim_cap == 0 {
            return Err(HarnessError::InvalidConfig("dim_cap must be at least 1".into()));
        }
        Ok(())
    }

    /// `min(dim_cap, cap)`.
    pub fn dims(&self, cap: usize) -> usize {
        self.dim_cap.min(cap).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}` (expected one of: {list}, or all)", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("instance generation failed: {0}")]
    GenerationFailed(String),
    #[error(transparent)]
    Engine(#[from] condan::Error),
}

/// Expands `all` or a comma-separated list of suite names.
pub fn expand_suites(list: &str) -> Result<Vec<&'static str>, HarnessError> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name == "all" {
            out.extend(SUITES);
            continue;
        }
        let known = SUITES.iter().find(|s| **s == name).ok_or_else(|| HarnessError::UnknownSuite(name.into()))?;
        out.push(*known);
    }
    if out.is_empty() {
        return Err(HarnessError::UnknownSuite(list.into()));
    }
    out.dedup();
    Ok(out)
}

/// Runs the suite named in `config.suite`.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, HarnessError> {
    config.validate()?;
    let sections = suites::sections(config)?;
    Ok(case::run_sections(config, sections, None))
}

/// Re-runs a single case of a suite, as identified by a witness.
pub fn replay_case(config: &SuiteConfig, section: &str, index: usize) -> Result<SuiteReport, HarnessError> {
    config.validate()?;
    let sections = suites::sections(config)?;
    if !sections.iter().any(|s| s.name == section) {
        return Err(HarnessError::InvalidConfig(format!("suite {} has no section `{section}`", config.suite)));
    }
    Ok(case::run_sections(config, sections, Some((section, index))))
}
