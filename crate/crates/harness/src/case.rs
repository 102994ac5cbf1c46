//! Per-case check recording and the parallel section driver.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::report::{CheckSummary, SectionSummary, SuiteReport, Witness, MAX_WITNESSES};
use crate::SuiteConfig;

/// One named group of cases inside a suite.
pub struct Section<'a> {
    pub name: &'static str,
    pub cases: usize,
    pub run: Box<dyn Fn(&mut Case) + Sync + 'a>,
}

impl<'a> Section<'a> {
    pub fn new(name: &'static str, cases: usize, run: impl Fn(&mut Case) + Sync + 'a) -> Self {
        Self { name, cases, run: Box::new(run) }
    }
}

#[derive(Debug, Clone)]
struct Record {
    check: &'static str,
    violation: f64,
    tolerance: f64,
    passed: bool,
    detail: Option<String>,
}

/// State of one case: its RNG stream and the checks it has recorded.
pub struct Case {
    pub index: usize,
    pub rng: ChaCha8Rng,
    records: Vec<Record>,
    instance: Value,
}

impl Case {
    pub fn new(seed: u64, index: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        Self { index, rng, records: Vec::new(), instance: Value::Null }
    }

    /// Attaches the serialized instance reported with any failure.
    pub fn instance(&mut self, v: Value) {
        self.instance = v;
    }

    /// Adds a field to the serialized instance.
    pub fn note(&mut self, key: &str, v: Value) {
        if !self.instance.is_object() {
            self.instance = Value::Object(Default::default());
        }
        self.instance[key] = v;
    }

    /// Records a measured violation; the check passes when it is at most `tolerance`.
    pub fn measure(&mut self, check: &'static str, violation: f64, tolerance: f64) {
        let passed = violation <= tolerance;
        let violation = if violation.is_finite() { violation.max(0.0) } else { f64::MAX };
        self.records.push(Record { check, violation, tolerance, passed, detail: None });
    }

    /// Like [`Case::measure`] with an explanation kept on failure.
    pub fn measure_with(&mut self, check: &'static str, violation: f64, tolerance: f64, detail: impl FnOnce() -> String) {
        self.measure(check, violation, tolerance);
        if !self.records.last().expect("just pushed").passed {
            self.records.last_mut().expect("just pushed").detail = Some(detail());
        }
    }

    /// Records a yes/no property (violation 1 on failure, tolerance 0).
    pub fn require(&mut self, check: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.records.push(Record {
            check,
            violation: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: ok,
            detail: if ok { None } else { Some(detail()) },
        });
    }

    /// Unwraps an engine result, recording a failure of `check` on error.
    pub fn ok<T, E: std::fmt::Display>(&mut self, check: &'static str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.require(check, false, || format!("unexpected error: {e}"));
                None
            }
        }
    }

    /// Draws an instance from the case stream; a failed draw is recorded
    /// under `generation`.
    pub fn generate<T, E: std::fmt::Display>(&mut self, f: impl FnOnce(&mut ChaCha8Rng) -> Result<T, E>) -> Option<T> {
        let r = f(&mut self.rng);
        self.ok("generation", r)
    }

    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| !r.passed)
    }
}

struct Outcome {
    index: usize,
    records: Vec<Record>,
    instance: Value,
}

fn run_case(section: &Section<'_>, seed: u64, index: usize) -> Outcome {
    let mut case = Case::new(seed, index);
    let res = catch_unwind(AssertUnwindSafe(|| (section.run)(&mut case)));
    if let Err(p) = res {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        case.require("no_panic", false, || msg);
    }
    Outcome { index, records: case.records, instance: case.instance }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Seed of a section's RNG streams; case `i` uses stream `i`.
pub fn section_seed(config: &SuiteConfig, section: &str) -> u64 {
    config.seed ^ fnv1a(&config.suite) ^ fnv1a(section).rotate_left(17)
}

pub(crate) fn run_sections(config: &SuiteConfig, sections: Vec<Section<'_>>, only: Option<(&str, usize)>) -> SuiteReport {
    let start = Instant::now();
    let mut checks: BTreeMap<String, CheckSummary> = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut omitted = 0;
    let mut summaries = Vec::new();
    let (mut cases, mut failed) = (0, 0);
    for section in &sections {
        let indices: Vec<usize> = match only {
            Some((name, i)) if name == section.name => vec![i],
            Some(_) => continue,
            None => (0..section.cases).collect(),
        };
        let t0 = Instant::now();
        let seed = section_seed(config, section.name);
        let outcomes: Vec<Outcome> = indices.par_iter().map(|i| run_case(section, seed, *i)).collect();
        let mut section_failed = 0;
        for o in outcomes {
            let mut case_failed = false;
            for r in &o.records {
                let s = checks.entry(r.check.to_string()).or_default();
                s.count += 1;
                s.max_violation = s.max_violation.max(r.violation);
                s.tolerance = s.tolerance.max(r.tolerance);
                if !r.passed {
                    s.failed += 1;
                    case_failed = true;
                    if witnesses.len() < MAX_WITNESSES {
                        witnesses.push(Witness {
                            section: section.name.to_string(),
                            case: o.index,
                            check: r.check.to_string(),
                            violation: r.violation,
                            tolerance: r.tolerance,
                            detail: r.detail.clone(),
                            instance: o.instance.clone(),
                        });
                    } else {
                        omitted += 1;
                    }
                }
            }
            section_failed += case_failed as usize;
        }
        cases += indices.len();
        failed += section_failed;
        summaries.push(SectionSummary {
            name: section.name.to_string(),
            cases: indices.len(),
            failed: section_failed,
            runtime_ms: t0.elapsed().as_millis() as u64,
        });
    }
    let max_violation = checks.values().map(|c| c.max_violation).fold(0.0, f64::max);
    let tolerance = checks.values().map(|c| c.tolerance).fold(0.0, f64::max);
    SuiteReport {
        report_version: crate::report::REPORT_VERSION,
        generator_version: crate::generate::GENERATOR_VERSION,
        suite: config.suite.clone(),
        config: config.clone(),
        cases,
        passed: cases - failed,
        failed,
        max_violation,
        tolerance,
        checks,
        sections: summaries,
        witnesses,
        witnesses_omitted: omitted,
        runtime_ms: start.elapsed().as_millis() as u64,
    }
}
