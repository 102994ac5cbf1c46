//! Acceptance gate: runs `condan run --suite all --atoms 3 --seed 42` twice
//! and grades every criterion against the first report, one line each.
//! Runs without the libtest harness so the lines are always shown.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use condan_harness::suites::linear::Z_PER_CASE;
use condan_harness::SuiteReport;

/// `(suite, check, minimum count, stated tolerance)`.
type CheckReq = (&'static str, &'static str, usize, f64);

struct Criterion {
    name: &'static str,
    checks: &'static [CheckReq],
    /// `(suite, section, minimum cases)`; their runtimes are summed.
    sections: &'static [(&'static str, &'static str, usize)],
    limit: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        name: "stable hull equals exhaustive concatenation closure",
        checks: &[("core", "hull_oracle", 1, 0.0)],
        sections: &[("core", "hull_oracle", 1)],
        limit: secs(5),
    },
    Criterion {
        name: "conditional power-set Boolean laws",
        checks: &[
            ("core", "de_morgan", 1000, 0.0),
            ("core", "distributivity", 1000, 0.0),
            ("core", "complementation", 1000, 0.0),
        ],
        sections: &[("core", "boolean_laws", 1000)],
        limit: secs(2),
    },
    Criterion {
        name: "gauge homogeneity, triangle inequality, bisection oracle",
        checks: &[
            ("gauge", "homogeneity", 10_000, 1e-9),
            ("gauge", "triangle", 10_000, 1e-9),
            ("gauge", "bisection_agreement", 1000, 1e-9),
        ],
        sections: &[("gauge", "laws", 10_000), ("gauge", "bisection", 1000)],
        limit: secs(10),
    },
    Criterion {
        name: "Cauchy-Schwarz on truncated series",
        checks: &[("cauchy_schwarz", "cs_inequality", 10_000, 1e-12), ("cauchy_schwarz", "cs_equality", 1, 1e-9)],
        sections: &[("cauchy_schwarz", "series", 10_000), ("cauchy_schwarz", "equality", 1)],
        limit: secs(5),
    },
    Criterion {
        name: "isometric imbedding and bidual norm",
        checks: &[
            ("embedding", "isometry", 1000, 1e-6),
            ("embedding", "norming_attains", 1000, 1e-12),
            ("embedding", "bidual_norm", 1, 1e-6),
            ("embedding", "reflexive", 1, 0.0),
        ],
        sections: &[("embedding", "isometry", 1000), ("embedding", "bidual", 1)],
        limit: secs(5),
    },
    Criterion {
        name: "Baire category locate",
        checks: &[("baire", "ball_inside_set", 100, 0.0)],
        sections: &[("baire", "locate", 100)],
        limit: secs(10),
    },
    Criterion {
        name: "uniform boundedness over the stable hull",
        checks: &[("ubp", "hull_sup_exact", 1, 0.0), ("ubp", "hull_sample_bound", 1000, 1e-9)],
        sections: &[("ubp", "family", 1)],
        limit: secs(5),
    },
    Criterion {
        name: "Heine-Borel against finite-subcover extraction",
        checks: &[("heine_borel", "compact_iff_subcover", 100, 0.0), ("heine_borel", "hypotheses", 100, 0.0)],
        sections: &[("heine_borel", "subcover", 100)],
        limit: secs(5),
    },
    Criterion {
        name: "Eberlein-Smulian extraction and half-norming set",
        checks: &[
            ("eberlein_smulian", "compact_iff_extracts", 200, 0.0),
            ("eberlein_smulian", "indices_increasing", 200, 0.0),
            ("eberlein_smulian", "error_bound_honored", 200, 1e-12),
            ("eberlein_smulian", "planted_raises", 1, 0.0),
            ("eberlein_smulian", "raises_exactly_on_planted", 200, 0.0),
            ("eberlein_smulian", "half_norming", 1000, 1e-9),
        ],
        sections: &[("eberlein_smulian", "equivalence", 200), ("eberlein_smulian", "half_norming", 1000)],
        limit: secs(15),
    },
    Criterion {
        name: "l2 direct sum duality and truncation",
        checks: &[("l2_duality", "pairing_norm_gap", 1000, 1e-6), ("l2_duality", "truncation_within_tail", 1, 1e-12)],
        sections: &[("l2_duality", "duality", 1000), ("l2_duality", "truncation", 1)],
        limit: secs(5),
    },
    Criterion {
        name: "renorming pipeline",
        checks: &[
            ("amir_lindenstrauss", "gauge_decay", 1, 1e-9),
            ("amir_lindenstrauss", "sum_bound", 1, 1e-6),
            ("amir_lindenstrauss", "reference_norm", 1, 1e-4),
            ("amir_lindenstrauss", "reference_sum", 1, 1e-5),
            ("amir_lindenstrauss", "k_inside_c", 1, 0.0),
            ("amir_lindenstrauss", "c_compact", 1, 0.0),
            ("amir_lindenstrauss", "dual_indices_increasing", 1, 0.0),
            ("amir_lindenstrauss", "dual_error_bound", 1, 1e-12),
        ],
        sections: &[("amir_lindenstrauss", "pipeline", 1), ("amir_lindenstrauss", "reference", 1)],
        limit: secs(10),
    },
    Criterion {
        name: "norm equivalence constants",
        checks: &[
            ("linear", "lower_constant", 10_000 / Z_PER_CASE, 0.0),
            ("linear", "upper_constant", 10_000 / Z_PER_CASE, 0.0),
            ("linear", "reference_r_low", 1, 1e-3),
            ("linear", "reference_r_high", 1, 1e-6),
        ],
        sections: &[("linear", "equivalence", 10_000 / Z_PER_CASE), ("linear", "reference", 1)],
        limit: secs(5),
    },
];

fn grade(c: &Criterion, reports: &[SuiteReport]) -> Vec<String> {
    let mut problems = Vec::new();
    let find = |s: &str| reports.iter().find(|r| r.suite == s);
    for &(suite, check, min, tol) in c.checks {
        let Some(k) = find(suite).and_then(|r| r.checks.get(check)) else {
            problems.push(format!("{suite}/{check} missing"));
            continue;
        };
        if k.failed > 0 {
            problems.push(format!("{suite}/{check}: {} of {} failed", k.failed, k.count));
        }
        if k.count < min {
            problems.push(format!("{suite}/{check}: {} instances, need {min}", k.count));
        }
        if k.tolerance > tol || k.max_violation > tol {
            problems.push(format!("{suite}/{check}: violation {:e} at tolerance {:e}, stated {tol:e}", k.max_violation, k.tolerance));
        }
    }
    let mut ms = 0;
    for &(suite, section, min) in c.sections {
        let Some(s) = find(suite).and_then(|r| r.sections.iter().find(|s| s.name == section)) else {
            problems.push(format!("{suite}/{section} missing"));
            continue;
        };
        if s.cases < min {
            problems.push(format!("{suite}/{section}: {} cases, need {min}", s.cases));
        }
        ms += s.runtime_ms;
    }
    if Duration::from_millis(ms) >= c.limit {
        problems.push(format!("{ms} ms, limit {:?}", c.limit));
    }
    problems
}

fn run_all(report: &Path) -> (bool, Duration) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_condan"))
        .args(["run", "--suite", "all", "--atoms", "3", "--seed", "42", "--report"])
        .arg(report)
        .stdout(Stdio::null())
        .status()
        .expect("spawn condan");
    (status.success(), start.elapsed())
}

fn load(path: &Path) -> Vec<SuiteReport> {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report written")).expect("report parses")
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let (a, b) = (dir.path().join("first.json"), dir.path().join("second.json"));
    let (ok1, elapsed) = run_all(&a);
    let (ok2, _) = run_all(&b);
    let first = load(&a);
    let second = load(&b);

    let mut failing = Vec::new();
    for c in CRITERIA {
        let problems = grade(c, &first);
        if problems.is_empty() {
            println!("PASS  {}", c.name);
        } else {
            println!("FAIL  {}: {}", c.name, problems.join("; "));
            failing.push(c.name);
        }
    }

    let strip = |rs: &[SuiteReport]| rs.iter().map(SuiteReport::without_timing).collect::<Vec<_>>();
    let same = strip(&first) == strip(&second);
    let e2e = ok1 && ok2 && elapsed < secs(60) && same;
    if e2e {
        println!("PASS  end-to-end run exits 0 in {elapsed:.1?}, rerun identical modulo timing");
    } else {
        println!("FAIL  end-to-end: exit ok {ok1}/{ok2}, {elapsed:.1?}, identical modulo timing {same}");
        failing.push("end-to-end");
    }
    if !failing.is_empty() {
        eprintln!("failing criteria: {failing:?}");
        std::process::exit(1);
    }
}
