//! Cauchy-Schwarz for conditional series truncated at `trunc`, with terms
//! `a_k = α·s_k/k` (`|s_k| ≤ 1`), whose square tails are at most `α²/K`.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::numbers::{cauchy_schwarz_eval, SquareTails};
use condan::CondReal;

use crate::case::{Case, Section};
use crate::suites::rel_diff;
use crate::SuiteConfig;

/// Random series per configured case.
pub const SERIES_PER_CASE: usize = 10;
/// Relative slack of the inequality.
pub const CS_SLACK: f64 = 1e-12;
/// Relative tolerance of the equality case `b = λa`.
pub const EQUALITY_TOL: f64 = 1e-9;

struct Series {
    a: Vec<CondReal>,
    b: Vec<CondReal>,
    tails: SquareTails,
}

fn harmonic_series(case: &mut Case, alg: Algebra, k: usize, lambda: Option<f64>) -> Series {
    let one = alg.one();
    let alpha = CondReal::from_fn(&one, |_| if case.rng.random_bool(0.1) { 0.0 } else { case.rng.random_range(-5.0..5.0) });
    let beta = CondReal::from_fn(&one, |_| case.rng.random_range(-5.0..5.0));
    let a: Vec<CondReal> =
        (1..=k).map(|n| alpha.map(|_, c| c * case.rng.random_range(-1.0..1.0) / n as f64)).collect();
    let b: Vec<CondReal> = match lambda {
        Some(l) => a.iter().map(|x| x.scale(l)).collect(),
        None => (1..=k).map(|n| beta.map(|_, c| c * case.rng.random_range(-1.0..1.0) / n as f64)).collect(),
    };
    let b_coef = match lambda {
        Some(l) => alpha.scale(l),
        None => beta,
    };
    // Σ_{n>K} 1/n² ≤ 1/K
    let tails = SquareTails {
        a: alpha.map(|_, c| c * c / k as f64),
        b: b_coef.map(|_, c| c * c / k as f64),
    };
    Series { a, b, tails }
}

fn series_json(s: &Series) -> serde_json::Value {
    json!({
        "a": s.a.iter().map(|x| x.values()).collect::<Vec<_>>(),
        "b": s.b.iter().map(|x| x.values()).collect::<Vec<_>>(),
    })
}

fn oracle(s: &Series, t: usize) -> (f64, f64) {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in s.a.iter().zip(&s.b) {
        let (x, y) = (x.at(t), y.at(t));
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    (ab * ab, aa * bb)
}

fn series_case(case: &mut Case, m: usize, k: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let s = harmonic_series(case, alg, k, None);
    case.instance(series_json(&s));
    let Some(cs) = case.ok("cauchy_schwarz_eval", cauchy_schwarz_eval(&s.a, &s.b, k, Some(&s.tails), CS_SLACK)) else {
        return;
    };
    case.measure("cs_inequality", cs.relative_excess.max_value().max(0.0), CS_SLACK);
    case.require("cs_holds", cs.holds, || format!("fails off {}", cs.holds_condition));
    let v = cs
        .lhs
        .iter()
        .map(|(t, l)| {
            let (lo, ro) = oracle(&s, t);
            rel_diff(*l, lo).max(rel_diff(*cs.rhs.at(t), ro))
        })
        .fold(0.0, f64::max);
    case.measure("cs_oracle_sums", v, CS_SLACK);
}

fn equality_case(case: &mut Case, m: usize, k: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let lambda = case.rng.random_range(-4.0..4.0);
    let s = harmonic_series(case, alg, k, Some(lambda));
    case.instance(json!({"lambda": lambda, "series": series_json(&s)}));
    let Some(cs) = case.ok("cauchy_schwarz_eval", cauchy_schwarz_eval(&s.a, &s.b, k, Some(&s.tails), CS_SLACK)) else {
        return;
    };
    let v = cs.lhs.iter().map(|(t, l)| rel_diff(*l, *cs.rhs.at(t))).fold(0.0, f64::max);
    case.measure("cs_equality", v, EQUALITY_TOL);
    case.require("cs_holds", cs.holds, || format!("fails off {}", cs.holds_condition));
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let (m, k) = (config.atoms, config.trunc);
    vec![
        Section::new("series", SERIES_PER_CASE * config.cases, move |case| series_case(case, m, k)),
        Section::new("equality", config.cases, move |case| equality_case(case, m, k)),
    ]
}
