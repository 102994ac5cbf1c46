//! The renorming pipeline `B_n = 2ⁿK + 2⁻ⁿB_E`, `‖x‖_C² = Σ_n ‖x‖_n²`:
//! gauge decay on the vertices of `K`, the `1/3` bound, `K ⊆ C`, compactness
//! of `C`, and extraction from a sequence in the dual ball of `C`.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::analysis::{compactness_check, extract_convergent_subsequence, CompactCandidate, CondSequence};
use condan::io::Object;
use condan::linear::{body_inclusion, renorm_bodies, renorm_sequence, AtomBody, Facet, PNorm, SymmetricBody};
use condan::{CondVector, Condition};

use crate::case::{Case, Section};
use crate::generate::{doc, gen_renorm_pair, random_nonzero, sample_in_body, Instance, SEQUENCE_TERMS};
use crate::SuiteConfig;

/// Instances per configured case are `1 / CASE_DIVISOR`.
pub const CASE_DIVISOR: usize = 50;
/// Bodies `B_n` checked against `2⁻ⁿ`.
pub const DECAY_LEVELS: usize = 20;
pub const DECAY_SLACK: f64 = 1e-9;
pub const SUM_BOUND: f64 = 1.0 / 3.0;
pub const SUM_SLACK: f64 = 1e-6;
const INTERIOR_SAMPLES: usize = 10;
pub const REFERENCE_NORM: f64 = 0.48547;
pub const REFERENCE_NORM_TOL: f64 = 1e-4;
pub const REFERENCE_SUM: f64 = 0.235687;
pub const REFERENCE_SUM_TOL: f64 = 1e-5;

/// `Σ_{n=1}^{60} (2ⁿ + 2⁻ⁿ)⁻²`, the squared `C`-norm of `1` for
/// `K = B_E = [-1, 1]`; the omitted tail is below `4⁻⁶⁰`.
pub fn reference_sum() -> f64 {
    (1..=60).map(|n| (2f64.powi(n) + 2f64.powi(-n)).powi(-2)).sum()
}

/// `x` per atom from a per-atom list, cycling through shorter lists.
fn cycle(on: &Condition, lists: &[(usize, Vec<Vec<f64>>)], i: usize) -> CondVector {
    CondVector::from_fn(on, |t| {
        let l = &lists.iter().find(|(u, _)| *u == t).expect("atom of on").1;
        l[i % l.len()].clone()
    })
}

fn pipeline_case(case: &mut Case, m: usize, cap: usize, kmax: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let Some(inst) = case.generate(|rng| gen_renorm_pair(rng, alg, cap)) else { return };
    case.instance(inst.to_json());
    let Instance::RenormPair { k, unit_ball } = inst else { unreachable!("renorm pair generator") };
    let Some(bodies) = case.ok("renorm_bodies", renorm_bodies(&k, &unit_ball, DECAY_LEVELS.max(kmax))) else { return };
    let Some(vertices) = case.ok("vertices", k.iter().map(|(t, b)| b.vertices().map(|v| (t, v))).collect::<Result<Vec<_>, _>>()) else {
        return;
    };

    // ‖v‖_n ≤ 2⁻ⁿ on the vertices of K
    let mut decay = 0.0f64;
    for (n, b) in bodies.iter().take(DECAY_LEVELS).enumerate() {
        let bound = 2f64.powi(-(n as i32 + 1));
        for (t, vs) in &vertices {
            for v in vs {
                decay = decay.max(b.at(*t).gauge(v) - bound);
            }
        }
    }
    case.measure("gauge_decay", decay, DECAY_SLACK);

    // Σ_n ‖x‖_n² ≤ 1/3 over the vertices and interior samples of K
    let rounds = vertices.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut points: Vec<CondVector> = (0..rounds).map(|i| cycle(&one, &vertices, i)).collect();
    points.extend((0..INTERIOR_SAMPLES).map(|_| CondVector::from_fn(&one, |t| sample_in_body(&mut case.rng, k.at(t)))));
    let mut excess = 0.0f64;
    for x in &points {
        let Some(r) = case.ok("renorm_sequence", renorm_sequence(&k, &unit_ball, x, kmax)) else { return };
        case.require("sum_bound_ok", r.sum_bound_ok.is_one(), || format!("sum bound fails off {}", r.sum_bound_ok));
        excess = excess.max(r.sum_squares.add(&r.tail_bound).expect("same on").max_value() - SUM_BOUND);
    }
    case.measure("sum_bound", excess, SUM_SLACK);

    // K ⊆ 2⁻ⁿB_n for every n, hence ‖x‖_C² ≤ Σ 4⁻ⁿ = 1/3 on K
    for (n, b) in bodies.iter().take(DECAY_LEVELS).enumerate() {
        let Some(scaled) = case.ok("scale", b.try_map(|_, a| a.scaled(2f64.powi(-(n as i32 + 1))))) else { return };
        let Some(inc) = case.ok("body_inclusion", body_inclusion(&k, &scaled)) else { return };
        case.require("k_inside_c", inc.is_one(), || format!("K ⊄ 2^-{}·B_{} off {inc}", n + 1, n + 1));
    }

    // C ⊆ B_1 since ‖x‖_C ≥ ‖x‖_1, and C is closed
    let Some(c_compact) = case.ok("compactness_check", compactness_check(&CompactCandidate::Body(bodies[0].clone()))) else { return };
    case.require("c_compact", c_compact.is_one(), || format!("B_1 bounded only on {c_compact}"));

    // f/h_{B_1}(f) lies in the dual ball of C, whose coordinates satisfy |f_i| ≤ ‖e_i‖_C
    let mut half = Vec::new();
    for (t, b) in k.iter() {
        let mut w = Vec::with_capacity(b.dim());
        for i in 0..b.dim() {
            let e = CondVector::from_fn(&one, |s| {
                let d = k.at(s).dim();
                let mut e = vec![0.0; d];
                e[i.min(d - 1)] = 1.0;
                e
            });
            let Some(r) = case.ok("renorm_sequence", renorm_sequence(&k, &unit_ball, &e, kmax)) else { return };
            w.push(*r.norm_c.at(t) * (1.0 + 1e-9));
        }
        half.push((t, w));
    }
    let region = SymmetricBody::from_fn(&one, |t| {
        let w = &half.iter().find(|(u, _)| *u == t).expect("atom").1;
        let facets = (0..w.len())
            .map(|i| {
                let mut u = vec![0.0; w.len()];
                u[i] = 1.0;
                Facet { u, c: w[i] }
            })
            .collect();
        AtomBody::new(w.len(), facets).expect("positive half-widths")
    });
    let mut terms = Vec::with_capacity(SEQUENCE_TERMS);
    for _ in 0..SEQUENCE_TERMS {
        let mut f = Vec::new();
        for t in one.atoms() {
            let g = random_nonzero(&mut case.rng, k.at(t).dim(), 1.0);
            let Some(h) = case.ok("support", bodies[0].at(t).support(&g)) else { return };
            let s = case.rng.random_range(0.0..=1.0) / h;
            f.push((t, g.into_iter().map(|a| a * s).collect::<Vec<_>>()));
        }
        terms.push(CondVector::new(one.clone(), f.into_iter().collect()).expect("every atom"));
    }
    let seq = CondSequence::Table(terms);
    let Some(sub) = case.ok("dual_ball_extraction", extract_convergent_subsequence(&seq, &region, SEQUENCE_TERMS)) else { return };
    let mut ok = !sub.indices.is_empty();
    let mut excess = 0.0f64;
    for (j, n) in sub.indices.iter().enumerate() {
        for t in one.atoms() {
            ok &= j == 0 || sub.indices[j - 1].at(t) < n.at(t);
            let x = seq.term_at(n.at(t) as usize, t).expect("index in range");
            let d = PNorm::L2.eval(&x.iter().zip(sub.limit.at(t)).map(|(a, b)| a - b).collect::<Vec<_>>());
            excess = excess.max(d - sub.error_bounds[j].at(t));
        }
    }
    case.require("dual_indices_increasing", ok, || "indices not strictly increasing".into());
    case.measure("dual_error_bound", excess, 1e-12);
}

fn reference_case(case: &mut Case, m: usize, kmax: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let interval = AtomBody::cube(1, 1.0).expect("unit interval");
    let k = SymmetricBody::constant(&one, interval.clone());
    let x = CondVector::constant(&one, vec![1.0]);
    case.instance(json!({"k": doc(alg, Object::Body(k.clone())), "unit_ball": doc(alg, Object::Body(k.clone())), "x": [1.0], "kmax": kmax}));
    let Some(r) = case.ok("renorm_sequence", renorm_sequence(&k, &k, &x, kmax)) else { return };
    let oracle = reference_sum();
    let gauges = r
        .gauges
        .iter()
        .enumerate()
        .map(|(n, g)| {
            let e = 1.0 / (2f64.powi(n as i32 + 1) + 2f64.powi(-(n as i32 + 1)));
            (g.max_value() - e).abs() / e
        })
        .fold(0.0, f64::max);
    case.measure("reference_gauges", gauges, 1e-12);
    let sum = r.sum_squares.max_value();
    case.measure("reference_sum", (sum - REFERENCE_SUM).abs(), REFERENCE_SUM_TOL);
    case.measure("reference_norm", (r.norm_c.max_value() - REFERENCE_NORM).abs(), REFERENCE_NORM_TOL);
    // truncation within the certified 4^-K tail
    case.measure("reference_tail", (oracle - sum).abs() - r.tail_bound.max_value(), 1e-15);
    case.require("reference_sum_bound", r.sum_bound_ok.is_one(), || format!("sum {sum} above 1/3"));
    case.note("sum_squares", json!(sum));
    case.note("norm_c", json!(r.norm_c.max_value()));
    let Some(bodies) = case.ok("renorm_bodies", renorm_bodies(&k, &k, DECAY_LEVELS)) else { return };
    for (n, b) in bodies.iter().enumerate() {
        let Some(scaled) = case.ok("scale", b.try_map(|_, a| a.scaled(2f64.powi(-(n as i32 + 1))))) else { return };
        let Some(inc) = case.ok("body_inclusion", body_inclusion(&k, &scaled)) else { return };
        case.require("reference_k_inside_c", inc.is_one(), || format!("level {} off {inc}", n + 1));
    }
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let m = config.atoms;
    let cap = config.dims(3);
    let kmax = config.trunc;
    vec![
        Section::new("pipeline", config.cases.div_ceil(CASE_DIVISOR), move |case| pipeline_case(case, m, cap, kmax)),
        Section::new("reference", usize::from(config.cases > 0), move |case| reference_case(case, m, kmax)),
    ]
}
