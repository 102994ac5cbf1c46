//! Sequential compactness at desk scale: extraction succeeds for every
//! sequence in a certified-compact region and fails exactly on the planted
//! unbounded atoms; half-norming sets and seminorm metrics from the proof.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::analysis::{compactness_check, extract_convergent_subsequence, seminorm_metric, CompactCandidate, CondSequence};
use condan::io::Object;
use condan::linear::{dot, half_norming_set, max_pairing, AtomNorm, CondNorm, PNorm, SymmetricBody};
use condan::{CondVector, Error};

use crate::case::{Case, Section};
use crate::generate::{doc, gen_dense_points, random_atom_body, random_pnorm, random_vector, sample_in_body, slab, SEQUENCE_TERMS};
use crate::SuiteConfig;

/// Instances per configured case are `1 / CASE_DIVISOR`.
pub const CASE_DIVISOR: usize = 5;
pub const SEQUENCES_PER_INSTANCE: usize = 20;
pub const Y_PER_CASE: usize = 5;
pub const HALF_NORMING_SLACK: f64 = 1e-9;
pub const METRIC_TOL: f64 = 1e-12;
const PLANT_PROBABILITY: f64 = 0.3;

/// `x_k = k·v`, escaping along an unbounded direction of the region.
fn escaping_term(v: &[f64], k: usize) -> Vec<f64> {
    v.iter().map(|a| a * k as f64).collect()
}

fn equivalence_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let mut planted = Vec::new();
    let region = SymmetricBody::from_fn(&one, |t| {
        let d = case.rng.random_range(1..=cap);
        if case.rng.random_bool(PLANT_PROBABILITY) {
            planted.push(t);
            slab(&mut case.rng, d)
        } else {
            random_atom_body(&mut case.rng, d, 0.5, 2.0)
        }
    });
    let planted = alg.condition(planted).expect("atoms in range");
    case.instance(json!({"region": doc(alg, Object::Body(region.clone())), "planted_unbounded": planted.to_string()}));
    let Some(certified) = case.ok("compactness_check", compactness_check(&CompactCandidate::Body(region.clone()))) else { return };
    case.require("hypotheses", certified == planted.complement(), || format!("certified {certified}, planted {planted}"));

    for s in 0..SEQUENCES_PER_INSTANCE {
        let dirs = region.map(|_, b| b.unbounded_direction());
        let terms: Vec<CondVector> = (1..=SEQUENCE_TERMS)
            .map(|k| {
                CondVector::from_fn(&one, |t| match dirs.at(t) {
                    Some(v) => escaping_term(v, k),
                    None => sample_in_body(&mut case.rng, region.at(t)),
                })
            })
            .collect();
        let seq = CondSequence::Table(terms);
        let outcome = extract_convergent_subsequence(&seq, &region, SEQUENCE_TERMS);
        if s == 0 {
            // per atom: success exactly on the certified atoms
            for t in one.atoms() {
                let atom = alg.atom(t).expect("atom in range");
                let seq_t = match &seq {
                    CondSequence::Table(ts) => CondSequence::Table(ts.iter().map(|x| x.restrict(&atom).expect("below one")).collect()),
                    CondSequence::Formula(_) => unreachable!("table sequence"),
                };
                let ok = extract_convergent_subsequence(&seq_t, &region.restrict(&atom).expect("below one"), SEQUENCE_TERMS).is_ok();
                case.require("compact_iff_extracts", ok == certified.contains(t), || format!("atom {t}: extraction {ok}"));
            }
        }
        match outcome {
            Ok(sub) => {
                case.require("planted_raises", planted.is_zero(), || format!("extraction succeeded despite planted {planted}"));
                if sub.indices.is_empty() {
                    case.require("indices_increasing", false, || "empty subsequence".into());
                    continue;
                }
                let mut increasing = true;
                let mut excess = 0.0f64;
                for (k, n) in sub.indices.iter().enumerate() {
                    for t in one.atoms() {
                        let i = n.at(t) as usize;
                        if i == 0 || i > SEQUENCE_TERMS || (k > 0 && sub.indices[k - 1].at(t) >= n.at(t)) {
                            increasing = false;
                            continue;
                        }
                        let x = seq.term_at(i, t).expect("index in range");
                        let d = PNorm::L2.eval(&x.iter().zip(sub.limit.at(t)).map(|(a, b)| a - b).collect::<Vec<_>>());
                        excess = excess.max(d - sub.error_bounds[k].at(t));
                    }
                }
                case.require("indices_increasing", increasing, || "indices not strictly increasing".into());
                case.measure("error_bound_honored", excess, METRIC_TOL);
            }
            Err(Error::UnboundedOnCondition(c)) => {
                case.require("raises_exactly_on_planted", c == planted, || format!("raised on {c}, planted {planted}"));
            }
            Err(e) => case.require("raises_exactly_on_planted", false, || format!("unexpected error: {e}")),
        }
    }
}

fn half_norming_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let Some(span) = case.generate(|rng| gen_dense_points(rng, alg, cap)) else { return };
    case.instance(json!({"spanning": span.iter().map(|v| doc(alg, Object::Vector(v.clone()))).collect::<Vec<_>>()}));
    let Some(family) = case.ok("half_norming_set", half_norming_set(&span)) else { return };
    let unit = family.iter().flat_map(|(_, fs)| fs.iter().map(|f| (dot(f, f).sqrt() - 1.0).abs())).fold(0.0, f64::max);
    case.measure("functionals_unit", unit, METRIC_TOL);
    for _ in 0..Y_PER_CASE {
        let coef: Vec<f64> = random_vector(&mut case.rng, span.len(), 3.0);
        let y = CondVector::from_fn(&alg.one(), |t| {
            let mut y = vec![0.0; span[0].at(t).len()];
            for (c, v) in coef.iter().zip(&span) {
                for (a, b) in y.iter_mut().zip(v.at(t)) {
                    *a += c * b;
                }
            }
            y
        });
        let Some(mp) = case.ok("max_pairing", max_pairing(&family, &y)) else { return };
        let v = y.iter().map(|(t, y)| PNorm::L2.eval(y) / 2.0 - mp.at(t)).fold(0.0, f64::max);
        case.measure("half_norming", v, HALF_NORMING_SLACK);
    }
}

fn metric_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let Some(fs) = case.generate(|rng| gen_dense_points(rng, alg, cap)) else { return };
    let nrm = CondNorm::from_fn(&one, |_| AtomNorm::P(random_pnorm(&mut case.rng)));
    let dims: Vec<(usize, usize)> = fs[0].iter().map(|(t, v)| (t, v.len())).collect();
    let point = |case: &mut Case| CondVector::from_fn(&one, |t| random_vector(&mut case.rng, dims.iter().find(|d| d.0 == t).expect("atom").1, 3.0));
    let (x, y, z) = (point(case), point(case), point(case));
    case.instance(json!({
        "functionals": fs.iter().map(|v| doc(alg, Object::Vector(v.clone()))).collect::<Vec<_>>(),
        "norm": doc(alg, Object::Norm(nrm.clone())),
        "x": doc(alg, Object::Vector(x.clone())),
        "y": doc(alg, Object::Vector(y.clone())),
        "z": doc(alg, Object::Vector(z.clone())),
    }));
    let Some(sm) = case.ok("seminorm_metric", seminorm_metric(&fs, &nrm)) else { return };
    let d = |a: &CondVector, b: &CondVector| sm.metric.distance(a, b).expect("same on and dimensions");
    let (dxy, dyx, dyz, dxz, dxx) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z), d(&x, &x));
    let mut identity = 0.0f64;
    let mut symmetry = 0.0f64;
    let mut triangle = 0.0f64;
    for t in one.atoms() {
        identity = identity.max(dxx.at(t).abs());
        symmetry = symmetry.max((dxy.at(t) - dyx.at(t)).abs());
        triangle = triangle.max(dxz.at(t) - dxy.at(t) - dyz.at(t));
    }
    case.measure("metric_identity", identity, METRIC_TOL);
    case.measure("metric_symmetry", symmetry, METRIC_TOL);
    case.measure("metric_triangle", triangle, METRIC_TOL);
    let not_total = sm.warning.as_ref().map(|w| w.on.clone()).unwrap_or_else(|| alg.zero());
    // separation on total atoms: the random points differ almost surely
    let separated = one.atoms().filter(|t| !not_total.contains(*t)).all(|t| *dxy.at(t) > 0.0 || x.at(t) == y.at(t));
    case.require("metric_separation", separated, || format!("d(x, y) = 0 on a total atom, {:?}", dxy.values()));
    if let Some(w) = &sm.warning {
        let annihilated = w.witness.iter().all(|(t, v)| {
            PNorm::L2.eval(v) > 0.5 && sm.metric.atom_distance(t, v, &vec![0.0; v.len()]).is_ok_and(|r| r <= METRIC_TOL)
        });
        case.require("non_total_witness", annihilated, || format!("witness not annihilated on {}", w.on));
    }
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let m = config.atoms;
    let cap = config.dims(3);
    vec![
        Section::new("equivalence", config.cases.div_ceil(CASE_DIVISOR), move |case| equivalence_case(case, m, cap)),
        Section::new("half_norming", config.cases, move |case| half_norming_case(case, m, cap)),
        Section::new("seminorm_metric", config.cases, move |case| metric_case(case, m, cap)),
    ]
}
