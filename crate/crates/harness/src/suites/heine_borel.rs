//! Closed and bounded against the cover definition: per atom, a finite
//! subcover is extracted exactly where `compactness_check` certifies the
//! body, and slabs are rejected.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::analysis::{body_as_closed_set, box_grid, compactness_check, extract_finite_subcover, CompactCandidate, OpenBall};
use condan::io::Object;
use condan::linear::{AtomBody, SymmetricBody};
use condan::{ConditionalValue, Error};

use crate::case::{Case, Section};
use crate::generate::{doc, random_atom_body, random_vector, slab};
use crate::SuiteConfig;

/// Instances per configured case are `1 / CASE_DIVISOR`.
pub const CASE_DIVISOR: usize = 10;
/// Grid resolution of extraction and of the re-check.
pub const RESOLUTION: usize = 20;
const SLAB_PROBABILITY: f64 = 0.3;
const CELLS_PER_HALF_WIDTH: f64 = 4.0;
const DISTRACTORS: usize = 4;

/// Balls centered on a grid of spacing `h` over the bounding box with radius
/// `0.75·h·√d`, so every point of the box is within reach of a center, plus
/// a few far-away distractors.
fn grid_cover<R: Rng + ?Sized>(rng: &mut R, body: &AtomBody) -> Vec<OpenBall> {
    let d = body.dim();
    let mut balls = Vec::new();
    match body.half_widths() {
        Ok(w) => {
            let h = w.iter().copied().fold(0.0, f64::max) / CELLS_PER_HALF_WIDTH;
            let r = 0.75 * h * (d as f64).sqrt();
            let bounds: Vec<(f64, f64)> = w.iter().map(|x| (-x - h, x + h)).collect();
            // per-axis spacing is at most h
            let steps = bounds.iter().map(|(lo, hi)| ((hi - lo) / h).ceil() as usize).max().unwrap_or(1);
            for c in box_grid(&bounds, steps) {
                balls.push(OpenBall { center: c, radius: r });
            }
        }
        // no finite cover exists; offer a generous one anyway
        Err(_) => {
            for c in box_grid(&vec![(-5.0, 5.0); d], 5) {
                balls.push(OpenBall { center: c, radius: 2.0 });
            }
        }
    }
    for _ in 0..DISTRACTORS {
        let c: Vec<f64> = random_vector(rng, d, 1.0).into_iter().map(|x| x + 100.0).collect();
        balls.push(OpenBall { center: c, radius: 1.0 });
    }
    balls
}

fn cover_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let mut planted = Vec::new();
    let body = SymmetricBody::from_fn(&one, |t| {
        let d = case.rng.random_range(1..=cap);
        if case.rng.random_bool(SLAB_PROBABILITY) {
            planted.push(t);
            slab(&mut case.rng, d)
        } else {
            random_atom_body(&mut case.rng, d, 0.5, 2.0)
        }
    });
    let cover = ConditionalValue::from_fn(&one, |t| grid_cover(&mut case.rng, body.at(t)));
    case.instance(json!({
        "body": doc(alg, Object::Body(body.clone())),
        "planted_unbounded": planted,
        "cover": cover
            .iter()
            .map(|(t, bs)| (t.to_string(), json!(bs.iter().map(|b| json!({"center": b.center, "radius": b.radius})).collect::<Vec<_>>())))
            .collect::<serde_json::Map<_, _>>(),
    }));
    let bounded: Vec<usize> = body.iter().filter(|(_, b)| b.is_bounded()).map(|(t, _)| t).collect();
    let expect_planted = one.atoms().filter(|t| !bounded.contains(t)).collect::<Vec<_>>();
    case.require("hypotheses", expect_planted == planted, || format!("planted {planted:?}, unbounded {expect_planted:?}"));

    let Some(certified) = case.ok("compactness_check", compactness_check(&CompactCandidate::Body(body.clone()))) else { return };
    let k = body_as_closed_set(&body);
    for t in one.atoms() {
        let atom = alg.atom(t).expect("atom in range");
        let (kt, ct) = (k.restrict(&atom).expect("atom below one"), cover.restrict(&atom).expect("atom below one"));
        match extract_finite_subcover(&kt, &ct, RESOLUTION) {
            Ok(sel) => {
                case.require("compact_iff_subcover", certified.contains(t), || format!("subcover found on uncertified atom {t}"));
                let idx = sel.at(t);
                let balls = cover.at(t);
                let well_formed = !idx.is_empty() && idx.windows(2).all(|w| w[0] < w[1]) && idx.iter().all(|i| (1..=balls.len()).contains(i));
                case.require("subcover_indices", well_formed, || format!("indices {idx:?} of {} balls on atom {t}", balls.len()));
                if !well_formed {
                    return;
                }
                let set = kt.at(t);
                let bbox = set.bounding_box().expect("bounded atom");
                let uncovered: Vec<Vec<f64>> = box_grid(&bbox, RESOLUTION)
                    .into_iter()
                    .filter(|p| set.contains(p, 1e-12) && !idx.iter().any(|i| balls[i - 1].contains(p)))
                    .collect();
                case.require("subcover_covers", uncovered.is_empty(), || format!("{} uncovered on atom {t}, first {:?}", uncovered.len(), uncovered[0]));
            }
            Err(Error::NotACover { atom, .. }) => {
                case.require("compact_iff_subcover", !certified.contains(t) && atom == t, || {
                    format!("no subcover on certified atom {t} (reported atom {atom})")
                });
            }
            Err(e) => case.require("compact_iff_subcover", false, || format!("unexpected error on atom {t}: {e}")),
        }
    }
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let m = config.atoms;
    let cap = config.dims(2);
    vec![Section::new("subcover", config.cases.div_ceil(CASE_DIVISOR), move |case| cover_case(case, m, cap))]
}
