//! Minkowski gauges of symmetric bodies: seminorm laws, agreement with a
//! bisection over membership, and Minkowski combinations on a grid.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::io::Object;
use condan::linear::{gauge, grid_support, minkowski_combine, AtomBody, DirectionGrid, SymmetricBody};
use condan::CondVector;

use crate::case::{Case, Section};
use crate::generate::{doc, gen_body, grid_body, random_cond_vector, random_dims};
use crate::suites::rel_diff;
use crate::SuiteConfig;

/// (body, x, y, r) instances per configured case.
pub const LAW_INSTANCES_PER_CASE: usize = 10;
const BISECTION_STEPS: usize = 200;

fn body_json(b: &SymmetricBody) -> serde_json::Value {
    doc(b.algebra(), Object::Body(b.clone()))
}

fn vec_json(x: &CondVector) -> serde_json::Value {
    doc(x.algebra(), Object::Vector(x.clone()))
}

fn dims_of(b: &SymmetricBody) -> BTreeMap<usize, usize> {
    b.iter().map(|(t, a)| (t, a.dim())).collect()
}

fn laws_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let Some(body) = case.generate(|rng| gen_body(rng, alg, cap)) else { return };
    let dims = dims_of(&body);
    let one = alg.one();
    let x = random_cond_vector(&mut case.rng, &dims, &one, 3.0);
    let y = random_cond_vector(&mut case.rng, &dims, &one, 3.0);
    let r = case.rng.random_range(-1.0..1.0) * 10f64.powi(case.rng.random_range(-3..=3));
    case.instance(json!({"body": body_json(&body), "x": vec_json(&x), "y": vec_json(&y), "r": r}));
    case.require("hypotheses", body.iter().all(|(_, b)| b.is_bounded()), || "body does not span".into());
    let rx = x.map(|_, v| v.iter().map(|a| r * a).collect::<Vec<_>>());
    let sum = x.zip_with(&y, |_, a, b| a.iter().zip(b).map(|(p, q)| p + q).collect::<Vec<_>>()).expect("same on");
    let (Some(gx), Some(gy), Some(grx), Some(gs)) = (
        case.ok("gauge", gauge(&body, &x)),
        case.ok("gauge", gauge(&body, &y)),
        case.ok("gauge", gauge(&body, &rx)),
        case.ok("gauge", gauge(&body, &sum)),
    ) else {
        return;
    };
    let homog = gx.iter().map(|(t, g)| rel_diff(*grx.at(t), r.abs() * g)).fold(0.0, f64::max);
    case.measure("homogeneity", homog, tol);
    let tri = gs
        .iter()
        .map(|(t, s)| {
            let rhs = gx.at(t) + gy.at(t);
            if rhs == 0.0 {
                *s
            } else {
                (s - rhs) / rhs
            }
        })
        .fold(0.0, f64::max);
    case.measure("triangle", tri, tol);
    case.require("nonnegative", gx.is_nonnegative(), || "negative gauge".into());
}

/// `inf{r : x ∈ rC}` by bisection, membership tested facet by facet.
fn bisection_gauge(body: &AtomBody, x: &[f64]) -> f64 {
    let inside = |r: f64| {
        body.facets().iter().all(|f| f.u.iter().zip(x).map(|(u, v)| u * v).sum::<f64>().abs() <= r * f.c)
    };
    if inside(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while !inside(hi) {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn bisection_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let Some(body) = case.generate(|rng| gen_body(rng, alg, cap)) else { return };
    let x = random_cond_vector(&mut case.rng, &dims_of(&body), &alg.one(), 3.0);
    case.instance(json!({"body": body_json(&body), "x": vec_json(&x)}));
    let Some(g) = case.ok("gauge", gauge(&body, &x)) else { return };
    let v = g.iter().map(|(t, g)| rel_diff(*g, bisection_gauge(body.at(t), x.at(t)))).fold(0.0, f64::max);
    case.measure("bisection_agreement", v, tol);
}

fn minkowski_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let dims = random_dims(&mut case.rng, &one, cap);
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for t in one.atoms() {
        let grid = DirectionGrid::standard(dims[&t], 3 * dims[&t], &mut case.rng);
        a.insert(t, grid_body(&mut case.rng, &grid, 0.5, 2.0));
        b.insert(t, grid_body(&mut case.rng, &grid, 0.5, 2.0));
    }
    let a = SymmetricBody::new(one.clone(), a).expect("bodies on 1");
    let b = SymmetricBody::new(one.clone(), b).expect("bodies on 1");
    let alpha = case.rng.random_range(0.0..3.0);
    let beta = case.rng.random_range(0.1..3.0);
    case.instance(json!({"a": body_json(&a), "b": body_json(&b), "alpha": alpha, "beta": beta}));
    let (Some(c), Some(ha), Some(hb)) = (
        case.ok("minkowski_combine", minkowski_combine(alpha, &a, beta, &b)),
        case.ok("grid_support", grid_support(&a)),
        case.ok("grid_support", grid_support(&b)),
    ) else {
        return;
    };
    let Some(hc) = case.ok("grid_support", grid_support(&c)) else { return };
    let v = hc
        .iter()
        .flat_map(|(t, h)| h.iter().enumerate().map(move |(j, v)| (t, j, *v)))
        .map(|(t, j, v)| rel_diff(v, alpha * ha.at(t)[j] + beta * hb.at(t)[j]))
        .fold(0.0, f64::max);
    case.measure("minkowski_support", v, tol);
    // αA + βB ⊆ C, checked on sums of vertices
    let mut worst = 0.0f64;
    for t in one.atoms() {
        let (Some(va), Some(vb)) = (case.ok("vertices", a.at(t).vertices()), case.ok("vertices", b.at(t).vertices())) else {
            return;
        };
        for p in &va {
            for q in &vb {
                let s: Vec<f64> = p.iter().zip(q).map(|(x, y)| alpha * x + beta * y).collect();
                worst = worst.max(c.at(t).gauge(&s) - 1.0);
            }
        }
    }
    case.measure("minkowski_contains_sum", worst, tol);
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let (m, tol) = (config.atoms, config.tol);
    let cap = config.dims(4);
    let mcap = config.dims(3);
    vec![
        Section::new("laws", LAW_INSTANCES_PER_CASE * config.cases, move |case| laws_case(case, m, cap, tol)),
        Section::new("bisection", config.cases, move |case| bisection_case(case, m, cap, tol)),
        Section::new("minkowski", config.cases, move |case| minkowski_case(case, m, mcap, tol)),
    ]
}
