//! Operator norms, norm equivalence constants on conditionally finitely
//! generated subspaces, and gauge/norm comparison radii of a body.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::json;

use condan::algebra::{make_partition, Algebra};
use condan::conditional::concatenate;
use condan::io::Object;
use condan::linear::{
    banach_disk, dual_norm, equivalence_constants, gauge, norm, operator_norm, pairing, AtomNorm, CondNorm, PNorm,
};
use condan::CondVector;

use crate::case::{Case, Section};
use crate::generate::{doc, gen_body, gen_operator_family, random_cond_vector, random_dims, random_pnorm, random_vector, Instance};
use crate::suites::{oracle_norm, rel_diff};
use crate::SuiteConfig;

pub const X_SAMPLES: usize = 8;
/// Random `z` per configured case in the equivalence section.
pub const Z_PER_CASE: usize = 10;
pub const EQUIVALENCE_SLACK: f64 = 1e-6;
pub const REFERENCE_LOW: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const REFERENCE_LOW_TOL: f64 = 1e-3;
pub const REFERENCE_HIGH_TOL: f64 = 1e-6;
const PAIRING_SLACK: f64 = 1e-12;

fn operator_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let Some(inst) = case.generate(|rng| gen_operator_family(rng, alg, cap)) else { return };
    case.instance(inst.to_json());
    let Instance::OperatorFamily { generators, dom, cod } = inst else { unreachable!("operator family generator") };
    let map = &generators[0];
    let Some(n) = case.ok("operator_norm", operator_norm(map, &dom, &cod)) else { return };

    let mut sampled = 0.0f64;
    for _ in 0..X_SAMPLES {
        let x = CondVector::from_fn(&one, |t| random_vector(&mut case.rng, map.at(t).ncols(), 2.0));
        let Some(y) = case.ok("apply", map.apply(&x)) else { return };
        for (t, v) in y.iter() {
            let rhs = n.at(t) * dom.at(t).eval(x.at(t));
            sampled = sampled.max(cod.at(t).eval(v) - rhs * (1.0 + tol));
        }
    }
    case.measure("sampled_bound", sampled, 0.0);

    // closed forms against the extreme points of the domain ball
    let mut exact = 0.0f64;
    let mut spectral = 0.0f64;
    for (t, mat) in map.iter() {
        let (p, q) = (dom.pnorm_at(t).expect("p-norm"), cod.pnorm_at(t).expect("p-norm"));
        match (p, oracle_norm(mat, p, q)) {
            (PNorm::L1 | PNorm::LInf, Some(o)) => exact = exact.max((o - n.at(t)).abs()),
            (_, Some(o)) => spectral = spectral.max(rel_diff(o, *n.at(t))),
            (_, None) => {}
        }
    }
    case.measure("vertex_brute_force", exact, 0.0);
    case.measure("spectral_svd", spectral, tol);

    // ‖·‖ of a concatenation is the concatenation of the norms
    let other = map.map(|_, mat| mat.map(|_| case.rng.random_range(-2.0..2.0)));
    let assignment: BTreeMap<usize, usize> = one.atoms().map(|t| (t, case.rng.random_range(0..2usize))).collect();
    let part = make_partition(&one, &assignment).expect("labels on every atom");
    let label = |b: &condan::Condition| assignment[&b.smallest_atom().expect("nonzero block")];
    let pick = |i: usize| if i == 0 { map.clone() } else { other.clone() };
    let Some(glued) = case.ok("concatenate", concatenate(&part.blocks().iter().map(|b| pick(label(b))).collect::<Vec<_>>(), &part)) else {
        return;
    };
    let (Some(ng), Some(no)) = (case.ok("operator_norm", operator_norm(&glued, &dom, &cod)), case.ok("operator_norm", operator_norm(&other, &dom, &cod))) else {
        return;
    };
    let stable = ng.iter().all(|(t, v)| *v == if assignment[&t] == 0 { *n.at(t) } else { *no.at(t) });
    case.require("norm_concatenation_stable", stable, || format!("glued {:?}, parts {:?} / {:?}", ng.values(), n.values(), no.values()));

    // |x*(x)| ≤ ‖x*‖_*·‖x‖
    let f = CondVector::from_fn(&one, |t| random_vector(&mut case.rng, map.at(t).ncols(), 2.0));
    let x = CondVector::from_fn(&one, |t| random_vector(&mut case.rng, map.at(t).ncols(), 2.0));
    let (Some(fx), Some(df), Some(nx)) = (case.ok("pairing", pairing(&f, &x)), case.ok("dual_norm", dual_norm(&f, &dom)), case.ok("norm", norm(&x, &dom))) else {
        return;
    };
    let v = fx.iter().map(|(t, p)| p.abs() - df.at(t) * nx.at(t) * (1.0 + PAIRING_SLACK)).fold(0.0, f64::max);
    case.measure("pairing_bound", v, 0.0);
}

fn equivalence_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let dims = random_dims(&mut case.rng, &one, cap);
    // r ≤ min dimension keeps the basis injective on every atom
    let r = case.rng.random_range(1..=*dims.values().min().expect("nonempty"));
    let basis: Vec<CondVector> = (0..r).map(|_| random_cond_vector(&mut case.rng, &dims, &one, 2.0)).collect();
    let nrm = CondNorm::from_fn(&one, |_| AtomNorm::P(random_pnorm(&mut case.rng)));
    case.instance(json!({
        "basis": basis.iter().map(|b| doc(alg, Object::Vector(b.clone()))).collect::<Vec<_>>(),
        "norm": doc(alg, Object::Norm(nrm.clone())),
    }));
    let Some(c) = case.ok("equivalence_constants", equivalence_constants(&basis, &nrm)) else { return };
    let order = c.r_low.iter().all(|(t, l)| *l > 0.0 && l <= c.r_low_estimate.at(t) && c.r_low_estimate.at(t) <= c.r_high.at(t));
    case.require("constants_ordered", order, || format!("low {:?}, estimate {:?}", c.r_low.values(), c.r_low_estimate.values()));
    let (mut below, mut above) = (0.0f64, 0.0f64);
    for _ in 0..Z_PER_CASE {
        let z = random_vector(&mut case.rng, r, 1.0);
        let z1 = PNorm::L1.eval(&z);
        for t in one.atoms() {
            let mut tz = vec![0.0; dims[&t]];
            for (zk, b) in z.iter().zip(&basis) {
                for (a, v) in tz.iter_mut().zip(b.at(t)) {
                    *a += zk * v;
                }
            }
            let ntz = nrm.at(t).eval(&tz);
            below = below.max(c.r_low.at(t) * z1 - ntz - EQUIVALENCE_SLACK * z1);
            above = above.max(ntz - c.r_high.at(t) * z1 - EQUIVALENCE_SLACK * z1);
        }
    }
    case.measure("lower_constant", below, 0.0);
    case.measure("upper_constant", above, 0.0);
}

fn reference_case(case: &mut Case, m: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let basis = vec![CondVector::constant(&one, vec![1.0, 0.0]), CondVector::constant(&one, vec![0.0, 1.0])];
    let nrm = CondNorm::uniform(&one, PNorm::L2);
    case.instance(json!({"basis": [[1.0, 0.0], [0.0, 1.0]], "norm": "l2"}));
    let Some(c) = case.ok("equivalence_constants", equivalence_constants(&basis, &nrm)) else { return };
    let low = c.r_low.iter().map(|(_, v)| (v - REFERENCE_LOW).abs()).fold(0.0, f64::max);
    let high = c.r_high.iter().map(|(_, v)| (v - 1.0).abs()).fold(0.0, f64::max);
    case.note("r_low", json!(c.r_low.values()));
    case.note("r_high", json!(c.r_high.values()));
    case.measure("reference_r_low", low, REFERENCE_LOW_TOL);
    case.measure("reference_r_high", high, REFERENCE_HIGH_TOL);
}

fn disk_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let Some(body) = case.generate(|rng| gen_body(rng, alg, cap)) else { return };
    let nrm = CondNorm::from_fn(&one, |_| AtomNorm::P(random_pnorm(&mut case.rng)));
    case.instance(json!({"body": doc(alg, Object::Body(body.clone())), "norm": doc(alg, Object::Norm(nrm.clone()))}));
    let Some(radii) = case.ok("banach_disk", banach_disk(&body, &nrm)) else { return };
    let dims: BTreeMap<usize, usize> = body.iter().map(|(t, b)| (t, b.dim())).collect();
    let (mut outer, mut inner) = (0.0f64, 0.0f64);
    for _ in 0..X_SAMPLES {
        let x = random_cond_vector(&mut case.rng, &dims, &one, 3.0);
        let (Some(g), Some(n)) = (case.ok("gauge", gauge(&body, &x)), case.ok("norm", norm(&x, &nrm))) else { return };
        for t in one.atoms() {
            let (g, n) = (*g.at(t), *n.at(t));
            outer = outer.max(n - radii.outer.at(t) * g * (1.0 + tol));
            inner = inner.max(radii.inner.at(t) * g - n * (1.0 + tol));
        }
    }
    case.measure("disk_outer", outer, 0.0);
    case.measure("disk_inner", inner, 0.0);
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let (m, tol) = (config.atoms, config.tol);
    let ocap = config.dims(4);
    let ecap = config.dims(3);
    vec![
        Section::new("operator_norm", config.cases, move |case| operator_case(case, m, ocap, tol)),
        Section::new("equivalence", config.cases, move |case| equivalence_case(case, m, ecap)),
        Section::new("reference", usize::from(config.cases > 0), move |case| reference_case(case, m)),
        Section::new("banach_disk", config.cases, move |case| disk_case(case, m, ocap, tol)),
    ]
}
