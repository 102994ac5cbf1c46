//! The natural embedding into the bidual: isometry over dual-ball samples,
//! attainment by the norming functional, and the finite reflexivity check.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::io::Object;
use condan::linear::{bidual_norm, dot, dual_norm, embedding_check, norm, norming_functional, pairing, realize_bidual};
use condan::linear::{AtomNorm, CondLinearMap, CondNorm};
use condan::CondVector;

use crate::case::{Case, Section};
use crate::generate::{doc, random_dims, random_pnorm, random_vector};
use crate::suites::rel_diff;
use crate::SuiteConfig;

pub const ISOMETRY_TOL: f64 = 1e-6;
pub const ATTAIN_TOL: f64 = 1e-12;
pub const BIDUAL_TOL: f64 = 1e-6;
const DUAL_SAMPLES: usize = 16;
const SPHERE_RESOLUTION: usize = 64;

fn sparse_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut v = random_vector(rng, d, 4.0);
    for a in v.iter_mut() {
        if rng.random_bool(0.15) {
            *a = 0.0;
        }
    }
    v
}

fn isometry_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let dims = random_dims(&mut case.rng, &one, cap);
    let nrm = CondNorm::from_fn(&one, |_| AtomNorm::P(random_pnorm(&mut case.rng)));
    let x = CondVector::from_fn(&one, |t| sparse_vector(&mut case.rng, dims[&t]));
    let samples: Vec<CondVector> =
        (0..DUAL_SAMPLES).map(|_| CondVector::from_fn(&one, |t| random_vector(&mut case.rng, dims[&t], 1.0))).collect();
    case.instance(json!({"x": doc(alg, Object::Vector(x.clone())), "norm": doc(alg, Object::Norm(nrm.clone()))}));
    let Some(check) = case.ok("embedding_check", embedding_check(&x, &nrm, &samples)) else { return };
    case.measure("isometry", check.isometry_gap.max_value(), ISOMETRY_TOL);
    let (Some(f), Some(nx)) = (case.ok("norming_functional", norming_functional(&x, &nrm)), case.ok("norm", norm(&x, &nrm))) else {
        return;
    };
    let f = CondLinearMap::as_functional(&f);
    let (Some(fx), Some(df)) = (case.ok("pairing", pairing(&f, &x)), case.ok("dual_norm", dual_norm(&f, &nrm))) else {
        return;
    };
    let attain = fx.iter().map(|(t, v)| rel_diff(*v, *nx.at(t))).fold(0.0, f64::max);
    case.measure("norming_attains", attain, ATTAIN_TOL);
    case.measure("norming_in_dual_ball", df.max_value() - 1.0, ATTAIN_TOL);
}

fn bidual_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let dims = random_dims(&mut case.rng, &one, cap);
    let nrm = CondNorm::from_fn(&one, |_| AtomNorm::P(random_pnorm(&mut case.rng)));
    let x = CondVector::from_fn(&one, |t| sparse_vector(&mut case.rng, dims[&t]));
    case.instance(json!({"x": doc(alg, Object::Vector(x.clone())), "norm": doc(alg, Object::Norm(nrm.clone()))}));
    let mut worst = 0.0f64;
    for (t, v) in x.iter() {
        let p = nrm.pnorm_at(t).expect("p-norms only");
        let Some(b) = case.ok("bidual_norm", bidual_norm(v, p, SPHERE_RESOLUTION)) else { return };
        worst = worst.max(rel_diff(b, p.eval(v)));
    }
    case.measure("bidual_norm", worst, BIDUAL_TOL);
    // j(x) evaluated on the dual basis is x itself; realizing it must give x back
    let on_dual_basis = x.map(|_, v| {
        (0..v.len())
            .map(|i| {
                let mut e = vec![0.0; v.len()];
                e[i] = 1.0;
                dot(&e, v)
            })
            .collect::<Vec<f64>>()
    });
    let back = realize_bidual(&on_dual_basis);
    case.require("reflexive", back == x, || "realized bidual differs from x".into());
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let m = config.atoms;
    let cap = config.dims(5);
    let bcap = config.dims(3);
    vec![
        Section::new("isometry", config.cases, move |case| isometry_case(case, m, cap)),
        Section::new("bidual", config.cases, move |case| bidual_case(case, m, bcap)),
    ]
}
