//! Uniform boundedness for conditionally finite operator families: the
//! supremum of `‖T‖` over the stable hull (all per-atom choices of a
//! generator) equals the per-atom maximum over the generators, and bounds
//! `‖T(x)‖` for hull members.

use std::collections::BTreeMap;

use rand::Rng;

use condan::algebra::{make_partition, Algebra};
use condan::analysis::{uniform_bound, PointwiseBound};
use condan::conditional::concatenate;
use condan::linear::{operator_norm, CondLinearMap};
use condan::{CondReal, CondVector};

use crate::case::{Case, Section};
use crate::generate::{gen_operator_family, random_nonzero, Instance};
use crate::suites::{oracle_norm, rel_diff};
use crate::SuiteConfig;

/// Hull members evaluated per case.
pub const HULL_SAMPLES: usize = 3;
/// Choice vectors above this count are sampled instead of enumerated.
const ENUM_LIMIT: usize = 729;
const SAMPLED_CHOICES: usize = 256;
pub const SAMPLE_SLACK: f64 = 1e-9;

fn glue(generators: &[CondLinearMap], choice: &BTreeMap<usize, usize>) -> condan::Result<CondLinearMap> {
    let on = generators[0].on();
    let p = make_partition(on, choice)?;
    let values: Vec<CondLinearMap> = p
        .blocks()
        .iter()
        .map(|b| generators[choice[&b.smallest_atom().expect("nonzero block")]].clone())
        .collect();
    concatenate(&values, &p)
}

fn choices(case: &mut Case, atoms: &[usize], g: usize) -> Vec<BTreeMap<usize, usize>> {
    let total = (g as f64).powi(atoms.len() as i32);
    if total <= ENUM_LIMIT as f64 {
        (0..total as usize)
            .map(|mut code| {
                atoms
                    .iter()
                    .map(|t| {
                        let c = code % g;
                        code /= g;
                        (*t, c)
                    })
                    .collect()
            })
            .collect()
    } else {
        (0..SAMPLED_CHOICES).map(|_| atoms.iter().map(|t| (*t, case.rng.random_range(0..g))).collect()).collect()
    }
}

fn family_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let Some(inst) = case.generate(|rng| gen_operator_family(rng, alg, cap)) else { return };
    case.instance(inst.to_json());
    let Instance::OperatorFamily { generators, dom, cod } = inst else { unreachable!("operator family generator") };
    let one = alg.one();
    let sample_x = |case: &mut Case| -> CondVector {
        CondVector::from_fn(&one, |t| {
            let v = random_nonzero(&mut case.rng, generators[0].at(t).ncols(), 1.0);
            let n = dom.at(t).eval(&v);
            v.into_iter().map(|a| a / n).collect()
        })
    };
    let samples: Vec<CondVector> = (0..HULL_SAMPLES).map(|_| sample_x(case)).collect();
    // pointwise boundedness of a finite family: sup_T ‖T(x)‖ is a maximum
    let pointwise = |x: &CondVector| -> condan::Result<CondReal> {
        let mut best = CondReal::constant(x.on(), 0.0);
        for g in &generators {
            let y = g.apply(x)?;
            best = best.max(&y.map(|t, v| cod.at(t).eval(v)))?;
        }
        Ok(best)
    };
    let pw = PointwiseBound { bound: &pointwise, samples: &samples, tol: 0.0 };
    let Some(s) = case.ok("uniform_bound", uniform_bound(&generators, &dom, &cod, Some(&pw))) else { return };

    let atoms: Vec<usize> = one.atoms().collect();
    let mut hull_sup = CondReal::constant(&one, 0.0);
    for choice in choices(case, &atoms, generators.len()) {
        let Some(t_map) = case.ok("concatenate", glue(&generators, &choice)) else { return };
        let Some(n) = case.ok("operator_norm", operator_norm(&t_map, &dom, &cod)) else { return };
        hull_sup = hull_sup.max(&n).expect("same on");
    }
    case.require("hull_sup_exact", hull_sup == s, || format!("hull sup {:?}, s {:?}", hull_sup.values(), s.values()));

    for x in &samples {
        let choice: BTreeMap<usize, usize> = atoms.iter().map(|t| (*t, case.rng.random_range(0..generators.len()))).collect();
        let Some(t_map) = case.ok("concatenate", glue(&generators, &choice)) else { return };
        let Some(y) = case.ok("apply", t_map.apply(x)) else { return };
        let v = y.iter().map(|(t, v)| cod.at(t).eval(v) - s.at(t)).fold(0.0, f64::max);
        case.measure("hull_sample_bound", v, SAMPLE_SLACK);
    }

    let mut worst = 0.0f64;
    for g in &generators {
        let Some(n) = case.ok("operator_norm", operator_norm(g, &dom, &cod)) else { return };
        for (t, mat) in g.iter() {
            let (p, q) = (dom.pnorm_at(t).expect("p-norm"), cod.pnorm_at(t).expect("p-norm"));
            if let Some(o) = oracle_norm(mat, p, q) {
                worst = worst.max(rel_diff(o, *n.at(t)));
            }
        }
    }
    case.measure("operator_norm_oracle", worst, tol);
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let (m, tol) = (config.atoms, config.tol);
    let cap = config.dims(4);
    vec![Section::new("family", config.cases, move |case| family_case(case, m, cap, tol))]
}
