//! The ℓ2 direct sum `⊕²_k E_k`: the functional `T_{x*}` has norm `‖x*‖₂`,
//! Cauchy-Schwarz for the pairing, and truncation within the certified tail.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::linear::{direct_sum_l2, AtomNorm, CondNorm, L2Element, L2Tail, PNorm};
use condan::{CondReal, CondVector};

use crate::case::{Case, Section};
use crate::generate::{gen_l2_element, random_dims, random_nonzero, random_pnorm, random_vector, Instance};
use crate::suites::rel_diff;
use crate::SuiteConfig;

pub const GAP_TOL: f64 = 1e-6;
pub const ORACLE_TOL: f64 = 1e-12;
const Y_SAMPLES: usize = 16;
/// Components listed beyond the truncation point in the reference element.
const EXTRA_COMPONENTS: usize = 40;

/// Dual p-norm by its closed form.
fn dual_p(p: PNorm, f: &[f64]) -> f64 {
    match p {
        PNorm::L1 => f.iter().fold(0.0, |m, v| m.max(v.abs())),
        PNorm::L2 => f.iter().map(|v| v * v).sum::<f64>().sqrt(),
        PNorm::LInf => f.iter().map(|v| v.abs()).sum(),
    }
}

fn duality_case(case: &mut Case, m: usize, cap: usize, tol: f64) {
    let alg = Algebra::new(m).expect("validated atom count");
    let Some(inst) = case.generate(|rng| gen_l2_element(rng, alg, cap)) else { return };
    case.instance(inst.to_json());
    let Instance::L2Element { norms, x, x_star } = inst else { unreachable!("l2 element generator") };
    let Some(r) = case.ok("direct_sum_l2", direct_sum_l2(&norms, &x, &x_star)) else { return };
    case.measure("pairing_norm_gap", r.pairing_norm_gap.max_value(), GAP_TOL);

    let (mut oracle, mut cs, mut upper) = (0.0f64, 0.0f64, 0.0f64);
    for t in alg.one().atoms() {
        let ps: Vec<PNorm> = norms.iter().map(|n| n.pnorm_at(t).expect("p-norms")).collect();
        let n2 = ps.iter().zip(&x.components).map(|(p, c)| p.eval(c.at(t)).powi(2)).sum::<f64>().sqrt();
        let d2 = ps.iter().zip(&x_star).map(|(p, f)| dual_p(*p, f.at(t)).powi(2)).sum::<f64>().sqrt();
        let terms: Vec<f64> = x_star.iter().zip(&x.components).flat_map(|(f, c)| f.at(t).iter().zip(c.at(t)).map(|(a, b)| a * b)).collect();
        let (pair, mass) = (terms.iter().sum::<f64>(), terms.iter().map(|v| v.abs()).sum::<f64>());
        // pairing error relative to Σ|x*_i x_i|, which bounds cancellation
        let pair_err = if mass > 0.0 { (r.pairing.at(t) - pair).abs() / mass } else { r.pairing.at(t).abs() };
        oracle = oracle.max(rel_diff(*r.norm2.at(t), n2)).max(rel_diff(*r.dual_norm2.at(t), d2)).max(pair_err);
        let scale = r.norm2.at(t) * r.dual_norm2.at(t);
        if scale > 0.0 {
            cs = cs.max((r.pairing.at(t).abs() - scale) / scale);
        } else {
            cs = cs.max(r.pairing.at(t).abs());
        }
        // no sampled y beats ‖x*‖₂
        for _ in 0..Y_SAMPLES {
            let ys: Vec<Vec<f64>> = x.components.iter().map(|c| random_vector(&mut case.rng, c.at(t).len(), 1.0)).collect();
            let ny = ps.iter().zip(&ys).map(|(p, y)| p.eval(y).powi(2)).sum::<f64>().sqrt();
            if ny > 0.0 {
                let v: f64 = x_star.iter().zip(&ys).map(|(f, y)| f.at(t).iter().zip(y).map(|(a, b)| a * b).sum::<f64>()).sum();
                upper = upper.max(v.abs() / ny - r.dual_norm2.at(t) * (1.0 + tol));
            }
        }
    }
    case.measure("oracle_sums", oracle, ORACLE_TOL);
    case.measure("cauchy_schwarz", cs, ORACLE_TOL);
    case.measure("dual_norm_upper", upper, ORACLE_TOL);
}

/// `x_k = ρᵏ·v_k` with `‖v_k‖ ≤ 1`, so `Σ_{k>K} ‖x_k‖² ≤ ρ^{2(K+1)}/(1 − ρ²)`.
fn truncation_case(case: &mut Case, m: usize, cap: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let kk = case.rng.random_range(1..=5usize);
    let rho = CondReal::from_fn(&one, |_| case.rng.random_range(0.3..0.9));
    let mut norms = Vec::new();
    let mut comps = Vec::new();
    for k in 1..=kk + EXTRA_COMPONENTS {
        let dims = random_dims(&mut case.rng, &one, cap);
        let nrm = CondNorm::from_fn(&one, |_| AtomNorm::P(random_pnorm(&mut case.rng)));
        let c = CondVector::from_fn(&one, |t| {
            let v = random_nonzero(&mut case.rng, dims[&t], 1.0);
            let s = rho.at(t).powi(k as i32) * case.rng.random_range(0.0..=1.0) / nrm.at(t).eval(&v);
            v.into_iter().map(|a| a * s).collect()
        });
        norms.push(nrm);
        comps.push(c);
    }
    let tail = rho.map(|_, r| r.powi(2 * (kk as i32 + 1)) / (1.0 - r * r));
    case.instance(json!({"truncation": kk, "rho": rho.values(), "tail_bound": tail.values()}));
    let zeros = |cs: &[CondVector]| cs.iter().map(|c| c.map(|_, v| vec![0.0; v.len()])).collect::<Vec<_>>();
    let full = L2Element::finite(comps.clone());
    let truncated = L2Element { components: comps[..kk].to_vec(), tail: L2Tail::Certified(tail) };
    let (Some(rf), Some(rt)) = (
        case.ok("direct_sum_l2", direct_sum_l2(&norms, &full, &zeros(&comps))),
        case.ok("direct_sum_l2", direct_sum_l2(&norms[..kk], &truncated, &zeros(&comps[..kk]))),
    ) else {
        return;
    };
    let v = rf.norm2.iter().map(|(t, f)| (f - rt.norm2.at(t)).abs() - rt.norm2_error.at(t)).fold(0.0, f64::max);
    case.measure("truncation_within_tail", v, ORACLE_TOL);
    let uncertified = L2Element { components: comps[..kk].to_vec(), tail: L2Tail::Uncertified };
    let refused = matches!(direct_sum_l2(&norms[..kk], &uncertified, &zeros(&comps[..kk])), Err(condan::Error::UncertifiedTail));
    case.require("uncertified_tail_refused", refused, || "uncertified tail accepted".into());
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let (m, tol) = (config.atoms, config.tol);
    let cap = config.dims(3);
    vec![
        Section::new("duality", config.cases, move |case| duality_case(case, m, cap, tol)),
        Section::new("truncation", config.cases, move |case| truncation_case(case, m, cap)),
    ]
}
