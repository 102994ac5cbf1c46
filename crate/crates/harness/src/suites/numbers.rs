//! Conditional reals and naturals: arithmetic, inverse, order, partial sums
//! under concatenation, sup/inf over stable sets and truncated series.

use rand::Rng;
use serde_json::json;

use condan::algebra::Algebra;
use condan::conditional::{concatenate, stable_hull};
use condan::numbers::{compare, cond_inverse, partial_sum, series_limit, sup_inf, support_indicator};
use condan::{CondNat, CondReal, ConditionalValue, Error};

use crate::case::{Case, Section};
use crate::generate::random_partition;
use crate::SuiteConfig;

/// Atoms used where the concatenation closure is enumerated.
const ENUM_ATOMS: usize = 3;

fn random_real<R: Rng + ?Sized>(rng: &mut R, on: &condan::algebra::Condition) -> CondReal {
    CondReal::from_fn(on, |_| match rng.random_range(0..5) {
        0 => 0.0,
        1 => rng.random_range(-3..=3) as f64,
        _ => rng.random_range(-1e3..1e3) * 10f64.powi(rng.random_range(-6..=3)),
    })
}

fn arithmetic_case(case: &mut Case, m: usize, tol: f64, trunc: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let r = random_real(&mut case.rng, &one);
    let s = random_real(&mut case.rng, &one);
    let w = random_real(&mut case.rng, &one);
    case.instance(json!({"atoms": m, "r": r.values(), "s": s.values(), "w": w.values()}));

    let field = (|| -> condan::Result<bool> {
        Ok(r.add(&s)? == s.add(&r)?
            && r.mul(&s)? == s.mul(&r)?
            && r.min(&s)?.iter().all(|(t, v)| *v == r.at(t).min(*s.at(t)))
            && r.max(&s)?.iter().all(|(t, v)| *v == r.at(t).max(*s.at(t)))
            && r.abs().is_nonnegative())
    })();
    if let Some(ok) = case.ok("arithmetic", field) {
        case.require("field_axioms", ok, || "commutativity or min/max/abs fails on some atom".into());
    }
    // associativity and distributivity up to rounding
    if let Some((assoc, dist)) = case.ok(
        "arithmetic",
        (|| -> condan::Result<(CondReal, CondReal)> {
            let a = r.add(&s)?.add(&w)?.sub(&r.add(&s.add(&w)?)?)?;
            let d = r.mul(&s.add(&w)?)?.sub(&r.mul(&s)?.add(&r.mul(&w)?)?)?;
            Ok((a, d))
        })(),
    ) {
        let scale = |t: usize| 1.0 + r.at(t).abs() * (s.at(t).abs() + w.at(t).abs()) + s.at(t).abs() + w.at(t).abs();
        let v = assoc.iter().chain(dist.iter()).map(|(t, e)| e.abs() / scale(t)).fold(0.0, f64::max);
        case.measure("field_rounding", v, tol);
    }

    // r · r⁻¹ is the support indicator, up to one rounding of the reciprocal
    let inv = cond_inverse(&r);
    let ind = support_indicator(&r);
    let v = r.iter().map(|(t, x)| (x * inv.at(t) - ind.at(t)).abs()).fold(0.0, f64::max);
    let off_support = r.iter().all(|(t, x)| *x != 0.0 || (*inv.at(t) == 0.0 && *ind.at(t) == 0.0));
    case.measure("inverse_support", v, f64::EPSILON);
    case.require("inverse_off_support", off_support, || "r⁻¹ or the indicator is nonzero where r = 0".into());

    if let Some(c) = case.ok("compare", compare(&r, &s)) {
        let leq = alg.condition(r.iter().filter(|(t, x)| **x <= *s.at(*t)).map(|(t, _)| t)).expect("in range");
        let lt = alg.condition(r.iter().filter(|(t, x)| **x < *s.at(*t)).map(|(t, _)| t)).expect("in range");
        let ok = c.leq_condition == leq && c.lt_condition == lt && c.leq == leq.is_one() && c.lt == lt.is_one();
        case.require("order", ok, || format!("leq on {}, expected {leq}", c.leq_condition));
    }

    // partial sums respect concatenation
    let len = trunc.max(1);
    let seq: Vec<CondReal> = (0..len).map(|_| random_real(&mut case.rng, &one)).collect();
    let p = random_partition(&mut case.rng, &one, 3);
    let ns: Vec<CondNat> = (0..p.len())
        .map(|_| CondNat::from_fn(&one, |_| case.rng.random_range(1..=len as u64)).expect("positive"))
        .collect();
    let glued = (|| -> condan::Result<bool> {
        let values: Vec<ConditionalValue<u64>> = ns.iter().map(|n| n.value().clone()).collect();
        let n = CondNat::new(concatenate(&values, &p)?)?;
        let lhs = partial_sum(&seq, &n)?;
        let parts: Vec<CondReal> = ns.iter().map(|n| partial_sum(&seq, n)).collect::<condan::Result<_>>()?;
        Ok(lhs == concatenate(&parts, &p)?)
    })();
    if let Some(ok) = case.ok("partial_sum", glued) {
        case.require("partial_sum_concatenation", ok, || format!("partition {:?}", p.blocks()));
    }

    // geometric series with its exact tail
    let c = random_real(&mut case.rng, &one);
    let q = CondReal::from_fn(&one, |_| case.rng.random_range(-0.9..0.9));
    let terms: Vec<CondReal> = (1..=len).map(|k| c.zip_with(&q, |_, c, q| c * q.powi(k as i32)).expect("same on")).collect();
    let tail = c.zip_with(&q, |_, c, q| c.abs() * q.abs().powi(len as i32 + 1) / (1.0 - q.abs())).expect("same on");
    match series_limit(&terms, len, Some(&tail)) {
        Ok(sum) => {
            let v = sum
                .value
                .iter()
                .map(|(t, v)| {
                    let exact = c.at(t) * q.at(t) / (1.0 - q.at(t));
                    ((v - exact).abs() - sum.error_bound.at(t)) / (1.0 + exact.abs())
                })
                .fold(0.0, f64::max);
            case.measure("series_tail", v, tol);
        }
        Err(e) => case.require("series_tail", false, || e.to_string()),
    }
    case.require("uncertified_tail", series_limit(&terms, len, None) == Err(Error::UncertifiedTail), || {
        "series without a tail bound was summed".into()
    });
}

/// Closure of `gens` (per-atom value vectors) under `x|a + y|aᶜ`.
fn concatenation_closure(m: usize, gens: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut list: Vec<Vec<f64>> = Vec::new();
    for g in gens {
        if !list.contains(g) {
            list.push(g.clone());
        }
    }
    let mut i = 0;
    while i < list.len() {
        for j in 0..=i {
            for a in 0..(1usize << m) {
                let c: Vec<f64> = (0..m).map(|t| if a & (1 << t) != 0 { list[i][t] } else { list[j][t] }).collect();
                if !list.contains(&c) {
                    list.push(c);
                }
            }
        }
        i += 1;
    }
    list
}

fn sup_case(case: &mut Case, m: usize) {
    let alg = Algebra::new(m).expect("m ≤ 3");
    let one = alg.one();
    let count = case.rng.random_range(1..=4);
    let gens: Vec<Vec<f64>> =
        (0..count).map(|_| (0..m).map(|_| case.rng.random_range(-5..=5) as f64 / 2.0).collect()).collect();
    case.instance(json!({"atoms": m, "generators": gens}));
    let values: Vec<CondReal> = gens.iter().map(|g| CondReal::from_fn(&one, |t| g[t])).collect();
    let Some(f) = case.ok("stable_hull", stable_hull(&values)) else { return };
    let si = sup_inf(&f);
    let closure = concatenation_closure(m, &gens);
    let ok = one.atoms().all(|t| {
        let hi = closure.iter().map(|x| x[t]).fold(f64::NEG_INFINITY, f64::max);
        let lo = closure.iter().map(|x| x[t]).fold(f64::INFINITY, f64::min);
        hi == *si.sup.at(t) && lo == *si.inf.at(t)
    });
    case.require("sup_inf_closure", ok, || format!("sup {:?} inf {:?}", si.sup.values(), si.inf.values()));
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let (m, tol, trunc) = (config.atoms, config.tol, config.trunc);
    let em = m.min(ENUM_ATOMS);
    vec![
        Section::new("arithmetic", config.cases, move |case| arithmetic_case(case, m, tol, trunc)),
        Section::new("sup_inf", config.cases, move |case| sup_case(case, em)),
    ]
}
