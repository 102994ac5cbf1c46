//! Conditions, conditional values and stable sets.
//!
//! `hull_oracle` compares [`stable_hull`] with the closure of the generators
//! under binary concatenation `x|a + y|aᶜ`, computed on bitsets over every
//! element of `U^m`. For `m ≤ 3` and `|U| ≤ 4` it runs over all generator
//! sets when `|U|^m ≤ 16`, and over all sets of at most three generators
//! otherwise.

use std::collections::BTreeMap;

use rand::Rng;
use serde_json::json;

use condan::algebra::{refine_partitions, Algebra, Condition};
use condan::conditional::{concatenate, stable_hull};
use condan::{ConditionalValue, StableSet};

use crate::case::{Case, Section};
use crate::generate::random_partition;
use crate::SuiteConfig;

/// Largest `|U|^m` for which every generator set is enumerated.
const FULL_ENUM_ELEMENTS: usize = 16;

struct HullCase {
    m: usize,
    u: usize,
    gens: Vec<u8>,
}

fn hull_domain() -> Vec<HullCase> {
    let mut out = Vec::new();
    for m in 1..=3usize {
        for u in 1..=4usize {
            let n = u.pow(m as u32);
            if n <= FULL_ENUM_ELEMENTS {
                for mask in 1u32..(1 << n) {
                    let gens = (0..n as u8).filter(|e| mask & (1 << e) != 0).collect();
                    out.push(HullCase { m, u, gens });
                }
            } else {
                for a in 0..n as u8 {
                    out.push(HullCase { m, u, gens: vec![a] });
                    for b in a + 1..n as u8 {
                        out.push(HullCase { m, u, gens: vec![a, b] });
                        for c in b + 1..n as u8 {
                            out.push(HullCase { m, u, gens: vec![a, b, c] });
                        }
                    }
                }
            }
        }
    }
    out
}

fn digit(e: usize, t: usize, u: usize) -> usize {
    (e / u.pow(t as u32)) % u
}

/// Closure of `gens` under `x|a + y|aᶜ` over all conditions `a`, as a bitset of codes.
fn brute_closure(m: usize, u: usize, gens: &[u8]) -> u64 {
    let n = u.pow(m as u32);
    let digits: Vec<Vec<usize>> = (0..n).map(|e| (0..m).map(|t| digit(e, t, u)).collect()).collect();
    let pow: Vec<usize> = (0..m).map(|t| u.pow(t as u32)).collect();
    let mut set = 0u64;
    let mut list: Vec<usize> = Vec::new();
    for g in gens {
        if set & (1 << g) == 0 {
            set |= 1 << g;
            list.push(*g as usize);
        }
    }
    let mut i = 0;
    while i < list.len() {
        let z = list[i];
        for j in 0..=i {
            let w = list[j];
            for a in 0..(1usize << m) {
                let c: usize = (0..m).map(|t| if a & (1 << t) != 0 { digits[z][t] } else { digits[w][t] } * pow[t]).sum();
                if set & (1 << c) == 0 {
                    set |= 1 << c;
                    list.push(c);
                }
            }
        }
        i += 1;
    }
    set
}

fn hull_case(case: &mut Case, hc: &HullCase) {
    case.instance(json!({"atoms": hc.m, "universe": hc.u, "generators": hc.gens.iter()
        .map(|e| (0..hc.m).map(|t| digit(*e as usize, t, hc.u)).collect::<Vec<_>>()).collect::<Vec<_>>()}));
    let Some(alg) = case.ok("algebra", Algebra::new(hc.m)) else { return };
    let one = alg.one();
    let values: Vec<ConditionalValue<u8>> = hc
        .gens
        .iter()
        .map(|e| ConditionalValue::from_fn(&one, |t| digit(*e as usize, t, hc.u) as u8))
        .collect();
    let Some(hull) = case.ok("hull", stable_hull(&values)) else { return };
    let pow: Vec<usize> = (0..hc.m).map(|t| hc.u.pow(t as u32)).collect();
    let engine = hull
        .members()
        .iter()
        .fold(0u64, |s, x| s | 1 << x.iter().map(|(t, v)| *v as usize * pow[t]).sum::<usize>());
    let brute = brute_closure(hc.m, hc.u, &hc.gens);
    case.require("hull_oracle", engine == brute, || format!("engine {engine:#x}, closure {brute:#x}"));
}

fn random_subset<R: Rng + ?Sized>(rng: &mut R, universe: &[u8]) -> Vec<u8> {
    loop {
        let s: Vec<u8> = universe.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

fn random_stable<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, universe: &StableSet<u8>) -> StableSet<u8> {
    let on = alg.condition((0..alg.atom_count()).filter(|_| rng.random_bool(0.75))).expect("atoms in range");
    let per_atom: BTreeMap<usize, Vec<u8>> = on.atoms().map(|t| (t, random_subset(rng, universe.at(t)))).collect();
    StableSet::new(on, per_atom).expect("nonempty per-atom sets")
}

fn set_json(s: &StableSet<u8>) -> serde_json::Value {
    json!({"on": s.on().atoms().collect::<Vec<_>>(), "per_atom": s.per_atom()})
}

fn boolean_laws_case(case: &mut Case, m: usize) {
    let alg = Algebra::new(m).expect("validated atom count");
    let one = alg.one();
    let universe = StableSet::new(
        one.clone(),
        one.atoms().map(|t| (t, (0..case.rng.random_range(2..=4u8)).collect())).collect(),
    )
    .expect("nonempty universe");
    let f = random_stable(&mut case.rng, alg, &universe);
    let g = random_stable(&mut case.rng, alg, &universe);
    let h = random_stable(&mut case.rng, alg, &universe);
    case.instance(json!({"atoms": m, "universe": set_json(&universe), "f": set_json(&f), "g": set_json(&g), "h": set_json(&h)}));
    let u = Some(&universe);
    let laws = (|| -> condan::Result<_> {
        let c = |s: &StableSet<u8>| s.complement(u);
        let de_morgan =
            c(&f.union(&g)?)? == c(&f)?.intersection(&c(&g)?)? && c(&f.intersection(&g)?)? == c(&f)?.union(&c(&g)?)?;
        let distributive = f.intersection(&g.union(&h)?)? == f.intersection(&g)?.union(&f.intersection(&h)?)?
            && f.union(&g.intersection(&h)?)? == f.union(&g)?.intersection(&f.union(&h)?)?;
        let fc = c(&f)?;
        let complemented = f.union(&fc)? == universe && f.intersection(&fc)?.on().is_zero() && c(&fc)? == f;
        let fg_meet = f.intersection(&g)?;
        let ordered = f.is_subset(&f.union(&g)?)
            && fg_meet.is_subset(&f)
            && StableSet::null(alg).is_subset(&f)
            && f.is_subset(&universe)
            && (!(f.is_subset(&g) && g.is_subset(&f)) || f == g);
        Ok((de_morgan, distributive, complemented, ordered))
    })();
    let Some((dm, dist, comp, ord)) = case.ok("set_operations", laws) else { return };
    case.require("de_morgan", dm, || "complement does not swap union and intersection".into());
    case.require("distributivity", dist, || "union and intersection do not distribute".into());
    case.require("complementation", comp, || "F ⊔ ᶜF ≠ E, F ⊓ ᶜF ≠ ∅ or ᶜᶜF ≠ F".into());
    case.require("inclusion_order", ord, || "inclusion is not a partial order bounded by ∅ and E".into());

    // concatenation: existence, uniqueness and consistency of restrictions
    let blocks = case.rng.random_range(1..=3);
    let p = random_partition(&mut case.rng, &one, blocks);
    let values: Vec<ConditionalValue<u8>> =
        (0..p.len()).map(|_| ConditionalValue::from_fn(&one, |_| case.rng.random_range(0..4u8))).collect();
    let Some(x) = case.ok("concatenate", concatenate(&values, &p)) else { return };
    let agrees = p.blocks().iter().zip(&values).all(|(b, v)| x.restrict(b).ok() == v.restrict(b).ok());
    let rebuilt = ConditionalValue::from_fn(&one, |t| *values[p.block_of(t).expect("covers 1")].at(t));
    case.require("concatenation", agrees && rebuilt == x, || format!("partition {:?}", p.blocks()));
    let b = one.clone();
    let a = f.on().clone();
    let consistent = x.restrict(&b).and_then(|y| y.restrict(&a)).ok() == x.restrict(&a).ok();
    case.require("consistency", consistent, || "restrictions disagree".into());
}

fn condition_case(case: &mut Case, index: usize) {
    // decode (m, x, y, z) from the flat index over m = 1..=4
    let (mut m, mut i) = (1, index);
    while i >= 1 << (3 * m) {
        i -= 1 << (3 * m);
        m += 1;
    }
    let alg = Algebra::new(m).expect("m ≤ 4");
    let cond = |bits: usize| alg.condition((0..m).filter(|t| bits & (1 << t) != 0)).expect("in range");
    let (x, y, z) = (cond(i & ((1 << m) - 1)), cond((i >> m) & ((1 << m) - 1)), cond(i >> (2 * m)));
    case.instance(json!({"atoms": m, "x": x.atoms().collect::<Vec<_>>(), "y": y.atoms().collect::<Vec<_>>(), "z": z.atoms().collect::<Vec<_>>()}));
    let laws = (|| -> condan::Result<Vec<(&'static str, bool)>> {
        let (mt, jn) = (|a: &Condition, b: &Condition| a.meet(b), |a: &Condition, b: &Condition| a.join(b));
        Ok(vec![
            ("associativity", mt(&mt(&x, &y)?, &z)? == mt(&x, &mt(&y, &z)?)? && jn(&jn(&x, &y)?, &z)? == jn(&x, &jn(&y, &z)?)?),
            ("commutativity", mt(&x, &y)? == mt(&y, &x)? && jn(&x, &y)? == jn(&y, &x)?),
            (
                "condition_distributivity",
                mt(&x, &jn(&y, &z)?)? == jn(&mt(&x, &y)?, &mt(&x, &z)?)?
                    && jn(&x, &mt(&y, &z)?)? == mt(&jn(&x, &y)?, &jn(&x, &z)?)?,
            ),
            (
                "condition_de_morgan",
                jn(&x, &y)?.complement() == mt(&x.complement(), &y.complement())?
                    && mt(&x, &y)?.complement() == jn(&x.complement(), &y.complement())?,
            ),
            ("double_complement", x.complement().complement() == x),
            ("absorption", mt(&x, &jn(&x, &y)?)? == x && jn(&x, &mt(&x, &y)?)? == x),
            ("order", x.leq(&jn(&x, &y)?)? && mt(&x, &y)?.leq(&x)? && alg.zero().leq(&x)? && x.leq(&alg.one())?),
            ("atomicity", x.atoms().try_fold(alg.zero(), |acc, t| acc.join(&alg.atom(t)?))? == x),
        ])
    })();
    let Some(laws) = case.ok("condition_operations", laws) else { return };
    for (name, ok) in laws {
        case.require(name, ok, || "law fails".into());
    }
    let one = alg.one();
    let p = random_partition(&mut case.rng, &one, 3);
    let q = random_partition(&mut case.rng, &one, 3);
    let refines = refine_partitions(&p, &q).map(|r| {
        let below = |blocks: &[Condition], b: &Condition| blocks.iter().any(|c| b.leq(c).unwrap_or(false));
        let covered = r.blocks().iter().try_fold(alg.zero(), |acc, b| acc.join(b)).ok() == Some(one.clone());
        covered && r.blocks().iter().all(|b| below(p.blocks(), b) && below(q.blocks(), b))
    });
    if let Some(ok) = case.ok("refine_partitions", refines) {
        case.require("refinement", ok, || format!("p={:?} q={:?}", p.blocks(), q.blocks()));
    }
}

pub fn sections(config: &SuiteConfig) -> Vec<Section<'_>> {
    let domain = hull_domain();
    let m = config.atoms;
    // the exhaustive sections ignore the case count, except that 0 disables them
    let on = usize::from(config.cases > 0);
    let condition_cases: usize = on * (1..=4).map(|m| 1usize << (3 * m)).sum::<usize>();
    vec![
        Section::new("hull_oracle", on * domain.len(), move |case| hull_case(case, &domain[case.index])),
        Section::new("boolean_laws", config.cases, move |case| boolean_laws_case(case, m)),
        Section::new("condition_laws", condition_cases, |case| {
            let i = case.index;
            condition_case(case, i)
        }),
    ]
}
