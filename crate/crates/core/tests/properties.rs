use std::collections::BTreeMap;

use nalgebra::DMatrix;
use proptest::prelude::*;

use condan::algebra::{make_partition, Algebra};
use condan::conditional::concatenate;
use condan::linear::{equivalence_constants, operator_norm, AtomBody, CondNorm, Facet, PNorm};
use condan::{CondVector, ConditionalValue};

fn mask_of(c: &condan::Condition) -> u32 {
    c.atoms().fold(0, |m, t| m | (1 << t))
}

fn cond(alg: Algebra, mask: u32) -> condan::Condition {
    alg.condition((0..alg.atom_count()).filter(|t| mask >> t & 1 == 1)).unwrap()
}

fn body_strategy(dim: usize) -> impl Strategy<Value = AtomBody> {
    let facet = (prop::collection::vec(-2.0..2.0f64, dim), 0.2..3.0f64);
    prop::collection::vec(facet, 1..6).prop_filter_map("zero direction", move |fs| {
        let facets = fs.into_iter().map(|(u, c)| Facet { u, c }).collect();
        AtomBody::new(dim, facets).ok()
    })
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-3.0..3.0f64, rows * cols).prop_map(move |v| DMatrix::from_row_slice(rows, cols, &v))
}

proptest! {
    #[test]
    fn conditions_match_bitmasks(m in 1usize..=6, a in any::<u32>(), b in any::<u32>()) {
        let alg = Algebra::new(m).unwrap();
        let full = (1u32 << m) - 1;
        let (a, b) = (a & full, b & full);
        let (x, y) = (cond(alg, a), cond(alg, b));
        prop_assert_eq!(mask_of(&x.meet(&y).unwrap()), a & b);
        prop_assert_eq!(mask_of(&x.join(&y).unwrap()), a | b);
        prop_assert_eq!(mask_of(&x.complement()), !a & full);
        prop_assert_eq!(x.leq(&y).unwrap(), a & !b == 0);
        prop_assert_eq!(x.is_zero(), a == 0);
        prop_assert_eq!(x.is_one(), a == full);
    }

    #[test]
    fn partitions_group_labels(labels in prop::collection::vec(0u8..3, 1..=6)) {
        let alg = Algebra::new(labels.len()).unwrap();
        let one = alg.one();
        let assignment: BTreeMap<usize, u8> = labels.iter().copied().enumerate().collect();
        let p = make_partition(&one, &assignment).unwrap();
        let mut seen = 0u32;
        let mut prev = None;
        for b in p.blocks() {
            let s = b.smallest_atom().unwrap();
            prop_assert!(prev.is_none_or(|q| q < s));
            prev = Some(s);
            prop_assert!(b.atoms().all(|t| labels[t] == labels[s]));
            prop_assert_eq!(mask_of(b) & seen, 0);
            seen |= mask_of(b);
        }
        prop_assert_eq!(seen, (1u32 << labels.len()) - 1);
        let distinct: std::collections::BTreeSet<u8> = labels.iter().copied().collect();
        prop_assert_eq!(p.len(), distinct.len());
    }

    #[test]
    fn concatenation_picks_block_values(labels in prop::collection::vec(0usize..3, 1..=5)) {
        let alg = Algebra::new(labels.len()).unwrap();
        let one = alg.one();
        let assignment: BTreeMap<usize, usize> = labels.iter().copied().enumerate().collect();
        let p = make_partition(&one, &assignment).unwrap();
        let pieces: Vec<ConditionalValue<usize>> = p
            .blocks()
            .iter()
            .map(|b| ConditionalValue::from_fn(&one, |t| 10 * labels[b.smallest_atom().unwrap()] + t))
            .collect();
        let glued = concatenate(&pieces, &p).unwrap();
        for (t, v) in glued.iter() {
            prop_assert_eq!(*v, 10 * labels[t] + t);
        }
    }

    #[test]
    fn gauge_is_a_seminorm(
        body in body_strategy(3),
        x in prop::collection::vec(-5.0..5.0f64, 3),
        y in prop::collection::vec(-5.0..5.0f64, 3),
        r in -4.0..4.0f64,
    ) {
        let g = |v: &[f64]| body.gauge(v);
        let rx: Vec<f64> = x.iter().map(|a| r * a).collect();
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!((g(&rx) - r.abs() * g(&x)).abs() <= 1e-9 * (1.0 + g(&rx)));
        prop_assert!(g(&xy) <= (g(&x) + g(&y)) * (1.0 + 1e-12) + 1e-12);
        // x/g(x) sits on the boundary
        let gx = g(&x);
        if gx > 1e-9 {
            let inside: Vec<f64> = x.iter().map(|a| a / gx).collect();
            let outside: Vec<f64> = x.iter().map(|a| a * 1.01 / gx).collect();
            prop_assert!(body.contains(&inside, 1e-9));
            prop_assert!(!body.contains(&outside, 1e-9));
        }
    }

    #[test]
    fn operator_norms_match_closed_forms(a in matrix(3, 2), b in matrix(2, 4)) {
        let alg = Algebra::new(2).unwrap();
        let one = alg.one();
        let map = ConditionalValue::from_fn(&one, |t| if t == 0 { a.clone() } else { b.clone() });
        let col = |m: &DMatrix<f64>| m.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
        let row = |m: &DMatrix<f64>| m.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max);
        let l1 = operator_norm(&map, &CondNorm::uniform(&one, PNorm::L1), &CondNorm::uniform(&one, PNorm::L1)).unwrap();
        let linf = operator_norm(&map, &CondNorm::uniform(&one, PNorm::LInf), &CondNorm::uniform(&one, PNorm::LInf)).unwrap();
        let l2 = operator_norm(&map, &CondNorm::uniform(&one, PNorm::L2), &CondNorm::uniform(&one, PNorm::L2)).unwrap();
        for (t, m) in map.iter() {
            prop_assert!((l1.at(t) - col(m)).abs() <= 1e-12 * (1.0 + col(m)));
            prop_assert!((linf.at(t) - row(m)).abs() <= 1e-12 * (1.0 + row(m)));
            let s = m.singular_values().max();
            prop_assert!((l2.at(t) - s).abs() <= 1e-9 * (1.0 + s));
        }
    }

    #[test]
    fn equivalence_constants_bracket_samples(
        b1 in prop::collection::vec(-2.0..2.0f64, 3),
        b2 in prop::collection::vec(-2.0..2.0f64, 3),
        zs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 20),
        p in prop::sample::select(vec![PNorm::L1, PNorm::L2, PNorm::LInf]),
    ) {
        let alg = Algebra::new(1).unwrap();
        let one = alg.one();
        let basis = vec![CondVector::constant(&one, b1.clone()), CondVector::constant(&one, b2.clone())];
        let c = equivalence_constants(&basis, &CondNorm::uniform(&one, p)).unwrap();
        let (lo, est, hi) = (*c.r_low.at(0), *c.r_low_estimate.at(0), *c.r_high.at(0));
        prop_assert!(0.0 <= lo && lo <= est && est <= hi);
        for (z1, z2) in zs {
            let v: Vec<f64> = b1.iter().zip(&b2).map(|(a, b)| z1 * a + z2 * b).collect();
            let n = p.eval(&v);
            let l1 = z1.abs() + z2.abs();
            prop_assert!(lo * l1 <= n + 1e-9 * l1);
            prop_assert!(n <= hi * l1 + 1e-9 * l1);
        }
    }
}
