use super::closed::{box_grid, AtomClosedSet, ClosedSet, ConvexPiece};
use crate::algebra::Condition;
use crate::conditional::{ConditionalValue, StableSet};
use crate::error::{Error, Result};
use crate::linear::{PNorm, SymmetricBody};

/// Sets whose closedness is evident from their representation.
#[derive(Debug, Clone, PartialEq)]
pub enum CompactCandidate {
    Body(SymmetricBody),
    Finite(StableSet<Vec<f64>>),
}

/// Atoms where the set is bounded; closed and bounded sets in a per-atom
/// finite-dimensional space are compact.
pub fn compactness_check(k: &CompactCandidate) -> Result<Condition> {
    match k {
        CompactCandidate::Body(b) => {
            let bounded = b.iter().filter(|(_, a)| a.is_bounded()).map(|(t, _)| t);
            b.algebra().condition(bounded)
        }
        CompactCandidate::Finite(s) => Ok(s.on().clone()),
    }
}

/// An open Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl OpenBall {
    pub fn contains(&self, x: &[f64]) -> bool {
        let d: Vec<f64> = self.center.iter().zip(x).map(|(c, v)| v - c).collect();
        PNorm::L2.eval(&d) < self.radius
    }
}

/// View of a symmetric body as a closed set centered at the origin.
pub fn body_as_closed_set(k: &SymmetricBody) -> ClosedSet {
    k.map(|_, b| AtomClosedSet::Convex(ConvexPiece::HBody { center: vec![0.0; b.dim()], body: b.clone() }))
}

/// Greedy subcover of a grid of `K`: repeatedly take the ball covering the
/// most uncovered grid points (smallest index on ties). Indices are
/// 1-based and sorted per atom.
pub fn extract_finite_subcover(
    k: &ClosedSet,
    cover: &ConditionalValue<Vec<OpenBall>>,
    resolution: usize,
) -> Result<ConditionalValue<Vec<usize>>> {
    k.on().ensure_eq(cover.on())?;
    k.try_map(|t, set| {
        let dim = set.validate()?;
        let balls = cover.at(t);
        if let Some(b) = balls.iter().find(|b| b.center.len() != dim) {
            return Err(Error::DimensionMismatch { atom: t, expected: dim, got: b.center.len() });
        }
        let Some(bbox) = set.bounding_box() else {
            return Err(Error::NotACover { atom: t, witness: escape_point(set, balls) });
        };
        let points: Vec<Vec<f64>> =
            box_grid(&bbox, resolution).into_iter().filter(|p| set.contains(p, 1e-12)).collect();
        let hits: Vec<Vec<usize>> = balls
            .iter()
            .map(|b| (0..points.len()).filter(|i| b.contains(&points[*i])).collect())
            .collect();
        let mut covered = vec![false; points.len()];
        for (i, p) in points.iter().enumerate() {
            if !hits.iter().any(|h| h.binary_search(&i).is_ok()) {
                return Err(Error::NotACover { atom: t, witness: p.clone() });
            }
        }
        let mut chosen = Vec::new();
        let mut remaining = points.len();
        while remaining > 0 {
            let (best, _) = hits
                .iter()
                .enumerate()
                .map(|(j, h)| (j, h.iter().filter(|i| !covered[**i]).count()))
                .fold((usize::MAX, 0), |acc, (j, c)| if c > acc.1 { (j, c) } else { acc });
            for i in &hits[best] {
                if !covered[*i] {
                    covered[*i] = true;
                    remaining -= 1;
                }
            }
            chosen.push(best + 1);
        }
        chosen.sort_unstable();
        Ok(chosen)
    })
}

/// A point of an unbounded set lying outside every ball.
fn escape_point(set: &AtomClosedSet, balls: &[OpenBall]) -> Vec<f64> {
    let reach = balls.iter().map(|b| PNorm::L2.eval(&b.center) + b.radius).fold(0.0, f64::max);
    for p in set.pieces() {
        if let ConvexPiece::HBody { center, body } = p {
            if let Some(v) = body.unbounded_direction() {
                let s = reach + PNorm::L2.eval(center) + 1.0;
                return center.iter().zip(&v).map(|(c, d)| c + s * d).collect();
            }
        }
    }
    unreachable!("only unbounded bodies lack a bounding box")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linear::{AtomBody, Facet};

    fn unit_interval(a: &Algebra) -> ClosedSet {
        ClosedSet::constant(&a.one(), AtomClosedSet::Convex(ConvexPiece::interval_product(vec![(0.0, 1.0)]).unwrap()))
    }

    fn balls(centers: &[f64], r: f64) -> Vec<OpenBall> {
        centers.iter().map(|c| OpenBall { center: vec![*c], radius: r }).collect()
    }

    #[test]
    fn compactness_examples() {
        let a = Algebra::new(2).unwrap();
        let slab = AtomBody::new(2, vec![Facet { u: vec![1.0, 0.0], c: 1.0 }]).unwrap();
        let body = SymmetricBody::new(a.one(), [(0, slab), (1, AtomBody::cube(2, 1.0).unwrap())].into()).unwrap();
        assert_eq!(compactness_check(&CompactCandidate::Body(body)).unwrap(), a.atom(1).unwrap());
        let pts = StableSet::new(a.one(), [(0, vec![vec![1.0]]), (1, vec![vec![2.0], vec![3.0]])].into()).unwrap();
        assert!(compactness_check(&CompactCandidate::Finite(pts)).unwrap().is_one());
    }

    #[test]
    fn subcover_examples() {
        let a = Algebra::new(1).unwrap();
        let k = unit_interval(&a);
        let cover = ConditionalValue::constant(&a.one(), balls(&[0.0, 0.25, 0.5, 0.75, 1.0], 0.3));
        let sel = extract_finite_subcover(&k, &cover, 100).unwrap();
        assert_eq!(sel.at(0).len(), 3);
        let grid = box_grid(&[(0.0, 1.0)], 1000);
        let chosen: Vec<OpenBall> = sel.at(0).iter().map(|i| cover.at(0)[i - 1].clone()).collect();
        assert!(grid.iter().all(|p| chosen.iter().any(|b| b.contains(p))));
        let big = ConditionalValue::constant(&a.one(), balls(&[0.5], 1.0));
        assert_eq!(extract_finite_subcover(&k, &big, 50).unwrap().at(0), &vec![1]);
        let gap = ConditionalValue::constant(&a.one(), balls(&[0.0, 1.0], 0.3));
        assert!(matches!(extract_finite_subcover(&k, &gap, 10), Err(Error::NotACover { atom: 0, .. })));
        let slab = AtomBody::new(2, vec![Facet { u: vec![1.0, 0.0], c: 1.0 }]).unwrap();
        let k = body_as_closed_set(&SymmetricBody::constant(&a.one(), slab));
        let cover = ConditionalValue::constant(&a.one(), vec![OpenBall { center: vec![0.0, 0.0], radius: 50.0 }]);
        match extract_finite_subcover(&k, &cover, 10) {
            Err(Error::NotACover { witness, .. }) => assert!(!cover.at(0)[0].contains(&witness)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn per_atom_covers() {
        let a = Algebra::new(2).unwrap();
        let k = unit_interval(&a);
        let cover = ConditionalValue::new(a.one(), [(0, balls(&[0.5], 1.0)), (1, balls(&[9.0, 0.5], 0.6))].into()).unwrap();
        let sel = extract_finite_subcover(&k, &cover, 20).unwrap();
        assert_eq!(sel.at(0), &vec![1]);
        assert_eq!(sel.at(1), &vec![2]);
    }
}
