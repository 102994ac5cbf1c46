use super::closed::{box_grid, ClosedSet};
use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::linear::CondVector;
use crate::numbers::{CondNat, CondReal};

/// Refinement levels to search and the verification oversampling factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaireSchedule {
    pub max_level: usize,
    pub verify_factor: usize,
}

impl Default for BaireSchedule {
    fn default() -> Self {
        Self { max_level: 8, verify_factor: 10 }
    }
}

/// A closed sup-norm ball `B_r(center)` contained in `E_index` on every atom.
#[derive(Debug, Clone, PartialEq)]
pub struct BaireLocation {
    pub center: CondVector,
    pub radius: CondReal,
    pub index: CondNat,
}

/// Per-atom box `Π_i [lo_i, hi_i]`.
pub type SpaceBox = ConditionalValue<Vec<(f64, f64)>>;

struct Cell {
    lo: Vec<f64>,
    side: f64,
}

impl Cell {
    fn corners(&self) -> Vec<Vec<f64>> {
        box_grid(&self.bounds(), 1)
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        self.lo.iter().map(|l| (*l, l + self.side)).collect()
    }

    fn center(&self) -> Vec<f64> {
        self.lo.iter().map(|l| l + self.side / 2.0).collect()
    }
}

fn cells_at(space: &[(f64, f64)], side: f64) -> impl Iterator<Item = Cell> + '_ {
    let counts: Vec<usize> = space.iter().map(|(lo, hi)| (((hi - lo) / side) + 1e-9).floor().max(1.0) as usize).collect();
    let total: usize = counts.iter().product();
    (0..total).map(move |mut code| {
        let lo = space
            .iter()
            .zip(&counts)
            .map(|((l, _), n)| {
                let j = code % n;
                code /= n;
                l + j as f64 * side
            })
            .collect();
        Cell { lo, side }
    })
}

/// Finds a ball inside one of the closed sets, by searching cubic cells
/// of side `min_side / 2^L` for `L = 0..=max_level`. A cell is accepted
/// when its corners all lie in one convex piece of some `E_n`, and the
/// result is re-checked on a grid `verify_factor` times finer.
pub fn baire_locate(space: &SpaceBox, closed_sets: &[ClosedSet], schedule: &BaireSchedule) -> Result<BaireLocation> {
    if closed_sets.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let on = space.on().clone();
    for e in closed_sets {
        on.ensure_eq(e.on())?;
    }
    let mut center = std::collections::BTreeMap::new();
    let mut radius = std::collections::BTreeMap::new();
    let mut index = std::collections::BTreeMap::new();
    for (t, sp) in space.iter() {
        let dim = sp.len();
        if dim == 0 || sp.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
            return Err(Error::InvalidValue(format!("space on atom {t} is not a nondegenerate box")));
        }
        let sets: Vec<_> = closed_sets.iter().map(|e| e.at(t)).collect();
        for e in &sets {
            let d = e.validate()?;
            if d != dim {
                return Err(Error::DimensionMismatch { atom: t, expected: dim, got: d });
            }
        }
        let min_side = sp.iter().map(|(lo, hi)| hi - lo).fold(f64::INFINITY, f64::min);
        let finest = min_side / 2f64.powi(schedule.max_level as i32);
        for cell in cells_at(sp, finest) {
            for p in cell.corners() {
                if !sets.iter().any(|e| e.contains(&p, 1e-12)) {
                    return Err(Error::HypothesisViolated(format!("point {p:?} on atom {t} lies in no closed set")));
                }
            }
        }
        let mut found = None;
        'search: for level in 0..=schedule.max_level {
            let side = min_side / 2f64.powi(level as i32);
            for cell in cells_at(sp, side) {
                let corners = cell.corners();
                for (n, e) in sets.iter().enumerate() {
                    if e.hull_inside(&corners, 0.0) {
                        let fine = box_grid(&cell.bounds(), schedule.verify_factor.max(1));
                        if fine.iter().all(|p| e.contains(p, 1e-12)) {
                            found = Some((cell, n));
                            break 'search;
                        }
                    }
                }
            }
        }
        match found {
            Some((cell, n)) => {
                center.insert(t, cell.center());
                radius.insert(t, cell.side / 2.0);
                index.insert(t, n as u64 + 1);
            }
            None => {
                // nested cells shrinking toward the lower corner, as far as the schedule went
                let trace = (0..=schedule.max_level)
                    .map(|level| {
                        let side = min_side / 2f64.powi(level as i32);
                        let c = Cell { lo: sp.iter().map(|(l, _)| *l).collect(), side };
                        (c.center(), side / 2.0)
                    })
                    .collect();
                return Err(Error::ResolutionExhausted { atom: t, depth: schedule.max_level, trace });
            }
        }
    }
    Ok(BaireLocation {
        center: CondVector::new(on.clone(), center)?,
        radius: CondReal::new(on.clone(), radius)?,
        index: CondNat::new(ConditionalValue::new(on, index)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::analysis::closed::{AtomClosedSet, ConvexPiece};

    fn interval(lo: f64, hi: f64) -> AtomClosedSet {
        AtomClosedSet::Convex(ConvexPiece::interval_product(vec![(lo, hi)]).unwrap())
    }

    fn check(space: &SpaceBox, sets: &[ClosedSet], loc: &BaireLocation) {
        for (t, c) in loc.center.iter() {
            let r = *loc.radius.at(t);
            assert!(r > 0.0);
            let e = sets[loc.index.at(t) as usize - 1].at(t);
            let bounds: Vec<(f64, f64)> = c.iter().map(|x| (x - r, x + r)).collect();
            for p in box_grid(&bounds, 100) {
                assert!(e.contains(&p, 1e-12));
                assert!(p.iter().zip(space.at(t)).all(|(x, (lo, hi))| *x >= lo - 1e-12 && *x <= hi + 1e-12));
            }
        }
    }

    #[test]
    fn two_halves() {
        let a = Algebra::new(1).unwrap();
        let space = SpaceBox::constant(&a.one(), vec![(0.0, 1.0)]);
        let sets = vec![
            ClosedSet::constant(&a.one(), interval(0.0, 0.5)),
            ClosedSet::constant(&a.one(), interval(0.5, 1.0)),
        ];
        let loc = baire_locate(&space, &sets, &BaireSchedule::default()).unwrap();
        assert_eq!(loc.index.at(0), 1);
        check(&space, &sets, &loc);
    }

    #[test]
    fn whole_space() {
        let a = Algebra::new(1).unwrap();
        let space = SpaceBox::constant(&a.one(), vec![(0.0, 1.0)]);
        let sets = vec![ClosedSet::constant(&a.one(), interval(0.0, 1.0))];
        let loc = baire_locate(&space, &sets, &BaireSchedule::default()).unwrap();
        assert_eq!((loc.index.at(0), *loc.radius.at(0)), (1, 0.5));
    }

    #[test]
    fn per_atom_swap() {
        let a = Algebra::new(2).unwrap();
        let space = SpaceBox::constant(&a.one(), vec![(0.0, 1.0)]);
        let e1 = ClosedSet::new(a.one(), [(0, interval(0.0, 1.0)), (1, interval(0.0, 0.0))].into()).unwrap();
        let e2 = ClosedSet::new(a.one(), [(0, interval(1.0, 1.0)), (1, interval(0.0, 1.0))].into()).unwrap();
        let sets = vec![e1, e2];
        let loc = baire_locate(&space, &sets, &BaireSchedule::default()).unwrap();
        assert_eq!((loc.index.at(0), loc.index.at(1)), (1, 2));
        check(&space, &sets, &loc);
    }

    #[test]
    fn exhausted_and_uncovered() {
        let a = Algebra::new(1).unwrap();
        let space = SpaceBox::constant(&a.one(), vec![(0.0, 1.0)]);
        // sets whose pieces are thinner than the finest cell
        let thin: Vec<ConvexPiece> =
            (0..=16).map(|k| ConvexPiece::interval_product(vec![(k as f64 / 16.0, k as f64 / 16.0)]).unwrap()).collect();
        let gaps = vec![ClosedSet::constant(&a.one(), AtomClosedSet::FiniteUnion(thin))];
        let sched = BaireSchedule { max_level: 4, verify_factor: 10 };
        match baire_locate(&space, &gaps, &sched) {
            Err(Error::ResolutionExhausted { depth, trace, .. }) => {
                assert_eq!(depth, 4);
                assert_eq!(trace.len(), 5);
            }
            other => panic!("{other:?}"),
        }
        let half = vec![ClosedSet::constant(&a.one(), interval(0.0, 0.5))];
        assert!(matches!(baire_locate(&space, &half, &sched), Err(Error::HypothesisViolated(_))));
    }
}
