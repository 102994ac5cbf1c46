use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::linear::{dot, AtomBody};

/// A closed convex set on one atom.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexPiece {
    /// `Π_i [lo_i, hi_i]`.
    IntervalProduct(Vec<(f64, f64)>),
    /// `center + C` for a symmetric polytope `C`.
    HBody { center: Vec<f64>, body: AtomBody },
}

impl ConvexPiece {
    pub fn interval_product(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidValue("interval product needs at least one factor".into()));
        }
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidValue(format!("factor {i} is not a closed interval: [{lo}, {hi}]")));
            }
        }
        Ok(ConvexPiece::IntervalProduct(bounds))
    }

    pub fn hbody(center: Vec<f64>, body: AtomBody) -> Result<Self> {
        if center.len() != body.dim() {
            return Err(Error::InvalidValue(format!(
                "center has {} coordinates, body dimension is {}",
                center.len(),
                body.dim()
            )));
        }
        Ok(ConvexPiece::HBody { center, body })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexPiece::IntervalProduct(b) => b.len(),
            ConvexPiece::HBody { body, .. } => body.dim(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            ConvexPiece::IntervalProduct(b) => b.iter().zip(x).all(|((lo, hi), v)| *v >= lo - tol && *v <= hi + tol),
            ConvexPiece::HBody { center, body } => body.facets().iter().all(|f| {
                let shifted: f64 = dot(&f.u, x) - dot(&f.u, center);
                shifted.abs() <= f.c + tol * (1.0 + f.c)
            }),
        }
    }

    /// Bounding box, when the piece is bounded.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            ConvexPiece::IntervalProduct(b) => Some(b.clone()),
            ConvexPiece::HBody { center, body } => {
                let h = body.half_widths().ok()?;
                Some(center.iter().zip(h).map(|(c, w)| (c - w, c + w)).collect())
            }
        }
    }
}

/// A closed set on one atom, in one of the forms whose closedness is
/// evident from the representation.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomClosedSet {
    Convex(ConvexPiece),
    FiniteUnion(Vec<ConvexPiece>),
}

impl AtomClosedSet {
    pub fn pieces(&self) -> &[ConvexPiece] {
        match self {
            AtomClosedSet::Convex(p) => std::slice::from_ref(p),
            AtomClosedSet::FiniteUnion(ps) => ps,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.pieces().first().map(|p| p.dim())
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.pieces().iter().any(|p| p.contains(x, tol))
    }

    /// True when every point listed lies in one common convex piece, which
    /// then contains their convex hull.
    pub fn hull_inside(&self, points: &[Vec<f64>], tol: f64) -> bool {
        self.pieces().iter().any(|p| points.iter().all(|x| p.contains(x, tol)))
    }

    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        let mut out: Option<Vec<(f64, f64)>> = None;
        for p in self.pieces() {
            let b = p.bounding_box()?;
            out = Some(match out {
                None => b,
                Some(o) => o.iter().zip(&b).map(|(a, c)| (a.0.min(c.0), a.1.max(c.1))).collect(),
            });
        }
        out
    }

    pub fn validate(&self) -> Result<usize> {
        let dim = self.dim().ok_or(Error::EmptyFamily)?;
        if self.pieces().iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidValue("pieces of a union must share a dimension".into()));
        }
        Ok(dim)
    }
}

/// A closed set per atom.
pub type ClosedSet = ConditionalValue<AtomClosedSet>;

/// Points of the grid with `steps + 1` ticks per axis over a box.
pub fn box_grid(bounds: &[(f64, f64)], steps: usize) -> Vec<Vec<f64>> {
    let d = bounds.len();
    let steps = steps.max(1);
    let total = (steps + 1).pow(d as u32);
    (0..total)
        .map(|mut code| {
            bounds
                .iter()
                .map(|(lo, hi)| {
                    let i = code % (steps + 1);
                    code /= steps + 1;
                    lo + (hi - lo) * i as f64 / steps as f64
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_membership() {
        let s = AtomClosedSet::FiniteUnion(vec![
            ConvexPiece::interval_product(vec![(0.0, 0.5)]).unwrap(),
            ConvexPiece::hbody(vec![2.0], AtomBody::cube(1, 0.5).unwrap()).unwrap(),
        ]);
        assert!(s.contains(&[0.25], 0.0));
        assert!(s.contains(&[2.5], 0.0));
        assert!(!s.contains(&[1.0], 0.0));
        assert!(!s.hull_inside(&[vec![0.0], vec![2.0]], 0.0));
        assert_eq!(s.bounding_box(), Some(vec![(0.0, 2.5)]));
        assert_eq!(box_grid(&[(0.0, 1.0), (0.0, 2.0)], 2).len(), 9);
    }
}
