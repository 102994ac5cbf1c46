//! Symmetric convex polytopes in halfspace form.
//!
//! A body on one atom is `{x : |⟨u_j, x⟩| ≤ c_j for all j}` with `c_j > 0`.
//! Such a set is convex, balanced and closed, and contains a neighbourhood
//! of the origin. It is bounded exactly when the directions span the space.
//!
//! Minkowski combinations are taken on a shared direction grid: the result
//! keeps the grid and uses `α·h_A(u_j) + β·h_B(u_j)` as offsets, which is the
//! smallest grid polytope containing `αA + βB`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{dot, CondVector};
use crate::algebra::Condition;
use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::numbers::CondReal;

/// Largest per-atom dimension handled by vertex enumeration.
pub const VERTEX_DIM_CAP: usize = 4;

const FEAS_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub u: Vec<f64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomBody {
    dim: usize,
    facets: Vec<Facet>,
}

/// A symmetric body per atom.
pub type SymmetricBody = ConditionalValue<AtomBody>;

/// Directions shared by bodies that are to be combined.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    dim: usize,
    directions: Vec<Vec<f64>>,
}

impl DirectionGrid {
    /// The standard basis followed by `extra` random unit directions.
    pub fn standard<R: Rng + ?Sized>(dim: usize, extra: usize, rng: &mut R) -> Self {
        let mut directions: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        while directions.len() < dim + extra {
            let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 0.1 {
                directions.push(v.into_iter().map(|a| a / n).collect());
            }
        }
        Self { dim, directions }
    }

    pub fn axes(dim: usize) -> Self {
        Self::from_directions(dim, (0..dim).map(|i| (0..dim).map(|j| (i == j) as u8 as f64).collect()).collect())
    }

    pub fn from_directions(dim: usize, directions: Vec<Vec<f64>>) -> Self {
        Self { dim, directions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// The grid body whose offsets are `support(u_j)`.
    pub fn body_from_support(&self, support: impl Fn(&[f64]) -> f64) -> Result<AtomBody> {
        let facets = self
            .directions
            .iter()
            .map(|u| Facet { u: u.clone(), c: support(u) })
            .collect();
        AtomBody::new(self.dim, facets)
    }

    /// Grid body of the unit ball of `‖·‖_p`: offsets are the dual norms.
    pub fn unit_ball(&self, p: super::PNorm) -> AtomBody {
        self.body_from_support(|u| p.dual().eval(u)).expect("dual norms of nonzero directions are positive")
    }
}

impl AtomBody {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidValue("body dimension must be positive".into()));
        }
        for (j, f) in facets.iter().enumerate() {
            if f.u.len() != dim {
                return Err(Error::InvalidValue(format!("facet {j} has {} coordinates, dimension is {dim}", f.u.len())));
            }
            if !(f.c.is_finite() && f.c > 0.0) {
                return Err(Error::InvalidValue(format!("facet {j} offset {} is not a positive real", f.c)));
            }
            if f.u.iter().any(|v| !v.is_finite()) || f.u.iter().all(|v| *v == 0.0) {
                return Err(Error::InvalidValue(format!("facet {j} direction is zero or not finite")));
            }
        }
        Ok(Self { dim, facets })
    }

    /// `{|x_i| ≤ r}`.
    pub fn cube(dim: usize, r: f64) -> Result<Self> {
        DirectionGrid::axes(dim).body_from_support(|u| r * super::PNorm::L1.eval(u))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn directions(&self) -> impl Iterator<Item = &[f64]> {
        self.facets.iter().map(|f| f.u.as_slice())
    }

    pub fn same_grid(&self, other: &AtomBody) -> bool {
        self.dim == other.dim
            && self.facets.len() == other.facets.len()
            && self.facets.iter().zip(&other.facets).all(|(a, b)| a.u == b.u)
    }

    pub(crate) fn check_dim(&self, atom: usize, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::DimensionMismatch { atom, expected: self.dim, got });
        }
        Ok(())
    }

    /// Minkowski gauge `inf{r > 0 : x ∈ rC} = max_j |⟨u_j,x⟩| / c_j`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.facets.iter().fold(0.0, |m, f| m.max(dot(&f.u, x).abs() / f.c))
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| dot(&f.u, x).abs() <= f.c * (1.0 + tol))
    }

    pub fn scaled(&self, s: f64) -> Result<AtomBody> {
        let facets = self.facets.iter().map(|f| Facet { u: f.u.clone(), c: f.c * s }).collect();
        AtomBody::new(self.dim, facets)
    }

    fn direction_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.facets.len(), self.dim, |i, j| self.facets[i].u[j])
    }

    /// Rank of the direction matrix.
    pub fn direction_rank(&self) -> usize {
        if self.facets.is_empty() {
            return 0;
        }
        let m = self.direction_matrix();
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|s| **s > top * 1e-10).count()
    }

    pub fn is_bounded(&self) -> bool {
        self.direction_rank() == self.dim
    }

    /// A unit vector annihilated by every direction, when the body is unbounded.
    pub fn unbounded_direction(&self) -> Option<Vec<f64>> {
        if self.is_bounded() {
            return None;
        }
        if self.facets.is_empty() {
            let mut e = vec![0.0; self.dim];
            e[0] = 1.0;
            return Some(e);
        }
        let m = self.direction_matrix();
        let mtm = m.transpose() * &m;
        let eig = mtm.symmetric_eigen();
        let (idx, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) });
        let v = eig.eigenvectors.column(idx);
        let n = v.norm();
        Some(v.iter().map(|a| a / n).collect())
    }

    /// Vertices of the polytope. Requires a bounded body of dimension at most
    /// [`VERTEX_DIM_CAP`].
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        if self.dim > VERTEX_DIM_CAP {
            return Err(Error::UnsupportedDimension { dim: self.dim, cap: VERTEX_DIM_CAP });
        }
        if !self.is_bounded() {
            return Err(Error::InvalidValue("vertex enumeration of an unbounded body".into()));
        }
        let d = self.dim;
        let n = self.facets.len();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut combo: Vec<usize> = (0..d).collect();
        loop {
            let m = DMatrix::from_fn(d, d, |i, j| self.facets[combo[i]].u[j]);
            if let Some(inv) = m.clone().try_inverse() {
                let cond = m.norm() * inv.norm();
                if cond.is_finite() && cond < 1e12 {
                    // sign patterns with the first sign fixed; negation gives the rest
                    for mask in 0..(1usize << (d - 1)) {
                        let rhs = DVector::from_fn(d, |i, _| {
                            let neg = i > 0 && mask & (1 << (i - 1)) != 0;
                            let c = self.facets[combo[i]].c;
                            if neg {
                                -c
                            } else {
                                c
                            }
                        });
                        let x: Vec<f64> = (&inv * rhs).iter().copied().collect();
                        if self.contains(&x, FEAS_REL) {
                            for cand in [x.clone(), x.iter().map(|v| -v).collect()] {
                                let scale = 1.0 + cand.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                                let dup = out.iter().any(|v: &Vec<f64>| {
                                    v.iter().zip(&cand).all(|(a, b)| (a - b).abs() <= 1e-9 * scale)
                                });
                                if !dup {
                                    out.push(cand);
                                }
                            }
                        }
                    }
                }
            }
            // next combination
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if combo[i] < n - d + i {
                    combo[i] += 1;
                    for k in i + 1..d {
                        combo[k] = combo[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Support function `h(f) = max_{x ∈ C} ⟨f, x⟩` (symmetric, so also of `|⟨f,x⟩|`).
    pub fn support(&self, f: &[f64]) -> Result<f64> {
        self.check_dim(0, f.len())?;
        Ok(support_from_vertices(&self.vertices()?, f))
    }

    /// Per-coordinate half-widths of the bounding box.
    pub fn half_widths(&self) -> Result<Vec<f64>> {
        let verts = self.vertices()?;
        Ok((0..self.dim).map(|i| verts.iter().fold(0.0f64, |m, v| m.max(v[i].abs()))).collect())
    }
}

fn support_from_vertices(verts: &[Vec<f64>], f: &[f64]) -> f64 {
    verts.iter().fold(0.0f64, |m, v| m.max(dot(f, v).abs()))
}

/// Support values on the body's own directions, per atom.
pub fn grid_support(body: &SymmetricBody) -> Result<ConditionalValue<Vec<f64>>> {
    body.try_map(|t, b| {
        let verts = b.vertices().map_err(|e| match e {
            Error::InvalidValue(_) => Error::NotBounded(single(body.on(), t)),
            other => other,
        })?;
        Ok(b.facets.iter().map(|f| support_from_vertices(&verts, &f.u)).collect())
    })
}

fn single(on: &Condition, t: usize) -> Condition {
    on.algebra().atom(t).expect("atom of a valid condition")
}

/// `‖x‖_C` per atom.
pub fn gauge(body: &SymmetricBody, x: &CondVector) -> Result<CondReal> {
    x.on().ensure_eq(body.on())?;
    x.try_map(|t, v| {
        let b = body.at(t);
        b.check_dim(t, v.len())?;
        Ok(b.gauge(v))
    })
}

/// `h_C(u)` per atom.
pub fn support_function(body: &SymmetricBody, u: &CondVector) -> Result<CondReal> {
    u.on().ensure_eq(body.on())?;
    u.try_map(|t, v| {
        let b = body.at(t);
        b.check_dim(t, v.len())?;
        if !b.is_bounded() {
            return Err(Error::NotBounded(single(body.on(), t)));
        }
        b.support(v)
    })
}

fn check_grids(a: &SymmetricBody, b: &SymmetricBody) -> Result<()> {
    a.on().ensure_eq(b.on())?;
    for (t, ba) in a.iter() {
        if !ba.same_grid(b.at(t)) {
            return Err(Error::GridMismatch { atom: t });
        }
    }
    Ok(())
}

/// Grid polytope of `αA + βB` from per-atom support values.
pub fn combine_supports(
    alpha: f64,
    a: &SymmetricBody,
    ha: &ConditionalValue<Vec<f64>>,
    beta: f64,
    hb: &ConditionalValue<Vec<f64>>,
) -> Result<SymmetricBody> {
    a.try_map(|t, body| {
        let facets = body
            .facets
            .iter()
            .enumerate()
            .map(|(j, f)| Facet { u: f.u.clone(), c: alpha * ha.at(t)[j] + beta * hb.at(t)[j] })
            .collect();
        AtomBody::new(body.dim, facets)
    })
}

/// `αA + βB` on the shared direction grid.
pub fn minkowski_combine(alpha: f64, a: &SymmetricBody, beta: f64, b: &SymmetricBody) -> Result<SymmetricBody> {
    check_grids(a, b)?;
    if !(alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0) {
        return Err(Error::InvalidValue(format!("combination weights ({alpha}, {beta}) must be nonnegative and not both zero")));
    }
    let ha = grid_support(a)?;
    let hb = grid_support(b)?;
    combine_supports(alpha, a, &ha, beta, &hb)
}

/// Atoms where `A ⊆ B`, decided by checking the vertices of `A` against the
/// inequalities of `B`.
pub fn body_inclusion(a: &SymmetricBody, b: &SymmetricBody) -> Result<Condition> {
    a.on().ensure_eq(b.on())?;
    let mut included = Vec::new();
    for (t, ba) in a.iter() {
        let bb = b.at(t);
        if ba.dim > VERTEX_DIM_CAP {
            return Err(Error::UnsupportedDimension { dim: ba.dim, cap: VERTEX_DIM_CAP });
        }
        bb.check_dim(t, ba.dim)?;
        if !ba.is_bounded() {
            // an unbounded set sits inside a body only if the body is unbounded the same way
            let dir = ba.unbounded_direction().expect("unbounded");
            if bb.is_bounded() || !bb.facets.iter().all(|f| dot(&f.u, &dir).abs() < 1e-12) {
                continue;
            }
            return Err(Error::NotBounded(single(a.on(), t)));
        }
        if ba.vertices()?.iter().all(|v| bb.contains(v, FEAS_REL)) {
            included.push(t);
        }
    }
    a.algebra().condition(included)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linear::PNorm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn body2(facets: &[([f64; 2], f64)]) -> AtomBody {
        AtomBody::new(2, facets.iter().map(|(u, c)| Facet { u: u.to_vec(), c: *c }).collect()).unwrap()
    }

    /// Membership-oracle bisection for the gauge.
    fn bisect_gauge(b: &AtomBody, x: &[f64]) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let member = |r: f64| b.contains(&x.iter().map(|v| v / r).collect::<Vec<_>>(), 0.0);
        while !member(hi) {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid > 0.0 && member(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    #[test]
    fn gauge_of_axis_box() {
        let c = body2(&[([1.0, 0.0], 1.0), ([0.0, 1.0], 2.0)]);
        assert_eq!(c.gauge(&[3.0, 2.0]), 3.0);
        assert!((bisect_gauge(&c, &[3.0, 2.0]) - 3.0).abs() < 1e-12);
        assert_eq!(c.gauge(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn gauge_homogeneity_per_atom() {
        let a = Algebra::new(2).unwrap();
        let c = SymmetricBody::constant(&a.one(), body2(&[([1.0, 0.0], 1.0), ([0.0, 1.0], 2.0)]));
        let x = CondVector::constant(&a.one(), vec![3.0, 2.0]);
        let r = [-2.0, 0.5];
        let rx = x.map(|t, v| v.iter().map(|a| a * r[t]).collect());
        let g = gauge(&c, &x).unwrap();
        let gr = gauge(&c, &rx).unwrap();
        for t in 0..2 {
            assert!((gr.at(t) - r[t].abs() * g.at(t)).abs() < 1e-12);
        }
        let bad = CondVector::constant(&a.one(), vec![1.0]);
        assert!(matches!(gauge(&c, &bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn vertices_of_square_and_hexagon() {
        let sq = AtomBody::cube(2, 1.0).unwrap();
        let mut v = sq.vertices().unwrap();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]]);
        let s = 3f64.sqrt() / 2.0;
        let hex = body2(&[([1.0, 0.0], s), ([0.5, s], s), ([-0.5, s], s)]);
        assert_eq!(hex.vertices().unwrap().len(), 6);
        for v in hex.vertices().unwrap() {
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn slab_is_unbounded() {
        let slab = body2(&[([1.0, 0.0], 1.0)]);
        assert!(!slab.is_bounded());
        let d = slab.unbounded_direction().unwrap();
        assert!(d[0].abs() < 1e-12 && (d[1].abs() - 1.0).abs() < 1e-12);
        assert!(slab.vertices().is_err());
    }

    #[test]
    fn vertex_enumeration_dimension_cap() {
        let b = AtomBody::cube(5, 1.0).unwrap();
        assert!(matches!(b.vertices(), Err(Error::UnsupportedDimension { dim: 5, cap: 4 })));
        assert_eq!(AtomBody::cube(4, 1.0).unwrap().vertices().unwrap().len(), 16);
    }

    #[test]
    fn combine_box_and_ball() {
        let a = Algebra::new(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = DirectionGrid::standard(2, 8, &mut rng);
        let k = SymmetricBody::constant(&a.one(), grid.unit_ball(PNorm::LInf));
        let b = SymmetricBody::constant(&a.one(), grid.unit_ball(PNorm::L2));
        let s = minkowski_combine(2.0, &k, 0.5, &b).unwrap();
        assert!((s.at(0).facets()[0].c - 2.5).abs() < 1e-12);
        let e1 = CondVector::constant(&a.one(), vec![1.0, 0.0]);
        assert!((support_function(&s, &e1).unwrap().at(0) - 2.5).abs() < 1e-9);

        let same = minkowski_combine(1.0, &k, 0.0, &b).unwrap();
        for (f, g) in same.at(0).facets().iter().zip(k.at(0).facets()) {
            assert!((f.c - g.c).abs() < 1e-12);
        }
        let doubled = minkowski_combine(1.0, &k, 1.0, &k).unwrap();
        for (f, g) in doubled.at(0).facets().iter().zip(k.at(0).facets()) {
            assert!((f.c - 2.0 * g.c).abs() < 1e-12);
        }
    }

    #[test]
    fn combine_requires_common_grid() {
        let a = Algebra::new(1).unwrap();
        let k = SymmetricBody::constant(&a.one(), AtomBody::cube(2, 1.0).unwrap());
        let h = SymmetricBody::constant(&a.one(), body2(&[([1.0, 0.0], 1.0), ([0.0, 1.0], 1.0), ([1.0, 1.0], 1.0)]));
        assert_eq!(minkowski_combine(1.0, &k, 1.0, &h), Err(Error::GridMismatch { atom: 0 }));
    }

    #[test]
    fn inclusion_per_atom() {
        let a = Algebra::new(2).unwrap();
        let unit = SymmetricBody::constant(&a.one(), AtomBody::cube(2, 1.0).unwrap());
        let double = SymmetricBody::constant(&a.one(), AtomBody::cube(2, 2.0).unwrap());
        assert!(body_inclusion(&unit, &double).unwrap().is_one());
        assert!(body_inclusion(&double, &unit).unwrap().is_zero());
        let mixed = SymmetricBody::from_fn(&a.one(), |t| AtomBody::cube(2, [1.0, 3.0][t]).unwrap());
        assert_eq!(body_inclusion(&mixed, &double).unwrap(), a.atom(0).unwrap());
    }
}
