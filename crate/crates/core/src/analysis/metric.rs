use nalgebra::DMatrix;

use crate::algebra::Condition;
use crate::error::{Error, Result};
use crate::linear::{dot, sphere_grid, CondNorm, CondVector, PNorm, SymmetricBody};
use crate::numbers::CondReal;

/// A continuous seminorm on the per-atom space.
#[derive(Debug, Clone, PartialEq)]
pub enum Seminorm {
    /// `x ↦ |⟨f, x⟩|`.
    Functional(CondVector),
    /// Gauge of a symmetric body.
    Gauge(SymmetricBody),
}

impl Seminorm {
    pub fn on(&self) -> &Condition {
        match self {
            Seminorm::Functional(f) => f.on(),
            Seminorm::Gauge(b) => b.on(),
        }
    }

    pub fn eval_atom(&self, t: usize, x: &[f64]) -> Result<f64> {
        match self {
            Seminorm::Functional(f) => {
                let f = f.at(t);
                if f.len() != x.len() {
                    return Err(Error::DimensionMismatch { atom: t, expected: f.len(), got: x.len() });
                }
                Ok(dot(f, x).abs())
            }
            Seminorm::Gauge(b) => {
                let b = b.at(t);
                b.check_dim(t, x.len())?;
                Ok(b.gauge(x))
            }
        }
    }

    pub fn eval(&self, x: &CondVector) -> Result<CondReal> {
        self.on().ensure_eq(x.on())?;
        x.try_map(|t, v| self.eval_atom(t, v))
    }
}

/// Atoms where `x ∈ center + U_{Q,r}`, i.e. `sup_{p∈Q} p(x − center) ≤ r`.
pub fn neighborhood_member(q: &[Seminorm], r: &CondReal, center: &CondVector, x: &CondVector) -> Result<Condition> {
    if q.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if let Some((t, _)) = r.iter().find(|(_, v)| v.is_nan() || **v <= 0.0) {
        return Err(Error::InvalidValue(format!("radius must be positive, atom {t}")));
    }
    x.on().ensure_eq(center.on())?;
    r.on().ensure_eq(x.on())?;
    let mut inside = Vec::new();
    for (t, a) in x.iter() {
        let b = center.at(t);
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { atom: t, expected: b.len(), got: a.len() });
        }
        let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
        let mut sup = 0.0f64;
        for p in q {
            p.on().ensure_eq(x.on())?;
            sup = sup.max(p.eval_atom(t, &d)?);
        }
        if sup <= *r.at(t) {
            inside.push(t);
        }
    }
    x.algebra().condition(inside)
}

/// A conditional metric on a per-atom space.
#[derive(Debug, Clone, PartialEq)]
pub enum CondMetric {
    /// `d(x, y) = ‖x − y‖`.
    Norm(CondNorm),
    /// `d(x, y) = Σ_n 2⁻ⁿ |x*_n(x − y)| / ‖x*_n‖` over a finite list.
    Seminorm { functionals: Vec<CondVector>, dual_norms: Vec<CondReal> },
}

impl CondMetric {
    pub fn on(&self) -> &Condition {
        match self {
            CondMetric::Norm(n) => n.on(),
            CondMetric::Seminorm { dual_norms, .. } => dual_norms[0].on(),
        }
    }

    pub fn atom_distance(&self, t: usize, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { atom: t, expected: x.len(), got: y.len() });
        }
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        match self {
            CondMetric::Norm(n) => Ok(n.at(t).eval(&diff)),
            CondMetric::Seminorm { functionals, dual_norms } => {
                let mut w = 0.5;
                let mut s = 0.0;
                for (f, n) in functionals.iter().zip(dual_norms) {
                    let f = f.at(t);
                    if f.len() != diff.len() {
                        return Err(Error::DimensionMismatch { atom: t, expected: f.len(), got: diff.len() });
                    }
                    s += w * dot(f, &diff).abs() / n.at(t);
                    w *= 0.5;
                }
                Ok(s)
            }
        }
    }

    pub fn distance(&self, x: &CondVector, y: &CondVector) -> Result<CondReal> {
        self.on().ensure_eq(x.on())?;
        x.on().ensure_eq(y.on())?;
        x.try_map(|t, a| self.atom_distance(t, a, y.at(t)))
    }
}

/// Emitted when the functional list fails to separate points.
#[derive(Debug, Clone, PartialEq)]
pub struct NotTotalWarning {
    /// Atoms where a nonzero vector is annihilated by every functional.
    pub on: Condition,
    /// A unit vector annihilated by every functional, on those atoms.
    pub witness: CondVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormMetric {
    pub metric: CondMetric,
    pub warning: Option<NotTotalWarning>,
}

/// Unit null-space vector of the functionals on atom `t`, if any.
fn common_kernel(rows: &[&Vec<f64>], dim: usize) -> Option<Vec<f64>> {
    // zero rows pad short lists so the SVD exposes the whole null space
    let n = rows.len().max(dim);
    let m = DMatrix::from_fn(n, dim, |i, j| if i < rows.len() { rows[i][j] } else { 0.0 });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let (k, smallest) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, s)| (k, *s))?;
    if top > 0.0 && smallest > 1e-10 * top {
        return None;
    }
    Some(v_t.row(k).iter().cloned().collect())
}

/// The metric `d(x, y) = Σ_{n≤k} 2⁻ⁿ |x*_n(x − y)| / ‖x*_n‖`, with dual
/// norms taken with respect to `norm`.
pub fn seminorm_metric(functionals: &[CondVector], norm: &CondNorm) -> Result<SeminormMetric> {
    let first = functionals.first().ok_or(Error::EmptyFamily)?;
    let on = first.on().clone();
    on.ensure_eq(norm.on())?;
    let mut dual_norms = Vec::with_capacity(functionals.len());
    for (i, f) in functionals.iter().enumerate() {
        on.ensure_eq(f.on())?;
        let d = f.try_map(|t, v| norm.at(t).dual_eval(v))?;
        if d.iter().any(|(_, v)| v.is_nan() || *v <= 0.0) {
            return Err(Error::ZeroFunctional { index: i });
        }
        dual_norms.push(d);
    }
    let mut bad = std::collections::BTreeMap::new();
    for t in on.atoms() {
        let rows: Vec<&Vec<f64>> = functionals.iter().map(|f| f.at(t)).collect();
        let dim = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { atom: t, expected: dim, got: r.len() });
        }
        if let Some(w) = common_kernel(&rows, dim) {
            bad.insert(t, w);
        }
    }
    let warning = if bad.is_empty() {
        None
    } else {
        let c = on.algebra().condition(bad.keys().copied())?;
        Some(NotTotalWarning { witness: CondVector::new(c.clone(), bad)?, on: c })
    };
    Ok(SeminormMetric { metric: CondMetric::Seminorm { functionals: functionals.to_vec(), dual_norms }, warning })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalSet {
    /// Norming functionals of the points.
    pub functionals: Vec<CondVector>,
    pub is_total: bool,
    /// Atoms where the functionals separate points.
    pub total_on: Condition,
    /// Near-annihilated unit vectors on the remaining atoms.
    pub witness: Option<CondVector>,
}

/// Largest dimension handled by sphere search; above it totality is decided by rank.
pub const TOTAL_SEARCH_DIM_CAP: usize = 3;

/// Norming functionals of the points and a totality test: on each atom
/// the unit sphere is searched for a vector on which every functional is
/// below the grid spacing (rank test above dimension 3).
pub fn total_set(points: &[CondVector], p: PNorm, resolution: usize) -> Result<TotalSet> {
    let first = points.first().ok_or(Error::EmptyFamily)?;
    let on = first.on().clone();
    let functionals: Vec<CondVector> = points
        .iter()
        .map(|x| {
            on.ensure_eq(x.on())?;
            Ok(x.map(|_, v| p.norming_vector(v)))
        })
        .collect::<Result<_>>()?;
    let res = resolution.max(4);
    let spacing = std::f64::consts::PI / res as f64;
    let mut total = Vec::new();
    let mut bad = std::collections::BTreeMap::new();
    for t in on.atoms() {
        let rows: Vec<&Vec<f64>> = functionals.iter().map(|f| f.at(t)).collect();
        let dim = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { atom: t, expected: dim, got: r.len() });
        }
        if dim > TOTAL_SEARCH_DIM_CAP {
            match common_kernel(&rows, dim) {
                Some(w) => {
                    bad.insert(t, w);
                }
                None => total.push(t),
            }
            continue;
        }
        let scale = rows.iter().map(|r| PNorm::L2.eval(r)).fold(0.0, f64::max);
        let threshold = spacing * scale;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for u in sphere_grid(dim, res)? {
            let v = rows.iter().map(|r| dot(r, &u).abs()).fold(0.0, f64::max);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, u));
            }
        }
        let (v, u) = best.expect("nonempty grid");
        if scale == 0.0 || v <= threshold {
            bad.insert(t, u);
        } else {
            total.push(t);
        }
    }
    let witness = if bad.is_empty() {
        None
    } else {
        let c = on.algebra().condition(bad.keys().copied())?;
        Some(CondVector::new(c, bad)?)
    };
    Ok(TotalSet { functionals, is_total: witness.is_none(), total_on: on.algebra().condition(total)?, witness })
}

/// Conditional metric induced by a norm.
pub fn norm_metric(norm: &CondNorm) -> CondMetric {
    CondMetric::Norm(norm.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn v(a: &Algebra, x: &[f64]) -> CondVector {
        CondVector::constant(&a.one(), x.to_vec())
    }

    #[test]
    fn neighborhood_examples() {
        let a = Algebra::new(1).unwrap();
        let q = [Seminorm::Functional(v(&a, &[1.0, 0.0]))];
        let r = CondReal::constant(&a.one(), 1.0);
        let zero = v(&a, &[0.0, 0.0]);
        assert!(neighborhood_member(&q, &r, &zero, &v(&a, &[0.5, 7.0])).unwrap().is_one());
        assert!(neighborhood_member(&q, &r, &zero, &zero).unwrap().is_one());
        assert_eq!(neighborhood_member(&[], &r, &zero, &zero), Err(Error::EmptyFamily));
        let b = Algebra::new(2).unwrap();
        let cube = SymmetricBody::constant(&b.one(), crate::linear::AtomBody::cube(2, 1.0).unwrap());
        let x = CondVector::new(b.one(), [(0, vec![2.0, 0.0]), (1, vec![0.5, 0.0])].into()).unwrap();
        let z = CondVector::constant(&b.one(), vec![0.0, 0.0]);
        let m = neighborhood_member(&[Seminorm::Gauge(cube)], &CondReal::constant(&b.one(), 1.0), &z, &x).unwrap();
        assert_eq!(m, b.atom(1).unwrap());
    }

    #[test]
    fn seminorm_metric_examples() {
        let a = Algebra::new(1).unwrap();
        let l2 = CondNorm::uniform(&a.one(), PNorm::L2);
        let m = seminorm_metric(&[v(&a, &[1.0, 0.0]), v(&a, &[0.0, 1.0])], &l2).unwrap();
        assert!(m.warning.is_none());
        let d = m.metric.distance(&v(&a, &[1.0, 1.0]), &v(&a, &[0.0, 0.0])).unwrap();
        assert_eq!(*d.at(0), 0.75);
        let m = seminorm_metric(&[v(&a, &[1.0, 0.0])], &l2).unwrap();
        let w = m.warning.unwrap();
        assert!(w.witness.at(0)[0].abs() < 1e-12 && (w.witness.at(0)[1].abs() - 1.0).abs() < 1e-12);
        assert_eq!(*m.metric.distance(&v(&a, &[0.0, 1.0]), &v(&a, &[0.0, 0.0])).unwrap().at(0), 0.0);
        assert_eq!(seminorm_metric(&[v(&a, &[0.0, 0.0])], &l2).unwrap_err(), Error::ZeroFunctional { index: 0 });
    }

    #[test]
    fn total_set_examples() {
        let a = Algebra::new(1).unwrap();
        let t = total_set(&[v(&a, &[1.0, 0.0]), v(&a, &[0.0, 1.0])], PNorm::L2, 64).unwrap();
        assert!(t.is_total);
        assert_eq!(t.functionals[1].at(0), &vec![0.0, 1.0]);
        let t = total_set(&[v(&a, &[1.0, 0.0])], PNorm::L2, 64).unwrap();
        assert!(!t.is_total);
        let w = t.witness.unwrap();
        assert!(w.at(0)[0].abs() < 0.05);
        assert!(total_set(&[v(&a, &[1.0])], PNorm::L2, 64).unwrap().is_total);
    }
}
