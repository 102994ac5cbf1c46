//! Conditionally linear maps between per-atom finite-dimensional spaces.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norm::{AtomNorm, CondNorm, PNorm};
use super::{dot, CondVector};
use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::numbers::CondReal;

/// A real matrix per atom (rows = codomain dimension).
pub type CondLinearMap = ConditionalValue<DMatrix<f64>>;

/// Sign-vector enumeration is exponential; beyond this many coordinates it is refused.
const SIGN_ENUM_CAP: usize = 20;

const POWER_REL_TOL: f64 = 1e-9;
const POWER_MAX_ITERS: usize = 10_000;

impl ConditionalValue<DMatrix<f64>> {
    /// `T(x)` per atom.
    pub fn apply(&self, x: &CondVector) -> Result<CondVector> {
        self.zip_with(x, |_, m, v| (m * DVector::from_column_slice(v)).iter().copied().collect())
            .and_then(|y| {
                for (t, m) in self.iter() {
                    if m.ncols() != x.at(t).len() {
                        return Err(Error::DimensionMismatch { atom: t, expected: m.ncols(), got: x.at(t).len() });
                    }
                }
                Ok(y)
            })
    }

    /// The functional `x ↦ ⟨f, x⟩` as a one-row map.
    pub fn functional(f: &CondVector) -> CondLinearMap {
        f.map(|_, v| DMatrix::from_row_slice(1, v.len(), v))
    }

    /// First row per atom, for maps that are functionals.
    pub fn as_functional(&self) -> CondVector {
        self.map(|_, m| m.row(0).iter().copied().collect())
    }
}

fn max_over_signs(n: usize, mut f: impl FnMut(&[f64]) -> f64) -> Result<f64> {
    if n > SIGN_ENUM_CAP {
        return Err(Error::UnsupportedDimension { dim: n, cap: SIGN_ENUM_CAP });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    let mut s = vec![1.0; n];
    // first sign fixed: every norm here is even
    for mask in 0..(1usize << (n - 1)) {
        for (i, si) in s.iter_mut().enumerate().skip(1) {
            *si = if mask & (1 << (i - 1)) != 0 { -1.0 } else { 1.0 };
        }
        best = best.max(f(&s));
    }
    Ok(best)
}

/// Largest singular value by power iteration on `MᵀM`, restarted from
/// seeded random vectors to escape a start orthogonal to the top eigenvector.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let gram = m.transpose() * m;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best = 0.0f64;
    for restart in 0..3 {
        let mut v = if restart == 0 {
            DVector::from_element(n, 1.0)
        } else {
            DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
        };
        let vn = v.norm();
        if vn == 0.0 {
            continue;
        }
        v /= vn;
        let mut rho = 0.0;
        for _ in 0..POWER_MAX_ITERS {
            let w = &gram * &v;
            let new_rho = v.dot(&w);
            let wn = w.norm();
            if wn == 0.0 {
                rho = 0.0;
                break;
            }
            let residual = (&w - &v * new_rho).norm();
            v = w / wn;
            rho = new_rho;
            // the Rayleigh quotient error is quadratic in the residual
            if residual <= POWER_REL_TOL * new_rho.abs() {
                break;
            }
        }
        best = best.max(rho);
    }
    best.max(0.0).sqrt()
}

/// `sup{‖Mx‖_q : ‖x‖_p ≤ 1}` for p-norms, exact where the extreme points of
/// the domain ball are finite in number and by power iteration for ℓ2→ℓ2.
pub fn matrix_operator_norm(m: &DMatrix<f64>, dom: PNorm, cod: PNorm) -> Result<f64> {
    let col = |j: usize| -> Vec<f64> { m.column(j).iter().copied().collect() };
    let row = |i: usize| -> Vec<f64> { m.row(i).iter().copied().collect() };
    Ok(match (dom, cod) {
        (PNorm::L1, q) => (0..m.ncols()).map(|j| q.eval(&col(j))).fold(0.0, f64::max),
        (p, PNorm::LInf) => (0..m.nrows()).map(|i| p.dual().eval(&row(i))).fold(0.0, f64::max),
        (PNorm::L2, PNorm::L2) => spectral_norm(m),
        (PNorm::LInf, q) => max_over_signs(m.ncols(), |s| {
            let y = m * DVector::from_column_slice(s);
            q.eval(y.as_slice())
        })?,
        // ‖M‖_{2→1} = ‖Mᵀ‖_{∞→2}
        (PNorm::L2, PNorm::L1) => max_over_signs(m.nrows(), |s| {
            let y = m.transpose() * DVector::from_column_slice(s);
            y.norm()
        })?,
    })
}

/// `‖T‖ = sup[‖T(x)‖ ; x ∈ B_E]` per atom.
pub fn operator_norm(map: &CondLinearMap, dom: &CondNorm, cod: &CondNorm) -> Result<CondReal> {
    map.on().ensure_eq(dom.on())?;
    map.on().ensure_eq(cod.on())?;
    map.try_map(|t, m| {
        let (p, q) = match (dom.at(t), cod.at(t)) {
            (AtomNorm::P(p), AtomNorm::P(q)) => (*p, *q),
            _ => {
                return Err(Error::UnsupportedNormKind(format!(
                    "operator norm with a gauge norm on atom {t}; use sampled_operator_norm"
                )))
            }
        };
        matrix_operator_norm(m, p, q)
    })
}

/// Lower bound on `‖T‖` from `samples` random directions, for norms with
/// no closed form.
pub fn sampled_operator_norm(map: &CondLinearMap, dom: &CondNorm, cod: &CondNorm, samples: usize, seed: u64) -> Result<CondReal> {
    map.on().ensure_eq(dom.on())?;
    map.on().ensure_eq(cod.on())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    map.try_map(|t, m| {
        let mut best = 0.0f64;
        for _ in 0..samples {
            let x: Vec<f64> = (0..m.ncols()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let nx = dom.at(t).eval(&x);
            if nx > 0.0 {
                let y = m * DVector::from_column_slice(&x);
                best = best.max(cod.at(t).eval(y.as_slice()) / nx);
            }
        }
        Ok(best)
    })
}

/// A functional of dual norm at most 1 with `x*(x) = ‖x‖` on every atom.
pub fn norming_functional(x: &CondVector, norm: &CondNorm) -> Result<CondLinearMap> {
    x.on().ensure_eq(norm.on())?;
    let f = x.try_map(|t, v| Ok(norm.pnorm_at(t)?.norming_vector(v)))?;
    Ok(CondLinearMap::functional(&f))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCheck {
    pub sup_over_dual_ball: CondReal,
    pub isometry_gap: CondReal,
}

/// `sup |x*(x)|` over the norming functional and the given functionals
/// rescaled into the dual unit ball, against `‖x‖`.
pub fn embedding_check(x: &CondVector, norm: &CondNorm, dual_samples: &[CondVector]) -> Result<EmbeddingCheck> {
    let star = norming_functional(x, norm)?.as_functional();
    let sup = x.try_map(|t, v| {
        let n = norm.at(t);
        let mut best = dot(star.at(t), v).abs();
        for f in dual_samples {
            let fv = f.get(t).ok_or_else(|| Error::ConditionMismatch { left: x.on().clone(), right: f.on().clone() })?;
            let d = n.dual_eval(fv)?;
            if d > 0.0 {
                best = best.max(dot(fv, v).abs() / d);
            }
        }
        Ok(best)
    })?;
    let gap = sup.zip_with(x, |t, s, v| (s - norm.at(t).eval(v)).abs())?;
    Ok(EmbeddingCheck { sup_over_dual_ball: sup, isometry_gap: gap })
}

/// Extreme points of the dual unit ball for ℓ1 and ℓ∞, or a spherical grid
/// for ℓ2 (refined by local search in [`bidual_norm`]).
fn dual_ball_candidates(p: PNorm, dim: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    match p {
        // dual ball of ℓ1 is the ℓ∞ cube: its vertices are the sign vectors
        PNorm::L1 => {
            if dim > SIGN_ENUM_CAP {
                return Err(Error::UnsupportedDimension { dim, cap: SIGN_ENUM_CAP });
            }
            Ok((0..(1usize << dim))
                .map(|mask| (0..dim).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect())
                .collect())
        }
        // dual ball of ℓ∞ is the cross-polytope: ±e_i
        PNorm::LInf => Ok((0..dim)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| (0..dim).map(|j| if i == j { s } else { 0.0 }).collect::<Vec<f64>>())
            })
            .collect()),
        PNorm::L2 => sphere_grid(dim, resolution),
    }
}

fn sphere_point(angles: &[f64]) -> Vec<f64> {
    // hyperspherical coordinates
    let d = angles.len() + 1;
    let mut out = vec![0.0; d];
    let mut prod = 1.0;
    for (i, a) in angles.iter().enumerate() {
        out[i] = prod * a.cos();
        prod *= a.sin();
    }
    out[d - 1] = prod;
    out
}

/// Grid over the Euclidean unit sphere in dimension at most 3.
pub fn sphere_grid(dim: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    let n = resolution.max(4);
    match dim {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => Ok((0..n).map(|k| sphere_point(&[2.0 * std::f64::consts::PI * k as f64 / n as f64])).collect()),
        3 => {
            let mut out = Vec::new();
            for i in 0..=n / 2 {
                let polar = std::f64::consts::PI * i as f64 / (n / 2) as f64;
                for k in 0..n {
                    let az = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    out.push(sphere_point(&[polar, az]));
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension { dim, cap: 3 }),
    }
}

pub fn maximize_on_sphere(dim: usize, resolution: usize, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let grid = sphere_grid(dim, resolution)?;
    if dim == 1 {
        return Ok(grid.iter().map(|p| f(p)).fold(0.0, f64::max));
    }
    let n = resolution.max(4);
    // rank grid angles, then pattern-search the best few
    let mut starts: Vec<(f64, Vec<f64>)> = Vec::new();
    match dim {
        2 => {
            for k in 0..n {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                starts.push((f(&sphere_point(&[a])), vec![a]));
            }
        }
        _ => {
            for i in 0..=n / 2 {
                for k in 0..n {
                    let ang = vec![
                        std::f64::consts::PI * i as f64 / (n / 2) as f64,
                        2.0 * std::f64::consts::PI * k as f64 / n as f64,
                    ];
                    starts.push((f(&sphere_point(&ang)), ang));
                }
            }
        }
    }
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = starts.first().map(|s| s.0).unwrap_or(0.0);
    for (val, ang) in starts.into_iter().take(4) {
        let mut cur = ang;
        let mut cur_val = val;
        let mut step = 2.0 * std::f64::consts::PI / n as f64;
        while step > 1e-12 {
            let mut improved = false;
            for i in 0..cur.len() {
                for s in [step, -step] {
                    let mut cand = cur.clone();
                    cand[i] += s;
                    let v = f(&sphere_point(&cand));
                    if v > cur_val {
                        cur = cand;
                        cur_val = v;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(cur_val);
    }
    Ok(best)
}

/// `‖j(x)‖ = sup{|f(x)| : ‖f‖_* ≤ 1}` computed by search over the dual
/// ball, independently of the norming functional.
pub fn bidual_norm(x: &[f64], p: PNorm, resolution: usize) -> Result<f64> {
    let dim = x.len();
    match p {
        PNorm::L2 => maximize_on_sphere(dim, resolution, |f| dot(f, x).abs()),
        _ => Ok(dual_ball_candidates(p, dim, resolution)?
            .iter()
            .map(|f| dot(f, x).abs())
            .fold(0.0, f64::max)),
    }
}

/// The primal vector representing a functional on the dual, given by its
/// values on the dual basis `e_i*`.
pub fn realize_bidual(values_on_dual_basis: &CondVector) -> CondVector {
    values_on_dual_basis.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    /// Brute force over the vertices of the domain ball (ℓ1 or ℓ∞).
    fn vertex_max(m: &DMatrix<f64>, dom: PNorm, cod: PNorm) -> f64 {
        let n = m.ncols();
        let verts: Vec<Vec<f64>> = match dom {
            PNorm::L1 => (0..n)
                .flat_map(|i| [1.0, -1.0].map(|s| (0..n).map(|j| if i == j { s } else { 0.0 }).collect()))
                .collect(),
            PNorm::LInf => (0..1usize << n)
                .map(|mask| (0..n).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect())
                .collect(),
            PNorm::L2 => unreachable!(),
        };
        verts
            .iter()
            .map(|v| cod.eval((m * DVector::from_column_slice(v)).as_slice()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_has_norm_one() {
        let id = DMatrix::<f64>::identity(3, 3);
        for p in PNorm::ALL {
            assert!((matrix_operator_norm(&id, p, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_spectral_norm() {
        let d = mat(&[&[3.0, 0.0], &[0.0, 5.0]]);
        assert!((matrix_operator_norm(&d, PNorm::L2, PNorm::L2).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn power_iteration_handles_orthogonal_start() {
        // top right-singular vector (1,-1)/√2 is orthogonal to the all-ones start
        let m = mat(&[&[1.0, -1.0], &[0.1, 0.1]]);
        let expected = m.singular_values().max();
        assert!((spectral_norm(&m) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn analytic_norms_match_vertex_brute_force() {
        let m = mat(&[&[1.0, -2.0, 0.5], &[3.0, 0.25, -1.0]]);
        for dom in [PNorm::L1, PNorm::LInf] {
            for cod in PNorm::ALL {
                let a = matrix_operator_norm(&m, dom, cod).unwrap();
                assert!((a - vertex_max(&m, dom, cod)).abs() < 1e-12, "{dom:?}->{cod:?}");
            }
        }
    }

    #[test]
    fn concatenated_map_norm() {
        let a = Algebra::new(2).unwrap();
        let t = CondLinearMap::from_fn(&a.one(), |t| if t == 0 { mat(&[&[2.0]]) } else { mat(&[&[-7.0]]) });
        let n = CondNorm::uniform(&a.one(), PNorm::L2);
        let norms = operator_norm(&t, &n, &n).unwrap();
        assert_eq!(*norms.at(0), 2.0);
        assert!((norms.at(1) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn gauge_domain_is_unsupported() {
        let a = Algebra::new(1).unwrap();
        let body = crate::linear::SymmetricBody::constant(&a.one(), crate::linear::AtomBody::cube(2, 1.0).unwrap());
        let t = CondLinearMap::constant(&a.one(), DMatrix::identity(2, 2));
        let g = CondNorm::gauge_of(&body);
        let l = CondNorm::uniform(&a.one(), PNorm::LInf);
        assert!(matches!(operator_norm(&t, &g, &l), Err(Error::UnsupportedNormKind(_))));
        let lower = sampled_operator_norm(&t, &g, &l, 200, 1).unwrap();
        assert!(*lower.at(0) <= 1.0 + 1e-12);
    }

    #[test]
    fn norming_functional_examples() {
        let a = Algebra::new(1).unwrap();
        let x = CondVector::constant(&a.one(), vec![3.0, 4.0]);
        let f = norming_functional(&x, &CondNorm::uniform(&a.one(), PNorm::L2)).unwrap();
        assert_eq!(f.as_functional().at(0), &vec![0.6, 0.8]);
        let z = CondVector::constant(&a.one(), vec![0.0, 0.0]);
        let f = norming_functional(&z, &CondNorm::uniform(&a.one(), PNorm::L2)).unwrap();
        assert_eq!(f.as_functional().at(0), &vec![0.0, 0.0]);
        let y = CondVector::constant(&a.one(), vec![-2.0, 1.0]);
        let f = norming_functional(&y, &CondNorm::uniform(&a.one(), PNorm::LInf)).unwrap();
        assert_eq!(f.as_functional().at(0), &vec![-1.0, 0.0]);
    }

    #[test]
    fn embedding_examples() {
        let a = Algebra::new(1).unwrap();
        let l2 = CondNorm::uniform(&a.one(), PNorm::L2);
        let x = CondVector::constant(&a.one(), vec![3.0, 4.0]);
        let e = embedding_check(&x, &l2, &[]).unwrap();
        assert!((e.sup_over_dual_ball.at(0) - 5.0).abs() < 1e-12);
        assert!(*e.isometry_gap.at(0) < 1e-12);
        let z = CondVector::constant(&a.one(), vec![0.0, 0.0]);
        let e = embedding_check(&z, &l2, std::slice::from_ref(&x)).unwrap();
        assert_eq!(*e.sup_over_dual_ball.at(0), 0.0);
        let l1 = CondNorm::uniform(&a.one(), PNorm::L1);
        let ones = CondVector::constant(&a.one(), vec![1.0, 1.0]);
        let e = embedding_check(&ones, &l1, &[]).unwrap();
        assert_eq!(*e.sup_over_dual_ball.at(0), 2.0);
    }

    #[test]
    fn bidual_norm_matches_norm() {
        for p in PNorm::ALL {
            for x in [vec![0.3], vec![1.0, -2.0], vec![0.5, -0.25, 2.0]] {
                let b = bidual_norm(&x, p, 24).unwrap();
                assert!((b - p.eval(&x)).abs() <= 1e-6 * p.eval(&x), "{p:?} {x:?}: {b}");
            }
        }
    }
}
