//! Constructions built on norms and bodies: half-norming functional nets,
//! norm-equivalence constants on finitely generated spaces, the ℓ2 direct
//! sum with its dual pairing, and the renorming by the bodies
//! `B_n = 2ⁿK + 2⁻ⁿB_E`.

use nalgebra::DMatrix;

use super::body::{combine_supports, gauge, grid_support, SymmetricBody};
use super::norm::{AtomNorm, CondNorm};
use super::{dot, CondVector};
use crate::algebra::Condition;
use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::numbers::CondReal;

/// Largest subspace dimension for which a sphere net is built.
pub const NET_DIM_CAP: usize = 4;

/// Per-atom finite list of functionals (a conditionally finite family).
pub type FunctionalFamily = ConditionalValue<Vec<Vec<f64>>>;

fn orthonormal_basis(vectors: &[&Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w: Vec<f64> = (*v).clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let n = dot(&w, &w).sqrt();
        let scale = dot(v, v).sqrt();
        if n > tol * scale.max(1.0) {
            basis.push(w.into_iter().map(|a| a / n).collect());
        }
    }
    basis
}

/// Points of the unit sphere of ℝʳ within Euclidean distance `radius` of
/// every sphere point: normalized grid points on the surface of the cube.
pub fn sphere_net(r: usize, radius: f64) -> Vec<Vec<f64>> {
    match r {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => {
            // chord 2·sin(π/n) ≤ radius
            let n = (std::f64::consts::PI / (radius / 2.0).asin()).ceil() as usize;
            (0..n)
                .map(|k| {
                    let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        }
        _ => {
            // a sphere point y maps to y/‖y‖∞ on the cube surface; the nearest
            // face-grid point is within (h/2)·√(r−1), and normalizing at most
            // doubles that, so h·√(r−1) ≤ radius suffices
            let h = radius / ((r - 1) as f64).sqrt();
            let steps = (2.0 / h).ceil() as usize;
            let ticks: Vec<f64> = (0..=steps).map(|i| -1.0 + 2.0 * i as f64 / steps as f64).collect();
            let mut out = Vec::new();
            for axis in 0..r {
                for sign in [1.0, -1.0] {
                    let mut idx = vec![0usize; r - 1];
                    loop {
                        let mut p = Vec::with_capacity(r);
                        let mut k = 0;
                        for i in 0..r {
                            if i == axis {
                                p.push(sign);
                            } else {
                                p.push(ticks[idx[k]]);
                                k += 1;
                            }
                        }
                        let n = dot(&p, &p).sqrt();
                        out.push(p.into_iter().map(|a| a / n).collect());
                        let mut j = 0;
                        while j < r - 1 {
                            idx[j] += 1;
                            if idx[j] <= steps {
                                break;
                            }
                            idx[j] = 0;
                            j += 1;
                        }
                        if j == r - 1 {
                            break;
                        }
                    }
                }
            }
            out
        }
    }
}

/// Functionals `z*_n` of the unit sphere of the dual such that every `y` in
/// `span(spanning)` satisfies `‖y‖/2 ≤ max_n |⟨y, z*_n⟩|` (Euclidean norm).
///
/// Built from a 1/4-net of the subspace's unit sphere; each net point `z`
/// is paired with its norming functional, for which `⟨z, z*⟩ = 1 ≥ 3/4`.
pub fn half_norming_set(spanning: &[CondVector]) -> Result<FunctionalFamily> {
    let first = spanning.first().ok_or(Error::EmptyFamily)?;
    let on = first.on().clone();
    for v in spanning {
        on.ensure_eq(v.on())?;
    }
    FunctionalFamily::try_from_fn(&on, |t| {
        let vecs: Vec<&Vec<f64>> = spanning.iter().map(|v| v.at(t)).collect();
        let dim = vecs[0].len();
        if let Some(bad) = vecs.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch { atom: t, expected: dim, got: bad.len() });
        }
        let basis = orthonormal_basis(&vecs, 1e-10);
        let r = basis.len();
        if r > NET_DIM_CAP {
            return Err(Error::UnsupportedDimension { dim: r, cap: NET_DIM_CAP });
        }
        Ok(sphere_net(r, 0.25)
            .into_iter()
            .map(|s| {
                let mut z = vec![0.0; dim];
                for (c, q) in s.iter().zip(&basis) {
                    for (zi, qi) in z.iter_mut().zip(q) {
                        *zi += c * qi;
                    }
                }
                // Euclidean norming functional of a unit vector is itself
                z
            })
            .collect())
    })
}

/// `max_n |⟨y, z*_n⟩|` per atom.
pub fn max_pairing(family: &FunctionalFamily, y: &CondVector) -> Result<CondReal> {
    family.zip_with(y, |_, fs, v| fs.iter().map(|f| dot(f, v).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceConstants {
    /// Certified lower bound on `min{‖Tz‖ : ‖z‖₁ = 1}`.
    pub r_low: CondReal,
    /// Best value found for that minimum; `r_low ≤ true minimum ≤ r_low_estimate`.
    pub r_low_estimate: CondReal,
    /// `max{‖Tz‖ : ‖z‖₁ = 1}` (attained at some `±e_k`).
    pub r_high: CondReal,
}

fn project_to_simplex(w: &mut [f64]) {
    let mut u: Vec<f64> = w.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    for wi in w.iter_mut() {
        *wi = (*wi - theta).max(0.0);
    }
}

/// Subgradient of `w ↦ ‖Bw‖` at `w`.
fn norm_subgradient(cols: &[Vec<f64>], w: &[f64], norm: &AtomNorm) -> (f64, Vec<f64>) {
    let dim = cols[0].len();
    let mut y = vec![0.0; dim];
    for (c, wi) in cols.iter().zip(w) {
        for (yi, ci) in y.iter_mut().zip(c) {
            *yi += wi * ci;
        }
    }
    let val = norm.eval(&y);
    // a norming functional of y is a subgradient of the norm at y
    let g_y: Vec<f64> = match norm {
        AtomNorm::P(p) => p.norming_vector(&y),
        AtomNorm::Gauge(b) => {
            let (mut best, mut arg) = (0.0, None);
            for f in b.facets() {
                let v = dot(&f.u, &y) / f.c;
                if v.abs() > best {
                    best = v.abs();
                    arg = Some((f, v.signum()));
                }
            }
            match arg {
                Some((f, s)) => f.u.iter().map(|u| s * u / f.c).collect(),
                None => vec![0.0; dim],
            }
        }
    };
    let g = cols.iter().map(|c| dot(c, &g_y)).collect();
    (val, g)
}

/// Minimum of the convex function `‖Bw‖` over the probability simplex:
/// barycentric grid start, projected subgradient descent, and a lower
/// bound from the linearization `f(w) + min_i g·(e_i − w)`.
fn simplex_min(cols: &[Vec<f64>], norm: &AtomNorm) -> (f64, f64) {
    let r = cols.len();
    let res = match r {
        1 => 1,
        2 => 64,
        3 => 24,
        _ => 10,
    };
    let mut best_w = vec![1.0 / r as f64; r];
    let mut best_v = norm_subgradient(cols, &best_w, norm).0;
    let mut idx = vec![0usize; r];
    loop {
        let used: usize = idx[..r - 1].iter().sum();
        if used <= res {
            idx[r - 1] = res - used;
            let w: Vec<f64> = idx.iter().map(|k| *k as f64 / res as f64).collect();
            let v = norm_subgradient(cols, &w, norm).0;
            if v < best_v {
                best_v = v;
                best_w = w;
            }
        }
        let mut j = 0;
        while j + 1 < r {
            idx[j] += 1;
            if idx[..r - 1].iter().sum::<usize>() <= res {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j + 1 >= r {
            break;
        }
    }
    let scale: f64 = cols.iter().map(|c| norm.eval(c)).fold(0.0, f64::max).max(1e-300);
    let mut w = best_w.clone();
    let mut lower = f64::NEG_INFINITY;
    let mut step = 0.5 / scale;
    for it in 0..4000 {
        let (v, g) = norm_subgradient(cols, &w, norm);
        if v < best_v {
            best_v = v;
            best_w = w.clone();
        }
        let gw = dot(&g, &w);
        let lb = v + g.iter().map(|gi| gi - gw).fold(f64::INFINITY, f64::min);
        lower = lower.max(lb);
        if best_v - lower <= 1e-12 * scale {
            break;
        }
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= step * gi;
        }
        project_to_simplex(&mut w);
        if it % 200 == 199 {
            step *= 0.5;
            w = best_w.clone();
        }
    }
    if best_v - lower > 1e-12 * scale && r > 1 {
        let gap = 1e-4 * best_v + 1e-12 * scale;
        lower = lower.max(cell_lower_bound(cols, norm, &mut best_v, gap));
    }
    (lower.min(best_v).max(0.0), best_v)
}

struct Cell {
    verts: Vec<Vec<f64>>,
    lb: f64,
}

/// Lower bound of `‖Σ w_k c_k‖` on a simplex cell from the subgradient at its
/// barycenter, minimized over the cell vertices.
fn eval_cell(cols: &[Vec<f64>], norm: &AtomNorm, verts: Vec<Vec<f64>>, best_v: &mut f64) -> Cell {
    let r = verts[0].len();
    let c: Vec<f64> = (0..r).map(|i| verts.iter().map(|v| v[i]).sum::<f64>() / verts.len() as f64).collect();
    let (v, g) = norm_subgradient(cols, &c, norm);
    *best_v = best_v.min(v);
    let gc = dot(&g, &c);
    let lb = v + verts.iter().map(|u| dot(&g, u) - gc).fold(f64::INFINITY, f64::min);
    Cell { verts, lb }
}

const CELL_BUDGET: usize = 3000;

/// Branch and bound over simplex cells, bisecting the longest edge of the
/// weakest cell. Every intermediate minimum over the leaves is a valid bound.
fn cell_lower_bound(cols: &[Vec<f64>], norm: &AtomNorm, best_v: &mut f64, gap: f64) -> f64 {
    let r = cols.len();
    let root: Vec<Vec<f64>> = (0..r)
        .map(|i| {
            let mut e = vec![0.0; r];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut leaves = vec![eval_cell(cols, norm, root, best_v)];
    let mut best_lb = leaves[0].lb;
    for _ in 0..CELL_BUDGET / 2 {
        let (k, weakest) = leaves.iter().enumerate().min_by(|a, b| a.1.lb.total_cmp(&b.1.lb)).map(|(k, c)| (k, c.lb)).expect("nonempty");
        best_lb = best_lb.max(weakest);
        if *best_v - best_lb <= gap {
            break;
        }
        let cell = leaves.swap_remove(k);
        let n = cell.verts.len();
        let mut edge = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let d: f64 = cell.verts[i].iter().zip(&cell.verts[j]).map(|(a, b)| (a - b).abs()).sum();
                if d > edge.2 {
                    edge = (i, j, d);
                }
            }
        }
        let mid: Vec<f64> = cell.verts[edge.0].iter().zip(&cell.verts[edge.1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut a = cell.verts.clone();
        a[edge.0] = mid.clone();
        let mut b = cell.verts;
        b[edge.1] = mid;
        leaves.push(eval_cell(cols, norm, a, best_v));
        leaves.push(eval_cell(cols, norm, b, best_v));
    }
    let last = leaves.iter().map(|c| c.lb).fold(f64::INFINITY, f64::min);
    best_lb.max(last)
}

/// Constants with `r_low·‖z‖₁ ≤ ‖Σ z_k b_k‖ ≤ r_high·‖z‖₁`.
pub fn equivalence_constants(basis: &[CondVector], norm: &CondNorm) -> Result<EquivalenceConstants> {
    let first = basis.first().ok_or(Error::EmptyFamily)?;
    let on = first.on().clone();
    on.ensure_eq(norm.on())?;
    for b in basis {
        on.ensure_eq(b.on())?;
    }
    let mut low = std::collections::BTreeMap::new();
    let mut est = std::collections::BTreeMap::new();
    let mut high = std::collections::BTreeMap::new();
    for t in on.atoms() {
        let cols: Vec<Vec<f64>> = basis.iter().map(|b| b.at(t).clone()).collect();
        let dim = cols[0].len();
        if let Some(c) = cols.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch { atom: t, expected: dim, got: c.len() });
        }
        let r = cols.len();
        if r > NET_DIM_CAP {
            return Err(Error::UnsupportedDimension { dim: r, cap: NET_DIM_CAP });
        }
        let m = DMatrix::from_fn(dim, r, |i, j| cols[j][i]);
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        let bottom = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if r > dim || top == 0.0 || bottom <= 1e-10 * top {
            return Err(Error::NotInjective { atom: t });
        }
        let n = norm.at(t);
        high.insert(t, cols.iter().map(|c| n.eval(c)).fold(0.0, f64::max));
        // ‖Tz‖ is even in z, so sign patterns with the first sign fixed cover the sphere
        let (mut lo, mut e) = (f64::INFINITY, f64::INFINITY);
        for mask in 0..(1usize << (r - 1)) {
            let signed: Vec<Vec<f64>> = cols
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let s = if k > 0 && mask & (1 << (k - 1)) != 0 { -1.0 } else { 1.0 };
                    c.iter().map(|v| s * v).collect()
                })
                .collect();
            let (l, v) = simplex_min(&signed, n);
            lo = lo.min(l);
            e = e.min(v);
        }
        low.insert(t, lo);
        est.insert(t, e);
    }
    Ok(EquivalenceConstants {
        r_low: CondReal::new(on.clone(), low)?,
        r_low_estimate: CondReal::new(on.clone(), est)?,
        r_high: CondReal::new(on, high)?,
    })
}

/// Tail information for an element of the ℓ2 direct sum.
#[derive(Debug, Clone, PartialEq)]
pub enum L2Tail {
    /// Components beyond those listed are zero.
    FinitelySupported,
    /// Certified bound on `Σ_{k>K} ‖x_k‖²`.
    Certified(CondReal),
    Uncertified,
}

/// A point of `⊕²_k E_k` given by its first components.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Element {
    pub components: Vec<CondVector>,
    pub tail: L2Tail,
}

impl L2Element {
    pub fn finite(components: Vec<CondVector>) -> Self {
        Self { components, tail: L2Tail::FinitelySupported }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSumReport {
    /// `(Σ_k ‖x_k‖²)^{1/2}` over the listed components.
    pub norm2: CondReal,
    /// Bound on `|‖x‖₂ − norm2|` from the tail certificate.
    pub norm2_error: CondReal,
    /// `Σ_k x*_k(x_k)`.
    pub pairing: CondReal,
    /// `‖x*‖₂ = (Σ_k ‖x*_k‖²_*)^{1/2}`.
    pub dual_norm2: CondReal,
    /// `T_{x*}(y)/‖y‖₂` at an explicitly constructed maximizer `y`.
    pub attained: CondReal,
    pub pairing_norm_gap: CondReal,
}

/// Norm, pairing, and duality gap in `⊕²_k E_k` with dual `⊕²_k E*_k`.
pub fn direct_sum_l2(norms: &[CondNorm], x: &L2Element, x_star: &[CondVector]) -> Result<DirectSumReport> {
    if matches!(x.tail, L2Tail::Uncertified) {
        return Err(Error::UncertifiedTail);
    }
    if x.components.len() != norms.len() || x_star.len() != norms.len() {
        return Err(Error::InvalidValue(format!(
            "{} norms, {} components, {} dual components",
            norms.len(),
            x.components.len(),
            x_star.len()
        )));
    }
    let on = norms.first().map(|n| n.on().clone()).ok_or(Error::EmptyFamily)?;
    for ((n, c), f) in norms.iter().zip(&x.components).zip(x_star) {
        on.ensure_eq(n.on())?;
        on.ensure_eq(c.on())?;
        on.ensure_eq(f.on())?;
    }
    let mut norm2 = std::collections::BTreeMap::new();
    let mut err = std::collections::BTreeMap::new();
    let mut pair = std::collections::BTreeMap::new();
    let mut dn2 = std::collections::BTreeMap::new();
    let mut att = std::collections::BTreeMap::new();
    let mut gap = std::collections::BTreeMap::new();
    for t in on.atoms() {
        let mut sq = 0.0;
        let mut p = 0.0;
        let mut dsq = 0.0;
        let mut duals = Vec::with_capacity(norms.len());
        for ((n, c), f) in norms.iter().zip(&x.components).zip(x_star) {
            let (n, c, f) = (n.at(t), c.at(t), f.at(t));
            if c.len() != f.len() {
                return Err(Error::DimensionMismatch { atom: t, expected: c.len(), got: f.len() });
            }
            sq += n.eval(c).powi(2);
            p += dot(f, c);
            let d = n.dual_eval(f)?;
            dsq += d * d;
            duals.push(d);
        }
        let tail_sq = match &x.tail {
            L2Tail::Certified(b) => *b.at(t),
            _ => 0.0,
        };
        let dual_norm = dsq.sqrt();
        // maximizer: y_k = (‖x*_k‖_*/‖x*‖₂)·w_k with w_k a unit vector norming x*_k
        let (mut y_sq, mut y_pair) = (0.0, 0.0);
        if dual_norm > 0.0 {
            for ((n, f), d) in norms.iter().zip(x_star).zip(&duals) {
                let (n, f) = (n.at(t), f.at(t));
                let w = match n.pnorm() {
                    Some(pn) => pn.dual().norming_vector(f),
                    None => return Err(Error::UnsupportedNormKind(format!("gauge component on atom {t}"))),
                };
                let y: Vec<f64> = w.iter().map(|v| v * d / dual_norm).collect();
                y_sq += n.eval(&y).powi(2);
                y_pair += dot(f, &y);
            }
        }
        let attained = if y_sq > 0.0 { y_pair / y_sq.sqrt() } else { 0.0 };
        norm2.insert(t, sq.sqrt());
        err.insert(t, (sq + tail_sq).sqrt() - sq.sqrt());
        pair.insert(t, p);
        dn2.insert(t, dual_norm);
        att.insert(t, attained);
        gap.insert(t, (attained - dual_norm).abs());
    }
    Ok(DirectSumReport {
        norm2: CondReal::new(on.clone(), norm2)?,
        norm2_error: CondReal::new(on.clone(), err)?,
        pairing: CondReal::new(on.clone(), pair)?,
        dual_norm2: CondReal::new(on.clone(), dn2)?,
        attained: CondReal::new(on.clone(), att)?,
        pairing_norm_gap: CondReal::new(on, gap)?,
    })
}

/// Output of [`renorm_sequence`].
#[derive(Debug, Clone, PartialEq)]
pub struct RenormReport {
    /// `λ` with `K ⊆ λ·B_E`.
    pub lambda: CondReal,
    /// `‖x‖_n = gauge(B_n, x)` for `n = 1..=kmax`.
    pub gauges: Vec<CondReal>,
    /// `Σ_{n ≤ kmax} ‖x‖_n²`.
    pub sum_squares: CondReal,
    /// Bound on `Σ_{n > kmax} ‖x‖_n²`, from `‖x‖_n ≤ 2⁻ⁿ‖x‖_K`.
    pub tail_bound: CondReal,
    /// `(Σ_n ‖x‖_n²)^{1/2}` from the truncated sum.
    pub norm_c: CondReal,
    /// Atoms where `Σ_n ‖x‖_n² ≤ 1/3 + 1e-6` (holds for every `x ∈ K`).
    pub sum_bound_ok: Condition,
}

/// Slack on the `Σ ‖x‖_n² ≤ 1/3` bound.
pub const RENORM_SUM_SLACK: f64 = 1e-6;

/// The bodies `B_n = 2ⁿK + 2⁻ⁿB_E` for `n = 1..=kmax`, on the shared grid.
pub fn renorm_bodies(k: &SymmetricBody, unit_ball: &SymmetricBody, kmax: usize) -> Result<Vec<SymmetricBody>> {
    k.on().ensure_eq(unit_ball.on())?;
    let hk = grid_support(k)?;
    let hb = grid_support(unit_ball)?;
    for (t, b) in k.iter() {
        if !b.same_grid(unit_ball.at(t)) {
            return Err(Error::GridMismatch { atom: t });
        }
    }
    (1..=kmax)
        .map(|n| {
            let s = 2f64.powi(n as i32);
            combine_supports(s, k, &hk, 1.0 / s, &hb)
        })
        .collect()
}

pub fn renorm_sequence(k: &SymmetricBody, unit_ball: &SymmetricBody, x: &CondVector, kmax: usize) -> Result<RenormReport> {
    let unbounded: Vec<usize> = k.iter().filter(|(_, b)| !b.is_bounded()).map(|(t, _)| t).collect();
    if !unbounded.is_empty() {
        return Err(Error::NotBounded(k.algebra().condition(unbounded)?));
    }
    let lambda = k.try_map(|t, b| {
        let ub = unit_ball.at(t);
        Ok(b.vertices()?.iter().map(|v| ub.gauge(v)).fold(0.0, f64::max))
    })?;
    let bodies = renorm_bodies(k, unit_ball, kmax)?;
    let gauges: Vec<CondReal> = bodies.iter().map(|b| gauge(b, x)).collect::<Result<_>>()?;
    let sum_squares = CondReal::from_fn(x.on(), |t| gauges.iter().map(|g| g.at(t).powi(2)).sum());
    let gk = gauge(k, x)?;
    let tail_bound = gk.map(|_, g| g * g * 0.25f64.powi(kmax as i32) / 3.0);
    let norm_c = sum_squares.sqrt();
    let ok = sum_squares.iter().filter(|(_, s)| **s <= 1.0 / 3.0 + RENORM_SUM_SLACK).map(|(t, _)| t);
    let sum_bound_ok = x.algebra().condition(ok)?;
    Ok(RenormReport { lambda, gauges, sum_squares, tail_bound, norm_c, sum_bound_ok })
}

/// Radii comparing the gauge of a body `C` with a norm: `‖x‖ ≤ outer·‖x‖_C`
/// everywhere, and `inner·‖x‖_C ≤ ‖x‖` since `inner·B_E ⊆ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskRadii {
    pub outer: CondReal,
    pub inner: CondReal,
}

pub fn banach_disk(c: &SymmetricBody, norm: &CondNorm) -> Result<DiskRadii> {
    c.on().ensure_eq(norm.on())?;
    let outer = c.try_map(|t, b| {
        if !b.is_bounded() {
            return Err(Error::NotBounded(c.algebra().atom(t)?));
        }
        Ok(b.vertices()?.iter().map(|v| norm.at(t).eval(v)).fold(0.0, f64::max))
    })?;
    // r·B_E ⊆ {|⟨u,x⟩| ≤ c} exactly when r·‖u‖_* ≤ c
    let inner = c.try_map(|t, b| {
        let mut r = f64::INFINITY;
        for f in b.facets() {
            let d = norm.at(t).dual_eval(&f.u)?;
            if d > 0.0 {
                r = r.min(f.c / d);
            }
        }
        Ok(r)
    })?;
    Ok(DiskRadii { outer, inner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linear::{AtomBody, Facet, PNorm};

    #[test]
    fn net_covers_circle() {
        let net = sphere_net(2, 0.25);
        for k in 0..1000 {
            let a = k as f64 * 0.00628;
            let p = [a.cos(), a.sin()];
            let d = net.iter().map(|z| ((z[0] - p[0]).powi(2) + (z[1] - p[1]).powi(2)).sqrt()).fold(f64::INFINITY, f64::min);
            assert!(d <= 0.25);
        }
    }

    #[test]
    fn half_norming_one_dimensional() {
        let a = Algebra::new(1).unwrap();
        let e1 = CondVector::constant(&a.one(), vec![1.0, 0.0]);
        let fam = half_norming_set(&[e1]).unwrap();
        assert_eq!(fam.at(0), &vec![vec![1.0, 0.0], vec![-1.0, 0.0]]);
        let y = CondVector::constant(&a.one(), vec![2.0, 0.0]);
        assert_eq!(*max_pairing(&fam, &y).unwrap().at(0), 2.0);
        let z = CondVector::constant(&a.one(), vec![0.0, 0.0]);
        assert_eq!(*max_pairing(&fam, &z).unwrap().at(0), 0.0);
    }

    #[test]
    fn equivalence_constants_reference() {
        let a = Algebra::new(1).unwrap();
        let l2 = CondNorm::uniform(&a.one(), PNorm::L2);
        let e1 = CondVector::constant(&a.one(), vec![1.0, 0.0]);
        let e2 = CondVector::constant(&a.one(), vec![0.0, 1.0]);
        let c = equivalence_constants(&[e1.clone(), e2.clone()], &l2).unwrap();
        assert!((c.r_low.at(0) - 0.5f64.sqrt()).abs() < 1e-6, "{}", c.r_low.at(0));
        assert_eq!(*c.r_high.at(0), 1.0);
        let e2x2 = CondVector::constant(&a.one(), vec![0.0, 2.0]);
        let c = equivalence_constants(&[e1.clone(), e2x2], &l2).unwrap();
        assert_eq!(*c.r_high.at(0), 2.0);
        assert!(matches!(equivalence_constants(&[e1.clone(), e1], &l2), Err(Error::NotInjective { atom: 0 })));
    }

    #[test]
    fn direct_sum_examples() {
        let a = Algebra::new(1).unwrap();
        let n = CondNorm::uniform(&a.one(), PNorm::L2);
        let c = |v: f64| CondVector::constant(&a.one(), vec![v]);
        let x = L2Element::finite(vec![c(3.0), c(4.0)]);
        let r = direct_sum_l2(&[n.clone(), n.clone()], &x, &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(*r.norm2.at(0), 5.0);
        assert_eq!(*r.pairing.at(0), 3.0);
        assert_eq!(*r.attained.at(0), 1.0);
        assert_eq!(*r.pairing_norm_gap.at(0), 0.0);
        let r = direct_sum_l2(&[n.clone(), n.clone()], &x, &[c(0.0), c(0.0)]).unwrap();
        assert_eq!(*r.pairing.at(0), 0.0);
        assert_eq!(*r.pairing_norm_gap.at(0), 0.0);
        let bad = L2Element { components: x.components.clone(), tail: L2Tail::Uncertified };
        assert_eq!(direct_sum_l2(&[n.clone(), n], &bad, &[c(1.0), c(0.0)]), Err(Error::UncertifiedTail));
    }

    fn interval() -> AtomBody {
        AtomBody::new(1, vec![Facet { u: vec![1.0], c: 1.0 }]).unwrap()
    }

    #[test]
    fn renorm_interval_reference() {
        let a = Algebra::new(1).unwrap();
        let k = SymmetricBody::constant(&a.one(), interval());
        let x = CondVector::constant(&a.one(), vec![1.0]);
        let r = renorm_sequence(&k, &k, &x, 40).unwrap();
        for (n, g) in r.gauges.iter().enumerate() {
            let s = 2f64.powi(n as i32 + 1);
            assert!((g.at(0) - 1.0 / (s + 1.0 / s)).abs() < 1e-15);
        }
        assert!((r.norm_c.at(0) - 0.48547).abs() < 1e-4);
        assert!(r.sum_bound_ok.is_one());
        assert_eq!(*r.lambda.at(0), 1.0);
        let z = CondVector::constant(&a.one(), vec![0.0]);
        assert_eq!(*renorm_sequence(&k, &k, &z, 40).unwrap().norm_c.at(0), 0.0);
    }

    #[test]
    fn renorm_rejects_unbounded() {
        let a = Algebra::new(1).unwrap();
        let slab = AtomBody::new(2, vec![Facet { u: vec![1.0, 0.0], c: 1.0 }]).unwrap();
        let k = SymmetricBody::constant(&a.one(), slab);
        let x = CondVector::constant(&a.one(), vec![1.0, 0.0]);
        assert!(matches!(renorm_sequence(&k, &k, &x, 5), Err(Error::NotBounded(_))));
    }

    #[test]
    fn disk_radii_of_box() {
        let a = Algebra::new(1).unwrap();
        let c = SymmetricBody::constant(&a.one(), AtomBody::cube(2, 2.0).unwrap());
        let r = banach_disk(&c, &CondNorm::uniform(&a.one(), PNorm::L2)).unwrap();
        assert!((r.outer.at(0) - 8f64.sqrt()).abs() < 1e-12);
        assert_eq!(*r.inner.at(0), 2.0);
    }
}
