//! Instance generators. Distributions are fixed: changing one changes every
//! report produced under the same configuration.
//!
//! - `body`: per atom a dimension in `1..=cap`, the standard axes plus
//!   `3·dim` random unit directions (so `4·dim` in all), offsets in `[0.5, 2]`.
//! - `sequence`: a bounded body as region and [`SEQUENCE_TERMS`] table terms
//!   sampled inside it.
//! - `operator_family`: 1 to 3 maps with entries in `[-2, 2]`, shapes up to
//!   `cap × cap`, and a random p-norm on each side per atom.
//! - `closed_cover`: a random box per atom cut at relative positions in
//!   `(0.2, 0.8)`; the pieces are dealt to 1 to 3 closed sets.
//! - `dense_points`: 1 to `dim + 1` random vectors per atom.
//! - `l2_element`: 1 to 4 finitely many components with random p-norms.
//! - `renorm_pair`: `K` with random offsets in `[0.3, 1.5]` and the grid
//!   unit ball of a random p-norm, on one shared direction grid.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use condan::algebra::{make_partition, Algebra, Condition, Partition};
use condan::analysis::{box_grid, AtomClosedSet, ClosedSet, CondSequence, ConvexPiece, SpaceBox};
use condan::io::{encode_document, Document, Object};
use condan::linear::{AtomBody, AtomNorm, CondLinearMap, CondNorm, DirectionGrid, Facet, L2Element, PNorm, SymmetricBody};
use condan::{ConditionalValue, CondVector};

use crate::{HarnessError, SuiteConfig};

/// Table length of generated sequences.
pub const SEQUENCE_TERMS: usize = 256;

/// Bumped whenever a distribution above changes.
pub const GENERATOR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Body,
    Sequence,
    OperatorFamily,
    ClosedCover,
    DensePoints,
    L2Element,
    RenormPair,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 7] = [
        InstanceKind::Body,
        InstanceKind::Sequence,
        InstanceKind::OperatorFamily,
        InstanceKind::ClosedCover,
        InstanceKind::DensePoints,
        InstanceKind::L2Element,
        InstanceKind::RenormPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Body => "body",
            InstanceKind::Sequence => "sequence",
            InstanceKind::OperatorFamily => "operator_family",
            InstanceKind::ClosedCover => "closed_cover",
            InstanceKind::DensePoints => "dense_points",
            InstanceKind::L2Element => "l2_element",
            InstanceKind::RenormPair => "renorm_pair",
        }
    }

    pub fn parse(s: &str) -> Option<InstanceKind> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Per-atom dimension cap of this kind, before the config's own cap.
    pub fn dim_cap(self) -> usize {
        match self {
            InstanceKind::Body | InstanceKind::OperatorFamily => 4,
            InstanceKind::ClosedCover => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Body(SymmetricBody),
    Sequence { region: SymmetricBody, sequence: CondSequence },
    OperatorFamily { generators: Vec<CondLinearMap>, dom: CondNorm, cod: CondNorm },
    ClosedCover { space: SpaceBox, sets: Vec<ClosedSet> },
    DensePoints(Vec<CondVector>),
    L2Element { norms: Vec<CondNorm>, x: L2Element, x_star: Vec<CondVector> },
    RenormPair { k: SymmetricBody, unit_ball: SymmetricBody },
}

pub(crate) fn doc(algebra: Algebra, object: Object) -> Value {
    encode_document(&Document { algebra, object })
}

pub(crate) fn vectors_json(xs: &[CondVector]) -> Value {
    json!(xs.iter().map(|x| doc(x.algebra(), Object::Vector(x.clone()))).collect::<Vec<_>>())
}

pub(crate) fn space_json(space: &SpaceBox) -> Value {
    let m: serde_json::Map<String, Value> = space
        .iter()
        .map(|(t, b)| (t.to_string(), json!(b.iter().map(|(l, h)| json!([l, h])).collect::<Vec<_>>())))
        .collect();
    json!({"atoms": space.algebra().atom_count(), "per_atom": m})
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Body(_) => InstanceKind::Body,
            Instance::Sequence { .. } => InstanceKind::Sequence,
            Instance::OperatorFamily { .. } => InstanceKind::OperatorFamily,
            Instance::ClosedCover { .. } => InstanceKind::ClosedCover,
            Instance::DensePoints(_) => InstanceKind::DensePoints,
            Instance::L2Element { .. } => InstanceKind::L2Element,
            Instance::RenormPair { .. } => InstanceKind::RenormPair,
        }
    }

    /// Serialization built from the document forms of the parts.
    pub fn to_json(&self) -> Value {
        let body = |b: &SymmetricBody| doc(b.algebra(), Object::Body(b.clone()));
        let norm = |n: &CondNorm| doc(n.algebra(), Object::Norm(n.clone()));
        let v = match self {
            Instance::Body(b) => json!({"body": body(b)}),
            Instance::Sequence { region, sequence } => json!({
                "region": body(region),
                "sequence": doc(region.algebra(), Object::Sequence(sequence.clone())),
            }),
            Instance::OperatorFamily { generators, dom, cod } => json!({
                "generators": generators.iter().map(|g| doc(g.algebra(), Object::Map(g.clone()))).collect::<Vec<_>>(),
                "dom": norm(dom),
                "cod": norm(cod),
            }),
            Instance::ClosedCover { space, sets } => json!({
                "space": space_json(space),
                "sets": sets.iter().map(|s| doc(s.algebra(), Object::ClosedSet(s.clone()))).collect::<Vec<_>>(),
            }),
            Instance::DensePoints(xs) => json!({"points": vectors_json(xs)}),
            Instance::L2Element { norms, x, x_star } => json!({
                "norms": norms.iter().map(norm).collect::<Vec<_>>(),
                "components": vectors_json(&x.components),
                "x_star": vectors_json(x_star),
            }),
            Instance::RenormPair { k, unit_ball } => json!({"k": body(k), "unit_ball": body(unit_ball)}),
        };
        json!({"kind": self.kind().name(), "instance": v})
    }
}

pub fn random_pnorm<R: Rng + ?Sized>(rng: &mut R) -> PNorm {
    PNorm::ALL[rng.random_range(0..3)]
}

/// Per-atom dimensions drawn from `1..=cap`.
pub fn random_dims<R: Rng + ?Sized>(rng: &mut R, on: &Condition, cap: usize) -> BTreeMap<usize, usize> {
    on.atoms().map(|t| (t, rng.random_range(1..=cap.max(1)))).collect()
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-scale..scale)).collect()
}

/// A nonzero vector with entries in `[-scale, scale]`.
pub fn random_nonzero<R: Rng + ?Sized>(rng: &mut R, d: usize, scale: f64) -> Vec<f64> {
    loop {
        let v = random_vector(rng, d, scale);
        if v.iter().any(|a| a.abs() > 1e-3 * scale) {
            return v;
        }
    }
}

pub fn random_cond_vector<R: Rng + ?Sized>(rng: &mut R, dims: &BTreeMap<usize, usize>, on: &Condition, scale: f64) -> CondVector {
    CondVector::from_fn(on, |t| random_vector(rng, dims[&t], scale))
}

/// A uniformly random condition of `alg`.
pub fn random_condition<R: Rng + ?Sized>(rng: &mut R, alg: Algebra) -> Condition {
    alg.condition((0..alg.atom_count()).filter(|_| rng.random_bool(0.5))).expect("atoms in range")
}

/// Partition of `owner` into at most `blocks` labelled blocks.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, owner: &Condition, blocks: usize) -> Partition {
    let assignment: BTreeMap<usize, usize> = owner.atoms().map(|t| (t, rng.random_range(0..blocks.max(1)))).collect();
    make_partition(owner, &assignment).expect("labels cover the owner")
}

/// Standard axes plus `3·dim` random directions, offsets in `[lo, hi]`.
pub fn random_atom_body<R: Rng + ?Sized>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> AtomBody {
    let grid = DirectionGrid::standard(dim, 3 * dim, rng);
    grid_body(rng, &grid, lo, hi)
}

pub fn grid_body<R: Rng + ?Sized>(rng: &mut R, grid: &DirectionGrid, lo: f64, hi: f64) -> AtomBody {
    let facets = grid.directions().iter().map(|u| Facet { u: u.clone(), c: rng.random_range(lo..=hi) }).collect();
    AtomBody::new(grid.dim(), facets).expect("positive offsets on nonzero directions")
}

/// A slab `{|⟨u, x⟩| ≤ c}`, unbounded in every dimension above 1;
/// for `dim = 1` the body without facets.
pub fn slab<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> AtomBody {
    let facets = if dim == 1 {
        Vec::new()
    } else {
        vec![Facet { u: random_nonzero(rng, dim, 1.0), c: rng.random_range(0.5..2.0) }]
    };
    AtomBody::new(dim, facets).expect("valid slab")
}

/// A point of the body: a random direction scaled into `C`.
pub fn sample_in_body<R: Rng + ?Sized>(rng: &mut R, body: &AtomBody) -> Vec<f64> {
    let v = random_nonzero(rng, body.dim(), 1.0);
    let g = body.gauge(&v);
    let s = rng.random_range(0.0..1.0) / g;
    v.into_iter().map(|a| a * s).collect()
}

fn fail(msg: impl Into<String>) -> HarnessError {
    HarnessError::GenerationFailed(msg.into())
}

pub fn gen_body<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<SymmetricBody, HarnessError> {
    let on = alg.one();
    let dims = random_dims(rng, &on, cap);
    let body = SymmetricBody::from_fn(&on, |t| random_atom_body(rng, dims[&t], 0.5, 2.0));
    if let Some((t, _)) = body.iter().find(|(_, b)| !b.is_bounded()) {
        return Err(fail(format!("body directions do not span on atom {t}")));
    }
    Ok(body)
}

pub fn gen_sequence<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<(SymmetricBody, CondSequence), HarnessError> {
    let region = gen_body(rng, alg, cap)?;
    let terms: Vec<CondVector> =
        (0..SEQUENCE_TERMS).map(|_| CondVector::from_fn(region.on(), |t| sample_in_body(rng, region.at(t)))).collect();
    for (k, x) in terms.iter().enumerate() {
        if let Some((t, _)) = x.iter().find(|(t, v)| !region.at(*t).contains(v, 1e-12)) {
            return Err(fail(format!("term {} leaves the region on atom {t}", k + 1)));
        }
    }
    Ok((region, CondSequence::Table(terms)))
}

pub fn gen_operator_family<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<Instance, HarnessError> {
    let on = alg.one();
    let shapes: BTreeMap<usize, (usize, usize)> =
        on.atoms().map(|t| (t, (rng.random_range(1..=cap), rng.random_range(1..=cap)))).collect();
    let count = rng.random_range(1..=3);
    let generators: Vec<CondLinearMap> = (0..count)
        .map(|_| {
            CondLinearMap::from_fn(&on, |t| {
                let (r, c) = shapes[&t];
                DMatrix::from_fn(r, c, |_, _| rng.random_range(-2.0..2.0))
            })
        })
        .collect();
    let dom = CondNorm::from_fn(&on, |_| AtomNorm::P(random_pnorm(rng)));
    let cod = CondNorm::from_fn(&on, |_| AtomNorm::P(random_pnorm(rng)));
    if generators.iter().any(|g| g.iter().any(|(_, m)| m.iter().any(|v| !v.is_finite()))) {
        return Err(fail("non-finite matrix entry"));
    }
    Ok(Instance::OperatorFamily { generators, dom, cod })
}

fn interval_cuts<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, cuts: usize) -> Vec<f64> {
    let w = hi - lo;
    let mut cs: Vec<f64> = (0..cuts).map(|_| lo + w * rng.random_range(0.2..0.8)).collect();
    cs.sort_by(f64::total_cmp);
    let mut pts = vec![lo];
    pts.extend(cs);
    pts.push(hi);
    pts
}

pub fn gen_closed_cover<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<Instance, HarnessError> {
    let on = alg.one();
    let n_sets = rng.random_range(1..=3usize);
    let mut space = BTreeMap::new();
    let mut per_set: Vec<BTreeMap<usize, AtomClosedSet>> = vec![BTreeMap::new(); n_sets];
    for t in on.atoms() {
        let d = rng.random_range(1..=cap.clamp(1, 2));
        let bounds: Vec<(f64, f64)> = (0..d)
            .map(|_| {
                let lo = rng.random_range(-1.0..1.0);
                (lo, lo + rng.random_range(0.5..2.0))
            })
            .collect();
        // enough cuts that there are at least as many pieces as sets
        let cuts = if d == 1 { n_sets.saturating_sub(1).max(1) } else { 1 };
        let ticks: Vec<Vec<f64>> = bounds.iter().map(|(lo, hi)| interval_cuts(rng, *lo, *hi, cuts)).collect();
        let mut pieces: Vec<ConvexPiece> = Vec::new();
        let counts: Vec<usize> = ticks.iter().map(|v| v.len() - 1).collect();
        for mut code in 0..counts.iter().product::<usize>() {
            let b = ticks
                .iter()
                .zip(&counts)
                .map(|(tk, n)| {
                    let j = code % n;
                    code /= n;
                    (tk[j], tk[j + 1])
                })
                .collect();
            pieces.push(ConvexPiece::interval_product(b).map_err(|e| fail(e.to_string()))?);
        }
        pieces.shuffle(rng);
        let mut dealt: Vec<Vec<ConvexPiece>> = vec![Vec::new(); n_sets];
        for (i, p) in pieces.into_iter().enumerate() {
            let s = if i < n_sets { i } else { rng.random_range(0..n_sets) };
            dealt[s].push(p);
        }
        for (s, ps) in dealt.into_iter().enumerate() {
            if ps.is_empty() {
                return Err(fail(format!("closed set {} is empty on atom {t}", s + 1)));
            }
            let set = if ps.len() == 1 {
                AtomClosedSet::Convex(ps.into_iter().next().expect("one piece"))
            } else {
                AtomClosedSet::FiniteUnion(ps)
            };
            per_set[s].insert(t, set);
        }
        space.insert(t, bounds);
    }
    let space = SpaceBox::new(on.clone(), space)?;
    let sets: Vec<ClosedSet> = per_set.into_iter().map(|m| ClosedSet::new(on.clone(), m)).collect::<Result<_, _>>()?;
    for (t, b) in space.iter() {
        for p in box_grid(b, 40) {
            if !sets.iter().any(|s| s.at(t).contains(&p, 1e-12)) {
                return Err(fail(format!("point {p:?} of atom {t} is not covered")));
            }
        }
    }
    Ok(Instance::ClosedCover { space, sets })
}

pub fn gen_dense_points<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<Vec<CondVector>, HarnessError> {
    let on = alg.one();
    let dims = random_dims(rng, &on, cap);
    let count = rng.random_range(1..=cap + 1);
    let points: Vec<CondVector> = (0..count).map(|_| CondVector::from_fn(&on, |t| random_nonzero(rng, dims[&t], 1.0))).collect();
    Ok(points)
}

pub fn gen_l2_element<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<Instance, HarnessError> {
    let on = alg.one();
    let n = rng.random_range(1..=4);
    let mut norms = Vec::with_capacity(n);
    let mut comps = Vec::with_capacity(n);
    let mut duals = Vec::with_capacity(n);
    for _ in 0..n {
        let dims = random_dims(rng, &on, cap);
        norms.push(CondNorm::from_fn(&on, |_| AtomNorm::P(random_pnorm(rng))));
        comps.push(random_cond_vector(rng, &dims, &on, 2.0));
        duals.push(random_cond_vector(rng, &dims, &on, 2.0));
    }
    Ok(Instance::L2Element { norms, x: L2Element::finite(comps), x_star: duals })
}

pub fn gen_renorm_pair<R: Rng + ?Sized>(rng: &mut R, alg: Algebra, cap: usize) -> Result<Instance, HarnessError> {
    let on = alg.one();
    let dims = random_dims(rng, &on, cap);
    let mut k = BTreeMap::new();
    let mut ball = BTreeMap::new();
    for t in on.atoms() {
        let grid = DirectionGrid::standard(dims[&t], 3 * dims[&t], rng);
        k.insert(t, grid_body(rng, &grid, 0.3, 1.5));
        ball.insert(t, grid.unit_ball(random_pnorm(rng)));
    }
    let k = SymmetricBody::new(on.clone(), k)?;
    let unit_ball = SymmetricBody::new(on, ball)?;
    for (t, b) in k.iter() {
        if !b.is_bounded() || !unit_ball.at(t).is_bounded() || !b.same_grid(unit_ball.at(t)) {
            return Err(fail(format!("renorm pair hypotheses fail on atom {t}")));
        }
    }
    Ok(Instance::RenormPair { k, unit_ball })
}

/// Draws one instance of `kind` on the algebra of `config.atoms` atoms and
/// re-verifies its hypotheses.
pub fn generate_instance<R: Rng + ?Sized>(kind: InstanceKind, config: &SuiteConfig, rng: &mut R) -> Result<Instance, HarnessError> {
    config.validate()?;
    let alg = Algebra::new(config.atoms)?;
    let cap = config.dims(kind.dim_cap());
    match kind {
        InstanceKind::Body => gen_body(rng, alg, cap).map(Instance::Body),
        InstanceKind::Sequence => gen_sequence(rng, alg, cap).map(|(region, sequence)| Instance::Sequence { region, sequence }),
        InstanceKind::OperatorFamily => gen_operator_family(rng, alg, cap),
        InstanceKind::ClosedCover => gen_closed_cover(rng, alg, cap),
        InstanceKind::DensePoints => gen_dense_points(rng, alg, cap).map(Instance::DensePoints),
        InstanceKind::L2Element => gen_l2_element(rng, alg, cap),
        InstanceKind::RenormPair => gen_renorm_pair(rng, alg, cap),
    }
}

/// Concatenation of one of `values` per atom, as chosen by `pick`.
pub fn pick_per_atom<X: Clone>(values: &[ConditionalValue<X>], pick: &BTreeMap<usize, usize>) -> ConditionalValue<X> {
    let on = values[0].on();
    ConditionalValue::from_fn(on, |t| values[pick[&t]].at(t).clone())
}
