//! JSON forms of conditional objects.
//!
//! Syntax errors are located by line and column, semantic errors by a
//! `$.a.b[0]` path into the document.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::algebra::{Algebra, Condition, Partition};
use crate::analysis::{AtomClosedSet, ClosedSet, CondSequence, ConvexPiece, TermFormula};
use crate::conditional::{ConditionalValue, StableSet};
use crate::linear::{AtomBody, AtomNorm, CondLinearMap, CondNorm, CondVector, Facet, PNorm, SymmetricBody};
use crate::numbers::{CondNat, CondReal};

/// Where and why decoding failed.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for DecodeError {}

type DResult<T> = Result<T, DecodeError>;

/// Object kinds accepted by [`parse_document`].
pub const KINDS: [&str; 12] = [
    "condition",
    "partition",
    "real",
    "nat",
    "vector",
    "real_set",
    "vector_set",
    "body",
    "map",
    "norm",
    "closed_set",
    "sequence",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Object {
    Condition(Condition),
    Partition(Partition),
    Real(CondReal),
    Nat(CondNat),
    Vector(CondVector),
    RealSet(StableSet<f64>),
    VectorSet(StableSet<Vec<f64>>),
    Body(SymmetricBody),
    Map(CondLinearMap),
    Norm(CondNorm),
    ClosedSet(ClosedSet),
    Sequence(CondSequence),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Condition(_) => "condition",
            Object::Partition(_) => "partition",
            Object::Real(_) => "real",
            Object::Nat(_) => "nat",
            Object::Vector(_) => "vector",
            Object::RealSet(_) => "real_set",
            Object::VectorSet(_) => "vector_set",
            Object::Body(_) => "body",
            Object::Map(_) => "map",
            Object::Norm(_) => "norm",
            Object::ClosedSet(_) => "closed_set",
            Object::Sequence(_) => "sequence",
        }
    }
}

/// `{"atoms": m, "kind": ..., "value": ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub algebra: Algebra,
    pub object: Object,
}

#[derive(Clone)]
struct Path(String);

impl Path {
    fn root() -> Self {
        Path("$".into())
    }

    fn key(&self, k: &str) -> Path {
        Path(format!("{}.{k}", self.0))
    }

    fn idx(&self, i: usize) -> Path {
        Path(format!("{}[{i}]", self.0))
    }

    fn err<T>(&self, message: impl Into<String>) -> DResult<T> {
        Err(DecodeError { location: format!("at {}", self.0), message: message.into() })
    }

    fn wrap<T>(&self, r: crate::Result<T>) -> DResult<T> {
        r.or_else(|e| self.err(e.to_string()))
    }
}

fn object<'a>(v: &'a Value, p: &Path) -> DResult<&'a Map<String, Value>> {
    v.as_object().map_or_else(|| p.err("expected an object"), Ok)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, p: &Path) -> DResult<&'a Value> {
    m.get(key).map_or_else(|| p.err(format!("missing field \"{key}\"")), Ok)
}

fn array<'a>(v: &'a Value, p: &Path) -> DResult<&'a Vec<Value>> {
    v.as_array().map_or_else(|| p.err("expected an array"), Ok)
}

fn number(v: &Value, p: &Path) -> DResult<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => p.err("expected a finite number"),
    }
}

fn uint(v: &Value, p: &Path) -> DResult<u64> {
    v.as_u64().map_or_else(|| p.err("expected a nonnegative integer"), Ok)
}

fn numbers(v: &Value, p: &Path) -> DResult<Vec<f64>> {
    array(v, p)?.iter().enumerate().map(|(i, x)| number(x, &p.idx(i))).collect()
}

fn condition(alg: &Algebra, v: &Value, p: &Path) -> DResult<Condition> {
    let atoms = array(v, p)?
        .iter()
        .enumerate()
        .map(|(i, x)| uint(x, &p.idx(i)).map(|t| t as usize))
        .collect::<DResult<Vec<_>>>()?;
    p.wrap(alg.condition(atoms))
}

type Entries<'a> = Vec<(usize, &'a Value, Path)>;

/// Per-atom map keyed by atom index strings; checked against `on`.
fn per_atom<'a>(alg: &Algebra, v: &'a Value, on: Option<&Condition>, p: &Path) -> DResult<(Condition, Entries<'a>)> {
    let m = object(v, p)?;
    let mut out = Vec::with_capacity(m.len());
    for (k, x) in m {
        let kp = p.key(k);
        let t: usize = match k.parse() {
            Ok(t) => t,
            Err(_) => return kp.err("atom keys must be nonnegative integers"),
        };
        if t >= alg.atom_count() {
            return kp.err(format!("atom {t} is outside the algebra of {} atoms", alg.atom_count()));
        }
        out.push((t, x, kp));
    }
    out.sort_by_key(|e| e.0);
    if out.windows(2).any(|w| w[0].0 == w[1].0) {
        return p.err("an atom is listed twice");
    }
    let keys = p.wrap(alg.condition(out.iter().map(|e| e.0)))?;
    if let Some(on) = on {
        if *on != keys {
            return p.err(format!("entries are given on {keys}, condition is {on}"));
        }
    }
    Ok((keys, out))
}

fn on_field(alg: &Algebra, m: &Map<String, Value>, p: &Path) -> DResult<Option<Condition>> {
    match m.get("on") {
        None => Ok(None),
        Some(v) => condition(alg, v, &p.key("on")).map(Some),
    }
}

fn conditional<X: Clone>(
    alg: &Algebra,
    v: &Value,
    key: &str,
    p: &Path,
    mut f: impl FnMut(usize, &Value, &Path) -> DResult<X>,
) -> DResult<ConditionalValue<X>> {
    let m = object(v, p)?;
    let on = on_field(alg, m, p)?;
    let kp = p.key(key);
    let (keys, entries) = per_atom(alg, field(m, key, p)?, on.as_ref(), &kp)?;
    let mut values = BTreeMap::new();
    for (t, x, xp) in entries {
        values.insert(t, f(t, x, &xp)?);
    }
    p.wrap(ConditionalValue::new(keys, values))
}

fn facet(v: &Value, p: &Path) -> DResult<Facet> {
    let m = object(v, p)?;
    Ok(Facet { u: numbers(field(m, "u", p)?, &p.key("u"))?, c: number(field(m, "c", p)?, &p.key("c"))? })
}

fn atom_body(v: &Value, p: &Path) -> DResult<AtomBody> {
    let facets = array(v, p)?.iter().enumerate().map(|(i, f)| facet(f, &p.idx(i))).collect::<DResult<Vec<_>>>()?;
    let dim = match facets.first() {
        Some(f) => f.u.len(),
        None => return p.err("a body needs at least one facet"),
    };
    p.wrap(AtomBody::new(dim, facets))
}

fn matrix(v: &Value, p: &Path) -> DResult<DMatrix<f64>> {
    let rows = array(v, p)?.iter().enumerate().map(|(i, r)| numbers(r, &p.idx(i))).collect::<DResult<Vec<_>>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return p.err("a matrix needs at least one row and one column");
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return p.idx(i).err(format!("row has {} entries, expected {cols}", rows[i].len()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn atom_norm(v: &Value, p: &Path) -> DResult<AtomNorm> {
    if let Some(s) = v.as_str() {
        return PNorm::parse(s).map(AtomNorm::P).map_or_else(|| p.err(format!("unknown norm \"{s}\"")), Ok);
    }
    let m = object(v, p)?;
    Ok(AtomNorm::Gauge(atom_body(field(m, "gauge", p)?, &p.key("gauge"))?))
}

fn convex_piece(v: &Value, p: &Path) -> DResult<ConvexPiece> {
    let m = object(v, p)?;
    let kind = field(m, "kind", p)?.as_str().unwrap_or_default();
    match kind {
        "interval_product" => {
            let bp = p.key("bounds");
            let bounds = array(field(m, "bounds", p)?, &bp)?
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let ip = bp.idx(i);
                    let pair = numbers(b, &ip)?;
                    if pair.len() != 2 {
                        return ip.err("expected [lo, hi]");
                    }
                    Ok((pair[0], pair[1]))
                })
                .collect::<DResult<Vec<_>>>()?;
            p.wrap(ConvexPiece::interval_product(bounds))
        }
        "hbody" => {
            let body = atom_body(field(m, "facets", p)?, &p.key("facets"))?;
            let center = match m.get("center") {
                Some(c) => numbers(c, &p.key("center"))?,
                None => vec![0.0; body.dim()],
            };
            p.wrap(ConvexPiece::hbody(center, body))
        }
        _ => p.key("kind").err("expected \"interval_product\" or \"hbody\""),
    }
}

fn closed_atom(v: &Value, p: &Path) -> DResult<AtomClosedSet> {
    let m = object(v, p)?;
    let set = if m.get("kind").and_then(Value::as_str) == Some("finite_union") {
        let pp = p.key("pieces");
        let pieces = array(field(m, "pieces", p)?, &pp)?
            .iter()
            .enumerate()
            .map(|(i, x)| convex_piece(x, &pp.idx(i)))
            .collect::<DResult<Vec<_>>>()?;
        AtomClosedSet::FiniteUnion(pieces)
    } else {
        AtomClosedSet::Convex(convex_piece(v, p)?)
    };
    p.wrap(set.validate())?;
    Ok(set)
}

fn term_formula(v: &Value, p: &Path) -> DResult<TermFormula> {
    object(v, p)?;
    let f: TermFormula = serde_json::from_value(v.clone()).or_else(|e| p.err(e.to_string()))?;
    for (name, x) in [("offset", f.offset), ("scale", f.scale), ("power", f.power), ("ratio", f.ratio)] {
        if !x.is_finite() {
            return p.key(name).err("expected a finite number");
        }
    }
    Ok(f)
}

fn sequence(alg: &Algebra, v: &Value, p: &Path) -> DResult<CondSequence> {
    let m = object(v, p)?;
    match field(m, "kind", p)?.as_str() {
        Some("formula") => {
            let f = conditional(alg, v, "per_atom", p, |_, x, xp| {
                array(x, xp)?.iter().enumerate().map(|(i, c)| term_formula(c, &xp.idx(i))).collect()
            })?;
            Ok(CondSequence::Formula(f))
        }
        Some("table") => {
            let tp = p.key("terms");
            let terms = array(field(m, "terms", p)?, &tp)?
                .iter()
                .enumerate()
                .map(|(i, x)| conditional(alg, x, "values", &tp.idx(i), |_, y, yp| numbers(y, yp)))
                .collect::<DResult<Vec<_>>>()?;
            if terms.is_empty() {
                return tp.err("a table needs at least one term");
            }
            let s = CondSequence::Table(terms);
            p.wrap(s.validate())?;
            Ok(s)
        }
        _ => p.key("kind").err("expected \"formula\" or \"table\""),
    }
}

/// Decodes the `value` of a document of the given kind.
pub fn decode_object(alg: &Algebra, kind: &str, v: &Value) -> DResult<Object> {
    decode_at(alg, kind, v, &Path::root())
}

fn decode_at(alg: &Algebra, kind: &str, v: &Value, p: &Path) -> DResult<Object> {
    Ok(match kind {
        "condition" => Object::Condition(condition(alg, v, p)?),
        "partition" => {
            let m = object(v, p)?;
            let owner = condition(alg, field(m, "owner", p)?, &p.key("owner"))?;
            let bp = p.key("blocks");
            let blocks = array(field(m, "blocks", p)?, &bp)?
                .iter()
                .enumerate()
                .map(|(i, b)| condition(alg, b, &bp.idx(i)))
                .collect::<DResult<Vec<_>>>()?;
            Object::Partition(p.wrap(Partition::new(owner, blocks))?)
        }
        "real" => Object::Real(conditional(alg, v, "values", p, |_, x, xp| number(x, xp))?),
        "nat" => {
            let n = conditional(alg, v, "values", p, |_, x, xp| uint(x, xp))?;
            Object::Nat(p.wrap(CondNat::new(n))?)
        }
        "vector" => Object::Vector(conditional(alg, v, "values", p, |_, x, xp| numbers(x, xp))?),
        "real_set" | "vector_set" => {
            let m = object(v, p)?;
            let on = on_field(alg, m, p)?;
            let pp = p.key("per_atom");
            let (keys, entries) = per_atom(alg, field(m, "per_atom", p)?, on.as_ref(), &pp)?;
            if kind == "real_set" {
                let mut sets = BTreeMap::new();
                for (t, x, xp) in entries {
                    sets.insert(t, array(x, &xp)?.iter().enumerate().map(|(i, y)| number(y, &xp.idx(i))).collect::<DResult<Vec<_>>>()?);
                }
                Object::RealSet(p.wrap(StableSet::new(keys, sets))?)
            } else {
                let mut sets = BTreeMap::new();
                for (t, x, xp) in entries {
                    sets.insert(t, array(x, &xp)?.iter().enumerate().map(|(i, y)| numbers(y, &xp.idx(i))).collect::<DResult<Vec<_>>>()?);
                }
                Object::VectorSet(p.wrap(StableSet::new(keys, sets))?)
            }
        }
        "body" => Object::Body(conditional(alg, v, "per_atom", p, |_, x, xp| atom_body(x, xp))?),
        "map" => Object::Map(conditional(alg, v, "per_atom", p, |_, x, xp| matrix(x, xp))?),
        "norm" => Object::Norm(conditional(alg, v, "per_atom", p, |_, x, xp| atom_norm(x, xp))?),
        "closed_set" => Object::ClosedSet(conditional(alg, v, "per_atom", p, |_, x, xp| closed_atom(x, xp))?),
        "sequence" => Object::Sequence(sequence(alg, v, p)?),
        other => return p.err(format!("unknown kind \"{other}\"; expected one of {}", KINDS.join(", "))),
    })
}

/// Parses JSON text, reporting syntax errors by line and column.
pub fn parse_json(text: &str) -> DResult<Value> {
    serde_json::from_str(text).map_err(|e| DecodeError {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// Decodes a document value.
pub fn decode_document(v: &Value) -> DResult<Document> {
    let p = Path::root();
    let m = object(v, &p)?;
    let atoms = uint(field(m, "atoms", &p)?, &p.key("atoms"))?;
    let algebra = p.key("atoms").wrap(Algebra::new(atoms as usize))?;
    let kind = match field(m, "kind", &p)?.as_str() {
        Some(k) => k,
        None => return p.key("kind").err("expected a string"),
    };
    let object = decode_at(&algebra, kind, field(m, "value", &p)?, &p.key("value"))?;
    Ok(Document { algebra, object })
}

pub fn parse_document(text: &str) -> DResult<Document> {
    decode_document(&parse_json(text)?)
}

fn cond_json(c: &Condition) -> Value {
    json!(c.atoms().collect::<Vec<_>>())
}

fn keyed<X>(x: &ConditionalValue<X>, key: &str, f: impl Fn(&X) -> Value) -> Value
where
    X: Clone,
{
    let values: Map<String, Value> = x.iter().map(|(t, v)| (t.to_string(), f(v))).collect();
    json!({ "on": cond_json(x.on()), key: values })
}

fn facets_json(b: &AtomBody) -> Value {
    json!(b.facets())
}

fn piece_json(p: &ConvexPiece) -> Value {
    match p {
        ConvexPiece::IntervalProduct(b) => {
            json!({"kind": "interval_product", "bounds": b.iter().map(|(l, h)| json!([l, h])).collect::<Vec<_>>()})
        }
        ConvexPiece::HBody { center, body } => json!({"kind": "hbody", "center": center, "facets": facets_json(body)}),
    }
}

/// JSON form of the `value` of an object.
pub fn encode_object(o: &Object) -> Value {
    match o {
        Object::Condition(c) => cond_json(c),
        Object::Partition(p) => json!({
            "owner": cond_json(p.owner()),
            "blocks": p.blocks().iter().map(cond_json).collect::<Vec<_>>(),
        }),
        Object::Real(x) => keyed(x, "values", |v| json!(v)),
        Object::Nat(n) => keyed(n.value(), "values", |v| json!(v)),
        Object::Vector(x) => keyed(x, "values", |v| json!(v)),
        Object::RealSet(s) => {
            let m: Map<String, Value> = s.per_atom().iter().map(|(t, v)| (t.to_string(), json!(v))).collect();
            json!({"on": cond_json(s.on()), "per_atom": m})
        }
        Object::VectorSet(s) => {
            let m: Map<String, Value> = s.per_atom().iter().map(|(t, v)| (t.to_string(), json!(v))).collect();
            json!({"on": cond_json(s.on()), "per_atom": m})
        }
        Object::Body(b) => keyed(b, "per_atom", facets_json),
        Object::Map(m) => keyed(m, "per_atom", |a| {
            json!((0..a.nrows()).map(|i| a.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
        }),
        Object::Norm(n) => keyed(n, "per_atom", |a| match a {
            AtomNorm::P(p) => json!(p.name()),
            AtomNorm::Gauge(b) => json!({"gauge": facets_json(b)}),
        }),
        Object::ClosedSet(c) => keyed(c, "per_atom", |a| match a {
            AtomClosedSet::Convex(p) => piece_json(p),
            AtomClosedSet::FiniteUnion(ps) => {
                json!({"kind": "finite_union", "pieces": ps.iter().map(piece_json).collect::<Vec<_>>()})
            }
        }),
        Object::Sequence(CondSequence::Formula(f)) => {
            let mut v = keyed(f, "per_atom", |c| json!(c));
            v["kind"] = json!("formula");
            v
        }
        Object::Sequence(CondSequence::Table(terms)) => json!({
            "kind": "table",
            "terms": terms.iter().map(|x| keyed(x, "values", |v| json!(v))).collect::<Vec<_>>(),
        }),
    }
}

pub fn encode_document(d: &Document) -> Value {
    json!({"atoms": d.algebra.atom_count(), "kind": d.object.kind(), "value": encode_object(&d.object)})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str) -> Document {
        let d = parse_document(text).unwrap();
        let again = decode_document(&encode_document(&d)).unwrap();
        assert_eq!(again, d);
        d
    }

    #[test]
    fn roundtrips() {
        roundtrip(r#"{"atoms":2,"kind":"real","value":{"on":[0,1],"values":{"0":2,"1":0}}}"#);
        roundtrip(r#"{"atoms":3,"kind":"partition","value":{"owner":[0,1,2],"blocks":[[0,2],[],[1]]}}"#);
        roundtrip(r#"{"atoms":2,"kind":"body","value":{"on":[0],"per_atom":{"0":[{"u":[1,0],"c":1},{"u":[0,1],"c":2}]}}}"#);
        roundtrip(r#"{"atoms":1,"kind":"map","value":{"per_atom":{"0":[[1,2],[3,4]]}}}"#);
        roundtrip(r#"{"atoms":2,"kind":"norm","value":{"per_atom":{"0":"l2","1":{"gauge":[{"u":[1],"c":2}]}}}}"#);
        roundtrip(r#"{"atoms":1,"kind":"vector_set","value":{"per_atom":{"0":[[1,2],[1,2],[0,0]]}}}"#);
        roundtrip(
            r#"{"atoms":2,"kind":"closed_set","value":{"per_atom":{
                "0":{"kind":"interval_product","bounds":[[0,0.5]]},
                "1":{"kind":"finite_union","pieces":[{"kind":"hbody","center":[1],"facets":[{"u":[1],"c":0.5}]}]}}}}"#,
        );
        roundtrip(r#"{"atoms":2,"kind":"sequence","value":{"kind":"formula","per_atom":{"0":[{"power":-1}],"1":[{"alternating":true}]}}}"#);
        roundtrip(r#"{"atoms":1,"kind":"sequence","value":{"kind":"table","terms":[{"values":{"0":[1]}},{"values":{"0":[2]}}]}}"#);
    }

    #[test]
    fn diagnostics() {
        let e = parse_document(r#"{"atoms":2,"kind":"real","value":{"on":[0,1],"values":{"0":2"#).unwrap_err();
        assert!(e.location.starts_with("line 1, column"), "{e}");
        let e = parse_document(r#"{"atoms":2,"kind":"real","value":{"on":[0,1],"values":{"0":2,"1":"x"}}}"#).unwrap_err();
        assert_eq!(e.location, "at $.value.values.1");
        let e = parse_document(r#"{"atoms":2,"kind":"real","value":{"on":[0,1],"values":{"0":2}}}"#).unwrap_err();
        assert_eq!(e.location, "at $.value.values");
        let e = parse_document(r#"{"atoms":2,"kind":"nat","value":{"values":{"0":0}}}"#).unwrap_err();
        assert_eq!(e.location, "at $.value");
        let e = parse_document(r#"{"atoms":1,"kind":"body","value":{"per_atom":{"0":[{"u":[1],"c":-1}]}}}"#).unwrap_err();
        assert_eq!(e.location, "at $.value.per_atom.0");
        let e = parse_document(r#"{"atoms":1,"kind":"what","value":1}"#).unwrap_err();
        assert!(e.message.contains("unknown kind"));
    }
}
