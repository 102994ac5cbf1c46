//! Conditional elements as step functions over atoms, and stable sets.
//!
//! Over an atomic algebra an element `x` on a condition `a` is fully
//! determined by its value on each atom of `a`, so [`ConditionalValue`]
//! stores exactly that map. A stable set on `a` is then a per-atom product
//! of nonempty payload sets ([`StableSet`]); the product is what closing a
//! family under all concatenations produces.

use std::collections::BTreeMap;

use crate::algebra::{Algebra, Condition, Partition};
use crate::error::{Error, Result};

/// An element `x` living on condition `on`, one payload per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalValue<X> {
    on: Condition,
    values: BTreeMap<usize, X>,
}

impl<X: Clone> ConditionalValue<X> {
    pub fn new(on: Condition, values: BTreeMap<usize, X>) -> Result<Self> {
        let ok = values.len() == on.len() && values.keys().all(|t| on.contains(*t));
        if !ok {
            return Err(Error::InvalidAssignment(format!(
                "values defined on {:?}, condition is {on}",
                values.keys().collect::<Vec<_>>()
            )));
        }
        Ok(Self { on, values })
    }

    pub fn from_fn(on: &Condition, mut f: impl FnMut(usize) -> X) -> Self {
        let values = on.atoms().map(|t| (t, f(t))).collect();
        Self { on: on.clone(), values }
    }

    pub fn try_from_fn(on: &Condition, mut f: impl FnMut(usize) -> Result<X>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for t in on.atoms() {
            values.insert(t, f(t)?);
        }
        Ok(Self { on: on.clone(), values })
    }

    pub fn constant(on: &Condition, x: X) -> Self {
        Self::from_fn(on, |_| x.clone())
    }

    /// The unique element on condition 0.
    pub fn null(algebra: Algebra) -> Self {
        Self { on: algebra.zero(), values: BTreeMap::new() }
    }

    pub fn on(&self) -> &Condition {
        &self.on
    }

    pub fn algebra(&self) -> Algebra {
        self.on.algebra()
    }

    pub fn is_null(&self) -> bool {
        self.on.is_zero()
    }

    pub fn get(&self, atom: usize) -> Option<&X> {
        self.values.get(&atom)
    }

    /// Value on an atom the caller knows to be in the condition.
    pub fn at(&self, atom: usize) -> &X {
        self.values.get(&atom).unwrap_or_else(|| panic!("atom {atom} not in {}", self.on))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &X)> {
        self.values.iter().map(|(t, x)| (*t, x))
    }

    pub fn values(&self) -> &BTreeMap<usize, X> {
        &self.values
    }

    /// `x|b` for `b ≤ a`.
    pub fn restrict(&self, b: &Condition) -> Result<Self> {
        b.ensure_leq(&self.on)?;
        let values = b.atoms().map(|t| (t, self.values[&t].clone())).collect();
        Ok(Self { on: b.clone(), values })
    }

    pub fn map<Y>(&self, mut f: impl FnMut(usize, &X) -> Y) -> ConditionalValue<Y> {
        ConditionalValue {
            on: self.on.clone(),
            values: self.values.iter().map(|(t, x)| (*t, f(*t, x))).collect(),
        }
    }

    pub fn try_map<Y>(&self, mut f: impl FnMut(usize, &X) -> Result<Y>) -> Result<ConditionalValue<Y>> {
        let mut values = BTreeMap::new();
        for (t, x) in &self.values {
            values.insert(*t, f(*t, x)?);
        }
        Ok(ConditionalValue { on: self.on.clone(), values })
    }

    /// Per-atom combination of two elements on the same condition.
    pub fn zip_with<Y: Clone, Z>(
        &self,
        other: &ConditionalValue<Y>,
        mut f: impl FnMut(usize, &X, &Y) -> Z,
    ) -> Result<ConditionalValue<Z>> {
        self.on.ensure_eq(&other.on)?;
        let values = self
            .values
            .iter()
            .map(|(t, x)| (*t, f(*t, x, &other.values[t])))
            .collect();
        Ok(ConditionalValue { on: self.on.clone(), values })
    }
}

/// `Σ values[i]|blocks[i]`: the unique element on the partition's owner
/// agreeing with `values[i]` on block `i`.
pub fn concatenate<X: Clone>(values: &[ConditionalValue<X>], partition: &Partition) -> Result<ConditionalValue<X>> {
    if values.len() != partition.len() {
        return Err(Error::InvalidAssignment(format!(
            "{} values for {} blocks",
            values.len(),
            partition.len()
        )));
    }
    let mut out = BTreeMap::new();
    for (v, block) in values.iter().zip(partition.blocks()) {
        block.ensure_leq(&v.on)?;
        for t in block.atoms() {
            out.insert(t, v.values[&t].clone());
        }
    }
    Ok(ConditionalValue { on: partition.owner().clone(), values: out })
}

pub fn restrict<X: Clone>(x: &ConditionalValue<X>, b: &Condition) -> Result<ConditionalValue<X>> {
    x.restrict(b)
}

/// `supp(x)`: atoms where `x` differs from `zero`.
pub fn support<X: PartialEq>(x: &ConditionalValue<X>, zero: &X) -> Condition {
    let alg = x.on.algebra();
    alg.condition(x.values.iter().filter(|(_, v)| *v != zero).map(|(t, _)| *t))
        .expect("atoms of a valid value are in range")
}

/// A stable (concatenation-closed) subset on `on`, stored as a nonempty
/// payload set per atom. Per-atom sets hold no duplicates; their order is
/// insertion order and carries no meaning.
#[derive(Debug, Clone)]
pub struct StableSet<X> {
    on: Condition,
    per_atom: BTreeMap<usize, Vec<X>>,
}

fn push_unique<X: PartialEq>(set: &mut Vec<X>, x: X) {
    if !set.contains(&x) {
        set.push(x);
    }
}

fn set_eq<X: PartialEq>(a: &[X], b: &[X]) -> bool {
    a.len() == b.len() && a.iter().all(|x| b.contains(x))
}

impl<X: Clone + PartialEq> StableSet<X> {
    pub fn new(on: Condition, per_atom: BTreeMap<usize, Vec<X>>) -> Result<Self> {
        let ok = per_atom.len() == on.len() && per_atom.keys().all(|t| on.contains(*t));
        if !ok {
            return Err(Error::InvalidAssignment(format!(
                "per-atom sets defined on {:?}, condition is {on}",
                per_atom.keys().collect::<Vec<_>>()
            )));
        }
        let mut clean = BTreeMap::new();
        for (t, set) in per_atom {
            if set.is_empty() {
                return Err(Error::InvalidAssignment(format!("empty payload set on atom {t}")));
            }
            let mut dedup = Vec::with_capacity(set.len());
            for x in set {
                push_unique(&mut dedup, x);
            }
            clean.insert(t, dedup);
        }
        Ok(Self { on, per_atom: clean })
    }

    /// Builds the set on the atoms where `per_atom` yields a nonempty set.
    fn from_partial(algebra: Algebra, per_atom: BTreeMap<usize, Vec<X>>) -> Self {
        let per_atom: BTreeMap<usize, Vec<X>> = per_atom.into_iter().filter(|(_, s)| !s.is_empty()).collect();
        let on = algebra.condition(per_atom.keys().copied()).expect("atoms in range");
        Self { on, per_atom }
    }

    pub fn null(algebra: Algebra) -> Self {
        Self { on: algebra.zero(), per_atom: BTreeMap::new() }
    }

    pub fn on(&self) -> &Condition {
        &self.on
    }

    pub fn algebra(&self) -> Algebra {
        self.on.algebra()
    }

    pub fn per_atom(&self) -> &BTreeMap<usize, Vec<X>> {
        &self.per_atom
    }

    pub fn at(&self, atom: usize) -> &[X] {
        &self.per_atom[&atom]
    }

    /// Number of conditional elements on `on` (the product of per-atom sizes).
    pub fn cardinality(&self) -> usize {
        self.per_atom.values().map(Vec::len).product()
    }

    /// Membership of an element on `b ≤ on`.
    pub fn contains(&self, x: &ConditionalValue<X>) -> bool {
        matches!(x.on.leq(&self.on), Ok(true)) && x.iter().all(|(t, v)| self.per_atom[&t].contains(v))
    }

    /// All elements on `on`, by enumerating the per-atom product.
    pub fn members(&self) -> Vec<ConditionalValue<X>> {
        let atoms: Vec<usize> = self.on.atoms().collect();
        let mut out = vec![BTreeMap::new()];
        for t in &atoms {
            let mut next = Vec::with_capacity(out.len() * self.per_atom[t].len());
            for partial in &out {
                for x in &self.per_atom[t] {
                    let mut m: BTreeMap<usize, X> = partial.clone();
                    m.insert(*t, x.clone());
                    next.push(m);
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|values| ConditionalValue { on: self.on.clone(), values })
            .collect()
    }

    /// `F ⊑ G`: `F` lives below `G` and is contained atom by atom.
    pub fn is_subset(&self, other: &StableSet<X>) -> bool {
        matches!(self.on.leq(&other.on), Ok(true))
            && self
                .per_atom
                .iter()
                .all(|(t, s)| s.iter().all(|x| other.per_atom[t].contains(x)))
    }

    /// `F|b` for `b ≤ on`.
    pub fn restrict(&self, b: &Condition) -> Result<Self> {
        b.ensure_leq(&self.on)?;
        let per_atom = b.atoms().map(|t| (t, self.per_atom[&t].clone())).collect();
        Ok(Self { on: b.clone(), per_atom })
    }

    fn check_algebra(&self, other: &StableSet<X>) -> Result<()> {
        self.on.join(&other.on).map(|_| ())
    }

    /// `F ⊔ G`, living on the join of the two conditions.
    pub fn union(&self, other: &StableSet<X>) -> Result<Self> {
        self.check_algebra(other)?;
        let mut per_atom = self.per_atom.clone();
        for (t, s) in &other.per_atom {
            let entry = per_atom.entry(*t).or_default();
            for x in s {
                push_unique(entry, x.clone());
            }
        }
        Ok(Self::from_partial(self.algebra(), per_atom))
    }

    /// `F ⊓ G`, on the largest condition where the per-atom meet is nonempty.
    pub fn intersection(&self, other: &StableSet<X>) -> Result<Self> {
        self.check_algebra(other)?;
        let per_atom = self
            .per_atom
            .iter()
            .filter_map(|(t, s)| {
                other
                    .per_atom
                    .get(t)
                    .map(|o| (*t, s.iter().filter(|x| o.contains(x)).cloned().collect()))
            })
            .collect();
        Ok(Self::from_partial(self.algebra(), per_atom))
    }

    /// `ᶜF` relative to `universe` (a stable set on 1), on the largest
    /// condition where it is nonempty.
    pub fn complement(&self, universe: Option<&StableSet<X>>) -> Result<Self> {
        let universe = universe.ok_or(Error::MissingUniverse)?;
        if !universe.on.is_one() {
            return Err(Error::MissingUniverse);
        }
        if !self.is_subset(universe) {
            return Err(Error::InvalidValue("set is not contained in the universe".into()));
        }
        let per_atom = universe
            .per_atom
            .iter()
            .map(|(t, u)| {
                let rest = match self.per_atom.get(t) {
                    Some(s) => u.iter().filter(|x| !s.contains(x)).cloned().collect(),
                    None => u.clone(),
                };
                (*t, rest)
            })
            .collect();
        Ok(Self::from_partial(self.algebra(), per_atom))
    }
}

impl<X: PartialEq> PartialEq for StableSet<X> {
    fn eq(&self, other: &Self) -> bool {
        self.on == other.on
            && self
                .per_atom
                .iter()
                .all(|(t, s)| other.per_atom.get(t).is_some_and(|o| set_eq(s, o)))
    }
}

/// Result of [`set_ops`].
#[derive(Debug, Clone, PartialEq)]
pub struct SetOps<X> {
    pub union: StableSet<X>,
    pub intersection: StableSet<X>,
    pub complement_of_f: StableSet<X>,
}

pub fn set_ops<X: Clone + PartialEq>(
    f: &StableSet<X>,
    g: &StableSet<X>,
    universe: Option<&StableSet<X>>,
) -> Result<SetOps<X>> {
    Ok(SetOps {
        union: f.union(g)?,
        intersection: f.intersection(g)?,
        complement_of_f: f.complement(universe)?,
    })
}

/// Smallest stable set containing `generators`.
pub fn stable_hull<X: Clone + PartialEq>(generators: &[ConditionalValue<X>]) -> Result<StableSet<X>> {
    let first = generators.first().ok_or(Error::EmptyFamily)?;
    let on = first.on.clone();
    let mut per_atom: BTreeMap<usize, Vec<X>> = on.atoms().map(|t| (t, Vec::new())).collect();
    for g in generators {
        on.ensure_eq(&g.on)?;
        for (t, x) in g.iter() {
            push_unique(per_atom.get_mut(&t).expect("same condition"), x.clone());
        }
    }
    Ok(StableSet { on, per_atom })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(m: usize) -> Algebra {
        Algebra::new(m).unwrap()
    }

    fn val(a: Algebra, xs: &[i64]) -> ConditionalValue<i64> {
        ConditionalValue::from_fn(&a.one(), |t| xs[t])
    }

    fn set(a: Algebra, sets: &[&[i64]]) -> StableSet<i64> {
        let on = a.condition((0..sets.len()).filter(|t| !sets[*t].is_empty())).unwrap();
        let per_atom = on.atoms().map(|t| (t, sets[t].to_vec())).collect();
        StableSet::new(on, per_atom).unwrap()
    }

    #[test]
    fn concatenate_along_atoms() {
        let a = alg(2);
        let x1 = ConditionalValue::constant(&a.one(), 5);
        let x2 = ConditionalValue::constant(&a.one(), 7);
        let p = Partition::atomic(&a.one());
        assert_eq!(concatenate(&[x1.clone(), x2.clone()], &p).unwrap(), val(a, &[5, 7]));

        let trivial = Partition::new(a.one(), vec![a.one(), a.zero()]).unwrap();
        assert_eq!(concatenate(&[x1.clone(), x2], &trivial).unwrap(), x1);
        assert_eq!(concatenate(&[x1.clone(), x1.clone()], &p).unwrap(), x1);
        assert!(matches!(concatenate(&[x1], &p), Err(Error::InvalidAssignment(_))));
    }

    #[test]
    fn restrict_examples() {
        let a = alg(2);
        let x = val(a, &[5, 7]);
        let r = x.restrict(&a.atom(0).unwrap()).unwrap();
        assert_eq!(r.on(), &a.atom(0).unwrap());
        assert_eq!(r.get(0), Some(&5));
        assert_eq!(x.restrict(&a.one()).unwrap(), x);
        assert!(x.restrict(&a.zero()).unwrap().is_null());
        let y = r.clone();
        assert!(matches!(y.restrict(&a.atom(1).unwrap()), Err(Error::ConditionNotBelow { .. })));
    }

    #[test]
    fn value_must_cover_condition() {
        let a = alg(2);
        assert!(ConditionalValue::new(a.one(), BTreeMap::from([(0, 1)])).is_err());
        assert!(ConditionalValue::new(a.atom(1).unwrap(), BTreeMap::from([(1, 1)])).is_ok());
    }

    #[test]
    fn hull_of_two_generators() {
        let a = alg(2);
        let h = stable_hull(&[val(a, &[1, 5]), val(a, &[3, 2])]).unwrap();
        assert_eq!(h, set(a, &[&[1, 3], &[5, 2]]));
        assert_eq!(h.cardinality(), 4);
        for xs in [[1, 5], [1, 2], [3, 5], [3, 2]] {
            assert!(h.contains(&val(a, &xs)));
        }
        let single = stable_hull(&[val(a, &[4, 4])]).unwrap();
        assert_eq!(single.members(), vec![val(a, &[4, 4])]);
    }

    #[test]
    fn hull_errors() {
        let a = alg(2);
        assert_eq!(stable_hull::<i64>(&[]), Err(Error::EmptyFamily));
        let g = ConditionalValue::constant(&a.atom(0).unwrap(), 1);
        assert!(matches!(stable_hull(&[val(a, &[1, 1]), g]), Err(Error::ConditionMismatch { .. })));
    }

    #[test]
    fn set_ops_single_atom() {
        let a = alg(1);
        let universe = set(a, &[&[1, 2, 3]]);
        let f = set(a, &[&[1]]);
        let g = set(a, &[&[2]]);
        let ops = set_ops(&f, &g, Some(&universe)).unwrap();
        assert!(ops.intersection.on().is_zero());
        assert_eq!(ops.union, set(a, &[&[1, 2]]));
        assert_eq!(ops.complement_of_f, set(a, &[&[2, 3]]));
        assert!(universe.complement(Some(&universe)).unwrap().on().is_zero());
        assert_eq!(f.complement(None), Err(Error::MissingUniverse));
    }

    #[test]
    fn intersection_on_largest_condition() {
        let a = alg(2);
        let f = set(a, &[&[1], &[1, 2]]);
        let g = set(a, &[&[2], &[2]]);
        let i = f.intersection(&g).unwrap();
        assert_eq!(i.on(), &a.atom(1).unwrap());
        assert_eq!(i.at(1), &[2]);
    }

    #[test]
    fn inclusion_order_extremes() {
        let a = alg(2);
        let universe = set(a, &[&[1, 2], &[3]]);
        let f = set(a, &[&[1], &[3]]);
        let null = StableSet::null(a);
        assert!(f.is_subset(&universe));
        assert!(null.is_subset(&f));
        assert!(!universe.is_subset(&f));
    }

    #[test]
    fn support_examples() {
        let a = alg(2);
        assert_eq!(support(&val(a, &[2, 0]), &0), a.atom(0).unwrap());
        assert!(support(&val(a, &[0, 0]), &0).is_zero());
        assert!(support(&val(a, &[1, -1]), &0).is_one());
    }
}
