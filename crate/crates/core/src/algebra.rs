//! Finite atomic Boolean algebras.
//!
//! The algebra on `m` atoms is the powerset of `{0, …, m-1}`. A [`Condition`]
//! is an element of that powerset stored as a bitset, and a [`Partition`] of a
//! condition `a` is a list of pairwise disjoint conditions whose join is `a`.
//! Empty blocks are allowed.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default upper bound on the number of atoms.
pub const DEFAULT_MAX_ATOMS: usize = 64;

const WORD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Algebra {
    atoms: usize,
}

impl Algebra {
    pub fn new(atoms: usize) -> Result<Self> {
        Self::with_cap(atoms, DEFAULT_MAX_ATOMS)
    }

    pub fn with_cap(atoms: usize, cap: usize) -> Result<Self> {
        if atoms == 0 || atoms > cap {
            return Err(Error::InvalidAlgebra { got: atoms, cap });
        }
        Ok(Self { atoms })
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn zero(&self) -> Condition {
        Condition::empty(self.atoms)
    }

    pub fn one(&self) -> Condition {
        let mut c = Condition::empty(self.atoms);
        for t in 0..self.atoms {
            c.insert(t);
        }
        c
    }

    pub fn atom(&self, t: usize) -> Result<Condition> {
        self.condition([t])
    }

    pub fn condition<I: IntoIterator<Item = usize>>(&self, atoms: I) -> Result<Condition> {
        let mut c = Condition::empty(self.atoms);
        for t in atoms {
            if t >= self.atoms {
                return Err(Error::AtomOutOfRange { atom: t, atoms: self.atoms });
            }
            c.insert(t);
        }
        Ok(c)
    }

    /// All `2^m` conditions, in bitmask order. Only sensible for small `m`.
    pub fn all_conditions(&self) -> Vec<Condition> {
        assert!(self.atoms < 24, "enumeration of 2^{} conditions", self.atoms);
        (0u64..(1u64 << self.atoms))
            .map(|mask| Condition::from_mask(self.atoms, mask))
            .collect()
    }
}

/// An element of the algebra: a set of atom indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    atoms: usize,
    bits: Vec<u64>,
}

impl Condition {
    fn empty(atoms: usize) -> Self {
        Self { atoms, bits: vec![0; atoms.div_ceil(WORD)] }
    }

    fn from_mask(atoms: usize, mask: u64) -> Self {
        let mut c = Self::empty(atoms);
        if !c.bits.is_empty() {
            c.bits[0] = mask;
        }
        c
    }

    fn insert(&mut self, t: usize) {
        self.bits[t / WORD] |= 1 << (t % WORD);
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn algebra(&self) -> Algebra {
        Algebra { atoms: self.atoms }
    }

    pub fn contains(&self, t: usize) -> bool {
        t < self.atoms && self.bits[t / WORD] & (1 << (t % WORD)) != 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.len() == self.atoms
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Atoms of the condition in increasing order.
    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.atoms).filter(move |t| self.contains(*t))
    }

    pub fn smallest_atom(&self) -> Option<usize> {
        self.atoms().next()
    }

    fn check(&self, other: &Condition) -> Result<()> {
        if self.atoms != other.atoms {
            return Err(Error::AlgebraMismatch { left: self.atoms, right: other.atoms });
        }
        Ok(())
    }

    fn zip(&self, other: &Condition, f: impl Fn(u64, u64) -> u64) -> Result<Condition> {
        self.check(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| f(*a, *b)).collect();
        Ok(Condition { atoms: self.atoms, bits })
    }

    pub fn meet(&self, other: &Condition) -> Result<Condition> {
        self.zip(other, |a, b| a & b)
    }

    pub fn join(&self, other: &Condition) -> Result<Condition> {
        self.zip(other, |a, b| a | b)
    }

    pub fn complement(&self) -> Condition {
        let mut out = self.clone();
        for (i, w) in out.bits.iter_mut().enumerate() {
            let width = (self.atoms - i * WORD).min(WORD);
            let mask = if width == WORD { u64::MAX } else { (1u64 << width) - 1 };
            *w = !*w & mask;
        }
        out
    }

    /// `self ≤ other` in the algebra order.
    pub fn leq(&self, other: &Condition) -> Result<bool> {
        self.check(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0))
    }

    pub fn ensure_leq(&self, sup: &Condition) -> Result<()> {
        if self.leq(sup)? {
            Ok(())
        } else {
            Err(Error::ConditionNotBelow { sub: self.clone(), sup: sup.clone() })
        }
    }

    pub fn ensure_eq(&self, other: &Condition) -> Result<()> {
        self.check(other)?;
        if self == other {
            Ok(())
        } else {
            Err(Error::ConditionMismatch { left: self.clone(), right: other.clone() })
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.atoms().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Condition({self}/{})", self.atoms)
    }
}

/// Result of [`condition_ops`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionOps {
    pub meet: Condition,
    pub join: Condition,
    pub complement_of_x: Condition,
    pub leq: bool,
}

pub fn condition_ops(x: &Condition, y: &Condition) -> Result<ConditionOps> {
    Ok(ConditionOps {
        meet: x.meet(y)?,
        join: x.join(y)?,
        complement_of_x: x.complement(),
        leq: x.leq(y)?,
    })
}

/// Disjoint decomposition of `owner`. Block order is kept as given so that
/// value lists can be aligned with it; equality compares canonical forms.
#[derive(Clone, Debug)]
pub struct Partition {
    owner: Condition,
    blocks: Vec<Condition>,
}

impl Partition {
    pub fn new(owner: Condition, blocks: Vec<Condition>) -> Result<Self> {
        let mut seen = owner.algebra().zero();
        for b in &blocks {
            if !b.meet(&seen)?.is_zero() {
                return Err(Error::InvalidAssignment(format!("block {b} overlaps an earlier block")));
            }
            seen = seen.join(b)?;
        }
        if seen != owner {
            return Err(Error::InvalidAssignment(format!(
                "blocks join to {seen}, owner is {owner}"
            )));
        }
        Ok(Self { owner, blocks })
    }

    /// The partition of `owner` into its atoms.
    pub fn atomic(owner: &Condition) -> Self {
        let alg = owner.algebra();
        let blocks = owner.atoms().map(|t| alg.atom(t).expect("atom in range")).collect();
        Self { owner: owner.clone(), blocks }
    }

    pub fn owner(&self) -> &Condition {
        &self.owner
    }

    pub fn blocks(&self) -> &[Condition] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Nonzero blocks ordered by their smallest atom.
    pub fn canonical(&self) -> Partition {
        let mut blocks: Vec<Condition> = self.blocks.iter().filter(|b| !b.is_zero()).cloned().collect();
        blocks.sort_by_key(|b| b.smallest_atom());
        Partition { owner: self.owner.clone(), blocks }
    }

    /// Index of the block containing atom `t`.
    pub fn block_of(&self, t: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(t))
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.owner == b.owner && a.blocks == b.blocks
    }
}

impl Eq for Partition {}

/// Blocks are the preimages of the labels, ordered by smallest atom.
pub fn make_partition<L: Ord + Clone>(owner: &Condition, assignment: &BTreeMap<usize, L>) -> Result<Partition> {
    let domain_ok = assignment.len() == owner.len() && assignment.keys().all(|t| owner.contains(*t));
    if !domain_ok {
        return Err(Error::InvalidAssignment(format!(
            "assignment domain {:?} differs from owner {owner}",
            assignment.keys().collect::<Vec<_>>()
        )));
    }
    let alg = owner.algebra();
    let mut order: Vec<L> = Vec::new();
    let mut groups: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (t, label) in assignment {
        if !groups.contains_key(label) {
            order.push(label.clone());
        }
        groups.entry(label.clone()).or_default().push(*t);
    }
    let blocks = order
        .iter()
        .map(|l| alg.condition(groups[l].iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition { owner: owner.clone(), blocks })
}

/// Common refinement: all nonzero pairwise meets, canonically ordered.
pub fn refine_partitions(p: &Partition, q: &Partition) -> Result<Partition> {
    if p.owner != q.owner {
        return Err(Error::InvalidAssignment(format!(
            "partition owners differ: {} vs {}",
            p.owner, q.owner
        )));
    }
    let mut blocks = Vec::new();
    for a in &p.blocks {
        for b in &q.blocks {
            let m = a.meet(b)?;
            if !m.is_zero() {
                blocks.push(m);
            }
        }
    }
    Ok(Partition { owner: p.owner.clone(), blocks }.canonical())
}
