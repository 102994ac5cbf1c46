//! Conditional naturals and reals.
//!
//! Arithmetic and order are per atom. Series are truncated at a caller-chosen
//! index and are only summed when the caller certifies the tail.

use std::collections::BTreeMap;

use crate::algebra::Condition;
use crate::conditional::{support, ConditionalValue, StableSet};
use crate::error::{Error, Result};

/// Default relative tolerance for analytic comparisons.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Default series truncation index.
pub const DEFAULT_TRUNCATION: usize = 40;

pub type CondReal = ConditionalValue<f64>;

/// Conditional natural number; every per-atom value is at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CondNat(ConditionalValue<u64>);

impl CondNat {
    pub fn new(value: ConditionalValue<u64>) -> Result<Self> {
        if let Some((t, _)) = value.iter().find(|(_, n)| **n == 0) {
            return Err(Error::InvalidValue(format!("conditional natural is 0 on atom {t}")));
        }
        Ok(Self(value))
    }

    pub fn constant(on: &Condition, n: u64) -> Result<Self> {
        Self::new(ConditionalValue::constant(on, n))
    }

    pub fn from_fn(on: &Condition, f: impl FnMut(usize) -> u64) -> Result<Self> {
        Self::new(ConditionalValue::from_fn(on, f))
    }

    pub fn on(&self) -> &Condition {
        self.0.on()
    }

    pub fn at(&self, atom: usize) -> u64 {
        *self.0.at(atom)
    }

    pub fn value(&self) -> &ConditionalValue<u64> {
        &self.0
    }

    pub fn max_value(&self) -> u64 {
        self.0.iter().map(|(_, n)| *n).max().unwrap_or(0)
    }

    /// `n < n'` on every atom.
    pub fn lt(&self, other: &CondNat) -> Result<bool> {
        Ok(self.0.zip_with(&other.0, |_, a, b| a < b)?.iter().all(|(_, b)| *b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Abs,
    Min,
    Max,
}

impl CondReal {
    pub fn add(&self, other: &CondReal) -> Result<CondReal> {
        self.zip_with(other, |_, a, b| a + b)
    }

    pub fn sub(&self, other: &CondReal) -> Result<CondReal> {
        self.zip_with(other, |_, a, b| a - b)
    }

    pub fn mul(&self, other: &CondReal) -> Result<CondReal> {
        self.zip_with(other, |_, a, b| a * b)
    }

    pub fn min(&self, other: &CondReal) -> Result<CondReal> {
        self.zip_with(other, |_, a, b| a.min(*b))
    }

    pub fn max(&self, other: &CondReal) -> Result<CondReal> {
        self.zip_with(other, |_, a, b| a.max(*b))
    }

    pub fn abs(&self) -> CondReal {
        self.map(|_, a| a.abs())
    }

    pub fn scale(&self, s: f64) -> CondReal {
        self.map(|_, a| a * s)
    }

    pub fn sqrt(&self) -> CondReal {
        self.map(|_, a| a.sqrt())
    }

    /// `r ≥ 0` on every atom.
    pub fn is_nonnegative(&self) -> bool {
        self.iter().all(|(_, a)| *a >= 0.0)
    }

    /// `r > 0` on every atom.
    pub fn is_positive(&self) -> bool {
        self.iter().all(|(_, a)| *a > 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.iter().map(|(_, a)| *a).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-atom `x op y`; `Abs` ignores `y` beyond the condition check.
pub fn arith(x: &CondReal, y: &CondReal, op: ArithOp) -> Result<CondReal> {
    match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Min => x.min(y),
        ArithOp::Max => x.max(y),
        ArithOp::Abs => {
            x.on().ensure_eq(y.on())?;
            Ok(x.abs())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub leq_condition: Condition,
    pub lt_condition: Condition,
    pub leq: bool,
    pub lt: bool,
}

pub fn compare(x: &CondReal, y: &CondReal) -> Result<Comparison> {
    x.on().ensure_eq(y.on())?;
    let alg = x.algebra();
    let leq_condition = alg.condition(x.iter().filter(|(t, a)| **a <= *y.at(*t)).map(|(t, _)| t))?;
    let lt_condition = alg.condition(x.iter().filter(|(t, a)| **a < *y.at(*t)).map(|(t, _)| t))?;
    Ok(Comparison {
        leq: &leq_condition == x.on(),
        lt: &lt_condition == x.on(),
        leq_condition,
        lt_condition,
    })
}

/// `r⁻¹`: reciprocal on `supp(r)`, zero elsewhere.
pub fn cond_inverse(r: &CondReal) -> CondReal {
    r.map(|_, a| if *a != 0.0 { 1.0 / a } else { 0.0 })
}

/// Indicator of `supp(r)` as a conditional real.
pub fn support_indicator(r: &CondReal) -> CondReal {
    let s = support(r, &0.0);
    r.map(|t, _| if s.contains(t) { 1.0 } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupInf {
    pub sup: CondReal,
    pub inf: CondReal,
}

pub fn sup_inf(f: &StableSet<f64>) -> SupInf {
    let on = f.on();
    SupInf {
        sup: CondReal::from_fn(on, |t| f.at(t).iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        inf: CondReal::from_fn(on, |t| f.at(t).iter().copied().fold(f64::INFINITY, f64::min)),
    }
}

/// `Σ_{k=1}^{n} seq[k]` per atom; `seq[0]` is the term with index 1.
pub fn partial_sum(seq: &[CondReal], n: &CondNat) -> Result<CondReal> {
    let needed = n.max_value() as usize;
    if seq.len() < needed {
        return Err(Error::InsufficientSequence { needed, available: seq.len() });
    }
    for term in &seq[..needed] {
        n.on().ensure_leq(term.on())?;
    }
    Ok(CondReal::from_fn(n.on(), |t| {
        seq[..n.at(t) as usize].iter().map(|x| *x.at(t)).sum()
    }))
}

/// A truncated series with a per-atom absolute error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSum {
    pub value: CondReal,
    pub error_bound: CondReal,
}

/// `Σ_{k≥1} seq[k]` truncated at `truncation`, trusting `tail_bound` for
/// the remainder.
pub fn series_limit(seq: &[CondReal], truncation: usize, tail_bound: Option<&CondReal>) -> Result<SeriesSum> {
    let tail = tail_bound.ok_or(Error::UncertifiedTail)?;
    if !tail.is_nonnegative() {
        return Err(Error::InvalidValue("tail bound must be nonnegative".into()));
    }
    let n = CondNat::constant(tail.on(), truncation.max(1) as u64)?;
    let value = if truncation == 0 {
        tail.map(|_, _| 0.0)
    } else {
        partial_sum(seq, &n)?
    };
    Ok(SeriesSum { value, error_bound: tail.clone() })
}

/// Certified bounds on `Σ_{k>K} a_k²` and `Σ_{k>K} b_k²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareTails {
    pub a: CondReal,
    pub b: CondReal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchySchwarz {
    pub lhs: CondReal,
    pub rhs: CondReal,
    /// Per-atom `lhs - rhs` scaled by `max(rhs, tiny)`; nonpositive where it holds strictly.
    pub relative_excess: CondReal,
    pub holds_condition: Condition,
    pub holds: bool,
}

/// `(Σ a_k b_k)²` against `(Σ a_k²)(Σ b_k²)` on truncated series.
pub fn cauchy_schwarz_eval(
    a: &[CondReal],
    b: &[CondReal],
    truncation: usize,
    tails: Option<&SquareTails>,
    rel_tol: f64,
) -> Result<CauchySchwarz> {
    let tails = tails.ok_or(Error::UncertifiedTail)?;
    let dot: Vec<CondReal> = a.iter().zip(b).map(|(x, y)| x.mul(y)).collect::<Result<_>>()?;
    let aa: Vec<CondReal> = a.iter().map(|x| x.mul(x)).collect::<Result<_>>()?;
    let bb: Vec<CondReal> = b.iter().map(|x| x.mul(x)).collect::<Result<_>>()?;
    // |Σ_{k>K} a_k b_k| ≤ sqrt(tail_a · tail_b)
    let dot_tail = tails.a.mul(&tails.b)?.sqrt();
    let s_ab = series_limit(&dot, truncation, Some(&dot_tail))?.value;
    let s_aa = series_limit(&aa, truncation, Some(&tails.a))?.value;
    let s_bb = series_limit(&bb, truncation, Some(&tails.b))?.value;
    let lhs = s_ab.mul(&s_ab)?;
    let rhs = s_aa.mul(&s_bb)?;
    let relative_excess = lhs.zip_with(&rhs, |_, l, r| (l - r) / r.max(f64::MIN_POSITIVE))?;
    let alg = lhs.algebra();
    let holds_condition = alg.condition(
        lhs.iter()
            .filter(|(t, l)| **l <= *rhs.at(*t) + rel_tol * rhs.at(*t).abs())
            .map(|(t, _)| t),
    )?;
    Ok(CauchySchwarz {
        holds: holds_condition.is_one(),
        lhs,
        rhs,
        relative_excess,
        holds_condition,
    })
}

/// Per-atom sums of a finitely supported sequence, used when no truncation is involved.
pub fn finite_sum(seq: &[CondReal], on: &Condition) -> CondReal {
    let mut acc: BTreeMap<usize, f64> = on.atoms().map(|t| (t, 0.0)).collect();
    for x in seq {
        for (t, v) in acc.iter_mut() {
            *v += x.at(*t);
        }
    }
    CondReal::new(on.clone(), acc).expect("same condition")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::conditional::stable_hull;

    fn alg(m: usize) -> Algebra {
        Algebra::new(m).unwrap()
    }

    fn r(a: Algebra, xs: &[f64]) -> CondReal {
        CondReal::from_fn(&a.one(), |t| xs[t])
    }

    #[test]
    fn arith_examples() {
        let a = alg(2);
        assert_eq!(arith(&r(a, &[1., 2.]), &r(a, &[3., 4.]), ArithOp::Add).unwrap(), r(a, &[4., 6.]));
        assert_eq!(r(a, &[-3., 5.]).abs(), r(a, &[3., 5.]));
        assert_eq!(arith(&r(a, &[1., 5.]), &r(a, &[3., 2.]), ArithOp::Max).unwrap(), r(a, &[3., 5.]));
        let other = CondReal::constant(&a.atom(0).unwrap(), 1.0);
        assert!(matches!(r(a, &[1., 1.]).add(&other), Err(Error::ConditionMismatch { .. })));
    }

    #[test]
    fn compare_examples() {
        let a = alg(2);
        let c = compare(&r(a, &[1., 5.]), &r(a, &[2., 3.])).unwrap();
        assert_eq!(c.leq_condition, a.atom(0).unwrap());
        assert!(!c.leq);
        let x = r(a, &[1., 5.]);
        let c = compare(&x, &x).unwrap();
        assert!(c.leq);
        assert!(c.lt_condition.is_zero());
        assert!(compare(&r(a, &[0., 0.]), &r(a, &[1., 1.])).unwrap().lt);
    }

    #[test]
    fn inverse_examples() {
        let a = alg(2);
        assert_eq!(cond_inverse(&r(a, &[2., 0.])), r(a, &[0.5, 0.]));
        assert_eq!(cond_inverse(&r(a, &[1., 1.])), r(a, &[1., 1.]));
        assert_eq!(cond_inverse(&r(a, &[-4., 0.5])), r(a, &[-0.25, 2.]));
    }

    #[test]
    fn sup_inf_examples() {
        let a = alg(2);
        let h = stable_hull(&[r(a, &[1., 5.]), r(a, &[3., 2.])]).unwrap();
        let s = sup_inf(&h);
        assert_eq!(s.sup, r(a, &[3., 5.]));
        assert_eq!(s.inf, r(a, &[1., 2.]));
        // sup is an upper bound of every concatenation and attained by one
        for m in h.members() {
            assert!(compare(&m, &s.sup).unwrap().leq);
        }
        assert!(h.contains(&s.sup));
        let per = StableSet::new(a.one(), BTreeMap::from([(0, vec![0., 1.]), (1, vec![-1., 0.])])).unwrap();
        assert_eq!(sup_inf(&per).sup, r(a, &[1., 0.]));
    }

    #[test]
    fn partial_sum_examples() {
        let a = alg(2);
        let seq: Vec<CondReal> = (1..=10).map(|k| CondReal::constant(&a.one(), k as f64)).collect();
        let n = CondNat::from_fn(&a.one(), |t| [2, 3][t]).unwrap();
        assert_eq!(partial_sum(&seq, &n).unwrap(), r(a, &[3., 6.]));
        let one = CondNat::constant(&a.one(), 1).unwrap();
        assert_eq!(partial_sum(&seq, &one).unwrap(), seq[0]);
        let geo: Vec<CondReal> = (1..=10).map(|k| CondReal::constant(&a.one(), 0.5f64.powi(k))).collect();
        let ten = CondNat::constant(&a.one(), 10).unwrap();
        let expected = 1.0 - 0.5f64.powi(10);
        assert_eq!(partial_sum(&geo, &ten).unwrap(), r(a, &[expected, expected]));
        let long = CondNat::constant(&a.one(), 11).unwrap();
        assert_eq!(
            partial_sum(&geo, &long),
            Err(Error::InsufficientSequence { needed: 11, available: 10 })
        );
    }

    #[test]
    fn cond_nat_rejects_zero() {
        let a = alg(2);
        assert!(CondNat::from_fn(&a.one(), |t| t as u64).is_err());
    }

    #[test]
    fn series_examples() {
        let a = alg(2);
        let quarter: Vec<CondReal> = (1..=40).map(|k| CondReal::constant(&a.one(), 0.25f64.powi(k))).collect();
        let tail = CondReal::constant(&a.one(), 0.25f64.powi(40) / 3.0);
        let s = series_limit(&quarter, 40, Some(&tail)).unwrap();
        for (_, v) in s.value.iter() {
            assert!((v - 1.0 / 3.0).abs() <= 0.25f64.powi(40) + 1e-16);
        }
        let zeros = vec![CondReal::constant(&a.one(), 0.0); 40];
        let zero_tail = CondReal::constant(&a.one(), 0.0);
        assert_eq!(series_limit(&zeros, 40, Some(&zero_tail)).unwrap().value, r(a, &[0., 0.]));
        let half: Vec<CondReal> = (1..=40).map(|k| CondReal::constant(&a.one(), 0.5f64.powi(k))).collect();
        let s = series_limit(&half, 40, Some(&CondReal::constant(&a.one(), 0.5f64.powi(40)))).unwrap();
        for (_, v) in s.value.iter() {
            assert!((v - 1.0).abs() <= 0.5f64.powi(40) + 1e-15);
        }
        assert_eq!(series_limit(&half, 40, None), Err(Error::UncertifiedTail));
    }

    #[test]
    fn cauchy_schwarz_proportional_and_orthogonal() {
        let a = alg(2);
        let geo: Vec<CondReal> = (1..=40).map(|k| CondReal::constant(&a.one(), 0.5f64.powi(k))).collect();
        let t = CondReal::constant(&a.one(), 0.25f64.powi(40) / 3.0);
        let tails = SquareTails { a: t.clone(), b: t };
        let cs = cauchy_schwarz_eval(&geo, &geo, 40, Some(&tails), 1e-12).unwrap();
        assert!(cs.holds);
        for (tt, l) in cs.lhs.iter() {
            assert!((l - 1.0 / 9.0).abs() < 1e-15);
            assert!((cs.rhs.at(tt) - 1.0 / 9.0).abs() < 1e-15);
        }

        let e1: Vec<CondReal> = (0..3).map(|k| CondReal::constant(&a.one(), (k == 0) as u8 as f64)).collect();
        let e2: Vec<CondReal> = (0..3).map(|k| CondReal::constant(&a.one(), (k == 1) as u8 as f64)).collect();
        let zero = CondReal::constant(&a.one(), 0.0);
        let tails = SquareTails { a: zero.clone(), b: zero };
        let cs = cauchy_schwarz_eval(&e1, &e2, 3, Some(&tails), 1e-12).unwrap();
        assert_eq!(cs.lhs, r(a, &[0., 0.]));
        assert_eq!(cs.rhs, r(a, &[1., 1.]));
        assert!(cs.holds);
        assert_eq!(cauchy_schwarz_eval(&e1, &e2, 3, None, 1e-12).unwrap_err(), Error::UncertifiedTail);
    }
}
