use serde::{Deserialize, Serialize};

use super::metric::CondMetric;
use crate::algebra::Condition;
use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::linear::{CondVector, SymmetricBody};
use crate::numbers::{CondNat, CondReal};

/// One coordinate of a formula term:
/// `offset + scale · (−1)^k [if alternating] · k^power · ratio^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFormula {
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub alternating: bool,
    #[serde(default)]
    pub power: f64,
    #[serde(default = "one")]
    pub ratio: f64,
}

fn one() -> f64 {
    1.0
}

impl TermFormula {
    pub fn constant(c: f64) -> Self {
        Self { offset: c, scale: 0.0, alternating: false, power: 0.0, ratio: 1.0 }
    }

    pub fn eval(&self, k: usize) -> f64 {
        let kf = k as f64;
        let sign = if self.alternating && k % 2 == 1 { -1.0 } else { 1.0 };
        let mut v = self.scale * sign;
        if self.power != 0.0 {
            v *= kf.powf(self.power);
        }
        if self.ratio != 1.0 {
            v *= self.ratio.powf(kf);
        }
        self.offset + v
    }
}

/// A stream `k ↦ x_k` (k = 1, 2, …) of vectors on a fixed condition.
#[derive(Debug, Clone, PartialEq)]
pub enum CondSequence {
    /// Explicit terms; `terms[0]` is `x_1`.
    Table(Vec<CondVector>),
    /// Per atom, one formula per coordinate.
    Formula(ConditionalValue<Vec<TermFormula>>),
}

impl CondSequence {
    pub fn on(&self) -> Result<Condition> {
        match self {
            CondSequence::Table(terms) => terms.first().map(|x| x.on().clone()).ok_or(Error::EmptyFamily),
            CondSequence::Formula(f) => Ok(f.on().clone()),
        }
    }

    /// Number of available terms; `None` for unbounded streams.
    pub fn available(&self) -> Option<usize> {
        match self {
            CondSequence::Table(terms) => Some(terms.len()),
            CondSequence::Formula(_) => None,
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        match self.available() {
            _ if k == 0 => Err(Error::InvalidValue("sequence indices start at 1".into())),
            Some(n) if k > n => Err(Error::InsufficientSequence { needed: k, available: n }),
            _ => Ok(()),
        }
    }

    /// `x_k`.
    pub fn term(&self, k: usize) -> Result<CondVector> {
        self.check_index(k)?;
        Ok(match self {
            CondSequence::Table(terms) => terms[k - 1].clone(),
            CondSequence::Formula(f) => f.map(|_, coords| coords.iter().map(|c| c.eval(k)).collect()),
        })
    }

    /// `x_k` on a single atom.
    pub fn term_at(&self, k: usize, t: usize) -> Result<Vec<f64>> {
        self.check_index(k)?;
        Ok(match self {
            CondSequence::Table(terms) => terms[k - 1].at(t).clone(),
            CondSequence::Formula(f) => f.at(t).iter().map(|c| c.eval(k)).collect(),
        })
    }

    /// `x_n` for a conditional index: `x_n(t) = x_{n(t)}(t)`.
    pub fn at(&self, n: &CondNat) -> Result<CondVector> {
        self.on()?.ensure_eq(n.on())?;
        CondVector::try_from_fn(n.on(), |t| self.term_at(n.at(t) as usize, t))
    }

    /// Checks that every table term lives on the same condition.
    pub fn validate(&self) -> Result<()> {
        if let CondSequence::Table(terms) = self {
            let on = self.on()?;
            for x in terms {
                on.ensure_eq(x.on())?;
            }
        }
        Ok(())
    }
}

/// Per-atom outcome of the Cauchy test.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyStatus {
    pub cauchy: Condition,
    pub not_cauchy: Condition,
    pub undecided: Condition,
}

/// `R(n) = max_{n < p ≤ budget} d(x_p, x_budget)` for each `n` in `cuts`, on atom `t`.
fn tail_radii(seq: &CondSequence, metric: &CondMetric, t: usize, budget: usize, cuts: &[usize]) -> Result<Vec<f64>> {
    let last = seq.term_at(budget, t)?;
    let mut out = vec![0.0; cuts.len()];
    let start = cuts.iter().copied().min().unwrap_or(budget);
    for p in (start + 1)..=budget {
        let d = metric.atom_distance(t, &seq.term_at(p, t)?, &last)?;
        for (o, c) in out.iter_mut().zip(cuts) {
            if p > *c {
                *o = f64::max(*o, d);
            }
        }
    }
    Ok(out)
}

/// Classifies every atom using terms up to `budget`.
///
/// With `R(n)` the largest distance from a term after `n` to the last
/// term, the tail after `n` has diameter in `[R(n), 2R(n)]`. An atom is
/// Cauchy when `2R(budget/2) ≤ tol`, and witnessed non-Cauchy when
/// `R(3·budget/4) > tol` without having shrunk since `budget/2`.
pub fn cauchy_status(seq: &CondSequence, metric: &CondMetric, tol: f64, budget: usize) -> Result<CauchyStatus> {
    if budget < 4 {
        return Err(Error::InvalidValue(format!("budget {budget} is below the minimum of 4")));
    }
    seq.validate()?;
    let on = seq.on()?;
    let (mut yes, mut no, mut undecided) = (Vec::new(), Vec::new(), Vec::new());
    for t in on.atoms() {
        let r = tail_radii(seq, metric, t, budget, &[budget / 2, 3 * budget / 4])?;
        if 2.0 * r[0] <= tol {
            yes.push(t);
        } else if r[1] > tol && r[1] >= r[0] {
            no.push(t);
        } else {
            undecided.push(t);
        }
    }
    let a = on.algebra();
    Ok(CauchyStatus { cauchy: a.condition(yes)?, not_cauchy: a.condition(no)?, undecided: a.condition(undecided)? })
}

/// Atoms on which the sequence is Cauchy at `tol`; `Undecided` if some
/// atom cannot be classified within the budget.
pub fn is_cauchy(seq: &CondSequence, metric: &CondMetric, tol: f64, budget: usize) -> Result<Condition> {
    let s = cauchy_status(seq, metric, tol, budget)?;
    if !s.undecided.is_zero() {
        return Err(Error::Undecided(s.undecided));
    }
    Ok(s.cauchy)
}

/// The limit estimate `x_budget`, returned only when every atom is Cauchy.
pub fn limit(seq: &CondSequence, metric: &CondMetric, tol: f64, budget: usize) -> Result<Option<CondVector>> {
    let s = cauchy_status(seq, metric, tol, budget)?;
    if !s.undecided.is_zero() {
        return Err(Error::Undecided(s.undecided));
    }
    if !s.not_cauchy.is_zero() {
        return Ok(None);
    }
    seq.term(budget).map(Some)
}

/// A convergent subsequence `x_{n_k}` with certified distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Subsequence {
    /// `n_1 < n_2 < …` on every atom.
    pub indices: Vec<CondNat>,
    pub limit: CondVector,
    /// `d₂(x_{n_k}, limit) ≤ error_bounds[k]`.
    pub error_bounds: Vec<CondReal>,
}

/// Maximum bisection depth; boxes are below f64 resolution well before this.
pub const MAX_BISECTION_DEPTH: usize = 64;

struct AtomExtraction {
    indices: Vec<usize>,
    bounds: Vec<f64>,
    limit: Vec<f64>,
}

fn child_of(x: &[f64], lo: &[f64], hi: &[f64]) -> usize {
    let mut c = 0;
    for i in 0..x.len() {
        let mid = 0.5 * (lo[i] + hi[i]);
        if x[i] >= mid && mid < hi[i] {
            c |= 1 << i;
        }
    }
    c
}

fn extract_atom(terms: &[Vec<f64>], half: &[f64]) -> AtomExtraction {
    let d = half.len();
    let mut lo: Vec<f64> = half.iter().map(|h| -h).collect();
    let mut hi: Vec<f64> = half.to_vec();
    let diam0 = 2.0 * half.iter().map(|h| h * h).sum::<f64>().sqrt();
    let mut pool: Vec<usize> = (0..terms.len()).collect();
    let mut indices = vec![pool[0]];
    let mut bounds = vec![diam0];
    let mut prev = pool[0];
    for depth in 1..MAX_BISECTION_DEPTH {
        let later: Vec<usize> = pool.iter().copied().filter(|i| *i > prev).collect();
        if later.is_empty() {
            break;
        }
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); 1 << d];
        for i in &later {
            groups[child_of(&terms[*i], &lo, &hi)].push(*i);
        }
        // a child holding at least a 2^-d share of the remaining indices
        // stands in for "infinitely many"; earliest first index wins
        let chosen = (0..groups.len())
            .filter(|c| !groups[*c].is_empty() && groups[*c].len() << d >= later.len())
            .min_by_key(|c| groups[*c][0])
            .expect("pigeonhole");
        for i in 0..d {
            let mid = 0.5 * (lo[i] + hi[i]);
            if chosen & (1 << i) != 0 {
                lo[i] = mid;
            } else {
                hi[i] = mid;
            }
        }
        pool = std::mem::take(&mut groups[chosen]);
        prev = pool[0];
        indices.push(prev);
        bounds.push(diam0 / 2f64.powi(depth as i32));
    }
    let limit = terms[prev].clone();
    AtomExtraction { indices, bounds, limit }
}

/// Bolzano-Weierstrass extraction by repeated bisection of the region's
/// bounding box, using terms `1..=budget`.
///
/// The returned prefix has the same length on every atom.
pub fn extract_convergent_subsequence(seq: &CondSequence, region: &SymmetricBody, budget: usize) -> Result<Subsequence> {
    seq.validate()?;
    let on = seq.on()?;
    on.ensure_eq(region.on())?;
    if budget == 0 {
        return Err(Error::InvalidValue("budget must be positive".into()));
    }
    let mut escaped = Vec::new();
    let mut per_atom = Vec::new();
    for t in on.atoms() {
        let body = region.at(t);
        if !body.is_bounded() {
            escaped.push(t);
            continue;
        }
        let terms: Vec<Vec<f64>> = (1..=budget).map(|k| seq.term_at(k, t)).collect::<Result<_>>()?;
        for x in &terms {
            body.check_dim(t, x.len())?;
        }
        if terms.iter().any(|x| !body.contains(x, 1e-12)) {
            escaped.push(t);
            continue;
        }
        per_atom.push((t, extract_atom(&terms, &body.half_widths()?)));
    }
    if !escaped.is_empty() {
        return Err(Error::UnboundedOnCondition(on.algebra().condition(escaped)?));
    }
    let len = per_atom.iter().map(|(_, e)| e.indices.len()).min().unwrap_or(0);
    let mut indices = Vec::with_capacity(len);
    let mut error_bounds = Vec::with_capacity(len);
    for k in 0..len {
        let mut n = std::collections::BTreeMap::new();
        let mut b = std::collections::BTreeMap::new();
        for (t, e) in &per_atom {
            n.insert(*t, e.indices[k] as u64 + 1);
            b.insert(*t, e.bounds[k]);
        }
        indices.push(CondNat::new(ConditionalValue::new(on.clone(), n)?)?);
        error_bounds.push(CondReal::new(on.clone(), b)?);
    }
    let limit = CondVector::new(on.clone(), per_atom.into_iter().map(|(t, e)| (t, e.limit)).collect())?;
    Ok(Subsequence { indices, limit, error_bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linear::{AtomBody, CondNorm, PNorm};

    fn formula(a: &Algebra, f: impl Fn(usize) -> TermFormula) -> CondSequence {
        CondSequence::Formula(ConditionalValue::from_fn(&a.one(), |t| vec![f(t)]))
    }

    fn harmonic() -> TermFormula {
        TermFormula { offset: 0.0, scale: 1.0, alternating: false, power: -1.0, ratio: 1.0 }
    }

    fn flip() -> TermFormula {
        TermFormula { offset: 0.0, scale: 1.0, alternating: true, power: 0.0, ratio: 1.0 }
    }

    #[test]
    fn conditional_indexing() {
        let a = Algebra::new(2).unwrap();
        let s = formula(&a, |t| if t == 0 { harmonic() } else { flip() });
        let n = CondNat::new(ConditionalValue::new(a.one(), [(0, 4), (1, 3)].into()).unwrap()).unwrap();
        let x = s.at(&n).unwrap();
        assert_eq!(x.at(0), &vec![0.25]);
        assert_eq!(x.at(1), &vec![-1.0]);
    }

    #[test]
    fn cauchy_examples() {
        let a = Algebra::new(2).unwrap();
        let m = CondMetric::Norm(CondNorm::uniform(&a.one(), PNorm::L2));
        let h = formula(&a, |_| harmonic());
        let lim = limit(&h, &m, 1e-3, 10_000).unwrap().unwrap();
        assert!(lim.at(0)[0].abs() <= 1e-3);
        let f = formula(&a, |_| flip());
        assert!(is_cauchy(&f, &m, 1.0, 1000).unwrap().is_zero());
        assert_eq!(limit(&f, &m, 1.0, 1000).unwrap(), None);
        let mixed = formula(&a, |t| if t == 0 { harmonic() } else { flip() });
        assert_eq!(is_cauchy(&mixed, &m, 1e-3, 10_000).unwrap(), a.atom(0).unwrap());
        // 1/log(k+1) style slow decay cannot be settled at this budget
        let slow = formula(&a, |_| TermFormula { power: -0.05, ..harmonic() });
        assert!(matches!(is_cauchy(&slow, &m, 1e-6, 100), Err(Error::Undecided(_))));
    }

    #[test]
    fn bolzano_weierstrass_examples() {
        let a = Algebra::new(2).unwrap();
        let region = SymmetricBody::constant(&a.one(), AtomBody::cube(1, 1.0).unwrap());
        let s = formula(&a, |t| if t == 0 { flip() } else { harmonic() });
        let sub = extract_convergent_subsequence(&s, &region, 1000).unwrap();
        assert_eq!(sub.limit.at(0), &vec![1.0]);
        assert!(sub.limit.at(1)[0].abs() < 1e-2);
        for w in sub.indices.windows(2) {
            assert!(w[0].lt(&w[1]).unwrap());
        }
        for (n, b) in sub.indices.iter().zip(&sub.error_bounds) {
            let x = s.at(n).unwrap();
            for t in 0..2 {
                assert!((x.at(t)[0] - sub.limit.at(t)[0]).abs() <= *b.at(t));
            }
        }
        let c = formula(&a, |_| TermFormula::constant(0.3));
        let sub = extract_convergent_subsequence(&c, &region, 50).unwrap();
        assert_eq!(sub.limit.at(0), &vec![0.3]);
        assert_eq!(sub.indices[4].at(0), 5);
        let grow = formula(&a, |t| if t == 0 { TermFormula { power: 1.0, ..harmonic() } } else { harmonic() });
        assert_eq!(
            extract_convergent_subsequence(&grow, &region, 10),
            Err(Error::UnboundedOnCondition(a.atom(0).unwrap()))
        );
    }
}
