use serde::{Deserialize, Serialize};

use super::body::AtomBody;
use super::{dot, CondVector};
use crate::algebra::Condition;
use crate::conditional::ConditionalValue;
use crate::error::{Error, Result};
use crate::numbers::CondReal;

/// The analytic p-norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PNorm {
    L1,
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl PNorm {
    pub const ALL: [PNorm; 3] = [PNorm::L1, PNorm::L2, PNorm::LInf];

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            PNorm::L1 => x.iter().map(|v| v.abs()).sum(),
            PNorm::L2 => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            PNorm::LInf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn dual(self) -> PNorm {
        match self {
            PNorm::L1 => PNorm::LInf,
            PNorm::L2 => PNorm::L2,
            PNorm::LInf => PNorm::L1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PNorm::L1 => "l1",
            PNorm::L2 => "l2",
            PNorm::LInf => "linf",
        }
    }

    pub fn parse(s: &str) -> Option<PNorm> {
        match s {
            "l1" => Some(PNorm::L1),
            "l2" => Some(PNorm::L2),
            "linf" => Some(PNorm::LInf),
            _ => None,
        }
    }

    /// A functional of dual norm at most 1 attaining `‖x‖`; smallest index
    /// wins ties for ℓ∞. Zero on `x = 0`.
    pub fn norming_vector(self, x: &[f64]) -> Vec<f64> {
        match self {
            PNorm::L1 => x
                .iter()
                .map(|v| if *v > 0.0 { 1.0 } else if *v < 0.0 { -1.0 } else { 0.0 })
                .collect(),
            PNorm::L2 => {
                let n = self.eval(x);
                if n == 0.0 {
                    vec![0.0; x.len()]
                } else {
                    x.iter().map(|v| v / n).collect()
                }
            }
            PNorm::LInf => {
                let mut out = vec![0.0; x.len()];
                let mut best: Option<usize> = None;
                for (i, v) in x.iter().enumerate() {
                    if best.is_none_or(|b| v.abs() > x[b].abs()) {
                        best = Some(i);
                    }
                }
                if let Some(i) = best {
                    if x[i] != 0.0 {
                        out[i] = x[i].signum();
                    }
                }
                out
            }
        }
    }
}

/// Norm on one atom.
#[derive(Debug, Clone, PartialEq)]
pub enum AtomNorm {
    P(PNorm),
    Gauge(AtomBody),
}

impl AtomNorm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            AtomNorm::P(p) => p.eval(x),
            AtomNorm::Gauge(b) => b.gauge(x),
        }
    }

    pub fn pnorm(&self) -> Option<PNorm> {
        match self {
            AtomNorm::P(p) => Some(*p),
            AtomNorm::Gauge(_) => None,
        }
    }

    /// Dual norm `sup{|f(x)| : ‖x‖ ≤ 1}`.
    pub fn dual_eval(&self, f: &[f64]) -> Result<f64> {
        match self {
            AtomNorm::P(p) => Ok(p.dual().eval(f)),
            AtomNorm::Gauge(b) => b.support(f),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AtomNorm::P(p) => p.name(),
            AtomNorm::Gauge(_) => "gauge",
        }
    }
}

/// A norm chosen per atom.
pub type CondNorm = ConditionalValue<AtomNorm>;

impl ConditionalValue<AtomNorm> {
    pub fn uniform(on: &Condition, p: PNorm) -> CondNorm {
        ConditionalValue::constant(on, AtomNorm::P(p))
    }

    pub fn gauge_of(body: &super::SymmetricBody) -> CondNorm {
        body.map(|_, b| AtomNorm::Gauge(b.clone()))
    }

    fn atom_pnorm(&self, t: usize) -> Result<PNorm> {
        self.at(t)
            .pnorm()
            .ok_or_else(|| Error::UnsupportedNormKind(format!("gauge norm on atom {t}")))
    }

    pub fn pnorm_at(&self, t: usize) -> Result<PNorm> {
        self.atom_pnorm(t)
    }
}

/// `‖x‖` per atom.
pub fn norm(x: &CondVector, n: &CondNorm) -> Result<CondReal> {
    x.on().ensure_eq(n.on())?;
    x.try_map(|t, v| {
        if let AtomNorm::Gauge(b) = n.at(t) {
            b.check_dim(t, v.len())?;
        }
        Ok(n.at(t).eval(v))
    })
}

/// `‖f‖_*` per atom.
pub fn dual_norm(f: &CondVector, n: &CondNorm) -> Result<CondReal> {
    f.on().ensure_eq(n.on())?;
    f.try_map(|t, v| n.at(t).dual_eval(v))
}

/// `⟨f, x⟩` per atom.
pub fn pairing(f: &CondVector, x: &CondVector) -> Result<CondReal> {
    f.zip_with(x, |t, a, b| {
        debug_assert_eq!(a.len(), b.len(), "pairing dimensions on atom {t}");
        dot(a, b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norming_vectors() {
        assert_eq!(PNorm::L2.norming_vector(&[3.0, 4.0]), vec![0.6, 0.8]);
        assert_eq!(PNorm::LInf.norming_vector(&[-2.0, 1.0]), vec![-1.0, 0.0]);
        assert_eq!(PNorm::LInf.norming_vector(&[1.0, -1.0]), vec![1.0, 0.0]);
        assert_eq!(PNorm::L1.norming_vector(&[1.0, 0.0, -3.0]), vec![1.0, 0.0, -1.0]);
        assert_eq!(PNorm::L2.norming_vector(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(PNorm::LInf.norming_vector(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn dual_pairs() {
        let x = [1.0, -2.0, 2.0];
        for p in PNorm::ALL {
            let f = p.norming_vector(&x);
            assert!((dot(&f, &x) - p.eval(&x)).abs() < 1e-12);
            assert!(p.dual().eval(&f) <= 1.0 + 1e-12);
        }
    }
}
