use crate::error::{Error, Result};
use crate::linear::{operator_norm, CondLinearMap, CondNorm, CondVector};
use crate::numbers::CondReal;

/// A pointwise bound `‖T(x)‖ ≤ bound(x)` to be validated on samples.
pub struct PointwiseBound<'a> {
    pub bound: &'a dyn Fn(&CondVector) -> Result<CondReal>,
    pub samples: &'a [CondVector],
    pub tol: f64,
}

/// `s = max_T ‖T‖` per atom over the generators, which is also the supremum
/// over every concatenation of them.
pub fn uniform_bound(
    generators: &[CondLinearMap],
    dom: &CondNorm,
    cod: &CondNorm,
    pointwise: Option<&PointwiseBound<'_>>,
) -> Result<CondReal> {
    let first = generators.first().ok_or(Error::EmptyFamily)?;
    if let Some(pw) = pointwise {
        for x in pw.samples {
            let b = (pw.bound)(x)?;
            for (i, g) in generators.iter().enumerate() {
                let y = g.apply(x)?;
                for (t, v) in y.iter() {
                    let lhs = cod.at(t).eval(v);
                    if lhs > b.at(t) + pw.tol {
                        return Err(Error::HypothesisViolated(format!(
                            "generator {} on atom {t}: ‖T(x)‖ = {lhs} exceeds {} at x = {:?}",
                            i + 1,
                            b.at(t),
                            x.at(t)
                        )));
                    }
                }
            }
        }
    }
    let mut s = operator_norm(first, dom, cod)?;
    for g in &generators[1..] {
        s = s.max(&operator_norm(g, dom, cod)?)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linear::PNorm;
    use nalgebra::DMatrix;

    fn scalar_maps(a: &Algebra, v0: f64, v1: f64) -> CondLinearMap {
        CondLinearMap::new(a.one(), [(0, DMatrix::from_element(1, 1, v0)), (1, DMatrix::from_element(1, 1, v1))].into())
            .unwrap()
    }

    #[test]
    fn hull_supremum() {
        let a = Algebra::new(2).unwrap();
        let n = CondNorm::uniform(&a.one(), PNorm::L2);
        let s = uniform_bound(&[scalar_maps(&a, 1.0, 2.0), scalar_maps(&a, 3.0, 0.5)], &n, &n, None).unwrap();
        assert_eq!((*s.at(0), *s.at(1)), (3.0, 2.0));
        let single = uniform_bound(&[scalar_maps(&a, -4.0, 0.0)], &n, &n, None).unwrap();
        assert_eq!((*single.at(0), *single.at(1)), (4.0, 0.0));
    }

    #[test]
    fn pointwise_violation() {
        let a = Algebra::new(2).unwrap();
        let n = CondNorm::uniform(&a.one(), PNorm::L2);
        let x = CondVector::constant(&a.one(), vec![1.0]);
        let bound = |x: &CondVector| Ok(x.map(|_, v| 2.0 * v[0].abs()));
        let pw = PointwiseBound { bound: &bound, samples: std::slice::from_ref(&x), tol: 1e-12 };
        assert!(uniform_bound(&[scalar_maps(&a, 1.0, 2.0)], &n, &n, Some(&pw)).is_ok());
        assert!(matches!(
            uniform_bound(&[scalar_maps(&a, 3.0, 2.0)], &n, &n, Some(&pw)),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
