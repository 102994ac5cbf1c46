//! One module per suite. Each returns its sections; [`crate::run_suite`]
//! runs them in order.

pub mod amir_lindenstrauss;
pub mod baire;
pub mod cauchy_schwarz;
pub mod core_laws;
pub mod eberlein_smulian;
pub mod embedding;
pub mod gauge;
pub mod heine_borel;
pub mod l2_duality;
pub mod linear;
pub mod numbers;
pub mod ubp;

use nalgebra::DMatrix;

use condan::linear::PNorm;

use crate::case::Section;
use crate::{HarnessError, SuiteConfig};

pub(crate) fn sections(config: &SuiteConfig) -> Result<Vec<Section<'_>>, HarnessError> {
    Ok(match config.suite.as_str() {
        "core" => core_laws::sections(config),
        "numbers" => numbers::sections(config),
        "gauge" => gauge::sections(config),
        "linear" => linear::sections(config),
        "embedding" => embedding::sections(config),
        "baire" => baire::sections(config),
        "ubp" => ubp::sections(config),
        "heine_borel" => heine_borel::sections(config),
        "eberlein_smulian" => eberlein_smulian::sections(config),
        "amir_lindenstrauss" => amir_lindenstrauss::sections(config),
        "l2_duality" => l2_duality::sections(config),
        "cauchy_schwarz" => cauchy_schwarz::sections(config),
        other => return Err(HarnessError::UnknownSuite(other.into())),
    })
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub(crate) fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Exact `‖M‖` where the domain ball has finitely many extreme points, and
/// the largest singular value for ℓ2 → ℓ2; `None` otherwise.
pub(crate) fn oracle_norm(m: &DMatrix<f64>, dom: PNorm, cod: PNorm) -> Option<f64> {
    let apply = |x: &[f64]| -> f64 { cod.eval((m * nalgebra::DVector::from_column_slice(x)).as_slice()) };
    let n = m.ncols();
    match (dom, cod) {
        (PNorm::L1, _) => Some(
            (0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    apply(&e)
                })
                .fold(0.0, f64::max),
        ),
        (PNorm::LInf, _) => Some(
            (0..1usize << n)
                .map(|mask| apply(&(0..n).map(|i| if mask & (1 << i) != 0 { -1.0 } else { 1.0 }).collect::<Vec<_>>()))
                .fold(0.0, f64::max),
        ),
        (PNorm::L2, PNorm::L2) => Some(m.singular_values().iter().copied().fold(0.0, f64::max)),
        _ => None,
    }
}
