//! Limits, metrics, compactness, Baire localization, and uniform bounds.

mod baire;
mod closed;
mod compact;
mod metric;
mod sequence;
mod ubp;

pub use baire::{baire_locate, BaireLocation, BaireSchedule, SpaceBox};
pub use closed::{box_grid, AtomClosedSet, ClosedSet, ConvexPiece};
pub use compact::{body_as_closed_set, compactness_check, extract_finite_subcover, CompactCandidate, OpenBall};
pub use metric::{
    neighborhood_member, norm_metric, seminorm_metric, total_set, CondMetric, NotTotalWarning, Seminorm,
    SeminormMetric, TotalSet, TOTAL_SEARCH_DIM_CAP,
};
pub use sequence::{
    cauchy_status, extract_convergent_subsequence, is_cauchy, limit, CauchyStatus, CondSequence, Subsequence,
    TermFormula, MAX_BISECTION_DEPTH,
};
pub use ubp::{uniform_bound, PointwiseBound};
