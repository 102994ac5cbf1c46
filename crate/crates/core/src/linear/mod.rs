//! Per-atom finite-dimensional normed spaces.

mod body;
mod map;
mod norm;
mod renorm;

pub use body::{
    body_inclusion, combine_supports, gauge, grid_support, minkowski_combine, support_function, AtomBody,
    DirectionGrid, Facet, SymmetricBody, VERTEX_DIM_CAP,
};
pub use map::{
    bidual_norm, embedding_check, maximize_on_sphere, matrix_operator_norm, norming_functional, operator_norm, realize_bidual,
    sampled_operator_norm, spectral_norm, sphere_grid, CondLinearMap, EmbeddingCheck,
};
pub use norm::{dual_norm, norm, pairing, AtomNorm, CondNorm, PNorm};
pub use renorm::{
    banach_disk, direct_sum_l2, equivalence_constants, half_norming_set, max_pairing, renorm_bodies,
    renorm_sequence, sphere_net, DirectSumReport, DiskRadii, EquivalenceConstants, FunctionalFamily, L2Element,
    L2Tail, RenormReport, NET_DIM_CAP, RENORM_SUM_SLACK,
};

use crate::conditional::ConditionalValue;

/// A vector per atom.
pub type CondVector = ConditionalValue<Vec<f64>>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
