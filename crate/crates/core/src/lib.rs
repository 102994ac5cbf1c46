//! Conditional analysis over a finite atomic Boolean algebra.
//!
//! Every object lives on a condition (a set of atoms) and is stored as one
//! ordinary value per atom. Concatenation, conditional numbers, normed
//! spaces and the analytic procedures all act atom by atom.

pub mod algebra;
pub mod analysis;
pub mod conditional;
pub mod error;
pub mod io;
pub mod linear;
pub mod numbers;

pub use algebra::{Algebra, Condition, Partition};
pub use conditional::{ConditionalValue, StableSet};
pub use error::{Error, Result};
pub use linear::CondVector;
pub use numbers::{CondNat, CondReal};
