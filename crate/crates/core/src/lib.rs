//! Two-stroke heat engines on diagonal states: work and heat bookkeeping,
//! exhaustive permutation optimization, catalyst-assisted simple
//! permutations, an LP relaxation of catalytic work and a coherence check.

// NaN-rejecting guards are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod catalysis;
pub mod cli;
pub mod coherence;
pub mod error;
pub mod lp;
pub mod output;
pub mod perm;
pub mod rational;
pub mod thermo;

pub use error::{Error, Result};
