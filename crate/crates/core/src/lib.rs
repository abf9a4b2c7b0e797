//! Riemann's auxiliary function R(s): evaluation by saddle-adapted
//! quadrature, zero counting by the argument principle, zero isolation and
//! refinement, and tabulation of the counting function against
//! `T/4pi log(T/2pi) - T/4pi - sqrt(T/2pi)/2`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auxiliary;
pub mod counting;
pub mod error;
pub mod locator;
pub mod report;
pub mod special;

pub use error::{Error, Result};
pub use special::ComplexPoint;
