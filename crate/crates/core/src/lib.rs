//! The two-dimensional Epstein zeta function on rectangular lattices: evaluation
//! by analytic continuation and location of its critical, edge, off-critical and
//! real zeros.

// Negated comparisons deliberately reject NaN; quadrature nodes keep their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod lattice_zeta;
pub mod offcritical;
pub mod approx;
pub mod critical;
pub mod quadrature;
pub mod reference;
pub mod roots;
pub mod special_fn;
pub mod theta;
pub mod types;

pub use error::{Error, Result};
pub use types::*;
