//! Sheaf cohomology on weighted projective stacks.
//!
//! Given a finitely generated graded module `M` over the weighted polynomial
//! ring `S = k[x_0..x_n]` with `deg x_i = a_i`, this crate computes the
//! cohomology of the associated sheaf on the stack `P(a_0,...,a_n)` by
//! passing through the exterior algebra: a high truncation of `M` is turned
//! into a differential `E`-module, a finite subquotient of it is resolved by
//! a free flag differential module, and the cohomology dimensions are read
//! off the bidegrees of the flag generators.

pub mod bgg;
pub mod cli;
pub mod dmod;
pub mod extalg;
pub mod field;
pub mod linalg;
pub mod polyring;
pub mod resolution;
pub mod tate;

pub use extalg::{Bidegree, ExtAlgebra, Twist};
pub use field::PrimeField;
pub use polyring::{parse_polynomial, Polynomial, WeightedRing};
pub use resolution::GradedModule;
pub use tate::{sheaf_cohomology, tate_window, CohomologyQuery, CohomologyTable, TateWindow};

#[cfg(test)]
pub(crate) mod testutil;
