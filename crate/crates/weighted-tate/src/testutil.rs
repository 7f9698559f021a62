//! Shared fixtures for the unit tests: the two curve modules used as
//! worked examples throughout, plus small helpers around them.

use crate::field::PrimeField;
use crate::polyring::{parse_polynomial, Polynomial, WeightedRing};
use crate::resolution::GradedModule;

pub fn field() -> PrimeField {
    PrimeField::new(32003).unwrap()
}

pub fn ring_112() -> WeightedRing {
    WeightedRing::new(field(), vec![1, 1, 2]).unwrap()
}

pub fn ring_11122() -> WeightedRing {
    WeightedRing::new(field(), vec![1, 1, 1, 2, 2]).unwrap()
}

/// The degree-4 hypersurface curve in P(1, 1, 2) of genus 1.
pub fn elliptic() -> GradedModule {
    let r = ring_112();
    let f = parse_polynomial(&r, "x0^4 + x1^4 + x2^2").unwrap();
    GradedModule::quotient_by_ideal(r, vec![f]).unwrap()
}

/// A rational curve in P(1, 1, 1, 2, 2).
pub fn rational() -> GradedModule {
    let r = ring_11122();
    let gens = [
        "x0*x2 - x1^2",
        "x0*x3 - x1*x2^2",
        "x0*x4 - x1*x3",
        "x1*x3 - x2^3",
        "x1*x4 - x2*x3",
        "x2^2*x4 - x3^2",
    ]
    .iter()
    .map(|s| parse_polynomial(&r, s).unwrap())
    .collect();
    GradedModule::quotient_by_ideal(r.clone(), gens).unwrap()
}

pub fn residue_field(ring: &WeightedRing) -> GradedModule {
    let gens = (0..ring.num_vars()).map(|i| Polynomial::var(ring, i)).collect();
    GradedModule::quotient_by_ideal(ring.clone(), gens).unwrap()
}
