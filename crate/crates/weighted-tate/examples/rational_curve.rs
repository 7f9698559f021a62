//! A rational curve embedded in P(1, 1, 1, 2, 2).
//!
//! The coordinate ring is cut out by six relations mixing the weight-1
//! and weight-2 variables. The sheaf has h^0(O) = 1 and h^1(O) = 0, and
//! the negative twists pick up h^1 from the resolution socle.

use weighted_tate::cli::{cohomology_doc, render_cohomology};
use weighted_tate::{
    parse_polynomial, sheaf_cohomology, CohomologyQuery, GradedModule, PrimeField, WeightedRing,
};

fn main() {
    let field = PrimeField::new(32003).unwrap();
    let ring = WeightedRing::new(field, vec![1, 1, 1, 2, 2]).unwrap();
    let gens = [
        "x0*x2 - x1^2",
        "x0*x3 - x1*x2^2",
        "x0*x4 - x1*x3",
        "x1*x3 - x2^3",
        "x1*x4 - x2*x3",
        "x2^2*x4 - x3^2",
    ]
    .iter()
    .map(|s| parse_polynomial(&ring, s).unwrap())
    .collect();
    let m = GradedModule::quotient_by_ideal(ring, gens).unwrap();

    let query = CohomologyQuery { j_lo: -2, j_hi: 2, i_max: None, r_override: None };
    let table = sheaf_cohomology(&m, &query).unwrap();
    print!("{}", render_cohomology(&cohomology_doc(&table), &None));

    // Euler characteristics are resolution-independent, so they make a
    // quick self-check against the module's own Hilbert function.
    println!();
    for j in -2..=2 {
        let chi: i64 = (0..=4).map(|i| {
            let h = table.h(i, j) as i64;
            if i % 2 == 0 { h } else { -h }
        }).sum();
        println!("chi(F({j})) = {chi}");
    }
}
