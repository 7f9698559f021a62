//! The degree-4 hypersurface in P(1, 1, 2): a genus-1 curve.
//!
//! Builds S/(x0^4 + x1^4 + x2^2) over the weighted ring with weights
//! 1, 1, 2, reports its regularity data, and prints the cohomology table
//! of the associated sheaf for twists -2 through 2. The j = 0 column
//! shows the genus: h^0(O_C) = h^1(O_C) = 1.

use weighted_tate::cli::{cohomology_doc, render_cohomology};
use weighted_tate::tate::choose_r;
use weighted_tate::{
    parse_polynomial, sheaf_cohomology, CohomologyQuery, GradedModule, PrimeField, WeightedRing,
};

fn main() {
    let field = PrimeField::new(32003).unwrap();
    let ring = WeightedRing::new(field, vec![1, 1, 2]).unwrap();
    let f = parse_polynomial(&ring, "x0^4 + x1^4 + x2^2").unwrap();
    let m = GradedModule::quotient_by_ideal(ring, vec![f]).unwrap();

    println!("module dimensions in degrees 0..4:");
    let dims: Vec<String> = (0..=4).map(|d| m.dim(d).to_string()).collect();
    println!("  {}", dims.join(" "));
    println!("regularity = {}, starting degree r = {}", m.regularity().unwrap(), choose_r(&m).unwrap());
    println!();

    let query = CohomologyQuery { j_lo: -2, j_hi: 2, i_max: None, r_override: None };
    let table = sheaf_cohomology(&m, &query).unwrap();
    print!("{}", render_cohomology(&cohomology_doc(&table), &None));

    let genus = table.h(1, 0);
    println!();
    println!("h^1(O_C) = {genus}, so the curve has genus {genus}");
}
