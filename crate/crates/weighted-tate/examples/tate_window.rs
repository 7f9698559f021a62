//! The resolved window of the elliptic curve in P(1, 1, 2).
//!
//! Prints the flag columns adjoined by each resolution round, the
//! module-side columns, and the weight jumps of the differential. Each
//! twist w_E(c;s) in a flag column at l = -j contributes its multiplicity
//! to h^(s)(F(j)) once the column has stabilized.

use weighted_tate::cli::{render_tate, tate_doc};
use weighted_tate::tate::validate_window;
use weighted_tate::{
    parse_polynomial, tate_window, GradedModule, PrimeField, WeightedRing,
};

fn main() {
    let field = PrimeField::new(32003).unwrap();
    let ring = WeightedRing::new(field, vec![1, 1, 2]).unwrap();
    let f = parse_polynomial(&ring, "x0^4 + x1^4 + x2^2").unwrap();
    let m = GradedModule::quotient_by_ideal(ring, vec![f]).unwrap();

    let window = tate_window(&m, 3, None).unwrap();
    print!("{}", render_tate(&tate_doc(&window), &None));

    let problems = validate_window(&window);
    assert!(problems.is_empty(), "window failed checks: {problems:?}");
    println!();
    println!("window passes the structural checks");
}
