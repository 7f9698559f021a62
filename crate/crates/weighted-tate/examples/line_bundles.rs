//! Line bundles O(j) on the stack P(1, 1, 2).
//!
//! The structure sheaf comes from the free module S itself. Here
//! h^0(O(j)) counts weighted monomials of degree j, h^1 vanishes, and
//! h^2(O(j)) mirrors h^0(O(-j-4)) by duality (the total weight is 4).

use weighted_tate::{sheaf_cohomology, CohomologyQuery, GradedModule, PrimeField, WeightedRing};

fn main() {
    let field = PrimeField::new(32003).unwrap();
    let ring = WeightedRing::new(field, vec![1, 1, 2]).unwrap();
    let s = GradedModule::quotient_by_ideal(ring, Vec::new()).unwrap();
    let a: i64 = s.ring.total_weight();

    let query = CohomologyQuery { j_lo: -8, j_hi: 4, i_max: None, r_override: None };
    let table = sheaf_cohomology(&s, &query).unwrap();

    println!("  j   h0  h1  h2   monomials of degree j and -j-{a}");
    for j in (-8..=4).rev() {
        let (h0, h1, h2) = (table.h(0, j), table.h(1, j), table.h(2, j));
        println!(
            "{j:>3}  {h0:>3} {h1:>3} {h2:>3}   {} and {}",
            s.dim(j),
            s.dim(-j - a)
        );
        assert_eq!(h0, s.dim(j), "h^0 must count sections");
        assert_eq!(h1, 0, "middle cohomology of a line bundle vanishes");
        assert_eq!(h2, s.dim(-j - a), "duality");
    }
    println!();
    println!("all rows match the monomial counts");
}
