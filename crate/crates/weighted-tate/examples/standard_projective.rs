//! Ordinary projective space as the all-weights-one case.
//!
//! On P^2 every line bundle has cohomology given by binomial
//! coefficients: h^0(O(j)) = C(j+2, 2) for j >= 0 and
//! h^2(O(j)) = C(-j-1, 2) for j <= -3, with nothing in between. The
//! weighted machinery must reproduce this exactly when all weights are 1.

use weighted_tate::{sheaf_cohomology, CohomologyQuery, GradedModule, PrimeField, WeightedRing};

fn binomial(n: i64, k: i64) -> usize {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let mut out: i64 = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out as usize
}

fn main() {
    let field = PrimeField::new(32003).unwrap();
    let ring = WeightedRing::new(field, vec![1, 1, 1]).unwrap();
    let s = GradedModule::quotient_by_ideal(ring, Vec::new()).unwrap();

    let query = CohomologyQuery { j_lo: -6, j_hi: 6, i_max: None, r_override: None };
    let table = sheaf_cohomology(&s, &query).unwrap();

    println!("  j   h0  h1  h2");
    for j in (-6..=6).rev() {
        let (h0, h1, h2) = (table.h(0, j), table.h(1, j), table.h(2, j));
        println!("{j:>3}  {h0:>3} {h1:>3} {h2:>3}");
        assert_eq!(h0, binomial(j + 2, 2));
        assert_eq!(h1, 0);
        assert_eq!(h2, binomial(-j - 1, 2));
    }
    println!();
    println!("all rows match the binomial formulas for P^2");
}
