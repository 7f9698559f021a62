//! The weighted BGG functor: from a graded `S`-module to a differential
//! `E`-module, and the finite piece of it that the resolver consumes.
//!
//! For a graded module `M` the window over `lo ≤ d ≤ hi` is
//! `⊕_d M_d ⊗ ω_E(-d; 0)`: one slot per basis monomial `u` of `M_d` and
//! subset `T`, placed at bidegree `(a + d; n+1) + deg e_T`. The
//! differential sends `u ⊗ e_T` to `Σ_i (x_i u) ⊗ e_i e_T` (dropping terms
//! past the top of the window) and `E` acts on the `ω_E` factor from the
//! right, so the two strictly commute and the truncation is again a valid
//! differential module: whenever a length-two composite stays inside the
//! window, both of its one-step factors do.
//!
//! The resolver does not need the full window. The subspace spanned by the
//! slots with `d ≤ r + σ + 1` together with their differentials is closed
//! under `∂` (differentials of differentials vanish) and under the action
//! (which preserves `d`), and it carries the same homology as the infinite
//! window in every group index `≥ -σ - r`: a slot in group `g` has
//! `d ≤ -g`, so all slices in those groups, and the slices one group below
//! that receive their boundaries, consist purely of slots the piece keeps.
//! Everything below that bound is truncation noise, which is why the
//! resolver is handed a matching group floor.

use std::collections::{BTreeMap, HashMap};

use crate::dmod::{diff_bidegree, DifferentialModule};
use crate::extalg::{Bidegree, ExtAlgebra};
use crate::linalg::Mat;
use crate::resolution::GradedModule;

/// Slot bookkeeping for a window: which `(d, T, u)` triple sits at which
/// coordinate of which slice. Slots are ordered by `(d, T, u)` within a
/// slice.
pub struct WindowIndex {
    pub alg: ExtAlgebra,
    pub lo: i64,
    pub hi: i64,
    pub slots: BTreeMap<Bidegree, Vec<(i64, u32, usize)>>,
    pub pos: HashMap<(i64, u32, usize), (Bidegree, usize)>,
}

/// The BGG window of `M` over internal degrees `lo ..= hi` as a
/// differential module.
pub fn bgg_window(m: &GradedModule, lo: i64, hi: i64) -> (DifferentialModule, WindowIndex) {
    let ring = &m.ring;
    let f = ring.field;
    let alg = ExtAlgebra::new(ring);
    let top = Bidegree::new(alg.total_weight(), alg.num_vars() as i64);

    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    for d in lo..=hi {
        dims.insert(d, m.dim(d));
    }
    let mut slots: BTreeMap<Bidegree, Vec<(i64, u32, usize)>> = BTreeMap::new();
    for d in lo..=hi {
        for t in 0..alg.num_subsets() as u32 {
            let b = top.plus(Bidegree::new(d, 0)).plus(alg.subset_bidegree(t));
            for u in 0..dims[&d] {
                slots.entry(b).or_default().push((d, t, u));
            }
        }
    }
    // Slots within a slice follow insertion order (d, then T, then u)
    // because the scan above visits them lexicographically.
    let mut pos = HashMap::new();
    for (&b, list) in &slots {
        for (off, &slot) in list.iter().enumerate() {
            pos.insert(slot, (b, off));
        }
    }

    let mut dm = DifferentialModule::new(f, ring.weights().to_vec());
    for (&b, list) in &slots {
        dm.set_dim(b, list.len());
    }
    let mut mult_cache: HashMap<(usize, i64), Mat> = HashMap::new();
    for (&b, list) in &slots {
        let tgt_b = b.plus(diff_bidegree());
        if dm.dim(tgt_b) > 0 {
            let mut block = Mat::zero(dm.dim(tgt_b), list.len());
            for (col, &(d, t, u)) in list.iter().enumerate() {
                for i in 0..alg.num_vars() {
                    if d + ring.weight(i) > hi {
                        continue;
                    }
                    let Some((t2, sign)) = alg.mul_subsets(1 << i, t) else {
                        continue;
                    };
                    let x = mult_cache
                        .entry((i, d))
                        .or_insert_with(|| m.mult_map(i, d));
                    let s = f.normalize(sign);
                    for v in 0..x.rows {
                        if x[(v, u)] == 0 {
                            continue;
                        }
                        let (bb, off) = pos[&(d + ring.weight(i), t2, v)];
                        debug_assert_eq!(bb, tgt_b);
                        block[(off, col)] = f.add(block[(off, col)], f.mul(s, x[(v, u)]));
                    }
                }
            }
            dm.set_diff_block(b, block);
        }
        for j in 0..alg.num_vars() {
            let tgt_a = dm.act_target(j, b);
            if dm.dim(tgt_a) == 0 {
                continue;
            }
            let mut block = Mat::zero(dm.dim(tgt_a), list.len());
            for (col, &(d, t, u)) in list.iter().enumerate() {
                let Some((t2, sign)) = alg.mul_subsets(t, 1 << j) else {
                    continue;
                };
                let (bb, off) = pos[&(d, t2, u)];
                debug_assert_eq!(bb, tgt_a);
                block[(off, col)] = f.normalize(sign);
            }
            dm.set_act_block(j, b, block);
        }
    }
    (dm, WindowIndex { alg, lo, hi, slots, pos })
}

/// The finite input to the flag resolver: the span of the window slots
/// with `lo ≤ d ≤ n_hi` plus their differentials, as a differential module
/// in its own right (bases per slice are row-reduced against the ambient
/// slot coordinates).
pub struct FinitePiece {
    pub dm: DifferentialModule,
    pub ambient: DifferentialModule,
    pub index: WindowIndex,
    /// Per slice, the reduced basis of the piece (rows, in ambient
    /// coordinates) and its pivot columns.
    pub bases: BTreeMap<Bidegree, (Mat, Vec<usize>)>,
    pub lo: i64,
    /// Largest internal degree whose full slot block is kept.
    pub n_hi: i64,
}

/// Group index below which the piece no longer matches the infinite
/// window; the resolver must not look beneath it.
pub fn faithful_floor(m: &GradedModule, r: i64) -> i64 {
    -(m.ring.sigma() + r)
}

pub fn finite_piece(m: &GradedModule, r: i64) -> FinitePiece {
    finite_piece_with_margin(m, r, 0)
}

/// Same as [`finite_piece`] but with extra ambient headroom past the last
/// degree the differentials can reach; the resulting piece is identical,
/// which [`finite_piece`] relies on and tests verify.
pub fn finite_piece_with_margin(m: &GradedModule, r: i64, margin: i64) -> FinitePiece {
    let ring = &m.ring;
    let f = ring.field;
    let a_max = ring.weights().iter().copied().max().unwrap_or(1);
    let n_hi = r + ring.sigma() + 1;
    let (ambient, index) = bgg_window(m, r, n_hi + a_max + margin);

    let mut bases: BTreeMap<Bidegree, (Mat, Vec<usize>)> = BTreeMap::new();
    for (&b, list) in &index.slots {
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (off, &(d, _, _)) in list.iter().enumerate() {
            if d <= n_hi {
                let mut row = vec![0; list.len()];
                row[off] = 1;
                rows.push(row);
            }
        }
        let src_b = b.minus(diff_bidegree());
        if let Some(src_list) = index.slots.get(&src_b) {
            let block = ambient.diff_block(src_b);
            for (col, &(d, _, _)) in src_list.iter().enumerate() {
                if d <= n_hi {
                    rows.push((0..block.rows).map(|r| block[(r, col)]).collect());
                }
            }
        }
        if rows.is_empty() {
            continue;
        }
        let mut mat = Mat::from_rows(rows);
        let pivots = mat.rref_in_place(f);
        if pivots.is_empty() {
            continue;
        }
        let basis = Mat::from_rows((0..pivots.len()).map(|i| mat.row(i).to_vec()).collect());
        bases.insert(b, (basis, pivots));
    }

    let mut dm = DifferentialModule::new(f, ring.weights().to_vec());
    for (&b, (basis, _)) in &bases {
        dm.set_dim(b, basis.rows);
    }
    for (&b, (basis, _)) in &bases {
        let tgt_b = b.plus(diff_bidegree());
        if dm.dim(tgt_b) > 0 {
            let images = basis.mul(f, &ambient.diff_block(b).transpose());
            dm.set_diff_block(b, restrict(f, &images, &bases[&tgt_b]));
        }
        for i in 0..ring.num_vars() {
            let tgt_a = dm.act_target(i, b);
            if dm.dim(tgt_a) == 0 {
                continue;
            }
            let images = basis.mul(f, &ambient.act_block(i, b).transpose());
            dm.set_act_block(i, b, restrict(f, &images, &bases[&tgt_a]));
        }
    }
    FinitePiece { dm, ambient, index, bases, lo: r, n_hi }
}

/// Express each row of `images` (ambient coordinates) in the reduced basis
/// of the target slice, as columns of the returned block. Pivot columns of
/// a reduced basis read the coordinates off directly; the expansion is
/// checked, since a failure means the subspace was not closed.
fn restrict(f: crate::field::PrimeField, images: &Mat, target: &(Mat, Vec<usize>)) -> Mat {
    let (basis, pivots) = target;
    let mut block = Mat::zero(basis.rows, images.rows);
    for j in 0..images.rows {
        let image = images.row(j);
        for (k, &p) in pivots.iter().enumerate() {
            block[(k, j)] = image[p];
        }
        for c in 0..basis.cols {
            let mut acc = 0;
            for k in 0..basis.rows {
                acc = f.add(acc, f.mul(block[(k, j)], basis[(k, c)]));
            }
            assert_eq!(acc, image[c], "image left the finite piece");
        }
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmod::{
        resolve_twisted_flag, CycleSelection, FlagOptions,
    };
    use crate::extalg::Twist;
    use crate::testutil::{elliptic, rational};

    #[test]
    fn window_slices_count_module_dimensions() {
        let m = elliptic();
        let (dm, index) = bgg_window(&m, 2, 5);
        assert!(dm.check().is_empty(), "{:?}", dm.check());
        // dim M_d for d = 2..5 on P(1,1,2) mod a quartic: 4, 6, 8, 10.
        let expect = [4usize, 6, 8, 10];
        for (d, &n) in (2..=5).zip(&expect) {
            assert_eq!(m.dim(d), n);
        }
        assert_eq!(dm.total_dim(), 8 * expect.iter().sum::<usize>());
        // The unit slots of M_2 ⊗ ω_E(-2; 0) sit at the top twist.
        let b = Bidegree::new(6, 3);
        assert_eq!(dm.dim(b), 4);
        assert!(index.slots[&b].iter().all(|&(d, t, _)| d == 2 && t == 0));
    }

    #[test]
    fn window_of_the_residue_field_is_the_dualizing_module() {
        // M = S/(x0, x1, x2) has one basis element in degree 0, so the
        // window [0, 0] is a single ω_E with zero differential.
        let k = crate::testutil::residue_field(&crate::testutil::ring_112());
        let (dm, _) = bgg_window(&k, 0, 0);
        assert!(dm.check().is_empty());
        assert_eq!(dm.total_dim(), 8);
        assert_eq!(dm.homology_dims(), dm.dims().clone());
        assert_eq!(dm.dim(Bidegree::new(4, 3)), 1);
        assert_eq!(dm.dim(Bidegree::new(0, 0)), 1);
    }

    #[test]
    fn empty_window_is_empty() {
        let m = elliptic();
        let (dm, _) = bgg_window(&m, -3, -1);
        assert_eq!(dm.total_dim(), 0);
        assert!(dm.homology_dims().is_empty());
    }

    #[test]
    fn elliptic_finite_piece_shape() {
        let m = elliptic();
        let fp = finite_piece(&m, 2);
        assert_eq!(fp.n_hi, 4);
        assert!(fp.ambient.check().is_empty());
        assert!(fp.dm.check().is_empty(), "{:?}", fp.dm.check());
        // Kept slot blocks are M_2, M_3, M_4 in full; the top slice of the
        // piece is the unit block of M_2.
        assert_eq!(fp.dm.dim(Bidegree::new(6, 3)), 4);
        // Homology first appears in group -σ - r = -3. Its minimal
        // generators over the weight-one exterior variables number
        // h^1(F(0)) + h^0(F(1)) = 3 (the resolver tests pin those); the
        // slice homology itself also carries their e_0- and e_1-images.
        let hom = fp.dm.homology_by_group();
        assert_eq!(hom.get(&-3).copied(), Some(6));
        assert!(hom.keys().all(|&g| g >= -3), "{hom:?}");
        assert_eq!(faithful_floor(&m, 2), -3);
    }

    #[test]
    fn finite_piece_ignores_ambient_margin() {
        let m = elliptic();
        let a = finite_piece(&m, 2);
        let b = finite_piece_with_margin(&m, 2, 2);
        assert_eq!(a.dm.dims(), b.dm.dims());
        for (&bd, _) in a.dm.dims() {
            assert_eq!(a.dm.diff_block(bd), b.dm.diff_block(bd));
            for i in 0..3 {
                assert_eq!(a.dm.act_block(i, bd), b.dm.act_block(i, bd));
            }
        }
    }

    #[test]
    fn elliptic_flag_steps_match_the_known_resolution() {
        let m = elliptic();
        let fp = finite_piece(&m, 2);
        let opts = FlagOptions { group_floor: Some(faithful_floor(&m, 2)), ..Default::default() };
        let res = resolve_twisted_flag(&fp.dm, 3, opts).unwrap();
        assert_eq!(res.steps_run, 3);
        let steps = res.flag.pieces_by_step();
        let expect_step = |s: usize, want: &[(Twist, usize)]| {
            let got = &steps[&s];
            let want: BTreeMap<Twist, usize> = want.iter().copied().collect();
            assert_eq!(got, &want, "step {s}");
        };
        expect_step(1, &[(Twist::new(0, 2), 1), (Twist::new(-1, 1), 2)]);
        expect_step(2, &[(Twist::new(1, 2), 2), (Twist::new(0, 1), 1)]);
        expect_step(3, &[(Twist::new(2, 2), 4)]);
        assert!(res.covers_group(-1));
        assert!(!res.flag.diff.has_constant_entry());
        assert!(res.flag.diff.check_homogeneous().is_empty());
    }

    #[test]
    fn elliptic_flag_is_selection_independent() {
        let m = elliptic();
        let fp = finite_piece(&m, 2);
        let base = FlagOptions { group_floor: Some(-3), ..Default::default() };
        let std = resolve_twisted_flag(&fp.dm, 2, base).unwrap();
        let alt = resolve_twisted_flag(
            &fp.dm,
            2,
            FlagOptions { selection: CycleSelection::Alternate, ..base },
        )
        .unwrap();
        assert_eq!(std.flag.pieces_by_step(), alt.flag.pieces_by_step());
    }

    #[test]
    fn rational_flag_first_steps() {
        let m = rational();
        // reg = 1 and H^0_m vanishes, so r = 1; σ = Σ(a_i - 1) = 2.
        let fp = finite_piece(&m, 1);
        assert!(fp.dm.check().is_empty());
        let opts = FlagOptions {
            group_floor: Some(faithful_floor(&m, 1)),
            max_expanded: 400_000,
            ..Default::default()
        };
        let res = resolve_twisted_flag(&fp.dm, 3, opts).unwrap();
        let steps = res.flag.pieces_by_step();
        // Group index -3 - i - j puts h^0(F(0)) and h^1(F(-1)) in the same
        // round; the later rounds each carry one h^1 value. The expected
        // counts are 1, 3, 5, 9: Euler characteristics alternate with the
        // parity of j (weights 1, 1, 1, 2, 2) and h^0 vanishes below j = 0.
        let want1: BTreeMap<Twist, usize> =
            [(Twist::new(0, 1), 1), (Twist::new(1, 2), 3)].into_iter().collect();
        let want2: BTreeMap<Twist, usize> = [(Twist::new(2, 2), 5)].into_iter().collect();
        let want3: BTreeMap<Twist, usize> = [(Twist::new(3, 2), 9)].into_iter().collect();
        assert_eq!(steps[&1], want1);
        assert_eq!(steps[&2], want2);
        assert_eq!(steps[&3], want3);
    }
}
