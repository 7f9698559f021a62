//! Bigraded differential `E`-modules and minimal free flag resolutions.
//!
//! Because the exterior generators carry distinct weights, the objects here
//! are differential modules rather than complexes: a bigraded vector space
//! with a square-zero endomorphism `∂` of bidegree `(0; -1)` that commutes
//! with the `E`-action. Fixing the internal degree of a slice, `∂` walks
//! down the homological degree, so homology is still computed one bidegree
//! at a time; the flag filtration that replaces the homological grading is
//! by the group index `hdeg - wdeg`.
//!
//! All module structures in this crate commute with the differential on the
//! nose, with no Koszul sign: free modules carry the left action and their
//! differentials extend generator images by `∂(e_T · g) = e_T · ∂g`, while
//! the BGG windows built downstream act through right multiplication on the
//! `ω_E` factor. Under this convention the mapping cone of an `E`-linear
//! chain map is again strictly `E`-linear with the block differential
//! `[[∂_D, ε], [0, -∂_F]]`.
//!
//! The resolver turns a differential module `D` with finite nonzero
//! homology into a minimal free flag `F` with a quasi-isomorphism
//! `ε: F → D`, one group index per round: it finds the lowest populated
//! group of `H(cone(ε))`, adjoins one free generator per minimal homology
//! class there (minimal over the subalgebra generated by the weight-one
//! `e_i`, which act within a group), and repeats. Generators adjoined for a
//! class with representative `(z_D, z_F)` get `∂g = -z_F` and `ε(g) = z_D`,
//! which kills the class in the new cone.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::extalg::{Bidegree, ExtAlgebra, ExtElement, ExtFreeModule, ExtMatrix, Twist};
use crate::field::PrimeField;
use crate::linalg::{Mat, RowSpan};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DmodError {
    #[error("nothing to resolve: the differential module has no homology")]
    NothingToResolve,
    #[error("resource limit exceeded: {needed} expanded basis vectors, cap is {cap}")]
    ResourceLimit { needed: usize, cap: usize },
}

/// The bidegree of every differential, `(0; -1)`.
pub fn diff_bidegree() -> Bidegree {
    Bidegree::new(0, -1)
}

/// A finite bigraded vector space with a square-zero differential of
/// bidegree `(0; -1)` and an action of the exterior generators `e_i` of
/// bidegree `(-a_i; -1)`, all stored as one matrix block per source
/// bidegree. Missing blocks are zero; slices of dimension zero are not
/// stored. Vectors are columns; a block maps the source slice to the
/// target slice from the left.
#[derive(Clone, Debug)]
pub struct DifferentialModule {
    pub field: PrimeField,
    weights: Vec<i64>,
    dims: BTreeMap<Bidegree, usize>,
    diff: BTreeMap<Bidegree, Mat>,
    act: Vec<BTreeMap<Bidegree, Mat>>,
}

impl DifferentialModule {
    pub fn new(field: PrimeField, weights: Vec<i64>) -> Self {
        let act = vec![BTreeMap::new(); weights.len()];
        DifferentialModule { field, weights, dims: BTreeMap::new(), diff: BTreeMap::new(), act }
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self, b: Bidegree) -> usize {
        self.dims.get(&b).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<Bidegree, usize> {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn set_dim(&mut self, b: Bidegree, n: usize) {
        if n > 0 {
            self.dims.insert(b, n);
        }
    }

    /// Bidegree reached by `e_i` from `b`.
    pub fn act_target(&self, i: usize, b: Bidegree) -> Bidegree {
        b.plus(Bidegree::new(-self.weights[i], -1))
    }

    pub fn diff_block(&self, b: Bidegree) -> Mat {
        match self.diff.get(&b) {
            Some(m) => m.clone(),
            None => Mat::zero(self.dim(b.plus(diff_bidegree())), self.dim(b)),
        }
    }

    pub fn act_block(&self, i: usize, b: Bidegree) -> Mat {
        match self.act[i].get(&b) {
            Some(m) => m.clone(),
            None => Mat::zero(self.dim(self.act_target(i, b)), self.dim(b)),
        }
    }

    pub fn set_diff_block(&mut self, b: Bidegree, m: Mat) {
        assert_eq!(m.cols, self.dim(b), "differential block column mismatch at {b}");
        assert_eq!(
            m.rows,
            self.dim(b.plus(diff_bidegree())),
            "differential block row mismatch at {b}"
        );
        if !m.is_zero() {
            self.diff.insert(b, m);
        }
    }

    pub fn set_act_block(&mut self, i: usize, b: Bidegree, m: Mat) {
        assert_eq!(m.cols, self.dim(b), "action block column mismatch at {b}");
        assert_eq!(
            m.rows,
            self.dim(self.act_target(i, b)),
            "action block row mismatch at {b}"
        );
        if !m.is_zero() {
            self.act[i].insert(b, m);
        }
    }

    /// Structural diagnostics: `∂∘∂ = 0`, strict commutation
    /// `∂∘e_i = e_i∘∂`, anticommutation `e_i e_j + e_j e_i = 0`, squares
    /// `e_i e_i = 0`, and bidegree compliance of stored blocks (which is
    /// enforced by the setters, so the latter cannot fail after
    /// construction). Returns one message per violation; empty means valid.
    pub fn check(&self) -> Vec<String> {
        let f = self.field;
        let mut bad = Vec::new();
        for (&b, _) in &self.dims {
            let d1 = self.diff_block(b);
            let d2 = self.diff_block(b.plus(diff_bidegree()));
            if !d2.mul(f, &d1).is_zero() {
                bad.push(format!("differential does not square to zero from {b}"));
            }
            for i in 0..self.num_vars() {
                let ei = self.act_block(i, b);
                let d_after = self.diff_block(self.act_target(i, b));
                let ei_after = self.act_block(i, b.plus(diff_bidegree()));
                if d_after.mul(f, &ei) != ei_after.mul(f, &d1) {
                    bad.push(format!("differential does not commute with e_{i} from {b}"));
                }
                let ei_twice = self.act_block(i, self.act_target(i, b));
                if !ei_twice.mul(f, &ei).is_zero() {
                    bad.push(format!("e_{i} does not square to zero from {b}"));
                }
                for j in (i + 1)..self.num_vars() {
                    let ej = self.act_block(j, b);
                    let ej_after = self.act_block(j, self.act_target(i, b));
                    let ei_after = self.act_block(i, self.act_target(j, b));
                    let anti = ej_after.mul(f, &ei).add(f, &ei_after.mul(f, &ej));
                    if !anti.is_zero() {
                        bad.push(format!("e_{i} and e_{j} do not anticommute from {b}"));
                    }
                }
            }
        }
        bad
    }

    /// Rows spanning the cycles `ker(∂)` in the slice at `b` (canonical
    /// reduced basis).
    pub fn cycles(&self, b: Bidegree) -> Mat {
        self.diff_block(b).kernel(self.field)
    }

    /// Rows spanning the boundaries landing in the slice at `b`: images of
    /// the slice basis one homological degree up.
    pub fn boundaries_into(&self, b: Bidegree) -> Mat {
        self.diff_block(b.minus(diff_bidegree())).transpose()
    }

    /// Nonzero homology dimensions per bidegree.
    pub fn homology_dims(&self) -> BTreeMap<Bidegree, usize> {
        let f = self.field;
        let mut out = BTreeMap::new();
        for (&b, _) in &self.dims {
            let cycles = self.cycles(b);
            let dim = cycles.rows - self.boundaries_into(b).rank(f);
            if dim > 0 {
                out.insert(b, dim);
            }
        }
        out
    }

    /// Total homology dimension per group index `hdeg - wdeg`.
    pub fn homology_by_group(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (b, d) in self.homology_dims() {
            *out.entry(b.group()).or_insert(0) += d;
        }
        out
    }

    pub fn is_exact(&self) -> bool {
        self.homology_dims().is_empty()
    }

    /// Whether homology vanishes in every group index strictly below
    /// `bound`.
    pub fn is_exact_below(&self, bound: i64) -> bool {
        self.homology_dims().keys().all(|b| b.group() >= bound)
    }
}

/// A bidegree-preserving `E`-linear chain map, one block per source
/// bidegree.
#[derive(Clone, Debug, Default)]
pub struct DmMorphism {
    blocks: BTreeMap<Bidegree, Mat>,
}

impl DmMorphism {
    pub fn zero() -> Self {
        DmMorphism { blocks: BTreeMap::new() }
    }

    pub fn block(&self, src: &DifferentialModule, tgt: &DifferentialModule, b: Bidegree) -> Mat {
        match self.blocks.get(&b) {
            Some(m) => m.clone(),
            None => Mat::zero(tgt.dim(b), src.dim(b)),
        }
    }

    pub fn set_block(&mut self, b: Bidegree, m: Mat) {
        if !m.is_zero() {
            self.blocks.insert(b, m);
        }
    }

    /// Diagnostics: block shapes, commutation with the differentials, and
    /// commutation with every `e_i`.
    pub fn check(&self, src: &DifferentialModule, tgt: &DifferentialModule) -> Vec<String> {
        let f = src.field;
        let mut bad = Vec::new();
        for (&b, m) in &self.blocks {
            if m.rows != tgt.dim(b) || m.cols != src.dim(b) {
                bad.push(format!("block shape mismatch at {b}"));
            }
        }
        let mut all: Vec<Bidegree> = src.dims().keys().copied().collect();
        all.extend(self.blocks.keys().copied());
        all.sort();
        all.dedup();
        for &b in &all {
            let here = self.block(src, tgt, b);
            let after_diff = self.block(src, tgt, b.plus(diff_bidegree()));
            if tgt.diff_block(b).mul(f, &here) != after_diff.mul(f, &src.diff_block(b)) {
                bad.push(format!("does not commute with the differential at {b}"));
            }
            for i in 0..src.num_vars() {
                let after_act = self.block(src, tgt, src.act_target(i, b));
                if tgt.act_block(i, b).mul(f, &here) != after_act.mul(f, &src.act_block(i, b)) {
                    bad.push(format!("does not commute with e_{i} at {b}"));
                }
            }
        }
        bad
    }
}

/// The mapping cone of `ε: F → D`, namely `D ⊕ F(0; -1)` with differential
/// `[[∂_D, ε], [0, -∂_F]]`. In each slice the `D` coordinates come first,
/// then the `F` slots from one homological degree down.
pub fn cone(d: &DifferentialModule, f_mod: &DifferentialModule, eps: &DmMorphism) -> DifferentialModule {
    let f = d.field;
    let shift = diff_bidegree();
    let mut out = DifferentialModule::new(f, d.weights.clone());
    let mut keys: Vec<Bidegree> = d.dims().keys().copied().collect();
    keys.extend(f_mod.dims().keys().map(|&b| b.minus(shift)));
    keys.sort();
    keys.dedup();
    for &b in &keys {
        out.set_dim(b, d.dim(b) + f_mod.dim(b.plus(shift)));
    }
    for &b in &keys {
        let (dd, df) = (d.dim(b), f_mod.dim(b.plus(shift)));
        if dd + df == 0 {
            continue;
        }
        let tgt_b = b.plus(shift);
        let (td, tf) = (d.dim(tgt_b), f_mod.dim(tgt_b.plus(shift)));
        if td + tf > 0 {
            let mut block = Mat::zero(td + tf, dd + df);
            paste(&mut block, 0, 0, &d.diff_block(b));
            paste(&mut block, 0, dd, &eps.block(f_mod, d, b.plus(shift)));
            paste(&mut block, td, dd, &f_mod.diff_block(b.plus(shift)).scale(f, f.neg(1)));
            out.set_diff_block(b, block);
        }
        for i in 0..d.num_vars() {
            let tgt_a = d.act_target(i, b);
            let (ad, af) = (d.dim(tgt_a), f_mod.dim(tgt_a.plus(shift)));
            if ad + af == 0 {
                continue;
            }
            let mut ablock = Mat::zero(ad + af, dd + df);
            paste(&mut ablock, 0, 0, &d.act_block(i, b));
            paste(&mut ablock, ad, dd, &f_mod.act_block(i, b.plus(shift)));
            out.set_act_block(i, b, ablock);
        }
    }
    out
}

fn paste(dst: &mut Mat, row: usize, col: usize, src: &Mat) {
    for i in 0..src.rows {
        for j in 0..src.cols {
            dst[(row + i, col + j)] = src[(i, j)];
        }
    }
}

/// One generator of a free flag differential module.
#[derive(Clone, Debug)]
pub struct FlagGen {
    pub twist: Twist,
    pub bidegree: Bidegree,
    /// The resolution round that adjoined it, starting from 1.
    pub step: usize,
}

/// Where the expanded basis slots `e_T · g_k` of a twisted free module
/// live: per bidegree in deterministic (generator, subset) order, plus the
/// reverse lookup.
pub struct FlagLayout {
    pub slots: BTreeMap<Bidegree, Vec<(usize, u32)>>,
    pub pos: HashMap<(usize, u32), (Bidegree, usize)>,
}

/// A free flag differential module: a twisted free `E`-module whose
/// differential is a square matrix over `E` of bidegree `(0; -1)` with all
/// entries in the maximal ideal (minimality), strictly lowering the group
/// index of generators.
#[derive(Clone, Debug)]
pub struct FreeFlagDm {
    pub alg: ExtAlgebra,
    pub gens: Vec<FlagGen>,
    pub diff: ExtMatrix,
}

impl FreeFlagDm {
    pub fn empty(alg: ExtAlgebra) -> Self {
        let diff = ExtMatrix::zero(alg.clone(), vec![], vec![], diff_bidegree());
        FreeFlagDm { alg, gens: vec![], diff }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn expanded_dim(&self) -> usize {
        self.gens.len() * self.alg.num_subsets()
    }

    pub fn module(&self) -> ExtFreeModule {
        ExtFreeModule::new(self.alg.clone(), self.gens.iter().map(|g| g.twist).collect())
    }

    /// Generator multiplicities per twist within each group index.
    pub fn pieces_by_group(&self) -> BTreeMap<i64, BTreeMap<Twist, usize>> {
        let mut out: BTreeMap<i64, BTreeMap<Twist, usize>> = BTreeMap::new();
        for g in &self.gens {
            *out.entry(g.bidegree.group()).or_default().entry(g.twist).or_insert(0) += 1;
        }
        out
    }

    /// Generator multiplicities per twist within each resolution round.
    pub fn pieces_by_step(&self) -> BTreeMap<usize, BTreeMap<Twist, usize>> {
        let mut out: BTreeMap<usize, BTreeMap<Twist, usize>> = BTreeMap::new();
        for g in &self.gens {
            *out.entry(g.step).or_default().entry(g.twist).or_insert(0) += 1;
        }
        out
    }

    /// Number of generators carrying the given twist.
    pub fn count_twist(&self, t: Twist) -> usize {
        self.gens.iter().filter(|g| g.twist == t).count()
    }

    /// Expand to a differential module over the expanded basis `e_T · g_k`
    /// with the left `E`-action and `∂(e_T · g) = e_T · ∂g`.
    pub fn expand(&self) -> (DifferentialModule, FlagLayout) {
        let alg = &self.alg;
        let f = alg.field;
        let module = self.module();
        let mut slots: BTreeMap<Bidegree, Vec<(usize, u32)>> = BTreeMap::new();
        for k in 0..self.gens.len() {
            for t in 0..alg.num_subsets() as u32 {
                slots.entry(module.basis_bidegree(k, t)).or_default().push((k, t));
            }
        }
        let mut pos = HashMap::new();
        for (b, list) in &slots {
            for (off, &slot) in list.iter().enumerate() {
                pos.insert(slot, (*b, off));
            }
        }
        let mut dm = DifferentialModule::new(f, alg.weights().to_vec());
        for (&b, list) in &slots {
            dm.set_dim(b, list.len());
        }
        for (&b, list) in &slots {
            // Differential block.
            let tgt_b = b.plus(diff_bidegree());
            let tgt_dim = dm.dim(tgt_b);
            if tgt_dim > 0 {
                let mut block = Mat::zero(tgt_dim, list.len());
                for (col, &(k, t)) in list.iter().enumerate() {
                    for h in 0..self.gens.len() {
                        for (&u, &c) in &self.diff.entry(h, k).terms {
                            let Some((v, sign)) = alg.mul_subsets(t, u) else {
                                continue;
                            };
                            let (bb, off) = pos[&(h, v)];
                            debug_assert_eq!(bb, tgt_b);
                            let val = f.mul(c, f.normalize(sign));
                            block[(off, col)] = f.add(block[(off, col)], val);
                        }
                    }
                }
                dm.set_diff_block(b, block);
            }
            // Action blocks: left multiplication by e_i.
            for i in 0..alg.num_vars() {
                let tgt_a = dm.act_target(i, b);
                let tgt_dim = dm.dim(tgt_a);
                if tgt_dim == 0 {
                    continue;
                }
                let mut block = Mat::zero(tgt_dim, list.len());
                for (col, &(k, t)) in list.iter().enumerate() {
                    let Some((v, sign)) = alg.mul_subsets(1 << i, t) else {
                        continue;
                    };
                    let (bb, off) = pos[&(k, v)];
                    debug_assert_eq!(bb, tgt_a);
                    block[(off, col)] = f.normalize(sign);
                }
                dm.set_act_block(i, b, block);
            }
        }
        (dm, FlagLayout { slots, pos })
    }

    /// Render the flag in the filtration labels used by Tate windows: the
    /// summand adjoined as `ω_E(c; s)` appears in the cone shifted by
    /// `(0; -1)`, so it is displayed as `ω_E(c; s-1)` under the label
    /// `l = c - s + 1` (which equals the generator's group index plus
    /// `σ + 1`). Lines are ordered by descending label.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (&group, pieces) in self.pieces_by_group().iter().rev() {
            let ell = group + self.alg.sigma() + 1;
            let mut parts: Vec<String> = Vec::new();
            let mut list: Vec<(&Twist, &usize)> = pieces.iter().collect();
            list.sort_by(|a, b| (b.0.c, b.0.s).cmp(&(a.0.c, a.0.s)));
            for (t, &mult) in list {
                let shown = Twist::new(t.c, t.s - 1);
                if mult == 1 {
                    parts.push(format!("{shown}"));
                } else {
                    parts.push(format!("{shown}^{mult}"));
                }
            }
            out.push_str(&format!("l={}: {}\n", ell, parts.join(" + ")));
        }
        out
    }
}

/// Expand `ε` from its values on generators to the whole flag by
/// `ε(e_T · g) = e_T · ε(g)`, using the action of the target module.
/// `eps_gens[k]` is the column vector of `ε(g_k)` in the target slice at
/// the generator's bidegree.
pub fn expand_epsilon(
    flag: &FreeFlagDm,
    layout: &FlagLayout,
    eps_gens: &[Vec<u64>],
    d: &DifferentialModule,
) -> DmMorphism {
    let alg = &flag.alg;
    let f = alg.field;
    let mut cols: BTreeMap<Bidegree, Vec<(usize, Vec<u64>)>> = BTreeMap::new();
    for (k, gen) in flag.gens.iter().enumerate() {
        for t in 0..alg.num_subsets() as u32 {
            // Apply the largest index first: e_T · x = e_{t_1}(e_{t_2}(...)).
            let mut b = gen.bidegree;
            let mut v = eps_gens[k].clone();
            for i in (0..alg.num_vars()).rev() {
                if t & (1 << i) != 0 {
                    v = d.act_block(i, b).mul_vec(f, &v);
                    b = d.act_target(i, b);
                }
            }
            let (bb, off) = layout.pos[&(k, t)];
            debug_assert_eq!(bb, b);
            cols.entry(b).or_default().push((off, v));
        }
    }
    let mut eps = DmMorphism::zero();
    for (b, entries) in cols {
        let rows = d.dim(b);
        let block_cols = layout.slots[&b].len();
        let mut m = Mat::zero(rows, block_cols);
        for (col, v) in entries {
            for (r, &x) in v.iter().enumerate() {
                m[(r, col)] = x;
            }
        }
        eps.set_block(b, m);
    }
    eps
}

/// Which candidate ordering the resolver uses when extending a basis of
/// minimal homology classes. Both orderings must produce the same generator
/// twists (Betti numbers of the minimal flag are invariants); exposing the
/// choice lets tests verify that.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleSelection {
    Standard,
    Alternate,
}

#[derive(Clone, Copy, Debug)]
pub struct FlagOptions {
    /// Cap on the total expanded dimension (module plus flag) the resolver
    /// may allocate.
    pub max_expanded: usize,
    pub selection: CycleSelection,
    /// Ignore cone homology in group indices strictly below this bound.
    /// Callers resolving a truncated module set this to the lowest group
    /// index the truncation represents faithfully.
    pub group_floor: Option<i64>,
}

impl Default for FlagOptions {
    fn default() -> Self {
        FlagOptions {
            max_expanded: 100_000,
            selection: CycleSelection::Standard,
            group_floor: None,
        }
    }
}

/// The result of resolving: the flag, the quasi-isomorphism data, and how
/// far the cone is known to be exact.
#[derive(Debug)]
pub struct FlagResolution {
    pub flag: FreeFlagDm,
    /// `ε` of each generator as a vector in the target slice at the
    /// generator's bidegree.
    pub eps_gens: Vec<Vec<u64>>,
    /// Rounds actually executed.
    pub steps_run: usize,
    /// Whether `cone(ε)` is exact (above the group floor, when one was
    /// set), i.e. `ε` is a quasi-isomorphism there.
    pub exact: bool,
    /// Cone homology vanishes in all groups `≤` this bound (and above the
    /// floor, when one was set), measured on the final cone rather than
    /// inferred from the round count. `None` when exact.
    pub completed_through: Option<i64>,
}

impl FlagResolution {
    /// Whether socle counts at the given group index are final.
    pub fn covers_group(&self, group: i64) -> bool {
        self.exact || self.completed_through.map_or(false, |g| group <= g)
    }

    /// The expanded flag and the morphism `ε`, for checks and windows.
    pub fn expanded(&self, d: &DifferentialModule) -> (DifferentialModule, DmMorphism) {
        let (dm, layout) = self.flag.expand();
        let eps = expand_epsilon(&self.flag, &layout, &self.eps_gens, d);
        (dm, eps)
    }
}

/// Resolve `d` by a minimal free flag, running at most `steps` rounds.
///
/// Each round works at the lowest populated group index `n` of the cone's
/// homology. Within each bidegree of that group the classes killed are a
/// basis of the homology modulo the images of the weight-one `e_i` (those
/// act within a group, and their images are killed for free once their
/// sources are: graded Nakayama over the exterior algebra). Representatives
/// are chosen among cycles with no coordinate on the unit slots `e_∅ · h`
/// whenever possible, which keeps the flag differential minimal; boundaries
/// never have unit coordinates, so this is a property of the class, not of
/// the representative, and the construction asserts it.
pub fn resolve_twisted_flag(
    d: &DifferentialModule,
    steps: usize,
    opts: FlagOptions,
) -> Result<FlagResolution, DmodError> {
    let f = d.field;
    let alg = ExtAlgebra::from_parts(f, d.weights().to_vec());
    let top = Bidegree::new(alg.total_weight(), alg.num_vars() as i64);
    let mut flag = FreeFlagDm::empty(alg.clone());
    let mut eps_gens: Vec<Vec<u64>> = Vec::new();
    let mut steps_run = 0;
    loop {
        let needed = d.total_dim() + flag.expanded_dim();
        if needed > opts.max_expanded {
            return Err(DmodError::ResourceLimit { needed, cap: opts.max_expanded });
        }
        let (fdm, layout) = flag.expand();
        let eps = expand_epsilon(&flag, &layout, &eps_gens, d);
        let c = cone(d, &fdm, &eps);
        let hom = c.homology_dims();
        let visible = |g: i64| opts.group_floor.is_none_or(|floor| g >= floor);
        let Some(min_group) = hom.keys().map(|b| b.group()).filter(|&g| visible(g)).min() else {
            if steps_run == 0 {
                return Err(DmodError::NothingToResolve);
            }
            return Ok(FlagResolution {
                flag,
                eps_gens,
                steps_run,
                exact: true,
                completed_through: None,
            });
        };
        if steps_run == steps {
            return Ok(FlagResolution {
                flag,
                eps_gens,
                steps_run,
                exact: false,
                completed_through: Some(min_group - 1),
            });
        }
        steps_run += 1;
        let step = steps_run;
        for (&b, _) in hom.iter().filter(|(b, _)| b.group() == min_group) {
            let d_dim = d.dim(b);
            let cycles = c.cycles(b);
            // Span to extend: boundaries plus weight-one action images of
            // the cycles one slot up the same group.
            let mut span = RowSpan::new(f);
            let boundaries = c.boundaries_into(b);
            for r in 0..boundaries.rows {
                span.absorb(boundaries.row(r));
            }
            for i in 0..alg.num_vars() {
                if alg.weights()[i] != 1 {
                    continue;
                }
                let src_b = b.plus(Bidegree::new(1, 1));
                let src_cycles = c.cycles(src_b);
                if src_cycles.rows == 0 {
                    continue;
                }
                let images = src_cycles.mul(f, &c.act_block(i, src_b).transpose());
                for r in 0..images.rows {
                    span.absorb(images.row(r));
                }
            }
            // Unit slots: cone coordinates of the form e_∅ · h in the flag
            // part. Cycles with no support there keep the flag minimal.
            let flag_slots: &[(usize, u32)] = layout
                .slots
                .get(&b.plus(diff_bidegree()))
                .map(Vec::as_slice)
                .unwrap_or(&[]);
            let unit_cols: Vec<usize> = flag_slots
                .iter()
                .enumerate()
                .filter(|(_, &(_, t))| t == 0)
                .map(|(off, _)| d_dim + off)
                .collect();
            let mut candidates: Vec<Vec<u64>> = Vec::new();
            if unit_cols.is_empty() {
                for r in 0..cycles.rows {
                    candidates.push(cycles.row(r).to_vec());
                }
            } else {
                let mut restricted = Mat::zero(cycles.rows, unit_cols.len());
                for r in 0..cycles.rows {
                    for (j, &ccol) in unit_cols.iter().enumerate() {
                        restricted[(r, j)] = cycles[(r, ccol)];
                    }
                }
                let combos = restricted.transpose().kernel(f);
                let clean = combos.mul(f, &cycles);
                for r in 0..clean.rows {
                    candidates.push(clean.row(r).to_vec());
                }
                for r in 0..cycles.rows {
                    candidates.push(cycles.row(r).to_vec());
                }
            }
            if opts.selection == CycleSelection::Alternate {
                candidates.reverse();
            }
            for cand in candidates {
                if !span.absorb(&cand) {
                    continue;
                }
                // Adjoin a generator for this class: ∂g = -z_F, ε(g) = z_D.
                let (z_d, z_f) = cand.split_at(d_dim);
                let twist = Twist::new(top.wdeg - b.wdeg, top.hdeg - b.hdeg);
                let new_idx = flag.gens.len();
                flag.gens.push(FlagGen { twist, bidegree: b, step });
                let mut by_gen: BTreeMap<usize, ExtElement> = BTreeMap::new();
                for (off, &coef) in z_f.iter().enumerate() {
                    if coef == 0 {
                        continue;
                    }
                    let (h, t) = flag_slots[off];
                    assert!(t != 0, "minimal flag class has a unit coordinate");
                    let term = ExtElement::term(t, f.neg(coef));
                    let cur = by_gen.entry(h).or_insert_with(ExtElement::zero);
                    *cur = cur.add(f, &term);
                }
                let mut diff = ExtMatrix::zero(
                    alg.clone(),
                    flag.gens.iter().map(|g| g.twist).collect(),
                    flag.gens.iter().map(|g| g.twist).collect(),
                    diff_bidegree(),
                );
                for h in 0..new_idx {
                    for g in 0..new_idx {
                        diff.set_entry(h, g, flag.diff.entry(h, g).clone());
                    }
                }
                for (h, e) in by_gen {
                    diff.set_entry(h, new_idx, e);
                }
                flag.diff = diff;
                eps_gens.push(z_d.to_vec());
            }
        }
        // Rebuilding the expanded flag here would let freshly adjoined
        // generators interfere within the round, but no rebuild is needed:
        // the images their columns add to this group are exactly the
        // weight-one action images already included in the span.
    }
}
