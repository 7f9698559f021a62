//! The exterior side of the correspondence.
//!
//! Dual to the weighted polynomial ring `S` is the exterior algebra
//! `E = Λ(e_0, ..., e_n)` with `deg e_i = (-a_i; -1)`: the first component
//! is the internal (weighted) degree, the second the homological degree.
//! Monomials `e_T = e_{t_1} ∧ ... ∧ e_{t_k}` (indices ascending) are stored
//! as bitmasks, so an element of `E` is a coefficient per subset.
//!
//! Free `E`-modules come twisted: the summand `ω_E(c; s)` has its generator
//! in bidegree `(a; n+1) - (c; s)` where `a = Σ a_i`, and its socle, the
//! span of `e_{0..n}` times the generator, in bidegree `-(c; s)`. Reading
//! socle dimensions off minimal free modules is how cohomology tables are
//! extracted downstream, so this module offers two independent routes to
//! them: counting generator twists, and brute-force annihilator linear
//! algebra on each bidegree slice.

use std::collections::BTreeMap;
use std::fmt;

use crate::field::PrimeField;
use crate::linalg::Mat;
use crate::polyring::WeightedRing;

/// A bidegree `(wdeg; hdeg)`: internal weighted degree and homological
/// degree. The derived order (by `wdeg`, then `hdeg`) is used only to keep
/// iteration over slices deterministic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub wdeg: i64,
    pub hdeg: i64,
}

impl Bidegree {
    pub fn new(wdeg: i64, hdeg: i64) -> Self {
        Bidegree { wdeg, hdeg }
    }

    /// The flag (group) index `hdeg - wdeg`. Differential modules built
    /// downstream are filtered by this quantity.
    pub fn group(self) -> i64 {
        self.hdeg - self.wdeg
    }

    pub fn plus(self, other: Bidegree) -> Bidegree {
        Bidegree::new(self.wdeg + other.wdeg, self.hdeg + other.hdeg)
    }

    pub fn minus(self, other: Bidegree) -> Bidegree {
        Bidegree::new(self.wdeg - other.wdeg, self.hdeg - other.hdeg)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "({}; {})", self.wdeg, self.hdeg)
    }
}

/// The twist `(c; s)` of a free summand `ω_E(c; s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Twist {
    pub c: i64,
    pub s: i64,
}

impl Twist {
    pub fn new(c: i64, s: i64) -> Self {
        Twist { c, s }
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "w_E({};{})", self.c, self.s)
    }
}

/// The exterior algebra `Λ(e_0, ..., e_n)` over the same field and weights
/// as a [`WeightedRing`]. Subsets of `{0, ..., n}` are bitmasks in a `u32`.
#[derive(Clone, Debug)]
pub struct ExtAlgebra {
    pub field: PrimeField,
    weights: Vec<i64>,
}

impl ExtAlgebra {
    pub fn new(ring: &WeightedRing) -> Self {
        ExtAlgebra::from_parts(ring.field, ring.weights().to_vec())
    }

    pub fn from_parts(field: PrimeField, weights: Vec<i64>) -> Self {
        assert!(!weights.is_empty() && weights.len() <= 30, "subset bitmasks are u32");
        ExtAlgebra { field, weights }
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// `a = Σ a_i`.
    pub fn total_weight(&self) -> i64 {
        self.weights.iter().sum()
    }

    /// `σ = Σ (a_i - 1)`.
    pub fn sigma(&self) -> i64 {
        self.total_weight() - self.num_vars() as i64
    }

    /// The bitmask of the full subset `{0, ..., n}`.
    pub fn full_mask(&self) -> u32 {
        (1u32 << self.num_vars()) - 1
    }

    /// `2^(n+1)`, the k-dimension of `E` and of every twisted summand.
    pub fn num_subsets(&self) -> usize {
        1usize << self.num_vars()
    }

    /// Bidegree of the monomial `e_T`: `(-Σ_{t∈T} a_t; -|T|)`.
    pub fn subset_bidegree(&self, t: u32) -> Bidegree {
        let mut w = 0;
        for i in 0..self.num_vars() {
            if t & (1 << i) != 0 {
                w += self.weights[i];
            }
        }
        Bidegree::new(-w, -(t.count_ones() as i64))
    }

    /// The weighted excess `Σ_{t∈T} (a_t - 1)`, between `0` and `σ`. The
    /// filtration jump of a differential entry carrying `e_T` is
    /// `1 + excess(T)`.
    pub fn subset_excess(&self, t: u32) -> i64 {
        let b = self.subset_bidegree(t);
        -b.wdeg + b.hdeg
    }

    /// The product `e_S · e_T`: `None` if the subsets intersect, otherwise
    /// the union together with the sign `(-1)^{#{(s,t) ∈ S×T : s > t}}`
    /// that sorts the concatenation `S, T` into ascending order.
    pub fn mul_subsets(&self, s: u32, t: u32) -> Option<(u32, i64)> {
        if s & t != 0 {
            return None;
        }
        let mut inversions = 0u32;
        for i in 0..self.num_vars() {
            if s & (1 << i) != 0 {
                inversions += (t & ((1u32 << i) - 1)).count_ones();
            }
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((s | t, sign))
    }

    /// The monomial `e_T` rendered as `e{t_1 t_2 ...}`, or `1` for the
    /// empty subset.
    pub fn subset_string(&self, t: u32) -> String {
        if t == 0 {
            return "1".to_string();
        }
        let mut out = String::from("e{");
        for i in 0..self.num_vars() {
            if t & (1 << i) != 0 {
                out.push_str(&i.to_string());
            }
        }
        out.push('}');
        out
    }
}

/// An element of `E`, stored as a coefficient per subset monomial.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ExtElement {
    pub terms: BTreeMap<u32, u64>,
}

impl ExtElement {
    pub fn zero() -> Self {
        ExtElement { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The monomial `c · e_T`.
    pub fn term(t: u32, c: u64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(t, c);
        }
        ExtElement { terms }
    }

    /// The generator `e_i`.
    pub fn gen(i: usize) -> Self {
        ExtElement::term(1 << i, 1)
    }

    pub fn add(&self, f: PrimeField, other: &ExtElement) -> ExtElement {
        let mut terms = self.terms.clone();
        for (&t, &c) in &other.terms {
            let v = f.add(*terms.get(&t).unwrap_or(&0), c);
            if v == 0 {
                terms.remove(&t);
            } else {
                terms.insert(t, v);
            }
        }
        ExtElement { terms }
    }

    pub fn scale(&self, f: PrimeField, c: u64) -> ExtElement {
        if c == 0 {
            return ExtElement::zero();
        }
        let terms = self.terms.iter().map(|(&t, &v)| (t, f.mul(v, c))).collect();
        ExtElement { terms }
    }

    pub fn neg(&self, f: PrimeField) -> ExtElement {
        self.scale(f, f.neg(1))
    }

    pub fn mul(&self, alg: &ExtAlgebra, other: &ExtElement) -> ExtElement {
        let f = alg.field;
        let mut out = ExtElement::zero();
        for (&s, &cs) in &self.terms {
            for (&t, &ct) in &other.terms {
                if let Some((u, sign)) = alg.mul_subsets(s, t) {
                    let c = f.mul(cs, f.mul(ct, f.normalize(sign)));
                    out = out.add(f, &ExtElement::term(u, c));
                }
            }
        }
        out
    }

    /// The common bidegree of all terms, or `None` if the element is zero
    /// or mixes bidegrees.
    pub fn uniform_bidegree(&self, alg: &ExtAlgebra) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(|&t| alg.subset_bidegree(t));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn to_string(&self, alg: &ExtAlgebra) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let f = alg.field;
        let mut out = String::new();
        for (&t, &c) in &self.terms {
            let signed = crate::polyring::signed_lift(f.modulus(), c);
            let (sign, mag) = if signed < 0 { ("-", -signed) } else { ("+", signed) };
            if out.is_empty() {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            let mono = alg.subset_string(t);
            if mag == 1 && t != 0 {
                out.push_str(&mono);
            } else if t == 0 {
                out.push_str(&mag.to_string());
            } else {
                out.push_str(&format!("{}*{}", mag, mono));
            }
        }
        out
    }
}

/// A finitely generated twisted free `E`-module `⊕_k ω_E(c_k; s_k)`.
///
/// Expanded as a k-vector space, the basis vectors are `e_T · g_k` indexed
/// with generators in listed order and subsets in ascending binary order
/// within each generator.
#[derive(Clone, Debug)]
pub struct ExtFreeModule {
    pub alg: ExtAlgebra,
    pub gens: Vec<Twist>,
}

impl ExtFreeModule {
    pub fn new(alg: ExtAlgebra, gens: Vec<Twist>) -> Self {
        ExtFreeModule { alg, gens }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn expanded_dim(&self) -> usize {
        self.gens.len() * self.alg.num_subsets()
    }

    /// Bidegree of the generator of the `k`-th summand:
    /// `(a; n+1) - (c_k; s_k)`.
    pub fn gen_bidegree(&self, k: usize) -> Bidegree {
        let top = Bidegree::new(self.alg.total_weight(), self.alg.num_vars() as i64);
        top.minus(Bidegree::new(self.gens[k].c, self.gens[k].s))
    }

    /// Bidegree of the socle line of the `k`-th summand: `-(c_k; s_k)`.
    pub fn socle_bidegree(&self, k: usize) -> Bidegree {
        Bidegree::new(-self.gens[k].c, -self.gens[k].s)
    }

    /// Bidegree of the basis vector `e_T · g_k`.
    pub fn basis_bidegree(&self, k: usize, t: u32) -> Bidegree {
        self.gen_bidegree(k).plus(self.alg.subset_bidegree(t))
    }

    /// Flat index of the basis vector `e_T · g_k`.
    pub fn basis_index(&self, k: usize, t: u32) -> usize {
        k * self.alg.num_subsets() + t as usize
    }

    pub fn basis_of_index(&self, idx: usize) -> (usize, u32) {
        (idx / self.alg.num_subsets(), (idx % self.alg.num_subsets()) as u32)
    }

    /// The basis slots of every bidegree slice, each in deterministic
    /// (generator, subset) order.
    pub fn slices(&self) -> BTreeMap<Bidegree, Vec<(usize, u32)>> {
        let mut out: BTreeMap<Bidegree, Vec<(usize, u32)>> = BTreeMap::new();
        for k in 0..self.gens.len() {
            for t in 0..self.alg.num_subsets() as u32 {
                out.entry(self.basis_bidegree(k, t)).or_default().push((k, t));
            }
        }
        out
    }

    /// Socle dimensions per bidegree, counted from the generator twists:
    /// each summand contributes one socle line in bidegree `-(c_k; s_k)`.
    pub fn socle_counts(&self) -> BTreeMap<Bidegree, usize> {
        let mut out = BTreeMap::new();
        for k in 0..self.gens.len() {
            *out.entry(self.socle_bidegree(k)).or_insert(0) += 1;
        }
        out
    }

    /// Socle dimensions per bidegree by brute force: the joint kernel of
    /// left multiplication by every `e_i` on each bidegree slice. Agrees
    /// with [`socle_counts`](Self::socle_counts) on free modules; kept as
    /// an independent route for cross-checks.
    pub fn socle_counts_annihilator(&self) -> BTreeMap<Bidegree, usize> {
        let f = self.alg.field;
        let slices = self.slices();
        let mut out = BTreeMap::new();
        for (&b, slots) in &slices {
            // Stack the slice blocks of multiplication by each e_i and take
            // the kernel. Rows live in the disjoint union of the target
            // slices; every product e_i · e_T ∧ g_k is again a basis slot,
            // so target offsets can be assigned per (i, slot).
            let mut rows = Vec::new();
            for i in 0..self.alg.num_vars() {
                let mut block: BTreeMap<(usize, u32), Vec<u64>> = BTreeMap::new();
                for (col, &(k, t)) in slots.iter().enumerate() {
                    let Some((u, sign)) = self.alg.mul_subsets(1 << i, t) else {
                        continue;
                    };
                    block
                        .entry((k, u))
                        .or_insert_with(|| vec![0; slots.len()])[col] = f.normalize(sign);
                }
                rows.extend(block.into_values());
            }
            let mat = if rows.is_empty() {
                Mat::zero(0, slots.len())
            } else {
                Mat::from_rows(rows)
            };
            let dim = mat.kernel(f).rows;
            if dim > 0 {
                out.insert(b, dim);
            }
        }
        out
    }
}

/// The matrix of an `E`-linear map between twisted free modules, one column
/// per source generator: the image of the source generator `g` is
/// `Σ_h entry(h, g) · h` over the target generators `h`.
#[derive(Clone, Debug)]
pub struct ExtMatrix {
    pub alg: ExtAlgebra,
    pub src: Vec<Twist>,
    pub tgt: Vec<Twist>,
    /// The declared bidegree of the map, e.g. `(0; -1)` for differentials.
    pub bidegree: Bidegree,
    entries: Vec<ExtElement>,
}

impl ExtMatrix {
    pub fn zero(alg: ExtAlgebra, src: Vec<Twist>, tgt: Vec<Twist>, bidegree: Bidegree) -> Self {
        let entries = vec![ExtElement::zero(); src.len() * tgt.len()];
        ExtMatrix { alg, src, tgt, bidegree, entries }
    }

    pub fn entry(&self, h: usize, g: usize) -> &ExtElement {
        &self.entries[h * self.src.len() + g]
    }

    pub fn set_entry(&mut self, h: usize, g: usize, e: ExtElement) {
        self.entries[h * self.src.len() + g] = e;
    }

    fn twist_bidegree(&self, t: Twist) -> Bidegree {
        let top = Bidegree::new(self.alg.total_weight(), self.alg.num_vars() as i64);
        top.minus(Bidegree::new(t.c, t.s))
    }

    /// Every term of `entry(h, g)` must have bidegree
    /// `deg(g) + bidegree - deg(h)`; returns a description per violation.
    pub fn check_homogeneous(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for h in 0..self.tgt.len() {
            for g in 0..self.src.len() {
                let e = self.entry(h, g);
                if e.is_zero() {
                    continue;
                }
                let want = self
                    .twist_bidegree(self.src[g])
                    .plus(self.bidegree)
                    .minus(self.twist_bidegree(self.tgt[h]));
                for &t in e.terms.keys() {
                    let got = self.alg.subset_bidegree(t);
                    if got != want {
                        bad.push(format!(
                            "entry ({h}, {g}): term {} has bidegree {got}, want {want}",
                            self.alg.subset_string(t)
                        ));
                    }
                }
            }
        }
        bad
    }

    /// Whether some entry has a nonzero scalar (`e_∅`) term; a minimal
    /// differential has none.
    pub fn has_constant_entry(&self) -> bool {
        self.entries.iter().any(|e| e.terms.contains_key(&0))
    }
}
