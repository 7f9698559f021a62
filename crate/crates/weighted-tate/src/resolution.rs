//! Groebner bases over the weighted ring, graded modules presented by
//! generators and relations, and minimal free resolutions.
//!
//! Resolutions are built the classical way: a reduced Groebner basis of the
//! relation module, then iterated Schreyer syzygies (arranging each basis by
//! position and descending lex so the lead terms lose one variable per
//! step), then Gaussian cancellation of all unit entries to reach the
//! minimal resolution. Betti numbers, regularity and truncations sit on top.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::field::PrimeField;
use crate::linalg::Mat;
use crate::polyring::{
    monomials_of_degree, FreeModuleElement, ModMonomial, ModuleOrder, Monomial, Polynomial,
    WeightedRing,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModuleError {
    #[error("relation {0} is not homogeneous")]
    InhomogeneousRelation(usize),
    #[error("generator {0} is not homogeneous")]
    InhomogeneousGenerator(usize),
    #[error("relation {index} uses coordinate {pos}, but the ambient rank is {rank}")]
    PositionOutOfRange { index: usize, pos: usize, rank: usize },
    #[error("presentation column {index} has {got} entries, expected {expected}")]
    ColumnLengthMismatch { index: usize, expected: usize, got: usize },
}

/// Divide `elem` by a list of monic elements: returns the quotient
/// polynomials and the fully reduced remainder (no remainder term is
/// divisible by any lead of `basis`).
pub fn divide(
    f: PrimeField,
    order: &ModuleOrder,
    elem: &FreeModuleElement,
    basis: &[FreeModuleElement],
) -> (Vec<Polynomial>, FreeModuleElement) {
    let mut quotients = vec![Polynomial::zero(); basis.len()];
    let mut remainder: Vec<(ModMonomial, u64)> = Vec::new();
    let mut work = elem.clone();
    'outer: while let Some((lt, lc)) = work.lead() {
        let lt = lt.clone();
        for (gi, g) in basis.iter().enumerate() {
            let glt = g.lead().expect("basis elements are nonzero").0;
            if glt.pos != lt.pos {
                continue;
            }
            if let Some(q) = lt.mono.checked_div(&glt.mono) {
                quotients[gi].add_term(f, q.clone(), lc);
                work = work.add_scaled_mul(f, order, g, f.neg(lc), &q);
                continue 'outer;
            }
        }
        remainder.push((lt, lc));
        work.terms.remove(0);
    }
    (quotients, FreeModuleElement { terms: remainder })
}

pub fn normal_form(
    f: PrimeField,
    order: &ModuleOrder,
    elem: &FreeModuleElement,
    basis: &[FreeModuleElement],
) -> FreeModuleElement {
    divide(f, order, elem, basis).1
}

/// Buchberger's algorithm. `ambient_rank` is the rank of the surrounding
/// free module; the coprime-lead shortcut is only sound in rank one, where
/// S-pairs are genuine polynomial S-pairs. Returns the reduced Groebner
/// basis: monic, interreduced, sorted descending by lead term.
pub fn buchberger(
    ring: &WeightedRing,
    order: &ModuleOrder,
    ambient_rank: usize,
    input: Vec<FreeModuleElement>,
) -> Vec<FreeModuleElement> {
    let f = ring.field;
    let mut basis: Vec<FreeModuleElement> = Vec::new();
    for e in input {
        let e = e.resort(f, order);
        if let Some((_, c)) = e.lead() {
            basis.push(e.scale(f, f.inv(c).expect("lead coefficient is nonzero")));
        }
    }
    // pairs keyed by lcm degree so low degrees go first
    let mut pairs: BTreeSet<(i64, usize, usize)> = BTreeSet::new();
    let queue_pairs =
        |pairs: &mut BTreeSet<(i64, usize, usize)>, basis: &[FreeModuleElement], j: usize| {
            let lj = basis[j].lead().unwrap().0.clone();
            for (i, g) in basis[..j].iter().enumerate() {
                let li = g.lead().unwrap().0;
                if li.pos == lj.pos {
                    let key = ring.lcm(&li.mono, &lj.mono).wdeg();
                    pairs.insert((key, i, j));
                }
            }
        };
    for j in 0..basis.len() {
        queue_pairs(&mut pairs, &basis, j);
    }
    while let Some(&(key, i, j)) = pairs.iter().next() {
        pairs.remove(&(key, i, j));
        let li = basis[i].lead().unwrap().0.clone();
        let lj = basis[j].lead().unwrap().0.clone();
        if ambient_rank == 1 && coprime(&li.mono, &lj.mono) {
            continue;
        }
        let l = ring.lcm(&li.mono, &lj.mono);
        let qi = l.checked_div(&li.mono).unwrap();
        let qj = l.checked_div(&lj.mono).unwrap();
        let s = FreeModuleElement::zero()
            .add_scaled_mul(f, order, &basis[i], 1, &qi)
            .add_scaled_mul(f, order, &basis[j], f.neg(1), &qj);
        let r = normal_form(f, order, &s, &basis);
        if !r.is_zero() {
            let r = r.scale(f, f.inv(r.lead().unwrap().1).unwrap());
            basis.push(r);
            queue_pairs(&mut pairs, &basis, basis.len() - 1);
        }
    }
    reduce_basis(f, order, basis)
}

fn coprime(a: &Monomial, b: &Monomial) -> bool {
    a.exps().iter().zip(b.exps()).all(|(&x, &y)| x.min(y) == 0)
}

/// Interreduce a Groebner basis: drop elements whose lead is divisible by
/// another lead, tail-reduce the rest, make monic, sort descending by lead.
/// The result is the unique reduced Groebner basis for the given order.
pub fn reduce_basis(
    f: PrimeField,
    order: &ModuleOrder,
    basis: Vec<FreeModuleElement>,
) -> Vec<FreeModuleElement> {
    let basis: Vec<FreeModuleElement> = basis.into_iter().filter(|e| !e.is_zero()).collect();
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        let li = basis[i].lead().unwrap().0.clone();
        for (j, g) in basis.iter().enumerate() {
            if i == j || !keep[j] {
                continue;
            }
            let lj = g.lead().unwrap().0;
            // on exactly equal leads keep the earlier element
            if lj.pos == li.pos && lj.mono.divides(&li.mono) && (lj.mono != li.mono || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<FreeModuleElement> = basis
        .into_iter()
        .zip(&keep)
        .filter_map(|(e, &k)| k.then_some(e))
        .collect();
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<FreeModuleElement> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, e)| (j != i).then(|| e.clone()))
            .collect();
        let r = normal_form(f, order, &minimal[i], &others);
        let c = r.lead().expect("lead survives tail reduction").1;
        out.push(r.scale(f, f.inv(c).unwrap()));
    }
    out.sort_by(|a, b| {
        let la = a.lead().unwrap().0;
        let lb = b.lead().unwrap().0;
        order.cmp(lb, la)
    });
    out
}

/// Sort basis elements by lead position, then descending lex on the lead
/// monomial. With this arrangement each Schreyer step strips at least one
/// variable from the lead terms, which bounds the resolution length.
fn arrange_for_schreyer(gb: &mut [FreeModuleElement]) {
    gb.sort_by(|a, b| {
        let la = a.lead().unwrap().0;
        let lb = b.lead().unwrap().0;
        la.pos.cmp(&lb.pos).then_with(|| lb.mono.lex_cmp(&la.mono))
    });
}

/// One Schreyer step: the syzygies of a Groebner basis, themselves a
/// Groebner basis under the induced order, interreduced.
fn schreyer_syzygies(
    ring: &WeightedRing,
    order: &ModuleOrder,
    gb: &[FreeModuleElement],
) -> (ModuleOrder, Vec<FreeModuleElement>) {
    let f = ring.field;
    let leads: Vec<ModMonomial> = gb.iter().map(|g| g.lead().unwrap().0.clone()).collect();
    let new_order = ModuleOrder::Schreyer { base: Box::new(order.clone()), leads: leads.clone() };
    let mut syz = Vec::new();
    for l in 0..gb.len() {
        for k in 0..l {
            if leads[k].pos != leads[l].pos {
                continue;
            }
            let lcm = ring.lcm(&leads[k].mono, &leads[l].mono);
            let qk = lcm.checked_div(&leads[k].mono).unwrap();
            let ql = lcm.checked_div(&leads[l].mono).unwrap();
            let s = FreeModuleElement::zero()
                .add_scaled_mul(f, order, &gb[k], 1, &qk)
                .add_scaled_mul(f, order, &gb[l], f.neg(1), &ql);
            let (quot, rem) = divide(f, order, &s, gb);
            assert!(rem.is_zero(), "S-pair of a Groebner basis must reduce to zero");
            let mut terms = vec![
                (ModMonomial { mono: qk, pos: k }, 1),
                (ModMonomial { mono: ql, pos: l }, f.neg(1)),
            ];
            for (i, q) in quot.iter().enumerate() {
                for (m, &c) in &q.terms {
                    terms.push((ModMonomial { mono: m.clone(), pos: i }, f.neg(c)));
                }
            }
            syz.push(FreeModuleElement::from_terms(f, &new_order, terms));
        }
    }
    let syz = reduce_basis(f, &new_order, syz);
    (new_order, syz)
}

/// A matrix of homogeneous polynomials, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMat {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Polynomial>,
}

impl PolyMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMat { rows, cols, entries: vec![Polynomial::zero(); rows * cols] }
    }

    pub fn from_columns(f: PrimeField, rows: usize, cols: &[FreeModuleElement]) -> Self {
        let mut out = PolyMat::zero(rows, cols.len());
        for (c, e) in cols.iter().enumerate() {
            for (t, coef) in &e.terms {
                let p = out[(t.pos, c)].clone();
                let mut p = p;
                p.add_term(f, t.mono.clone(), *coef);
                out.set(t.pos, c, p);
            }
        }
        out
    }

    pub fn set(&mut self, r: usize, c: usize, p: Polynomial) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn column_element(&self, f: PrimeField, order: &ModuleOrder, c: usize) -> FreeModuleElement {
        let mut terms = Vec::new();
        for r in 0..self.rows {
            for (m, &coef) in &self[(r, c)].terms {
                terms.push((ModMonomial { mono: m.clone(), pos: r }, coef));
            }
        }
        FreeModuleElement::from_terms(f, order, terms)
    }

    pub fn mul(&self, f: PrimeField, other: &PolyMat) -> PolyMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in polymat mul");
        let mut out = PolyMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = self[(i, k)].mul(f, &other[(k, j)]);
                    let s = out[(i, j)].add(f, &t);
                    out.set(i, j, s);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn has_constant_entry(&self) -> bool {
        self.entries.iter().any(|p| p.constant_value().is_some())
    }

    fn delete_row(&mut self, r: usize) {
        let cols = self.cols;
        self.entries.drain(r * cols..(r + 1) * cols);
        self.rows -= 1;
    }

    fn delete_col(&mut self, c: usize) {
        let mut out = Vec::with_capacity((self.cols - 1) * self.rows);
        for r in 0..self.rows {
            for c2 in 0..self.cols {
                if c2 != c {
                    out.push(self.entries[r * self.cols + c2].clone());
                }
            }
        }
        self.entries = out;
        self.cols -= 1;
    }
}

impl std::ops::Index<(usize, usize)> for PolyMat {
    type Output = Polynomial;
    fn index(&self, (r, c): (usize, usize)) -> &Polynomial {
        &self.entries[r * self.cols + c]
    }
}

/// A free resolution `F_0 <- F_1 <- ...`; `degrees[i]` lists the generator
/// degrees of `F_i` and `maps[i]` is the matrix of `F_{i+1} -> F_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeResolution {
    pub degrees: Vec<Vec<i64>>,
    pub maps: Vec<PolyMat>,
}

impl FreeResolution {
    pub fn length(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn betti(&self) -> BettiTable {
        let mut entries: BTreeMap<(usize, i64), usize> = BTreeMap::new();
        for (i, degs) in self.degrees.iter().enumerate() {
            for &d in degs {
                *entries.entry((i, d)).or_insert(0) += 1;
            }
        }
        BettiTable { entries }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BettiTable {
    /// `(homological index i, internal degree j) -> beta_{i,j}`
    pub entries: BTreeMap<(usize, i64), usize>,
}

impl BettiTable {
    pub fn get(&self, i: usize, j: i64) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    /// `max { j - i }` over nonzero entries.
    pub fn max_shift(&self) -> Option<i64> {
        self.entries.keys().map(|&(i, j)| j - i as i64).max()
    }
}

/// Cancel unit entries of the maps until none remain (Gaussian
/// cancellation), preserving all homology; the result is the minimal
/// resolution.
fn minimalize(f: PrimeField, degrees: &mut Vec<Vec<i64>>, maps: &mut Vec<PolyMat>) {
    loop {
        let mut found = None;
        'scan: for (i, m) in maps.iter().enumerate() {
            for h in 0..m.cols {
                for g in 0..m.rows {
                    if let Some(u) = m[(g, h)].constant_value() {
                        found = Some((i, g, h, u));
                        break 'scan;
                    }
                }
            }
        }
        let Some((i, g, h, u)) = found else { break };
        let uinv = f.inv(u).unwrap();
        let lambdas: Vec<Polynomial> = (0..maps[i].cols)
            .map(|h2| if h2 == h { Polynomial::zero() } else { maps[i][(g, h2)].scale(f, uinv) })
            .collect();
        let col_h: Vec<Polynomial> = (0..maps[i].rows).map(|r| maps[i][(r, h)].clone()).collect();
        // clear row g outside column h by column operations on F_{i+1}
        for h2 in 0..maps[i].cols {
            if h2 == h || lambdas[h2].is_zero() {
                continue;
            }
            for (r, ch) in col_h.iter().enumerate() {
                let t = lambdas[h2].mul(f, ch);
                let e = maps[i][(r, h2)].sub(f, &t);
                maps[i].set(r, h2, e);
            }
        }
        // the same basis change rewrites the rows of the next map
        if i + 1 < maps.len() {
            for c in 0..maps[i + 1].cols {
                let mut acc = maps[i + 1][(h, c)].clone();
                for (h2, lam) in lambdas.iter().enumerate() {
                    if h2 == h || lam.is_zero() {
                        continue;
                    }
                    acc = acc.add(f, &lam.mul(f, &maps[i + 1][(h2, c)]));
                }
                maps[i + 1].set(h, c, acc);
            }
        }
        // drop generator g of F_i and generator h of F_{i+1}
        maps[i].delete_row(g);
        maps[i].delete_col(h);
        degrees[i].remove(g);
        degrees[i + 1].remove(h);
        if i + 1 < maps.len() {
            maps[i + 1].delete_row(h);
        }
        if i > 0 {
            maps[i - 1].delete_col(g);
        }
    }
    while maps.last().is_some_and(|m| m.cols == 0) {
        maps.pop();
        degrees.pop();
    }
}

/// A graded module presented as `coker` of a homogeneous map into a graded
/// free module with coordinate degrees `ambient`.
#[derive(Debug, Clone)]
pub struct GradedModule {
    pub ring: WeightedRing,
    pub ambient: Vec<i64>,
    pub relations: Vec<FreeModuleElement>,
    gb: OnceCell<Vec<FreeModuleElement>>,
    res: OnceCell<FreeResolution>,
}

impl GradedModule {
    pub fn new(
        ring: WeightedRing,
        ambient: Vec<i64>,
        relations: Vec<FreeModuleElement>,
    ) -> Result<Self, ModuleError> {
        let f = ring.field;
        let mut rels = Vec::new();
        for (index, r) in relations.into_iter().enumerate() {
            if let Some((t, _)) = r.terms.iter().find(|(t, _)| t.pos >= ambient.len()) {
                return Err(ModuleError::PositionOutOfRange {
                    index,
                    pos: t.pos,
                    rank: ambient.len(),
                });
            }
            if r.is_zero() {
                continue;
            }
            if r.uniform_degree(&ambient).is_none() {
                return Err(ModuleError::InhomogeneousRelation(index));
            }
            rels.push(r.resort(f, &ModuleOrder::Top));
        }
        Ok(GradedModule {
            ring,
            ambient,
            relations: rels,
            gb: OnceCell::new(),
            res: OnceCell::new(),
        })
    }

    /// The free module with the given coordinate degrees.
    pub fn free(ring: WeightedRing, degrees: Vec<i64>) -> Self {
        GradedModule::new(ring, degrees, vec![]).unwrap()
    }

    /// `S/I` for a homogeneous ideal.
    pub fn quotient_by_ideal(
        ring: WeightedRing,
        gens: Vec<Polynomial>,
    ) -> Result<Self, ModuleError> {
        let f = ring.field;
        let mut rels = Vec::new();
        for (i, p) in gens.into_iter().enumerate() {
            if !p.is_homogeneous() {
                return Err(ModuleError::InhomogeneousGenerator(i));
            }
            let terms = p
                .terms
                .iter()
                .map(|(m, &c)| (ModMonomial { mono: m.clone(), pos: 0 }, c))
                .collect();
            rels.push(FreeModuleElement::from_terms(f, &ModuleOrder::Top, terms));
        }
        GradedModule::new(ring, vec![0], rels)
    }

    /// Cokernel of the matrix whose columns are given as polynomial vectors
    /// of length `ambient.len()`.
    pub fn cokernel(
        ring: WeightedRing,
        ambient: Vec<i64>,
        columns: Vec<Vec<Polynomial>>,
    ) -> Result<Self, ModuleError> {
        let f = ring.field;
        let mut rels = Vec::new();
        for (index, col) in columns.into_iter().enumerate() {
            if col.len() != ambient.len() {
                return Err(ModuleError::ColumnLengthMismatch {
                    index,
                    expected: ambient.len(),
                    got: col.len(),
                });
            }
            let mut terms = Vec::new();
            for (pos, p) in col.into_iter().enumerate() {
                for (m, &c) in &p.terms {
                    terms.push((ModMonomial { mono: m.clone(), pos }, c));
                }
            }
            rels.push(FreeModuleElement::from_terms(f, &ModuleOrder::Top, terms));
        }
        GradedModule::new(ring, ambient, rels)
    }

    /// Reduced Groebner basis of the relation submodule, term over position.
    pub fn gb(&self) -> &[FreeModuleElement] {
        self.gb.get_or_init(|| {
            buchberger(
                &self.ring,
                &ModuleOrder::Top,
                self.ambient.len(),
                self.relations.clone(),
            )
        })
    }

    pub fn normal_form(&self, e: &FreeModuleElement) -> FreeModuleElement {
        normal_form(self.ring.field, &ModuleOrder::Top, e, self.gb())
    }

    pub fn is_zero(&self) -> bool {
        let one = Monomial::one(self.ring.num_vars());
        (0..self.ambient.len()).all(|v| {
            self.normal_form(&FreeModuleElement::singleton(one.clone(), v, 1))
                .is_zero()
        })
    }

    /// The standard-monomial basis of the degree-`d` piece: monomials of the
    /// ambient free module not divisible by any Groebner lead, coordinates
    /// ascending and monomials descending within a coordinate.
    pub fn graded_basis(&self, d: i64) -> Vec<ModMonomial> {
        let gb = self.gb();
        let mut out = Vec::new();
        for (v, &av) in self.ambient.iter().enumerate() {
            for m in monomials_of_degree(&self.ring, d - av) {
                let reducible = gb.iter().any(|g| {
                    let lt = g.lead().unwrap().0;
                    lt.pos == v && lt.mono.divides(&m)
                });
                if !reducible {
                    out.push(ModMonomial { mono: m, pos: v });
                }
            }
        }
        out
    }

    pub fn dim(&self, d: i64) -> usize {
        self.graded_basis(d).len()
    }

    /// Matrix of multiplication by `x_var` from degree `d` to `d + a_var`
    /// in the standard-monomial bases.
    pub fn mult_map(&self, var: usize, d: i64) -> Mat {
        let src = self.graded_basis(d);
        let dst = self.graded_basis(d + self.ring.weight(var));
        let index: HashMap<&ModMonomial, usize> =
            dst.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = Mat::zero(dst.len(), src.len());
        let xi = self.ring.var_monomial(var);
        for (c, b) in src.iter().enumerate() {
            let e = FreeModuleElement::singleton(b.mono.mul(&xi), b.pos, 1);
            let nf = self.normal_form(&e);
            for (t, coef) in &nf.terms {
                mat[(index[t], c)] = *coef;
            }
        }
        mat
    }

    /// Minimal free resolution, computed once and cached.
    pub fn resolution(&self) -> &FreeResolution {
        self.res.get_or_init(|| self.compute_resolution())
    }

    fn compute_resolution(&self) -> FreeResolution {
        let f = self.ring.field;
        let mut degrees: Vec<Vec<i64>> = vec![self.ambient.clone()];
        let mut maps: Vec<PolyMat> = Vec::new();
        let mut order = ModuleOrder::Top;
        let mut ambient = self.ambient.clone();
        let mut gb = self.gb().to_vec();
        let cap = self.ring.num_vars() + 4;
        let mut step = 0;
        while !gb.is_empty() {
            step += 1;
            assert!(step <= cap, "syzygy chain exceeded the variable bound; this is a bug");
            arrange_for_schreyer(&mut gb);
            let degs: Vec<i64> = gb
                .iter()
                .map(|g| g.uniform_degree(&ambient).expect("syzygies are homogeneous"))
                .collect();
            maps.push(PolyMat::from_columns(f, degrees.last().unwrap().len(), &gb));
            degrees.push(degs.clone());
            let (new_order, syz) = schreyer_syzygies(&self.ring, &order, &gb);
            ambient = degs;
            order = new_order;
            gb = syz;
        }
        minimalize(f, &mut degrees, &mut maps);
        FreeResolution { degrees, maps }
    }

    pub fn betti(&self) -> BettiTable {
        self.resolution().betti()
    }

    /// Castelnuovo-Mumford regularity read off the minimal resolution;
    /// `None` for the zero module.
    pub fn regularity(&self) -> Option<i64> {
        let shift = self.betti().max_shift()?;
        Some(shift + self.ring.num_vars() as i64 - self.ring.total_weight())
    }

    /// Whether `H^0_m(M) = 0`: no nonzero element of `M` in degrees up to
    /// the regularity is killed by every variable. Any nonzero `H^0_m`
    /// contains a socle element, and those live in degrees at most the
    /// regularity, so this scan is complete.
    pub fn h0m_vanishes(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let f = self.ring.field;
        let reg = self.regularity().unwrap();
        let lo = self.ambient.iter().copied().min().unwrap();
        for d in lo..=reg {
            if self.dim(d) == 0 {
                continue;
            }
            let mut stacked: Option<Mat> = None;
            for var in 0..self.ring.num_vars() {
                let m = self.mult_map(var, d);
                stacked = Some(match stacked {
                    None => m,
                    Some(s) => s.vstack(&m),
                });
            }
            if stacked.unwrap().kernel(f).rows > 0 {
                return false;
            }
        }
        true
    }

    /// The truncation `M_{>= c}`, presented by the standard-monomial
    /// generators in degrees `[c, max(c + a_n - 1, max ambient degree)]`
    /// with relations computed by elimination.
    pub fn truncate(&self, c: i64) -> GradedModule {
        let ring = self.ring.clone();
        let f = ring.field;
        let a_n = *ring.weights().last().unwrap();
        let top = self
            .ambient
            .iter()
            .copied()
            .max()
            .map_or(c + a_n - 1, |d| d.max(c + a_n - 1));
        let mut gens: Vec<ModMonomial> = Vec::new();
        let mut gdegs: Vec<i64> = Vec::new();
        for d in c..=top {
            for b in self.graded_basis(d) {
                gens.push(b);
                gdegs.push(d);
            }
        }
        if gens.is_empty() {
            return GradedModule::new(ring, vec![], vec![]).unwrap();
        }
        // tag each generator with a fresh coordinate and eliminate the
        // original ambient block
        let rank_f = self.ambient.len();
        let order = ModuleOrder::Block { cutoff: rank_f };
        let one = Monomial::one(ring.num_vars());
        let mut u: Vec<FreeModuleElement> = self
            .relations
            .iter()
            .map(|r| r.resort(f, &order))
            .collect();
        for (j, g) in gens.iter().enumerate() {
            u.push(FreeModuleElement::from_terms(
                f,
                &order,
                vec![
                    (g.clone(), 1),
                    (ModMonomial { mono: one.clone(), pos: rank_f + j }, f.neg(1)),
                ],
            ));
        }
        let gbu = buchberger(&ring, &order, rank_f + gens.len(), u);
        let mut rels = Vec::new();
        for e in gbu {
            if e.lead().unwrap().0.pos < rank_f {
                continue;
            }
            // in a block order a lead outside the first block means every
            // term is outside it
            debug_assert!(e.terms.iter().all(|(t, _)| t.pos >= rank_f));
            let shifted = e
                .terms
                .iter()
                .map(|(t, c)| (ModMonomial { mono: t.mono.clone(), pos: t.pos - rank_f }, *c))
                .collect();
            rels.push(FreeModuleElement::from_terms(f, &ModuleOrder::Top, shifted));
        }
        GradedModule::new(ring, gdegs, rels).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;

    use crate::testutil::{elliptic, rational, residue_field, ring_112};

    fn dim_s(ring: &WeightedRing, d: i64) -> usize {
        monomials_of_degree(ring, d).len()
    }

    #[test]
    fn koszul_betti() {
        let k = residue_field(&ring_112());
        let betti = k.betti();
        let expected: BTreeMap<(usize, i64), usize> = [
            ((0, 0), 1),
            ((1, 1), 2),
            ((1, 2), 1),
            ((2, 2), 1),
            ((2, 3), 2),
            ((3, 4), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(betti.entries, expected);
    }

    #[test]
    fn regularity_goldens() {
        let s = GradedModule::free(ring_112(), vec![0]);
        assert_eq!(s.regularity(), Some(-1));
        let k = residue_field(&ring_112());
        assert_eq!(k.regularity(), Some(0));
        assert_eq!(elliptic().regularity(), Some(2));
        assert_eq!(rational().regularity(), Some(1));
        let twisted = GradedModule::free(ring_112(), vec![3]);
        assert_eq!(twisted.regularity(), Some(2));
    }

    #[test]
    fn elliptic_dims_and_normal_forms() {
        let m = elliptic();
        let dims: Vec<usize> = (0..=5).map(|d| m.dim(d)).collect();
        assert_eq!(dims, vec![1, 2, 4, 6, 8, 10]);
        let r = &m.ring;
        let f = r.field;
        // lead of the quartic is x0^4, so x2^2 is already reduced
        let x2sq = FreeModuleElement::singleton(r.monomial(&[0, 0, 2]), 0, 1);
        assert_eq!(m.normal_form(&x2sq), x2sq);
        let x04 = FreeModuleElement::singleton(r.monomial(&[4, 0, 0]), 0, 1);
        let nf = m.normal_form(&x04);
        let expected = FreeModuleElement::from_terms(
            f,
            &ModuleOrder::Top,
            vec![
                (ModMonomial { mono: r.monomial(&[0, 4, 0]), pos: 0 }, f.neg(1)),
                (ModMonomial { mono: r.monomial(&[0, 0, 2]), pos: 0 }, f.neg(1)),
            ],
        );
        assert_eq!(nf, expected);
        // multiplication by x0 is injective on the domain
        assert_eq!(m.mult_map(0, 2).rank(f), 4);
    }

    #[test]
    fn resolutions_are_minimal_complexes() {
        for m in [elliptic(), rational(), residue_field(&ring_112())] {
            let res = m.resolution();
            assert_eq!(res.degrees.len(), res.maps.len() + 1);
            for (i, map) in res.maps.iter().enumerate() {
                assert_eq!(map.rows, res.degrees[i].len());
                assert_eq!(map.cols, res.degrees[i + 1].len());
                assert!(!map.has_constant_entry(), "resolution is not minimal");
            }
            for w in res.maps.windows(2) {
                assert!(w[0].mul(m.ring.field, &w[1]).is_zero(), "maps must compose to zero");
            }
        }
    }

    #[test]
    fn hilbert_series_identity() {
        // dim M_d equals the alternating sum of the ambient dimensions of
        // the resolution in each degree
        for m in [elliptic(), rational(), residue_field(&ring_112())] {
            let betti = m.betti();
            for d in 0..=10i64 {
                let mut expected = 0i64;
                for (&(i, j), &b) in &betti.entries {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    expected += sign * (b * dim_s(&m.ring, d - j)) as i64;
                }
                assert_eq!(m.dim(d) as i64, expected, "degree {d}");
            }
        }
    }

    #[test]
    fn truncation_preserves_high_degrees() {
        for (m, c) in [(elliptic(), 2i64), (rational(), 1), (elliptic(), 4)] {
            let t = m.truncate(c);
            for d in (c - 3)..=(c + 6) {
                let expected = if d >= c { m.dim(d) } else { 0 };
                assert_eq!(t.dim(d), expected, "degree {d} truncation at {c}");
            }
            let a_n = *m.ring.weights().last().unwrap();
            assert!(t.ambient.iter().all(|&d| d >= c && d < c + a_n));
        }
    }

    #[test]
    fn h0m_vanishing() {
        assert!(elliptic().h0m_vanishes());
        assert!(GradedModule::free(ring_112(), vec![0]).h0m_vanishes());
        // the residue field is all torsion
        assert!(!residue_field(&ring_112()).h0m_vanishes());
        // S plus a torsion summand
        let r = ring_112();
        let f = r.field;
        let rels = (0..3)
            .map(|i| FreeModuleElement::from_terms(
                f,
                &ModuleOrder::Top,
                vec![(ModMonomial { mono: r.var_monomial(i), pos: 1 }, 1)],
            ))
            .collect();
        let m = GradedModule::new(r, vec![0, 0], rels).unwrap();
        assert!(!m.h0m_vanishes());
    }

    #[test]
    fn zero_module() {
        let r = ring_112();
        let one = Polynomial::constant(r.field, 1, 3);
        let z = GradedModule::quotient_by_ideal(r, vec![one]).unwrap();
        assert!(z.is_zero());
        assert!(z.betti().entries.is_empty());
        assert_eq!(z.regularity(), None);
        assert_eq!(z.dim(0), 0);
        assert!(z.h0m_vanishes());
        let t = z.truncate(3);
        assert!(t.is_zero());
    }

    #[test]
    fn presentation_validation() {
        let r = ring_112();
        let bad = parse_polynomial(&r, "x0 + x2").unwrap();
        assert_eq!(
            GradedModule::quotient_by_ideal(r.clone(), vec![bad]).unwrap_err(),
            ModuleError::InhomogeneousGenerator(0)
        );
        let rel = FreeModuleElement::singleton(Monomial::one(3), 2, 1);
        assert!(matches!(
            GradedModule::new(r, vec![0], vec![rel]).unwrap_err(),
            ModuleError::PositionOutOfRange { index: 0, pos: 2, rank: 1 }
        ));
    }

    #[test]
    fn rational_ideal_membership() {
        let m = rational();
        let r = &m.ring;
        // the product of two generators reduces to zero
        let p = parse_polynomial(r, "(x0*x2 - x1^2)*(x1*x4 - x2*x3)").unwrap();
        let e = FreeModuleElement::from_terms(
            r.field,
            &ModuleOrder::Top,
            p.terms
                .iter()
                .map(|(mo, &c)| (ModMonomial { mono: mo.clone(), pos: 0 }, c))
                .collect(),
        );
        assert!(m.normal_form(&e).is_zero());
        let dims: Vec<usize> = (1..=4).map(|d| m.dim(d)).collect();
        assert_eq!(dims, vec![3, 7, 9, 13]);
    }
}
