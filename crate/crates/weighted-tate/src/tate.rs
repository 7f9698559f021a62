//! Sheaf cohomology over a weighted projective stack, read off a minimal
//! free flag resolution of the BGG window.
//!
//! For the coherent sheaf associated to a graded module `M` over
//! `S = k[x_0..x_n]` with `deg x_i = a_i`, every value `h^i(F(j))` falls
//! into one of three cases once a starting degree `r` at least
//! [`choose_r`] is fixed:
//!
//! * `j ≥ r`: the twisted module is saturated there, so `h^0(F(j))` is
//!   `dim M_j` and the higher cohomology vanishes;
//! * `j < r ≤ i + j`: zero by the choice of `r`;
//! * `i + j < r`: count the generators of twist `ω_E(-j; i+1)` in the
//!   minimal free flag resolving the finite window piece, equivalently the
//!   socle summands of that twist. A generator for `h^i(F(j))` sits in
//!   group index `n - a - i - j`, so running `max(r - i - j)` rounds
//!   covers every requested entry.
//!
//! [`tate_window`] exposes the same resolution in the layout used for
//! corner-complex displays: one column per filtration label
//! `l = c - s + 1`, the resolved summand `ω_E(c; s)` printed with the
//! homological twist it acquires inside the cone, `ω_E(c; s-1)`, followed
//! by the unresolved module columns `M_d ⊗ ω_E(-d; 0)` for
//! `r ≤ d ≤ r + σ - 1`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::bgg::{faithful_floor, finite_piece, FinitePiece};
use crate::dmod::{resolve_twisted_flag, DmodError, FlagOptions, FlagResolution};
use crate::extalg::Twist;
use crate::resolution::GradedModule;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TateError {
    #[error("the module is zero, so there is no sheaf to compute with")]
    ZeroModule,
    #[error("r = {given} is too small; the smallest valid start is {minimum}")]
    InvalidR { given: i64, minimum: i64 },
    #[error("resource limit exceeded: {needed} expanded basis vectors, cap is {cap}")]
    ResourceLimit { needed: usize, cap: usize },
}

/// How a table entry was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    /// `h^0` in a saturated degree: the dimension of `M_j`.
    DimensionCount,
    /// Zero because of the regularity bound (or because `i` exceeds the
    /// ambient dimension).
    RegularityVanishing,
    /// Socle count in the minimal free flag resolution.
    ResolutionSocle,
}

/// The smallest valid starting degree for the window: the regularity, plus
/// one when `M` has finite-length submodule pieces that saturation would
/// discard.
pub fn choose_r(m: &GradedModule) -> Result<i64, TateError> {
    let reg = m.regularity().ok_or(TateError::ZeroModule)?;
    Ok(if m.h0m_vanishes() { reg } else { reg + 1 })
}

#[derive(Clone, Copy, Debug)]
pub struct CohomologyQuery {
    pub j_lo: i64,
    pub j_hi: i64,
    /// Highest cohomological degree to report; defaults to the ambient
    /// dimension `n`.
    pub i_max: Option<usize>,
    /// Start the window at this degree instead of [`choose_r`]; must not
    /// be smaller.
    pub r_override: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    pub weights: Vec<i64>,
    pub p: u64,
    pub r_used: i64,
    pub i_max: usize,
    pub j_lo: i64,
    pub j_hi: i64,
    pub entries: BTreeMap<(usize, i64), (usize, Provenance)>,
}

impl CohomologyTable {
    pub fn h(&self, i: usize, j: i64) -> usize {
        self.entries[&(i, j)].0
    }

    pub fn provenance(&self, i: usize, j: i64) -> Provenance {
        self.entries[&(i, j)].1
    }
}

pub fn sheaf_cohomology(
    m: &GradedModule,
    q: &CohomologyQuery,
) -> Result<CohomologyTable, TateError> {
    sheaf_cohomology_with(m, q, FlagOptions::default())
}

pub fn sheaf_cohomology_with(
    m: &GradedModule,
    q: &CohomologyQuery,
    opts: FlagOptions,
) -> Result<CohomologyTable, TateError> {
    assert!(q.j_lo <= q.j_hi, "empty twist range");
    let ring = &m.ring;
    let n = ring.num_vars() as i64 - 1;
    let r = validated_r(m, q.r_override)?;
    let i_max = q.i_max.unwrap_or(n as usize);

    // One resolution serves every socle entry; it must run far enough to
    // finish the highest group index among them.
    let mut steps = 0usize;
    for i in 0..=i_max as i64 {
        for j in q.j_lo..=q.j_hi {
            if i <= n && j < r && i + j < r {
                steps = steps.max((r - i - j) as usize);
            }
        }
    }
    let res = if steps > 0 { resolve(m, r, steps, opts)? } else { None };

    let a = ring.total_weight();
    let mut entries = BTreeMap::new();
    for i in 0..=i_max as i64 {
        for j in q.j_lo..=q.j_hi {
            let (value, prov) = if i > n {
                (0, Provenance::RegularityVanishing)
            } else if j >= r {
                if i == 0 {
                    (m.dim(j), Provenance::DimensionCount)
                } else {
                    (0, Provenance::RegularityVanishing)
                }
            } else if i + j >= r {
                (0, Provenance::RegularityVanishing)
            } else {
                let count = match &res {
                    Some((_, res)) => {
                        let group = n - a - i - j;
                        assert!(
                            res.covers_group(group),
                            "resolution stopped before group {group}"
                        );
                        res.flag.count_twist(Twist::new(-j, i + 1))
                    }
                    None => 0,
                };
                (count, Provenance::ResolutionSocle)
            };
            entries.insert((i as usize, j), (value, prov));
        }
    }
    Ok(CohomologyTable {
        weights: ring.weights().to_vec(),
        p: ring.field.modulus(),
        r_used: r,
        i_max,
        j_lo: q.j_lo,
        j_hi: q.j_hi,
        entries,
    })
}

fn validated_r(m: &GradedModule, r_override: Option<i64>) -> Result<i64, TateError> {
    let minimum = choose_r(m)?;
    match r_override {
        Some(r) if r < minimum => Err(TateError::InvalidR { given: r, minimum }),
        Some(r) => Ok(r),
        None => Ok(minimum),
    }
}

fn resolve(
    m: &GradedModule,
    r: i64,
    steps: usize,
    mut opts: FlagOptions,
) -> Result<Option<(FinitePiece, FlagResolution)>, TateError> {
    opts.group_floor = Some(faithful_floor(m, r));
    let fp = finite_piece(m, r);
    match resolve_twisted_flag(&fp.dm, steps, opts) {
        Ok(res) => Ok(Some((fp, res))),
        Err(DmodError::NothingToResolve) => Ok(None),
        Err(DmodError::ResourceLimit { needed, cap }) => {
            Err(TateError::ResourceLimit { needed, cap })
        }
    }
}

/// One column of a rendered window, labelled by the filtration index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowColumn {
    pub ell: i64,
    /// Whether this is an unresolved module column on the right-hand side
    /// rather than a resolved flag column.
    pub r_side: bool,
    /// Twist and multiplicity, ordered by descending twist.
    pub pieces: Vec<(Twist, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateWindow {
    pub weights: Vec<i64>,
    pub p: u64,
    pub r: i64,
    pub sigma: i64,
    pub steps: usize,
    /// Columns in descending label order: resolved flag columns first,
    /// then the module columns.
    pub columns: Vec<WindowColumn>,
    /// Filtration drops observed across all differential entries.
    pub jumps: BTreeSet<i64>,
}

pub fn tate_window(
    m: &GradedModule,
    steps: usize,
    r_override: Option<i64>,
) -> Result<TateWindow, TateError> {
    tate_window_with(m, steps, r_override, FlagOptions::default())
}

pub fn tate_window_with(
    m: &GradedModule,
    steps: usize,
    r_override: Option<i64>,
    opts: FlagOptions,
) -> Result<TateWindow, TateError> {
    let ring = &m.ring;
    let sigma = ring.sigma();
    let r = validated_r(m, r_override)?;
    let resolved = resolve(m, r, steps, opts)?;

    let mut columns = Vec::new();
    let mut jumps = BTreeSet::new();
    if let Some((fp, res)) = &resolved {
        let alg = &res.flag.alg;
        for (&group, pieces) in res.flag.pieces_by_group().iter().rev() {
            let mut list: Vec<(Twist, usize)> = pieces
                .iter()
                .map(|(t, &mult)| (Twist::new(t.c, t.s - 1), mult))
                .collect();
            list.sort_by(|x, y| y.0.cmp(&x.0));
            columns.push(WindowColumn { ell: group + sigma + 1, r_side: false, pieces: list });
        }
        // Drops of the flag differential entries are read off the exterior
        // monomials they carry; drops of the comparison map come from the
        // window slots its values touch.
        for h in 0..res.flag.rank() {
            for g in 0..res.flag.rank() {
                for (&u, _) in &res.flag.diff.entry(h, g).terms {
                    jumps.insert(1 + alg.subset_excess(u));
                }
            }
        }
        for (k, gen) in res.flag.gens.iter().enumerate() {
            let Some((basis, _)) = fp.bases.get(&gen.bidegree) else {
                continue;
            };
            let slots = &fp.index.slots[&gen.bidegree];
            for (col, &(_, t, _)) in slots.iter().enumerate() {
                let mut coeff = 0;
                for (row, &c) in res.eps_gens[k].iter().enumerate() {
                    coeff = ring.field.add(coeff, ring.field.mul(c, basis[(row, col)]));
                }
                if coeff != 0 {
                    jumps.insert(1 + alg.subset_excess(t));
                }
            }
        }
    }
    for d in r..=(r + sigma - 1) {
        // A graded piece of M can be zero inside the window; the column is
        // still part of the display, just without a summand.
        let pieces = if m.dim(d) > 0 { vec![(Twist::new(-d, 0), m.dim(d))] } else { Vec::new() };
        columns.push(WindowColumn { ell: -d, r_side: true, pieces });
    }
    columns.sort_by_key(|c| std::cmp::Reverse(c.ell));
    Ok(TateWindow {
        weights: ring.weights().to_vec(),
        p: ring.field.modulus(),
        r,
        sigma,
        steps,
        columns,
        jumps,
    })
}

/// Structural constraints every valid window satisfies: resolved pieces
/// `ω_E(c; s)` obey `c - s > -r` with `0 ≤ s ≤ n`, and every filtration
/// drop lies in `[1, σ + 1]`. Returns one message per violation.
pub fn validate_window(w: &TateWindow) -> Vec<String> {
    let n = w.weights.len() as i64 - 1;
    let mut bad = Vec::new();
    for col in &w.columns {
        if col.r_side {
            continue;
        }
        for &(t, _) in &col.pieces {
            if t.c - t.s <= -w.r {
                bad.push(format!("piece {t} in column l={} violates c - s > -r", col.ell));
            }
            if t.s < 0 || t.s > n {
                bad.push(format!("piece {t} in column l={} has s outside [0, n]", col.ell));
            }
        }
    }
    for &j in &w.jumps {
        if j < 1 || j > w.sigma + 1 {
            bad.push(format!("filtration drop {j} outside [1, sigma + 1]"));
        }
    }
    bad
}
