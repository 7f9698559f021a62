//! The weighted polynomial ring `S = k[x_0..x_n]` with `deg x_i = a_i`.
//!
//! Monomials carry their weighted degree and compare in weighted grevlex:
//! higher weighted degree wins, ties break by the reverse-lexicographic rule
//! (the monomial with the smaller exponent at the last differing variable is
//! the larger one, so `x_n` is the smallest variable). Module monomials are
//! ordered by a runtime [`ModuleOrder`] so the same Groebner routine serves
//! the term-over-position, elimination and Schreyer orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::PrimeField;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("need at least one variable")]
    NoVariables,
    #[error("weight {0} is not positive")]
    NonPositiveWeight(i64),
    #[error("weights must be sorted nondecreasing")]
    UnsortedWeights,
    #[error("expected {expected} variable names, got {got}")]
    VariableCountMismatch { expected: usize, got: usize },
    #[error("duplicate variable name {0:?}")]
    DuplicateVariable(String),
}

/// The graded ring `S`. Weights must be positive and sorted nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedRing {
    pub field: PrimeField,
    weights: Vec<i64>,
    var_names: Vec<String>,
}

impl WeightedRing {
    pub fn new(field: PrimeField, weights: Vec<i64>) -> Result<Self, RingError> {
        let names = (0..weights.len()).map(|i| format!("x{i}")).collect();
        Self::with_var_names(field, weights, names)
    }

    pub fn with_var_names(
        field: PrimeField,
        weights: Vec<i64>,
        var_names: Vec<String>,
    ) -> Result<Self, RingError> {
        if weights.is_empty() {
            return Err(RingError::NoVariables);
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 1) {
            return Err(RingError::NonPositiveWeight(w));
        }
        if weights.windows(2).any(|w| w[0] > w[1]) {
            return Err(RingError::UnsortedWeights);
        }
        if var_names.len() != weights.len() {
            return Err(RingError::VariableCountMismatch {
                expected: weights.len(),
                got: var_names.len(),
            });
        }
        for (i, name) in var_names.iter().enumerate() {
            if var_names[..i].contains(name) {
                return Err(RingError::DuplicateVariable(name.clone()));
            }
        }
        Ok(WeightedRing { field, weights, var_names })
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.weights[i]
    }

    /// Sum of the weights, written `a` throughout.
    pub fn total_weight(&self) -> i64 {
        self.weights.iter().sum()
    }

    /// `sigma = a - (n+1)`, the index shift between `S` and its Koszul dual.
    pub fn sigma(&self) -> i64 {
        self.total_weight() - self.num_vars() as i64
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn find_var(&self, name: &str) -> Option<usize> {
        self.var_names.iter().position(|v| v == name)
    }

    pub fn monomial(&self, exps: &[u32]) -> Monomial {
        assert_eq!(exps.len(), self.num_vars(), "exponent vector length");
        let wdeg = exps
            .iter()
            .zip(&self.weights)
            .map(|(&e, &w)| e as i64 * w)
            .sum();
        Monomial { exps: exps.to_vec(), wdeg }
    }

    pub fn var_monomial(&self, i: usize) -> Monomial {
        let mut exps = vec![0u32; self.num_vars()];
        exps[i] = 1;
        Monomial { exps, wdeg: self.weights[i] }
    }

    pub fn lcm(&self, a: &Monomial, b: &Monomial) -> Monomial {
        let exps: Vec<u32> = a
            .exps
            .iter()
            .zip(&b.exps)
            .map(|(&x, &y)| x.max(y))
            .collect();
        self.monomial(&exps)
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, &e) in m.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(self.var_names[i].clone());
            } else {
                parts.push(format!("{}^{}", self.var_names[i], e));
            }
        }
        parts.join("*")
    }

    /// Render with coefficients lifted to `(-p/2, p/2]` so small negative
    /// values print as such. Output parses back to the same polynomial.
    pub fn poly_string(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let modulus = self.field.modulus();
        let mut out = String::new();
        for (idx, (m, &c)) in p.terms.iter().rev().enumerate() {
            let lift = signed_lift(modulus, c);
            let neg = lift < 0;
            let mag = lift.unsigned_abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else if mag == 1 {
                out.push_str(&self.monomial_string(m));
            } else {
                out.push_str(&mag.to_string());
                out.push('*');
                out.push_str(&self.monomial_string(m));
            }
        }
        out
    }
}

/// Lift a field element to the signed representative in `(-p/2, p/2]`.
pub fn signed_lift(p: u64, c: u64) -> i64 {
    if c > p / 2 {
        -((p - c) as i64)
    } else {
        c as i64
    }
}

/// A monomial with cached weighted degree. Ordering is weighted grevlex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
    wdeg: i64,
}

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial { exps: vec![0; num_vars], wdeg: 0 }
    }

    pub fn is_one(&self) -> bool {
        self.wdeg == 0
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn wdeg(&self) -> i64 {
        self.wdeg
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a + b)
                .collect(),
            wdeg: self.wdeg + other.wdeg,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(&a, &b)| a <= b)
    }

    /// Pure lexicographic comparison with `x_0` the biggest variable. Only
    /// used to arrange Groebner bases before a Schreyer step; the active
    /// term order is always weighted grevlex.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        for k in 0..self.exps.len() {
            if self.exps[k] != other.exps[k] {
                return self.exps[k].cmp(&other.exps[k]);
            }
        }
        Ordering::Equal
    }

    /// `self / other`, if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if other.divides(self) {
            Some(Monomial {
                exps: self
                    .exps
                    .iter()
                    .zip(&other.exps)
                    .map(|(&a, &b)| a - b)
                    .collect(),
                wdeg: self.wdeg - other.wdeg,
            })
        } else {
            None
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.wdeg.cmp(&other.wdeg).then_with(|| {
            for k in (0..self.exps.len()).rev() {
                if self.exps[k] != other.exps[k] {
                    // smaller exponent at the last differing spot wins
                    return other.exps[k].cmp(&self.exps[k]);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of weighted degree `d`, in descending order.
pub fn monomials_of_degree(ring: &WeightedRing, d: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if d < 0 {
        return out;
    }
    let n = ring.num_vars();
    let mut exps = vec![0u32; n];
    fn rec(
        ring: &WeightedRing,
        idx: usize,
        remaining: i64,
        exps: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == ring.num_vars() {
            if remaining == 0 {
                out.push(ring.monomial(exps));
            }
            return;
        }
        let w = ring.weight(idx);
        let max = remaining / w;
        for e in 0..=max {
            exps[idx] = e as u32;
            rec(ring, idx + 1, remaining - e * w, exps, out);
        }
        exps[idx] = 0;
    }
    rec(ring, 0, d, &mut exps, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// A polynomial with canonical nonzero coefficients, keyed ascending by
/// monomial so the lead term is the last entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    pub terms: BTreeMap<Monomial, u64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant(f: PrimeField, c: i64, num_vars: usize) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(f, Monomial::one(num_vars), f.normalize(c));
        p
    }

    pub fn var(ring: &WeightedRing, i: usize) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(ring.field, ring.var_monomial(i), 1);
        p
    }

    pub fn add_term(&mut self, f: PrimeField, mono: Monomial, c: u64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn lead(&self) -> Option<(&Monomial, u64)> {
        self.terms.last_key_value().map(|(m, &c)| (m, c))
    }

    pub fn add(&self, f: PrimeField, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(f, m.clone(), c);
        }
        out
    }

    pub fn neg(&self, f: PrimeField) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), f.neg(c))).collect(),
        }
    }

    pub fn sub(&self, f: PrimeField, other: &Polynomial) -> Polynomial {
        self.add(f, &other.neg(f))
    }

    pub fn scale(&self, f: PrimeField, c: u64) -> Polynomial {
        if c == 0 {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, &x)| (m.clone(), f.mul(x, c))).collect(),
        }
    }

    pub fn mul_term(&self, f: PrimeField, mono: &Monomial, c: u64) -> Polynomial {
        if c == 0 {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, &x)| (m.mul(mono), f.mul(x, c)))
                .collect(),
        }
    }

    pub fn mul(&self, f: PrimeField, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, &c) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(f, m.mul(m2), f.mul(c, c2));
            }
        }
        out
    }

    pub fn pow(&self, f: PrimeField, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(f, 1, self.num_vars_hint());
        for _ in 0..e {
            out = out.mul(f, self);
        }
        out
    }

    fn num_vars_hint(&self) -> usize {
        self.terms.keys().next().map_or(0, |m| m.exps.len())
    }

    /// The value of a nonzero constant polynomial, `None` otherwise.
    pub fn constant_value(&self) -> Option<u64> {
        if self.terms.len() == 1 {
            let (m, &c) = self.terms.first_key_value().unwrap();
            if m.is_one() {
                return Some(c);
            }
        }
        None
    }

    /// The common weighted degree of all terms, or `None` if the polynomial
    /// is zero or inhomogeneous.
    pub fn uniform_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let first = it.next()?.wdeg;
        if it.all(|m| m.wdeg == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.uniform_degree().is_some()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |ch: char, line: &mut usize, col: &mut usize| {
            if ch == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_digit() {
            let mut val: u64 = 0;
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                val = val
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as u64 - '0' as u64))
                    .ok_or(ParseError {
                        line: tline,
                        col: tcol,
                        msg: "integer literal too large".into(),
                    })?;
                chars.next();
                bump(d, &mut line, &mut col);
            }
            out.push(Lexed { tok: Tok::Int(val), line: tline, col: tcol });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                name.push(d);
                chars.next();
                bump(d, &mut line, &mut col);
            }
            out.push(Lexed { tok: Tok::Ident(name), line: tline, col: tcol });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        };
        chars.next();
        bump(c, &mut line, &mut col);
        out.push(Lexed { tok, line: tline, col: tcol });
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a WeightedRing,
    toks: Vec<Lexed>,
    at: usize,
    end_line: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|l| &l.tok)
    }

    fn pos(&self) -> (usize, usize) {
        self.toks
            .get(self.at)
            .map_or((self.end_line, self.end_col), |l| (l.line, l.col))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.pos();
        ParseError { line, col, msg: msg.into() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let f = self.ring.field;
        let mut acc = Polynomial::zero();
        let mut negate = false;
        if self.eat(&Tok::Minus) {
            negate = true;
        } else {
            self.eat(&Tok::Plus);
        }
        loop {
            let t = self.term()?;
            acc = if negate { acc.sub(f, &t) } else { acc.add(f, &t) };
            if self.eat(&Tok::Plus) {
                negate = false;
            } else if self.eat(&Tok::Minus) {
                negate = true;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.factor()?;
            acc = acc.mul(self.ring.field, &rhs);
        }
        Ok(acc)
    }

    // factor := atom ('^' integer)*
    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.atom()?;
        while self.eat(&Tok::Caret) {
            let e = match self.peek() {
                Some(&Tok::Int(v)) => {
                    let e: u32 = v
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    self.at += 1;
                    e
                }
                _ => return Err(self.err("expected integer exponent after '^'")),
            };
            acc = acc.pow(self.ring.field, e);
        }
        Ok(acc)
    }

    // atom := ident | integer | '(' expr ')'
    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                let Some(v) = self.ring.find_var(&name) else {
                    return Err(self.err(format!("unknown variable {name:?}")));
                };
                self.at += 1;
                Ok(Polynomial::var(self.ring, v))
            }
            Some(Tok::Int(v)) => {
                self.at += 1;
                let c = self.ring.field.normalize_u64(v);
                let mut p = Polynomial::zero();
                p.add_term(self.ring.field, Monomial::one(self.ring.num_vars()), c);
                Ok(p)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            _ => Err(self.err("expected a variable, number or '('")),
        }
    }
}

pub fn parse_polynomial(ring: &WeightedRing, src: &str) -> Result<Polynomial, ParseError> {
    let toks = lex(src)?;
    let end_line = 1 + src.matches('\n').count();
    let end_col = 1 + src.rsplit('\n').next().unwrap_or("").chars().count();
    let mut p = Parser { ring, toks, at: 0, end_line, end_col };
    let poly = p.expr()?;
    if p.at != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(poly)
}

/// A monomial in a free module: a ring monomial sitting in coordinate `pos`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModMonomial {
    pub mono: Monomial,
    pub pos: usize,
}

/// Term orders on free-module monomials, chosen at runtime.
#[derive(Debug, Clone)]
pub enum ModuleOrder {
    /// Term over position; ties go to the lower coordinate.
    Top,
    /// Coordinates below `cutoff` dominate everything else (elimination
    /// order); within a block, term over position.
    Block { cutoff: usize },
    /// Schreyer order induced by the map sending the basis element at `pos`
    /// to `leads[pos]`: compare images under `base`, ties to the lower
    /// coordinate.
    Schreyer { base: Box<ModuleOrder>, leads: Vec<ModMonomial> },
}

impl ModuleOrder {
    pub fn cmp(&self, a: &ModMonomial, b: &ModMonomial) -> Ordering {
        match self {
            ModuleOrder::Top => a.mono.cmp(&b.mono).then_with(|| b.pos.cmp(&a.pos)),
            ModuleOrder::Block { cutoff } => {
                match (a.pos < *cutoff, b.pos < *cutoff) {
                    (true, false) => Ordering::Greater,
                    (false, true) => Ordering::Less,
                    _ => a.mono.cmp(&b.mono).then_with(|| b.pos.cmp(&a.pos)),
                }
            }
            ModuleOrder::Schreyer { base, leads } => {
                let ia = ModMonomial {
                    mono: a.mono.mul(&leads[a.pos].mono),
                    pos: leads[a.pos].pos,
                };
                let ib = ModMonomial {
                    mono: b.mono.mul(&leads[b.pos].mono),
                    pos: leads[b.pos].pos,
                };
                base.cmp(&ia, &ib).then_with(|| b.pos.cmp(&a.pos))
            }
        }
    }
}

/// An element of a free module, terms sorted strictly descending in the
/// active order with nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeModuleElement {
    pub terms: Vec<(ModMonomial, u64)>,
}

impl FreeModuleElement {
    pub fn zero() -> Self {
        FreeModuleElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn singleton(mono: Monomial, pos: usize, c: u64) -> Self {
        if c == 0 {
            return FreeModuleElement::zero();
        }
        FreeModuleElement { terms: vec![(ModMonomial { mono, pos }, c)] }
    }

    pub fn from_terms(
        f: PrimeField,
        order: &ModuleOrder,
        mut terms: Vec<(ModMonomial, u64)>,
    ) -> Self {
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<(ModMonomial, u64)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => {
                    *lc = f.add(*lc, c);
                    if *lc == 0 {
                        out.pop();
                    }
                }
                _ => {
                    if c != 0 {
                        out.push((m, c));
                    }
                }
            }
        }
        FreeModuleElement { terms: out }
    }

    pub fn lead(&self) -> Option<(&ModMonomial, u64)> {
        self.terms.first().map(|(m, c)| (m, *c))
    }

    pub fn scale(&self, f: PrimeField, c: u64) -> Self {
        if c == 0 {
            return FreeModuleElement::zero();
        }
        FreeModuleElement {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), f.mul(*x, c))).collect(),
        }
    }

    /// Multiply every term by a ring monomial. All our orders respect
    /// monomial multiplication, so sortedness is preserved.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        FreeModuleElement {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (ModMonomial { mono: t.mono.mul(m), pos: t.pos }, *c))
                .collect(),
        }
    }

    /// `self + c * m * other`, merging the two sorted term lists.
    pub fn add_scaled_mul(
        &self,
        f: PrimeField,
        order: &ModuleOrder,
        other: &FreeModuleElement,
        c: u64,
        m: &Monomial,
    ) -> Self {
        if c == 0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = if i == self.terms.len() {
                false
            } else if j == other.terms.len() {
                true
            } else {
                let rm = ModMonomial {
                    mono: other.terms[j].0.mono.mul(m),
                    pos: other.terms[j].0.pos,
                };
                match order.cmp(&self.terms[i].0, &rm) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => {
                        let s = f.add(self.terms[i].1, f.mul(c, other.terms[j].1));
                        if s != 0 {
                            out.push((self.terms[i].0.clone(), s));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                }
            };
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else {
                let (t, x) = &other.terms[j];
                out.push((
                    ModMonomial { mono: t.mono.mul(m), pos: t.pos },
                    f.mul(c, *x),
                ));
                j += 1;
            }
        }
        FreeModuleElement { terms: out }
    }

    pub fn add(&self, f: PrimeField, order: &ModuleOrder, other: &FreeModuleElement) -> Self {
        self.add_scaled_mul(f, order, other, 1, &Monomial::one(self.num_vars_hint(other)))
    }

    pub fn sub(&self, f: PrimeField, order: &ModuleOrder, other: &FreeModuleElement) -> Self {
        self.add_scaled_mul(
            f,
            order,
            other,
            f.neg(1),
            &Monomial::one(self.num_vars_hint(other)),
        )
    }

    fn num_vars_hint(&self, other: &FreeModuleElement) -> usize {
        self.terms
            .first()
            .or_else(|| other.terms.first())
            .map_or(0, |(t, _)| t.mono.exps.len())
    }

    /// Re-sort under a different order.
    pub fn resort(&self, f: PrimeField, order: &ModuleOrder) -> Self {
        FreeModuleElement::from_terms(f, order, self.terms.clone())
    }

    /// The common degree of all terms given the ambient coordinate degrees,
    /// or `None` if zero or inhomogeneous.
    pub fn uniform_degree(&self, ambient: &[i64]) -> Option<i64> {
        let mut it = self.terms.iter();
        let (t, _) = it.next()?;
        let d = t.mono.wdeg() + ambient[t.pos];
        if it.all(|(t, _)| t.mono.wdeg() + ambient[t.pos] == d) {
            Some(d)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring_112() -> WeightedRing {
        WeightedRing::new(PrimeField::new(32003).unwrap(), vec![1, 1, 2]).unwrap()
    }

    #[test]
    fn ring_validation() {
        let f = PrimeField::new(32003).unwrap();
        assert_eq!(WeightedRing::new(f, vec![]), Err(RingError::NoVariables));
        assert_eq!(
            WeightedRing::new(f, vec![1, 0]),
            Err(RingError::NonPositiveWeight(0))
        );
        assert_eq!(
            WeightedRing::new(f, vec![2, 1]),
            Err(RingError::UnsortedWeights)
        );
        assert!(WeightedRing::new(f, vec![1, 1, 2]).is_ok());
        assert_eq!(
            WeightedRing::with_var_names(f, vec![1, 1], vec!["x".into(), "x".into()]),
            Err(RingError::DuplicateVariable("x".into()))
        );
    }

    #[test]
    fn sigma_and_total_weight() {
        let r = ring_112();
        assert_eq!(r.total_weight(), 4);
        assert_eq!(r.sigma(), 1);
    }

    #[test]
    fn grevlex_order_example() {
        // degree-2 monomials of P(1,1,2), descending
        let r = ring_112();
        let ms = monomials_of_degree(&r, 2);
        let strs: Vec<String> = ms.iter().map(|m| r.monomial_string(m)).collect();
        assert_eq!(strs, vec!["x0^2", "x0*x1", "x1^2", "x2"]);
    }

    #[test]
    fn monomial_counts_match_hilbert_series() {
        // dp for the coefficients of prod 1/(1-t^a_i)
        let f = PrimeField::new(32003).unwrap();
        for weights in [vec![1, 1, 2], vec![1, 2, 3], vec![1, 1, 1, 2, 2]] {
            let r = WeightedRing::new(f, weights.clone()).unwrap();
            let top = 12usize;
            let mut coeff = vec![0u64; top + 1];
            coeff[0] = 1;
            for &w in &weights {
                for d in w as usize..=top {
                    coeff[d] += coeff[d - w as usize];
                }
            }
            for d in 0..=top {
                assert_eq!(
                    monomials_of_degree(&r, d as i64).len() as u64,
                    coeff[d],
                    "weights {weights:?} degree {d}"
                );
            }
        }
        assert_eq!(monomials_of_degree(&ring_112(), 4).len(), 9);
        assert_eq!(monomials_of_degree(&ring_112(), -1).len(), 0);
        assert_eq!(monomials_of_degree(&ring_112(), 0).len(), 1);
    }

    #[test]
    fn monomial_division() {
        let r = ring_112();
        let a = r.monomial(&[2, 1, 1]);
        let b = r.monomial(&[1, 0, 1]);
        assert!(b.divides(&a));
        assert_eq!(a.checked_div(&b), Some(r.monomial(&[1, 1, 0])));
        assert_eq!(b.checked_div(&a), None);
        assert_eq!(r.lcm(&a, &b), a.clone());
        assert_eq!(a.wdeg(), 5);
    }

    #[test]
    fn parse_basic() {
        let r = ring_112();
        let p = parse_polynomial(&r, "x0^4 + x1^4 + x2^2").unwrap();
        assert_eq!(p.terms.len(), 3);
        assert_eq!(p.uniform_degree(), Some(4));
        let q = parse_polynomial(&r, "(x0 + x1)^2 - x0^2 - x1^2 - 2*x0*x1").unwrap();
        assert!(q.is_zero());
        let s = parse_polynomial(&r, "-x0*x1 + 3").unwrap();
        assert_eq!(r.poly_string(&s), "-x0*x1 + 3");
    }

    #[test]
    fn parse_error_positions() {
        let r = ring_112();
        let e = parse_polynomial(&r, "x0 + @").unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
        let e = parse_polynomial(&r, "x0 +\n y^2").unwrap_err();
        assert_eq!((e.line, e.col), (2, 2));
        assert!(e.msg.contains("unknown variable"));
        let e = parse_polynomial(&r, "x0 +").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        let e = parse_polynomial(&r, "x0 x1").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        assert!(e.msg.contains("trailing"));
        let e = parse_polynomial(&r, "(x0 + x1").unwrap_err();
        assert!(e.msg.contains("')'"));
    }

    #[test]
    fn display_examples() {
        let r = ring_112();
        let p = parse_polynomial(&r, "x2^2 - x0^4 - 2").unwrap();
        assert_eq!(r.poly_string(&p), "-x0^4 + x2^2 - 2");
        assert_eq!(r.poly_string(&Polynomial::zero()), "0");
        let one = Polynomial::constant(r.field, 1, 3);
        assert_eq!(r.poly_string(&one), "1");
    }

    #[test]
    fn module_order_top_ties_to_lower_pos() {
        let r = ring_112();
        let m = r.monomial(&[1, 0, 0]);
        let a = ModMonomial { mono: m.clone(), pos: 0 };
        let b = ModMonomial { mono: m, pos: 1 };
        assert_eq!(ModuleOrder::Top.cmp(&a, &b), Ordering::Greater);
        let big = ModMonomial { mono: r.monomial(&[0, 0, 1]), pos: 5 };
        let small = ModMonomial { mono: r.monomial(&[1, 0, 0]), pos: 0 };
        assert_eq!(ModuleOrder::Top.cmp(&big, &small), Ordering::Greater);
    }

    #[test]
    fn module_order_block_dominates() {
        let r = ring_112();
        let ord = ModuleOrder::Block { cutoff: 2 };
        let lo = ModMonomial { mono: r.monomial(&[5, 5, 5]), pos: 3 };
        let hi = ModMonomial { mono: Monomial::one(3), pos: 1 };
        assert_eq!(ord.cmp(&hi, &lo), Ordering::Greater);
        assert_eq!(ord.cmp(&lo, &hi), Ordering::Less);
    }

    #[test]
    fn module_order_schreyer() {
        let r = ring_112();
        // basis element 0 maps to x0*e0, basis element 1 maps to x1*e0
        let leads = vec![
            ModMonomial { mono: r.monomial(&[1, 0, 0]), pos: 0 },
            ModMonomial { mono: r.monomial(&[0, 1, 0]), pos: 0 },
        ];
        let ord = ModuleOrder::Schreyer { base: Box::new(ModuleOrder::Top), leads };
        // x1*eps_0 maps to x0*x1, x0*eps_1 maps to x0*x1: tie, lower pos wins
        let a = ModMonomial { mono: r.monomial(&[0, 1, 0]), pos: 0 };
        let b = ModMonomial { mono: r.monomial(&[1, 0, 0]), pos: 1 };
        assert_eq!(ord.cmp(&a, &b), Ordering::Greater);
        // eps_0 maps to x0 > eps_1's image x1
        let a = ModMonomial { mono: Monomial::one(3), pos: 0 };
        let b = ModMonomial { mono: Monomial::one(3), pos: 1 };
        assert_eq!(ord.cmp(&a, &b), Ordering::Greater);
    }

    #[test]
    fn free_module_element_merge() {
        let r = ring_112();
        let f = r.field;
        let ord = ModuleOrder::Top;
        let e1 = FreeModuleElement::singleton(r.monomial(&[1, 0, 0]), 0, 1);
        let e2 = FreeModuleElement::singleton(r.monomial(&[0, 1, 0]), 0, 2);
        let s = e1.add(f, &ord, &e2);
        assert_eq!(s.terms.len(), 2);
        assert_eq!(s.lead().unwrap().0.mono, r.monomial(&[1, 0, 0]));
        let d = s.sub(f, &ord, &s);
        assert!(d.is_zero());
        // self + (-1)*1*self cancels via add_scaled_mul too
        let z = s.add_scaled_mul(f, &ord, &s, f.neg(1), &Monomial::one(3));
        assert!(z.is_zero());
        let shifted = s.mul_monomial(&r.monomial(&[0, 0, 1]));
        assert_eq!(shifted.uniform_degree(&[0]), Some(3));
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(
            terms in proptest::collection::vec(
                (proptest::collection::vec(0u32..4, 3), 0u64..32003),
                0..6,
            )
        ) {
            let r = ring_112();
            let mut p = Polynomial::zero();
            for (exps, c) in terms {
                p.add_term(r.field, r.monomial(&exps), c);
            }
            let s = r.poly_string(&p);
            let q = parse_polynomial(&r, &s).unwrap();
            prop_assert_eq!(p, q);
        }
    }
}
