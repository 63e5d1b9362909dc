//! Sparse multivariate polynomials over `Z/2^d`.
//!
//! A [`PolyRing`] fixes the width, the variable names and the monomial
//! ordering; every [`Poly`] keeps a shared handle to its ring and stores its
//! terms strictly descending in that ordering, with no zero coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;
use thiserror::Error;

use crate::ring::ResidueInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("monomials have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("the zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("no value for variable `{0}`")]
    MissingVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid variable priority")]
    InvalidPriority,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Exponent vector `x1^a1 * ... * xn^an`, indexed by ring variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn var(nvars: usize, idx: usize, exp: u32) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = exp;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn check_len(&self, other: &Monomial) -> Result<(), PolyError> {
        if self.0.len() == other.0.len() {
            Ok(())
        } else {
            Err(PolyError::LengthMismatch(self.0.len(), other.0.len()))
        }
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> Result<bool, PolyError> {
        self.check_len(other)?;
        Ok(self.divides_unchecked(other))
    }

    pub(crate) fn divides_unchecked(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        self.check_len(other)?;
        Ok(Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        ))
    }

    pub fn gcd(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        self.check_len(other)?;
        Ok(Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        ))
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`, assuming `other | self`.
    pub(crate) fn div_unchecked(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Lex,
    /// Lexicographic comparison of `(total degree, a1, ..., an)`.
    GradedLex,
    /// The `block` highest-priority variables are compared first (graded),
    /// the remaining ones only break ties (graded). Used to eliminate primed
    /// variables in transition ideals.
    Elimination {
        block: usize,
    },
}

/// A well-ordered, multiplication-compatible monomial ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrdering {
    kind: OrderKind,
    /// `priority[0]` is the most significant variable.
    priority: Vec<usize>,
}

impl MonomialOrdering {
    pub fn new(kind: OrderKind, nvars: usize) -> Self {
        MonomialOrdering {
            kind,
            priority: (0..nvars).collect(),
        }
    }

    pub fn lex(nvars: usize) -> Self {
        Self::new(OrderKind::Lex, nvars)
    }

    pub fn graded_lex(nvars: usize) -> Self {
        Self::new(OrderKind::GradedLex, nvars)
    }

    pub fn with_priority(kind: OrderKind, priority: Vec<usize>) -> Result<Self, PolyError> {
        let mut seen = vec![false; priority.len()];
        for &p in &priority {
            if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                return Err(PolyError::InvalidPriority);
            }
        }
        Ok(MonomialOrdering { kind, priority })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn priority(&self) -> &[usize] {
        &self.priority
    }

    fn lex_on(&self, ranks: &[usize], a: &Monomial, b: &Monomial) -> Ordering {
        for &v in ranks {
            match a.0[v].cmp(&b.0[v]) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    fn graded_on(&self, ranks: &[usize], a: &Monomial, b: &Monomial) -> Ordering {
        let da: u32 = ranks.iter().map(|&v| a.0[v]).sum();
        let db: u32 = ranks.iter().map(|&v| b.0[v]).sum();
        da.cmp(&db).then_with(|| self.lex_on(ranks, a, b))
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.kind {
            OrderKind::Lex => self.lex_on(&self.priority, a, b),
            OrderKind::GradedLex => self.graded_on(&self.priority, a, b),
            OrderKind::Elimination { block } => {
                let (hi, lo) = self.priority.split_at(block.min(self.priority.len()));
                self.graded_on(hi, a, b)
                    .then_with(|| self.graded_on(lo, a, b))
            }
        }
    }

    /// Ordering on `nvars + extra` variables where the new ones rank lowest.
    fn extended(&self, extra: usize) -> Self {
        let n = self.priority.len();
        let mut priority = self.priority.clone();
        priority.extend(n..n + extra);
        MonomialOrdering {
            kind: self.kind,
            priority,
        }
    }
}

/// Coefficient ring width, variable names and ordering shared by polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    width: u32,
    vars: Vec<String>,
    order: MonomialOrdering,
}

impl PolyRing {
    pub fn new(width: u32, vars: Vec<String>, order: MonomialOrdering) -> Arc<Self> {
        assert_eq!(vars.len(), order.priority.len(), "ordering arity mismatch");
        assert!(width > 0, "width must be positive");
        Arc::new(PolyRing { width, vars, order })
    }

    /// Ring with the default graded-lex ordering in declaration order.
    pub fn with_vars<S: AsRef<str>>(width: u32, vars: &[S]) -> Arc<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let order = MonomialOrdering::graded_lex(vars.len());
        Self::new(width, vars, order)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> &MonomialOrdering {
        &self.order
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Same ring with extra variables appended at the lowest priority.
    pub fn extend(&self, extra: &[String]) -> Arc<PolyRing> {
        let mut vars = self.vars.clone();
        vars.extend(extra.iter().cloned());
        Arc::new(PolyRing {
            width: self.width,
            vars,
            order: self.order.extended(extra.len()),
        })
    }

    pub fn with_order(&self, order: MonomialOrdering) -> Arc<PolyRing> {
        Self::new(self.width, self.vars.clone(), order)
    }

    pub fn residue(&self, v: u64) -> ResidueInt {
        ResidueInt::from_u64(v, self.width)
    }
}

fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub coeff: ResidueInt,
    pub mono: Monomial,
}

/// A polynomial over `Z/2^d` in the variables of its ring.
#[derive(Clone)]
pub struct Poly {
    ring: Arc<PolyRing>,
    terms: Vec<Term>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ring: &Arc<PolyRing>) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: ResidueInt) -> Poly {
        Self::monomial(ring, c, Monomial::one(ring.nvars()))
    }

    pub fn from_u64(ring: &Arc<PolyRing>, c: u64) -> Poly {
        Self::constant(ring, ring.residue(c))
    }

    pub fn from_i64(ring: &Arc<PolyRing>, c: i64) -> Poly {
        Self::constant(ring, ResidueInt::from_i64(c, ring.width))
    }

    pub fn var(ring: &Arc<PolyRing>, idx: usize) -> Poly {
        Self::monomial(ring, ring.residue(1), Monomial::var(ring.nvars(), idx, 1))
    }

    pub fn var_named(ring: &Arc<PolyRing>, name: &str) -> Result<Poly, PolyError> {
        let idx = ring
            .var_index(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(ring, idx))
    }

    pub fn monomial(ring: &Arc<PolyRing>, c: ResidueInt, mono: Monomial) -> Poly {
        debug_assert_eq!(c.width(), ring.width);
        debug_assert_eq!(mono.nvars(), ring.nvars());
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![Term { coeff: c, mono }]
        };
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    /// Normalizes an arbitrary list of terms: merges duplicates, drops zeros
    /// and sorts descending.
    pub fn from_terms<I>(ring: &Arc<PolyRing>, terms: I) -> Poly
    where
        I: IntoIterator<Item = (ResidueInt, Monomial)>,
    {
        let mut acc: HashMap<Monomial, ResidueInt> = HashMap::new();
        for (c, m) in terms {
            debug_assert_eq!(m.nvars(), ring.nvars());
            match acc.get_mut(&m) {
                Some(v) => *v = &*v + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, coeff)| Term { coeff, mono })
            .collect();
        let order = &ring.order;
        terms.sort_by(|a, b| order.cmp(&b.mono, &a.mono));
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn width(&self) -> u32 {
        self.ring.width
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.mono.is_one())
    }

    /// The value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<ResidueInt> {
        match self.terms.as_slice() {
            [] => Some(ResidueInt::zero(self.width())),
            [t] if t.mono.is_one() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.mono)
    }

    pub fn leading_coeff(&self) -> Option<&ResidueInt> {
        self.terms.first().map(|t| &t.coeff)
    }

    /// `(lt(f), lm(f), lc(f))`.
    pub fn leading(&self) -> Result<(Term, Monomial, ResidueInt), PolyError> {
        let t = self.terms.first().ok_or(PolyError::ZeroPolynomial)?;
        Ok((t.clone(), t.mono.clone(), t.coeff.clone()))
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.mono.degree())
            .max()
            .unwrap_or(0)
    }

    /// Indices of variables that occur with a positive exponent.
    pub fn variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.ring.nvars()];
        for t in &self.terms {
            for (i, &e) in t.mono.0.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        used.iter()
            .enumerate()
            .filter_map(|(i, &u)| u.then_some(i))
            .collect()
    }

    pub fn contains_var(&self, idx: usize) -> bool {
        self.terms.iter().any(|t| t.mono.0[idx] > 0)
    }

    fn check(&self, other: &Poly) -> Result<(), PolyError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let order = &self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let fix = |t: &Term| {
            if negate {
                Term {
                    coeff: -&t.coeff,
                    mono: t.mono.clone(),
                }
            } else {
                t.clone()
            }
        };
        while i < a.len() && j < b.len() {
            match order.cmp(&a[i].mono, &b[j].mono) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(fix(&b[j]));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].coeff - &b[j].coeff
                    } else {
                        &a[i].coeff + &b[j].coeff
                    };
                    if !c.is_zero() {
                        out.push(Term {
                            coeff: c,
                            mono: a[i].mono.clone(),
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(fix));
        Poly {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let mut acc: BTreeMap<Monomial, ResidueInt> = BTreeMap::new();
        for s in &self.terms {
            for t in &other.terms {
                let c = &s.coeff * &t.coeff;
                if c.is_zero() {
                    continue;
                }
                let m = s.mono.mul_unchecked(&t.mono);
                match acc.get_mut(&m) {
                    Some(v) => *v = &*v + &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(Poly::from_terms(
            &self.ring,
            acc.into_iter().map(|(m, c)| (c, m)),
        ))
    }

    /// `c * m * self`.
    pub fn mul_term(&self, c: &ResidueInt, m: &Monomial) -> Poly {
        let order = &self.ring.order;
        let terms: Vec<Term> = self
            .terms
            .iter()
            .filter_map(|t| {
                let coeff = &t.coeff * c;
                (!coeff.is_zero()).then(|| Term {
                    coeff,
                    mono: t.mono.mul_unchecked(m),
                })
            })
            .collect();
        debug_assert!(terms
            .windows(2)
            .all(|w| order.cmp(&w[0].mono, &w[1].mono) == Ordering::Greater));
        Poly {
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &ResidueInt) -> Poly {
        self.mul_term(c, &Monomial::one(self.ring.nvars()))
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::from_u64(&self.ring, 1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates at a total assignment given by name.
    pub fn evaluate(&self, values: &BTreeMap<String, ResidueInt>) -> Result<ResidueInt, PolyError> {
        let mut point = Vec::with_capacity(self.ring.nvars());
        let used = self.variables();
        for (i, name) in self.ring.vars.iter().enumerate() {
            match values.get(name) {
                Some(v) => point.push(ResidueInt::new(v.value().clone(), self.width())),
                None if used.contains(&i) => {
                    return Err(PolyError::MissingVariable(name.clone()));
                }
                None => point.push(ResidueInt::zero(self.width())),
            }
        }
        Ok(self.eval_point(&point))
    }

    /// Evaluates at a point given positionally (one value per ring variable).
    pub fn eval_point(&self, point: &[ResidueInt]) -> ResidueInt {
        let d = self.width();
        let mut acc = ResidueInt::zero(d);
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (i, &e) in t.mono.0.iter().enumerate() {
                if e > 0 {
                    v = &v * &point[i].pow(e);
                }
            }
            acc = &acc + &v;
        }
        acc
    }

    /// Replaces variable `idx` by a constant.
    pub fn substitute(&self, idx: usize, value: &ResidueInt) -> Poly {
        if !self.contains_var(idx) {
            return self.clone();
        }
        let terms = self.terms.iter().map(|t| {
            let mut m = t.mono.clone();
            let e = std::mem::take(&mut m.0[idx]);
            (&t.coeff * &value.pow(e), m)
        });
        Poly::from_terms(&self.ring, terms.collect::<Vec<_>>())
    }

    /// Replaces variable `idx` by a polynomial of the same ring.
    pub fn substitute_poly(&self, idx: usize, value: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.ring);
        for t in &self.terms {
            let mut m = t.mono.clone();
            let e = std::mem::take(&mut m.0[idx]);
            let piece = value.pow(e).mul_term(&t.coeff, &m);
            acc = &acc + &piece;
        }
        acc
    }

    /// Moves the polynomial into `target`, sending variable `i` to
    /// `var_map[i]`.
    pub fn embed(&self, target: &Arc<PolyRing>, var_map: &[usize]) -> Poly {
        debug_assert_eq!(var_map.len(), self.ring.nvars());
        debug_assert_eq!(target.width, self.ring.width);
        let terms = self.terms.iter().map(|t| {
            let mut e = vec![0; target.nvars()];
            for (i, &x) in t.mono.0.iter().enumerate() {
                e[var_map[i]] += x;
            }
            (t.coeff.clone(), Monomial(e))
        });
        Poly::from_terms(target, terms.collect::<Vec<_>>())
    }

    /// Moves the polynomial into a ring that contains its variables by name.
    pub fn embed_by_name(&self, target: &Arc<PolyRing>) -> Result<Poly, PolyError> {
        let map = self
            .ring
            .vars
            .iter()
            .map(|v| {
                target
                    .var_index(v)
                    .ok_or_else(|| PolyError::UnknownVariable(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.embed(target, &map))
    }

    /// Multiplies by the inverse of the odd part of the leading coefficient,
    /// leaving a power of two in front. The zero set is unchanged.
    pub fn normalize_unit(&self) -> Poly {
        match self.leading_coeff() {
            Some(lc) => {
                let (_, odd) = lc.split_odd().expect("nonzero leading coefficient");
                let inv = crate::ring::inv_hensel(&odd).expect("odd part is a unit");
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Parses the textual form produced by `Display`, e.g. `3*x^2*y - 2*y + 1`.
    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<Poly, PolyError> {
        parse::parse_poly(ring, text)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

pub(crate) fn fmt_monomial(vars: &[String], m: &Monomial) -> String {
    let parts: Vec<String> =
        m.0.iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    vars[i].clone()
                } else {
                    format!("{}^{}", vars[i], e)
                }
            })
            .collect();
    parts.join("*")
}

/// Writes `sum c_i * m_i` with signed coefficients.
pub(crate) fn fmt_signed_terms<'a, I>(
    f: &mut fmt::Formatter<'_>,
    vars: &[String],
    terms: I,
) -> fmt::Result
where
    I: IntoIterator<Item = (&'a Monomial, BigInt)>,
{
    let mut first = true;
    for (mono, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        if mono.is_one() {
            write!(f, "{mag}")?;
        } else if mag == BigInt::from(1) {
            write!(f, "{}", fmt_monomial(vars, mono))?;
        } else {
            write!(f, "{}*{}", mag, fmt_monomial(vars, mono))?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_signed_terms(
            f,
            &self.ring.vars,
            self.terms.iter().map(|t| (&t.mono, t.coeff.to_signed())),
        )
    }
}

macro_rules! poly_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<'a> $tr<&'a Poly> for &'a Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$try(rhs).expect("polynomial ring mismatch")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$try(&rhs).expect("polynomial ring mismatch")
            }
        }
    };
}
poly_op!(Add, add, try_add);
poly_op!(Sub, sub, try_sub);
poly_op!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::zero(&self.ring).merge(self, true)
    }
}

mod parse {
    use super::*;

    struct Cursor<'a> {
        s: &'a [u8],
        pos: usize,
    }

    impl<'a> Cursor<'a> {
        fn skip_ws(&mut self) {
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<u8> {
            self.skip_ws();
            self.s.get(self.pos).copied()
        }

        fn err(&self, msg: &str) -> PolyError {
            PolyError::Parse(format!("{msg} at offset {}", self.pos))
        }

        fn number(&mut self) -> BigUint {
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .unwrap()
        }

        fn ident(&mut self) -> String {
            let start = self.pos;
            while self.pos < self.s.len() {
                let c = self.s[self.pos];
                if c.is_ascii_alphanumeric() || c == b'_' || c == b'\'' || c == b'.' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
        }
    }

    pub(super) fn parse_poly(ring: &Arc<PolyRing>, text: &str) -> Result<Poly, PolyError> {
        let mut cur = Cursor {
            s: text.as_bytes(),
            pos: 0,
        };
        let d = ring.width();
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let mut negative = false;
            match cur.peek() {
                None if !first => break,
                None => return Err(cur.err("empty polynomial")),
                Some(b'+') if !first => cur.pos += 1,
                Some(b'-') => {
                    negative = true;
                    cur.pos += 1;
                }
                Some(_) if first => {}
                Some(_) => return Err(cur.err("expected `+` or `-`")),
            }
            first = false;
            let mut coeff = BigUint::from(1u32);
            let mut exps = vec![0u32; ring.nvars()];
            loop {
                match cur.peek() {
                    Some(c) if c.is_ascii_digit() => coeff *= cur.number(),
                    Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                        let name = cur.ident();
                        let idx = ring
                            .var_index(&name)
                            .ok_or_else(|| PolyError::UnknownVariable(name.clone()))?;
                        let mut e = 1;
                        if cur.peek() == Some(b'^') {
                            cur.pos += 1;
                            match cur.peek() {
                                Some(c) if c.is_ascii_digit() => {
                                    e = u32::try_from(cur.number())
                                        .map_err(|_| cur.err("exponent too large"))?;
                                }
                                _ => return Err(cur.err("expected exponent")),
                            }
                        }
                        exps[idx] += e;
                    }
                    _ => return Err(cur.err("expected a factor")),
                }
                if cur.peek() == Some(b'*') {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
            let mut c = ResidueInt::new(coeff, d);
            if negative {
                c = -c;
            }
            terms.push((c, Monomial(exps)));
        }
        Ok(Poly::from_terms(ring, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(d: u32, vars: &[&str]) -> Arc<PolyRing> {
        PolyRing::with_vars(d, vars)
    }

    #[test]
    fn annihilating_sum() {
        let r = ring(2, &["x"]);
        let f = Poly::parse(&r, "2*x + 1").unwrap();
        let g = Poly::parse(&r, "2*x + 3").unwrap();
        assert!((&f + &g).is_zero());
    }

    #[test]
    fn product_mod_four() {
        let r = ring(2, &["x"]);
        let f = Poly::parse(&r, "x + 1").unwrap();
        let g = Poly::parse(&r, "x + 3").unwrap();
        assert_eq!(&f * &g, Poly::parse(&r, "x^2 + 3").unwrap());
        assert_eq!(&f * &Poly::from_u64(&r, 1), f);
    }

    #[test]
    fn leading_term_graded() {
        let r = ring(8, &["x1", "x2"]);
        let f = Poly::parse(&r, "x1*x2 - 2*x1^2*x2").unwrap();
        let (lt, lm, lc) = f.leading().unwrap();
        assert_eq!(lm, Monomial::new(vec![2, 1]));
        assert_eq!(lc.to_signed(), BigInt::from(-2));
        assert_eq!(lt.coeff, lc);
        assert_eq!(f.to_string(), "-2*x1^2*x2 + x1*x2");

        let r = ring(8, &["x", "y"]);
        let f = Poly::parse(&r, "x + y^2").unwrap();
        assert_eq!(f.leading_monomial().unwrap(), &Monomial::new(vec![0, 2]));
        let c = Poly::from_u64(&r, 5);
        assert_eq!(c.leading().unwrap().2, r.residue(5));
        assert_eq!(Poly::zero(&r).leading(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn evaluation() {
        let r = ring(3, &["x"]);
        let f = Poly::parse(&r, "x^2 - 2").unwrap();
        let v: BTreeMap<_, _> = [("x".to_string(), r.residue(3))].into();
        assert_eq!(f.evaluate(&v).unwrap(), r.residue(7));
        let r2 = ring(2, &["x"]);
        let g = &Poly::parse(&r2, "x - 1").unwrap() * &Poly::parse(&r2, "x - 3").unwrap();
        let v: BTreeMap<_, _> = [("x".to_string(), r2.residue(1))].into();
        assert!(g.evaluate(&v).unwrap().is_zero());
        assert!(matches!(
            f.evaluate(&BTreeMap::new()),
            Err(PolyError::MissingVariable(_))
        ));
        let r3 = ring(5, &["x", "y"]);
        let h = Poly::parse(&r3, "3*x*y + 7*y + 11").unwrap();
        assert_eq!(
            h.eval_point(&[r3.residue(0), r3.residue(0)]),
            r3.residue(11)
        );
    }

    #[test]
    fn monomial_ops() {
        let a = Monomial::new(vec![2, 1]);
        let b = Monomial::new(vec![1, 3]);
        assert_eq!(a.lcm(&b).unwrap(), Monomial::new(vec![2, 3]));
        assert!(Monomial::new(vec![1, 0]).divides(&a).unwrap());
        assert!(!Monomial::new(vec![2, 0])
            .divides(&Monomial::new(vec![1, 1]))
            .unwrap());
        assert_eq!(a.mul(&b).unwrap(), Monomial::new(vec![3, 4]));
        assert!(matches!(
            a.lcm(&Monomial::new(vec![1])),
            Err(PolyError::LengthMismatch(2, 1))
        ));
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = Poly::var(&ring(3, &["x"]), 0);
        let b = Poly::var(&ring(4, &["x"]), 0);
        assert_eq!(a.try_add(&b), Err(PolyError::RingMismatch));
    }

    #[test]
    fn lex_and_elimination_orders() {
        let lex = MonomialOrdering::lex(2);
        assert_eq!(
            lex.cmp(&Monomial::new(vec![1, 0]), &Monomial::new(vec![0, 5])),
            Ordering::Greater
        );
        let elim = MonomialOrdering::new(OrderKind::Elimination { block: 1 }, 2);
        assert_eq!(
            elim.cmp(&Monomial::new(vec![1, 0]), &Monomial::new(vec![0, 5])),
            Ordering::Greater
        );
        assert_eq!(
            elim.cmp(&Monomial::new(vec![1, 0]), &Monomial::new(vec![1, 1])),
            Ordering::Less
        );
        let rev = MonomialOrdering::with_priority(OrderKind::Lex, vec![1, 0]).unwrap();
        assert_eq!(
            rev.cmp(&Monomial::new(vec![1, 0]), &Monomial::new(vec![0, 1])),
            Ordering::Less
        );
        assert!(MonomialOrdering::with_priority(OrderKind::Lex, vec![0, 0]).is_err());
    }

    #[test]
    fn parse_and_render_round_trip() {
        let r = ring(8, &["x", "y'"]);
        let f = Poly::parse(&r, "3*x^2*y' - x + 255").unwrap();
        assert_eq!(f.to_string(), "3*x^2*y' - x - 1");
        assert_eq!(Poly::parse(&r, &f.to_string()).unwrap(), f);
        assert!(Poly::parse(&r, "x + ").is_err());
        assert!(Poly::parse(&r, "z").is_err());
    }

    #[test]
    fn substitution() {
        let r = ring(4, &["x", "y"]);
        let f = Poly::parse(&r, "x^2*y + 3*x + y").unwrap();
        let g = f.substitute(0, &r.residue(2));
        assert_eq!(g, Poly::parse(&r, "5*y + 6").unwrap());
        let h = f.substitute_poly(0, &Poly::parse(&r, "y + 1").unwrap());
        let point = [r.residue(0), r.residue(3)];
        assert_eq!(
            h.eval_point(&point),
            f.eval_point(&[r.residue(4), r.residue(3)])
        );
    }
}
