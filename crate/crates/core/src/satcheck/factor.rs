//! Heuristic factorization over the integers.
//!
//! Coefficients are read through their symmetric representatives, so
//! `255*x` at width 8 is treated as `-x`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{Monomial, Poly};
use crate::ring::ResidueInt;

fn signed_terms(p: &Poly) -> Vec<(BigInt, Monomial)> {
    p.terms()
        .iter()
        .map(|t| (t.coeff.to_signed(), t.mono.clone()))
        .collect()
}

fn build(p: &Poly, terms: Vec<(BigInt, Monomial)>) -> Poly {
    let d = p.width();
    Poly::from_terms(
        p.ring(),
        terms
            .into_iter()
            .map(|(c, m)| (ResidueInt::from_bigint(&c, d), m)),
    )
}

fn monomial_content(terms: &[(BigInt, Monomial)]) -> Option<Monomial> {
    let mut it = terms.iter().map(|(_, m)| m.clone());
    let first = it.next()?;
    Some(it.fold(first, |acc, m| acc.gcd(&m).expect("same ring")))
}

fn integer_content(terms: &[(BigInt, Monomial)]) -> BigInt {
    terms.iter().fold(BigInt::zero(), |acc, (c, _)| acc.gcd(c))
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn monomial_sqrt(m: &Monomial) -> Option<Monomial> {
    m.exponents()
        .iter()
        .map(|&e| (e % 2 == 0).then_some(e / 2))
        .collect::<Option<Vec<_>>>()
        .map(Monomial::new)
}

/// `a^2 - b^2 = (a - b)(a + b)` for a two-term polynomial.
fn difference_of_squares(p: &Poly, terms: &[(BigInt, Monomial)]) -> Option<(Poly, Poly)> {
    let [(c1, m1), (c2, m2)] = terms else {
        return None;
    };
    let (pos, neg) = match (c1.is_positive(), c2.is_positive()) {
        (true, false) => ((c1, m1), (c2, m2)),
        (false, true) => ((c2, m2), (c1, m1)),
        _ => return None,
    };
    let a = (exact_sqrt(pos.0)?, monomial_sqrt(pos.1)?);
    let b = (exact_sqrt(&-neg.0)?, monomial_sqrt(neg.1)?);
    if a.1.is_one() && b.1.is_one() {
        return None;
    }
    let minus = build(p, vec![a.clone(), (-b.0.clone(), b.1.clone())]);
    let plus = build(p, vec![a, b]);
    Some((minus, plus))
}

fn divide_monomial(terms: &[(BigInt, Monomial)], m: &Monomial) -> Vec<(BigInt, Monomial)> {
    terms
        .iter()
        .map(|(c, t)| (c.clone(), t.div_unchecked(m)))
        .collect()
}

/// Some `(f, g)` with `p = f * g` over the integers: monomial content,
/// then 2-power integer content, then a difference of two squares.
pub fn factor_over_z(p: &Poly) -> Option<(Poly, Poly)> {
    let terms = signed_terms(p);
    if terms.is_empty() {
        return None;
    }
    let n = p.ring().nvars();
    if let Some(split) = monomial_split(p, &terms) {
        return Some(split);
    }
    let content = integer_content(&terms);
    let k = content.trailing_zeros().unwrap_or(0);
    if k > 0 {
        let two_k = BigInt::one() << k;
        let rest: Vec<_> = terms.iter().map(|(c, m)| (c / &two_k, m.clone())).collect();
        let f = build(p, vec![(two_k, Monomial::one(n))]);
        return Some((f, build(p, rest)));
    }
    difference_of_squares(p, &terms)
}

fn monomial_split(p: &Poly, terms: &[(BigInt, Monomial)]) -> Option<(Poly, Poly)> {
    let n = p.ring().nvars();
    let m = monomial_content(terms)?;
    if m.is_one() {
        return None;
    }
    let rest = divide_monomial(terms, &m);
    if rest.len() > 1 || !rest[0].1.is_one() {
        let f = build(p, vec![(BigInt::one(), m)]);
        return Some((f, build(p, rest)));
    }
    // Single term c*m: peel off one variable.
    if m.degree() < 2 {
        return None;
    }
    let v = m.exponents().iter().position(|&e| e > 0)?;
    let x = Monomial::var(n, v, 1);
    let f = build(p, vec![(BigInt::one(), x.clone())]);
    let g = build(p, vec![(rest[0].0.clone(), m.div_unchecked(&x))]);
    Some((f, g))
}

/// Like [`factor_over_z`] but only returns splits where both factors are
/// non-constant; integer content is folded into the first factor.
pub fn nonconstant_split(p: &Poly) -> Option<(Poly, Poly)> {
    let terms = signed_terms(p);
    if terms.is_empty() {
        return None;
    }
    if let Some(split) = monomial_split(p, &terms) {
        return Some(split);
    }
    let content = integer_content(&terms);
    let primitive: Vec<_> = terms
        .iter()
        .map(|(c, m)| (c / &content, m.clone()))
        .collect();
    let (f, g) = difference_of_squares(p, &primitive)?;
    let c = ResidueInt::from_bigint(&content, p.width());
    Some((f.scale(&c), g))
}
