//! Test-side oracles: polynomials kept as raw integer term lists and
//! evaluated with machine arithmetic, independent of the library's
//! evaluator.

#![allow(dead_code)]

pub mod algebra;
pub mod loops;
pub mod scripts;

use std::sync::Arc;

use modsmt::poly::{Monomial, Poly, PolyRing};
use modsmt::ring::ResidueInt;
use modsmt::satcheck::Formula;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct RawPoly {
    pub terms: Vec<(i64, Vec<u32>)>,
}

pub fn mask(d: u32) -> u64 {
    if d >= 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

impl RawPoly {
    pub fn constant(c: i64, n: usize) -> Self {
        RawPoly {
            terms: vec![(c, vec![0; n])],
        }
    }

    pub fn eval(&self, point: &[u64], d: u32) -> u64 {
        let mut acc = 0u64;
        for (c, e) in &self.terms {
            let mut v = *c as u64;
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    v = v.wrapping_mul(*x);
                }
            }
            acc = acc.wrapping_add(v);
        }
        acc & mask(d)
    }

    pub fn to_poly(&self, ring: &Arc<PolyRing>) -> Poly {
        let d = ring.width();
        Poly::from_terms(
            ring,
            self.terms
                .iter()
                .map(|(c, e)| (ResidueInt::from_i64(*c, d), Monomial::new(e.clone())))
                .collect::<Vec<_>>(),
        )
    }

    pub fn sub(&self, other: &RawPoly) -> RawPoly {
        let mut terms = self.terms.clone();
        terms.extend(
            other
                .terms
                .iter()
                .map(|(c, e)| (c.wrapping_neg(), e.clone())),
        );
        RawPoly { terms }
    }
}

pub fn random_monomial<R: Rng>(rng: &mut R, n: usize, max_deg: u32) -> Vec<u32> {
    let deg = rng.gen_range(0..=max_deg);
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.gen_range(0..n)] += 1;
    }
    e
}

pub fn random_raw<R: Rng>(
    rng: &mut R,
    n: usize,
    max_deg: u32,
    max_terms: usize,
    d: u32,
) -> RawPoly {
    let k = rng.gen_range(1..=max_terms);
    let terms = (0..k)
        .map(|_| {
            let c = rng.gen_range(0..=mask(d).min(1 << 20)) as i64;
            (c, random_monomial(rng, n, max_deg))
        })
        .collect();
    RawPoly { terms }
}

/// Polynomials with small signed coefficients, which produce more
/// satisfiable systems than uniform ones.
pub fn random_small_raw<R: Rng>(rng: &mut R, n: usize, max_deg: u32, max_terms: usize) -> RawPoly {
    let k = rng.gen_range(1..=max_terms);
    let terms = (0..k)
        .map(|_| (rng.gen_range(-4i64..=4), random_monomial(rng, n, max_deg)))
        .collect();
    RawPoly { terms }
}

#[derive(Debug, Clone)]
pub struct RawLit {
    pub lhs: RawPoly,
    pub rhs: RawPoly,
    pub eq: bool,
}

impl RawLit {
    pub fn holds(&self, point: &[u64], d: u32) -> bool {
        (self.lhs.eval(point, d) == self.rhs.eval(point, d)) == self.eq
    }
}

/// Calls `f` on every point of `(Z/2^d)^n` until it returns true.
pub fn any_point(n: usize, d: u32, mut f: impl FnMut(&[u64]) -> bool) -> Option<Vec<u64>> {
    let size = 1u64 << d;
    let mut point = vec![0u64; n];
    loop {
        if f(&point) {
            return Some(point);
        }
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            point[i] += 1;
            if point[i] < size {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
}

pub fn brute_force(lits: &[RawLit], n: usize, d: u32) -> Option<Vec<u64>> {
    any_point(n, d, |p| lits.iter().all(|l| l.holds(p, d)))
}

pub fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub fn to_u64(v: &ResidueInt) -> u64 {
    u64::try_from(v.value()).expect("fits in u64")
}

/// One to four literals mixing uniform and small-coefficient sides.
pub fn random_conjunction<R: Rng>(rng: &mut R, n: usize, d: u32) -> Vec<RawLit> {
    let k = rng.gen_range(1..=4);
    (0..k)
        .map(|_| {
            let lhs = if rng.gen_bool(0.5) {
                random_small_raw(rng, n, 3, 3)
            } else {
                random_raw(rng, n, 3, 3, d)
            };
            let rhs = if rng.gen_bool(0.6) {
                RawPoly::constant(rng.gen_range(0..=mask(d) as i64), n)
            } else {
                random_small_raw(rng, n, 2, 2)
            };
            RawLit {
                lhs,
                rhs,
                eq: rng.gen_bool(0.7),
            }
        })
        .collect()
}

pub fn lits_formula(lits: &[RawLit], ring: &Arc<PolyRing>) -> Formula {
    Formula::And(
        lits.iter()
            .map(|l| {
                let (a, b) = (l.lhs.to_poly(ring), l.rhs.to_poly(ring));
                if l.eq {
                    Formula::eq(a, b)
                } else {
                    Formula::neq(a, b)
                }
            })
            .collect(),
    )
}

/// Evaluates a library polynomial term by term with wrapping machine
/// arithmetic; `d <= 64`.
pub fn eval_poly_u64(p: &Poly, point: &[u64], d: u32) -> u64 {
    let mut acc = 0u64;
    for t in p.terms() {
        let mut v = u64::try_from(&(t.coeff.value() & num_bigint::BigUint::from(mask(d)))).unwrap();
        for (x, &k) in point.iter().zip(t.mono.exponents()) {
            for _ in 0..k {
                v = v.wrapping_mul(*x);
            }
        }
        acc = acc.wrapping_add(v);
    }
    acc & mask(d)
}
