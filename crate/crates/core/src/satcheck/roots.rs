//! Roots of univariate polynomials modulo `2^d`.

use num_bigint::BigUint;
use num_traits::One;

use crate::poly::Poly;
use crate::ring::ResidueInt;

/// Upper bound on partial lifts kept alive before giving up.
pub const LIFT_LIMIT: usize = 1 << 20;

/// All `v` with `p(v) = 0 (mod 2^d)`, where `var` is the only variable of
/// `p`. Returns `None` if the lifting frontier exceeds `LIFT_LIMIT`.
pub fn univariate_roots(p: &Poly, var: usize) -> Option<Vec<ResidueInt>> {
    let d = p.width();
    debug_assert!(p.variables().iter().all(|&v| v == var));
    if p.is_zero() {
        if d > 20 {
            return None;
        }
        return Some((0..1u64 << d).map(|v| ResidueInt::from_u64(v, d)).collect());
    }
    let coeffs: Vec<(u32, &ResidueInt)> = p
        .terms()
        .iter()
        .map(|t| (t.mono.exponents()[var], &t.coeff))
        .collect();
    let eval = |r: &ResidueInt| -> ResidueInt {
        coeffs
            .iter()
            .fold(ResidueInt::zero(d), |acc, (e, c)| &acc + &(*c * &r.pow(*e)))
    };

    // Roots mod 2^(k+1) are lifts r + t*2^k of roots mod 2^k.
    let mut frontier: Vec<ResidueInt> = Vec::new();
    for r in 0..2u64 {
        let r = ResidueInt::from_u64(r, d);
        if !eval(&r).value().bit(0) {
            frontier.push(r);
        }
    }
    for k in 1..d {
        let step = ResidueInt::pow2(k, d);
        let mask = (BigUint::one() << (k + 1)) - 1u32;
        let mut next = Vec::with_capacity(frontier.len());
        for r in &frontier {
            for cand in [r.clone(), r + &step] {
                if (eval(&cand).value() & &mask) == BigUint::ZERO {
                    next.push(cand);
                }
            }
        }
        if next.len() > LIFT_LIMIT {
            return None;
        }
        frontier = next;
    }
    frontier.sort_by(|a, b| a.value().cmp(b.value()));
    Some(frontier)
}

/// Outcome of [`first_common_root`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommonRoot {
    Found(ResidueInt),
    None,
    BudgetExceeded,
}

/// What a coset `r + 2^k*t` holds for one polynomial.
enum Coset {
    /// Every member is a root.
    AllRoots,
    /// No member is a root.
    NoRoot,
    Undecided,
}

/// Expands `g(t) = p(r + 2^k t)`: with `c0 = g(0)` and `m` the least
/// valuation among the other coefficients, `nu2(c0) < m` rules out roots
/// and `m = d, c0 = 0` makes the whole coset roots.
fn classify_coset(p: &Poly, var: usize, r: &ResidueInt, k: u32) -> Coset {
    let d = p.width();
    let ring = p.ring();
    let shift =
        &Poly::constant(ring, r.clone()) + &Poly::var(ring, var).scale(&ResidueInt::pow2(k, d));
    let g = p.substitute_poly(var, &shift);
    let mut c0 = ResidueInt::zero(d);
    let mut m = d;
    for t in g.terms() {
        if t.mono.is_one() {
            c0 = t.coeff.clone();
        } else {
            m = m.min(t.coeff.nu2().unwrap_or(d));
        }
    }
    match c0.nu2() {
        Err(_) if m == d => Coset::AllRoots,
        Ok(v) if v < m => Coset::NoRoot,
        _ => Coset::Undecided,
    }
}

/// Depth-first lift of a common root of `polys`, each
/// univariate in `var`, visiting at most `budget` cosets.
pub fn first_common_root(polys: &[&Poly], var: usize, budget: usize) -> CommonRoot {
    let Some(d) = polys.first().map(|p| p.width()) else {
        return CommonRoot::None;
    };
    let mut visited = 0usize;
    // (coset representative, number of fixed low bits)
    let mut stack = vec![(ResidueInt::zero(d), 0u32)];
    while let Some((r, k)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return CommonRoot::BudgetExceeded;
        }
        let mut all = true;
        let mut none = false;
        for p in polys {
            match classify_coset(p, var, &r, k) {
                Coset::AllRoots => {}
                Coset::NoRoot => none = true,
                Coset::Undecided => all = false,
            }
        }
        if none {
            continue;
        }
        if all || k == d {
            return CommonRoot::Found(r);
        }
        let hi = &r + &ResidueInt::pow2(k, d);
        stack.push((hi, k + 1));
        stack.push((r, k + 1));
    }
    CommonRoot::None
}

/// Brute-force root enumeration; only sensible for small widths.
pub fn roots_exhaustive(p: &Poly, var: usize) -> Vec<ResidueInt> {
    let d = p.width();
    let n = p.ring().nvars();
    let mut point = vec![ResidueInt::zero(d); n];
    (0..1u64 << d)
        .map(|v| ResidueInt::from_u64(v, d))
        .filter(|v| {
            point[var] = v.clone();
            p.eval_point(&point).is_zero()
        })
        .collect()
}
