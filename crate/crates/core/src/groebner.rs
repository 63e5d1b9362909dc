//! Strong Gröbner bases over `Z/2^d`.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{Monomial, Poly, PolyRing};
use crate::ring::{ring_div, ResidueInt};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("apoly/leading term of the zero polynomial")]
    ZeroPolynomial,
    #[error("spoly of a polynomial with itself")]
    IdenticalInputs,
    #[error("completion exceeded the budget of {0} critical elements")]
    BudgetExceeded(usize),
    #[error("input polynomials live in different rings")]
    RingMismatch,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GbStats {
    pub apolys_processed: usize,
    pub pairs_processed: usize,
    pub reduction_steps: usize,
    pub added: usize,
}

#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    gens: Vec<Poly>,
    stats: GbStats,
}

impl GroebnerBasis {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn into_gens(self) -> Vec<Poly> {
        self.gens
    }

    pub fn stats(&self) -> &GbStats {
        &self.stats
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn reduce(&self, f: &Poly) -> Poly {
        normal_form(f, &self.gens)
    }

    /// Ideal membership; exact because the basis is strong.
    pub fn contains(&self, f: &Poly) -> bool {
        self.reduce(f).is_zero()
    }

    pub fn has_nonzero_constant(&self) -> Option<ResidueInt> {
        has_nonzero_constant(&self.gens)
    }
}

/// First nonzero constant among `gens`.
pub fn has_nonzero_constant(gens: &[Poly]) -> Option<ResidueInt> {
    gens.iter()
        .filter(|g| !g.is_zero())
        .find_map(|g| g.constant_value())
}

fn reducer<'a>(gens: &'a [Poly], c: &ResidueInt, m: &Monomial) -> Option<&'a Poly> {
    let nu = c.nu2().ok()?;
    gens.iter().find(|g| match g.leading_term() {
        Some(t) => t.mono.divides_unchecked(m) && t.coeff.nu2().is_ok_and(|k| k <= nu),
        None => false,
    })
}

/// Full strong reduction of `f` modulo `gens`.
pub fn normal_form(f: &Poly, gens: &[Poly]) -> Poly {
    normal_form_counted(f, gens, &mut 0)
}

fn normal_form_counted(f: &Poly, gens: &[Poly], steps: &mut usize) -> Poly {
    let ring = f.ring();
    let mut p = f.clone();
    let mut rest = Vec::new();
    while let Some(t) = p.leading_term().cloned() {
        match reducer(gens, &t.coeff, &t.mono) {
            Some(g) => {
                let lt = g.leading_term().expect("nonzero reducer");
                let q = ring_div(&t.coeff, &lt.coeff).expect("valuation checked");
                let shift = t.mono.div_unchecked(&lt.mono);
                p = &p - &g.mul_term(&q, &shift);
                *steps += 1;
            }
            None => {
                rest.push((t.coeff.clone(), t.mono.clone()));
                p = &p - &Poly::monomial(ring, t.coeff, t.mono);
            }
        }
    }
    Poly::from_terms(ring, rest)
}

/// Replaces each member by its normal form modulo the others until stable,
/// dropping zeros. The generated ideal is unchanged.
pub fn interreduce(gens: Vec<Poly>) -> Vec<Poly> {
    let mut gens: Vec<Poly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 64 {
        changed = false;
        rounds += 1;
        let mut i = 0;
        while i < gens.len() {
            let g = gens.remove(i);
            let r = normal_form(&g, &gens);
            if r.is_zero() {
                changed = true;
                continue;
            }
            if r != g {
                changed = true;
            }
            gens.insert(i, r);
            i += 1;
        }
    }
    gens
}

/// `2^(d - nu2(lc f)) * f`.
pub fn apoly(f: &Poly) -> Result<Poly, GroebnerError> {
    let lc = f.leading_coeff().ok_or(GroebnerError::ZeroPolynomial)?;
    let k = lc.nu2().expect("nonzero coefficient");
    let d = f.width();
    Ok(f.scale(&ResidueInt::pow2(d - k, d)))
}

struct PairParts {
    k1: u32,
    s1: ResidueInt,
    m1: Monomial,
    k2: u32,
    s2: ResidueInt,
    m2: Monomial,
}

fn pair_parts(f1: &Poly, f2: &Poly) -> Result<PairParts, GroebnerError> {
    if f1 == f2 {
        return Err(GroebnerError::IdenticalInputs);
    }
    let t1 = f1.leading_term().ok_or(GroebnerError::ZeroPolynomial)?;
    let t2 = f2.leading_term().ok_or(GroebnerError::ZeroPolynomial)?;
    let (k1, s1) = t1.coeff.split_odd().expect("nonzero");
    let (k2, s2) = t2.coeff.split_odd().expect("nonzero");
    let lcm = t1
        .mono
        .lcm(&t2.mono)
        .map_err(|_| GroebnerError::RingMismatch)?;
    Ok(PairParts {
        k1,
        s1,
        m1: lcm.div_unchecked(&t1.mono),
        k2,
        s2,
        m2: lcm.div_unchecked(&t2.mono),
    })
}

fn combine(f1: &Poly, f2: &Poly, p: &PairParts, e1: u32, e2: u32) -> Poly {
    let d = f1.width();
    let c1 = &ResidueInt::pow2(e1, d) * &p.s2;
    let c2 = &ResidueInt::pow2(e2, d) * &p.s1;
    &f1.mul_term(&c1, &p.m1) - &f2.mul_term(&c2, &p.m2)
}

/// S-polynomial with the least common multiple `2^max(k1,k2)` of the
/// leading coefficients' 2-parts.
pub fn spoly(f1: &Poly, f2: &Poly) -> Result<Poly, GroebnerError> {
    let p = pair_parts(f1, f2)?;
    let k = p.k1.max(p.k2);
    Ok(combine(f1, f2, &p, k - p.k1, k - p.k2))
}

/// The `2^(d-k1)`, `2^(d-k2)` combination; always a combination of
/// A-polynomial multiples.
pub fn spoly_annihilated(f1: &Poly, f2: &Poly) -> Result<Poly, GroebnerError> {
    let p = pair_parts(f1, f2)?;
    let d = f1.width();
    Ok(combine(f1, f2, &p, d - p.k1, d - p.k2))
}

pub const DEFAULT_GB_BUDGET: usize = 200_000;

/// Completion without a budget. Terminates on every input.
pub fn strong_groebner(ring: &Arc<PolyRing>, input: &[Poly]) -> GroebnerBasis {
    strong_groebner_with_budget(ring, input, usize::MAX).expect("unbounded completion")
}

/// Completion that gives up once more than `budget` critical elements
/// (A-polynomials plus pairs) have been processed.
pub fn strong_groebner_with_budget(
    ring: &Arc<PolyRing>,
    input: &[Poly],
    budget: usize,
) -> Result<GroebnerBasis, GroebnerError> {
    let (basis, complete) = bounded_groebner(ring, input, budget)?;
    if complete {
        Ok(basis)
    } else {
        Err(GroebnerError::BudgetExceeded(budget))
    }
}

/// Runs completion for at most `budget` critical elements. The flag tells
/// whether the result is a strong Gröbner basis; otherwise it is a subset
/// of the ideal that contains every nonzero input.
pub fn bounded_groebner(
    ring: &Arc<PolyRing>,
    input: &[Poly],
    budget: usize,
) -> Result<(GroebnerBasis, bool), GroebnerError> {
    let mut stats = GbStats::default();
    let mut gens: Vec<Poly> = Vec::new();
    for h in input {
        if **h.ring() != **ring {
            return Err(GroebnerError::RingMismatch);
        }
        if !h.is_zero() && !gens.contains(h) {
            gens.push(h.clone());
        }
    }
    let mut apolys: VecDeque<usize> = (0..gens.len()).collect();
    let mut pairs: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..gens.len() {
        for i in 0..j {
            pairs.push_back((i, j));
        }
    }

    let mut complete = true;
    loop {
        if stats.apolys_processed + stats.pairs_processed >= budget
            && !(apolys.is_empty() && pairs.is_empty())
        {
            complete = false;
            break;
        }
        let candidates = if let Some(i) = apolys.pop_front() {
            stats.apolys_processed += 1;
            vec![apoly(&gens[i])?]
        } else if let Some((i, j)) = pairs.pop_front() {
            stats.pairs_processed += 1;
            vec![
                spoly(&gens[i], &gens[j])?,
                spoly_annihilated(&gens[i], &gens[j])?,
            ]
        } else {
            break;
        };
        for h in candidates {
            let h = normal_form_counted(&h, &gens, &mut stats.reduction_steps);
            if h.is_zero() {
                continue;
            }
            let idx = gens.len();
            for i in 0..idx {
                pairs.push_back((i, idx));
            }
            apolys.push_back(idx);
            gens.push(h);
            stats.added += 1;
        }
    }
    let basis = GroebnerBasis {
        ring: ring.clone(),
        gens,
        stats,
    };
    Ok((basis, complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyRing;

    fn p(r: &Arc<PolyRing>, s: &str) -> Poly {
        Poly::parse(r, s).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let r = PolyRing::with_vars(3, &["x"]);
        assert!(normal_form(&p(&r, "2*x + 2"), &[p(&r, "x + 1")]).is_zero());
        assert!(normal_form(&p(&r, "x^2"), &[p(&r, "x")]).is_zero());
        assert_eq!(normal_form(&p(&r, "2*x"), &[p(&r, "4*x")]), p(&r, "2*x"));
    }

    #[test]
    fn apoly_examples() {
        let r = PolyRing::with_vars(4, &["x"]);
        assert_eq!(apoly(&p(&r, "4*x + 1")).unwrap(), p(&r, "4"));
        assert!(apoly(&p(&r, "x + 3")).unwrap().is_zero());
        let r3 = PolyRing::with_vars(3, &["x"]);
        assert!(apoly(&p(&r3, "2*x")).unwrap().is_zero());
        assert_eq!(apoly(&Poly::zero(&r3)), Err(GroebnerError::ZeroPolynomial));
    }

    #[test]
    fn spoly_examples() {
        let r = PolyRing::with_vars(2, &["x"]);
        assert_eq!(spoly(&p(&r, "x - 1"), &p(&r, "x - 3")).unwrap(), p(&r, "2"));
        let f = p(&r, "x + 1");
        assert!(spoly(&f, &f.scale(&r.residue(3))).unwrap().is_zero());
        assert_eq!(spoly(&f, &f), Err(GroebnerError::IdenticalInputs));

        let r = PolyRing::with_vars(3, &["x", "y"]);
        let s = spoly(&p(&r, "2*x + 1"), &p(&r, "x + 4*y")).unwrap();
        // Oracle: expand 1*(2x+1) - 2*(x+4y) over Z, then reduce mod 8.
        let oracle = Poly::from_terms(
            &r,
            [
                (ResidueInt::from_i64(1, 3), Monomial::one(2)),
                (ResidueInt::from_i64(-8, 3), Monomial::var(2, 1, 1)),
            ],
        );
        assert_eq!(s, oracle);
        assert_eq!(s, p(&r, "1"));
    }

    #[test]
    fn completion_examples() {
        let r = PolyRing::with_vars(2, &["x"]);
        let g = strong_groebner(&r, &[p(&r, "x - 1"), p(&r, "x - 3")]);
        assert!(g.gens().contains(&p(&r, "x - 1")));
        assert_eq!(g.has_nonzero_constant(), Some(r.residue(2)));

        let r = PolyRing::new(
            8,
            vec!["x'".into(), "y'".into(), "x".into(), "y".into()],
            crate::poly::MonomialOrdering::new(crate::poly::OrderKind::Elimination { block: 2 }, 4),
        );
        let h = vec![p(&r, "x' - x - 1"), p(&r, "y' - y - x")];
        let g = strong_groebner(&r, &h);
        assert_eq!(g.gens(), h.as_slice());

        let r = PolyRing::with_vars(3, &["x"]);
        let g = strong_groebner(&r, &[p(&r, "x")]);
        assert_eq!(g.gens(), &[p(&r, "x")]);
        assert_eq!(g.has_nonzero_constant(), None);
        let g = strong_groebner(&r, &[p(&r, "x"), p(&r, "8")]);
        assert_eq!(g.has_nonzero_constant(), None);
        assert!(strong_groebner(&r, &[]).is_empty());
    }

    #[test]
    fn unsat_certificate_for_2x_minus_1() {
        let r = PolyRing::with_vars(3, &["x"]);
        let g = strong_groebner(&r, &[p(&r, "2*x - 1")]);
        assert_eq!(g.has_nonzero_constant(), Some(r.residue(4)));
    }

    #[test]
    fn interreduce_drops_redundant_members() {
        let r = PolyRing::with_vars(3, &["x", "y"]);
        let g = interreduce(vec![
            p(&r, "x*y - 1"),
            p(&r, "2*x"),
            p(&r, "-2"),
            Poly::zero(&r),
        ]);
        assert_eq!(g, vec![p(&r, "x*y - 1"), p(&r, "-2")]);

        let r = PolyRing::with_vars(32, &["x", "z"]);
        let g = interreduce(vec![
            p(&r, "x - 1"),
            p(&r, "2147483648*x*z - 1073741824*z + 2147483648"),
            p(&r, "2147483648*z"),
            p(&r, "-1073741824*z + 2147483648"),
        ]);
        assert_eq!(g, vec![p(&r, "x - 1"), p(&r, "-1073741824*z + 2147483648")]);
    }

    #[test]
    fn budget_is_reported() {
        let r = PolyRing::with_vars(8, &["x", "y"]);
        let h = [p(&r, "x^2*y + 3*x"), p(&r, "2*x*y^2 + y + 1")];
        assert_eq!(
            strong_groebner_with_budget(&r, &h, 1).unwrap_err(),
            GroebnerError::BudgetExceeded(1)
        );
    }
}
