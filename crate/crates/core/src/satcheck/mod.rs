//! Decision procedure for conjunctions of polynomial (dis)equations over
//! `Z/2^d`, lifted to arbitrary boolean structure through DNF expansion.

mod factor;
mod formula;
mod roots;
mod search;

use std::sync::Arc;

use thiserror::Error;

use crate::groebner::strong_groebner_with_budget;
use crate::poly::{Poly, PolyRing};
use crate::ring::ResidueInt;

pub use factor::{factor_over_z, nonconstant_split};
pub use formula::{
    dnf_expand, Conjunction, DnfError, Formula, Literal, Polarity, DEFAULT_DNF_BUDGET,
};
pub use roots::{first_common_root, roots_exhaustive, univariate_roots, CommonRoot};
pub use search::{find_zeros, SearchResult};

/// Prefix of auxiliary disequation variables; reserved in user input.
pub const AUX_PREFIX: &str = "__z";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    /// Maximum number of search nodes (Gröbner basis computations).
    pub node_budget: usize,
    /// Critical-element budget per Gröbner basis computation; past it the
    /// search continues on the partial basis.
    pub gb_budget: usize,
    pub dnf_budget: usize,
    /// Maximum nesting of factorization splits along one search path.
    pub factor_depth: u32,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            node_budget: 1_000_000,
            gb_budget: 2_000,
            dnf_budget: DEFAULT_DNF_BUDGET,
            factor_depth: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnsatCert {
    /// A nonzero constant in the Gröbner basis of the conjunct.
    Constant(ResidueInt),
    /// The search tree was exhausted.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Values for the declared variables, in declaration order.
    Sat(Vec<(String, ResidueInt)>),
    /// One certificate per DNF conjunct.
    Unsat(Vec<UnsatCert>),
    Unknown(String),
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat(_) => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Dnf(#[from] DnfError),
    #[error("variable name `{0}` uses the reserved auxiliary prefix")]
    ReservedName(String),
}

/// Root-finding form of a conjunction.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    /// The input ring extended with one auxiliary variable per disequation.
    pub ring: Arc<PolyRing>,
    pub polys: Vec<Poly>,
    /// Number of leading (non-auxiliary) variables.
    pub original_vars: usize,
}

/// `f = g` becomes `f - g`; `f != g` becomes `z*(f - g) - 2^(d-1)` with a
/// fresh `z`. The zero set projects onto the solutions of `conj`.
pub fn preprocess(ring: &Arc<PolyRing>, conj: &Conjunction) -> Preprocessed {
    let d = ring.width();
    let aux: Vec<String> = conj
        .literals
        .iter()
        .filter(|l| l.polarity == Polarity::Neq)
        .enumerate()
        .map(|(i, _)| format!("{AUX_PREFIX}{}", i + 1))
        .collect();
    let ext = ring.extend(&aux);
    let n = ring.nvars();
    let map: Vec<usize> = (0..n).collect();
    let half = Poly::constant(&ext, ResidueInt::pow2(d - 1, d));
    let mut next_aux = n;
    let mut polys = Vec::new();
    for lit in &conj.literals {
        let diff = lit.difference().embed(&ext, &map);
        let p = match lit.polarity {
            Polarity::Eq => diff,
            Polarity::Neq => {
                let z = Poly::var(&ext, next_aux);
                next_aux += 1;
                &(&z * &diff) - &half
            }
        };
        if !p.is_zero() {
            polys.push(p);
        }
    }
    Preprocessed {
        ring: ext,
        polys,
        original_vars: n,
    }
}

/// A nonzero constant in the Gröbner basis of `h`, if completion finds one
/// within `budget`.
pub fn check_unsat_via_gb(ring: &Arc<PolyRing>, h: &[Poly], budget: usize) -> Option<ResidueInt> {
    strong_groebner_with_budget(ring, h, budget)
        .ok()?
        .has_nonzero_constant()
}

/// Decides a single conjunction. `Sat` models cover the original variables.
pub fn solve_conjunction(ring: &Arc<PolyRing>, conj: &Conjunction, cfg: &SolveConfig) -> Verdict {
    let pre = preprocess(ring, conj);
    match find_zeros(&pre.ring, &pre.polys, pre.original_vars, cfg) {
        SearchResult::Model(point) => {
            let point = &point[..pre.original_vars];
            assert!(conj.holds_at(point), "model violates a literal");
            Verdict::Sat(
                ring.vars()
                    .iter()
                    .cloned()
                    .zip(point.iter().cloned())
                    .collect(),
            )
        }
        SearchResult::Empty(cert) => Verdict::Unsat(vec![cert]),
        SearchResult::BudgetExceeded(reason) => Verdict::Unknown(reason),
    }
}

/// Decides `formula` over the variables of `ring`.
pub fn solve(
    ring: &Arc<PolyRing>,
    formula: &Formula,
    cfg: &SolveConfig,
) -> Result<Verdict, SolveError> {
    if let Some(v) = ring.vars().iter().find(|v| v.starts_with(AUX_PREFIX)) {
        return Err(SolveError::ReservedName(v.clone()));
    }
    let conjuncts = dnf_expand(formula, cfg.dnf_budget)?;
    let mut certs = Vec::new();
    let mut unknown = None;
    for conj in &conjuncts {
        match solve_conjunction(ring, conj, cfg) {
            Verdict::Sat(model) => {
                let point: Vec<ResidueInt> = model.iter().map(|(_, v)| v.clone()).collect();
                assert!(formula.holds_at(&point), "model violates the formula");
                return Ok(Verdict::Sat(model));
            }
            Verdict::Unsat(c) => certs.extend(c),
            Verdict::Unknown(reason) => unknown = Some(reason),
        }
    }
    Ok(match unknown {
        Some(reason) => Verdict::Unknown(reason),
        None => Verdict::Unsat(certs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: &Arc<PolyRing>, s: &str) -> Poly {
        Poly::parse(r, s).unwrap()
    }

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn preprocess_examples() {
        let r = PolyRing::with_vars(3, &["x", "y"]);
        let conj = Conjunction::new(vec![
            Literal::eq(p(&r, "x"), p(&r, "y")),
            Literal::neq(p(&r, "x"), p(&r, "0")),
        ]);
        let pre = preprocess(&r, &conj);
        assert_eq!(pre.ring.vars(), &["x", "y", "__z1"]);
        assert_eq!(
            pre.polys,
            vec![p(&pre.ring, "x - y"), p(&pre.ring, "__z1*x - 4")]
        );

        let conj = Conjunction::new(vec![Literal::eq(p(&r, "x"), p(&r, "x"))]);
        assert!(preprocess(&r, &conj).polys.is_empty());

        let conj = Conjunction::new(vec![Literal::eq(p(&r, "1"), p(&r, "0"))]);
        assert_eq!(preprocess(&r, &conj).polys, vec![p(&r, "1")]);
    }

    #[test]
    fn gb_certificates() {
        let r = PolyRing::with_vars(2, &["x"]);
        assert_eq!(
            check_unsat_via_gb(&r, &[p(&r, "x - 1"), p(&r, "x - 3")], 1000),
            Some(r.residue(2))
        );
        let r = PolyRing::with_vars(3, &["x"]);
        assert_eq!(check_unsat_via_gb(&r, &[p(&r, "x")], 1000), None);
        assert!(check_unsat_via_gb(&r, &[p(&r, "2*x - 1")], 1000).is_some());
    }

    #[test]
    fn find_zeros_examples() {
        let r = PolyRing::with_vars(3, &["x"]);
        let model = |s: &str| match find_zeros(&r, &[p(&r, s)], 1, &cfg()) {
            SearchResult::Model(m) => Some(m[0].clone()),
            SearchResult::Empty(_) => None,
            SearchResult::BudgetExceeded(e) => panic!("{e}"),
        };
        assert_eq!(model("x - 2"), Some(r.residue(2)));
        assert_eq!(model("x^2 - 2"), None);
        let v = model("2*x - 4").unwrap();
        assert!(v == r.residue(2) || v == r.residue(6));
    }

    #[test]
    fn solve_examples() {
        let r = PolyRing::with_vars(3, &["x"]);
        let f = Formula::And(vec![
            Formula::eq(p(&r, "x"), p(&r, "1")),
            Formula::neq(p(&r, "x"), p(&r, "1")),
        ]);
        assert!(matches!(solve(&r, &f, &cfg()).unwrap(), Verdict::Unsat(_)));
        let f = Formula::eq(p(&r, "x^2"), p(&r, "2"));
        assert!(matches!(solve(&r, &f, &cfg()).unwrap(), Verdict::Unsat(_)));

        let r = PolyRing::with_vars(4, &["x", "y"]);
        let f = Formula::And(vec![
            Formula::neq(p(&r, "x"), p(&r, "0")),
            Formula::eq(p(&r, "x*y"), p(&r, "1")),
        ]);
        match solve(&r, &f, &cfg()).unwrap() {
            Verdict::Sat(m) => {
                let (x, y) = (&m[0].1, &m[1].1);
                assert!(x.is_odd());
                assert!((x * y).is_one());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reserved_names_are_rejected() {
        let r = PolyRing::with_vars(3, &["__z1"]);
        assert!(matches!(
            solve(&r, &Formula::True, &cfg()),
            Err(SolveError::ReservedName(_))
        ));
    }
}
