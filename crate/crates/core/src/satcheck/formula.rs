use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{Poly, PolyRing};
use crate::ring::ResidueInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Eq,
    Neq,
}

/// `lhs = rhs` or `lhs != rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub lhs: Poly,
    pub rhs: Poly,
    pub polarity: Polarity,
}

impl Literal {
    pub fn eq(lhs: Poly, rhs: Poly) -> Self {
        Literal {
            lhs,
            rhs,
            polarity: Polarity::Eq,
        }
    }

    pub fn neq(lhs: Poly, rhs: Poly) -> Self {
        Literal {
            lhs,
            rhs,
            polarity: Polarity::Neq,
        }
    }

    pub fn negated(&self) -> Self {
        Literal {
            lhs: self.lhs.clone(),
            rhs: self.rhs.clone(),
            polarity: match self.polarity {
                Polarity::Eq => Polarity::Neq,
                Polarity::Neq => Polarity::Eq,
            },
        }
    }

    /// `lhs - rhs`.
    pub fn difference(&self) -> Poly {
        &self.lhs - &self.rhs
    }

    pub fn holds_at(&self, point: &[ResidueInt]) -> bool {
        let zero = self.difference().eval_point(point).is_zero();
        match self.polarity {
            Polarity::Eq => zero,
            Polarity::Neq => !zero,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.polarity {
            Polarity::Eq => "=",
            Polarity::Neq => "!=",
        };
        write!(f, "{} {} {}", self.lhs, op, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Conjunction {
    pub literals: Vec<Literal>,
}

impl Conjunction {
    pub fn new(literals: Vec<Literal>) -> Self {
        Conjunction { literals }
    }

    pub fn holds_at(&self, point: &[ResidueInt]) -> bool {
        self.literals.iter().all(|l| l.holds_at(point))
    }
}

/// Quantifier-free formula over polynomial (dis)equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    /// Boolean if-then-else.
    Ite(Box<Formula>, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn eq(lhs: Poly, rhs: Poly) -> Self {
        Formula::Lit(Literal::eq(lhs, rhs))
    }

    pub fn neq(lhs: Poly, rhs: Poly) -> Self {
        Formula::Lit(Literal::neq(lhs, rhs))
    }

    pub fn negation(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn ite(c: Formula, t: Formula, e: Formula) -> Self {
        Formula::Ite(Box::new(c), Box::new(t), Box::new(e))
    }

    /// `f = ite(cond, g, h)`.
    pub fn eq_ite(f: Poly, cond: Formula, g: Poly, h: Poly) -> Self {
        Formula::ite(cond, Formula::eq(f.clone(), g), Formula::eq(f, h))
    }

    pub fn holds_at(&self, point: &[ResidueInt]) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(l) => l.holds_at(point),
            Formula::And(fs) => fs.iter().all(|f| f.holds_at(point)),
            Formula::Or(fs) => fs.iter().any(|f| f.holds_at(point)),
            Formula::Not(f) => !f.holds_at(point),
            Formula::Ite(c, t, e) => {
                if c.holds_at(point) {
                    t.holds_at(point)
                } else {
                    e.holds_at(point)
                }
            }
        }
    }

    /// Ring of the first literal, if any.
    pub fn ring(&self) -> Option<&Arc<PolyRing>> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Lit(l) => Some(l.lhs.ring()),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().find_map(Formula::ring),
            Formula::Not(f) => f.ring(),
            Formula::Ite(c, t, e) => c.ring().or_else(|| t.ring()).or_else(|| e.ring()),
        }
    }
}

pub const DEFAULT_DNF_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DnfError {
    #[error("disjunctive normal form exceeds {0} conjuncts")]
    TooLarge(usize),
}

/// Equivalent disjunction of conjunctions. An empty result means the
/// formula is unsatisfiable; an empty conjunction is `true`.
pub fn dnf_expand(formula: &Formula, budget: usize) -> Result<Vec<Conjunction>, DnfError> {
    let dnf = expand(formula, true, budget)?;
    Ok(dnf.into_iter().map(Conjunction::new).collect())
}

type Dnf = Vec<Vec<Literal>>;

fn expand(f: &Formula, positive: bool, budget: usize) -> Result<Dnf, DnfError> {
    let check = |d: Dnf| {
        if d.len() > budget {
            Err(DnfError::TooLarge(budget))
        } else {
            Ok(d)
        }
    };
    match (f, positive) {
        (Formula::True, true) | (Formula::False, false) => Ok(vec![vec![]]),
        (Formula::True, false) | (Formula::False, true) => Ok(vec![]),
        (Formula::Lit(l), true) => Ok(vec![vec![l.clone()]]),
        (Formula::Lit(l), false) => Ok(vec![vec![l.negated()]]),
        (Formula::Not(g), p) => expand(g, !p, budget),
        (Formula::And(fs), true) | (Formula::Or(fs), false) => {
            let mut acc: Dnf = vec![vec![]];
            for g in fs {
                let part = expand(g, positive, budget)?;
                if acc.len().saturating_mul(part.len()) > budget {
                    return Err(DnfError::TooLarge(budget));
                }
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        c.extend(b.iter().cloned());
                        next.push(c);
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        }
        (Formula::Or(fs), true) | (Formula::And(fs), false) => {
            let mut acc = Vec::new();
            for g in fs {
                acc.extend(expand(g, positive, budget)?);
                acc = check(acc)?;
            }
            Ok(acc)
        }
        (Formula::Ite(c, t, e), p) => {
            // ite(c, t, e) == (c & t) | (!c & e); negation distributes into
            // the branches.
            let mut acc = Vec::new();
            for (cp, branch) in [(true, t), (false, e)] {
                let cond = expand(c, cp, budget)?;
                let body = expand(branch, p, budget)?;
                if cond.len().saturating_mul(body.len()) > budget {
                    return Err(DnfError::TooLarge(budget));
                }
                for a in &cond {
                    for b in &body {
                        let mut v = a.clone();
                        v.extend(b.iter().cloned());
                        acc.push(v);
                    }
                }
                acc = check(acc)?;
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<PolyRing> {
        PolyRing::with_vars(3, &["a", "b", "c", "x"])
    }

    fn v(r: &Arc<PolyRing>, s: &str) -> Poly {
        Poly::parse(r, s).unwrap()
    }

    #[test]
    fn expansion_examples() {
        let r = ring();
        let f = Formula::And(vec![
            Formula::eq(v(&r, "a"), v(&r, "b")),
            Formula::neq(v(&r, "c"), v(&r, "0")),
        ]);
        let d = dnf_expand(&f, DEFAULT_DNF_BUDGET).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].literals.len(), 2);

        let f = Formula::negation(Formula::eq(v(&r, "a"), v(&r, "b")));
        let d = dnf_expand(&f, DEFAULT_DNF_BUDGET).unwrap();
        assert_eq!(
            d,
            vec![Conjunction::new(vec![Literal::neq(v(&r, "a"), v(&r, "b"))])]
        );

        let f = Formula::eq_ite(
            v(&r, "c"),
            Formula::eq(v(&r, "x"), v(&r, "0")),
            v(&r, "a"),
            v(&r, "b"),
        );
        assert_eq!(dnf_expand(&f, DEFAULT_DNF_BUDGET).unwrap().len(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let r = ring();
        let clause = Formula::Or(vec![
            Formula::eq(v(&r, "a"), v(&r, "0")),
            Formula::eq(v(&r, "a"), v(&r, "1")),
        ]);
        let f = Formula::And(vec![clause; 13]);
        assert_eq!(
            dnf_expand(&f, DEFAULT_DNF_BUDGET),
            Err(DnfError::TooLarge(4096))
        );
    }

    #[test]
    fn constants() {
        assert_eq!(
            dnf_expand(&Formula::True, 8).unwrap(),
            vec![Conjunction::default()]
        );
        assert!(dnf_expand(&Formula::False, 8).unwrap().is_empty());
        assert!(dnf_expand(&Formula::negation(Formula::True), 8)
            .unwrap()
            .is_empty());
    }
}
