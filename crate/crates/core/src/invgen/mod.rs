//! Equational invariant synthesis for single loops
//! `assume pre; while guard { trans }; assert post` over `Z/2^d`.

mod param;
mod queries;
mod synth;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::poly::{MonomialOrdering, OrderKind, Poly, PolyRing};
use crate::ring::ResidueInt;
use crate::satcheck::Formula;

pub use param::{make_template, pnf, LinearForm, ParamPoly};
pub use queries::{build_queries, Discharge, Query, QueryKind};
pub use synth::{
    consecution_pnf, consecution_system, solution_family, synthesize, transition_basis,
    InvgenConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Neq => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    pub fn is_equational(self) -> bool {
        matches!(self, RelOp::Eq | RelOp::Neq)
    }
}

/// `lhs op rhs`; order comparisons read both sides as unsigned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub op: RelOp,
    pub lhs: Poly,
    pub rhs: Poly,
}

impl Atom {
    pub fn new(op: RelOp, lhs: Poly, rhs: Poly) -> Self {
        Atom { op, lhs, rhs }
    }

    pub fn holds_at(&self, point: &[ResidueInt]) -> bool {
        let a = self.lhs.eval_point(point);
        let b = self.rhs.eval_point(point);
        match self.op {
            RelOp::Eq => a == b,
            RelOp::Neq => a != b,
            RelOp::Lt => a.value() < b.value(),
            RelOp::Le => a.value() <= b.value(),
            RelOp::Gt => a.value() > b.value(),
            RelOp::Ge => a.value() >= b.value(),
        }
    }

    /// The atom as a satcheck formula; `None` for order comparisons.
    pub fn to_formula(&self) -> Option<Formula> {
        match self.op {
            RelOp::Eq => Some(Formula::eq(self.lhs.clone(), self.rhs.clone())),
            RelOp::Neq => Some(Formula::neq(self.lhs.clone(), self.rhs.clone())),
            _ => None,
        }
    }

    pub fn embed(&self, target: &Arc<PolyRing>, map: &[usize]) -> Atom {
        Atom::new(
            self.op,
            self.lhs.embed(target, map),
            self.rhs.embed(target, map),
        )
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Refute,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoopError {
    #[error("transition atom `{0}` is not an equation")]
    TransNotEquational(String),
    #[error("primed variable in `{0}` outside the transition")]
    PrimedOutsideTrans(String),
    #[error("atom `{0}` is over the wrong ring")]
    RingMismatch(String),
}

/// Loop with state variables `vars`. `pre`, `guard` and `post` live in
/// [`LoopProblem::ring`]; `trans` equations live in
/// [`LoopProblem::trans_ring`], whose variables are the primed copies
/// followed by the unprimed ones.
#[derive(Debug, Clone)]
pub struct LoopProblem {
    ring: Arc<PolyRing>,
    trans_ring: Arc<PolyRing>,
    pub pre: Vec<Atom>,
    pub guard: Vec<Atom>,
    pub trans: Vec<(Poly, Poly)>,
    pub post: Vec<Atom>,
    pub mode: Mode,
}

pub fn primed(name: &str) -> String {
    format!("{name}'")
}

impl LoopProblem {
    pub fn new<S: AsRef<str>>(width: u32, vars: &[S], mode: Mode) -> Self {
        let ring = PolyRing::with_vars(width, vars);
        let n = ring.nvars();
        let mut tvars: Vec<String> = ring.vars().iter().map(|v| primed(v)).collect();
        tvars.extend(ring.vars().iter().cloned());
        let order = MonomialOrdering::new(OrderKind::Elimination { block: n }, 2 * n);
        let trans_ring = PolyRing::new(width, tvars, order);
        LoopProblem {
            ring,
            trans_ring,
            pre: Vec::new(),
            guard: Vec::new(),
            trans: Vec::new(),
            post: Vec::new(),
            mode,
        }
    }

    pub fn width(&self) -> u32 {
        self.ring.width()
    }

    pub fn vars(&self) -> &[String] {
        self.ring.vars()
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn trans_ring(&self) -> &Arc<PolyRing> {
        &self.trans_ring
    }

    /// Adds `x' = rhs` with `rhs` over the unprimed variables.
    pub fn assign(&mut self, var: usize, rhs: &Poly) {
        let n = self.ring.nvars();
        let map: Vec<usize> = (n..2 * n).collect();
        let lhs = Poly::var(&self.trans_ring, var);
        self.trans.push((lhs, rhs.embed(&self.trans_ring, &map)));
    }

    /// Transition polynomials `lhs - rhs`.
    pub fn trans_polys(&self) -> Vec<Poly> {
        self.trans
            .iter()
            .map(|(l, r)| l - r)
            .filter(|p| !p.is_zero())
            .collect()
    }

    pub fn check(&self) -> Result<(), LoopError> {
        for a in self.pre.iter().chain(&self.guard).chain(&self.post) {
            if *a.lhs.ring() != self.ring || *a.rhs.ring() != self.ring {
                return Err(LoopError::RingMismatch(a.to_string()));
            }
        }
        for (l, r) in &self.trans {
            if *l.ring() != self.trans_ring || *r.ring() != self.trans_ring {
                return Err(LoopError::RingMismatch(format!("{l} = {r}")));
            }
        }
        Ok(())
    }

    /// Every state reachable in one step from `state`, assuming each
    /// variable has an equation `x' = e(V)`. `None` otherwise.
    pub fn step(&self, state: &[ResidueInt]) -> Option<Vec<ResidueInt>> {
        let n = self.ring.nvars();
        let mut next: Vec<Option<ResidueInt>> = vec![None; n];
        let mut point: Vec<ResidueInt> = vec![ResidueInt::zero(self.width()); n];
        point.extend(state.iter().cloned());
        for (l, r) in &self.trans {
            let vars = l.variables();
            if l.terms().len() != 1 || vars.len() != 1 || vars[0] >= n || l.degree() != 1 {
                return None;
            }
            if !l.leading_coeff()?.is_one() || r.variables().iter().any(|&v| v < n) {
                return None;
            }
            next[vars[0]] = Some(r.eval_point(&point));
        }
        next.into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantForm {
    /// `poly(V) = 0`.
    Concrete,
    /// `poly(V) = poly0(V0)`: holds relative to the initial state.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariant {
    pub mu: i64,
    pub form: InvariantForm,
    /// The instantiated template over `V`, with `xi` already folded in for
    /// concrete forms and dropped for relative ones.
    pub eta: Poly,
    /// `eta(V)` for concrete forms, `eta(V) - eta(V0)` for relative ones,
    /// over [`InvariantResult::inv_ring`].
    pub poly: Poly,
    /// Outcome of the initiation check `pre(V0) => eta(V0) = 0`; relative
    /// forms hold initially by construction and carry `Valid`.
    pub initiation: Discharge,
}

impl Invariant {
    /// Initiation proven internally, so the invariant vanishes on every
    /// reachable state.
    pub fn established(&self) -> bool {
        self.initiation == Discharge::Valid
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopVerdict {
    Verified,
    Refuted,
    Unknown,
}

impl LoopVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            LoopVerdict::Verified => "verified",
            LoopVerdict::Refuted => "refuted",
            LoopVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvariantResult {
    /// `V` followed by the initial-value copies `V0`.
    pub inv_ring: Arc<PolyRing>,
    /// Candidates that passed consecution, in `mu` order.
    pub invariants: Vec<Invariant>,
    pub mus: Vec<i64>,
    pub verdict: LoopVerdict,
    pub queries: Vec<Query>,
    /// Family members discarded by the consecution re-check.
    pub rejected: usize,
}

impl InvariantResult {
    /// Candidates known to vanish on every reachable state.
    pub fn established(&self) -> impl Iterator<Item = &Invariant> {
        self.invariants.iter().filter(|i| i.established())
    }
}
