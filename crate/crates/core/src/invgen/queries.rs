use std::collections::BTreeSet;
use std::sync::Arc;

use crate::frontend::printer::{atom_to_smt, bv_sort};
use crate::poly::{Poly, PolyRing};
use crate::satcheck::{solve, Formula, SolveConfig, Verdict};

use super::{Atom, InvariantForm, InvariantResult, LoopProblem, LoopVerdict, Mode, RelOp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Initiation,
    Verification,
    Refutation,
}

impl QueryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QueryKind::Initiation => "initiation",
            QueryKind::Verification => "verification",
            QueryKind::Refutation => "refutation",
        }
    }
}

/// Outcome of checking that an implication is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discharge {
    Valid,
    /// A counterexample exists.
    Invalid,
    Unknown(String),
    /// Contains order comparisons; left to an external solver.
    External,
}

impl Discharge {
    pub fn as_str(&self) -> &'static str {
        match self {
            Discharge::Valid => "valid",
            Discharge::Invalid => "invalid",
            Discharge::Unknown(_) => "unknown",
            Discharge::External => "external",
        }
    }
}

/// An implication rendered as a QF_BV script that asserts its negation:
/// `unsat` means the implication is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub mu: i64,
    pub kind: QueryKind,
    pub smt2: String,
    pub status: Discharge,
}

struct Builder<'a> {
    ring: &'a Arc<PolyRing>,
    asserts: Vec<String>,
    formulas: Option<Vec<Formula>>,
    used: BTreeSet<usize>,
}

impl<'a> Builder<'a> {
    fn new(ring: &'a Arc<PolyRing>) -> Self {
        Builder {
            ring,
            asserts: Vec::new(),
            formulas: Some(Vec::new()),
            used: BTreeSet::new(),
        }
    }

    fn touch(&mut self, a: &Atom) {
        self.used.extend(a.lhs.variables());
        self.used.extend(a.rhs.variables());
    }

    fn push(&mut self, text: String, f: Option<Formula>) {
        self.asserts.push(text);
        match (f, self.formulas.as_mut()) {
            (Some(f), Some(fs)) => fs.push(f),
            _ => self.formulas = None,
        }
    }

    fn atom(&mut self, a: Atom) {
        self.touch(&a);
        self.push(atom_to_smt(&a), a.to_formula());
    }

    /// Asserts the negation of the conjunction of `atoms`.
    fn not_all(&mut self, atoms: Vec<Atom>) {
        for a in &atoms {
            self.touch(a);
        }
        let f: Option<Vec<Formula>> = atoms.iter().map(Atom::to_formula).collect();
        let text = match atoms.len() {
            0 => "false".to_string(),
            1 => format!("(not {})", atom_to_smt(&atoms[0])),
            _ => {
                let parts: Vec<String> = atoms.iter().map(atom_to_smt).collect();
                format!("(not (and {}))", parts.join(" "))
            }
        };
        self.push(text, f.map(|fs| Formula::negation(Formula::And(fs))));
    }

    fn finish(self, comment: &str, cfg: &SolveConfig) -> (String, Discharge) {
        let mut s = format!("; {comment}\n(set-logic QF_BV)\n");
        let sort = bv_sort(self.ring.width());
        for &v in &self.used {
            s.push_str(&format!("(declare-const {} {sort})\n", self.ring.vars()[v]));
        }
        for a in &self.asserts {
            s.push_str(&format!("(assert {a})\n"));
        }
        s.push_str("(check-sat)\n");
        let status = match self.formulas {
            None => Discharge::External,
            Some(fs) => match solve(self.ring, &Formula::And(fs), cfg) {
                Ok(Verdict::Unsat(_)) => Discharge::Valid,
                Ok(Verdict::Sat(_)) => Discharge::Invalid,
                Ok(Verdict::Unknown(r)) => Discharge::Unknown(r),
                Err(e) => Discharge::Unknown(e.to_string()),
            },
        };
        (s, status)
    }
}

fn fresh_constants(count: usize, taken: &[String]) -> Vec<String> {
    let base: Vec<String> = if count == 1 {
        vec!["c_s".to_string()]
    } else {
        (1..=count).map(|i| format!("c_s{i}")).collect()
    };
    base.into_iter()
        .map(|mut name| {
            while taken.contains(&name) {
                name.push('_');
            }
            name
        })
        .collect()
}

/// Builds the initiation and verification (or refutation) queries for each
/// multiplier and discharges the equational ones internally. The verdict is
/// set by the first multiplier whose main query and every included
/// initiation query are valid.
pub fn build_queries(result: &mut InvariantResult, lp: &LoopProblem, cfg: &SolveConfig) {
    let n = lp.ring().nvars();
    let cur: Vec<usize> = (0..n).collect();
    let init: Vec<usize> = (n..2 * n).collect();
    let mut queries = Vec::new();
    for &mu in &result.mus {
        let members: Vec<_> = result.invariants.iter().filter(|i| i.mu == mu).collect();
        if members.is_empty() {
            continue;
        }
        let relative: Vec<_> = members
            .iter()
            .filter(|i| i.form == InvariantForm::Relative)
            .collect();
        let cs = fresh_constants(relative.len(), result.inv_ring.vars());
        let qring = result.inv_ring.extend(&cs);
        let zero = Poly::zero(&qring);

        let mut included = Vec::new();
        let mut initiations_valid = true;
        let concrete = members.iter().filter(|i| i.form == InvariantForm::Concrete);
        for (idx, inv) in concrete.enumerate() {
            let mut b = Builder::new(&qring);
            for a in &lp.pre {
                b.atom(a.embed(&qring, &init));
            }
            let eta0 = inv.eta.embed(&qring, &init);
            b.not_all(vec![Atom::new(RelOp::Eq, eta0, zero.clone())]);
            let (smt2, _) = b.finish(&format!("mu = {mu}, initiation of {}", inv.eta), cfg);
            queries.push(Query {
                name: format!("mu{mu}-init-{}", idx + 1),
                mu,
                kind: QueryKind::Initiation,
                smt2,
                status: inv.initiation.clone(),
            });
            match inv.initiation {
                Discharge::Valid => included.push(*inv),
                Discharge::External => {
                    included.push(*inv);
                    initiations_valid = false;
                }
                Discharge::Invalid | Discharge::Unknown(_) => {}
            }
        }
        if included.is_empty() && relative.is_empty() {
            continue;
        }

        let mut b = Builder::new(&qring);
        if !relative.is_empty() {
            for a in &lp.pre {
                b.atom(a.embed(&qring, &init));
            }
        }
        let c_vars: Vec<Poly> = (0..cs.len())
            .map(|i| Poly::var(&qring, 2 * n + i))
            .collect();
        for (inv, c) in relative.iter().zip(&c_vars) {
            b.atom(Atom::new(
                RelOp::Eq,
                &inv.eta.embed(&qring, &init) + c,
                zero.clone(),
            ));
        }
        for (inv, c) in relative.iter().zip(&c_vars) {
            b.atom(Atom::new(
                RelOp::Eq,
                &inv.eta.embed(&qring, &cur) + c,
                zero.clone(),
            ));
        }
        for inv in &included {
            b.atom(Atom::new(
                RelOp::Eq,
                inv.eta.embed(&qring, &cur),
                zero.clone(),
            ));
        }
        b.not_all(lp.guard.iter().map(|a| a.embed(&qring, &cur)).collect());
        let post: Vec<Atom> = lp.post.iter().map(|a| a.embed(&qring, &cur)).collect();
        let kind = match lp.mode {
            Mode::Verify => {
                b.not_all(post);
                QueryKind::Verification
            }
            Mode::Refute => {
                for a in post {
                    b.atom(a);
                }
                QueryKind::Refutation
            }
        };
        let (smt2, status) = b.finish(&format!("mu = {mu}, {}", kind.as_str()), cfg);
        if status == Discharge::Valid && initiations_valid && result.verdict == LoopVerdict::Unknown
        {
            result.verdict = match lp.mode {
                Mode::Verify => LoopVerdict::Verified,
                Mode::Refute => LoopVerdict::Refuted,
            };
        }
        queries.push(Query {
            name: format!("mu{mu}-{}", kind.as_str()),
            mu,
            kind,
            smt2,
            status,
        });
    }
    result.queries = queries;
}
