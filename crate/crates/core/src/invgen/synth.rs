use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::groebner::{normal_form, strong_groebner_with_budget, GroebnerError, DEFAULT_GB_BUDGET};
use crate::linalg::{rational_nullspace, shift_solutions, solve_congruence, IntMatrix};
use crate::poly::{Poly, PolyRing};
use crate::ring::{modulus, ResidueInt};
use crate::satcheck::{solve, Formula, SolveConfig, Verdict};

use super::param::{make_template, pnf, ParamPoly};
use super::queries::{build_queries, Discharge};
use super::{
    Invariant, InvariantForm, InvariantResult, LoopError, LoopProblem, LoopVerdict, RelOp,
};

#[derive(Debug, Clone)]
pub struct InvgenConfig {
    /// Template degree `k >= 1`.
    pub degree: u32,
    /// Multipliers tried, processed in ascending order.
    pub mus: Vec<i64>,
    /// Family members materialized per multiplier.
    pub cap: usize,
    pub gb_budget: usize,
    pub solve: SolveConfig,
}

impl Default for InvgenConfig {
    fn default() -> Self {
        InvgenConfig {
            degree: 1,
            mus: vec![-1, 0, 1],
            cap: 32,
            gb_budget: DEFAULT_GB_BUDGET,
            solve: SolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("template degree must be at least 1")]
    ZeroDegree,
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

/// Strong Gröbner basis of the transition ideal.
pub fn transition_basis(lp: &LoopProblem, budget: usize) -> Result<Vec<Poly>, GroebnerError> {
    let polys = lp.trans_polys();
    Ok(strong_groebner_with_budget(lp.trans_ring(), &polys, budget)?.into_gens())
}

/// `pnf(eta' - mu*eta | gb)` for the template `eta` over the loop variables.
pub fn consecution_pnf(lp: &LoopProblem, template: &ParamPoly, gb: &[Poly], mu: i64) -> ParamPoly {
    let n = lp.ring().nvars();
    let tr = lp.trans_ring();
    let primed: Vec<usize> = (0..n).collect();
    let plain: Vec<usize> = (n..2 * n).collect();
    let next = template.embed(tr, &primed);
    let cur = template.embed(tr, &plain);
    let diff = next.add_scaled(&cur, &ResidueInt::from_i64(-mu, lp.width()));
    pnf(&diff, gb)
}

/// One row per surviving coefficient form of the parametric normal form,
/// in descending monomial order; columns follow the template parameters.
pub fn congruence_rows(reduced: &ParamPoly) -> IntMatrix {
    let rows: Vec<Vec<BigInt>> = reduced
        .terms()
        .into_iter()
        .map(|(_, f)| f.signed_coeffs())
        .collect();
    if rows.is_empty() {
        IntMatrix::zeros(0, reduced.params().len())
    } else {
        IntMatrix::from_rows(&rows)
    }
}

/// Congruence system `C * lambda = 0 (mod 2^d)` whose solutions make
/// `eta' - mu*eta` reduce to zero.
pub fn consecution_system(lp: &LoopProblem, k: u32, mu: i64) -> Result<IntMatrix, SynthError> {
    if k == 0 {
        return Err(SynthError::ZeroDegree);
    }
    let template = make_template(lp.ring(), k);
    let gb = transition_basis(lp, DEFAULT_GB_BUDGET)?;
    Ok(congruence_rows(&consecution_pnf(lp, &template, &gb, mu)))
}

/// Solutions of `c * x = 0 (mod 2^d)`: the particular solution, its shifts
/// along each scaled nullspace vector of `[c | -2^d I]`, then pairwise sums
/// of the shifts, up to `cap` members.
pub fn solution_family(c: &IntMatrix, d: u32, cap: usize) -> Vec<Vec<BigInt>> {
    let md = BigInt::from(modulus(d));
    let zero_rhs = vec![BigInt::zero(); c.rows()];
    let lambda0 =
        solve_congruence(c, &zero_rhs, d).unwrap_or_else(|| vec![BigInt::zero(); c.cols()]);
    let ns = rational_nullspace(&c.augment_scaled_identity(&-md.clone()));
    let shifted = shift_solutions(&lambda0, &ns, d);
    let base = shifted[0].clone();
    let deltas: Vec<Vec<BigInt>> = shifted[1..]
        .iter()
        .map(|m| m.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    let mut out = vec![base.clone()];
    let push = |v: Vec<BigInt>, out: &mut Vec<Vec<BigInt>>| {
        let v: Vec<BigInt> = v.into_iter().map(|x| x.mod_floor(&md)).collect();
        if out.len() < cap && !out.contains(&v) {
            out.push(v);
        }
    };
    for dl in &deltas {
        push(base.iter().zip(dl).map(|(a, b)| a + b).collect(), &mut out);
    }
    for i in 0..deltas.len() {
        for j in i + 1..deltas.len() {
            let v = base
                .iter()
                .zip(&deltas[i])
                .zip(&deltas[j])
                .map(|((a, b), c)| a + b + c)
                .collect();
            push(v, &mut out);
        }
    }
    out.retain(|v| c.mul_vec(v).iter().all(|r| r.mod_floor(&md).is_zero()));
    out
}

fn residues(v: &[BigInt], d: u32) -> Vec<ResidueInt> {
    v.iter().map(|x| ResidueInt::from_bigint(x, d)).collect()
}

/// Names for the initial-value copies: `x0` unless taken.
fn initial_names(vars: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in vars {
        let mut name = format!("{v}0");
        while vars.contains(&name) || out.contains(&name) {
            name.push('0');
        }
        out.push(name);
    }
    out
}

/// `pre(V) => eta(V) = 0` decided internally when `pre` is equational.
fn initiation_check(
    lp: &LoopProblem,
    pre_gb: Option<&[Poly]>,
    eta: &Poly,
    cfg: &SolveConfig,
) -> Discharge {
    if let Some(gb) = pre_gb {
        if normal_form(eta, gb).is_zero() {
            return Discharge::Valid;
        }
    }
    let mut parts = Vec::new();
    for a in &lp.pre {
        match a.to_formula() {
            Some(f) => parts.push(f),
            None => return Discharge::External,
        }
    }
    parts.push(Formula::neq(eta.clone(), Poly::zero(lp.ring())));
    match solve(lp.ring(), &Formula::And(parts), cfg) {
        Ok(Verdict::Unsat(_)) => Discharge::Valid,
        Ok(Verdict::Sat(_)) => Discharge::Invalid,
        Ok(Verdict::Unknown(r)) => Discharge::Unknown(r),
        Err(e) => Discharge::Unknown(e.to_string()),
    }
}

/// Runs template instantiation, parametric reduction and congruence
/// solving for every multiplier, then builds and discharges the queries.
pub fn synthesize(lp: &LoopProblem, cfg: &InvgenConfig) -> Result<InvariantResult, SynthError> {
    if cfg.degree == 0 {
        return Err(SynthError::ZeroDegree);
    }
    lp.check()?;
    let d = lp.width();
    let ring = lp.ring();
    let n = ring.nvars();
    let template = make_template(ring, cfg.degree);
    let gb = transition_basis(lp, cfg.gb_budget)?;

    let mut inv_vars = ring.vars().to_vec();
    inv_vars.extend(initial_names(ring.vars()));
    let inv_ring = PolyRing::with_vars(d, &inv_vars);
    let cur: Vec<usize> = (0..n).collect();
    let init: Vec<usize> = (n..2 * n).collect();

    let pre_eqs: Vec<Poly> = lp
        .pre
        .iter()
        .filter(|a| a.op == RelOp::Eq)
        .map(|a| &a.lhs - &a.rhs)
        .collect();
    let pre_gb = strong_groebner_with_budget(ring, &pre_eqs, cfg.gb_budget)
        .ok()
        .map(|g| g.into_gens());

    let mut mus = cfg.mus.clone();
    mus.sort_unstable();
    mus.dedup();

    let tr = lp.trans_ring();
    let embed_t = |p: &Poly, map: &[usize]| p.embed(tr, map);
    let primed_map: Vec<usize> = (0..n).collect();
    let plain_map: Vec<usize> = (n..2 * n).collect();

    let mut invariants: Vec<Invariant> = Vec::new();
    let mut rejected = 0;
    for &mu in &mus {
        let reduced = consecution_pnf(lp, &template, &gb, mu);
        let c = congruence_rows(&reduced);
        let mu_r = ResidueInt::from_i64(mu, d);
        for member in solution_family(&c, d, cfg.cap) {
            let lambda = residues(&member, d);
            let full = template.instantiate(&lambda);
            let check = &embed_t(&full, &primed_map) - &embed_t(&full, &plain_map).scale(&mu_r);
            if !normal_form(&check, &gb).is_zero() {
                rejected += 1;
                continue;
            }
            let mut no_xi = lambda.clone();
            *no_xi.last_mut().expect("template has xi") = ResidueInt::zero(d);
            let eta0 = template.instantiate(&no_xi);
            if eta0.is_zero() {
                continue;
            }
            let inv = if mu == 1 {
                let eta0 = eta0.normalize_unit();
                let k = pre_gb
                    .as_deref()
                    .map(|g| normal_form(&eta0, g))
                    .filter(Poly::is_constant);
                match k {
                    Some(k) => {
                        let eta = &eta0 - &k;
                        Invariant {
                            mu,
                            form: InvariantForm::Concrete,
                            poly: eta.embed(&inv_ring, &cur),
                            eta,
                            initiation: Discharge::Valid,
                        }
                    }
                    None => Invariant {
                        mu,
                        form: InvariantForm::Relative,
                        poly: &eta0.embed(&inv_ring, &cur) - &eta0.embed(&inv_ring, &init),
                        eta: eta0,
                        initiation: Discharge::Valid,
                    },
                }
            } else {
                let eta = full.normalize_unit();
                let initiation = initiation_check(lp, pre_gb.as_deref(), &eta, &cfg.solve);
                if initiation == Discharge::Invalid {
                    continue;
                }
                Invariant {
                    mu,
                    form: InvariantForm::Concrete,
                    poly: eta.embed(&inv_ring, &cur),
                    eta,
                    initiation,
                }
            };
            if !invariants.iter().any(|i| i.mu == mu && i.poly == inv.poly) {
                invariants.push(inv);
            }
        }
    }

    let mut result = InvariantResult {
        inv_ring,
        invariants,
        mus,
        verdict: LoopVerdict::Unknown,
        queries: Vec::new(),
        rejected,
    };
    build_queries(&mut result, lp, &cfg.solve);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::invgen::{Atom, Mode};

    fn p(r: &Arc<PolyRing>, s: &str) -> Poly {
        Poly::parse(r, s).unwrap()
    }

    fn section_loop(d: u32) -> LoopProblem {
        let mut lp = LoopProblem::new(d, &["x", "y"], Mode::Verify);
        let r = lp.ring().clone();
        lp.assign(0, &p(&r, "x + 1"));
        lp.assign(1, &p(&r, "y + x"));
        lp
    }

    fn counting_loop(d: u32) -> LoopProblem {
        let mut lp = LoopProblem::new(d, &["x", "y"], Mode::Verify);
        let r = lp.ring().clone();
        lp.pre.push(Atom::new(RelOp::Eq, p(&r, "x"), p(&r, "1")));
        lp.pre.push(Atom::new(RelOp::Eq, p(&r, "y"), p(&r, "9")));
        lp.guard.push(Atom::new(RelOp::Neq, p(&r, "y"), p(&r, "0")));
        lp.assign(0, &p(&r, "x + 1"));
        lp.assign(1, &p(&r, "y + 1"));
        lp.post
            .push(Atom::new(RelOp::Lt, p(&r, "y - x"), p(&r, "10")));
        lp
    }

    #[test]
    fn quadratic_consecution_reduction() {
        let lp = section_loop(4);
        let gb = transition_basis(&lp, DEFAULT_GB_BUDGET).unwrap();
        let t = make_template(lp.ring(), 2);
        let reduced = consecution_pnf(&lp, &t, &gb, 1);
        assert_eq!(
            reduced.to_string(),
            "(l2 + l3)*x^2 + 2*l3*x*y + (2*l1 + l2 + l5)*x + l2*y + (l1 + l4)"
        );
        let c = consecution_system(&lp, 2, 1).unwrap();
        let expected = IntMatrix::from_rows(&[
            vec![0, 1, 1, 0, 0, 0],
            vec![0, 0, 2, 0, 0, 0],
            vec![2, 1, 0, 0, 1, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![1, 0, 0, 1, 0, 0],
        ]);
        assert_eq!(c, expected);
    }

    #[test]
    fn counting_loop_invariant() {
        let lp = counting_loop(32);
        let res = synthesize(&lp, &InvgenConfig::default()).unwrap();
        let mu1: Vec<String> = res
            .invariants
            .iter()
            .filter(|i| i.mu == 1)
            .map(|i| i.poly.to_string())
            .collect();
        assert_eq!(mu1, vec!["x - y + 8"]);
        assert_eq!(res.rejected, 0);
    }

    #[test]
    fn frozen_variable_takes_initial_value() {
        let mut lp = LoopProblem::new(8, &["x"], Mode::Verify);
        let r = lp.ring().clone();
        lp.pre.push(Atom::new(RelOp::Eq, p(&r, "x"), p(&r, "5")));
        lp.assign(0, &p(&r, "x"));
        let res = synthesize(&lp, &InvgenConfig::default()).unwrap();
        let polys: Vec<String> = res.established().map(|i| i.poly.to_string()).collect();
        assert!(polys.contains(&"x - 5".to_string()), "{polys:?}");
    }

    #[test]
    fn families_satisfy_their_systems() {
        let lp = section_loop(4);
        let c = consecution_system(&lp, 2, 1).unwrap();
        let fam = solution_family(&c, 4, 32);
        assert!(fam.len() > 1);
        let md = BigInt::from(16);
        for v in &fam {
            assert!(c.mul_vec(v).iter().all(|r| r.mod_floor(&md).is_zero()));
        }
    }
}
