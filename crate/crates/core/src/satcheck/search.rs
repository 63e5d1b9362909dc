//! Backtracking root search over a strong Gröbner basis.

use std::sync::Arc;

use crate::groebner::{bounded_groebner, has_nonzero_constant, interreduce};
use crate::poly::{Poly, PolyRing};
use crate::ring::ResidueInt;

use super::factor::nonconstant_split;
use super::roots::{first_common_root, roots_exhaustive, univariate_roots, CommonRoot};
use super::{SolveConfig, UnsatCert};

/// Partial roots visited when a variable occurs only in univariate members.
const ISOLATED_ROOT_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    /// Total assignment over every ring variable.
    Model(Vec<ResidueInt>),
    Empty(UnsatCert),
    BudgetExceeded(String),
}

struct Search<'a> {
    ring: &'a Arc<PolyRing>,
    cfg: &'a SolveConfig,
    /// Variables with index below this are preferred when branching.
    preferred: usize,
    nodes: usize,
}

enum Step {
    Found(Vec<ResidueInt>),
    Empty,
}

type StepResult = Result<Step, String>;

/// Common zero of `h`, or a proof that none exists, or budget exhaustion.
///
/// Variables with index below `preferred` are chosen first when the search
/// has to enumerate values.
pub fn find_zeros(
    ring: &Arc<PolyRing>,
    h: &[Poly],
    preferred: usize,
    cfg: &SolveConfig,
) -> SearchResult {
    let mut s = Search {
        ring,
        cfg,
        preferred,
        nodes: 0,
    };
    let root = match s.basis(h) {
        Ok(g) => g,
        Err(e) => return SearchResult::BudgetExceeded(e),
    };
    if let Some(c) = has_nonzero_constant(&root) {
        return SearchResult::Empty(UnsatCert::Constant(c));
    }
    let mut model = vec![None; ring.nvars()];
    match s.descend(root, &mut model, 0) {
        Ok(Step::Found(m)) => {
            assert!(
                h.iter().all(|p| p.eval_point(&m).is_zero()),
                "search produced a non-model"
            );
            SearchResult::Model(m)
        }
        Ok(Step::Empty) => SearchResult::Empty(UnsatCert::Exhausted),
        Err(reason) => SearchResult::BudgetExceeded(reason),
    }
}

impl Search<'_> {
    fn bump(&mut self) -> Result<(), String> {
        self.nodes += 1;
        if self.nodes > self.cfg.node_budget {
            Err(format!("search exceeded {} nodes", self.cfg.node_budget))
        } else {
            Ok(())
        }
    }

    fn node(
        &mut self,
        h: Vec<Poly>,
        model: &mut Vec<Option<ResidueInt>>,
        splits: u32,
    ) -> StepResult {
        self.bump()?;
        let gens = self.basis(&h)?;
        if has_nonzero_constant(&gens).is_some() {
            return Ok(Step::Empty);
        }
        let found = self.descend(gens.clone(), model, splits)?;
        if let Step::Found(m) = &found {
            debug_assert!(gens.iter().all(|p| p.eval_point(m).is_zero()));
        }
        Ok(found)
    }

    fn assign(
        &mut self,
        gens: &[Poly],
        model: &mut Vec<Option<ResidueInt>>,
        var: usize,
        value: ResidueInt,
        splits: u32,
    ) -> StepResult {
        let h: Vec<Poly> = gens.iter().map(|p| p.substitute(var, &value)).collect();
        model[var] = Some(value);
        let r = self.node(h, model, splits);
        if !matches!(r, Ok(Step::Found(_))) {
            model[var] = None;
        }
        r
    }

    /// Strong Gröbner basis of `h`, or the partial basis reached within the
    /// per-node budget. Either way the result generates the same ideal as
    /// `h`, so branching on it stays sound and complete.
    fn basis(&self, h: &[Poly]) -> Result<Vec<Poly>, String> {
        bounded_groebner(self.ring, h, self.cfg.gb_budget)
            .map(|(g, _)| interreduce(g.into_gens()))
            .map_err(|e| e.to_string())
    }

    /// Branching on a basis already known to contain no nonzero constant.
    fn descend(
        &mut self,
        gens: Vec<Poly>,
        model: &mut Vec<Option<ResidueInt>>,
        splits: u32,
    ) -> StepResult {
        let d = self.ring.width();
        if gens.is_empty() {
            let total = model
                .iter()
                .map(|v| v.clone().unwrap_or_else(|| ResidueInt::zero(d)))
                .collect();
            return Ok(Step::Found(total));
        }

        // A variable confined to univariate members needs only one common
        // root of those members.
        for p in &gens {
            let vars = p.variables();
            if vars.len() != 1 {
                continue;
            }
            let var = vars[0];
            let holders: Vec<&Poly> = gens.iter().filter(|q| q.contains_var(var)).collect();
            if holders.iter().any(|q| q.variables().len() != 1) {
                continue;
            }
            match first_common_root(&holders, var, ISOLATED_ROOT_BUDGET) {
                CommonRoot::Found(z) => return self.assign(&gens, model, var, z, splits),
                CommonRoot::None => return Ok(Step::Empty),
                CommonRoot::BudgetExceeded => {}
            }
        }

        // Univariate member with the fewest roots.
        let mut best: Option<(usize, Vec<ResidueInt>)> = None;
        for p in &gens {
            let vars = p.variables();
            if vars.len() != 1 {
                continue;
            }
            let roots = match univariate_roots(p, vars[0]) {
                Some(r) => r,
                None if d <= 16 => roots_exhaustive(p, vars[0]),
                None => return Err("root lifting frontier too large".into()),
            };
            if best.as_ref().is_none_or(|(_, r)| roots.len() < r.len()) {
                best = Some((vars[0], roots));
            }
        }
        if let Some((var, roots)) = best {
            for z in roots {
                if let Step::Found(m) = self.assign(&gens, model, var, z, splits)? {
                    return Ok(Step::Found(m));
                }
            }
            return Ok(Step::Empty);
        }

        if splits < self.cfg.factor_depth {
            let split = gens
                .iter()
                .enumerate()
                .find_map(|(i, p)| nonconstant_split(p).map(|fg| (i, fg)));
            if let Some((i, (f, g))) = split {
                for e in 0..=d {
                    let mut h: Vec<Poly> = gens
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, p)| p.clone())
                        .collect();
                    h.push(f.scale(&ResidueInt::pow2(e, d)));
                    h.push(g.scale(&ResidueInt::pow2(d - e, d)));
                    if let Step::Found(m) = self.node(h, model, splits + 1)? {
                        return Ok(Step::Found(m));
                    }
                }
                return Ok(Step::Empty);
            }
        }

        let var = self.pick_variable(&gens);
        if d > 24 {
            return Err(format!("exhaustive branch over width {d}"));
        }
        for z in 0..1u64 << d {
            let z = ResidueInt::from_u64(z, d);
            if let Step::Found(m) = self.assign(&gens, model, var, z, splits)? {
                return Ok(Step::Found(m));
            }
        }
        Ok(Step::Empty)
    }

    /// Variable occurring in the most basis members; preferred variables
    /// first, ties by index.
    fn pick_variable(&self, gens: &[Poly]) -> usize {
        let mut counts = vec![0usize; self.ring.nvars()];
        for p in gens {
            for v in p.variables() {
                counts[v] += 1;
            }
        }
        (0..counts.len())
            .filter(|&v| counts[v] > 0)
            .max_by_key(|&v| (v < self.preferred, counts[v], std::cmp::Reverse(v)))
            .expect("a non-constant basis member has a variable")
    }
}
