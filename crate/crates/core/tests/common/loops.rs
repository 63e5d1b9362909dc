//! Random single-loop programs with a machine-arithmetic simulator.

use modsmt::invgen::{Atom, LoopProblem, Mode, RelOp};
use modsmt::poly::Poly;
use rand::Rng;

use super::{mask, random_small_raw, RawLit, RawPoly};

#[derive(Debug, Clone)]
pub struct FuzzLoop {
    pub lp: LoopProblem,
    pub n: usize,
    pub d: u32,
    /// Initial value of each variable; `None` ranges over all values.
    pub init: Vec<Option<u64>>,
    /// Next-state expression per variable, over the current state.
    pub updates: Vec<RawPoly>,
    pub guard: Option<RawLit>,
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

fn random_update<R: Rng>(rng: &mut R, n: usize, i: usize, d: u32) -> RawPoly {
    let c = rng.gen_range(-3i64..=3);
    let j = rng.gen_range(0..n);
    let mut terms = match rng.gen_range(0..5) {
        0 => vec![(1, unit(n, i)), (c, vec![0; n])],
        1 => vec![(1, unit(n, i)), (1, unit(n, j))],
        2 => vec![(rng.gen_range(-3i64..=3), unit(n, i)), (c, unit(n, j))],
        3 => vec![
            (1, unit(n, i)),
            (2i64.pow(rng.gen_range(0..d.min(4))), unit(n, j)),
        ],
        _ => random_small_raw(rng, n, 2, 3).terms,
    };
    if rng.gen_bool(0.2) {
        let mut e = unit(n, i);
        e[j] += 1;
        terms.push((rng.gen_range(-2i64..=2), e));
    }
    RawPoly { terms }
}

/// A loop over `n <= n_max` variables with equational `pre` pinning all but
/// at most one variable.
pub fn random_loop<R: Rng>(rng: &mut R, n_max: usize, d: u32) -> FuzzLoop {
    let n = rng.gen_range(1..=n_max);
    let names: Vec<String> = ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect();
    let mut lp = LoopProblem::new(d, &names, Mode::Verify);
    let ring = lp.ring().clone();
    let free = if rng.gen_bool(0.3) {
        Some(rng.gen_range(0..n))
    } else {
        None
    };
    let init: Vec<Option<u64>> = (0..n)
        .map(|i| (Some(i) != free).then(|| rng.gen_range(0..=mask(d))))
        .collect();
    for (i, v) in init.iter().enumerate() {
        if let Some(v) = v {
            lp.pre.push(Atom::new(
                RelOp::Eq,
                Poly::var(&ring, i),
                Poly::from_u64(&ring, *v),
            ));
        }
    }
    let updates: Vec<RawPoly> = (0..n).map(|i| random_update(rng, n, i, d)).collect();
    for (i, u) in updates.iter().enumerate() {
        lp.assign(i, &u.to_poly(&ring));
    }
    let guard = rng.gen_bool(0.6).then(|| RawLit {
        lhs: RawPoly {
            terms: vec![(1, unit(n, rng.gen_range(0..n)))],
        },
        rhs: RawPoly::constant(rng.gen_range(0..=mask(d) as i64), n),
        eq: false,
    });
    if let Some(g) = &guard {
        lp.guard.push(Atom::new(
            RelOp::Neq,
            g.lhs.to_poly(&ring),
            g.rhs.to_poly(&ring),
        ));
    }
    lp.post.push(Atom::new(
        RelOp::Eq,
        Poly::var(&ring, 0),
        Poly::from_u64(&ring, rng.gen_range(0..=mask(d))),
    ));
    FuzzLoop {
        lp,
        n,
        d,
        init,
        updates,
        guard,
    }
}

impl FuzzLoop {
    pub fn initial_states(&self) -> Vec<Vec<u64>> {
        let mut states = vec![Vec::new()];
        for v in &self.init {
            let choices: Vec<u64> = match v {
                Some(c) => vec![*c],
                None => (0..=mask(self.d)).collect(),
            };
            states = states
                .into_iter()
                .flat_map(|s| {
                    choices.iter().map(move |c| {
                        let mut t = s.clone();
                        t.push(*c);
                        t
                    })
                })
                .collect();
        }
        states
    }

    /// States visited from `s0` within `max_steps` iterations, `s0` included.
    pub fn run(&self, s0: &[u64], max_steps: usize) -> Vec<Vec<u64>> {
        let mut out = vec![s0.to_vec()];
        let mut s = s0.to_vec();
        for _ in 0..max_steps {
            if let Some(g) = &self.guard {
                if !g.holds(&s, self.d) {
                    break;
                }
            }
            s = self.updates.iter().map(|u| u.eval(&s, self.d)).collect();
            out.push(s.clone());
        }
        out
    }
}
