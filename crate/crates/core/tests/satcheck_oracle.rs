mod common;

use std::time::Instant;

use common::*;
use modsmt::poly::PolyRing;
use modsmt::satcheck::{solve, Formula, SolveConfig, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn small_random_conjunctions_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    for case in 0..500 {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=8);
        let lits = random_conjunction(&mut rng, n, d);
        let ring = PolyRing::with_vars(d, &var_names(n));
        let formula = Formula::And(
            lits.iter()
                .map(|l| {
                    let (a, b) = (l.lhs.to_poly(&ring), l.rhs.to_poly(&ring));
                    if l.eq {
                        Formula::eq(a, b)
                    } else {
                        Formula::neq(a, b)
                    }
                })
                .collect(),
        );
        let truth = brute_force(&lits, n, d);
        let verdict = solve(&ring, &formula, &SolveConfig::default()).unwrap();
        match (&verdict, &truth) {
            (Verdict::Sat(m), Some(_)) => {
                let point: Vec<u64> = m.iter().map(|(_, v)| to_u64(v)).collect();
                assert!(lits.iter().all(|l| l.holds(&point, d)), "case {case}");
            }
            (Verdict::Unsat(_), None) => {}
            _ => panic!("case {case}: {verdict:?} vs {truth:?}; {lits:?}"),
        }
    }
    assert!(start.elapsed().as_secs() < 120);
}
