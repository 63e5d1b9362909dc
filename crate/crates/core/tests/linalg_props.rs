mod common;

use modsmt::linalg::{smith_normal_form, solve_congruence, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use common::algebra::{det, mat_mul, residues_of_product};

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-30i64..=30, n), m))
}

fn big(a: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

proptest! {
    #[test]
    fn smith_form_decomposes(a in matrix()) {
        let snf = smith_normal_form(&IntMatrix::from_rows(&a));
        let (u, s, v) = (snf.u.to_rows(), snf.s.to_rows(), snf.v.to_rows());
        prop_assert_eq!(mat_mul(&mat_mul(&u, &big(&a)), &v), s.clone());
        prop_assert_eq!(det(&u).abs(), BigInt::from(1));
        prop_assert_eq!(det(&v).abs(), BigInt::from(1));
        let diag = snf.diagonal();
        for (i, row) in s.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                prop_assert!(i == j || x.is_zero());
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            let chained = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            prop_assert!(chained, "{:?}", diag);
        }
    }

    #[test]
    fn congruence_solutions_satisfy(a in matrix(), d in 1u32..=40, seed in prop::collection::vec(-1000i64..1000, 5)) {
        // Right-hand sides in the image are always solvable.
        let x0: Vec<BigInt> = seed[..a[0].len()].iter().map(|&v| BigInt::from(v)).collect();
        let b = residues_of_product(&big(&a), &x0, d);
        let x = solve_congruence(&IntMatrix::from_rows(&a), &b, d);
        prop_assert!(x.is_some());
        prop_assert_eq!(residues_of_product(&big(&a), &x.unwrap(), d), b);
    }
}
