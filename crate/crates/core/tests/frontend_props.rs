mod common;

use modsmt::frontend::{lower, parse_loop, parse_smt2, print_loop, print_script};
use modsmt::poly::OrderKind;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::scripts::{mutate, random_loop_text, random_script};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scripts_round_trip(seed in any::<u64>()) {
        let text = random_script(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = parse_smt2(&text).unwrap();
        let printed = print_script(&a);
        prop_assert_eq!(parse_smt2(&printed).unwrap(), a);
        prop_assert_eq!(print_script(&parse_smt2(&printed).unwrap()), printed);
    }

    #[test]
    fn loops_round_trip(seed in any::<u64>()) {
        let text = random_loop_text(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = print_loop(&parse_loop(&text).unwrap());
        prop_assert_eq!(print_loop(&parse_loop(&a).unwrap()), a);
    }

    #[test]
    fn mutants_never_panic(seed in any::<u64>(), smt in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = if smt { random_script(&mut rng) } else { random_loop_text(&mut rng) };
        let text = mutate(&mut rng, &text);
        let err = if smt {
            parse_smt2(&text).map(|s| { lower(&s, OrderKind::GradedLex); }).err()
        } else {
            parse_loop(&text).map(|_| ()).err()
        };
        if let Some(d) = err {
            prop_assert!(d.span.is_valid(), "{:?}", d);
        }
    }
}
