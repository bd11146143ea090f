mod common;

use common::gen;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use united::syntax::{
    parse_formula, parse_scripts, parse_strategy, parse_theory, print_formula, print_script, print_strategy,
    print_theory,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn theories(seed in any::<u64>()) {
        let th = gen::theory(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = print_theory(&th);
        let back = parse_theory(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, th);
    }

    #[test]
    fn formulas(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = gen::theory(&mut rng);
        let f = gen::formula(&mut rng, &th, 3);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, &th).map_err(|e| TestCaseError::fail(format!("{e}: {text}")))?, f);
    }

    #[test]
    fn scripts(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let th = gen::theory(&mut rng);
        let s = gen::script(&mut rng, &th);
        let text = print_script(&s);
        let back = parse_scripts(&text, &th).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, vec![s]);
    }

    #[test]
    fn strategies(seed in any::<u64>()) {
        let s = gen::strategy(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        prop_assert_eq!(parse_strategy(&print_strategy(&s)).unwrap(), s);
    }
}
