mod common;

use common::laws;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed};

fn config() -> Config {
    Config {
        cases: 1000,
        rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(7),
        failure_persistence: None,
        ..Config::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generated_terms_check(seed in any::<u64>()) {
        laws::generated_terms_check(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn subst_preserves_sort(seed in any::<u64>()) {
        laws::subst_preserves_sort(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rename_preserves_sort(seed in any::<u64>()) {
        laws::rename_preserves_sort(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn msubst_preserves_sort(seed in any::<u64>()) {
        laws::msubst_preserves_sort(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rename_is_functorial(seed in any::<u64>()) {
        laws::rename_is_functorial(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rename_depends_only_on_support(seed in any::<u64>()) {
        laws::rename_depends_only_on_support(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn free_variables_of_substitution(seed in any::<u64>()) {
        laws::free_variables_of_substitution(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn vacuous_operations(seed in any::<u64>()) {
        laws::vacuous_operations(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn operations_respect_alpha(seed in any::<u64>()) {
        laws::operations_respect_alpha(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn simultaneous_swap_is_not_iterated(seed in any::<u64>()) {
        laws::simultaneous_swap_is_not_iterated(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn substitutions_compose(seed in any::<u64>()) {
        laws::substitutions_compose(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn parse_print_round_trip(seed in any::<u64>()) {
        laws::parse_print_round_trip(seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn interpret_matches_composition(seed in any::<u64>()) {
        laws::interpret_matches_composition(seed).map_err(TestCaseError::fail)?;
    }
}
