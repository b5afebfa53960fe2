mod common;

use proptest::prelude::*;

use common::{answer_set, oracle, random_program, split, Shape, FAMILY};
use goalplan::{parse_program, parse_query, solve, SolveConfig, SolveError};

#[test]
fn family_matches_fixpoint() {
    for q in [
        "?- niece(X, Y).",
        "?- parent(X, Y).",
        "?- sibling(X, Y).",
        "?- grandparent(X, Y).",
        "?- auntuncle(A, N).",
    ] {
        let p = parse_program(FAMILY).unwrap();
        let got = answer_set(&p, &parse_query(q).unwrap(), &SolveConfig::default()).unwrap();
        assert_eq!(got, oracle(FAMILY, q), "{q}");
    }
}

#[test]
fn left_recursion_terminates_quickly() {
    let p = parse_program(FAMILY).unwrap();
    let cfg = SolveConfig {
        step_budget: 100_000,
        ..SolveConfig::default()
    };
    let mut s = solve(&p, &parse_query("?- parent(X, Y).").unwrap(), &cfg);
    let answers: Vec<_> = s.by_ref().collect::<Result<_, _>>().unwrap();
    assert!(!answers.is_empty());
    assert!(s.steps() < 100_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn resolution_agrees_with_fixpoint(seed in any::<u64>(), preds in 2usize..=6, facts in 1usize..=12, recursion in any::<bool>()) {
        let (p, q, text) = random_program(seed, Shape { preds, facts, naf: false, recursion });
        let (src, query) = split(&text);
        let got = answer_set(&p, &q, &SolveConfig::default());
        prop_assert!(got.is_ok(), "{:?}\n{}", got, text);
        prop_assert_eq!(got.unwrap(), oracle(src, query), "{}", text);
    }

    #[test]
    fn stream_under_small_budget_is_a_prefix(seed in any::<u64>(), budget in 1u64..400) {
        let (p, q, text) = random_program(seed, Shape { preds: 5, facts: 10, naf: true, recursion: true });
        let full: Vec<String> = solve(&p, &q, &SolveConfig::default()).map(|a| a.unwrap().to_string()).collect();
        let cfg = SolveConfig { step_budget: budget, ..SolveConfig::default() };
        let mut short = Vec::new();
        for a in solve(&p, &q, &cfg) {
            match a {
                Ok(a) => short.push(a.to_string()),
                Err(e) => {
                    prop_assert!(matches!(e, SolveError::BudgetExceeded { .. }), "{:?}", e);
                    break;
                }
            }
        }
        prop_assert!(full.starts_with(&short), "{}", text);
    }

    #[test]
    fn answers_are_deterministic(seed in any::<u64>()) {
        let (p, q, _) = random_program(seed, Shape { preds: 6, facts: 12, naf: true, recursion: true });
        let run = || solve(&p, &q, &SolveConfig::default()).map(|a| a.unwrap().to_string()).collect::<Vec<_>>();
        prop_assert_eq!(run(), run());
    }
}
