use proptest::prelude::*;

use goalplan::parser::{parse_clause, parse_term};
use goalplan::term::{unify, unify_with, variant_of};
use goalplan::{format_term, parse_program, Substitution, Term, Var};

fn atom() -> impl Strategy<Value = Term> {
    prop::sample::select(vec![
        "a",
        "b",
        "tony",
        "remotecontrol1",
        "[]",
        "Hello",
        "two words",
        "it's",
        "x\\y",
    ])
    .prop_map(Term::atom)
}

fn var() -> impl Strategy<Value = Term> {
    prop::sample::select(vec!["X", "Y", "Z", "_Tail", "State1"]).prop_map(Term::var)
}

fn term_with(leaf: impl Strategy<Value = Term> + 'static) -> impl Strategy<Value = Term> {
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (
                prop::sample::select(vec!["f", "g", "close", "odd name"]),
                prop::collection::vec(inner.clone(), 1..=3)
            )
                .prop_map(|(f, args)| Term::compound(f, args)),
            prop::collection::vec(inner.clone(), 0..=3).prop_map(Term::list),
            (prop::collection::vec(inner.clone(), 1..=2), inner)
                .prop_map(|(items, tail)| Term::list_with_tail(items, tail)),
        ]
    })
}

fn term() -> impl Strategy<Value = Term> {
    term_with(prop_oneof![3 => atom(), 2 => var(), 1 => (-50i64..50).prop_map(Term::int)])
}

fn ground() -> impl Strategy<Value = Term> {
    term_with(prop_oneof![atom(), (-5i64..5).prop_map(Term::int)])
}

/// Replaces the subterm at each visited position by a fresh variable with
/// probability encoded in `mask` bits; fresh names carry `prefix`.
fn generalize(t: &Term, mask: &mut impl Iterator<Item = bool>, prefix: &str, n: &mut usize) -> Term {
    if mask.next().unwrap_or(false) {
        *n += 1;
        return Term::var(format!("{prefix}{n}"));
    }
    match t {
        Term::Compound(c) => Term::compound(
            c.functor(),
            c.args().iter().map(|a| generalize(a, mask, prefix, n)).collect(),
        ),
        other => other.clone(),
    }
}

/// One-sided matching: does some substitution of `pattern`'s variables
/// turn it into `target`?
fn matches(pattern: &Term, target: &Term, b: &mut Vec<(Var, Term)>) -> bool {
    match (pattern, target) {
        (Term::Var(v), _) => match b.iter().find(|(w, _)| w == v) {
            Some((_, bound)) => bound == target,
            None => {
                b.push((v.clone(), target.clone()));
                true
            }
        },
        (Term::Compound(x), Term::Compound(y)) => {
            x.functor() == y.functor()
                && x.arity() == y.arity()
                && x.args().iter().zip(y.args()).all(|(p, q)| matches(p, q, b))
        }
        _ => pattern == target,
    }
}

fn rename(t: &Term, suffix: &str) -> Term {
    t.map_vars(&mut |v| Some(Term::var(format!("{}{suffix}", v.name()))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn print_then_parse_is_identity(t in term()) {
        let text = format_term(&t);
        prop_assert_eq!(parse_term(&text).unwrap(), t.clone(), "{}", text);
        prop_assert_eq!(format_term(&parse_term(&text).unwrap()), text);
    }

    #[test]
    fn clause_text_round_trips(h in term(), b in term()) {
        prop_assume!(h.functor().is_some() && b.functor().is_some());
        let src = format!("{} :- {}, not {}, X \\= Y.", format_term(&h), format_term(&b), format_term(&b));
        let Ok(c) = parse_clause(&src) else { return Ok(()) };
        let again = parse_program(&c.to_string()).unwrap();
        prop_assert_eq!(&again.clauses()[0], &c);
    }

    #[test]
    fn unifier_equalizes(a in term(), b in term()) {
        if let Some(s) = unify(&a, &b, &Substitution::new()) {
            prop_assert_eq!(s.apply(&a), s.apply(&b));
        }
    }

    #[test]
    fn apply_is_idempotent(a in term(), b in term()) {
        if let Some(s) = unify(&a, &b, &Substitution::new()) {
            let once = s.apply(&a);
            prop_assert_eq!(s.apply(&once), once);
        }
    }

    #[test]
    fn common_generalizations_unify_most_generally(g in ground(), ma in prop::collection::vec(prop::bool::weighted(0.3), 40), mb in prop::collection::vec(prop::bool::weighted(0.3), 40)) {
        let a = generalize(&g, &mut ma.into_iter(), "A", &mut 0);
        let b = generalize(&g, &mut mb.into_iter(), "B", &mut 0);
        let s = unify(&a, &b, &Substitution::new());
        prop_assert!(s.is_some(), "{} vs {}", a, b);
        let u = s.unwrap().apply(&a);
        // the common instance must be reachable from the unifier's result
        prop_assert!(matches(&u, &g, &mut Vec::new()), "{} does not generalize {}", u, g);
    }

    #[test]
    fn occurs_check_rejects_cycles(t in term()) {
        let x = Term::var("Cyc");
        let wrapped = Term::compound("f", vec![t.clone(), x.clone()]);
        prop_assert!(unify_with(&x, &wrapped, &Substitution::new(), true).is_none());
    }

    #[test]
    fn renaming_is_a_variant(t in term()) {
        let r = rename(&t, "_r");
        prop_assert!(variant_of(&t, &r));
        prop_assert!(variant_of(&r, &t));
    }

    #[test]
    fn binding_a_variable_breaks_variance(t in term()) {
        let vars = t.vars();
        prop_assume!(!vars.is_empty());
        let s = Substitution::new().bind(vars[0].clone(), Term::atom("zz_fresh"));
        prop_assert!(!variant_of(&t, &s.apply(&t)));
    }

    #[test]
    fn merging_variables_breaks_variance(t in term()) {
        let vars = t.vars();
        prop_assume!(vars.len() >= 2);
        let s = Substitution::new().bind(vars[0].clone(), Term::var(vars[1].name()));
        prop_assert!(!variant_of(&t, &s.apply(&t)));
    }
}

#[test]
fn unify_examples() {
    let t = |s: &str| parse_term(s).unwrap();
    let s = unify(&t("f(X, b)"), &t("f(a, Y)"), &Substitution::new()).unwrap();
    assert_eq!(s.apply(&t("g(X, Y)")), t("g(a, b)"));
    assert!(unify(&t("f(X, X)"), &t("f(a, b)"), &Substitution::new()).is_none());
    assert!(unify(&t("[H|T]"), &t("[]"), &Substitution::new()).is_none());
    let s = unify(&t("[H|T]"), &t("[1, 2, 3]"), &Substitution::new()).unwrap();
    assert_eq!(s.apply(&t("T")), t("[2, 3]"));
}
