use std::sync::OnceLock;

use crate::parser::parse_program;
use crate::syntax::{PredId, Program};

/// Library predicates available to every program. `insert_sorted/3` is
/// implemented natively: it inserts a ground element into a ground list
/// ordered by canonical text, dropping duplicates.
pub const PRELUDE_SOURCE: &str = "\
member(X, [X|_]).
member(X, [_|T]) :- member(X, T).
subset([], _).
subset([H|T], L) :- member(H, L), subset(T, L).
";

pub(crate) const INSERT_SORTED: (&str, usize) = ("insert_sorted", 3);

/// The clause-defined part of the prelude.
pub fn prelude_program() -> &'static Program {
    static PRELUDE: OnceLock<Program> = OnceLock::new();
    PRELUDE.get_or_init(|| parse_program(PRELUDE_SOURCE).expect("prelude parses"))
}

pub fn prelude_predicates() -> Vec<PredId> {
    vec![
        PredId::new("member", 2),
        PredId::new("subset", 2),
        PredId::new(INSERT_SORTED.0, INSERT_SORTED.1),
    ]
}

pub fn is_prelude_predicate(p: &PredId) -> bool {
    matches!(
        (&*p.name, p.arity),
        ("member", 2) | ("subset", 2) | ("insert_sorted", 3)
    )
}
