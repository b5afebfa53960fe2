//! Naive bottom-up evaluation of negation-free programs.
//!
//! Deliberately shares nothing with the resolution machine beyond the term
//! types: matching here is one-sided (pattern against ground fact), written
//! from scratch.

use std::collections::{HashMap, HashSet};

use super::prelude::is_prelude_predicate;
use super::SolveError;
use crate::syntax::{goal_vars, Builtin, Literal, PredId, Program};
use crate::term::{Term, Var};

type Binding = HashMap<Var, Term>;

fn unsupported(msg: impl Into<String>) -> SolveError {
    SolveError::OracleUnsupported(msg.into())
}

/// Matches `pattern` against the ground term `fact`, extending `b`.
fn matches(pattern: &Term, fact: &Term, b: &mut Binding) -> bool {
    match (pattern, fact) {
        (Term::Var(v), _) => match b.get(v) {
            Some(bound) => bound == fact,
            None => {
                b.insert(v.clone(), fact.clone());
                true
            }
        },
        (Term::Atom(x), Term::Atom(y)) => x == y,
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::Compound(x), Term::Compound(y)) => {
            x.functor() == y.functor()
                && x.arity() == y.arity()
                && x.args().iter().zip(y.args()).all(|(p, f)| matches(p, f, b))
        }
        _ => false,
    }
}

fn instantiate(t: &Term, b: &Binding) -> Term {
    t.map_vars(&mut |v| b.get(v).cloned())
}

/// All bindings that satisfy `body` against `facts`, starting from `seed`.
/// Builtins are applied after the positive joins, in body order.
fn join(body: &[Literal], facts: &HashMap<PredId, Vec<Term>>, seed: Binding) -> Result<Vec<Binding>, SolveError> {
    let mut partial = vec![seed];
    for lit in body {
        let Literal::Pos(atom) = lit else { continue };
        let pred = lit.pred_id();
        let candidates = facts.get(&pred).map(Vec::as_slice).unwrap_or(&[]);
        let mut next = Vec::new();
        for b in &partial {
            for fact in candidates {
                let mut b2 = b.clone();
                if matches(atom, fact, &mut b2) {
                    next.push(b2);
                }
            }
        }
        partial = next;
    }
    let mut out = Vec::new();
    'outer: for mut b in partial {
        for lit in body {
            let Literal::Builtin(op, l, r) = lit else { continue };
            let (l, r) = (instantiate(l, &b), instantiate(r, &b));
            let equal = match (l.is_ground(), r.is_ground()) {
                (true, true) => l == r,
                (false, true) if *op == Builtin::Unify => matches(&l, &r, &mut b),
                (true, false) if *op == Builtin::Unify => matches(&r, &l, &mut b),
                _ => return Err(unsupported(format!("builtin `{lit}` is not ground after the joins"))),
            };
            if equal != (*op == Builtin::Unify) {
                continue 'outer;
            }
        }
        out.push(b);
    }
    Ok(out)
}

fn check_supported(program: &Program) -> Result<(), SolveError> {
    for c in program.clauses() {
        if c.is_fact() {
            if !c.head.is_ground() {
                return Err(unsupported(format!("non-ground fact `{c}`")));
            }
            continue;
        }
        if c.head
            .args()
            .iter()
            .any(|a| matches!(a, Term::Compound(_)) && !a.is_ground())
        {
            return Err(unsupported(format!("compound in rule head `{c}`")));
        }
        let mut bound = Vec::new();
        for lit in &c.body {
            match lit {
                Literal::Not(_) => return Err(unsupported(format!("negation in `{c}`"))),
                Literal::Pos(t) => {
                    let pred = lit.pred_id();
                    if is_prelude_predicate(&pred) && !program.defines(&pred) {
                        return Err(unsupported(format!("library predicate {pred} in `{c}`")));
                    }
                    t.collect_vars(&mut bound);
                }
                Literal::Builtin(Builtin::Unify, l, r) => {
                    l.collect_vars(&mut bound);
                    r.collect_vars(&mut bound);
                }
                Literal::Builtin(..) => {}
            }
        }
        if c.head.vars().iter().any(|v| !bound.contains(v)) {
            return Err(unsupported(format!("head variable not bound by the body in `{c}`")));
        }
    }
    Ok(())
}

/// Least model of a negation-free program, computed by naive iteration.
///
/// Supported input: ground facts, rules whose head arguments are variables or
/// ground terms, and `=`/`\=` that are decidable once the positive literals
/// are joined. Library predicates may be called only if the program defines
/// them itself.
pub fn fixpoint_eval(program: &Program) -> Result<HashSet<Term>, SolveError> {
    check_supported(program)?;
    let mut model: HashSet<Term> = HashSet::new();
    let mut by_pred: HashMap<PredId, Vec<Term>> = HashMap::new();
    for c in program.clauses().iter().filter(|c| c.is_fact()) {
        if model.insert(c.head.clone()) {
            by_pred.entry(c.pred_id()).or_default().push(c.head.clone());
        }
    }
    loop {
        let mut derived = Vec::new();
        for c in program.clauses().iter().filter(|c| !c.is_fact()) {
            for b in join(&c.body, &by_pred, Binding::new())? {
                let head = instantiate(&c.head, &b);
                if !model.contains(&head) {
                    derived.push(head);
                }
            }
        }
        let mut grew = false;
        for head in derived {
            if model.insert(head.clone()) {
                grew = true;
                by_pred
                    .entry(PredId::of(&head).expect("callable"))
                    .or_default()
                    .push(head);
            }
        }
        if !grew {
            return Ok(model);
        }
    }
}

/// Answers to a conjunctive query over a computed model: one tuple of values
/// per distinct binding of the query's named variables.
pub fn project_answers(model: &HashSet<Term>, goals: &[Literal]) -> Result<HashSet<Vec<Term>>, SolveError> {
    if goals.iter().any(Literal::is_naf) {
        return Err(unsupported("negated query literal"));
    }
    let mut by_pred: HashMap<PredId, Vec<Term>> = HashMap::new();
    for fact in model {
        by_pred
            .entry(PredId::of(fact).expect("callable"))
            .or_default()
            .push(fact.clone());
    }
    let vars: Vec<Var> = goal_vars(goals).into_iter().filter(|v| !v.is_anonymous()).collect();
    join(goals, &by_pred, Binding::new())?
        .into_iter()
        .map(|b| {
            vars.iter()
                .map(|v| {
                    b.get(v)
                        .cloned()
                        .ok_or_else(|| unsupported(format!("query variable {v} is never bound")))
                })
                .collect()
        })
        .collect()
}
