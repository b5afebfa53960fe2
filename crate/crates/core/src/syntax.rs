//! Literals, clauses and indexed programs.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::term::{FreshVars, Term, Var};

/// A predicate identity, printed as `name/arity`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId {
    pub name: Arc<str>,
    pub arity: usize,
}

impl PredId {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Self {
        PredId {
            name: name.into(),
            arity,
        }
    }

    /// The predicate a callable term refers to.
    pub fn of(t: &Term) -> Option<PredId> {
        match t {
            Term::Atom(a) => Some(PredId::new(a.clone(), 0)),
            Term::Compound(c) => Some(PredId::new(c.functor_arc().clone(), c.arity())),
            _ => None,
        }
    }
}

impl fmt::Display for PredId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl fmt::Debug for PredId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// `=`
    Unify,
    /// `\=`
    NotUnify,
}

impl Builtin {
    pub fn symbol(self) -> &'static str {
        match self {
            Builtin::Unify => "=",
            Builtin::NotUnify => "\\=",
        }
    }

    pub fn pred_id(self) -> PredId {
        PredId::new(self.symbol(), 2)
    }
}

/// A body literal. Negation only ever wraps a positive atom.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Pos(Term),
    Not(Term),
    Builtin(Builtin, Term, Term),
}

impl Literal {
    pub fn pred_id(&self) -> PredId {
        match self {
            Literal::Pos(t) | Literal::Not(t) => PredId::of(t).expect("literal atoms are callable"),
            Literal::Builtin(b, _, _) => b.pred_id(),
        }
    }

    pub fn is_naf(&self) -> bool {
        matches!(self, Literal::Not(_))
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Literal {
        match self {
            Literal::Pos(t) => Literal::Pos(f(t)),
            Literal::Not(t) => Literal::Not(f(t)),
            Literal::Builtin(b, l, r) => Literal::Builtin(*b, f(l), f(r)),
        }
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Literal::Pos(t) | Literal::Not(t) => t.collect_vars(out),
            Literal::Builtin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(t) => write!(f, "{t}"),
            Literal::Not(t) => write!(f, "not {t}"),
            Literal::Builtin(b, l, r) => write!(f, "{l} {} {r}", b.symbol()),
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Variables of a goal list in order of first occurrence.
pub fn goal_vars(goals: &[Literal]) -> Vec<Var> {
    let mut out = Vec::new();
    for g in goals {
        g.collect_vars(&mut out);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn fact(head: Term) -> Clause {
        Clause::rule(head, Vec::new())
    }

    pub fn rule(head: Term, body: Vec<Literal>) -> Clause {
        debug_assert!(PredId::of(&head).is_some(), "clause heads are callable");
        Clause { head, body }
    }

    pub fn pred_id(&self) -> PredId {
        PredId::of(&self.head).expect("clause heads are callable")
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        for l in &self.body {
            l.collect_vars(&mut out);
        }
        out
    }

    /// A copy of the clause whose variables are all replaced by fresh `_V<n>`
    /// names drawn from `counter`. Ground clauses come back unchanged.
    pub fn rename_apart(&self, counter: &mut u64) -> Clause {
        let mut fresh = FreshVars::new(counter);
        let mapping: HashMap<Var, Term> = self
            .vars()
            .into_iter()
            .map(|v| (v, Term::Var(fresh.next_var())))
            .collect();
        if mapping.is_empty() {
            return self.clone();
        }
        let mut sub = |t: &Term| t.map_vars(&mut |v| mapping.get(v).cloned());
        Clause {
            head: sub(&self.head),
            body: self.body.iter().map(|l| l.map_terms(&mut sub)).collect(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{lit}")?;
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ordered clause list with a per-predicate index.
///
/// The index partitions the clause list exactly; within a predicate, clauses
/// keep their source order. Predicates are listed in order of first definition.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Program {
    clauses: Vec<Clause>,
    index: IndexMap<PredId, Vec<usize>>,
}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Program {
        let mut p = Program::default();
        for c in clauses {
            p.push(c);
        }
        p
    }

    pub fn push(&mut self, clause: Clause) {
        self.index.entry(clause.pred_id()).or_default().push(self.clauses.len());
        self.clauses.push(clause);
    }

    pub fn extend<I: IntoIterator<Item = Clause>>(&mut self, clauses: I) {
        for c in clauses {
            self.push(c);
        }
    }

    /// The clauses of `self` followed by those of `other`.
    pub fn union(&self, other: &Program) -> Program {
        let mut p = self.clone();
        p.extend(other.clauses.iter().cloned());
        p
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &PredId> {
        self.index.keys()
    }

    pub fn defines(&self, pred: &PredId) -> bool {
        self.index.contains_key(pred)
    }

    pub fn clauses_for<'a>(&'a self, pred: &PredId) -> impl Iterator<Item = &'a Clause> + 'a {
        self.index
            .get(pred)
            .into_iter()
            .flatten()
            .map(move |&i| &self.clauses[i])
    }

    pub fn fact_count(&self) -> usize {
        self.clauses.iter().filter(|c| c.is_fact()).count()
    }

    /// Keeps the clauses for which `keep` holds, in order.
    pub fn filter(&self, mut keep: impl FnMut(&Clause) -> bool) -> Program {
        Program::new(self.clauses.iter().filter(|c| keep(c)).cloned().collect())
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<Clause> for Program {
    fn from_iter<T: IntoIterator<Item = Clause>>(iter: T) -> Self {
        Program::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sibling_rule() -> Clause {
        let v = Term::var;
        Clause::rule(
            Term::compound("sibling", vec![v("X"), v("Y")]),
            vec![
                Literal::Pos(Term::compound("parent", vec![v("P"), v("X")])),
                Literal::Pos(Term::compound("parent", vec![v("P"), v("Y")])),
                Literal::Builtin(Builtin::NotUnify, v("X"), v("Y")),
            ],
        )
    }

    #[test]
    fn rename_apart_uses_fresh_names() {
        let mut counter = 17;
        let r = sibling_rule().rename_apart(&mut counter);
        assert_eq!(
            r.to_string(),
            "sibling(_V17,_V18) :- parent(_V19,_V17), parent(_V19,_V18), _V17 \\= _V18."
        );
        assert_eq!(counter, 20);
        let again = sibling_rule().rename_apart(&mut counter);
        let first: Vec<_> = r.vars();
        assert!(again.vars().iter().all(|v| !first.contains(v)));
    }

    #[test]
    fn renaming_ground_fact_is_identity() {
        let f = Clause::fact(Term::compound("parent", vec![Term::atom("tony"), Term::atom("abe")]));
        let mut counter = 0;
        assert_eq!(f.rename_apart(&mut counter), f);
        assert_eq!(counter, 0);
    }

    #[test]
    fn index_partitions_clauses() {
        let p = Program::new(vec![
            Clause::fact(Term::compound("a", vec![Term::int(1)])),
            sibling_rule(),
            Clause::fact(Term::compound("a", vec![Term::int(2)])),
        ]);
        let a = PredId::new("a", 1);
        let got: Vec<String> = p.clauses_for(&a).map(|c| c.to_string()).collect();
        assert_eq!(got, ["a(1).", "a(2)."]);
        let total: usize = p.predicates().map(|pr| p.clauses_for(pr).count()).sum();
        assert_eq!(total, p.len());
        assert_eq!(PredId::new("male", 1).to_string(), "male/1");
    }
}
