//! Terms, substitutions, unification and variant checking.
//!
//! Everything here is an immutable value. A [`Substitution`] is a persistent
//! map: extending it returns a new substitution that shares structure with the
//! old one, so a search that wants to backtrack simply drops the extension.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// Functor of the list cell, `'.'(Head, Tail)`.
pub const LIST_FUNCTOR: &str = ".";
/// The empty list constant.
pub const NIL: &str = "[]";

/// Prefix reserved for anonymous variables produced by the parser. Such names
/// cannot be written in source text, and they print as `_`.
pub(crate) const ANON_PREFIX: &str = "_#";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// True for the per-occurrence variables created from `_`.
    pub fn is_anonymous(&self) -> bool {
        self.0.starts_with(ANON_PREFIX)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_anonymous() {
            f.write_str("_")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// A first-order term.
///
/// Compound terms always have at least one argument; [`Term::compound`] folds a
/// zero-argument application into an [`Term::Atom`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Atom(Arc<str>),
    Int(i64),
    Compound(Arc<Compound>),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Compound {
    functor: Arc<str>,
    args: Vec<Term>,
}

impl Compound {
    pub fn functor(&self) -> &str {
        &self.functor
    }

    pub fn functor_arc(&self) -> &Arc<str> {
        &self.functor
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl Term {
    pub fn var(name: impl Into<Arc<str>>) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn atom(name: impl Into<Arc<str>>) -> Term {
        let name = name.into();
        debug_assert!(!name.is_empty(), "constant symbols are nonempty");
        Term::Atom(name)
    }

    pub fn int(value: i64) -> Term {
        Term::Int(value)
    }

    /// Builds `functor(args...)`, or the constant `functor` when `args` is empty.
    pub fn compound(functor: impl Into<Arc<str>>, args: Vec<Term>) -> Term {
        let functor = functor.into();
        debug_assert!(!functor.is_empty(), "functor symbols are nonempty");
        if args.is_empty() {
            Term::Atom(functor)
        } else {
            Term::Compound(Arc::new(Compound { functor, args }))
        }
    }

    pub fn nil() -> Term {
        Term::Atom(Arc::from(NIL))
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::compound(LIST_FUNCTOR, vec![head, tail])
    }

    /// A proper list of the given elements.
    pub fn list<I>(items: I) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        Term::list_with_tail(items, Term::nil())
    }

    pub fn list_with_tail<I>(items: I, tail: Term) -> Term
    where
        I: IntoIterator<Item = Term>,
        I::IntoIter: DoubleEndedIterator,
    {
        items.into_iter().rev().fold(tail, |acc, item| Term::cons(item, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Term::Atom(a) if &**a == NIL)
    }

    /// `(head, tail)` when this is a list cell.
    pub fn as_cons(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Compound(c) if c.arity() == 2 && c.functor() == LIST_FUNCTOR => Some((&c.args[0], &c.args[1])),
            _ => None,
        }
    }

    /// Splits a (possibly partial) list into its elements and final tail.
    pub fn list_parts(&self) -> (Vec<&Term>, &Term) {
        let mut items = Vec::new();
        let mut cur = self;
        while let Some((h, t)) = cur.as_cons() {
            items.push(h);
            cur = t;
        }
        (items, cur)
    }

    /// The elements of a proper list, `None` for anything else.
    pub fn as_list(&self) -> Option<Vec<&Term>> {
        let (items, tail) = self.list_parts();
        tail.is_nil().then_some(items)
    }

    /// Name and arity of the principal functor; constants have arity 0.
    pub fn functor(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(c) => Some((c.functor(), c.arity())),
            _ => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Compound(c) => c.args(),
            _ => &[],
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Int(_) => true,
            Term::Compound(c) => c.args.iter().all(Term::is_ground),
        }
    }

    /// Distinct variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(c) => c.args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Compound(c) => c.args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }

    /// Replaces variables through `f`; variables mapped to `None` are kept.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::Compound(c) => Term::Compound(Arc::new(Compound {
                functor: c.functor.clone(),
                args: c.args.iter().map(|a| a.map_vars(f)).collect(),
            })),
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical surface text. Proper and partial lists print in bracket sugar and
/// symbols that are not plain identifiers are quoted, so the output parses back
/// to the same term.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(i) => write!(f, "{i}"),
            Term::Atom(a) => write_symbol(f, a),
            Term::Compound(c) => {
                if c.arity() == 2 && c.functor() == LIST_FUNCTOR {
                    let (items, tail) = self.list_parts();
                    f.write_str("[")?;
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{item}")?;
                    }
                    if !tail.is_nil() {
                        write!(f, "|{tail}")?;
                    }
                    f.write_str("]")
                } else {
                    write_symbol(f, c.functor())?;
                    f.write_str("(")?;
                    for (i, arg) in c.args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{arg}")?;
                    }
                    f.write_str(")")
                }
            }
        }
    }
}

/// Whether `s` can be written without quotes.
pub fn is_plain_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => s == NIL,
    }
}

fn write_symbol(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_plain_symbol(s) {
        return f.write_str(s);
    }
    f.write_str("'")?;
    for c in s.chars() {
        match c {
            '\'' => f.write_str("\\'")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("'")
}

/// A finite, persistent map from variables to terms.
///
/// Bindings are stored in triangular form (a bound term may mention other
/// bound variables); [`Substitution::apply`] resolves chains, so applying a
/// substitution is idempotent regardless of how it was built.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: imbl::HashMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, Term)>>(pairs: I) -> Self {
        Substitution {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// A new substitution with `v` bound to `t`. The receiver is unchanged.
    pub fn bind(&self, v: Var, t: Term) -> Substitution {
        Substitution {
            map: self.map.update(v, t),
        }
    }

    /// Follows variable bindings at the top of `t` only.
    pub fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Replaces every bound variable in `t`, resolving chains of bindings.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        match self.walk(t) {
            Term::Compound(c) => Term::Compound(Arc::new(Compound {
                functor: c.functor.clone(),
                args: c.args.iter().map(|a| self.apply(a)).collect(),
            })),
            other => other.clone(),
        }
    }

    /// The equivalent idempotent substitution: every range term is fully
    /// resolved, so no bound variable appears on a right-hand side.
    pub fn normalized(&self) -> Substitution {
        Substitution {
            map: self.map.iter().map(|(v, t)| (v.clone(), self.apply(t))).collect(),
        }
    }

    /// Keeps only bindings for `vars`, fully resolved.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            map: vars
                .iter()
                .filter_map(|v| self.map.get(v).map(|t| (v.clone(), self.apply(t))))
                .collect(),
        }
    }

    /// `self` followed by `other`: applying the result equals applying `self`
    /// and then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: imbl::HashMap<Var, Term> = self
            .map
            .iter()
            .map(|(v, t)| (v.clone(), other.apply(&self.apply(t))))
            .collect();
        for (v, t) in other.map.iter() {
            if !map.contains_key(v) {
                map.insert(v.clone(), other.apply(t));
            }
        }
        Substitution { map }
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pairs: Vec<_> = self.map.iter().collect();
        pairs.sort_by(|a, b| a.0.cmp(b.0));
        f.write_str("{")?;
        for (i, (v, t)) in pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v:?}↦{t}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of `a` and `b` extending `s`, with the occurs check.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    unify_with(a, b, s, true)
}

/// [`unify`] with the occurs check made optional. Without it, cyclic bindings
/// can be produced and [`Substitution::apply`] will not terminate on them.
pub fn unify_with(a: &Term, b: &Term, s: &Substitution, occurs_check: bool) -> Option<Substitution> {
    let mut s = s.clone();
    let mut stack: Vec<(Term, Term)> = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = s.walk(&x).clone();
        let y = s.walk(&y).clone();
        match (&x, &y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), _) => {
                if occurs_check && occurs(v, &y, &s) {
                    return None;
                }
                s = s.bind(v.clone(), y);
            }
            (_, Term::Var(w)) => {
                if occurs_check && occurs(w, &x, &s) {
                    return None;
                }
                s = s.bind(w.clone(), x);
            }
            (Term::Atom(p), Term::Atom(q)) if p == q => {}
            (Term::Int(p), Term::Int(q)) if p == q => {}
            (Term::Compound(p), Term::Compound(q)) => {
                if p.functor != q.functor || p.arity() != q.arity() {
                    return None;
                }
                stack.extend(p.args.iter().cloned().zip(q.args.iter().cloned()).rev());
            }
            _ => return None,
        }
    }
    Some(s)
}

fn occurs(v: &Var, t: &Term, s: &Substitution) -> bool {
    match s.walk(t) {
        Term::Var(w) => w == v,
        Term::Compound(c) => c.args.iter().any(|a| occurs(v, a, s)),
        _ => false,
    }
}

/// True iff `a` and `b` are equal up to a bijective renaming of variables.
pub fn variant_of(a: &Term, b: &Term) -> bool {
    let mut fwd = HashMap::new();
    let mut bwd = HashMap::new();
    variant_rec(a, b, &mut fwd, &mut bwd)
}

fn variant_rec<'a>(
    a: &'a Term,
    b: &'a Term,
    fwd: &mut HashMap<&'a Var, &'a Var>,
    bwd: &mut HashMap<&'a Var, &'a Var>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (fwd.get(x), bwd.get(y)) {
            (None, None) => {
                fwd.insert(x, y);
                bwd.insert(y, x);
                true
            }
            (Some(&fy), Some(&bx)) => fy == y && bx == x,
            _ => false,
        },
        (Term::Atom(p), Term::Atom(q)) => p == q,
        (Term::Int(p), Term::Int(q)) => p == q,
        (Term::Compound(p), Term::Compound(q)) => {
            p.functor == q.functor
                && p.arity() == q.arity()
                && p.args.iter().zip(&q.args).all(|(x, y)| variant_rec(x, y, fwd, bwd))
        }
        _ => false,
    }
}

/// Hands out `_V<n>` variable names from a caller-owned counter.
#[derive(Debug)]
pub struct FreshVars<'a> {
    counter: &'a mut u64,
}

impl<'a> FreshVars<'a> {
    pub fn new(counter: &'a mut u64) -> Self {
        FreshVars { counter }
    }

    pub fn next_var(&mut self) -> Var {
        let v = Var::new(format!("_V{}", *self.counter));
        *self.counter += 1;
        v
    }
}
