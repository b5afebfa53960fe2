//! The resolution machine behind [`super::solve`].
//!
//! Clauses are compiled once per session into a slot-numbered form. Runtime
//! terms are cells in one heap and clause activations are entries in a frame
//! stack. A choicepoint records the heights of both; backtracking cuts them
//! back and resets the bindings listed on the trail since then. Frames are
//! never popped on success, so a continuation is just a frame index and a
//! body position.

use std::cmp::Ordering;
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use super::prelude::{prelude_program, INSERT_SORTED};
use super::{Answer, SolveConfig, SolveError};
use crate::syntax::{Clause, Literal, Program};
use crate::term::{Term, Var, LIST_FUNCTOR, NIL};

type Sym = u32;

/// Nested negations deeper than this are treated as a resource overrun.
const MAX_NAF_NESTING: usize = 128;

/// How often (in steps) the wall clock is consulted.
const CLOCK_INTERVAL: u64 = 1024;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Cell {
    /// A variable: the heap cell at that address holds its value, or `Free`.
    Ref(u32),
    /// Content of an unbound variable's own cell. Never a term by itself.
    Free,
    Atom(Sym),
    Int(i64),
    /// Address of a `Functor` cell, which is followed by the arguments.
    Str(u32),
    Functor(Sym, u32),
}

const NONE: u32 = u32::MAX;

/// Compiled term. Slots are clause-local and offset by the frame base.
enum CTerm {
    /// First occurrence of a head variable: binds without unification.
    FirstVar(u32),
    Var(u32),
    Atom(Sym),
    Int(i64),
    Str(Sym, Box<[CTerm]>),
    /// A ground subterm, laid out once in the constant area of the heap.
    Ground(Cell),
}

enum Goal {
    Call { pred: u32, args: Box<[CTerm]> },
    Naf { pred: u32, args: Box<[CTerm]> },
    Unify(CTerm, CTerm),
    NotUnify(CTerm, CTerm),
}

struct CClause {
    head: Box<[CTerm]>,
    body: Box<[Goal]>,
    nvars: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Atom(Sym),
    Int(i64),
    Str(Sym, u32),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Native {
    InsertSorted,
    Member,
}

struct PredInfo {
    name: Sym,
    arity: u32,
    /// Index into `Compiled::lists` of every clause in order.
    all: u32,
    /// Clauses whose first argument is a variable.
    var_first: u32,
    keyed: HashMap<Key, u32>,
    native: Option<Native>,
    /// Whether a call to the predicate can be a variant of an ancestor; see
    /// [`mark_loop_checked`].
    loop_checked: bool,
}

struct Compiled {
    names: Vec<Arc<str>>,
    /// Printed form of each symbol (quoted where needed).
    texts: Vec<String>,
    preds: Vec<PredInfo>,
    clauses: Vec<CClause>,
    lists: Vec<Vec<u32>>,
    query: CClause,
    query_vars: Vec<Var>,
    /// Heap prefix holding every ground subterm of the program.
    consts: Vec<Cell>,
    nil: Sym,
    cons: Sym,
}

struct Compiler {
    names: Vec<Arc<str>>,
    sym_index: HashMap<Arc<str>, Sym>,
    pred_index: HashMap<(Sym, u32), u32>,
    preds: Vec<(Sym, u32, Vec<u32>, Option<Native>)>,
    clauses: Vec<CClause>,
    consts: Vec<Cell>,
}

impl Compiler {
    fn intern(&mut self, s: &Arc<str>) -> Sym {
        if let Some(&i) = self.sym_index.get(s) {
            return i;
        }
        let i = self.names.len() as Sym;
        self.names.push(s.clone());
        self.sym_index.insert(s.clone(), i);
        i
    }

    fn pred(&mut self, name: &Arc<str>, arity: usize) -> u32 {
        let sym = self.intern(name);
        let key = (sym, arity as u32);
        if let Some(&p) = self.pred_index.get(&key) {
            return p;
        }
        let p = self.preds.len() as u32;
        self.preds.push((sym, arity as u32, Vec::new(), None));
        self.pred_index.insert(key, p);
        p
    }

    fn defines(&mut self, name: &str, arity: usize) -> bool {
        let Some(&sym) = self.sym_index.get(name) else {
            return false;
        };
        self.pred_index
            .get(&(sym, arity as u32))
            .is_some_and(|&p| !self.preds[p as usize].2.is_empty())
    }

    fn add_clause(&mut self, c: &Clause) {
        let (name, arity) = c.head.functor().expect("clause heads are callable");
        let name: Arc<str> = Arc::from(name);
        let pred = self.pred(&name, arity);
        let mut slots = Slots::default();
        let head = c.head.args().iter().map(|a| self.term(a, &mut slots, true)).collect();
        let body = c.body.iter().map(|l| self.goal(l, &mut slots)).collect();
        let id = self.clauses.len() as u32;
        self.clauses.push(CClause {
            head,
            body,
            nvars: slots.vars.len() as u32,
        });
        self.preds[pred as usize].2.push(id);
    }

    fn goal(&mut self, l: &Literal, slots: &mut Slots) -> Goal {
        match l {
            Literal::Pos(t) | Literal::Not(t) => {
                let (name, arity) = t.functor().expect("literal atoms are callable");
                let name: Arc<str> = Arc::from(name);
                let pred = self.pred(&name, arity);
                let args = t.args().iter().map(|a| self.term(a, slots, false)).collect();
                if l.is_naf() {
                    Goal::Naf { pred, args }
                } else {
                    Goal::Call { pred, args }
                }
            }
            Literal::Builtin(b, lhs, rhs) => {
                let lhs = self.term(lhs, slots, false);
                let rhs = self.term(rhs, slots, false);
                match b {
                    crate::syntax::Builtin::Unify => Goal::Unify(lhs, rhs),
                    crate::syntax::Builtin::NotUnify => Goal::NotUnify(lhs, rhs),
                }
            }
        }
    }

    fn term(&mut self, t: &Term, slots: &mut Slots, in_head: bool) -> CTerm {
        match t {
            Term::Var(v) => {
                let (slot, first) = slots.get(v);
                if first && in_head {
                    CTerm::FirstVar(slot)
                } else {
                    CTerm::Var(slot)
                }
            }
            Term::Atom(a) => CTerm::Atom(self.intern(a)),
            Term::Int(i) => CTerm::Int(*i),
            Term::Compound(_) if t.is_ground() => CTerm::Ground(self.ground(t)),
            Term::Compound(c) => {
                let f = self.intern(c.functor_arc());
                CTerm::Str(f, c.args().iter().map(|a| self.term(a, slots, in_head)).collect())
            }
        }
    }

    fn ground(&mut self, t: &Term) -> Cell {
        match t {
            Term::Atom(a) => Cell::Atom(self.intern(a)),
            Term::Int(i) => Cell::Int(*i),
            Term::Compound(c) => {
                let functor = self.intern(c.functor_arc());
                let args: Vec<Cell> = c.args().iter().map(|a| self.ground(a)).collect();
                let addr = self.consts.len() as u32;
                self.consts.push(Cell::Functor(functor, args.len() as u32));
                self.consts.extend(args);
                Cell::Str(addr)
            }
            Term::Var(_) => unreachable!("ground terms have no variables"),
        }
    }
}

#[derive(Default)]
struct Slots {
    vars: Vec<Var>,
}

impl Slots {
    fn get(&mut self, v: &Var) -> (u32, bool) {
        match self.vars.iter().position(|w| w == v) {
            Some(i) => (i as u32, false),
            None => {
                self.vars.push(v.clone());
                ((self.vars.len() - 1) as u32, true)
            }
        }
    }
}

fn first_key(t: &CTerm, heap: &[Cell]) -> Option<Key> {
    match t {
        CTerm::Atom(a) => Some(Key::Atom(*a)),
        CTerm::Int(i) => Some(Key::Int(*i)),
        CTerm::Str(f, args) => Some(Key::Str(*f, args.len() as u32)),
        CTerm::Ground(c) => cell_key(*c, heap),
        CTerm::Var(_) | CTerm::FirstVar(_) => None,
    }
}

/// Indexing key of a dereferenced cell.
fn cell_key(c: Cell, heap: &[Cell]) -> Option<Key> {
    match c {
        Cell::Atom(a) => Some(Key::Atom(a)),
        Cell::Int(i) => Some(Key::Int(i)),
        Cell::Str(p) => match heap[p as usize] {
            Cell::Functor(f, n) => Some(Key::Str(f, n)),
            _ => unreachable!("structure without functor cell"),
        },
        Cell::Ref(_) | Cell::Functor(..) | Cell::Free => None,
    }
}

fn compile(program: &Program, goals: &[Literal], occurs_check: bool) -> Compiled {
    let mut c = Compiler {
        names: Vec::new(),
        sym_index: HashMap::default(),
        pred_index: HashMap::default(),
        preds: Vec::new(),
        clauses: Vec::new(),
        consts: Vec::new(),
    };
    let nil = c.intern(&Arc::from(NIL));
    let cons = c.intern(&Arc::from(LIST_FUNCTOR));
    for clause in program.clauses() {
        c.add_clause(clause);
    }
    let user_member = c.defines("member", 2);
    let prelude = prelude_program();
    for pred in prelude.predicates() {
        if !c.defines(&pred.name, pred.arity) {
            for clause in prelude.clauses_for(pred) {
                c.add_clause(clause);
            }
        }
    }
    if !c.defines(INSERT_SORTED.0, INSERT_SORTED.1) {
        let p = c.pred(&Arc::from(INSERT_SORTED.0), INSERT_SORTED.1);
        c.preds[p as usize].3 = Some(Native::InsertSorted);
    }
    if !user_member {
        let p = c.pred(&Arc::from("member"), 2);
        c.preds[p as usize].3 = Some(Native::Member);
    }

    let mut slots = Slots::default();
    let body: Box<[Goal]> = goals.iter().map(|g| c.goal(g, &mut slots)).collect();
    let query = CClause {
        head: Box::new([]),
        body,
        nvars: slots.vars.len() as u32,
    };

    let mut lists: Vec<Vec<u32>> = Vec::new();
    let mut preds = Vec::with_capacity(c.preds.len());
    for (name, arity, ids, native) in std::mem::take(&mut c.preds) {
        let mut var_first = Vec::new();
        let mut keyed: HashMap<Key, Vec<u32>> = HashMap::default();
        let mut key_order: Vec<Key> = Vec::new();
        if arity > 0 {
            for &id in &ids {
                match first_key(&c.clauses[id as usize].head[0], &c.consts) {
                    None => {
                        var_first.push(id);
                        keyed.values_mut().for_each(|l| l.push(id));
                    }
                    Some(k) => {
                        keyed
                            .entry(k)
                            .or_insert_with(|| {
                                key_order.push(k);
                                var_first.clone()
                            })
                            .push(id);
                    }
                }
            }
        }
        let mut register = |l: Vec<u32>| {
            lists.push(l);
            (lists.len() - 1) as u32
        };
        let all = register(ids);
        let var_first = register(var_first);
        let keyed = key_order
            .into_iter()
            .map(|k| {
                let l = keyed.remove(&k).unwrap();
                (k, register(l))
            })
            .collect();
        preds.push(PredInfo {
            name,
            arity,
            all,
            var_first,
            keyed,
            native,
            loop_checked: false,
        });
    }
    mark_loop_checked(&mut preds, &c.clauses, &lists, occurs_check);

    Compiled {
        texts: c.names.iter().map(|n| Term::Atom(n.clone()).to_string()).collect(),
        names: c.names,
        preds,
        clauses: c.clauses,
        lists,
        query,
        query_vars: slots.vars,
        consts: c.consts,
        nil,
        cons,
    }
}

/// Decides which predicates take part in the loop check.
///
/// A call can only be a variant of an ancestor when its predicate is
/// recursive through positive calls (negation starts a fresh ancestor chain).
/// It cannot be one either when the predicate's only route back to itself is
/// direct self-calls that all pass a proper subterm of the same head argument:
/// every ancestor of that predicate then holds a strictly larger term in that
/// position. With the occurs check off, cyclic terms void that argument.
fn mark_loop_checked(preds: &mut [PredInfo], clauses: &[CClause], lists: &[Vec<u32>], occurs_check: bool) {
    let n = preds.len();
    let callees: Vec<Vec<u32>> = preds
        .iter()
        .map(|p| {
            let mut out: Vec<u32> = lists[p.all as usize]
                .iter()
                .flat_map(|&c| clauses[c as usize].body.iter())
                .filter_map(|g| match g {
                    Goal::Call { pred, .. } => Some(*pred),
                    _ => None,
                })
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        })
        .collect();
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|p| {
            let mut seen = vec![false; n];
            let mut stack: Vec<u32> = callees[p].clone();
            while let Some(q) = stack.pop() {
                if !std::mem::replace(&mut seen[q as usize], true) {
                    stack.extend(&callees[q as usize]);
                }
            }
            seen
        })
        .collect();
    for p in 0..n {
        if !reach[p][p] {
            continue;
        }
        let clause_ids = &lists[preds[p].all as usize];
        let mut self_calls = Vec::new();
        let mut only_direct = true;
        for &c in clause_ids {
            let clause = &clauses[c as usize];
            for g in clause.body.iter() {
                if let Goal::Call { pred, args } = g {
                    let q = *pred as usize;
                    if q == p {
                        self_calls.push((&clause.head, args));
                    } else if reach[q][p] {
                        only_direct = false;
                    }
                }
            }
        }
        let decreasing = occurs_check
            && only_direct
            && (0..preds[p].arity as usize).any(|i| {
                self_calls.iter().all(|(head, args)| match &args[i] {
                    CTerm::Var(v) => matches!(&head[i], CTerm::Str(..)) && contains_slot(&head[i], *v),
                    _ => false,
                })
            });
        preds[p].loop_checked = !decreasing;
    }
}

fn contains_slot(t: &CTerm, slot: u32) -> bool {
    match t {
        CTerm::FirstVar(v) | CTerm::Var(v) => *v == slot,
        CTerm::Str(_, args) => args.iter().any(|a| contains_slot(a, slot)),
        _ => false,
    }
}

/// A clause activation.
#[derive(Clone, Copy)]
struct Frame {
    /// `NONE` for the query.
    clause: u32,
    base: u32,
    depth: u32,
    parent: Cont,
    /// Innermost tabled ancestor visible to this frame's body goals.
    anc: u32,
    /// The call this frame answers: predicate and heap address of the
    /// arguments.
    pred: u32,
    args: u32,
    /// For tabled frames, the next tabled ancestor out.
    up: u32,
    act: Act,
}

/// A tabled call in progress: index of its `Iterate` choicepoint and of its
/// table. `NO_ACT` for everything else.
#[derive(Clone, Copy)]
struct Act {
    cp: u32,
    table: u32,
}

const NO_ACT: Act = Act { cp: NONE, table: NONE };

/// Answers found so far for one call variant. Each answer is a standalone
/// copy of the argument cells, addresses relative to its start.
#[derive(Default)]
struct Table {
    answers: Vec<Vec<Cell>>,
    index: HashMap<Vec<Cell>, u32>,
    /// Every answer is present; calls read the table instead of resolving.
    complete: bool,
}

/// The rest of the computation: resume frame `frame` at body position `pos`.
/// A `NONE` frame means the goal list is empty, i.e. success.
#[derive(Clone, Copy)]
struct Cont {
    frame: u32,
    pos: u32,
}

const DONE: Cont = Cont { frame: NONE, pos: 0 };

enum Next {
    Cont(Cont),
    Fail,
}

enum Alt {
    /// Clauses of `list` from position `next` on.
    Clauses { list: u32, next: u32 },
    /// A `member/2` walk resuming at `tail`; `skip` when the first clause
    /// was already tried there.
    Member { tail: Cell, skip: bool },
    /// A variant of an ancestor reading that ancestor's table.
    Answers { table: u32, next: u32 },
    /// Bottom of a tabled call. Once its clauses are exhausted the call is
    /// run again if, during the last round, some variant call read a table
    /// and some table grew. `returned` holds the answers already passed on.
    /// `lowest` is the outermost tabled call this one read from, directly or
    /// through calls it made; `pending` lists the tables of finished inner
    /// calls that become complete together with this one.
    Iterate {
        list: u32,
        table: u32,
        growth: u64,
        consumed: u64,
        returned: HashSet<u32>,
        lowest: u32,
        pending: Vec<u32>,
    },
}

struct ChoicePoint {
    alt: Alt,
    pred: u32,
    args: u32,
    cont: Cont,
    anc: u32,
    depth: u32,
    act: Act,
    trail_mark: usize,
    heap_mark: usize,
    frame_mark: usize,
}

pub(super) struct Machine {
    prog: Rc<Compiled>,
    heap: Vec<Cell>,
    trail: Vec<u32>,
    frames: Vec<Frame>,
    cps: Vec<ChoicePoint>,
    query_base: u32,
    steps: u64,
    limit: u64,
    deadline: Option<Instant>,
    naf_nesting: usize,
    max_depth: u32,
    occurs_check: bool,
    loop_check: bool,
    tables: Vec<Table>,
    table_index: HashMap<(u32, Vec<Cell>), u32>,
    /// Answers ever added to any table.
    growth: u64,
    /// Variant calls ever served from a table.
    consumed: u64,
    /// Scratch space for unification.
    pdl: Vec<(Cell, Cell)>,
    /// Scratch space for canonical text comparisons.
    text: (String, String),
}

impl Machine {
    pub(super) fn new(program: &Program, goals: &[Literal], cfg: &SolveConfig) -> Machine {
        let prog = Rc::new(compile(program, goals, cfg.occurs_check));
        Machine {
            heap: prog.consts.clone(),
            prog,
            trail: Vec::new(),
            frames: Vec::new(),
            cps: Vec::new(),
            query_base: 0,
            steps: 0,
            limit: cfg.step_budget,
            deadline: cfg.wall_timeout.map(|d| Instant::now() + d),
            naf_nesting: 0,
            max_depth: cfg.max_depth.min(u32::MAX as usize) as u32,
            occurs_check: cfg.occurs_check,
            loop_check: cfg.loop_check,
            tables: Vec::new(),
            table_index: HashMap::default(),
            growth: 0,
            consumed: 0,
            pdl: Vec::new(),
            text: (String::new(), String::new()),
        }
    }

    pub(super) fn steps(&self) -> u64 {
        self.steps
    }

    pub(super) fn first_answer(&mut self) -> Result<bool, SolveError> {
        let base = self.fresh_vars(self.prog.query.nvars);
        self.query_base = base;
        self.frames.push(Frame {
            clause: NONE,
            base,
            depth: 0,
            parent: DONE,
            anc: NONE,
            pred: NONE,
            args: 0,
            up: NONE,
            act: NO_ACT,
        });
        let frame = (self.frames.len() - 1) as u32;
        self.run(Next::Cont(Cont { frame, pos: 0 }), 0)
    }

    pub(super) fn next_answer(&mut self) -> Result<bool, SolveError> {
        self.run(Next::Fail, 0)
    }

    /// Current bindings of the query variables.
    pub(super) fn answer(&self) -> Answer {
        let mut fresh: Vec<u32> = Vec::new();
        let bindings = self
            .prog
            .query_vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_anonymous())
            .map(|(i, v)| {
                (
                    v.clone(),
                    self.to_term(Cell::Ref(self.query_base + i as u32), &mut fresh),
                )
            })
            .collect();
        Answer { bindings }
    }

    fn body<'p>(prog: &'p Compiled, frame: &Frame) -> &'p [Goal] {
        if frame.clause == NONE {
            &prog.query.body
        } else {
            &prog.clauses[frame.clause as usize].body
        }
    }

    /// Runs until the continuation empties (true) or every choicepoint above
    /// `barrier` is exhausted (false).
    fn run(&mut self, mut next: Next, barrier: usize) -> Result<bool, SolveError> {
        let prog = self.prog.clone();
        loop {
            next = match next {
                Next::Fail => {
                    if self.cps.len() <= barrier {
                        return Ok(false);
                    }
                    let cp = self.cps.pop().expect("choicepoint above barrier");
                    self.undo_to(cp.trail_mark, cp.heap_mark);
                    self.frames.truncate(cp.frame_mark);
                    self.resume(&prog, cp)?
                }
                Next::Cont(cont) if cont.frame == NONE => return Ok(true),
                Next::Cont(cont) => {
                    let frame = self.frames[cont.frame as usize];
                    let body = Self::body(&prog, &frame);
                    match body.get(cont.pos as usize) {
                        None if frame.act.cp != NONE => {
                            if self.table_exit(prog.preds[frame.pred as usize].arity, frame.args, frame.act) {
                                Next::Cont(frame.parent)
                            } else {
                                Next::Fail
                            }
                        }
                        None => Next::Cont(frame.parent),
                        Some(goal) => {
                            // tabled frames come back through the exit above
                            let after = if cont.pos as usize + 1 == body.len() && frame.act.cp == NONE {
                                frame.parent
                            } else {
                                Cont {
                                    frame: cont.frame,
                                    pos: cont.pos + 1,
                                }
                            };
                            self.exec(&prog, goal, &frame, after)?
                        }
                    }
                }
            };
        }
    }

    fn exec(&mut self, prog: &Compiled, goal: &Goal, frame: &Frame, cont: Cont) -> Result<Next, SolveError> {
        match goal {
            Goal::Call { pred, args } => {
                let args = self.put_args(args, frame.base);
                self.call(prog, *pred, args, cont, frame.anc, frame.depth + 1)
            }
            Goal::Naf { pred, args } => {
                let args = self.put_args(args, frame.base);
                if self.naf(prog, *pred, args, frame.depth + 1)? {
                    Ok(Next::Cont(cont))
                } else {
                    Ok(Next::Fail)
                }
            }
            Goal::Unify(l, r) => {
                self.step()?;
                let l = self.build(l, frame.base);
                let r = self.build(r, frame.base);
                Ok(if self.unify(l, r) { Next::Cont(cont) } else { Next::Fail })
            }
            Goal::NotUnify(l, r) => {
                self.step()?;
                let l = self.build(l, frame.base);
                let r = self.build(r, frame.base);
                let (trail_mark, heap_mark) = (self.trail.len(), self.heap.len());
                let unifiable = self.unify(l, r);
                self.undo_to(trail_mark, heap_mark);
                Ok(if unifiable { Next::Fail } else { Next::Cont(cont) })
            }
        }
    }

    fn call(
        &mut self,
        prog: &Compiled,
        pred: u32,
        args: u32,
        cont: Cont,
        anc: u32,
        depth: u32,
    ) -> Result<Next, SolveError> {
        if depth > self.max_depth {
            return Err(SolveError::BudgetExceeded {
                steps: self.steps,
                reason: format!("derivation depth exceeds {}", self.max_depth),
            });
        }
        if log::log_enabled!(log::Level::Trace) {
            log::trace!("{:>4} call {}", depth, self.describe(prog, pred, args));
        }
        let info = &prog.preds[pred as usize];
        if let Some(native) = info.native {
            self.step()?;
            return match native {
                Native::InsertSorted => self.insert_sorted(prog, args, cont),
                Native::Member => self.member(prog, pred, args, self.heap[args as usize + 1], false, cont, depth),
            };
        }
        let tabled = self.loop_check && info.loop_checked;
        let mut table = NONE;
        if tabled {
            table = self.table_for(pred, args, info.arity);
            if self.tables[table as usize].complete {
                return self.consume(pred, args, table, 0, cont, depth);
            }
            let mut a = anc;
            while a != NONE {
                let node = self.frames[a as usize];
                if node.act.table == table {
                    self.step()?;
                    log::trace!("{depth:>4} loop  {}", self.describe(prog, pred, args));
                    self.consumed += 1;
                    self.depend_on(anc, a);
                    return self.consume(pred, args, table, 0, cont, depth);
                }
                a = node.up;
            }
        }
        let list = if info.arity == 0 {
            info.all
        } else {
            match cell_key(self.deref(self.heap[args as usize]), &self.heap) {
                Some(k) => info.keyed.get(&k).copied().unwrap_or(info.var_first),
                None => info.all,
            }
        };
        if tabled {
            return self.start_round(
                prog,
                pred,
                args,
                list,
                table,
                HashSet::default(),
                Vec::new(),
                cont,
                anc,
                depth,
            );
        }
        self.try_clauses(prog, pred, args, list, 0, cont, anc, depth, NO_ACT)
    }

    fn resume(&mut self, prog: &Compiled, cp: ChoicePoint) -> Result<Next, SolveError> {
        let ChoicePoint {
            pred,
            args,
            cont,
            anc,
            depth,
            act,
            ..
        } = cp;
        match cp.alt {
            Alt::Clauses { list, next } => self.try_clauses(prog, pred, args, list, next, cont, anc, depth, act),
            Alt::Member { tail, skip } => self.member(prog, pred, args, tail, skip, cont, depth),
            Alt::Answers { table, next } => self.consume(pred, args, table, next, cont, depth),
            Alt::Iterate {
                list,
                table,
                growth,
                consumed,
                returned,
                lowest,
                mut pending,
            } => {
                if self.growth == growth || self.consumed == consumed {
                    let own = self.cps.len() as u32;
                    pending.push(table);
                    if lowest < own {
                        match &mut self.cps[lowest as usize].alt {
                            Alt::Iterate { pending: outer, .. } => outer.append(&mut pending),
                            _ => unreachable!("dependency on a finished call"),
                        }
                    } else {
                        for t in pending {
                            self.tables[t as usize].complete = true;
                        }
                    }
                    return Ok(Next::Fail);
                }
                self.step()?;
                log::trace!("{depth:>4} again {}", self.describe(prog, pred, args));
                self.start_round(prog, pred, args, list, table, returned, pending, cont, anc, depth)
            }
        }
    }

    /// Starts one round of a tabled call.
    #[allow(clippy::too_many_arguments)]
    fn start_round(
        &mut self,
        prog: &Compiled,
        pred: u32,
        args: u32,
        list: u32,
        table: u32,
        returned: HashSet<u32>,
        pending: Vec<u32>,
        cont: Cont,
        anc: u32,
        depth: u32,
    ) -> Result<Next, SolveError> {
        let act = Act {
            cp: self.cps.len() as u32,
            table,
        };
        self.cps.push(ChoicePoint {
            alt: Alt::Iterate {
                list,
                table,
                growth: self.growth,
                consumed: self.consumed,
                returned,
                lowest: act.cp,
                pending,
            },
            pred,
            args,
            cont,
            anc,
            depth,
            act: NO_ACT,
            trail_mark: self.trail.len(),
            heap_mark: self.heap.len(),
            frame_mark: self.frames.len(),
        });
        self.try_clauses(prog, pred, args, list, 0, cont, anc, depth, act)
    }

    /// Every tabled call on the chain from `from` out to (excluding) frame
    /// `target` now depends on `target`'s call.
    fn depend_on(&mut self, from: u32, target: u32) {
        let to = self.frames[target as usize].act.cp;
        let mut a = from;
        while a != target {
            let node = self.frames[a as usize];
            if let Alt::Iterate { lowest, .. } = &mut self.cps[node.act.cp as usize].alt {
                *lowest = (*lowest).min(to);
            }
            a = node.up;
        }
    }

    /// Index of the table for the variant of this call, created on demand.
    fn table_for(&mut self, pred: u32, args: u32, arity: u32) -> u32 {
        let key = (pred, self.snapshot(args, arity));
        let next = self.tables.len() as u32;
        let id = *self.table_index.entry(key).or_insert(next);
        if id == next {
            self.tables.push(Table::default());
        }
        id
    }

    /// Records an answer of a tabled call. False when this call already
    /// passed on the same answer.
    fn table_exit(&mut self, arity: u32, args: u32, act: Act) -> bool {
        let snap = self.snapshot(args, arity);
        let t = &mut self.tables[act.table as usize];
        let id = match t.index.get(&snap) {
            Some(&id) => id,
            None => {
                let id = t.answers.len() as u32;
                t.index.insert(snap.clone(), id);
                t.answers.push(snap);
                self.growth += 1;
                id
            }
        };
        match &mut self.cps[act.cp as usize].alt {
            Alt::Iterate { returned, .. } => returned.insert(id),
            _ => unreachable!("tabled frame without its iterate choicepoint"),
        }
    }

    /// Serves the answers of `table` from position `next` on. The
    /// choicepoint stays even past the last answer, as the table may grow.
    fn consume(
        &mut self,
        pred: u32,
        args: u32,
        table: u32,
        mut next: u32,
        cont: Cont,
        depth: u32,
    ) -> Result<Next, SolveError> {
        let arity = self.prog.preds[pred as usize].arity;
        while (next as usize) < self.tables[table as usize].answers.len() {
            self.step()?;
            let (trail_mark, heap_mark) = (self.trail.len(), self.heap.len());
            let base = self.heap.len() as u32;
            let answer = &self.tables[table as usize].answers[next as usize];
            self.heap.extend(answer.iter().map(|&c| match c {
                Cell::Ref(i) => Cell::Ref(base + i),
                Cell::Str(i) => Cell::Str(base + i),
                c => c,
            }));
            let matched = (0..arity).all(|k| {
                let a = match self.heap[(args + k) as usize] {
                    Cell::Free => Cell::Ref(args + k),
                    c => c,
                };
                self.unify(a, Cell::Ref(base + k))
            });
            next += 1;
            if matched {
                self.cps.push(ChoicePoint {
                    alt: Alt::Answers { table, next },
                    pred,
                    args,
                    cont,
                    anc: NONE,
                    depth,
                    act: NO_ACT,
                    trail_mark,
                    heap_mark,
                    frame_mark: self.frames.len(),
                });
                return Ok(Next::Cont(cont));
            }
            self.undo_to(trail_mark, heap_mark);
        }
        Ok(Next::Fail)
    }

    /// Standalone copy of `arity` argument cells: the arguments first, then
    /// their structure, unbound variables numbered by first occurrence. Two
    /// calls are variants exactly when their copies are equal.
    fn snapshot(&self, args: u32, arity: u32) -> Vec<Cell> {
        let mut out = vec![Cell::Free; arity as usize];
        let mut vars: Vec<(u32, u32)> = Vec::new();
        let mut work: Vec<(Cell, u32)> = (0..arity).rev().map(|k| (Cell::Ref(args + k), k)).collect();
        while let Some((c, dst)) = work.pop() {
            out[dst as usize] = match self.deref(c) {
                Cell::Ref(v) => match vars.iter().find(|(w, _)| *w == v) {
                    Some(&(_, at)) => Cell::Ref(at),
                    None => {
                        vars.push((v, dst));
                        Cell::Free
                    }
                },
                Cell::Str(p) => {
                    let at = out.len() as u32;
                    let f = self.heap[p as usize];
                    let Cell::Functor(_, n) = f else {
                        unreachable!("structure without functor")
                    };
                    out.push(f);
                    out.resize(out.len() + n as usize, Cell::Free);
                    work.extend((1..=n).rev().map(|k| (self.heap[(p + k) as usize], at + k)));
                    Cell::Str(at)
                }
                c => c,
            };
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn try_clauses(
        &mut self,
        prog: &Compiled,
        pred: u32,
        args: u32,
        list: u32,
        start: u32,
        cont: Cont,
        anc: u32,
        depth: u32,
        act: Act,
    ) -> Result<Next, SolveError> {
        let ids = &prog.lists[list as usize];
        let mut i = start as usize;
        while i < ids.len() {
            self.step()?;
            let cid = ids[i];
            let clause = &prog.clauses[cid as usize];
            if self.clashes(&clause.head, args) {
                i += 1;
                continue;
            }
            let (trail_mark, heap_mark) = (self.trail.len(), self.heap.len());
            let base = self.fresh_vars(clause.nvars);
            let matched = clause
                .head
                .iter()
                .enumerate()
                .all(|(k, c)| self.unify_head(c, self.heap[args as usize + k], base));
            if matched {
                if i + 1 < ids.len() {
                    self.cps.push(ChoicePoint {
                        alt: Alt::Clauses {
                            list,
                            next: (i + 1) as u32,
                        },
                        pred,
                        args,
                        cont,
                        anc,
                        depth,
                        act,
                        trail_mark,
                        heap_mark,
                        frame_mark: self.frames.len(),
                    });
                }
                if clause.body.is_empty() {
                    if act.cp != NONE && !self.table_exit(prog.preds[pred as usize].arity, args, act) {
                        return Ok(Next::Fail);
                    }
                    return Ok(Next::Cont(cont));
                }
                let index = self.frames.len() as u32;
                let (body_anc, up) = if act.cp != NONE { (index, anc) } else { (anc, NONE) };
                self.frames.push(Frame {
                    clause: cid,
                    base,
                    depth,
                    parent: cont,
                    anc: body_anc,
                    pred,
                    args,
                    up,
                    act,
                });
                return Ok(Next::Cont(Cont { frame: index, pos: 0 }));
            }
            self.undo_to(trail_mark, heap_mark);
            i += 1;
        }
        Ok(Next::Fail)
    }

    /// Cheap pre-test: some head argument's principal symbol differs from
    /// the call's.
    fn clashes(&self, head: &[CTerm], args: u32) -> bool {
        head.iter().enumerate().any(|(k, c)| {
            let t = self.deref(self.heap[args as usize + k]);
            match (c, t) {
                (_, Cell::Ref(_)) | (CTerm::FirstVar(_) | CTerm::Var(_), _) => false,
                (CTerm::Atom(a), Cell::Atom(b)) => *a != b,
                (CTerm::Int(i), Cell::Int(j)) => *i != j,
                (CTerm::Str(f, xs), Cell::Str(p)) => self.heap[p as usize] != Cell::Functor(*f, xs.len() as u32),
                (CTerm::Ground(_), _) => false,
                _ => true,
            }
        })
    }

    /// Finite failure of a ground atom, explored on a slice of half the
    /// remaining step budget. Returns true when the negation holds.
    fn naf(&mut self, prog: &Compiled, pred: u32, args: u32, depth: u32) -> Result<bool, SolveError> {
        let arity = prog.preds[pred as usize].arity;
        if !(0..arity).all(|k| self.is_ground(self.heap[(args + k) as usize])) {
            return Err(SolveError::Flounder {
                goal: self.describe(prog, pred, args),
            });
        }
        if self.naf_nesting >= MAX_NAF_NESTING {
            return Err(SolveError::BudgetExceeded {
                steps: self.steps,
                reason: format!("negation nested deeper than {MAX_NAF_NESTING}"),
            });
        }
        let barrier = self.cps.len();
        let (trail_mark, heap_mark, frame_mark) = (self.trail.len(), self.heap.len(), self.frames.len());
        let saved_limit = self.limit;
        self.limit = self.steps + (saved_limit.saturating_sub(self.steps)) / 2;
        self.naf_nesting += 1;
        let result = self
            .call(prog, pred, args, DONE, NONE, depth)
            .and_then(|next| self.run(next, barrier));
        self.naf_nesting -= 1;
        self.limit = saved_limit;
        self.cps.truncate(barrier);
        self.undo_to(trail_mark, heap_mark);
        self.frames.truncate(frame_mark);
        let proved = result.map_err(|e| match e {
            SolveError::BudgetExceeded { steps, reason } => SolveError::BudgetExceeded {
                steps,
                reason: format!("{reason}, inside a negated goal"),
            },
            other => other,
        })?;
        Ok(!proved)
    }

    /// `member/2` with the answers, in the order, of its two clauses. An
    /// unbound tail is extended one cell at a time, as the clauses would.
    #[allow(clippy::too_many_arguments)]
    fn member(
        &mut self,
        prog: &Compiled,
        pred: u32,
        args: u32,
        mut cur: Cell,
        mut skip: bool,
        cont: Cont,
        depth: u32,
    ) -> Result<Next, SolveError> {
        let item = match self.heap[args as usize] {
            Cell::Free => Cell::Ref(args),
            c => c,
        };
        loop {
            cur = self.deref(cur);
            let (trail_mark, heap_mark) = (self.trail.len(), self.heap.len());
            let (matched, resume, resume_skip) = match cur {
                Cell::Str(p) if self.heap[p as usize] == Cell::Functor(prog.cons, 2) => {
                    self.step()?;
                    let (head, tail) = (self.heap[p as usize + 1], self.heap[p as usize + 2]);
                    (self.unify(item, head), tail, false)
                }
                Cell::Ref(v) if skip => {
                    self.step()?;
                    let h = self.fresh_vars(2);
                    let cell = self.cons(prog, Cell::Ref(h), Cell::Ref(h + 1));
                    self.bind(v, cell);
                    cur = Cell::Ref(h + 1);
                    skip = false;
                    continue;
                }
                Cell::Ref(v) => {
                    self.step()?;
                    let t = self.fresh_vars(1);
                    let cell = self.cons(prog, item, Cell::Ref(t));
                    (self.bind_checked(v, cell), cur, true)
                }
                _ => return Ok(Next::Fail),
            };
            if matched {
                if matches!(self.deref(resume), Cell::Str(_) | Cell::Ref(_)) {
                    self.cps.push(ChoicePoint {
                        alt: Alt::Member {
                            tail: resume,
                            skip: resume_skip,
                        },
                        pred,
                        args,
                        cont,
                        anc: NONE,
                        depth,
                        act: NO_ACT,
                        trail_mark,
                        heap_mark,
                        frame_mark: self.frames.len(),
                    });
                }
                return Ok(Next::Cont(cont));
            }
            self.undo_to(trail_mark, heap_mark);
            cur = resume;
            skip = resume_skip;
        }
    }

    fn insert_sorted(&mut self, prog: &Compiled, args: u32, cont: Cont) -> Result<Next, SolveError> {
        let instantiation = || SolveError::Instantiation {
            pred: format!("{}/{}", INSERT_SORTED.0, INSERT_SORTED.1),
        };
        let a = args as usize;
        let item = self.deref(self.heap[a]);
        if !self.is_ground(item) {
            return Err(instantiation());
        }
        let (mut key, mut other) = std::mem::take(&mut self.text);
        key.clear();
        self.write_cell(prog, item, &mut key);
        let mut before: Vec<Cell> = Vec::new();
        let mut cur = self.deref(self.heap[a + 1]);
        let mut duplicate = false;
        let rest = loop {
            match self.list_cell(prog, cur) {
                Some(None) => break cur,
                Some(Some((head, tail))) => {
                    if !self.is_ground(head) {
                        self.text = (key, other);
                        return Err(instantiation());
                    }
                    other.clear();
                    self.write_cell(prog, head, &mut other);
                    match other.as_str().cmp(key.as_str()) {
                        Ordering::Less => {
                            before.push(head);
                            cur = self.deref(tail);
                        }
                        Ordering::Equal => {
                            duplicate = true;
                            break cur;
                        }
                        Ordering::Greater => break cur,
                    }
                }
                None => {
                    self.text = (key, other);
                    return Err(instantiation());
                }
            }
        };
        self.text = (key, other);
        // The unexamined suffix is shared; it still has to be a proper list.
        let mut tail = rest;
        while let Some(Some((head, next))) = self.list_cell(prog, tail) {
            if !self.is_ground(head) {
                return Err(instantiation());
            }
            tail = self.deref(next);
        }
        if self.list_cell(prog, tail).is_none() {
            return Err(instantiation());
        }
        let mut list = if duplicate { rest } else { self.cons(prog, item, rest) };
        for head in before.into_iter().rev() {
            list = self.cons(prog, head, list);
        }
        Ok(if self.unify(list, self.heap[a + 2]) {
            Next::Cont(cont)
        } else {
            Next::Fail
        })
    }

    /// For a dereferenced cell: `Some(None)` for `[]`, `Some(Some((head,
    /// tail)))` for a list cell, `None` otherwise.
    fn list_cell(&self, prog: &Compiled, c: Cell) -> Option<Option<(Cell, Cell)>> {
        match c {
            Cell::Atom(a) if a == prog.nil => Some(None),
            Cell::Str(p) if self.heap[p as usize] == Cell::Functor(prog.cons, 2) => {
                let p = p as usize;
                Some(Some((self.heap[p + 1], self.heap[p + 2])))
            }
            _ => None,
        }
    }

    fn cons(&mut self, prog: &Compiled, head: Cell, tail: Cell) -> Cell {
        let addr = self.heap.len() as u32;
        self.heap.extend([Cell::Functor(prog.cons, 2), head, tail]);
        Cell::Str(addr)
    }

    fn step(&mut self) -> Result<(), SolveError> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(SolveError::BudgetExceeded {
                steps: self.steps - 1,
                reason: "step budget exhausted".into(),
            });
        }
        if self.steps.is_multiple_of(CLOCK_INTERVAL) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(SolveError::Timeout { steps: self.steps });
                }
            }
        }
        Ok(())
    }

    /// Pushes `n` unbound variables and returns the address of the first.
    fn fresh_vars(&mut self, n: u32) -> u32 {
        let base = self.heap.len();
        self.heap.resize(base + n as usize, Cell::Free);
        base as u32
    }

    fn undo_to(&mut self, trail_mark: usize, heap_mark: usize) {
        while self.trail.len() > trail_mark {
            let v = self.trail.pop().expect("trail above mark") as usize;
            if v < heap_mark {
                self.heap[v] = Cell::Free;
            }
        }
        self.heap.truncate(heap_mark);
    }

    fn bind(&mut self, v: u32, t: Cell) {
        self.heap[v as usize] = t;
        self.trail.push(v);
    }

    fn bind_checked(&mut self, v: u32, t: Cell) -> bool {
        if self.occurs_check && matches!(t, Cell::Str(_)) && self.occurs(v, t) {
            return false;
        }
        self.bind(v, t);
        true
    }

    fn deref(&self, mut c: Cell) -> Cell {
        while let Cell::Ref(v) = c {
            match self.heap[v as usize] {
                Cell::Free => break,
                next => c = next,
            }
        }
        c
    }

    fn functor(&self, p: u32) -> (Sym, u32) {
        match self.heap[p as usize] {
            Cell::Functor(f, n) => (f, n),
            _ => unreachable!("structure without functor cell"),
        }
    }

    fn is_ground(&self, c: Cell) -> bool {
        let mut c = c;
        loop {
            match self.deref(c) {
                Cell::Ref(_) => return false,
                Cell::Str(p) => {
                    let (_, n) = self.functor(p);
                    if n == 0 {
                        return true;
                    }
                    if !(1..n).all(|k| self.is_ground(self.heap[(p + k) as usize])) {
                        return false;
                    }
                    c = self.heap[(p + n) as usize];
                }
                _ => return true,
            }
        }
    }

    fn occurs(&self, v: u32, c: Cell) -> bool {
        let mut c = c;
        loop {
            match self.deref(c) {
                Cell::Ref(w) => return w == v,
                Cell::Str(p) => {
                    let (_, n) = self.functor(p);
                    if n == 0 {
                        return false;
                    }
                    if (1..n).any(|k| self.occurs(v, self.heap[(p + k) as usize])) {
                        return true;
                    }
                    c = self.heap[(p + n) as usize];
                }
                _ => return false,
            }
        }
    }

    fn unify(&mut self, a: Cell, b: Cell) -> bool {
        let mut stack = std::mem::take(&mut self.pdl);
        stack.clear();
        stack.push((a, b));
        let mut ok = true;
        while let Some((a, b)) = stack.pop() {
            let a = self.deref(a);
            let b = self.deref(b);
            ok = match (a, b) {
                (Cell::Ref(x), Cell::Ref(y)) => {
                    if x != y {
                        // newer variable points at the older one
                        let (young, old) = if x > y { (x, y) } else { (y, x) };
                        self.bind(young, Cell::Ref(old));
                    }
                    true
                }
                (Cell::Ref(x), t) | (t, Cell::Ref(x)) => self.bind_checked(x, t),
                (Cell::Atom(p), Cell::Atom(q)) => p == q,
                (Cell::Int(p), Cell::Int(q)) => p == q,
                (Cell::Str(p), Cell::Str(q)) => {
                    if p != q {
                        if self.heap[p as usize] != self.heap[q as usize] {
                            false
                        } else {
                            let (_, n) = self.functor(p);
                            for k in (1..=n).rev() {
                                stack.push((self.heap[(p + k) as usize], self.heap[(q + k) as usize]));
                            }
                            true
                        }
                    } else {
                        true
                    }
                }
                _ => false,
            };
            if !ok {
                break;
            }
        }
        self.pdl = stack;
        ok
    }

    fn unify_head(&mut self, c: &CTerm, t: Cell, base: u32) -> bool {
        match c {
            CTerm::FirstVar(i) => {
                // fresh slot above every choicepoint mark: no trail entry needed
                self.heap[(base + i) as usize] = t;
                true
            }
            CTerm::Var(i) => self.unify(Cell::Ref(base + i), t),
            CTerm::Ground(g) => self.unify(*g, t),
            CTerm::Atom(a) => match self.deref(t) {
                Cell::Ref(x) => {
                    self.bind(x, Cell::Atom(*a));
                    true
                }
                Cell::Atom(b) => *a == b,
                _ => false,
            },
            CTerm::Int(i) => match self.deref(t) {
                Cell::Ref(x) => {
                    self.bind(x, Cell::Int(*i));
                    true
                }
                Cell::Int(j) => *i == j,
                _ => false,
            },
            CTerm::Str(f, args) => match self.deref(t) {
                Cell::Ref(x) => {
                    let built = self.build(c, base);
                    self.bind_checked(x, built)
                }
                Cell::Str(p) => {
                    if self.heap[p as usize] != Cell::Functor(*f, args.len() as u32) {
                        return false;
                    }
                    args.iter()
                        .enumerate()
                        .all(|(k, ca)| self.unify_head(ca, self.heap[p as usize + 1 + k], base))
                }
                _ => false,
            },
        }
    }

    fn build(&mut self, c: &CTerm, base: u32) -> Cell {
        match c {
            CTerm::FirstVar(i) | CTerm::Var(i) => match self.heap[(base + i) as usize] {
                Cell::Free => Cell::Ref(base + i),
                c => c,
            },
            CTerm::Atom(a) => Cell::Atom(*a),
            CTerm::Int(i) => Cell::Int(*i),
            CTerm::Ground(g) => *g,
            CTerm::Str(f, args) => {
                let addr = self.heap.len() as u32;
                self.heap.push(Cell::Functor(*f, args.len() as u32));
                let first = self.put_args(args, base);
                debug_assert_eq!(first, addr + 1);
                Cell::Str(addr)
            }
        }
    }

    /// Lays out the arguments of a call contiguously on the heap.
    fn put_args(&mut self, args: &[CTerm], base: u32) -> u32 {
        let addr = self.heap.len();
        self.heap.resize(addr + args.len(), Cell::Int(0));
        for (k, a) in args.iter().enumerate() {
            let c = self.build(a, base);
            self.heap[addr + k] = c;
        }
        addr as u32
    }

    /// Appends the canonical text of a ground term, as [`Term`]'s `Display`
    /// would print it.
    fn write_cell(&self, prog: &Compiled, c: Cell, out: &mut String) {
        use std::fmt::Write as _;
        let c = self.deref(c);
        match c {
            Cell::Ref(v) => {
                let _ = write!(out, "_G{v}");
            }
            Cell::Atom(a) => out.push_str(&prog.texts[a as usize]),
            Cell::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Cell::Str(p) => {
                if let Some(Some((head, tail))) = self.list_cell(prog, c) {
                    out.push('[');
                    self.write_cell(prog, head, out);
                    let mut tail = self.deref(tail);
                    loop {
                        match self.list_cell(prog, tail) {
                            Some(Some((h, t))) => {
                                out.push(',');
                                self.write_cell(prog, h, out);
                                tail = self.deref(t);
                            }
                            Some(None) => break,
                            None => {
                                out.push('|');
                                self.write_cell(prog, tail, out);
                                break;
                            }
                        }
                    }
                    out.push(']');
                } else {
                    let (f, n) = self.functor(p);
                    out.push_str(&prog.texts[f as usize]);
                    out.push('(');
                    for k in 1..=n {
                        if k > 1 {
                            out.push(',');
                        }
                        self.write_cell(prog, self.heap[(p + k) as usize], out);
                    }
                    out.push(')');
                }
            }
            Cell::Functor(..) | Cell::Free => unreachable!("not a term cell"),
        }
    }

    /// Converts a runtime term to a [`Term`]; unbound variables are named
    /// `_V<n>` by their position in `fresh`.
    fn to_term(&self, c: Cell, fresh: &mut Vec<u32>) -> Term {
        match self.deref(c) {
            Cell::Ref(v) => {
                let n = match fresh.iter().position(|&w| w == v) {
                    Some(n) => n,
                    None => {
                        fresh.push(v);
                        fresh.len() - 1
                    }
                };
                Term::var(format!("_V{n}"))
            }
            Cell::Atom(a) => Term::Atom(self.prog.names[a as usize].clone()),
            Cell::Int(i) => Term::Int(i),
            Cell::Str(p) => {
                let (f, n) = self.functor(p);
                Term::compound(
                    self.prog.names[f as usize].clone(),
                    (1..=n)
                        .map(|k| self.to_term(self.heap[(p + k) as usize], fresh))
                        .collect(),
                )
            }
            Cell::Functor(..) | Cell::Free => unreachable!("not a term cell"),
        }
    }

    fn describe(&self, prog: &Compiled, pred: u32, args: u32) -> String {
        let info = &prog.preds[pred as usize];
        let mut fresh = Vec::new();
        Term::compound(
            prog.names[info.name as usize].clone(),
            (0..info.arity)
                .map(|k| self.to_term(self.heap[(args + k) as usize], &mut fresh))
                .collect(),
        )
        .to_string()
    }
}
