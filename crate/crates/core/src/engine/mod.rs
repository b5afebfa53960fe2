//! Goal-directed SLDNF resolution.
//!
//! The solver is depth-first, tries clauses in source order and selects
//! literals left to right. A positive call that is a variant of one of its
//! ancestors on the current derivation path does not re-enter the clauses
//! (the loop check). For predicates that can recurse without shrinking a
//! term, it instead consumes the answers the ancestor has found so far, and
//! the ancestor repeats its clauses until no new answer appears. This keeps
//! left-recursive programs such as
//! `parent(P, C) :- sibling(X, C), parent(P, X)` both terminating and
//! complete on finite domains. With `loop_check` off, such calls simply
//! recurse until a budget runs out. Negation is
//! finite failure over a ground atom; selecting a non-ground negated literal
//! is reported as floundering.
//!
//! This is not a stable-model solver. Programs whose meaning depends on
//! unstratified negation get SLDNF semantics here.
//!
//! [`fixpoint_eval`] is an independent bottom-up evaluator for naf-free
//! programs, used to check the solver.

mod fixpoint;
mod machine;
mod prelude;

use std::collections::HashSet;
use std::fmt;
use std::sync::{mpsc, Arc};
use std::time::Duration;

use crate::syntax::{Literal, Program};
use crate::term::{Substitution, Term, Var};

pub use fixpoint::{fixpoint_eval, project_answers};
pub use prelude::{is_prelude_predicate, prelude_predicates, prelude_program, PRELUDE_SOURCE};

use machine::Machine;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    /// Maximum derivation depth (nesting of calls).
    pub max_depth: usize,
    /// Maximum number of resolution steps: clause head attempts plus builtin
    /// and native calls.
    pub step_budget: u64,
    pub occurs_check: bool,
    pub loop_check: bool,
    pub wall_timeout: Option<Duration>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_depth: 10_000,
            step_budget: 5_000_000,
            occurs_check: true,
            loop_check: true,
            wall_timeout: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.max_depth == 0 {
            return Err(SolveError::InvalidConfig("max_depth must be positive".into()));
        }
        if self.step_budget == 0 {
            return Err(SolveError::InvalidConfig("step_budget must be positive".into()));
        }
        if self.wall_timeout == Some(Duration::ZERO) {
            return Err(SolveError::InvalidConfig("wall_timeout must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("floundering: negated goal `{goal}` is not ground")]
    Flounder { goal: String },
    #[error("resource budget exceeded after {steps} steps ({reason})")]
    BudgetExceeded { steps: u64, reason: String },
    #[error("timed out after {steps} steps")]
    Timeout { steps: u64 },
    #[error("instantiation error in {pred}: arguments must be ground proper lists")]
    Instantiation { pred: String },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("program not supported by the fixpoint oracle: {0}")]
    OracleUnsupported(String),
}

/// How an answer stream ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Exhausted,
    BudgetExceeded,
    Timeout,
    /// Stopped by some other error (floundering, bad configuration, ...).
    Error,
}

/// Bindings for the named variables of a query, in order of first occurrence.
///
/// Values are fully resolved. Variables left unbound by the derivation appear
/// as `_V0`, `_V1`, ... numbered by first occurrence within the answer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Answer {
    bindings: Vec<(Var, Term)>,
}

impl Answer {
    pub fn bindings(&self) -> &[(Var, Term)] {
        &self.bindings
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| v.name() == name).map(|(_, t)| t)
    }

    pub fn values(&self) -> Vec<Term> {
        self.bindings.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn to_substitution(&self) -> Substitution {
        Substitution::from_pairs(self.bindings.iter().cloned())
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() {
            return f.write_str("yes");
        }
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} = {t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Lazy stream of answers. Duplicate answers (up to variable renaming) are
/// suppressed. An error item ends the stream; [`Solutions::termination`]
/// reports why the stream stopped.
pub struct Solutions {
    machine: Machine,
    started: bool,
    termination: Option<Termination>,
    seen: HashSet<Vec<Term>>,
    pending: Option<SolveError>,
}

impl Solutions {
    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    /// Resolution steps spent so far.
    pub fn steps(&self) -> u64 {
        self.machine.steps()
    }

    /// Collects every answer; the error that ended the stream, if any, is
    /// returned alongside.
    pub fn collect_all(self) -> (Vec<Answer>, Option<SolveError>) {
        let mut answers = Vec::new();
        for item in self {
            match item {
                Ok(a) => answers.push(a),
                Err(e) => return (answers, Some(e)),
            }
        }
        (answers, None)
    }
}

impl Iterator for Solutions {
    type Item = Result<Answer, SolveError>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Some(e) = self.pending.take() {
            self.termination = Some(Termination::Error);
            return Some(Err(e));
        }
        if self.termination.is_some() {
            return None;
        }
        loop {
            let found = if self.started {
                self.machine.next_answer()
            } else {
                self.started = true;
                self.machine.first_answer()
            };
            match found {
                Ok(true) => {
                    let answer = self.machine.answer();
                    if self.seen.insert(answer.values()) {
                        return Some(Ok(answer));
                    }
                }
                Ok(false) => {
                    self.termination = Some(Termination::Exhausted);
                    return None;
                }
                Err(e) => {
                    self.termination = Some(match e {
                        SolveError::BudgetExceeded { .. } => Termination::BudgetExceeded,
                        SolveError::Timeout { .. } => Termination::Timeout,
                        _ => Termination::Error,
                    });
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Solves `goals` against `program` plus the prelude (`member/2`, `subset/2`,
/// `insert_sorted/3`; any of them the program defines itself is not added).
pub fn solve(program: &Program, goals: &[Literal], cfg: &SolveConfig) -> Solutions {
    let pending = cfg.validate().err();
    Solutions {
        machine: Machine::new(program, goals, cfg),
        started: false,
        termination: None,
        seen: HashSet::new(),
        pending,
    }
}

/// Negation as failure for a single atom under `s`: true iff the atom has no
/// proof. Exhausting the budget is an error, never a success.
pub fn solve_naf(program: &Program, atom: &Term, cfg: &SolveConfig, s: &Substitution) -> Result<bool, SolveError> {
    let goal = s.apply(atom);
    if !goal.is_ground() {
        return Err(SolveError::Flounder { goal: goal.to_string() });
    }
    match solve(program, &[Literal::Pos(goal)], cfg).next() {
        None => Ok(true),
        Some(Ok(_)) => Ok(false),
        Some(Err(e)) => Err(e),
    }
}

/// Runs a solve session on its own thread and hands answers over a bounded
/// channel, in production order. Dropping the receiver stops the producer at
/// its next answer.
pub fn spawn_solve(
    program: Arc<Program>,
    goals: Vec<Literal>,
    cfg: SolveConfig,
    capacity: usize,
) -> mpsc::Receiver<Result<Answer, SolveError>> {
    let (tx, rx) = mpsc::sync_channel(capacity);
    std::thread::spawn(move || {
        for item in solve(&program, &goals, &cfg) {
            if tx.send(item).is_err() {
                break;
            }
        }
    });
    rx
}
