//! Task planning over the household domain.
//!
//! A task names goal fluents by object type. Encoding resolves the types to
//! concrete objects of a scene and produces a `transform(Goal, Plan)` query
//! against the domain knowledge base plus the scene's facts. Plans are
//! searched by iterative deepening on the length of the action list, so the
//! first plan found is a shortest one.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::engine::{solve, SolveConfig, SolveError};
use crate::parser::parse_program;
use crate::relevance::prune_program;
use crate::syntax::{Literal, Program};
use crate::term::Term;
use crate::world::{
    fluents, state_to_facts, Action, Fluent, IllegalAction, WorldState, GRABBABLE_TYPES, SITTABLE_TYPES,
    SWITCHABLE_TYPES, TASK_TYPES,
};

pub const DOMAIN_SOURCE: &str = include_str!("domain.lp");

/// The planning knowledge base.
pub fn domain_kb() -> &'static Program {
    static KB: OnceLock<Program> = OnceLock::new();
    KB.get_or_init(|| parse_program(DOMAIN_SOURCE).expect("domain knowledge base parses"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub name: String,
    /// (fluent functor, object type) pairs.
    pub goal: Vec<(String, String)>,
}

impl Task {
    pub fn new(name: &str, goal: &[(&str, &str)]) -> Task {
        Task {
            name: name.into(),
            goal: goal.iter().map(|(f, t)| (f.to_string(), t.to_string())).collect(),
        }
    }
}

/// The three benchmark tasks.
pub const TABLE_TASKS: [&str; 3] = [
    "grab_remote",
    "grab_remote_and_shirt",
    "grab_cellphone_and_sit_on_couch",
];

pub fn builtin_catalog() -> Vec<Task> {
    vec![
        Task::new("walk_to_remote", &[("close", "remotecontrol")]),
        Task::new("grab_remote", &[("holds", "remotecontrol")]),
        Task::new(
            "grab_remote_and_shirt",
            &[("holds", "remotecontrol"), ("holds", "shirt")],
        ),
        Task::new(
            "grab_cellphone_and_sit_on_couch",
            &[("holds", "cellphone"), ("sitting_on", "couch")],
        ),
        Task::new("sit_on_couch", &[("sitting_on", "couch")]),
    ]
}

pub fn find_task<'a>(catalog: &'a [Task], name: &str) -> Option<&'a Task> {
    catalog.iter().find(|t| t.name == name)
}

fn known_type(kind: &str) -> bool {
    TASK_TYPES
        .iter()
        .chain(&SWITCHABLE_TYPES)
        .chain(&GRABBABLE_TYPES)
        .chain(&SITTABLE_TYPES)
        .any(|t| *t == kind)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    task: Vec<TaskDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    name: String,
    goal: Vec<(String, String)>,
}

/// Reads a task catalog:
///
/// ```toml
/// [[task]]
/// name = "grab_remote"
/// goal = [["holds", "remotecontrol"]]
/// ```
pub fn load_catalog(text: &str) -> Result<Vec<Task>, String> {
    let doc: CatalogDoc = toml::from_str(text).map_err(|e| e.message().to_string())?;
    let mut out: Vec<Task> = Vec::new();
    for t in doc.task {
        if out.iter().any(|o| o.name == t.name) {
            return Err(format!("duplicate task `{}`", t.name));
        }
        if t.goal.is_empty() {
            return Err(format!("task `{}` has an empty goal", t.name));
        }
        for (functor, kind) in &t.goal {
            if Fluent::new(functor, "x").is_none() {
                return Err(format!("task `{}`: unknown fluent `{functor}`", t.name));
            }
            if !known_type(kind) {
                return Err(format!("task `{}`: unknown object type `{kind}`", t.name));
            }
        }
        out.push(Task {
            name: t.name,
            goal: t.goal,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<Action>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanOptions {
    pub prune: bool,
    pub max_plan_len: usize,
    pub engine: SolveConfig,
    /// Wall-clock limit for the whole search, across all plan lengths.
    pub timeout: Option<Duration>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            prune: true,
            max_plan_len: 8,
            engine: SolveConfig {
                step_budget: 500_000_000,
                ..SolveConfig::default()
            },
            timeout: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("unresolvable task: the scene has no object of type {0}")]
    Unresolvable(String),
    #[error("no plan of length at most {max_len}")]
    NoPlan { max_len: usize },
    #[error("planning timed out")]
    Timeout,
    #[error("planning exceeded its resource budget: {0}")]
    BudgetExceeded(String),
    #[error("engine error: {0}")]
    Engine(SolveError),
    #[error("the engine returned a plan that does not work: {0}")]
    InvalidPlan(String),
    #[error("invalid planning options: {0}")]
    InvalidOptions(String),
}

/// Resolves each (functor, type) pair to the smallest object id of that
/// type. The result is sorted canonically and duplicate-free.
pub fn resolve_goal(t: &Task, s: &WorldState) -> Result<Vec<Fluent>, PlanError> {
    let mut out = Vec::new();
    for (functor, kind) in &t.goal {
        let id = s
            .objects_of_type(kind)
            .next()
            .ok_or_else(|| PlanError::Unresolvable(kind.clone()))?;
        out.push(
            Fluent::new(functor, id).ok_or_else(|| PlanError::InvalidOptions(format!("unknown fluent {functor}")))?,
        );
    }
    let mut keyed: Vec<(String, Fluent)> = out.into_iter().map(|f| (f.to_term().to_string(), f)).collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, f)| f).collect())
}

fn transform_goal(goal: &[Fluent], plan: Term) -> Literal {
    Literal::Pos(Term::compound(
        "transform",
        vec![Term::list(goal.iter().map(Fluent::to_term)), plan],
    ))
}

/// `transform(GoalFluents, P)` for the task in this scene.
pub fn encode_task(t: &Task, s: &WorldState) -> Result<Literal, PlanError> {
    Ok(transform_goal(&resolve_goal(t, s)?, Term::var("P")))
}

/// The program a planning run solves against, and its query.
pub fn planning_program(s: &WorldState, t: &Task, prune: bool) -> Result<(Program, Literal), PlanError> {
    let goal = encode_task(t, s)?;
    let program = domain_kb().union(&state_to_facts(s));
    if prune {
        Ok((prune_program(&program, std::slice::from_ref(&goal)), goal))
    } else {
        Ok((program, goal))
    }
}

/// Searches for a shortest plan, then checks it by execution.
///
/// Lengths are tried from 0 up to `max_plan_len`; each length runs one engine
/// session whose query fixes the shape of the action list.
pub fn plan(s: &WorldState, t: &Task, o: &PlanOptions) -> Result<Plan, PlanError> {
    if o.max_plan_len == 0 {
        return Err(PlanError::InvalidOptions("max_plan_len must be at least 1".into()));
    }
    o.engine.validate().map_err(PlanError::Engine)?;
    let start = Instant::now();
    let goal = resolve_goal(t, s)?;
    let (program, _) = planning_program(s, t, o.prune)?;
    for k in 0..=o.max_plan_len {
        let mut cfg = o.engine.clone();
        if let Some(limit) = o.timeout {
            let remaining = limit.checked_sub(start.elapsed()).filter(|d| !d.is_zero());
            let Some(remaining) = remaining else {
                return Err(PlanError::Timeout);
            };
            cfg.wall_timeout = Some(cfg.wall_timeout.map_or(remaining, |w| w.min(remaining)));
        }
        let vars: Vec<Term> = (0..k).map(|i| Term::var(format!("A{i}"))).collect();
        let query = transform_goal(&goal, Term::list(vars));
        log::debug!("plan length {k}: {query}");
        match solve(&program, std::slice::from_ref(&query), &cfg).next() {
            None => continue,
            Some(Ok(answer)) => {
                let actions = answer
                    .values()
                    .iter()
                    .map(|v| {
                        Action::from_term(v).ok_or_else(|| PlanError::InvalidPlan(format!("`{v}` is not an action")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let p = Plan { actions };
                let end = execute_plan(s, &p).map_err(|e| PlanError::InvalidPlan(e.to_string()))?;
                if !goal_satisfied(&end, t)? {
                    return Err(PlanError::InvalidPlan("goal not satisfied after execution".into()));
                }
                return Ok(p);
            }
            Some(Err(SolveError::Timeout { .. })) => return Err(PlanError::Timeout),
            Some(Err(SolveError::BudgetExceeded { steps, reason })) => {
                return Err(PlanError::BudgetExceeded(format!("{reason} after {steps} steps")))
            }
            Some(Err(e)) => return Err(PlanError::Engine(e)),
        }
    }
    Err(PlanError::NoPlan {
        max_len: o.max_plan_len,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("step {index}: {source}")]
pub struct ExecutionError {
    pub index: usize,
    pub source: IllegalAction,
}

/// Applies the plan's actions in order.
pub fn execute_plan(s: &WorldState, p: &Plan) -> Result<WorldState, ExecutionError> {
    let mut cur = s.clone();
    for (index, a) in p.actions.iter().enumerate() {
        cur = cur.apply_action(a).map_err(|source| ExecutionError { index, source })?;
    }
    Ok(cur)
}

/// Whether every goal fluent of the task holds in `s`.
pub fn goal_satisfied(s: &WorldState, t: &Task) -> Result<bool, PlanError> {
    let have = fluents(s);
    Ok(resolve_goal(t, s)?.iter().all(|f| have.contains(f)))
}

#[cfg(test)]
mod tests;
