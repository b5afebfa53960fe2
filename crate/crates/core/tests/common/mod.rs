#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use goalplan::engine::{fixpoint_eval, project_answers};
use goalplan::planner::{domain_kb, goal_satisfied, Task};
use goalplan::world::{fluent_list, fluents, random_scene, state_to_facts, Action, WorldState, AGENT_ID};
use goalplan::{parse_program, parse_query, solve, Literal, Program, SolveConfig, SolveError, Term};

pub const FAMILY: &str = include_str!("../../fixtures/family.lp");
pub const SIX: &str = include_str!("../../fixtures/six_objects.toml");
pub const MINIMAL: &str = include_str!("../../fixtures/minimal.toml");

const CONSTANTS: [&str; 4] = ["a", "b", "c", "d"];
const VARS: [&str; 4] = ["X", "Y", "Z", "W"];

/// Shape of a generated program.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub preds: usize,
    pub facts: usize,
    pub naf: bool,
    pub recursion: bool,
}

/// A random stratified, range-restricted program and a query over one of
/// its predicates. Predicate `pI` only calls `pJ` with `J < I`, except for
/// optional direct self-recursion; negated calls always go strictly down.
pub fn random_program(seed: u64, shape: Shape) -> (Program, Vec<Literal>, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity: Vec<usize> = (0..shape.preds).map(|_| rng.gen_range(1..=2)).collect();
    let mut src = String::new();
    let constant = |rng: &mut ChaCha8Rng| *CONSTANTS.choose(rng).unwrap();

    for _ in 0..shape.facts {
        // facts live on the lower half so rules have something to join
        let p = rng.gen_range(0..shape.preds.div_ceil(2));
        let args: Vec<&str> = (0..arity[p]).map(|_| constant(&mut rng)).collect();
        src.push_str(&format!("p{p}({}).\n", args.join(", ")));
    }
    for p in 1..shape.preds {
        for _ in 0..rng.gen_range(1..=2) {
            let mut bound: Vec<&str> = Vec::new();
            let mut body: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                let q = rng.gen_range(0..p);
                let args: Vec<&str> = (0..arity[q])
                    .map(|_| {
                        if rng.gen_bool(0.15) {
                            constant(&mut rng)
                        } else {
                            let v = *VARS[..3].choose(&mut rng).unwrap();
                            if !bound.contains(&v) {
                                bound.push(v);
                            }
                            v
                        }
                    })
                    .collect();
                body.push(format!("p{q}({})", args.join(", ")));
            }
            if bound.is_empty() {
                bound.push("W");
                body.push(format!("p0({})", vec!["W"; arity[0]].join(", ")));
            }
            let pick = |rng: &mut ChaCha8Rng, bound: &[&'static str]| -> &'static str {
                if rng.gen_bool(0.1) {
                    constant(rng)
                } else {
                    bound.choose(rng).copied().unwrap()
                }
            };
            if bound.len() >= 2 && rng.gen_bool(0.25) {
                body.push(format!("{} \\= {}", bound[0], bound[1]));
            }
            if shape.naf && rng.gen_bool(0.4) {
                let q = rng.gen_range(0..p);
                let args: Vec<&str> = (0..arity[q]).map(|_| pick(&mut rng, &bound)).collect();
                body.push(format!("not p{q}({})", args.join(", ")));
            }
            let head: Vec<&str> = (0..arity[p]).map(|_| pick(&mut rng, &bound)).collect();
            src.push_str(&format!("p{p}({}) :- {}.\n", head.join(", "), body.join(", ")));
        }
        if shape.recursion && rng.gen_bool(0.4) {
            // transitive step through a lower binary predicate or itself
            let left = rng.gen_bool(0.5);
            let r = if arity[p] == 2 {
                let step = (0..p)
                    .find(|&q| arity[q] == 2)
                    .map_or(format!("p{p}(X, Z)"), |q| format!("p{q}(X, Z)"));
                if left {
                    format!("p{p}(X, Y) :- p{p}(Z, Y), {step}.\n")
                } else {
                    format!("p{p}(X, Y) :- {step}, p{p}(Z, Y).\n")
                }
            } else if left {
                format!("p{p}(X) :- p{p}(X), p0({}).\n", vec!["X"; arity[0]].join(", "))
            } else {
                format!("p{p}(X) :- p0({}), p{p}(X).\n", vec!["X"; arity[0]].join(", "))
            };
            src.push_str(&r);
        }
    }
    let q = rng.gen_range(0..shape.preds);
    let qargs: Vec<String> = (0..arity[q])
        .map(|i| {
            if rng.gen_bool(0.2) {
                constant(&mut rng).to_string()
            } else {
                format!("Q{i}")
            }
        })
        .collect();
    let query = format!("?- p{q}({}).", qargs.join(", "));
    let program = parse_program(&src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    (program, parse_query(&query).unwrap(), format!("{src}{query}\n"))
}

/// Every answer, as text, or the error that ended the stream.
pub fn answer_set(p: &Program, q: &[Literal], cfg: &SolveConfig) -> Result<BTreeSet<String>, SolveError> {
    let (answers, err) = solve(p, q, cfg).collect_all();
    match err {
        Some(e) => Err(e),
        None => Ok(answers.iter().map(|a| a.to_string()).collect()),
    }
}

/// The fixpoint model's projection, printed the way answers print.
pub fn oracle(src: &str, query: &str) -> BTreeSet<String> {
    let p = parse_program(src).unwrap();
    let q = parse_query(query).unwrap();
    let model = fixpoint_eval(&p).unwrap();
    let names: Vec<String> = goalplan::syntax::goal_vars(&q)
        .iter()
        .map(|v| v.name().to_string())
        .collect();
    project_answers(&model, &q)
        .unwrap()
        .into_iter()
        .map(|vals| {
            if names.is_empty() {
                return "yes".to_string();
            }
            names
                .iter()
                .zip(&vals)
                .map(|(n, v)| format!("{n} = {v}"))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect()
}

/// Splits generated text into program source and query.
pub fn split(text: &str) -> (&str, &str) {
    let at = text.rfind("?-").unwrap();
    (&text[..at], &text[at..])
}

/// World state with the step counter cleared, rendered for hashing.
fn state_key(s: &WorldState) -> String {
    let mut s = s.clone();
    s.step = 0;
    format!("{s:?}")
}

/// Length of a shortest action sequence reaching the task's goal, by
/// breadth-first search over simulator states.
pub fn bfs_plan_len(start: &WorldState, task: &Task, max_len: usize) -> Option<usize> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut queue = VecDeque::from([(start.clone(), 0usize)]);
    seen.insert(state_key(start));
    while let Some((s, d)) = queue.pop_front() {
        if goal_satisfied(&s, task).expect("resolvable task") {
            return Some(d);
        }
        if d == max_len {
            continue;
        }
        let mut targets: Vec<&str> = s.objects.keys().map(String::as_str).collect();
        targets.push(AGENT_ID);
        for a in Action::all_for(targets) {
            if let Ok(next) = s.apply_action(&a) {
                if seen.insert(state_key(&next)) {
                    queue.push_back((next, d + 1));
                }
            }
        }
    }
    None
}

/// Walks `steps` random legal actions from `s`, returning every state seen.
pub fn random_walk(s: &WorldState, steps: usize, rng: &mut ChaCha8Rng) -> Vec<WorldState> {
    let mut out = vec![s.clone()];
    let mut cur = s.clone();
    for _ in 0..steps {
        let legal = cur.legal_actions();
        let Some(a) = legal.choose(rng) else { break };
        cur = cur.apply_action(a).expect("legal action applies");
        out.push(cur.clone());
    }
    out
}

/// The fluent text of a state, as the planner's state lists see it.
pub fn fluent_key(s: &WorldState) -> Vec<String> {
    fluents(s).iter().map(|f| f.to_term().to_string()).collect()
}

/// Whether the knowledge base proves `legal_action(a, State)` for the
/// scene's own state list.
pub fn kb_legal(s: &WorldState, a: &Action) -> bool {
    let p = domain_kb().union(&state_to_facts(s));
    let goal = Literal::Pos(Term::compound("legal_action", vec![a.to_term(), fluent_list(s)]));
    let (answers, err) = solve(&p, &[goal], &SolveConfig::default()).collect_all();
    assert_eq!(err, None);
    !answers.is_empty()
}

/// A seeded state reached by a short random walk, and any action over its
/// objects, the agent or an unknown id.
pub fn sample_pair(seed: u64) -> (WorldState, Action) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1 + (seed % 9) as usize;
    let walk = random_walk(&random_scene(seed, n), (seed % 7) as usize, &mut rng);
    let s = walk.last().unwrap().clone();
    let mut targets: Vec<&str> = s.objects.keys().map(String::as_str).collect();
    targets.push(AGENT_ID);
    targets.push("ghost9");
    let a = Action::all_for(targets).choose(&mut rng).unwrap().clone();
    (s, a)
}
