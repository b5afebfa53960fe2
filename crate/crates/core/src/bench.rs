//! Pruned vs unpruned planning times.

use std::fmt::{self, Write as _};
use std::time::{Duration, Instant};

use crate::engine::SolveConfig;
use crate::planner::{plan, planning_program, Plan, PlanError, PlanOptions, Task};
use crate::world::WorldState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Timing {
    Seconds(f64),
    Timeout,
}

impl Timing {
    pub fn seconds(self) -> Option<f64> {
        match self {
            Timing::Seconds(s) => Some(s),
            Timing::Timeout => None,
        }
    }
}

impl fmt::Display for Timing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timing::Seconds(s) => write!(f, "{s:.3}"),
            Timing::Timeout => f.write_str("TIMEOUT"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub task: String,
    pub objects: usize,
    pub unpruned: Option<Timing>,
    pub pruned: Option<Timing>,
    pub facts_before: usize,
    pub facts_after: usize,
    pub plan: Option<Plan>,
    /// Set when the row could not be measured (e.g. an unresolvable task).
    pub error: Option<String>,
}

impl BenchRow {
    pub fn plan_len(&self) -> Option<usize> {
        self.plan.as_ref().map(Plan::len)
    }

    /// Unpruned over pruned time. `None` when either side is missing;
    /// infinite when only the unpruned run timed out.
    pub fn speedup(&self) -> Option<f64> {
        match (self.unpruned?, self.pruned?) {
            (Timing::Seconds(u), Timing::Seconds(p)) => Some(u / p.max(1e-9)),
            (Timing::Timeout, Timing::Seconds(_)) => Some(f64::INFINITY),
            _ => None,
        }
    }

    fn speedup_text(&self) -> String {
        match self.speedup() {
            Some(s) if s.is_infinite() => "∞ (timeout)".into(),
            Some(s) => format!("{s:.1}"),
            None => "-".into(),
        }
    }

    fn cells(&self) -> Vec<String> {
        let opt = |t: Option<Timing>| t.map_or("-".to_string(), |t| t.to_string());
        vec![
            self.task.clone(),
            self.objects.to_string(),
            opt(self.unpruned),
            opt(self.pruned),
            self.facts_before.to_string(),
            self.facts_after.to_string(),
            self.plan_len().map_or("-".into(), |n| n.to_string()),
            self.speedup_text(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

const HEADERS: [&str; 9] = [
    "task",
    "objects",
    "unpruned_s",
    "pruned_s",
    "facts_before",
    "facts_after",
    "plan_len",
    "speedup",
    "error",
];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub scene: String,
    pub timeout: Duration,
    pub repeats: usize,
    pub cpus: usize,
    pub profile: &'static str,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    fn header_lines(&self) -> Vec<String> {
        vec![
            format!("scene: {}", self.scene),
            format!(
                "timeout: {} s per run, median of {} repeat(s)",
                self.timeout.as_secs_f64(),
                self.repeats
            ),
            format!("environment: {} CPU(s), {} build", self.cpus, self.profile),
        ]
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        for l in self.header_lines() {
            let _ = writeln!(out, "<!-- {l} -->");
        }
        out.push_str("| Task | Objects | Unpruned (s) | Pruned (s) | Facts before | Facts after | Plan length | Speedup | Error |\n");
        out.push_str("|---|---:|---:|---:|---:|---:|---:|---:|---|\n");
        for r in &self.rows {
            let cells: Vec<String> = r.cells().into_iter().map(|c| c.replace('|', "\\|")).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for l in self.header_lines() {
            let _ = writeln!(out, "# {l}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADERS).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.cells()).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub timeout: Duration,
    pub repeats: usize,
    /// Run rows on separate threads.
    pub parallel: bool,
    pub max_plan_len: usize,
    pub engine: SolveConfig,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            timeout: Duration::from_secs(60),
            repeats: 3,
            parallel: false,
            max_plan_len: 8,
            engine: SolveConfig {
                step_budget: u64::MAX,
                max_depth: 100_000,
                ..SolveConfig::default()
            },
        }
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Times `repeats` runs; a timeout on any run makes the whole cell TIMEOUT.
fn measure(
    scene: &WorldState,
    task: &Task,
    o: &PlanOptions,
    repeats: usize,
) -> Result<(Timing, Option<Plan>), PlanError> {
    let mut times = Vec::new();
    let mut found: Option<Plan> = None;
    for _ in 0..repeats {
        let t0 = Instant::now();
        match plan(scene, task, o) {
            Ok(p) => {
                times.push(t0.elapsed().as_secs_f64());
                if found.as_ref().is_some_and(|q| *q != p) {
                    return Err(PlanError::InvalidPlan("plan differs between repeats".into()));
                }
                found = Some(p);
            }
            Err(PlanError::Timeout) => return Ok((Timing::Timeout, found)),
            Err(e) => return Err(e),
        }
    }
    Ok((Timing::Seconds(median(times)), found))
}

fn bench_row(scene: &WorldState, task: &Task, o: &BenchOptions) -> BenchRow {
    let mut row = BenchRow {
        task: task.name.clone(),
        objects: scene.objects.len(),
        unpruned: None,
        pruned: None,
        facts_before: 0,
        facts_after: 0,
        plan: None,
        error: None,
    };
    let programs =
        planning_program(scene, task, false).and_then(|full| Ok((full.0, planning_program(scene, task, true)?.0)));
    match programs {
        Ok((full, pruned)) => {
            row.facts_before = full.fact_count();
            row.facts_after = pruned.fact_count();
        }
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    }
    let opts = |prune| PlanOptions {
        prune,
        max_plan_len: o.max_plan_len,
        engine: o.engine.clone(),
        timeout: Some(o.timeout),
    };
    let mut errors = Vec::new();
    match measure(scene, task, &opts(false), o.repeats) {
        Ok((t, _)) => row.unpruned = Some(t),
        Err(e) => errors.push(format!("unpruned: {e}")),
    }
    match measure(scene, task, &opts(true), o.repeats) {
        Ok((t, p)) => {
            row.pruned = Some(t);
            row.plan = p;
        }
        Err(e) => errors.push(format!("pruned: {e}")),
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// For each task, times planning without and then with pruning. Every
/// reported plan has been checked by execution (see [`plan`]).
pub fn run_bench(scene: &WorldState, scene_name: &str, tasks: &[Task], o: &BenchOptions) -> BenchReport {
    assert!(o.repeats >= 1, "repeats must be at least 1");
    let rows = if o.parallel {
        std::thread::scope(|sc| {
            let handles: Vec<_> = tasks.iter().map(|t| sc.spawn(move || bench_row(scene, t, o))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench row panicked"))
                .collect()
        })
    } else {
        tasks.iter().map(|t| bench_row(scene, t, o)).collect()
    };
    BenchReport {
        scene: scene_name.to_string(),
        timeout: o.timeout,
        repeats: o.repeats,
        cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
        profile: if cfg!(debug_assertions) { "debug" } else { "optimized" },
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{builtin_catalog, find_task, TABLE_TASKS};
    use crate::world::load_scene;

    fn six() -> WorldState {
        load_scene(include_str!("../fixtures/six_objects.toml")).unwrap()
    }

    fn quick() -> BenchOptions {
        BenchOptions {
            timeout: Duration::from_secs(30),
            repeats: 1,
            ..BenchOptions::default()
        }
    }

    #[test]
    fn unresolvable_row_is_flagged() {
        let cat = builtin_catalog();
        let tasks = vec![
            find_task(&cat, "grab_remote").unwrap().clone(),
            Task::new("grab_dragon", &[("holds", "dragon")]),
        ];
        let r = run_bench(&six(), "six", &tasks, &quick());
        assert!(r.rows[0].error.is_none());
        assert_eq!(r.rows[0].plan_len(), Some(2));
        assert!(r.rows[1].error.as_deref().unwrap().contains("dragon"));
    }

    #[test]
    fn formats_carry_same_numbers() {
        let cat = builtin_catalog();
        let tasks: Vec<Task> = TABLE_TASKS
            .iter()
            .map(|n| find_task(&cat, n).unwrap().clone())
            .collect();
        let r = run_bench(
            &six(),
            "six",
            &tasks,
            &BenchOptions {
                parallel: true,
                ..quick()
            },
        );
        let md = r.to_markdown();
        let csv_text = r.to_csv();
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(csv_text.as_bytes());
        let csv_rows: Vec<Vec<String>> = rdr
            .records()
            .map(|x| x.unwrap().iter().map(String::from).collect())
            .collect();
        let md_rows: Vec<Vec<String>> = md
            .lines()
            .filter(|l| l.starts_with("| ") && !l.starts_with("| Task"))
            .map(|l| l.trim_matches('|').split(" | ").map(|c| c.trim().to_string()).collect())
            .collect();
        assert_eq!(csv_rows, md_rows);
        for row in &r.rows {
            assert!(row.facts_after <= row.facts_before);
            assert!(row.plan_len().unwrap() >= 1);
        }
    }

    #[test]
    fn repeats_give_identical_plans() {
        let cat = builtin_catalog();
        let t = find_task(&cat, "grab_remote").unwrap().clone();
        let r = run_bench(&six(), "six", &[t], &BenchOptions { repeats: 3, ..quick() });
        assert!(r.rows[0].error.is_none(), "{:?}", r.rows[0].error);
    }

    #[test]
    fn speedup_text() {
        let mut row = BenchRow {
            task: "t".into(),
            objects: 1,
            unpruned: Some(Timing::Timeout),
            pruned: Some(Timing::Seconds(0.5)),
            facts_before: 2,
            facts_after: 1,
            plan: None,
            error: None,
        };
        assert_eq!(row.speedup_text(), "∞ (timeout)");
        row.unpruned = Some(Timing::Seconds(5.0));
        assert_eq!(row.speedup_text(), "10.0");
    }
}
