use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use goalplan::bench::{run_bench, BenchOptions};
use goalplan::engine::{solve, SolveConfig, SolveError};
use goalplan::planner::{
    builtin_catalog, execute_plan, find_task, goal_satisfied, load_catalog, plan, PlanError, PlanOptions, Task,
    TABLE_TASKS,
};
use goalplan::relevance::{build_depgraph, prune_with_report, to_dot};
use goalplan::world::{load_scene_file, random_scene, WorldState};
use goalplan::{parse_program, parse_query, Literal, Program};

const OK: u8 = 0;
const NO_ANSWER: u8 = 1;
const USAGE: u8 = 2;
const TIMEOUT: u8 = 3;
const BAD_INPUT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "goalplan",
    version,
    about = "Logic engine, program slicer and household task planner"
)]
struct Cli {
    /// Log every engine call to stderr.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a program's syntax and print it in canonical form.
    Parse { file: PathBuf },
    /// Print every answer to a query, one per line.
    Solve {
        file: PathBuf,
        #[arg(short, long)]
        query: String,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        steps: Option<u64>,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        #[arg(long)]
        no_loop_check: bool,
    },
    /// Drop the clauses a query cannot reach.
    Prune {
        file: PathBuf,
        #[arg(short, long)]
        query: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the predicate dependency graph of a query as Graphviz DOT.
    Graph {
        file: PathBuf,
        #[arg(short, long)]
        query: String,
        /// Output file; stdout when absent.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Plan a task in a scene, check the plan by execution and print it.
    Plan {
        /// Scene file, or `random:SEED:N`.
        #[arg(long)]
        scene: String,
        #[arg(long)]
        task: String,
        /// Task catalog file to use instead of the built-in one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        no_prune: bool,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Time planning with and without pruning.
    Bench {
        /// Scene file, or `random:SEED:N`.
        #[arg(long)]
        scene: String,
        /// Comma-separated task names, `table` for the three benchmark
        /// tasks, or `all` for the whole catalog.
        #[arg(long, default_value = "table")]
        tasks: String,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Per-run limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        #[arg(long)]
        parallel: bool,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Csv,
}

/// A failed command: message for stderr plus exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.trace { "trace" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Parse { file } => {
            print!("{}", read_program(&file)?);
            Ok(OK)
        }
        Command::Solve {
            file,
            query,
            max_depth,
            steps,
            timeout,
            no_loop_check,
        } => {
            let program = read_program(&file)?;
            let goals = read_query(&query)?;
            let mut cfg = SolveConfig {
                loop_check: !no_loop_check,
                wall_timeout: seconds(timeout)?,
                ..SolveConfig::default()
            };
            if let Some(d) = max_depth {
                cfg.max_depth = d;
            }
            if let Some(s) = steps {
                cfg.step_budget = s;
            }
            cfg.validate().map_err(|e| Failure::new(USAGE, e.to_string()))?;
            let mut found = 0usize;
            for item in solve(&program, &goals, &cfg) {
                match item {
                    Ok(answer) => {
                        found += 1;
                        println!("{answer}");
                    }
                    Err(e) => return Err(solve_failure(e)),
                }
            }
            if found == 0 {
                println!("no");
                return Ok(NO_ANSWER);
            }
            Ok(OK)
        }
        Command::Prune { file, query, output } => {
            let program = read_program(&file)?;
            let goals = read_query(&query)?;
            let report = prune_with_report(&program, &goals);
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_output(output.as_deref(), &report.program.to_string())?;
            Ok(OK)
        }
        Command::Graph { file, query, dot } => {
            let program = read_program(&file)?;
            let goals = read_query(&query)?;
            write_output(dot.as_deref(), &to_dot(&build_depgraph(&program, &goals)))?;
            Ok(OK)
        }
        Command::Plan {
            scene,
            task,
            catalog,
            no_prune,
            max_len,
            timeout,
        } => {
            let state = read_scene(&scene)?;
            let catalog = read_catalog(catalog.as_deref())?;
            let task =
                find_task(&catalog, &task).ok_or_else(|| Failure::new(USAGE, format!("unknown task `{task}`")))?;
            let opts = PlanOptions {
                prune: !no_prune,
                max_plan_len: max_len,
                timeout: seconds(timeout)?,
                ..PlanOptions::default()
            };
            match plan(&state, task, &opts) {
                Ok(p) => {
                    // never print an unchecked plan
                    let end = execute_plan(&state, &p).map_err(|e| Failure::new(NO_ANSWER, e.to_string()))?;
                    if !goal_satisfied(&end, task).map_err(plan_failure)? {
                        return Err(Failure::new(NO_ANSWER, "plan does not reach the goal"));
                    }
                    for a in &p.actions {
                        println!("{a}");
                    }
                    println!("GOAL SATISFIED");
                    Ok(OK)
                }
                Err(e) => Err(plan_failure(e)),
            }
        }
        Command::Bench {
            scene,
            tasks,
            catalog,
            timeout,
            repeats,
            format,
            parallel,
            max_len,
            output,
        } => {
            let state = read_scene(&scene)?;
            let catalog = read_catalog(catalog.as_deref())?;
            let tasks = select_tasks(&catalog, &tasks)?;
            if repeats == 0 {
                return Err(Failure::new(USAGE, "--repeats must be at least 1"));
            }
            let opts = BenchOptions {
                timeout: seconds(Some(timeout))?.expect("timeout given"),
                repeats,
                parallel,
                max_plan_len: max_len,
                ..BenchOptions::default()
            };
            let report = run_bench(&state, &scene, &tasks, &opts);
            let text = match format {
                Format::Md => report.to_markdown(),
                Format::Csv => report.to_csv(),
            };
            write_output(output.as_deref(), &text)?;
            Ok(OK)
        }
    }
}

fn seconds(s: Option<f64>) -> Result<Option<Duration>, Failure> {
    match s {
        None => Ok(None),
        Some(x) if x.is_finite() && x > 0.0 => Ok(Some(Duration::from_secs_f64(x))),
        Some(x) => Err(Failure::new(
            USAGE,
            format!("timeout must be a positive number of seconds, got {x}"),
        )),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(BAD_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn read_program(path: &Path) -> Result<Program, Failure> {
    let text = read_text(path)?;
    parse_program(&text).map_err(|e| Failure::new(BAD_INPUT, format!("{}: {e}", path.display())))
}

fn read_query(text: &str) -> Result<Vec<Literal>, Failure> {
    let text = text.trim();
    let text = if text.ends_with('.') {
        text.to_string()
    } else {
        format!("{text}.")
    };
    parse_query(&text).map_err(|e| Failure::new(BAD_INPUT, format!("query: {e}")))
}

fn read_scene(arg: &str) -> Result<WorldState, Failure> {
    if let Some(rest) = arg.strip_prefix("random:") {
        let bad = || Failure::new(USAGE, format!("expected random:SEED:N, got `{arg}`"));
        let (seed, n) = rest.split_once(':').ok_or_else(bad)?;
        let seed: u64 = seed.parse().map_err(|_| bad())?;
        let n: usize = n.parse().map_err(|_| bad())?;
        return Ok(random_scene(seed, n));
    }
    load_scene_file(arg).map_err(|e| Failure::new(BAD_INPUT, e.to_string()))
}

fn read_catalog(path: Option<&Path>) -> Result<Vec<Task>, Failure> {
    match path {
        None => Ok(builtin_catalog()),
        Some(p) => {
            let text = read_text(p)?;
            load_catalog(&text).map_err(|e| Failure::new(BAD_INPUT, format!("{}: {e}", p.display())))
        }
    }
}

fn select_tasks(catalog: &[Task], arg: &str) -> Result<Vec<Task>, Failure> {
    let names: Vec<&str> = match arg {
        "all" => catalog.iter().map(|t| t.name.as_str()).collect(),
        "table" => TABLE_TASKS.to_vec(),
        list => list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect(),
    };
    if names.is_empty() {
        return Err(Failure::new(USAGE, "no tasks selected"));
    }
    names
        .into_iter()
        .map(|n| {
            find_task(catalog, n)
                .cloned()
                .ok_or_else(|| Failure::new(USAGE, format!("unknown task `{n}`")))
        })
        .collect()
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::new(USAGE, format!("cannot write {}: {e}", p.display())))
        }
    }
}

fn solve_failure(e: SolveError) -> Failure {
    let code = match e {
        SolveError::Timeout { .. } | SolveError::BudgetExceeded { .. } => TIMEOUT,
        SolveError::InvalidConfig(_) => USAGE,
        _ => NO_ANSWER,
    };
    Failure::new(code, e.to_string())
}

fn plan_failure(e: PlanError) -> Failure {
    let code = match &e {
        PlanError::Timeout | PlanError::BudgetExceeded(_) => TIMEOUT,
        PlanError::InvalidOptions(_) => USAGE,
        PlanError::Engine(SolveError::InvalidConfig(_)) => USAGE,
        _ => NO_ANSWER,
    };
    let message = match e {
        PlanError::NoPlan { .. } => format!("NO PLAN: {e}"),
        other => other.to_string(),
    };
    Failure::new(code, message)
}
