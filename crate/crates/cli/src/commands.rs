//! Subcommand implementations. Each returns the text to emit or a
//! [`Failure`] carrying the exit code.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use prefplan_core::preference::Dominance;
use prefplan_core::search::{constrained_astar, pareto_front};
use prefplan_core::validate::validate_plan;
use prefplan_core::{Bound, FrontMode, HeuristicTable, Problem, SearchError, SearchOptions};

use crate::bench::{run_bench, summary_table, write_csv, BenchConfig};
use crate::render::{front_svg, trajectory_svg};
use crate::report::{front_points, read_front_csv, write_front_csv, FrontRow, PlanReport};

#[derive(Debug, Parser)]
#[command(name = "prefplan", version, about = "Preference-aware temporal-logic planning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cheapest plan whose preference cost stays within the budget.
    Plan(PlanArgs),
    /// Every Pareto-optimal (cost, preference) trade-off.
    Front(FrontArgs),
    /// Random template benchmark, with and without the heuristic.
    Bench(BenchArgs),
    /// SVG of a plan on a grid, or of a front.
    Render(RenderArgs),
    /// Replay plans and check their reported values.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DominanceArg {
    Sound,
    Scalar,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Disable the max-min heuristic.
    #[arg(long)]
    pub no_heuristic: bool,
    /// Search time limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accepted for uniformity; plan and front are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Preference budget: a rational such as 3, 1.5 or 3/2, or `inf`.
    #[arg(long)]
    pub mu_max: Option<Bound>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub dominance: Option<DominanceArg>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Also write a scatter plot of the front.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Grid side length.
    #[arg(long, default_value_t = 10)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub min_tasks: usize,
    #[arg(long, default_value_t = 5)]
    pub max_tasks: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-run time limit in seconds; runs that hit it are reported as
    /// censored.
    #[arg(long, default_value_t = 120.0)]
    pub timeout: f64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Skip the Pareto-front columns.
    #[arg(long)]
    pub no_front: bool,
    #[arg(long)]
    pub mu_max: Option<Bound>,
    /// Per-trial CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Space-separated actions to draw on the grid.
    #[arg(long, conflicts_with = "front")]
    pub plan: Option<String>,
    /// Front CSV to plot.
    #[arg(long)]
    pub front: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// A front CSV or a plan report (JSON) produced by this tool.
    #[arg(long)]
    pub input: PathBuf,
}

/// A command failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// No plan: an unsatisfiable task, an exhausted budget or a timeout.
    Infeasible(String),
    /// Bad input files or flags.
    Input(anyhow::Error),
    /// An internal consistency check failed.
    Invariant(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Infeasible(_) => 1,
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Infeasible(m) => write!(f, "infeasible: {m}"),
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Invariant(e) => write!(f, "invariant failure: {e:#}"),
        }
    }
}

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn invariant(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invariant(e.into())
}

fn search_failure(e: SearchError) -> Failure {
    match e {
        SearchError::Replay(_) => invariant(e),
        other => Failure::Infeasible(other.to_string()),
    }
}

/// Result of a command: primary output plus output written along the way
/// (e.g. a failing front still emits its empty CSV).
pub struct Output {
    pub text: String,
    pub status: Result<(), Failure>,
}

fn load(path: &Path) -> Result<Problem, Failure> {
    Problem::load(path).map_err(input)
}

fn options(timeout: Option<f64>, problem: &Problem) -> Result<SearchOptions, Failure> {
    let secs = timeout.or(problem.options.timeout);
    let timeout = secs
        .map(|s| {
            Duration::try_from_secs_f64(s).map_err(|_| input(anyhow!("invalid timeout {s}")))
        })
        .transpose()?;
    Ok(SearchOptions::with_timeout(timeout))
}

fn heuristic(problem: &Problem, prod: &prefplan_core::Product<'_>, disabled: bool) -> (HeuristicTable, bool) {
    let on = !disabled && problem.options.heuristic.unwrap_or(true);
    let table = if on {
        HeuristicTable::compute(prod)
    } else {
        HeuristicTable::zero(prod)
    };
    (table, on)
}

pub fn cmd_plan(args: &PlanArgs) -> Output {
    match plan_inner(args) {
        Ok(text) => Output { text, status: Ok(()) },
        Err(f) => Output {
            text: String::new(),
            status: Err(f),
        },
    }
}

fn plan_inner(args: &PlanArgs) -> Result<String, Failure> {
    let problem = load(&args.common.spec)?;
    let prod = problem.product().map_err(invariant)?;
    let (table, on) = heuristic(&problem, &prod, args.common.no_heuristic);
    let mu_max = args.mu_max.unwrap_or(problem.mu_max);
    let opts = options(args.common.timeout, &problem)?;
    let run = constrained_astar(&prod, &table, problem.mu.as_ref(), mu_max, &opts);
    let sol = run.result.map_err(search_failure)?;
    let dfas = problem.dfas();
    validate_plan(&problem.wts, &dfas, problem.mu.as_ref(), &sol.plan, sol.cost, sol.mu, Some(&sol.pcs))
        .map_err(invariant)?;
    let report = PlanReport::new(&problem.wts, &sol, mu_max, on, &run.stats);
    Ok(match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            write_front_csv(&mut buf, &[FrontRow::new(&problem.wts, &sol)]).map_err(invariant)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    })
}

pub fn cmd_front(args: &FrontArgs) -> Output {
    let empty = |format: Format| match format {
        Format::Csv => "cost,mu,plan\n".to_string(),
        Format::Json => "[]\n".to_string(),
    };
    let problem = match load(&args.common.spec) {
        Ok(p) => p,
        Err(f) => return Output { text: String::new(), status: Err(f) },
    };
    match front_inner(args, &problem) {
        Ok(text) if text.is_empty() => Output {
            text: empty(args.format),
            status: Err(Failure::Infeasible("no satisfying plan exists".into())),
        },
        Ok(text) => Output { text, status: Ok(()) },
        Err(f @ Failure::Infeasible(_)) => Output {
            text: empty(args.format),
            status: Err(f),
        },
        Err(f) => Output {
            text: String::new(),
            status: Err(f),
        },
    }
}

fn front_inner(args: &FrontArgs, problem: &Problem) -> Result<String, Failure> {
    let prod = problem.product().map_err(invariant)?;
    let (table, _) = heuristic(problem, &prod, args.common.no_heuristic);
    let mode = match args.dominance {
        Some(DominanceArg::Sound) => FrontMode::Sound,
        Some(DominanceArg::Scalar) => FrontMode::Scalar,
        None => problem.options.dominance.unwrap_or_default(),
    };
    if mode == FrontMode::Scalar && problem.mu.dominance() != Dominance::Componentwise {
        eprintln!(
            "warning: scalar dominance may drop front points for the `{}` preference",
            problem.mu.name()
        );
    }
    let opts = options(args.common.timeout, problem)?;
    let run = pareto_front(&prod, &table, problem.mu.as_ref(), mode, &opts);
    let front = run.result.map_err(search_failure)?;
    if front.is_empty() {
        return Ok(String::new());
    }
    let dfas = problem.dfas();
    for s in &front {
        validate_plan(&problem.wts, &dfas, problem.mu.as_ref(), &s.plan, s.cost, s.mu, Some(&s.pcs))
            .map_err(invariant)?;
    }
    if let Some(path) = &args.svg {
        let points: Vec<_> = front.iter().map(|s| (s.cost, s.mu)).collect();
        fs::write(path, front_svg(&points))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(input)?;
    }
    Ok(match args.format {
        Format::Csv => {
            let rows: Vec<FrontRow> = front.iter().map(|s| FrontRow::new(&problem.wts, s)).collect();
            let mut buf = Vec::new();
            write_front_csv(&mut buf, &rows).map_err(invariant)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            serde_json::to_string_pretty(&front_points(&problem.wts, &front)).expect("reports serialize")
                + "\n"
        }
    })
}

pub fn cmd_bench(args: &BenchArgs) -> Output {
    if args.trials == 0 || args.min_tasks == 0 || args.min_tasks > args.max_tasks || args.size == 0 {
        return Output {
            text: String::new(),
            status: Err(input(anyhow!(
                "need trials >= 1, size >= 1 and 1 <= min-tasks <= max-tasks"
            ))),
        };
    }
    let timeout = match Duration::try_from_secs_f64(args.timeout) {
        Ok(t) => t,
        Err(_) => {
            return Output {
                text: String::new(),
                status: Err(input(anyhow!("invalid timeout {}", args.timeout))),
            }
        }
    };
    let cfg = BenchConfig {
        size: args.size,
        tasks: args.min_tasks..=args.max_tasks,
        trials: args.trials,
        seed: args.seed,
        timeout,
        jobs: args.jobs,
        front: !args.no_front,
        mu_max: args.mu_max.unwrap_or(Bound::Infinite),
    };
    let records = run_bench(&cfg, |r| {
        eprintln!(
            "N={} trial={} plan expansions w/o h {} w/ h {}",
            r.tasks, r.trial, r.plan_without_h.expanded, r.plan_with_h.expanded
        );
    });
    if let Some(path) = &args.out {
        let written = fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))
            .and_then(|f| write_csv(f, &records));
        if let Err(e) = written {
            return Output {
                text: String::new(),
                status: Err(input(e)),
            };
        }
    }
    Output {
        text: summary_table(&records),
        status: Ok(()),
    }
}

pub fn cmd_render(args: &RenderArgs) -> Output {
    let result = (|| -> Result<String, Failure> {
        let problem = load(&args.spec)?;
        if let Some(csv_path) = &args.front {
            let file = fs::File::open(csv_path)
                .with_context(|| format!("opening {}", csv_path.display()))
                .map_err(input)?;
            let rows = read_front_csv(file).map_err(input)?;
            let points: Vec<_> = rows.iter().map(|r| (r.cost, r.mu)).collect();
            return Ok(front_svg(&points));
        }
        let plan = problem
            .wts
            .parse_plan(args.plan.as_deref().unwrap_or(""))
            .map_err(input)?;
        trajectory_svg(problem.grid.as_ref(), &problem.wts, &plan).map_err(input)
    })();
    match result {
        Ok(text) => Output { text, status: Ok(()) },
        Err(f) => Output {
            text: String::new(),
            status: Err(f),
        },
    }
}

pub fn cmd_validate(args: &ValidateArgs) -> Output {
    let result = (|| -> Result<String, Failure> {
        let problem = load(&args.spec)?;
        let text = fs::read_to_string(&args.input)
            .with_context(|| format!("reading {}", args.input.display()))
            .map_err(input)?;
        let rows: Vec<FrontRow> = if text.trim_start().starts_with('{') {
            let r: PlanReport = serde_json::from_str(&text).map_err(input)?;
            vec![FrontRow {
                cost: r.cost,
                mu: r.mu,
                plan: r.plan.join(" "),
            }]
        } else {
            read_front_csv(text.as_bytes()).map_err(input)?
        };
        let dfas = problem.dfas();
        for (i, r) in rows.iter().enumerate() {
            let plan = problem.wts.parse_plan(&r.plan).map_err(input)?;
            validate_plan(&problem.wts, &dfas, problem.mu.as_ref(), &plan, r.cost, r.mu, None)
                .with_context(|| format!("row {}", i + 1))
                .map_err(invariant)?;
        }
        Ok(format!("ok: {} plan(s) replayed\n", rows.len()))
    })();
    match result {
        Ok(text) => Output { text, status: Ok(()) },
        Err(f) => Output {
            text: String::new(),
            status: Err(f),
        },
    }
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Output {
    match &cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Front(a) => cmd_front(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Render(a) => cmd_render(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Where a command's text goes.
pub fn out_path(cli: &Cli) -> Option<&Path> {
    match &cli.command {
        Command::Plan(a) => a.common.out.as_deref(),
        Command::Front(a) => a.common.out.as_deref(),
        Command::Render(a) => a.out.as_deref(),
        Command::Bench(_) | Command::Validate(_) => None,
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
