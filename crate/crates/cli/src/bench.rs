//! Benchmark harness: random template tasks on a square grid, each solved
//! with and without the heuristic, for a single plan and for the front.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::Result;
use prefplan_core::instances::template_instance;
use prefplan_core::preference::OutOfOrder;
use prefplan_core::search::{constrained_astar, pareto_front, SearchRun};
use prefplan_core::{Bound, Cost, Dfa, FrontMode, HeuristicTable, Product, SearchError, SearchOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub size: usize,
    pub tasks: RangeInclusive<usize>,
    pub trials: usize,
    pub seed: u64,
    pub timeout: Duration,
    pub jobs: usize,
    /// Also time Pareto-front search.
    pub front: bool,
    pub mu_max: Bound,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            size: 10,
            tasks: 2..=5,
            trials: 20,
            seed: 0,
            timeout: Duration::from_secs(120),
            jobs: 1,
            front: true,
            mu_max: Bound::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub status: &'static str,
    pub seconds: f64,
    pub expanded: usize,
    pub generated: usize,
    /// Plan cost, or the number of front points.
    pub value: Option<String>,
}

impl RunRecord {
    fn from_run<T>(run: &SearchRun<T>, value: impl Fn(&T) -> String) -> Self {
        RunRecord {
            status: match &run.result {
                Ok(_) => "ok",
                Err(SearchError::Timeout) => "timeout",
                Err(SearchError::InfeasibleTask { .. }) => "infeasible",
                Err(_) => "failure",
            },
            seconds: run.elapsed.as_secs_f64(),
            expanded: run.stats.expanded,
            generated: run.stats.generated,
            value: run.result.as_ref().ok().map(value),
        }
    }

    pub fn timed_out(&self) -> bool {
        self.status == "timeout"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub tasks: usize,
    pub trial: usize,
    pub precompute_seconds: f64,
    pub plan_without_h: RunRecord,
    pub plan_with_h: RunRecord,
    pub front_without_h: Option<RunRecord>,
    pub front_with_h: Option<RunRecord>,
    /// Whether the scalar-mode front differs from the sound one.
    pub scalar_front_differs: Option<bool>,
}

/// Generator for trial `trial` at `tasks` tasks: one ChaCha8 stream per
/// (tasks, trial) pair, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, tasks: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((tasks as u64) << 32) | trial as u64);
    rng
}

pub fn run_trial(cfg: &BenchConfig, tasks: usize, trial: usize) -> TrialRecord {
    let mut rng = trial_rng(cfg.seed, tasks, trial);
    let (wts, formulas) = template_instance(&mut rng, cfg.size, tasks);
    let dfas: Vec<Dfa> = formulas.iter().map(prefplan_core::scltl::formula_to_dfa).collect();
    let refs: Vec<&Dfa> = dfas.iter().collect();
    let prod = Product::new(&wts, &refs).expect("compiled automata are total");
    let mu = OutOfOrder::identity(tasks);

    let t0 = Instant::now();
    let table = HeuristicTable::compute(&prod);
    let precompute_seconds = t0.elapsed().as_secs_f64();
    let zero = HeuristicTable::zero(&prod);
    let opts = || SearchOptions::with_timeout(Some(cfg.timeout));
    let cost = |s: &prefplan_core::ParetoSolution| s.cost.to_string();

    let plan_without_h = RunRecord::from_run(&constrained_astar(&prod, &zero, &mu, cfg.mu_max, &opts()), cost);
    let plan_with_h = RunRecord::from_run(&constrained_astar(&prod, &table, &mu, cfg.mu_max, &opts()), cost);

    let (mut front_without_h, mut front_with_h, mut scalar_front_differs) = (None, None, None);
    if cfg.front {
        let values = |f: &Vec<prefplan_core::ParetoSolution>| -> Vec<(Cost, Cost)> {
            f.iter().map(|s| (s.cost, s.mu)).collect()
        };
        let size = |f: &Vec<prefplan_core::ParetoSolution>| f.len().to_string();
        let plain = pareto_front(&prod, &zero, &mu, FrontMode::Sound, &opts());
        let guided = pareto_front(&prod, &table, &mu, FrontMode::Sound, &opts());
        let scalar = pareto_front(&prod, &table, &mu, FrontMode::Scalar, &opts());
        if let (Ok(a), Ok(b)) = (&guided.result, &scalar.result) {
            scalar_front_differs = Some(values(a) != values(b));
        }
        front_without_h = Some(RunRecord::from_run(&plain, size));
        front_with_h = Some(RunRecord::from_run(&guided, size));
    }
    TrialRecord {
        tasks,
        trial,
        precompute_seconds,
        plan_without_h,
        plan_with_h,
        front_without_h,
        front_with_h,
        scalar_front_differs,
    }
}

/// Runs every (tasks, trial) pair on `cfg.jobs` worker threads; records
/// come back ordered by task count, then trial.
pub fn run_bench(cfg: &BenchConfig, mut progress: impl FnMut(&TrialRecord) + Send) -> Vec<TrialRecord> {
    let work: Vec<(usize, usize)> = cfg
        .tasks
        .clone()
        .flat_map(|n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<TrialRecord>>> = Mutex::new(vec![None; work.len()]);
    let progress = Mutex::new(&mut progress);
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, t)) = work.get(i) else { break };
                let record = run_trial(cfg, n, t);
                (progress.lock().unwrap())(&record);
                results.lock().unwrap()[i] = Some(record);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every trial ran"))
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Median node expansions of a column over the trials for `tasks`.
pub fn median_expansions(records: &[TrialRecord], tasks: usize, pick: impl Fn(&TrialRecord) -> Option<&RunRecord>) -> f64 {
    median(
        records
            .iter()
            .filter(|r| r.tasks == tasks)
            .filter_map(&pick)
            .map(|r| r.expanded as f64)
            .collect(),
    )
}

type Column = (&'static str, fn(&TrialRecord) -> Option<&RunRecord>);

const COLUMNS: [Column; 4] = [
    ("plan w/o h", |r| Some(&r.plan_without_h)),
    ("plan w/ h", |r| Some(&r.plan_with_h)),
    ("front w/o h", |r| r.front_without_h.as_ref()),
    ("front w/ h", |r| r.front_with_h.as_ref()),
];

/// Per task count: median/mean wall time and median expansions for each
/// of the four columns, with timeouts counted as censored at the limit.
pub fn summary_table(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3}  {:<12} {:>12} {:>12} {:>14} {:>9}",
        "N", "column", "median s", "mean s", "median exp", "timeouts"
    );
    let mut ns: Vec<usize> = records.iter().map(|r| r.tasks).collect();
    ns.dedup();
    for n in ns {
        let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.tasks == n).collect();
        for (name, pick) in COLUMNS {
            let runs: Vec<&RunRecord> = rows.iter().filter_map(|r| pick(r)).collect();
            if runs.is_empty() {
                continue;
            }
            let secs: Vec<f64> = runs.iter().map(|r| r.seconds).collect();
            let _ = writeln!(
                out,
                "{n:>3}  {name:<12} {:>12.3e} {:>12.3e} {:>14.1} {:>9}",
                median(secs.clone()),
                mean(&secs),
                median(runs.iter().map(|r| r.expanded as f64).collect()),
                runs.iter().filter(|r| r.timed_out()).count()
            );
        }
        let pre: Vec<f64> = rows.iter().map(|r| r.precompute_seconds).collect();
        let worse = rows
            .iter()
            .filter(|r| r.plan_with_h.expanded > r.plan_without_h.expanded)
            .count();
        let differs = rows
            .iter()
            .filter(|r| r.scalar_front_differs == Some(true))
            .count();
        let _ = writeln!(
            out,
            "{n:>3}  heuristic precompute median {:.3e} s; trials where h expanded more: {worse}; scalar-mode front differs: {differs}",
            median(pre)
        );
    }
    out
}

/// One CSV row per trial and column.
pub fn write_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "tasks", "trial", "column", "status", "seconds", "expanded", "generated", "value",
        "precompute_seconds",
    ])?;
    for r in records {
        for (name, pick) in COLUMNS {
            if let Some(run) = pick(r) {
                w.write_record([
                    r.tasks.to_string(),
                    r.trial.to_string(),
                    name.to_string(),
                    run.status.to_string(),
                    format!("{:.6}", run.seconds),
                    run.expanded.to_string(),
                    run.generated.to_string(),
                    run.value.clone().unwrap_or_default(),
                    format!("{:.6}", r.precompute_seconds),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchConfig {
        BenchConfig {
            size: 6,
            tasks: 2..=2,
            trials: 2,
            seed: 5,
            jobs: 2,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = small();
        let a = run_trial(&cfg, 2, 1);
        let b = run_trial(&cfg, 2, 1);
        assert_eq!(a.plan_with_h.expanded, b.plan_with_h.expanded);
        assert_eq!(a.plan_with_h.value, b.plan_with_h.value);
        assert_eq!(a.plan_with_h.value, a.plan_without_h.value);
        assert!(a.plan_with_h.expanded <= a.plan_without_h.expanded);
        assert_eq!(
            a.front_with_h.as_ref().unwrap().value,
            a.front_without_h.as_ref().unwrap().value
        );
    }

    #[test]
    fn parallel_run_is_ordered() {
        let records = run_bench(&small(), |_| {});
        assert_eq!(records.len(), 2);
        assert_eq!((records[0].trial, records[1].trial), (0, 1));
        let table = summary_table(&records);
        assert_eq!(table.lines().count(), 1 + 5);
        let mut csv = Vec::new();
        write_csv(&mut csv, &records).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 2 * 4);
    }
}
