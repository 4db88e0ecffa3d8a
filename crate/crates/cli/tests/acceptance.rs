//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints its PASS/FAIL line under a plain `cargo test`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use prefplan_cli::bench::{median_expansions, run_bench, BenchConfig};
use prefplan_cli::report::{read_front_csv, FrontPoint, PlanReport};
use prefplan_core::instances::{random_instance, template_instance};
use prefplan_core::preference::{
    check_monotone, mu_out_of_order, pcs_of_trajectory_formulas, OutOfOrder, WeightedSum,
};
use prefplan_core::scltl::{eval_trace, formula_to_dfa, random_formula, MaskSymbol};
use prefplan_core::search::{brute_force_front, constrained_astar, pareto_front};
use prefplan_core::{
    Bound, Cost, Dfa, Formula, FrontMode, HeuristicTable, Pcs, Plan, PreferenceFn, Problem,
    Product, SearchOptions, Wts,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn load(name: &str) -> Problem {
    Problem::load(&fixture(name)).expect("fixture loads")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn atoms() -> Vec<String> {
    ["a", "b", "c"].iter().map(|s| s.to_string()).collect()
}

struct Instance {
    wts: Wts,
    dfas: Vec<Dfa>,
}

impl Instance {
    fn product(&self) -> Product<'_> {
        let refs: Vec<&Dfa> = self.dfas.iter().collect();
        Product::new(&self.wts, &refs).expect("compiled automata are total")
    }
}

/// Small random grid problems: 4×4, two random tasks of depth ≤ 3.
fn small_instances(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let (wts, formulas) = random_instance(&mut rng, 4, 4, &atoms(), 2, 3);
            Instance {
                wts,
                dfas: formulas.iter().map(formula_to_dfa).collect(),
            }
        })
        .collect()
}

/// Harder companion family: three `F (x & F y)` tasks on a 4×4 grid, which
/// yields multi-point fronts far more often.
fn sequenced_instances(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = atoms();
    (0..count)
        .map(|_| {
            let (wts, _) = random_instance(&mut rng, 4, 4, &atoms, 0, 0);
            let dfas = (0..3)
                .map(|_| {
                    let x = Formula::atom(atoms[rng.random_range(0..atoms.len())].clone());
                    let y = Formula::atom(atoms[rng.random_range(0..atoms.len())].clone());
                    formula_to_dfa(&Formula::eventually(Formula::and(x, Formula::eventually(y))))
                })
                .collect();
            Instance { wts, dfas }
        })
        .collect()
}

fn all_instances() -> Vec<Instance> {
    let mut all = small_instances(50, 1);
    all.extend(sequenced_instances(50, 2));
    all
}

fn preferences(rng: &mut ChaCha8Rng, tasks: usize) -> Vec<Box<dyn PreferenceFn>> {
    let weights = (0..tasks)
        .map(|_| Cost::ratio(rng.random_range(0..=6), 2))
        .collect();
    vec![
        Box::new(OutOfOrder::identity(tasks)),
        Box::new(WeightedSum::new(weights).expect("non-negative weights")),
    ]
}

/// Upper bound on the cost of some plan for every front value: a cycle
/// through a non-accepting product state can be cut without raising cost or
/// μ, so a simple path suffices and visits each such state at most once.
fn simple_path_bound(prod: &Product<'_>) -> Option<Cost> {
    let graph = prod.reachable(200_000)?;
    let open = graph
        .states
        .iter()
        .filter(|p| !prod.is_fully_accepting(p))
        .count();
    let max_edge = graph.edges.iter().map(|e| e.cost).max().unwrap_or(Cost::ZERO);
    Some(max_edge * Cost::integer(open as i64))
}

fn values(front: &[prefplan_core::ParetoSolution]) -> BTreeSet<(Cost, Cost)> {
    front.iter().map(|s| (s.cost, s.mu)).collect()
}

fn preference_exactness() -> Outcome {
    let pcs = [Cost::integer(20), Cost::integer(5), Cost::integer(10)];
    let mu = mu_out_of_order(&pcs);
    ensure(mu == Cost::integer(15), || format!("got {mu}"))?;
    Ok(format!("mu(20,5,10) = {mu}"))
}

fn oracle_front_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SearchOptions::default();
    const RIGOROUS_BOUND_LIMIT: Cost = Cost::integer(40);
    const MARGIN: i64 = 6;
    // The first SMALL instances always get the full simple-path bound.
    const SMALL: usize = 50;
    let (mut compared, mut nonempty, mut multi, mut widened) = (0, 0, 0, 0);
    for (i, inst) in all_instances().iter().enumerate() {
        let prod = inst.product();
        let table = HeuristicTable::compute(&prod);
        let zero = HeuristicTable::zero(&prod);
        let bound = simple_path_bound(&prod).ok_or_else(|| format!("instance {i}: product too large"))?;
        for mu in preferences(&mut rng, prod.num_tasks()) {
            let fronts = [&table, &zero].map(|h| {
                pareto_front(&prod, h, mu.as_ref(), FrontMode::Sound, &opts)
                    .result
                    .map_err(|e| format!("instance {i} {}: {e}", mu.name()))
            });
            let oracle = if i < SMALL || bound <= RIGOROUS_BOUND_LIMIT {
                values(&brute_force_front(&prod, mu.as_ref(), bound))
            } else {
                // Enumerate well past the searched front and require the
                // enumeration to be stable under a wider margin.
                let reach = fronts[0].as_ref()?.iter().map(|s| s.cost).max().unwrap_or(Cost::ZERO);
                let at = |margin: i64| values(&brute_force_front(&prod, mu.as_ref(), bound.min(reach + Cost::integer(margin))));
                let (near, far) = (at(MARGIN), at(2 * MARGIN));
                ensure(near == far, || format!("instance {i}: enumeration grows past the margin"))?;
                widened += 1;
                far
            };
            for (label, got) in ["with h", "without h"].into_iter().zip(fronts) {
                let got = got?;
                ensure(values(&got) == oracle, || {
                    format!(
                        "instance {i} {} {label}: front {:?} vs brute force {:?}",
                        mu.name(),
                        values(&got),
                        oracle
                    )
                })?;
                compared += 1;
            }
            nonempty += usize::from(!oracle.is_empty());
            multi += usize::from(oracle.len() > 1);
        }
    }
    Ok(format!(
        "{compared} fronts equal to brute force over 100 instances ({nonempty} of 200 problem/preference pairs feasible, {multi} with several points, {widened} enumerated to a margin past the front)"
    ))
}

fn constraint_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = SearchOptions::default();
    let mut checks = 0;
    for (i, inst) in all_instances().iter().enumerate() {
        let prod = inst.product();
        let table = HeuristicTable::compute(&prod);
        for mu in preferences(&mut rng, prod.num_tasks()) {
            let front = values(
                &pareto_front(&prod, &table, mu.as_ref(), FrontMode::Sound, &opts)
                    .result
                    .map_err(|e| format!("instance {i}: {e}"))?,
            );
            for &(_, m) in &front {
                let want = front.iter().filter(|v| v.1 <= m).map(|v| v.0).min();
                let run = constrained_astar(&prod, &table, mu.as_ref(), Bound::Finite(m), &opts);
                let got = run.result.map(|s| s.cost).ok();
                ensure(got == want, || {
                    format!("instance {i} {} mu_max={m}: cost {got:?}, expected {want:?}", mu.name())
                })?;
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} budgeted searches matched the front"))
}

/// Exact cost-to-go to full acceptance over the explicit reachable graph.
fn exact_cost_to_go(prod: &Product<'_>, graph: &prefplan_core::product::ReachableGraph) -> Vec<Option<Cost>> {
    let n = graph.states.len();
    let mut reverse: Vec<Vec<(usize, Cost)>> = vec![Vec::new(); n];
    for e in &graph.edges {
        reverse[e.to].push((e.from, e.cost));
    }
    let mut dist: Vec<Option<Cost>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    for (i, p) in graph.states.iter().enumerate() {
        if prod.is_fully_accepting(p) {
            dist[i] = Some(Cost::ZERO);
            heap.push(Reverse((Cost::ZERO, i)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some_and(|best| d > best) {
            continue;
        }
        for &(u, c) in &reverse[v] {
            let nd = d + c;
            if dist[u].is_none_or(|best| nd < best) {
                dist[u] = Some(nd);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    dist
}

fn heuristic_admissible_and_consistent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut instances, mut states, mut edges) = (0, 0, 0);
    let mut attempts = 0;
    while instances < 20 {
        attempts += 1;
        ensure(attempts < 1000, || "could not draw enough small instances".into())?;
        let tasks = rng.random_range(2..=3);
        // Alternate random formulas with the larger visit-template tasks.
        let (wts, formulas) = if instances % 2 == 0 {
            random_instance(&mut rng, 5, 5, &atoms(), tasks, 3)
        } else {
            let size = rng.random_range(4..=6);
            template_instance(&mut rng, size, tasks)
        };
        let inst = Instance {
            wts,
            dfas: formulas.iter().map(formula_to_dfa).collect(),
        };
        let prod = inst.product();
        let Some(graph) = prod.reachable(5_000) else {
            continue;
        };
        let table = HeuristicTable::compute(&prod);
        let dstar = exact_cost_to_go(&prod, &graph);
        let h: Vec<Option<Cost>> = graph.states.iter().map(|p| table.h_max_min(&prod, p)).collect();
        for (i, d) in dstar.iter().enumerate() {
            if let Some(d) = d {
                let hi = h[i].ok_or_else(|| format!("instance {instances}: h infinite where d* = {d}"))?;
                ensure(hi <= *d, || format!("instance {instances}: h = {hi} > d* = {d}"))?;
            }
        }
        for e in &graph.edges {
            match (h[e.from], h[e.to]) {
                (Some(a), Some(b)) => ensure(a <= e.cost + b, || {
                    format!("instance {instances}: h = {a} > {} + {b} along an edge", e.cost)
                })?,
                (None, Some(_)) => {
                    return Err(format!("instance {instances}: h infinite before a finite successor"))
                }
                _ => {}
            }
        }
        instances += 1;
        states += graph.states.len();
        edges += graph.edges.len();
    }
    Ok(format!("20 instances, {states} states and {edges} edges checked"))
}

fn all_traces(atoms: usize, max_len: usize) -> Vec<Vec<u32>> {
    let mut all = vec![vec![]];
    let mut frontier: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &frontier {
            for s in 0..(1u32 << atoms) {
                let mut t2 = t.clone();
                t2.push(s);
                next.push(t2);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

fn compiler_matches_semantics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let atoms = atoms();
    let traces = all_traces(atoms.len(), 5);
    let mut cases = 0usize;
    for i in 0..500 {
        let f: Formula = random_formula(&mut rng, &atoms, 4);
        let dfa = formula_to_dfa(&f);
        for t in &traces {
            let word: Vec<MaskSymbol<'_>> = t.iter().map(|&mask| MaskSymbol { atoms: &atoms, mask }).collect();
            let by_dfa = dfa.accepts(&word).map_err(|e| format!("formula {i}: {e}"))?;
            ensure(by_dfa == eval_trace(&f, &word), || {
                format!("formula {i} `{f}` disagrees on trace {t:?}")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} formula/trace pairs agree"))
}

fn heuristic_speedup() -> Outcome {
    let cfg = BenchConfig {
        size: 10,
        tasks: 4..=5,
        trials: 20,
        seed: 0,
        front: false,
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        timeout: Duration::from_secs(120),
        ..BenchConfig::default()
    };
    let records = run_bench(&cfg, |_| {});
    let timeouts = records
        .iter()
        .filter(|r| r.plan_with_h.timed_out() || r.plan_without_h.timed_out())
        .count();
    let mut summary = Vec::new();
    for (n, limit) in [(4, 3.0), (5, 5.0)] {
        let with_h = median_expansions(&records, n, |r| Some(&r.plan_with_h));
        let without_h = median_expansions(&records, n, |r| Some(&r.plan_without_h));
        let ratio = without_h / with_h;
        ensure(with_h * limit <= without_h, || {
            format!("N={n}: median expansions {with_h} with h vs {without_h} without (ratio {ratio:.2}, need {limit})")
        })?;
        summary.push(format!("N={n} ratio {ratio:.1}"));
    }
    Ok(format!("{} ({timeouts} timed-out runs)", summary.join(", ")))
}

fn random_plan(wts: &Wts, rng: &mut ChaCha8Rng, max_len: usize) -> Plan {
    let mut s = wts.initial();
    let mut actions = Vec::new();
    for _ in 0..rng.random_range(0..=max_len) {
        let out = wts.outgoing(s);
        if out.is_empty() {
            break;
        }
        let t = &out[rng.random_range(0..out.len())];
        actions.push(t.action);
        s = t.target;
    }
    Plan::new(actions)
}

fn pcs_accumulation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for name in ["example.json", "delivery.json"] {
        let problem = load(name);
        let prod = problem.product().expect("product builds");
        let formulas: Vec<&Formula> = problem
            .tasks
            .iter()
            .map(|t| t.formula.as_ref().expect("fixtures use formulas"))
            .collect();
        let max_len = if name == "example.json" { 16 } else { 120 };
        for _ in 0..100 {
            let plan = random_plan(&problem.wts, &mut rng, max_len);
            let (_, history) = prod.run_plan(&plan).map_err(|e| e.to_string())?;
            let traj = problem.wts.apply_plan(&plan).map_err(|e| e.to_string())?;
            let direct: Pcs = pcs_of_trajectory_formulas(&problem.wts, &formulas, &traj);
            let summed = history.last().expect("history includes the start");
            ensure(*summed == direct, || {
                format!("{name}: plan `{}` sums to {summed:?}, direct {direct:?}", problem.wts.plan_to_string(&plan))
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} random plans agree"))
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prefplan"))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = binary().args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("`prefplan {}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(String::from_utf8(out.stdout).expect("utf-8 output"))
}

/// Independent replay: apply the plan, check every formula on the trace and
/// recompute cost, signature and μ.
fn replay_claim(problem: &Problem, plan_text: &str, cost: Cost, mu: Cost, pcs: Option<&[Cost]>) -> Result<(), String> {
    let plan = problem.wts.parse_plan(plan_text).map_err(|e| e.to_string())?;
    let traj = problem.wts.apply_plan(&plan).map_err(|e| e.to_string())?;
    let trace = traj.trace(&problem.wts);
    let formulas: Vec<&Formula> = problem.tasks.iter().filter_map(|t| t.formula.as_ref()).collect();
    for (j, f) in formulas.iter().enumerate() {
        ensure(eval_trace(f, &trace), || format!("task {j} unsatisfied by `{plan_text}`"))?;
    }
    let actual_cost: Cost = traj.step_costs().iter().copied().sum();
    let actual_pcs = pcs_of_trajectory_formulas(&problem.wts, &formulas, &traj);
    let actual_mu = problem.mu.eval(&actual_pcs);
    ensure(actual_cost == cost, || format!("cost {cost} vs replay {actual_cost}"))?;
    ensure(actual_mu == mu, || format!("mu {mu} vs replay {actual_mu}"))?;
    if let Some(pcs) = pcs {
        ensure(pcs == actual_pcs.as_slice(), || format!("pcs {pcs:?} vs replay {actual_pcs:?}"))?;
    }
    Ok(())
}

fn replay_validation() -> Outcome {
    let dir = std::env::temp_dir().join(format!("prefplan-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut plans = 0;
    for name in ["example.json", "delivery.json"] {
        let problem = load(name);
        let spec = fixture(name);
        let spec = spec.to_str().expect("utf-8 path");
        for mu_max in ["inf", "3", "30"] {
            let Ok(text) = run_cli(&["plan", "--spec", spec, "--mu-max", mu_max]) else {
                continue;
            };
            let r: PlanReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            replay_claim(&problem, &r.plan.join(" "), r.cost, r.mu, Some(&r.pcs))?;
            let path = dir.join(format!("{name}-{mu_max}.json"));
            std::fs::write(&path, &text).map_err(|e| e.to_string())?;
            run_cli(&["validate", "--spec", spec, "--input", path.to_str().unwrap()])?;
            plans += 1;
        }
        let csv_text = run_cli(&["front", "--spec", spec])?;
        for row in read_front_csv(csv_text.as_bytes()).map_err(|e| e.to_string())? {
            replay_claim(&problem, &row.plan, row.cost, row.mu, None)?;
            plans += 1;
        }
        let path = dir.join(format!("{name}-front.csv"));
        std::fs::write(&path, &csv_text).map_err(|e| e.to_string())?;
        run_cli(&["validate", "--spec", spec, "--input", path.to_str().unwrap()])?;
        let json_text = run_cli(&["front", "--spec", spec, "--format", "json", "--dominance", "scalar"])?;
        let points: Vec<FrontPoint> = serde_json::from_str(&json_text).map_err(|e| e.to_string())?;
        for p in points {
            replay_claim(&problem, &p.plan.join(" "), p.cost, p.mu, Some(&p.pcs))?;
            plans += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{plans} emitted plans replayed"))
}

/// A deliberately non-monotone preference: larger costs score lower.
#[derive(Debug)]
struct Decreasing;

impl PreferenceFn for Decreasing {
    fn name(&self) -> &str {
        "decreasing"
    }

    fn eval(&self, pcs: &[Cost]) -> Cost {
        (Cost::integer(10_000) - pcs.iter().copied().sum::<Cost>()).positive_part()
    }
}

fn monotonicity_harness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for name in ["example.json", "delivery.json"] {
        let problem = load(name);
        let prod = problem.product().expect("product builds");
        let n = problem.tasks.len();
        for mu in preferences(&mut rng, n) {
            let report = check_monotone(mu.as_ref(), &prod, 1000, 60, &mut rng);
            ensure(report.counterexample.is_none(), || {
                format!("{name}: {} flagged {:?}", mu.name(), report.counterexample)
            })?;
        }
        let report = check_monotone(&Decreasing, &prod, 1000, 60, &mut rng);
        ensure(report.counterexample.is_some(), || {
            format!("{name}: decreasing preference not caught")
        })?;
    }
    Ok("built-in preferences monotone on both fixtures; decreasing fixture caught".into())
}

fn delivery_front_shape() -> Outcome {
    let problem = load("delivery.json");
    let prod = problem.product().expect("product builds");
    let table = HeuristicTable::compute(&prod);
    let front = pareto_front(&prod, &table, problem.mu.as_ref(), FrontMode::Sound, &SearchOptions::default())
        .result
        .map_err(|e| e.to_string())?;
    let points: Vec<(Cost, Cost)> = front.iter().map(|s| (s.cost, s.mu)).collect();
    ensure(points.len() >= 3, || format!("only {} points: {points:?}", points.len()))?;
    for w in points.windows(2) {
        ensure(w[0].0 < w[1].0 && w[0].1 > w[1].1, || format!("not strictly ordered: {points:?}"))?;
    }
    let max_mu = points.iter().map(|p| p.1).max().unwrap();
    let (first, last) = (points[0], points[points.len() - 1]);
    ensure(last.1 == Cost::ZERO, || format!("max-cost point has mu {}", last.1))?;
    ensure(first.1 == max_mu, || format!("min-cost point has mu {} < {max_mu}", first.1))?;
    Ok(format!("{} points: {points:?}", points.len()))
}

fn main() {
    let checks: [(&str, Check); 10] = [
        ("preference exactness", preference_exactness),
        ("front equals brute force", oracle_front_equivalence),
        ("budgeted search matches front", constraint_consistency),
        ("heuristic admissible and consistent", heuristic_admissible_and_consistent),
        ("automaton matches trace semantics", compiler_matches_semantics),
        ("heuristic expansion speedup", heuristic_speedup),
        ("signature accumulation", pcs_accumulation),
        ("emitted plans replay", replay_validation),
        ("monotonicity harness", monotonicity_harness),
        ("delivery front shape", delivery_front_shape),
    ];
    let only = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        if only.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
