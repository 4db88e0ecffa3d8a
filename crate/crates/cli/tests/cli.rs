use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn prefplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefplan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prefplan-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const UNSAT: &str = r#"{
  "grid": { "width": 2, "height": 1, "labels": [ { "cell": [1, 0], "props": ["a"] } ], "atomic_props": ["b"] },
  "tasks": ["F a", "!a U b"],
  "preference": { "kind": "zero" },
  "mu_max": "inf"
}"#;

#[test]
fn plan_reports_the_cheapest_plan() {
    let out = prefplan(&["plan", "--spec", &fixture("example.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["cost"], 6);
    assert_eq!(report["mu"], 4);
    assert_eq!(report["pcs"], serde_json::json!([6, 5, 2]));
}

#[test]
fn plan_without_heuristic_agrees() {
    let a = prefplan(&["plan", "--spec", &fixture("example.json"), "--format", "csv"]);
    let b = prefplan(&["plan", "--spec", &fixture("example.json"), "--format", "csv", "--no-heuristic"]);
    assert_eq!(a.status.code(), Some(0));
    let cost = |o: &Output| stdout(o).lines().nth(1).unwrap().split(',').next().unwrap().to_string();
    assert_eq!(cost(&a), cost(&b));
}

#[test]
fn budget_exit_codes() {
    let spec = fixture("example.json");
    assert_eq!(prefplan(&["plan", "--spec", &spec, "--mu-max", "0"]).status.code(), Some(1));
    assert_eq!(prefplan(&["plan", "--spec", &spec, "--mu-max", "3"]).status.code(), Some(0));
    assert_eq!(prefplan(&["plan", "--spec", &spec, "--mu-max", "5/2"]).status.code(), Some(1));
    assert_eq!(prefplan(&["plan", "--spec", &spec, "--mu-max", "lots"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(prefplan(&["plan", "--spec", "/nonexistent.json"]).status.code(), Some(2));
    let dir = scratch_dir("bad");
    let bad = dir.join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(prefplan(&["front", "--spec", bad.to_str().unwrap()]).status.code(), Some(2));
    let single = dir.join("single.json");
    fs::write(
        &single,
        r#"{"grid": {"width": 2, "height": 1}, "tasks": ["F x0_0"], "preference": {"kind": "zero"}}"#,
    )
    .unwrap();
    assert_eq!(prefplan(&["plan", "--spec", single.to_str().unwrap()]).status.code(), Some(2));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn infeasible_front_is_an_empty_table() {
    let dir = scratch_dir("unsat");
    let spec = dir.join("unsat.json");
    fs::write(&spec, UNSAT).unwrap();
    let out = prefplan(&["front", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "cost,mu,plan\n");
    let out = prefplan(&["plan", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn front_is_deterministic_and_renders() {
    let spec = fixture("example.json");
    let dir = scratch_dir("front");
    let svg = dir.join("front.svg");
    let a = prefplan(&["front", "--spec", &spec, "--svg", svg.to_str().unwrap()]);
    let b = prefplan(&["front", "--spec", &spec, "--seed", "99"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a).lines().count(), 3);
    assert_eq!(fs::read_to_string(&svg).unwrap().matches(r#"class="point""#).count(), 2);

    let csv = dir.join("front.csv");
    let out = prefplan(&["front", "--spec", &spec, "--out", csv.to_str().unwrap()]);
    assert!(out.stdout.is_empty());
    let plot = prefplan(&["render", "--spec", &spec, "--front", csv.to_str().unwrap()]);
    assert_eq!(plot.status.code(), Some(0));
    assert_eq!(stdout(&plot).matches(r#"class="point""#).count(), 2);
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn scalar_mode_warns_for_out_of_order() {
    let out = prefplan(&["front", "--spec", &fixture("example.json"), "--dominance", "scalar"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn render_plan() {
    let spec = fixture("example.json");
    let out = prefplan(&["render", "--spec", &spec, "--plan", "East East North West North East"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).matches(r#"class="step""#).count(), 6);
    let out = prefplan(&["render", "--spec", &spec, "--plan", "Up"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_detects_tampering() {
    let spec = fixture("example.json");
    let dir = scratch_dir("validate");
    let good = dir.join("good.csv");
    fs::write(&good, "cost,mu,plan\n6,4,East East North West North East\n").unwrap();
    assert_eq!(prefplan(&["validate", "--spec", &spec, "--input", good.to_str().unwrap()]).status.code(), Some(0));
    let wrong = dir.join("wrong.csv");
    fs::write(&wrong, "cost,mu,plan\n6,3,East East North West North East\n").unwrap();
    assert_eq!(prefplan(&["validate", "--spec", &spec, "--input", wrong.to_str().unwrap()]).status.code(), Some(3));
    let short = dir.join("short.csv");
    fs::write(&short, "cost,mu,plan\n2,0,East East\n").unwrap();
    assert_eq!(prefplan(&["validate", "--spec", &spec, "--input", short.to_str().unwrap()]).status.code(), Some(3));
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn bench_writes_a_table_and_csv() {
    let dir = scratch_dir("bench");
    let csv = dir.join("bench.csv");
    let out = prefplan(&[
        "bench", "--size", "5", "--min-tasks", "2", "--max-tasks", "2", "--trials", "2", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("plan w/ h"));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 1 + 2 * 4);
    assert_eq!(prefplan(&["bench", "--trials", "0"]).status.code(), Some(2));
    let _ = fs::remove_dir_all(dir);
}
