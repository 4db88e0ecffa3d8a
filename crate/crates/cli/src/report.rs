//! Machine-readable plan and front reports.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use prefplan_core::search::{ParetoSolution, SearchStats};
use prefplan_core::{Bound, Cost, Wts};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub plan: Vec<String>,
    pub cost: Cost,
    pub mu: Cost,
    pub pcs: Vec<Cost>,
    pub mu_max: Bound,
    pub heuristic: bool,
    pub expanded: usize,
    pub generated: usize,
}

impl PlanReport {
    pub fn new(wts: &Wts, sol: &ParetoSolution, mu_max: Bound, heuristic: bool, stats: &SearchStats) -> Self {
        PlanReport {
            plan: action_names(wts, sol),
            cost: sol.cost,
            mu: sol.mu,
            pcs: sol.pcs.clone(),
            mu_max,
            heuristic,
            expanded: stats.expanded,
            generated: stats.generated,
        }
    }
}

/// One front point as written to CSV: the plan is space-separated actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontRow {
    pub cost: Cost,
    pub mu: Cost,
    pub plan: String,
}

impl FrontRow {
    pub fn new(wts: &Wts, sol: &ParetoSolution) -> Self {
        FrontRow {
            cost: sol.cost,
            mu: sol.mu,
            plan: wts.plan_to_string(&sol.plan),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub cost: Cost,
    pub mu: Cost,
    pub pcs: Vec<Cost>,
    pub plan: Vec<String>,
}

fn action_names(wts: &Wts, sol: &ParetoSolution) -> Vec<String> {
    sol.plan
        .actions()
        .iter()
        .map(|&a| wts.action_name(a).to_string())
        .collect()
}

pub fn front_points(wts: &Wts, front: &[ParetoSolution]) -> Vec<FrontPoint> {
    front
        .iter()
        .map(|s| FrontPoint {
            cost: s.cost,
            mu: s.mu,
            pcs: s.pcs.clone(),
            plan: action_names(wts, s),
        })
        .collect()
}

pub fn write_front_csv<W: Write>(out: W, rows: &[FrontRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    // Header even for an empty front.
    w.write_record(["cost", "mu", "plan"])?;
    for r in rows {
        w.write_record([r.cost.to_string(), r.mu.to_string(), r.plan.clone()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_front_csv<R: Read>(input: R) -> Result<Vec<FrontRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("row {}", i + 1))?;
        let field = |k: usize, name: &str| {
            rec.get(k)
                .map(str::to_string)
                .with_context(|| format!("row {}: missing `{name}`", i + 1))
        };
        rows.push(FrontRow {
            cost: field(0, "cost")?
                .parse()
                .with_context(|| format!("row {}: bad cost", i + 1))?,
            mu: field(1, "mu")?
                .parse()
                .with_context(|| format!("row {}: bad mu", i + 1))?,
            plan: field(2, "plan")?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            FrontRow {
                cost: Cost::integer(6),
                mu: Cost::ratio(3, 2),
                plan: "East North".into(),
            },
            FrontRow {
                cost: Cost::integer(8),
                mu: Cost::ZERO,
                plan: String::new(),
            },
        ];
        let mut buf = Vec::new();
        write_front_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("cost,mu,plan\n6,3/2,East North\n"));
        assert_eq!(read_front_csv(buf.as_slice()).unwrap(), rows);

        let mut empty = Vec::new();
        write_front_csv(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap(), "cost,mu,plan\n");
    }
}
