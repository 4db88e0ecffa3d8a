//! Per-task completion costs and preference functions over them.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::model::{ModelError, Plan, Trajectory, Wts};
use crate::product::Product;
use crate::scltl::{first_sat_prefix, Dfa, DfaError, Formula};

/// Preference cost signature: one accumulated cost per task.
pub type Pcs = Vec<Cost>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PreferenceError {
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight {index} is negative")]
    NegativeWeight { index: usize },
    #[error("order must be a permutation of 0..{tasks}")]
    BadOrder { tasks: usize },
    #[error("signature has {got} entries but the preference expects {expected}")]
    Length { expected: usize, got: usize },
}

/// Which partial-path comparison a search may use to discard a label
/// without changing the set of reachable outcomes.
///
/// Both labels are assumed to sit at the same product state, so they agree
/// on which tasks are still pending and will accrue identical costs from
/// here on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    /// `g` and every signature entry no larger. Valid when μ is
    /// non-decreasing in each entry.
    Componentwise,
    /// `g` no larger and identical entries for the satisfied tasks.
    /// Pending entries always equal `g`, so the dominated label's outcome
    /// is the dominating one's with every pending entry raised by the same
    /// amount.
    PendingShift,
    /// Only exact duplicates may be discarded.
    ExactOnly,
}

/// A preference function μ over signatures.
pub trait PreferenceFn: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, pcs: &[Cost]) -> Cost;

    fn dominance(&self) -> Dominance {
        Dominance::ExactOnly
    }
}

/// Total positive delay relative to the desired completion order.
///
/// `order[r]` is the task that should finish `r`-th; by default tasks
/// should finish in index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutOfOrder {
    order: Vec<usize>,
}

impl OutOfOrder {
    pub fn new(order: Vec<usize>) -> Result<Self, PreferenceError> {
        let mut seen = vec![false; order.len()];
        for &t in &order {
            if t >= order.len() || std::mem::replace(&mut seen[t], true) {
                return Err(PreferenceError::BadOrder { tasks: order.len() });
            }
        }
        Ok(OutOfOrder { order })
    }

    pub fn identity(tasks: usize) -> Self {
        OutOfOrder {
            order: (0..tasks).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

impl PreferenceFn for OutOfOrder {
    fn name(&self) -> &str {
        "out_of_order"
    }

    fn eval(&self, pcs: &[Cost]) -> Cost {
        let ranked: Vec<Cost> = self.order.iter().map(|&t| pcs[t]).collect();
        mu_out_of_order(&ranked)
    }

    fn dominance(&self) -> Dominance {
        Dominance::PendingShift
    }
}

/// Σ max(0, cᵢ − c*ᵢ) where `c*` is `pcs` sorted ascending.
pub fn mu_out_of_order(pcs: &[Cost]) -> Cost {
    let mut sorted = pcs.to_vec();
    sorted.sort();
    pcs.iter()
        .zip(&sorted)
        .map(|(&c, &s)| (c - s).positive_part())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedSum {
    weights: Vec<Cost>,
}

impl WeightedSum {
    pub fn new(weights: Vec<Cost>) -> Result<Self, PreferenceError> {
        if let Some(index) = weights.iter().position(Cost::is_negative) {
            return Err(PreferenceError::NegativeWeight { index });
        }
        Ok(WeightedSum { weights })
    }

    pub fn weights(&self) -> &[Cost] {
        &self.weights
    }
}

impl PreferenceFn for WeightedSum {
    fn name(&self) -> &str {
        "weighted_sum"
    }

    fn eval(&self, pcs: &[Cost]) -> Cost {
        pcs.iter().zip(&self.weights).map(|(&c, &w)| c * w).sum()
    }

    fn dominance(&self) -> Dominance {
        Dominance::Componentwise
    }
}

/// Σ wᵢ · cᵢ.
pub fn mu_weighted_sum(pcs: &[Cost], weights: &[Cost]) -> Result<Cost, PreferenceError> {
    if pcs.len() != weights.len() {
        return Err(PreferenceError::Length {
            expected: weights.len(),
            got: pcs.len(),
        });
    }
    Ok(pcs.iter().zip(weights).map(|(&c, &w)| c * w).sum())
}

/// The constant zero preference: every plan is equally preferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Indifferent;

impl PreferenceFn for Indifferent {
    fn name(&self) -> &str {
        "zero"
    }

    fn eval(&self, _pcs: &[Cost]) -> Cost {
        Cost::ZERO
    }

    fn dominance(&self) -> Dominance {
        Dominance::Componentwise
    }
}

/// Problem-file preference descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preference {
    OutOfOrder {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<usize>>,
    },
    WeightedSum {
        weights: Vec<Cost>,
    },
    Zero,
}

impl Preference {
    /// Instantiates the preference for `tasks` tasks.
    pub fn build(&self, tasks: usize) -> Result<Box<dyn PreferenceFn>, PreferenceError> {
        Ok(match self {
            Preference::OutOfOrder { order: None } => Box::new(OutOfOrder::identity(tasks)),
            Preference::OutOfOrder { order: Some(o) } => {
                if o.len() != tasks {
                    return Err(PreferenceError::BadOrder { tasks });
                }
                Box::new(OutOfOrder::new(o.clone())?)
            }
            Preference::WeightedSum { weights } => {
                if weights.len() != tasks {
                    return Err(PreferenceError::WeightCount {
                        expected: tasks,
                        got: weights.len(),
                    });
                }
                Box::new(WeightedSum::new(weights.clone())?)
            }
            Preference::Zero => Box::new(Indifferent),
        })
    }
}

/// Per-task costs from satisfaction indices: task `i` with index `Kᵢ` pays
/// for every step strictly before `Kᵢ`; an unsatisfied task pays the whole
/// trajectory.
pub fn task_costs(step_costs: &[Cost], satisfied_at: &[Option<usize>]) -> Pcs {
    satisfied_at
        .iter()
        .map(|k| {
            let end = k.unwrap_or(step_costs.len()).min(step_costs.len());
            step_costs[..end].iter().copied().sum()
        })
        .collect()
}

/// First trace index at which `dfa` is in an accepting state.
pub fn first_accepting_index(
    wts: &Wts,
    dfa: &Dfa,
    traj: &Trajectory,
) -> Result<Option<usize>, DfaError> {
    let mut q = dfa.initial();
    for (k, &s) in traj.states().iter().enumerate() {
        q = dfa.step(q, &wts.observe(s))?;
        if dfa.is_accepting(q) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Signature of a trajectory, judged by the task automata.
pub fn pcs_of_trajectory(wts: &Wts, dfas: &[&Dfa], traj: &Trajectory) -> Result<Pcs, DfaError> {
    let ks = dfas
        .iter()
        .map(|d| first_accepting_index(wts, d, traj))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(task_costs(traj.step_costs(), &ks))
}

/// Signature of a trajectory, judged by the formulas directly.
pub fn pcs_of_trajectory_formulas(wts: &Wts, formulas: &[&Formula], traj: &Trajectory) -> Pcs {
    let trace = traj.trace(wts);
    let ks: Vec<Option<usize>> = formulas.iter().map(|f| first_sat_prefix(f, &trace)).collect();
    task_costs(traj.step_costs(), &ks)
}

/// A trajectory prefix along which μ decreased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub plan: Plan,
    pub step: usize,
    pub pcs_before: Pcs,
    pub pcs_after: Pcs,
    pub mu_before: Cost,
    pub mu_after: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub trials: usize,
    pub steps: usize,
    pub counterexample: Option<MonotonicityViolation>,
}

/// Samples random walks of up to `max_len` steps on the product and checks
/// that μ of the accumulated signature never decreases.
pub fn check_monotone<R: Rng + ?Sized>(
    mu: &dyn PreferenceFn,
    prod: &Product<'_>,
    trials: usize,
    max_len: usize,
    rng: &mut R,
) -> MonotonicityReport {
    let mut steps = 0;
    for trial in 0..trials {
        let mut p = prod.initial_state();
        let mut pcs = vec![Cost::ZERO; prod.num_tasks()];
        let mut value = mu.eval(&pcs);
        let mut actions = Vec::new();
        for step in 0..max_len {
            let edges = prod.successors(&p);
            if edges.is_empty() {
                break;
            }
            let e = &edges[rng.random_range(0..edges.len())];
            let next: Pcs = pcs.iter().zip(&e.pcs).map(|(&a, &b)| a + b).collect();
            let next_value = mu.eval(&next);
            actions.push(e.action);
            steps += 1;
            if next_value < value {
                return MonotonicityReport {
                    trials: trial + 1,
                    steps,
                    counterexample: Some(MonotonicityViolation {
                        plan: Plan::new(actions),
                        step,
                        pcs_before: pcs,
                        pcs_after: next,
                        mu_before: value,
                        mu_after: next_value,
                    }),
                };
            }
            p = e.target.clone();
            pcs = next;
            value = next_value;
        }
    }
    MonotonicityReport {
        trials,
        steps,
        counterexample: None,
    }
}

/// Convenience for callers holding a plan rather than a trajectory.
pub fn pcs_of_plan(wts: &Wts, dfas: &[&Dfa], plan: &Plan) -> Result<Pcs, PlanEvalError> {
    let traj = wts.apply_plan(plan)?;
    Ok(pcs_of_trajectory(wts, dfas, &traj)?)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanEvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Automaton(#[from] DfaError),
}
