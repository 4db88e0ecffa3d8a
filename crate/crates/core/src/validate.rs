//! Independent replay of plans against a problem's claims.

use crate::cost::Cost;
use crate::model::{Plan, Wts};
use crate::preference::{pcs_of_plan, Pcs, PlanEvalError, PreferenceFn};
use crate::scltl::Dfa;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub cost: Cost,
    pub pcs: Pcs,
    pub mu: Cost,
    /// Per task, whether the plan satisfies it.
    pub satisfied: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationError {
    #[error(transparent)]
    Replay(#[from] PlanEvalError),
    #[error("plan leaves task(s) {0:?} unsatisfied")]
    Unsatisfied(Vec<usize>),
    #[error("reported {what} {claimed} but replay gives {actual}")]
    Mismatch {
        what: &'static str,
        claimed: String,
        actual: String,
    },
}

/// Re-executes `plan` from scratch: trajectory, acceptance by every task
/// automaton, cost, signature and preference value.
pub fn replay(
    wts: &Wts,
    dfas: &[&Dfa],
    mu: &dyn PreferenceFn,
    plan: &Plan,
) -> Result<Replay, PlanEvalError> {
    let traj = wts.apply_plan(plan)?;
    let trace = traj.trace(wts);
    let satisfied = dfas
        .iter()
        .map(|d| d.accepts(&trace))
        .collect::<Result<Vec<_>, _>>()?;
    let pcs = pcs_of_plan(wts, dfas, plan)?;
    Ok(Replay {
        cost: wts.total_cost(&traj),
        mu: mu.eval(&pcs),
        pcs,
        satisfied,
    })
}

/// Replays `plan` and checks it satisfies every task with exactly the
/// reported cost, preference value and (when given) signature.
pub fn validate_plan(
    wts: &Wts,
    dfas: &[&Dfa],
    mu: &dyn PreferenceFn,
    plan: &Plan,
    cost: Cost,
    mu_value: Cost,
    pcs: Option<&[Cost]>,
) -> Result<Replay, ValidationError> {
    let r = replay(wts, dfas, mu, plan)?;
    let missing: Vec<usize> = (0..r.satisfied.len()).filter(|&j| !r.satisfied[j]).collect();
    if !missing.is_empty() {
        return Err(ValidationError::Unsatisfied(missing));
    }
    let mismatch = |what, claimed: String, actual: String| ValidationError::Mismatch {
        what,
        claimed,
        actual,
    };
    if r.cost != cost {
        return Err(mismatch("cost", cost.to_string(), r.cost.to_string()));
    }
    if r.mu != mu_value {
        return Err(mismatch("mu", mu_value.to_string(), r.mu.to_string()));
    }
    if let Some(p) = pcs {
        if p != r.pcs.as_slice() {
            return Err(mismatch("pcs", format!("{p:?}"), format!("{:?}", r.pcs)));
        }
    }
    Ok(r)
}
