use std::collections::{BTreeMap, HashSet};

use super::{non_dominated, ParetoSolution};
use crate::cost::Cost;
use crate::model::{ActionId, Plan};
use crate::preference::PreferenceFn;
use crate::product::{Product, ProductState};

/// Exhaustive enumeration of plans whose cost is at most `cost_bound`,
/// returning the non-dominated `(cost, μ)` values among the satisfying ones.
///
/// Depth-first over the product with every action taken separately. Two
/// paths reaching the same product state with identical cost and signature
/// have identical futures, so only the first is extended. Fully accepting
/// paths are recorded and not extended.
pub fn brute_force_front(
    prod: &Product<'_>,
    mu: &dyn PreferenceFn,
    cost_bound: Cost,
) -> Vec<ParetoSolution> {
    struct Entry {
        state: ProductState,
        g: Cost,
        pcs: Vec<Cost>,
        parent: Option<(usize, ActionId)>,
    }

    let mut entries = vec![Entry {
        state: prod.initial_state(),
        g: Cost::ZERO,
        pcs: vec![Cost::ZERO; prod.num_tasks()],
        parent: None,
    }];
    let mut seen: HashSet<(ProductState, Cost, Vec<Cost>)> = HashSet::new();
    seen.insert((entries[0].state.clone(), Cost::ZERO, entries[0].pcs.clone()));
    let mut witnesses: BTreeMap<(Cost, Cost), usize> = BTreeMap::new();
    let mut stack = vec![0usize];

    while let Some(i) = stack.pop() {
        let e = &entries[i];
        if prod.is_fully_accepting(&e.state) {
            witnesses.entry((e.g, mu.eval(&e.pcs))).or_insert(i);
            continue;
        }
        let mut children = Vec::new();
        for edge in prod.successors(&e.state) {
            let g = e.g + edge.cost;
            if g > cost_bound {
                continue;
            }
            let pcs: Vec<Cost> = e.pcs.iter().zip(&edge.pcs).map(|(&a, &b)| a + b).collect();
            if seen.insert((edge.target.clone(), g, pcs.clone())) {
                children.push(Entry {
                    state: edge.target,
                    g,
                    pcs,
                    parent: Some((i, edge.action)),
                });
            }
        }
        for child in children {
            stack.push(entries.len());
            entries.push(child);
        }
    }

    let plan_of = |mut i: usize| {
        let mut actions = Vec::new();
        while let Some((parent, action)) = entries[i].parent {
            actions.push(action);
            i = parent;
        }
        actions.reverse();
        Plan::new(actions)
    };
    let solutions = witnesses
        .into_iter()
        .filter_map(|((cost, value), i)| {
            let plan = plan_of(i);
            let trajectory = prod.wts().apply_plan(&plan).ok()?;
            Some(ParetoSolution {
                plan,
                trajectory,
                cost,
                mu: value,
                pcs: entries[i].pcs.clone(),
            })
        })
        .collect();
    non_dominated(solutions)
}
