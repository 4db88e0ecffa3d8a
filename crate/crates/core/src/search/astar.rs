use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::{
    may_collapse, Arena, HeuristicTable, LabelOrder, ParetoSolution, SearchError, SearchOptions,
    SearchRun, SearchStats,
};
use crate::cost::{Bound, Cost};
use crate::preference::PreferenceFn;
use crate::product::Product;

/// Index of the first pending task that can no longer be satisfied from
/// the initial state.
pub(crate) fn infeasible_task(prod: &Product<'_>, table: &HeuristicTable) -> Option<usize> {
    let p0 = prod.initial_state();
    (0..prod.num_tasks())
        .find(|&j| !prod.is_task_accepted(&p0, j) && table.distance(j, p0.s, p0.q[j]).is_none())
}

/// Minimum-cost satisfying plan whose preference cost stays within
/// `mu_max`.
///
/// Best-first on `f = g + h`, ties broken towards larger `g` and then
/// insertion order. Every generated node whose preference cost exceeds the
/// budget is dropped; a fully accepting node is returned when it is taken
/// off the open list with the lowest cost recorded for its state.
pub fn constrained_astar(
    prod: &Product<'_>,
    table: &HeuristicTable,
    mu: &dyn PreferenceFn,
    mu_max: Bound,
    options: &SearchOptions,
) -> SearchRun<ParetoSolution> {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let result = run(prod, table, mu, mu_max, options, &mut stats);
    SearchRun {
        result,
        stats,
        elapsed: start.elapsed(),
    }
}

fn run(
    prod: &Product<'_>,
    table: &HeuristicTable,
    mu: &dyn PreferenceFn,
    mu_max: Bound,
    options: &SearchOptions,
    stats: &mut SearchStats,
) -> Result<ParetoSolution, SearchError> {
    if let Some(task) = infeasible_task(prod, table) {
        return Err(SearchError::InfeasibleTask { task });
    }
    let order = match mu_max {
        Bound::Infinite => LabelOrder::CostOnly,
        Bound::Finite(_) => LabelOrder::Preference(mu.dominance()),
    };
    let collapse = may_collapse(mu);

    let mut arena = Arena::new(prod);
    let root = arena.root(mu);
    if !mu_max.admits(root.mu) {
        return Err(SearchError::Failure);
    }
    let h0 = table
        .h_max_min(prod, &arena.states[root.state as usize])
        .ok_or(SearchError::Failure)?;
    let mut g_min: Vec<Option<Cost>> = Vec::new();
    let mut open = BinaryHeap::new();
    let mut seq: u64 = 0;
    let root_state = root.state as usize;
    let root_id = arena.insert(order, root).expect("first label");
    record(&mut g_min, root_state, Cost::ZERO);
    open.push(Reverse((h0, Reverse(Cost::ZERO), seq, root_id)));
    stats.generated += 1;

    while let Some(Reverse((_, Reverse(g), _, id))) = open.pop() {
        if options.deadline.is_some() && stats.expanded.is_multiple_of(256) && options.expired() {
            stats.product_states = arena.num_states();
            return Err(SearchError::Timeout);
        }
        let node = &arena.nodes[id as usize];
        if node.dead {
            continue;
        }
        if arena.is_goal(node) {
            if g_min[node.state as usize].is_none_or(|best| g <= best) {
                stats.product_states = arena.num_states();
                return Ok(arena.solution(id)?);
            }
            continue;
        }
        stats.expanded += 1;
        for child in arena.children(id, mu, collapse) {
            if !mu_max.admits(child.mu) {
                stats.pruned += 1;
                continue;
            }
            let Some(h) = table.h_max_min(prod, &arena.states[child.state as usize]) else {
                stats.pruned += 1;
                continue;
            };
            let (state, g_child) = (child.state as usize, child.g);
            match arena.insert(order, child) {
                Some(cid) => {
                    seq += 1;
                    stats.generated += 1;
                    record(&mut g_min, state, g_child);
                    open.push(Reverse((g_child + h, Reverse(g_child), seq, cid)));
                }
                None => stats.pruned += 1,
            }
        }
    }
    stats.product_states = arena.num_states();
    Err(SearchError::Failure)
}

fn record(g_min: &mut Vec<Option<Cost>>, state: usize, g: Cost) {
    if g_min.len() <= state {
        g_min.resize(state + 1, None);
    }
    if g_min[state].is_none_or(|best| g < best) {
        g_min[state] = Some(g);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_grid;
    use crate::preference::{pcs_of_trajectory, OutOfOrder};
    use crate::scltl::{formula_to_dfa, parse_scltl, Dfa};

    fn example_dfas(extra: &[&str]) -> Vec<Dfa> {
        ["F charge", "F (plant & F rock)", "!plant U dirt"]
            .iter()
            .chain(extra)
            .map(|s| formula_to_dfa(&parse_scltl(s).unwrap()))
            .collect()
    }

    #[test]
    fn example_unconstrained_and_ordered() {
        let wts = example_grid(Cost::ONE);
        let dfas = example_dfas(&[]);
        let refs: Vec<&Dfa> = dfas.iter().collect();
        let prod = Product::new(&wts, &refs).unwrap();
        let mu = OutOfOrder::identity(3);
        let opts = SearchOptions::default();
        let mut costs = Vec::new();
        for table in [HeuristicTable::compute(&prod), HeuristicTable::zero(&prod)] {
            let free = constrained_astar(&prod, &table, &mu, Bound::Infinite, &opts)
                .result
                .unwrap();
            assert_eq!(free.cost, Cost::integer(6));
            let pcs = pcs_of_trajectory(&wts, &refs, &free.trajectory).unwrap();
            assert_eq!(pcs, free.pcs);
            assert_eq!(mu.eval(&pcs), free.mu);

            // The until task must finish before the plant is visited, so
            // the desired order cannot be met exactly.
            let strict = constrained_astar(&prod, &table, &mu, Bound::Finite(Cost::ZERO), &opts);
            assert_eq!(strict.result.unwrap_err(), SearchError::Failure);

            let budget = Bound::Finite(Cost::integer(3));
            let ordered = constrained_astar(&prod, &table, &mu, budget, &opts)
                .result
                .unwrap();
            assert!(ordered.mu <= Cost::integer(3));
            assert!(ordered.cost > free.cost);
            costs.push((free.cost, ordered.cost));
        }
        assert_eq!(costs[0], costs[1]);
    }

    #[test]
    fn unreachable_task_is_reported() {
        let wts = example_grid(Cost::ONE);
        let dfas = example_dfas(&["F gold"]);
        let refs: Vec<&Dfa> = dfas.iter().collect();
        let prod = Product::new(&wts, &refs).unwrap();
        let mu = OutOfOrder::identity(4);
        let opts = SearchOptions::default();
        let run = constrained_astar(&prod, &HeuristicTable::compute(&prod), &mu, Bound::Infinite, &opts);
        assert_eq!(run.result.unwrap_err(), SearchError::InfeasibleTask { task: 3 });
        // Without the table the search exhausts the product instead.
        let run = constrained_astar(&prod, &HeuristicTable::zero(&prod), &mu, Bound::Infinite, &opts);
        assert_eq!(run.result.unwrap_err(), SearchError::Failure);
    }

    #[test]
    fn heuristic_reduces_expansions() {
        let wts = example_grid(Cost::ONE);
        let dfas = example_dfas(&[]);
        let refs: Vec<&Dfa> = dfas.iter().collect();
        let prod = Product::new(&wts, &refs).unwrap();
        let mu = OutOfOrder::identity(3);
        let opts = SearchOptions::default();
        let with = constrained_astar(&prod, &HeuristicTable::compute(&prod), &mu, Bound::Infinite, &opts);
        let without = constrained_astar(&prod, &HeuristicTable::zero(&prod), &mu, Bound::Infinite, &opts);
        assert!(with.stats.expanded <= without.stats.expanded);
    }
}
