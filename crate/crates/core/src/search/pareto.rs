use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::astar::infeasible_task;
use super::{
    dominates, may_collapse, Arena, FrontMode, HeuristicTable, LabelOrder, Node, ParetoSolution,
    SearchError, SearchOptions, SearchRun, SearchStats,
};
use crate::cost::Cost;
use crate::preference::PreferenceFn;
use crate::product::Product;

/// Every non-dominated `(cost, μ)` value over satisfying plans, one witness
/// plan each, sorted by cost ascending.
///
/// Bi-objective best-first search on `(f₁, μ)` where `f₁ = g + h` and the
/// second objective is the preference cost of the accumulated signature.
/// Nodes weakly dominated by an emitted solution are discarded.
pub fn pareto_front(
    prod: &Product<'_>,
    table: &HeuristicTable,
    mu: &dyn PreferenceFn,
    mode: FrontMode,
    options: &SearchOptions,
) -> SearchRun<Vec<ParetoSolution>> {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let result = if infeasible_task(prod, table).is_some() {
        Ok(Vec::new())
    } else {
        match mode {
            FrontMode::Sound => sound(prod, table, mu, options, &mut stats),
            FrontMode::Scalar => scalar(prod, table, mu, options, &mut stats),
        }
    };
    SearchRun {
        result,
        stats,
        elapsed: start.elapsed(),
    }
}

type OpenKey = Reverse<(Cost, Cost, u64, u32)>;

struct Front {
    solutions: Vec<ParetoSolution>,
}

impl Front {
    /// Whether some solution is at least as good as `(cost, mu)` in both
    /// objectives.
    fn covers(&self, cost: Cost, mu: Cost) -> bool {
        self.solutions.iter().any(|s| s.cost <= cost && s.mu <= mu)
    }

    fn add(&mut self, s: ParetoSolution) {
        self.solutions
            .retain(|old| !dominates((s.cost, s.mu), (old.cost, old.mu)));
        self.solutions.push(s);
    }

    fn finish(mut self) -> Vec<ParetoSolution> {
        self.solutions.sort_by_key(|s| (s.cost, Reverse(s.mu)));
        self.solutions
    }
}

fn sound(
    prod: &Product<'_>,
    table: &HeuristicTable,
    mu: &dyn PreferenceFn,
    options: &SearchOptions,
    stats: &mut SearchStats,
) -> Result<Vec<ParetoSolution>, SearchError> {
    let order = LabelOrder::Preference(mu.dominance());
    let collapse = may_collapse(mu);
    let mut arena = Arena::new(prod);
    let mut front = Front {
        solutions: Vec::new(),
    };
    let mut open: BinaryHeap<OpenKey> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let root = arena.root(mu);
    let Some(h0) = table.h_max_min(prod, &arena.states[root.state as usize]) else {
        return Ok(Vec::new());
    };
    let root_mu = root.mu;
    let root_id = arena.insert(order, root).expect("first label");
    open.push(Reverse((h0, root_mu, seq, root_id)));
    stats.generated += 1;

    let mut pops: u64 = 0;
    while let Some(Reverse((f1, node_mu, _, id))) = open.pop() {
        pops += 1;
        if pops.is_multiple_of(256) && options.expired() {
            stats.product_states = arena.num_states();
            return Err(SearchError::Timeout);
        }
        let node = &arena.nodes[id as usize];
        if node.dead {
            continue;
        }
        if front.covers(f1, node_mu) {
            stats.pruned += 1;
            continue;
        }
        if arena.is_goal(node) {
            front.add(arena.solution(id)?);
            continue;
        }
        stats.expanded += 1;
        for child in arena.children(id, mu, collapse) {
            let Some(h) = table.h_max_min(prod, &arena.states[child.state as usize]) else {
                stats.pruned += 1;
                continue;
            };
            let (f1, child_mu) = (child.g + h, child.mu);
            if front.covers(f1, child_mu) {
                stats.pruned += 1;
                continue;
            }
            match arena.insert(order, child) {
                Some(cid) => {
                    seq += 1;
                    stats.generated += 1;
                    open.push(Reverse((f1, child_mu, seq, cid)));
                }
                None => stats.pruned += 1,
            }
        }
    }
    stats.product_states = arena.num_states();
    Ok(front.finish())
}

/// Plain bi-objective search: a node is dropped when its preference cost is
/// not below the best already expanded at its state, or at any goal.
fn scalar(
    prod: &Product<'_>,
    table: &HeuristicTable,
    mu: &dyn PreferenceFn,
    options: &SearchOptions,
    stats: &mut SearchStats,
) -> Result<Vec<ParetoSolution>, SearchError> {
    let collapse = may_collapse(mu);
    let mut arena = Arena::new(prod);
    let mut front = Front {
        solutions: Vec::new(),
    };
    let mut open: BinaryHeap<OpenKey> = BinaryHeap::new();
    let mut seq: u64 = 0;
    let mut g2_min: Vec<Option<Cost>> = Vec::new();
    let mut g2_goal: Option<Cost> = None;
    let stale = |g2_min: &[Option<Cost>], g2_goal: Option<Cost>, n: &Node| {
        let at_state = g2_min.get(n.state as usize).copied().flatten();
        at_state.is_some_and(|m| n.mu >= m) || g2_goal.is_some_and(|m| n.mu >= m)
    };

    let root = arena.root(mu);
    let Some(h0) = table.h_max_min(prod, &arena.states[root.state as usize]) else {
        return Ok(Vec::new());
    };
    open.push(Reverse((h0, root.mu, seq, arena.push(root))));
    stats.generated += 1;

    let mut pops: u64 = 0;
    while let Some(Reverse((_, _, _, id))) = open.pop() {
        pops += 1;
        if pops.is_multiple_of(256) && options.expired() {
            stats.product_states = arena.num_states();
            return Err(SearchError::Timeout);
        }
        let node = &arena.nodes[id as usize];
        if stale(&g2_min, g2_goal, node) {
            stats.pruned += 1;
            continue;
        }
        let state = node.state as usize;
        if g2_min.len() <= state {
            g2_min.resize(state + 1, None);
        }
        g2_min[state] = Some(node.mu);
        if arena.is_goal(node) {
            g2_goal = Some(node.mu);
            front.add(arena.solution(id)?);
            continue;
        }
        stats.expanded += 1;
        for child in arena.children(id, mu, collapse) {
            let Some(h) = table.h_max_min(prod, &arena.states[child.state as usize]) else {
                stats.pruned += 1;
                continue;
            };
            if stale(&g2_min, g2_goal, &child) {
                stats.pruned += 1;
                continue;
            }
            seq += 1;
            stats.generated += 1;
            let key = (child.g + h, child.mu);
            open.push(Reverse((key.0, key.1, seq, arena.push(child))));
        }
    }
    stats.product_states = arena.num_states();
    Ok(front.finish())
}
