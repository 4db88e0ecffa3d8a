//! Plan synthesis over the product: heuristic precompute, constrained A*,
//! bi-objective Pareto-front search and an exhaustive oracle.

mod astar;
mod brute;
mod heuristic;
mod pareto;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::model::{ActionId, ModelError, Plan, Trajectory};
use crate::preference::{Dominance, Pcs, PreferenceFn};
use crate::product::{Product, ProductState};

pub use astar::constrained_astar;
pub use brute::brute_force_front;
pub use heuristic::HeuristicTable;
pub use pareto::pareto_front;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("task {task} cannot be satisfied from the initial state")]
    InfeasibleTask { task: usize },
    #[error("no satisfying plan within the preference budget")]
    Failure,
    #[error("search timed out")]
    Timeout,
    #[error("plan replay failed: {0}")]
    Replay(#[from] ModelError),
}

/// How partial paths reaching the same product state are compared in
/// Pareto-front search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontMode {
    /// Prune only when the preference function guarantees that no outcome
    /// is lost.
    #[default]
    Sound,
    /// Prune on the scalar preference value per state, as in plain
    /// bi-objective search. Exact only for edge-additive preferences.
    Scalar,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchOptions {
    pub deadline: Option<Instant>,
}

impl SearchOptions {
    pub fn with_timeout(timeout: Option<Duration>) -> Self {
        SearchOptions {
            deadline: timeout.map(|t| Instant::now() + t),
        }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes taken off the open list and expanded.
    pub expanded: usize,
    /// Nodes created and admitted to the open list.
    pub generated: usize,
    /// Candidates discarded by dominance, budget or global filtering.
    pub pruned: usize,
    /// Distinct product states touched.
    pub product_states: usize,
}

/// Outcome of a search together with its counters.
#[derive(Debug, Clone)]
pub struct SearchRun<T> {
    pub result: Result<T, SearchError>,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

/// A satisfying plan with its objective values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoSolution {
    pub plan: Plan,
    pub trajectory: Trajectory,
    pub cost: Cost,
    pub mu: Cost,
    pub pcs: Pcs,
}

/// `a ≤ b` in both objectives and `a < b` in at least one.
pub fn dominates(a: (Cost, Cost), b: (Cost, Cost)) -> bool {
    a.0 <= b.0 && a.1 <= b.1 && a != b
}

/// Keeps the non-dominated points with one witness per distinct value,
/// sorted by cost ascending and μ descending.
pub fn non_dominated(mut solutions: Vec<ParetoSolution>) -> Vec<ParetoSolution> {
    solutions.sort_by_key(|s| (s.cost, s.mu));
    let mut front: Vec<ParetoSolution> = Vec::new();
    for s in solutions {
        if front.last().is_none_or(|last| s.mu < last.mu) {
            front.push(s);
        }
    }
    front
}

/// Label comparison used for per-state pruning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LabelOrder {
    /// The preference is irrelevant; compare cost alone.
    CostOnly,
    Preference(Dominance),
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub state: u32,
    pub g: Cost,
    pub pcs: Box<[Cost]>,
    pub mu: Cost,
    pub parent: Option<(u32, ActionId)>,
    pub dead: bool,
}

/// Interned product states and the search-node arena shared by the
/// best-first searches.
pub(crate) struct Arena<'a, 'p> {
    pub prod: &'a Product<'p>,
    index: HashMap<ProductState, u32>,
    pub states: Vec<ProductState>,
    pub nodes: Vec<Node>,
    /// Live labels per interned state.
    labels: Vec<Vec<u32>>,
}

impl<'a, 'p> Arena<'a, 'p> {
    pub fn new(prod: &'a Product<'p>) -> Self {
        Arena {
            prod,
            index: HashMap::new(),
            states: Vec::new(),
            nodes: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn intern(&mut self, p: ProductState) -> u32 {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.states.len() as u32;
        self.index.insert(p.clone(), id);
        self.states.push(p);
        self.labels.push(Vec::new());
        id
    }

    fn weakly_dominates(&self, order: LabelOrder, state: u32, a: &Node, b: &Node) -> bool {
        if a.g > b.g {
            return false;
        }
        match order {
            LabelOrder::CostOnly => true,
            LabelOrder::Preference(Dominance::Componentwise) => {
                a.pcs.iter().zip(b.pcs.iter()).all(|(x, y)| x <= y)
            }
            LabelOrder::Preference(Dominance::PendingShift) => {
                let p = &self.states[state as usize];
                (0..a.pcs.len())
                    .filter(|&j| self.prod.is_task_accepted(p, j))
                    .all(|j| a.pcs[j] == b.pcs[j])
            }
            LabelOrder::Preference(Dominance::ExactOnly) => a.g == b.g && a.pcs == b.pcs,
        }
    }

    /// Adds `node` unless a live label at its state weakly dominates it;
    /// live labels it dominates are marked dead.
    pub fn insert(&mut self, order: LabelOrder, node: Node) -> Option<u32> {
        let state = node.state;
        let live = &self.labels[state as usize];
        if live
            .iter()
            .any(|&l| self.weakly_dominates(order, state, &self.nodes[l as usize], &node))
        {
            return None;
        }
        let id = self.nodes.len() as u32;
        let mut keep = Vec::with_capacity(live.len() + 1);
        for &l in live {
            if self.weakly_dominates(order, state, &node, &self.nodes[l as usize]) {
                self.nodes[l as usize].dead = true;
            } else {
                keep.push(l);
            }
        }
        keep.push(id);
        self.labels[state as usize] = keep;
        self.nodes.push(node);
        Some(id)
    }

    /// Adds `node` without any dominance bookkeeping.
    pub fn push(&mut self, node: Node) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        id
    }

    /// Root node at the product's initial state.
    pub fn root(&mut self, mu: &dyn PreferenceFn) -> Node {
        let state = self.intern(self.prod.initial_state());
        let pcs = vec![Cost::ZERO; self.prod.num_tasks()].into_boxed_slice();
        Node {
            state,
            g: Cost::ZERO,
            mu: mu.eval(&pcs),
            pcs,
            parent: None,
            dead: false,
        }
    }

    /// Children of node `id`, one per distinct successor state.
    pub fn children(&mut self, id: u32, mu: &dyn PreferenceFn, collapse: bool) -> Vec<Node> {
        let parent = &self.nodes[id as usize];
        let p = self.states[parent.state as usize].clone();
        let (g, pcs) = (parent.g, parent.pcs.clone());
        let moves: Vec<(ActionId, usize, Cost)> = if collapse {
            self.prod.collapsed_successors(&p)
        } else {
            self.prod
                .wts()
                .outgoing(p.s)
                .iter()
                .map(|t| (t.action, t.target, t.cost))
                .collect()
        };
        moves
            .into_iter()
            .map(|(action, s_next, c)| {
                let inc = self.prod.transition_pcs(&p, c);
                let pcs: Box<[Cost]> = pcs.iter().zip(inc).map(|(&a, b)| a + b).collect();
                let state = self.intern(self.prod.advance(&p, s_next));
                Node {
                    state,
                    g: g + c,
                    mu: mu.eval(&pcs),
                    pcs,
                    parent: Some((id, action)),
                    dead: false,
                }
            })
            .collect()
    }

    pub fn is_goal(&self, node: &Node) -> bool {
        self.prod.is_fully_accepting(&self.states[node.state as usize])
    }

    pub fn plan(&self, mut id: u32) -> Plan {
        let mut actions = Vec::new();
        while let Some((parent, action)) = self.nodes[id as usize].parent {
            actions.push(action);
            id = parent;
        }
        actions.reverse();
        Plan::new(actions)
    }

    pub fn solution(&self, id: u32) -> Result<ParetoSolution, ModelError> {
        let node = &self.nodes[id as usize];
        let plan = self.plan(id);
        let trajectory = self.prod.wts().apply_plan(&plan)?;
        Ok(ParetoSolution {
            plan,
            trajectory,
            cost: node.g,
            mu: node.mu,
            pcs: node.pcs.to_vec(),
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }
}

/// Whether distinct actions to the same successor may be merged for this
/// preference.
pub(crate) fn may_collapse(mu: &dyn PreferenceFn) -> bool {
    mu.dominance() != Dominance::ExactOnly
}
