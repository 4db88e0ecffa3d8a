//! The implicit product of a WTS with one DFA per task.
//!
//! Nothing is materialized beyond per-task step tables `δ_j(q, L(s))`;
//! product states are produced on demand by [`Product::successors`].

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::cost::Cost;
use crate::model::{ActionId, Plan, StateId, Wts};
use crate::scltl::{Dfa, DfaError, DfaState};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProductError {
    #[error("a product needs at least one task automaton")]
    NoTasks,
    #[error("task {task}: {source}")]
    Automaton { task: usize, source: DfaError },
}

/// `(s, q_1, …, q_N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub s: StateId,
    pub q: Box<[DfaState]>,
}

/// A product transition with its scalar cost and transition-PCS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEdge {
    pub action: ActionId,
    pub target: ProductState,
    pub cost: Cost,
    pub pcs: Vec<Cost>,
}

/// Precomputed `δ(q, L(s))` for one automaton over every WTS state.
#[derive(Debug, Clone)]
struct StepTable {
    num_wts_states: usize,
    next: Vec<DfaState>,
    accepting: Vec<bool>,
    initial: DfaState,
}

impl StepTable {
    fn new(wts: &Wts, dfa: &Dfa) -> Result<Self, DfaError> {
        let n = wts.num_states();
        let mut next = Vec::with_capacity(n * dfa.num_states());
        for q in 0..dfa.num_states() {
            for s in 0..n {
                next.push(dfa.step(q, &wts.observe(s))?);
            }
        }
        Ok(StepTable {
            num_wts_states: n,
            next,
            accepting: (0..dfa.num_states()).map(|q| dfa.is_accepting(q)).collect(),
            initial: dfa.initial(),
        })
    }

    /// DFA state after observing the label of `s` from `q`.
    fn step(&self, q: DfaState, s: StateId) -> DfaState {
        self.next[q * self.num_wts_states + s]
    }

    fn num_states(&self) -> usize {
        self.accepting.len()
    }
}

/// `T ⊗ A_1 ⊗ … ⊗ A_N`. Borrowed, immutable, shareable across searches.
#[derive(Debug, Clone)]
pub struct Product<'a> {
    wts: &'a Wts,
    tables: Vec<StepTable>,
}

impl<'a> Product<'a> {
    pub fn new(wts: &'a Wts, dfas: &[&Dfa]) -> Result<Self, ProductError> {
        if dfas.is_empty() {
            return Err(ProductError::NoTasks);
        }
        let tables = dfas
            .iter()
            .enumerate()
            .map(|(task, d)| {
                StepTable::new(wts, d).map_err(|source| ProductError::Automaton { task, source })
            })
            .collect::<Result<_, _>>()?;
        Ok(Product { wts, tables })
    }

    pub fn wts(&self) -> &'a Wts {
        self.wts
    }

    pub fn num_tasks(&self) -> usize {
        self.tables.len()
    }

    /// Number of DFA states of task `j`.
    pub fn dfa_size(&self, j: usize) -> usize {
        self.tables[j].num_states()
    }

    /// WTS initial state with every automaton advanced by `L(s₀)`.
    pub fn initial_state(&self) -> ProductState {
        let s = self.wts.initial();
        ProductState {
            s,
            q: self.tables.iter().map(|t| t.step(t.initial, s)).collect(),
        }
    }

    pub fn is_task_accepted(&self, p: &ProductState, j: usize) -> bool {
        self.tables[j].accepting[p.q[j]]
    }

    /// Indices of the tasks satisfied at `p`.
    pub fn acc_set(&self, p: &ProductState) -> Vec<usize> {
        (0..self.num_tasks())
            .filter(|&j| self.is_task_accepted(p, j))
            .collect()
    }

    pub fn is_fully_accepting(&self, p: &ProductState) -> bool {
        (0..self.num_tasks()).all(|j| self.is_task_accepted(p, j))
    }

    /// Transition-PCS of leaving `p` with an action of cost `cost`.
    pub fn transition_pcs(&self, p: &ProductState, cost: Cost) -> Vec<Cost> {
        (0..self.num_tasks())
            .map(|j| {
                if self.is_task_accepted(p, j) {
                    Cost::ZERO
                } else {
                    cost
                }
            })
            .collect()
    }

    /// Product state reached by moving to WTS state `s_next`.
    pub fn advance(&self, p: &ProductState, s_next: StateId) -> ProductState {
        ProductState {
            s: s_next,
            q: self
                .tables
                .iter()
                .zip(p.q.iter())
                .map(|(t, &q)| t.step(q, s_next))
                .collect(),
        }
    }

    /// Every product transition out of `p`, one per WTS action, sorted by
    /// action. Several actions may reach the same target.
    pub fn successors(&self, p: &ProductState) -> Vec<ProductEdge> {
        self.wts
            .outgoing(p.s)
            .iter()
            .map(|t| ProductEdge {
                action: t.action,
                target: self.advance(p, t.target),
                cost: t.cost,
                pcs: self.transition_pcs(p, t.cost),
            })
            .collect()
    }

    /// Like [`successors`](Self::successors) but keeps only the cheapest
    /// action per distinct target (first action on ties).
    pub fn collapsed_successors(&self, p: &ProductState) -> Vec<(ActionId, StateId, Cost)> {
        let mut best: Vec<(ActionId, StateId, Cost)> = Vec::new();
        for t in self.wts.outgoing(p.s) {
            // Targets agree iff the WTS targets agree.
            match best.iter_mut().find(|b| b.1 == t.target) {
                Some(b) if t.cost < b.2 => *b = (t.action, t.target, t.cost),
                Some(_) => {}
                None => best.push((t.action, t.target, t.cost)),
            }
        }
        best
    }

    /// Product run of a plan with its accumulated PCS after every step.
    pub fn run_plan(
        &self,
        plan: &Plan,
    ) -> Result<(Vec<ProductState>, Vec<Vec<Cost>>), crate::model::ModelError> {
        let traj = self.wts.apply_plan(plan)?;
        let mut p = self.initial_state();
        let mut pcs = vec![Cost::ZERO; self.num_tasks()];
        let mut states = vec![p.clone()];
        let mut history = vec![pcs.clone()];
        for (k, &s_next) in traj.states().iter().skip(1).enumerate() {
            let inc = self.transition_pcs(&p, traj.step_costs()[k]);
            for (acc, d) in pcs.iter_mut().zip(inc) {
                *acc += d;
            }
            p = self.advance(&p, s_next);
            states.push(p.clone());
            history.push(pcs.clone());
        }
        Ok((states, history))
    }

    /// Breadth-first enumeration of the reachable product, or `None` once
    /// more than `limit` states are found.
    pub fn reachable(&self, limit: usize) -> Option<ReachableGraph> {
        let mut index: HashMap<ProductState, usize> = HashMap::new();
        let mut states = Vec::new();
        let mut edges = Vec::new();
        let mut queue = VecDeque::new();
        let p0 = self.initial_state();
        index.insert(p0.clone(), 0);
        states.push(p0.clone());
        queue.push_back(p0);
        while let Some(p) = queue.pop_front() {
            let from = index[&p];
            for (action, s_next, cost) in self.collapsed_successors(&p) {
                let target = self.advance(&p, s_next);
                let to = match index.get(&target) {
                    Some(&i) => i,
                    None => {
                        if states.len() >= limit {
                            return None;
                        }
                        let i = states.len();
                        index.insert(target.clone(), i);
                        states.push(target.clone());
                        queue.push_back(target);
                        i
                    }
                };
                edges.push(ReachableEdge {
                    from,
                    to,
                    action,
                    cost,
                });
            }
        }
        Some(ReachableGraph { states, edges })
    }

    /// Graphviz rendering of the reachable product (debugging aid).
    pub fn to_dot(&self, limit: usize) -> Option<String> {
        let g = self.reachable(limit)?;
        let mut out = String::from("digraph product {\n");
        for (i, p) in g.states.iter().enumerate() {
            let q: Vec<String> = p.q.iter().map(|q| q.to_string()).collect();
            let shape = if self.is_fully_accepting(p) {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(
                out,
                "  n{i} [label=\"{} ({})\", shape={shape}];",
                self.wts.state_name(p.s),
                q.join(",")
            );
        }
        for e in &g.edges {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{} / {}\"];",
                e.from,
                e.to,
                self.wts.action_name(e.action),
                e.cost
            );
        }
        out.push_str("}\n");
        Some(out)
    }

    pub fn single(&self, j: usize) -> SingleProduct<'_> {
        SingleProduct {
            wts: self.wts,
            table: &self.tables[j],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachableEdge {
    pub from: usize,
    pub to: usize,
    pub action: ActionId,
    pub cost: Cost,
}

/// Explicit reachable fragment of a product; state 0 is the initial state.
#[derive(Debug, Clone)]
pub struct ReachableGraph {
    pub states: Vec<ProductState>,
    pub edges: Vec<ReachableEdge>,
}

/// `T ⊗ A_j` for one task, indexed densely by `q · |S| + s`.
#[derive(Debug, Clone, Copy)]
pub struct SingleProduct<'p> {
    wts: &'p Wts,
    table: &'p StepTable,
}

impl SingleProduct<'_> {
    pub fn num_states(&self) -> usize {
        self.wts.num_states() * self.table.num_states()
    }

    pub fn index(&self, s: StateId, q: DfaState) -> usize {
        q * self.wts.num_states() + s
    }

    pub fn state(&self, index: usize) -> (StateId, DfaState) {
        let n = self.wts.num_states();
        (index % n, index / n)
    }

    pub fn is_accepting(&self, index: usize) -> bool {
        self.table.accepting[index / self.wts.num_states()]
    }

    /// `(action, target index, cost)` out of `(s, q)`.
    pub fn successors(&self, index: usize) -> Vec<(ActionId, usize, Cost)> {
        let (s, q) = self.state(index);
        self.wts
            .outgoing(s)
            .iter()
            .map(|t| (t.action, self.index(t.target, self.table.step(q, t.target)), t.cost))
            .collect()
    }

    /// Reversed adjacency: `reverse[v]` lists `(u, action, cost)` for every
    /// edge `u → v`.
    pub fn reverse_edges(&self) -> Vec<Vec<(usize, ActionId, Cost)>> {
        let mut rev = vec![Vec::new(); self.num_states()];
        for u in 0..self.num_states() {
            for (a, v, c) in self.successors(u) {
                rev[v].push((u, a, c));
            }
        }
        rev
    }
}
