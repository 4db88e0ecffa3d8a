use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::cost::Cost;
use crate::model::StateId;
use crate::product::{Product, ProductState};
use crate::scltl::DfaState;

/// Per-task minimal cost-to-accept on the single products, or nothing at
/// all for the zero heuristic.
#[derive(Debug, Clone)]
pub struct HeuristicTable {
    num_wts_states: usize,
    /// `distances[j][q * |S| + s]`; `None` when no accepting state is
    /// reachable. Empty for the zero heuristic.
    distances: Vec<Vec<Option<Cost>>>,
}

impl HeuristicTable {
    /// Backward multi-source Dijkstra from the accepting states of every
    /// single product.
    pub fn compute(prod: &Product<'_>) -> Self {
        let distances = (0..prod.num_tasks())
            .map(|j| {
                let sp = prod.single(j);
                let rev = sp.reverse_edges();
                let mut dist: Vec<Option<Cost>> = vec![None; sp.num_states()];
                let mut heap = BinaryHeap::new();
                for (v, d) in dist.iter_mut().enumerate() {
                    if sp.is_accepting(v) {
                        *d = Some(Cost::ZERO);
                        heap.push(Reverse((Cost::ZERO, v)));
                    }
                }
                while let Some(Reverse((d, v))) = heap.pop() {
                    if dist[v] != Some(d) {
                        continue;
                    }
                    for &(u, _, c) in &rev[v] {
                        let nd = d + c;
                        if dist[u].is_none_or(|old| nd < old) {
                            dist[u] = Some(nd);
                            heap.push(Reverse((nd, u)));
                        }
                    }
                }
                dist
            })
            .collect();
        HeuristicTable {
            num_wts_states: prod.wts().num_states(),
            distances,
        }
    }

    /// The heuristic that is zero everywhere.
    pub fn zero(prod: &Product<'_>) -> Self {
        HeuristicTable {
            num_wts_states: prod.wts().num_states(),
            distances: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.distances.is_empty()
    }

    /// `d^j(s, q)`; `None` is infinity.
    pub fn distance(&self, j: usize, s: StateId, q: DfaState) -> Option<Cost> {
        match self.distances.get(j) {
            Some(d) => d[q * self.num_wts_states + s],
            None => Some(Cost::ZERO),
        }
    }

    /// Max over pending tasks of their single-product distance; zero when
    /// every task is satisfied and `None` when some pending task can no
    /// longer be satisfied.
    pub fn h_max_min(&self, prod: &Product<'_>, p: &ProductState) -> Option<Cost> {
        let mut h = Cost::ZERO;
        if self.is_zero() {
            return Some(h);
        }
        for j in 0..prod.num_tasks() {
            if prod.is_task_accepted(p, j) {
                continue;
            }
            h = h.max(self.distance(j, p.s, p.q[j])?);
        }
        Some(h)
    }
}
