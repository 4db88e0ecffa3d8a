use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::guard::{check_partition, Guard};
use super::syntax::parse_guard;
use super::{ScltlError, Valuation};

pub type DfaState = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaEdge {
    pub guard: Guard,
    pub target: DfaState,
}

/// Deterministic finite automaton with guard-labeled transitions and
/// absorbing accepting states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    names: Vec<String>,
    edges: Vec<Vec<DfaEdge>>,
    initial: DfaState,
    accepting: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DfaError {
    #[error("automaton invariant violated: no guard of state {state} matches symbol {symbol:?}")]
    NoMatchingGuard {
        state: String,
        symbol: BTreeSet<String>,
    },
    #[error("automaton invariant violated: {count} guards of state {state} match the same symbol")]
    AmbiguousGuards { state: String, count: usize },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl Dfa {
    /// Assembles and validates an automaton.
    pub fn new(
        names: Vec<String>,
        edges: Vec<Vec<DfaEdge>>,
        initial: DfaState,
        accepting: Vec<bool>,
    ) -> Result<Self, DfaError> {
        let dfa = Dfa {
            names,
            edges,
            initial,
            accepting,
        };
        dfa.validate()?;
        Ok(dfa)
    }

    pub(crate) fn new_unchecked(
        names: Vec<String>,
        edges: Vec<Vec<DfaEdge>>,
        initial: DfaState,
        accepting: Vec<bool>,
    ) -> Self {
        Dfa {
            names,
            edges,
            initial,
            accepting,
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn initial(&self) -> DfaState {
        self.initial
    }

    pub fn is_accepting(&self, q: DfaState) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = DfaState> + '_ {
        (0..self.num_states()).filter(|&q| self.accepting[q])
    }

    pub fn state_name(&self, q: DfaState) -> &str {
        &self.names[q]
    }

    pub fn edges(&self, q: DfaState) -> &[DfaEdge] {
        &self.edges[q]
    }

    /// Propositions mentioned by any guard.
    pub fn atoms(&self) -> BTreeSet<String> {
        self.edges
            .iter()
            .flatten()
            .flat_map(|e| e.guard.atoms())
            .collect()
    }

    /// The unique successor of `q` on `symbol`.
    pub fn step<V: Valuation + ?Sized>(&self, q: DfaState, symbol: &V) -> Result<DfaState, DfaError> {
        let mut found = None;
        let mut count = 0;
        for e in &self.edges[q] {
            if e.guard.eval(symbol) {
                count += 1;
                found.get_or_insert(e.target);
            }
        }
        match (found, count) {
            (Some(t), 1) => Ok(t),
            (None, _) => Err(DfaError::NoMatchingGuard {
                state: self.names[q].clone(),
                symbol: self
                    .atoms()
                    .into_iter()
                    .filter(|a| symbol.holds(a))
                    .collect(),
            }),
            (Some(_), n) => Err(DfaError::AmbiguousGuards {
                state: self.names[q].clone(),
                count: n,
            }),
        }
    }

    /// Final state of the run from the initial state over `trace`.
    pub fn run<V: Valuation>(&self, trace: &[V]) -> Result<DfaState, DfaError> {
        trace.iter().try_fold(self.initial, |q, s| self.step(q, s))
    }

    pub fn accepts<V: Valuation>(&self, trace: &[V]) -> Result<bool, DfaError> {
        Ok(self.accepting[self.run(trace)?])
    }

    /// Totality, determinism, target ranges and absorbing acceptance.
    pub fn validate(&self) -> Result<(), DfaError> {
        let n = self.names.len();
        let invalid = |path: String, message: String| DfaError::Invalid { path, message };
        if n == 0 {
            return Err(invalid("states".into(), "automaton has no states".into()));
        }
        if self.edges.len() != n || self.accepting.len() != n {
            return Err(invalid(
                "states".into(),
                "edge and acceptance tables do not match the state count".into(),
            ));
        }
        if self.initial >= n {
            return Err(invalid("initial".into(), "initial state out of range".into()));
        }
        for (q, edges) in self.edges.iter().enumerate() {
            let path = format!("states[{q}]");
            for (i, e) in edges.iter().enumerate() {
                if e.target >= n {
                    return Err(invalid(
                        format!("{path}.edges[{i}]"),
                        "target out of range".into(),
                    ));
                }
                if self.accepting[q] && e.target != q {
                    return Err(invalid(
                        format!("{path}.edges[{i}]"),
                        format!(
                            "accepting state `{}` must be absorbing, but has an edge to `{}`",
                            self.names[q], self.names[e.target]
                        ),
                    ));
                }
            }
            let guards: Vec<&Guard> = edges.iter().map(|e| &e.guard).collect();
            if let Err(v) = check_partition(&guards) {
                let message = if v.matching == 0 {
                    format!(
                        "guards of `{}` are not total: no guard matches {:?}",
                        self.names[q], v.symbol
                    )
                } else {
                    format!(
                        "guards of `{}` are not deterministic: {} guards match {:?}",
                        self.names[q], v.matching, v.symbol
                    )
                };
                return Err(invalid(path, message));
            }
        }
        Ok(())
    }

    pub fn to_document(&self) -> DfaDocument {
        DfaDocument {
            states: self
                .names
                .iter()
                .zip(&self.edges)
                .map(|(name, edges)| DfaStateDocument {
                    name: name.clone(),
                    edges: edges
                        .iter()
                        .map(|e| DfaEdgeDocument {
                            guard: e.guard.to_string(),
                            to: self.names[e.target].clone(),
                        })
                        .collect(),
                })
                .collect(),
            initial: self.names[self.initial].clone(),
            accepting: self.accepting_states().map(|q| self.names[q].clone()).collect(),
        }
    }
}

/// Inline automaton format for problem files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaDocument {
    pub states: Vec<DfaStateDocument>,
    pub initial: String,
    pub accepting: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaStateDocument {
    pub name: String,
    pub edges: Vec<DfaEdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaEdgeDocument {
    pub guard: String,
    pub to: String,
}

impl DfaDocument {
    /// Builds and validates the automaton; `prefix` is prepended to error paths.
    pub fn to_dfa(&self, prefix: &str) -> Result<Dfa, ScltlError> {
        let mut index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if index.insert(s.name.as_str(), i).is_some() {
                return Err(ScltlError::Automaton(DfaError::Invalid {
                    path: format!("{prefix}.states[{i}].name"),
                    message: format!("duplicate state `{}`", s.name),
                }));
            }
        }
        let lookup = |name: &str, path: String| {
            index.get(name).copied().ok_or_else(|| {
                ScltlError::Automaton(DfaError::Invalid {
                    path,
                    message: format!("unknown state `{name}`"),
                })
            })
        };
        let mut edges = Vec::with_capacity(self.states.len());
        for (i, s) in self.states.iter().enumerate() {
            let mut out = Vec::with_capacity(s.edges.len());
            for (j, e) in s.edges.iter().enumerate() {
                let path = format!("{prefix}.states[{i}].edges[{j}]");
                let guard = parse_guard(&e.guard).map_err(|err| ScltlError::Automaton(
                    DfaError::Invalid {
                        path: format!("{path}.guard"),
                        message: err.to_string(),
                    },
                ))?;
                out.push(DfaEdge {
                    guard,
                    target: lookup(&e.to, format!("{path}.to"))?,
                });
            }
            edges.push(out);
        }
        let initial = lookup(&self.initial, format!("{prefix}.initial"))?;
        let mut accepting = vec![false; self.states.len()];
        for (k, a) in self.accepting.iter().enumerate() {
            accepting[lookup(a, format!("{prefix}.accepting[{k}]"))?] = true;
        }
        let names = self.states.iter().map(|s| s.name.clone()).collect();
        Dfa::new(names, edges, initial, accepting).map_err(|e| match e {
            DfaError::Invalid { path, message } => ScltlError::Automaton(DfaError::Invalid {
                path: format!("{prefix}.{path}"),
                message,
            }),
            other => ScltlError::Automaton(other),
        })
    }
}
