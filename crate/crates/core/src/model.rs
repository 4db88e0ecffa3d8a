//! Weighted transition systems: the robot/environment abstraction.
//!
//! State, action and proposition names are strings in documents and are
//! interned to dense indices here. Actions are numbered in lexicographic
//! name order, so "sorted by action id" and "sorted by action name" agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::scltl::Valuation;

pub type StateId = usize;
pub type ActionId = usize;
pub type PropId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: dangling state `{state}`")]
    DanglingState { path: String, state: String },
    #[error("{path}: negative cost {cost}")]
    NegativeCost { path: String, cost: Cost },
    #[error("{path}: duplicate transition for state `{state}` and action `{action}`")]
    DuplicateTransition {
        path: String,
        state: String,
        action: String,
    },
    #[error("{path}: proposition `{prop}` is not in atomic_props")]
    UnknownProp { path: String, prop: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("invalid plan: no transition for action `{action}` from state `{state}` at step {step}")]
    InvalidPlan {
        step: usize,
        state: String,
        action: String,
    },
    #[error("label cell ({x},{y}) is outside the {width}x{height} grid")]
    LabelOutOfRange {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("grid dimensions must be at least 1x1, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub action: ActionId,
    pub target: StateId,
    pub cost: Cost,
}

/// A finite weighted labeled transition system. Immutable once built.
#[derive(Debug, Clone)]
pub struct Wts {
    state_names: Vec<String>,
    state_index: HashMap<String, StateId>,
    action_names: Vec<String>,
    action_index: HashMap<String, ActionId>,
    prop_names: Vec<String>,
    prop_index: HashMap<String, PropId>,
    initial: StateId,
    outgoing: Vec<Vec<Transition>>,
    labels: Vec<Vec<PropId>>,
}

impl Wts {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.outgoing.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a]
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn actions(&self) -> &[String] {
        &self.action_names
    }

    pub fn atomic_props(&self) -> &[String] {
        &self.prop_names
    }

    pub fn prop_id(&self, name: &str) -> Option<PropId> {
        self.prop_index.get(name).copied()
    }

    /// Label of `s` as sorted proposition ids.
    pub fn label_ids(&self, s: StateId) -> &[PropId] {
        &self.labels[s]
    }

    pub fn label(&self, s: StateId) -> BTreeSet<String> {
        self.labels[s]
            .iter()
            .map(|&p| self.prop_names[p].clone())
            .collect()
    }

    pub fn has_prop(&self, s: StateId, prop: &str) -> bool {
        self.prop_index
            .get(prop)
            .is_some_and(|p| self.labels[s].binary_search(p).is_ok())
    }

    /// Valuation view of a state's label, for guard and formula evaluation.
    pub fn observe(&self, s: StateId) -> StateLabel<'_> {
        StateLabel { wts: self, state: s }
    }

    /// Outgoing transitions of `s`, sorted by action.
    pub fn outgoing(&self, s: StateId) -> &[Transition] {
        &self.outgoing[s]
    }

    /// `(action, next state, cost)` for every defined `(s, a)`, sorted by action.
    pub fn successors(&self, state: &str) -> Result<Vec<(&str, &str, Cost)>, ModelError> {
        let s = self
            .state_id(state)
            .ok_or_else(|| ModelError::UnknownState(state.to_string()))?;
        Ok(self.outgoing[s]
            .iter()
            .map(|t| {
                (
                    self.action_names[t.action].as_str(),
                    self.state_names[t.target].as_str(),
                    t.cost,
                )
            })
            .collect())
    }

    pub fn step(&self, s: StateId, a: ActionId) -> Option<&Transition> {
        self.outgoing[s]
            .binary_search_by_key(&a, |t| t.action)
            .ok()
            .map(|i| &self.outgoing[s][i])
    }

    pub fn plan_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Plan, ModelError> {
        names
            .iter()
            .map(|n| {
                self.action_id(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownAction(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Plan::new)
    }

    /// Parses a whitespace-separated action list such as `"East East North"`.
    pub fn parse_plan(&self, text: &str) -> Result<Plan, ModelError> {
        let names: Vec<&str> = text.split_whitespace().collect();
        self.plan_from_names(&names)
    }

    pub fn plan_to_string(&self, plan: &Plan) -> String {
        plan.actions()
            .iter()
            .map(|&a| self.action_names[a].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The unique trajectory a plan induces from the initial state.
    pub fn apply_plan(&self, plan: &Plan) -> Result<Trajectory, ModelError> {
        let mut states = Vec::with_capacity(plan.len() + 1);
        let mut current = self.initial;
        states.push(current);
        let mut costs = Vec::with_capacity(plan.len());
        for (step, &a) in plan.actions().iter().enumerate() {
            let t = self.step(current, a).ok_or_else(|| ModelError::InvalidPlan {
                step,
                state: self.state_names[current].clone(),
                action: self.action_names[a].clone(),
            })?;
            current = t.target;
            states.push(current);
            costs.push(t.cost);
        }
        Ok(Trajectory {
            states,
            plan: plan.clone(),
            step_costs: costs,
        })
    }

    /// Sum of the state-action costs along the trajectory.
    pub fn total_cost(&self, traj: &Trajectory) -> Cost {
        traj.plan
            .actions()
            .iter()
            .zip(&traj.states)
            .map(|(&a, &s)| {
                self.step(s, a)
                    .expect("trajectory is not valid for this system")
                    .cost
            })
            .sum()
    }

    pub fn to_document(&self) -> WtsDocument {
        let mut transitions = Vec::with_capacity(self.num_transitions());
        for (s, out) in self.outgoing.iter().enumerate() {
            for t in out {
                transitions.push(TransitionDocument {
                    from: self.state_names[s].clone(),
                    action: self.action_names[t.action].clone(),
                    to: self.state_names[t.target].clone(),
                    cost: t.cost,
                });
            }
        }
        let labels = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.is_empty())
            .map(|(s, l)| {
                (
                    self.state_names[s].clone(),
                    l.iter().map(|&p| self.prop_names[p].clone()).collect(),
                )
            })
            .collect();
        WtsDocument {
            states: self.state_names.clone(),
            initial: self.state_names[self.initial].clone(),
            atomic_props: Some(self.prop_names.clone()),
            transitions,
            labels,
        }
    }
}

#[derive(Clone, Copy)]
pub struct StateLabel<'a> {
    wts: &'a Wts,
    state: StateId,
}

impl Valuation for StateLabel<'_> {
    fn holds(&self, prop: &str) -> bool {
        self.wts.has_prop(self.state, prop)
    }
}

/// A sequence of actions. Validity is relative to a [`Wts`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Plan(Vec<ActionId>);

impl Plan {
    pub fn new(actions: Vec<ActionId>) -> Self {
        Plan(actions)
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// States visited by a plan, starting at the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<StateId>,
    plan: Plan,
    step_costs: Vec<Cost>,
}

impl Trajectory {
    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn plan(&self) -> &Plan {
        &self.plan
    }

    /// Cost of each step, `step_costs()[k] = c(τ_k, π_k)`.
    pub fn step_costs(&self) -> &[Cost] {
        &self.step_costs
    }

    /// Observation trace; includes the initial state's label.
    pub fn trace<'a>(&self, wts: &'a Wts) -> Vec<StateLabel<'a>> {
        self.states.iter().map(|&s| wts.observe(s)).collect()
    }

    pub fn named_trace(&self, wts: &Wts) -> Vec<BTreeSet<String>> {
        self.states.iter().map(|&s| wts.label(s)).collect()
    }
}

/// Incremental construction of a [`Wts`] with invariant checks.
#[derive(Debug, Default)]
pub struct WtsBuilder {
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    props: Option<BTreeSet<String>>,
    transitions: Vec<(String, String, String, Cost, String)>,
    labels: Vec<(String, String, String)>,
    initial: Option<(String, String)>,
}

impl WtsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        if !self.state_index.contains_key(&name) {
            self.state_index.insert(name.clone(), self.states.len());
            self.states.push(name);
        }
        self
    }

    /// Restricts labels to a declared alphabet. Without it the alphabet is
    /// the union of all labels.
    pub fn atomic_props<I, S>(&mut self, props: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.props
            .get_or_insert_with(BTreeSet::new)
            .extend(props.into_iter().map(Into::into));
        self
    }

    pub fn initial(&mut self, name: impl Into<String>) -> &mut Self {
        self.initial = Some((name.into(), "initial".to_string()));
        self
    }

    fn initial_at(&mut self, name: impl Into<String>, path: String) -> &mut Self {
        self.initial = Some((name.into(), path));
        self
    }

    pub fn transition(
        &mut self,
        from: impl Into<String>,
        action: impl Into<String>,
        to: impl Into<String>,
        cost: Cost,
    ) -> &mut Self {
        let path = format!("transitions[{}]", self.transitions.len());
        self.transition_at(from, action, to, cost, path)
    }

    fn transition_at(
        &mut self,
        from: impl Into<String>,
        action: impl Into<String>,
        to: impl Into<String>,
        cost: Cost,
        path: String,
    ) -> &mut Self {
        self.transitions
            .push((from.into(), action.into(), to.into(), cost, path));
        self
    }

    pub fn label(&mut self, state: impl Into<String>, prop: impl Into<String>) -> &mut Self {
        let path = format!("labels[{}]", self.labels.len());
        self.labels.push((state.into(), prop.into(), path));
        self
    }

    fn label_at(&mut self, state: String, prop: String, path: String) -> &mut Self {
        self.labels.push((state, prop, path));
        self
    }

    pub fn build(&self) -> Result<Wts, ModelError> {
        if self.states.is_empty() {
            return Err(ModelError::Schema {
                path: "states".into(),
                message: "at least one state is required".into(),
            });
        }
        let (initial_name, initial_path) = self.initial.clone().ok_or(ModelError::Schema {
            path: "initial".into(),
            message: "missing initial state".into(),
        })?;
        let initial = *self
            .state_index
            .get(&initial_name)
            .ok_or(ModelError::DanglingState {
                path: initial_path,
                state: initial_name.clone(),
            })?;

        let mut action_set = BTreeSet::new();
        for (_, a, _, _, path) in &self.transitions {
            if a.is_empty() || a.chars().any(char::is_whitespace) {
                return Err(ModelError::Schema {
                    path: format!("{path}.action"),
                    message: format!("action name `{a}` must be non-empty without whitespace"),
                });
            }
            action_set.insert(a.clone());
        }
        let action_names: Vec<String> = action_set.into_iter().collect();
        let action_index: HashMap<String, ActionId> = action_names
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();

        let lookup = |name: &str, path: String| {
            self.state_index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::DanglingState {
                    path,
                    state: name.to_string(),
                })
        };

        let mut outgoing: Vec<Vec<Transition>> = vec![Vec::new(); self.states.len()];
        for (from, a, to, cost, path) in &self.transitions {
            let s = lookup(from, format!("{path}.from"))?;
            let t = lookup(to, format!("{path}.to"))?;
            if cost.is_negative() {
                return Err(ModelError::NegativeCost {
                    path: format!("{path}.cost"),
                    cost: *cost,
                });
            }
            let action = action_index[a];
            if outgoing[s].iter().any(|tr| tr.action == action) {
                return Err(ModelError::DuplicateTransition {
                    path: path.clone(),
                    state: from.clone(),
                    action: a.clone(),
                });
            }
            outgoing[s].push(Transition {
                action,
                target: t,
                cost: *cost,
            });
        }
        for out in &mut outgoing {
            out.sort_by_key(|t| t.action);
        }

        let prop_set: BTreeSet<String> = match &self.props {
            Some(declared) => {
                for (_, p, path) in &self.labels {
                    if !declared.contains(p) {
                        return Err(ModelError::UnknownProp {
                            path: path.clone(),
                            prop: p.clone(),
                        });
                    }
                }
                declared.clone()
            }
            None => self.labels.iter().map(|(_, p, _)| p.clone()).collect(),
        };
        let prop_names: Vec<String> = prop_set.into_iter().collect();
        let prop_index: HashMap<String, PropId> = prop_names
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut labels: Vec<Vec<PropId>> = vec![Vec::new(); self.states.len()];
        for (state, p, path) in &self.labels {
            let s = lookup(state, path.clone())?;
            labels[s].push(prop_index[p]);
        }
        for l in &mut labels {
            l.sort_unstable();
            l.dedup();
        }

        Ok(Wts {
            state_names: self.states.clone(),
            state_index: self.state_index.clone(),
            action_names,
            action_index,
            prop_names,
            prop_index,
            initial,
            outgoing,
            labels,
        })
    }
}

/// Interchange form of a [`Wts`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WtsDocument {
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atomic_props: Option<Vec<String>>,
    #[serde(default)]
    pub transitions: Vec<TransitionDocument>,
    #[serde(default)]
    pub labels: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDocument {
    pub from: String,
    pub action: String,
    pub to: String,
    pub cost: Cost,
}

impl WtsDocument {
    /// Builds the system; error paths are prefixed with `prefix` (e.g. `wts`).
    pub fn to_wts(&self, prefix: &str) -> Result<Wts, ModelError> {
        let mut b = WtsBuilder::new();
        for (i, s) in self.states.iter().enumerate() {
            if b.state_index.contains_key(s) {
                return Err(ModelError::Schema {
                    path: format!("{prefix}.states[{i}]"),
                    message: format!("duplicate state `{s}`"),
                });
            }
            b.state(s.clone());
        }
        if let Some(props) = &self.atomic_props {
            b.atomic_props(props.iter().cloned());
        }
        b.initial_at(self.initial.clone(), format!("{prefix}.initial"));
        for (i, t) in self.transitions.iter().enumerate() {
            b.transition_at(
                t.from.clone(),
                t.action.clone(),
                t.to.clone(),
                t.cost,
                format!("{prefix}.transitions[{i}]"),
            );
        }
        for (state, props) in &self.labels {
            for (i, p) in props.iter().enumerate() {
                b.label_at(state.clone(), p.clone(), format!("{prefix}.labels.{state}[{i}]"));
            }
        }
        b.build()
    }
}

/// Parses a standalone WTS document (JSON).
pub fn load_wts(document: &str) -> Result<Wts, ModelError> {
    let doc: WtsDocument = serde_json::from_str(document).map_err(|e| ModelError::Schema {
        path: "wts".into(),
        message: e.to_string(),
    })?;
    doc.to_wts("wts")
}

pub const NORTH: &str = "North";
pub const SOUTH: &str = "South";
pub const EAST: &str = "East";
pub const WEST: &str = "West";

/// Name of grid cell `(x, y)`.
pub fn grid_state_name(x: usize, y: usize) -> String {
    format!("x{x}_{y}")
}

/// A `width × height` grid with cardinal moves of uniform cost. North
/// increases `y`, East increases `x`; the initial state is `initial`.
pub fn make_grid_world(
    width: usize,
    height: usize,
    labels: &BTreeMap<(usize, usize), BTreeSet<String>>,
    cost: Cost,
    initial: (usize, usize),
) -> Result<Wts, ModelError> {
    if width == 0 || height == 0 {
        return Err(ModelError::EmptyGrid { width, height });
    }
    if cost.is_negative() {
        return Err(ModelError::NegativeCost {
            path: "grid.cost".into(),
            cost,
        });
    }
    for &(x, y) in labels.keys().chain(std::iter::once(&initial)) {
        if x >= width || y >= height {
            return Err(ModelError::LabelOutOfRange {
                x,
                y,
                width,
                height,
            });
        }
    }
    let mut b = WtsBuilder::new();
    for y in 0..height {
        for x in 0..width {
            b.state(grid_state_name(x, y));
        }
    }
    for y in 0..height {
        for x in 0..width {
            let here = grid_state_name(x, y);
            if y + 1 < height {
                b.transition(here.clone(), NORTH, grid_state_name(x, y + 1), cost);
            }
            if y > 0 {
                b.transition(here.clone(), SOUTH, grid_state_name(x, y - 1), cost);
            }
            if x + 1 < width {
                b.transition(here.clone(), EAST, grid_state_name(x + 1, y), cost);
            }
            if x > 0 {
                b.transition(here.clone(), WEST, grid_state_name(x - 1, y), cost);
            }
        }
    }
    for (&(x, y), props) in labels {
        for p in props {
            b.label(grid_state_name(x, y), p.clone());
        }
    }
    b.initial(grid_state_name(initial.0, initial.1));
    b.build()
}

/// The 3×3 resource-collection grid used throughout the docs and tests.
pub fn example_grid(cost: Cost) -> Wts {
    let mut labels = BTreeMap::new();
    for (cell, prop) in [
        ((2, 0), "dirt"),
        ((1, 1), "plant"),
        ((1, 2), "rock"),
        ((2, 2), "charge"),
    ] {
        labels.insert(cell, BTreeSet::from([prop.to_string()]));
    }
    make_grid_world(3, 3, &labels, cost, (0, 0)).expect("valid fixture")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Wts {
        example_grid(Cost::ONE)
    }

    #[test]
    fn example_grid_shape() {
        let w = unit();
        assert_eq!(w.num_states(), 9);
        assert_eq!(w.num_transitions(), 24);
        assert_eq!(w.state_name(w.initial()), "x0_0");
        assert!(w.has_prop(w.state_id("x2_0").unwrap(), "dirt"));
        assert!(!w.has_prop(w.state_id("x0_0").unwrap(), "dirt"));
    }

    #[test]
    fn successors_sorted_by_action() {
        let w = unit();
        let succ = w.successors("x0_0").unwrap();
        assert_eq!(
            succ,
            vec![("East", "x1_0", Cost::ONE), ("North", "x0_1", Cost::ONE)]
        );
        assert!(matches!(
            w.successors("nope"),
            Err(ModelError::UnknownState(_))
        ));
    }

    #[test]
    fn state_without_outgoing_transitions() {
        let mut b = WtsBuilder::new();
        b.state("a").state("b").initial("a");
        b.transition("a", "go", "b", Cost::ONE);
        let w = b.build().unwrap();
        assert!(w.successors("b").unwrap().is_empty());
    }

    #[test]
    fn apply_plan_and_cost() {
        let w = unit();
        let empty = w.apply_plan(&Plan::default()).unwrap();
        assert_eq!(empty.states(), &[w.initial()]);
        assert_eq!(w.total_cost(&empty), Cost::ZERO);

        let plan = w.parse_plan("East East West North North East").unwrap();
        let traj = w.apply_plan(&plan).unwrap();
        let names: Vec<&str> = traj.states().iter().map(|&s| w.state_name(s)).collect();
        assert_eq!(
            names,
            ["x0_0", "x1_0", "x2_0", "x1_0", "x1_1", "x1_2", "x2_2"]
        );
        assert_eq!(w.total_cost(&traj), Cost::integer(6));

        let bad = w.parse_plan("South").unwrap();
        match w.apply_plan(&bad) {
            Err(ModelError::InvalidPlan { step, .. }) => assert_eq!(step, 0),
            other => panic!("expected invalid plan, got {other:?}"),
        }
    }

    #[test]
    fn two_cycle_cost() {
        let mut b = WtsBuilder::new();
        b.state("a").state("b").initial("a");
        b.transition("a", "go", "b", Cost::integer(2));
        b.transition("b", "back", "a", Cost::integer(3));
        let w = b.build().unwrap();
        let plan = w.parse_plan("go back go back").unwrap();
        let traj = w.apply_plan(&plan).unwrap();
        assert_eq!(w.total_cost(&traj), Cost::integer(10));
    }

    #[test]
    fn grid_sizes() {
        let none = BTreeMap::new();
        let one = make_grid_world(1, 1, &none, Cost::ONE, (0, 0)).unwrap();
        assert_eq!((one.num_states(), one.num_transitions()), (1, 0));
        let ten = make_grid_world(10, 10, &none, Cost::ONE, (0, 0)).unwrap();
        assert_eq!((ten.num_states(), ten.num_transitions()), (100, 360));
        let mut labels = BTreeMap::new();
        labels.insert((3, 0), BTreeSet::from(["p".to_string()]));
        assert!(matches!(
            make_grid_world(3, 3, &labels, Cost::ONE, (0, 0)),
            Err(ModelError::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn load_errors_carry_key_paths() {
        let neg = r#"{"states":["a","b"],"initial":"a",
            "transitions":[{"from":"a","action":"go","to":"b","cost":-1}]}"#;
        let err = load_wts(neg).unwrap_err();
        assert!(matches!(err, ModelError::NegativeCost { .. }));
        assert!(err.to_string().contains("negative cost"));
        assert!(err.to_string().contains("wts.transitions[0].cost"));

        let dangling = r#"{"states":["a"],"initial":"a",
            "transitions":[{"from":"a","action":"go","to":"zz","cost":1}]}"#;
        let err = load_wts(dangling).unwrap_err();
        assert!(err.to_string().contains("dangling state"));
        assert!(err.to_string().contains("wts.transitions[0].to"));

        let bad_label = r#"{"states":["a"],"initial":"a","atomic_props":["p"],
            "labels":{"a":["q"]}}"#;
        assert!(matches!(
            load_wts(bad_label),
            Err(ModelError::UnknownProp { .. })
        ));
        let schema = r#"{"states":["a"]}"#;
        assert!(matches!(load_wts(schema), Err(ModelError::Schema { .. })));
    }

    #[test]
    fn document_roundtrip() {
        let w = unit();
        let doc = w.to_document();
        let text = serde_json::to_string(&doc).unwrap();
        let back = load_wts(&text).unwrap();
        assert_eq!(back.to_document(), doc);
    }
}
