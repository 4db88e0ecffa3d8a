//! Problem files: a system, its tasks, a preference and an optional budget.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::{Bound, Cost};
use crate::model::{make_grid_world, ModelError, Wts, WtsDocument};
use crate::preference::{Preference, PreferenceError, PreferenceFn};
use crate::product::{Product, ProductError};
use crate::scltl::{formula_to_dfa, parse_scltl, Dfa, DfaDocument, Formula, ScltlError};
use crate::search::FrontMode;

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {source}")]
    Task { path: String, source: ScltlError },
    #[error("{path}: proposition `{prop}` does not occur in the system's alphabet")]
    UnknownProp { path: String, prop: String },
    #[error("tasks: N > 1 required, got {0} task(s)")]
    TooFewTasks(usize),
    #[error("preference: {0}")]
    Preference(#[from] PreferenceError),
    #[error("exactly one of `wts` and `grid` must be given")]
    SystemChoice,
}

/// Grid shorthand: a `width × height` world with cardinal moves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDocument {
    pub width: usize,
    pub height: usize,
    #[serde(default = "unit_cost")]
    pub cost: Cost,
    #[serde(default)]
    pub labels: Vec<CellLabels>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<[usize; 2]>,
    /// Propositions in the alphabet that label no cell.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atomic_props: Vec<String>,
}

fn unit_cost() -> Cost {
    Cost::ONE
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellLabels {
    pub cell: [usize; 2],
    pub props: Vec<String>,
}

impl GridDocument {
    pub fn initial_cell(&self) -> (usize, usize) {
        self.initial.map_or((0, 0), |[x, y]| (x, y))
    }

    /// Propositions per cell.
    pub fn cell_labels(&self) -> BTreeMap<(usize, usize), BTreeSet<String>> {
        let mut map: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
        for l in &self.labels {
            map.entry((l.cell[0], l.cell[1]))
                .or_default()
                .extend(l.props.iter().cloned());
        }
        map
    }

    pub fn to_wts(&self) -> Result<Wts, ModelError> {
        let wts = make_grid_world(
            self.width,
            self.height,
            &self.cell_labels(),
            self.cost,
            self.initial_cell(),
        )?;
        if self.atomic_props.is_empty() {
            return Ok(wts);
        }
        let mut doc = wts.to_document();
        let mut props: BTreeSet<String> = wts.atomic_props().iter().cloned().collect();
        props.extend(self.atomic_props.iter().cloned());
        doc.atomic_props = Some(props.into_iter().collect());
        doc.to_wts("grid")
    }
}

/// A task as written in a problem file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskDocument {
    Formula(String),
    Automaton { dfa: DfaDocument },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heuristic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dominance: Option<FrontMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wts: Option<WtsDocument>,
    pub tasks: Vec<TaskDocument>,
    pub preference: Preference,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_max: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<OptionsDocument>,
}

#[derive(Debug, Clone)]
pub struct Task {
    /// The formula, when the task was given as one.
    pub formula: Option<Formula>,
    pub dfa: Dfa,
}

impl Task {
    pub fn from_formula(formula: Formula) -> Self {
        Task {
            dfa: formula_to_dfa(&formula),
            formula: Some(formula),
        }
    }

    pub fn describe(&self) -> String {
        match &self.formula {
            Some(f) => f.to_string(),
            None => format!("<automaton with {} states>", self.dfa.num_states()),
        }
    }
}

/// A loaded and validated problem.
#[derive(Debug)]
pub struct Problem {
    pub wts: Wts,
    pub grid: Option<GridDocument>,
    pub tasks: Vec<Task>,
    pub preference: Preference,
    pub mu: Box<dyn PreferenceFn>,
    pub mu_max: Bound,
    pub options: OptionsDocument,
    document: ProblemDocument,
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        Self::from_document(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_document(document: ProblemDocument) -> Result<Self, ProblemError> {
        let wts = match (&document.grid, &document.wts) {
            (Some(g), None) => g.to_wts()?,
            (None, Some(w)) => w.to_wts("wts")?,
            _ => return Err(ProblemError::SystemChoice),
        };
        if document.tasks.len() < 2 {
            return Err(ProblemError::TooFewTasks(document.tasks.len()));
        }
        let alphabet: BTreeSet<&str> = wts.atomic_props().iter().map(String::as_str).collect();
        let mut tasks = Vec::with_capacity(document.tasks.len());
        for (i, t) in document.tasks.iter().enumerate() {
            let path = format!("tasks[{i}]");
            let task = match t {
                TaskDocument::Formula(text) => {
                    let f = parse_scltl(text).map_err(|source| ProblemError::Task {
                        path: path.clone(),
                        source,
                    })?;
                    Task::from_formula(f)
                }
                TaskDocument::Automaton { dfa } => Task {
                    formula: None,
                    dfa: dfa.to_dfa(&format!("{path}.dfa")).map_err(|source| {
                        ProblemError::Task {
                            path: path.clone(),
                            source,
                        }
                    })?,
                },
            };
            let atoms = match &task.formula {
                Some(f) => f.atoms(),
                None => task.dfa.atoms(),
            };
            if let Some(prop) = atoms.into_iter().find(|a| !alphabet.contains(a.as_str())) {
                return Err(ProblemError::UnknownProp { path, prop });
            }
            tasks.push(task);
        }
        let mu = document.preference.build(tasks.len())?;
        Ok(Problem {
            wts,
            grid: document.grid.clone(),
            preference: document.preference.clone(),
            mu,
            mu_max: document.mu_max.unwrap_or(Bound::Infinite),
            options: document.options.clone().unwrap_or_default(),
            tasks,
            document,
        })
    }

    pub fn dfas(&self) -> Vec<&Dfa> {
        self.tasks.iter().map(|t| &t.dfa).collect()
    }

    pub fn product(&self) -> Result<Product<'_>, ProductError> {
        Product::new(&self.wts, &self.dfas())
    }

    pub fn document(&self) -> &ProblemDocument {
        &self.document
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document).expect("documents serialize")
    }
}
