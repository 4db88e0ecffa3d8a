//! Preference-aware temporal-logic planning on weighted transition systems.
//!
//! A robot model ([`model::Wts`]) and a set of co-safe LTL tasks
//! ([`scltl`]) are combined into an implicit product ([`product`]); plans
//! are searched for under a preference over per-task completion costs
//! ([`preference`], [`search`]).

pub mod cost;
pub mod instances;
pub mod model;
pub mod preference;
pub mod problem;
pub mod product;
pub mod scltl;
pub mod search;
pub mod validate;

pub use cost::{Bound, Cost};
pub use model::{Plan, Trajectory, Wts};
pub use preference::{Pcs, Preference, PreferenceFn};
pub use problem::{Problem, ProblemError};
pub use product::{Product, ProductState};
pub use scltl::{Dfa, Formula};
pub use search::{FrontMode, HeuristicTable, ParetoSolution, SearchError, SearchOptions};
