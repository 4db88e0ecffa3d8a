//! Syntactically co-safe LTL: parsing, compilation to guard-labeled DFAs,
//! and direct evaluation on finite traces.

mod compile;
mod dfa;
mod formula;
mod guard;
mod semantics;
mod syntax;

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

pub use compile::formula_to_dfa;
pub use dfa::{Dfa, DfaDocument, DfaEdge, DfaEdgeDocument, DfaError, DfaState, DfaStateDocument};
pub use formula::Formula;
pub use guard::{check_partition, Guard, PartitionViolation};
pub use semantics::{eval_trace, first_sat_prefix};
pub use syntax::{parse_guard, parse_scltl};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScltlError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("not co-safe at offset {position}: {message}")]
    NotCoSafe { position: usize, message: String },
    #[error(transparent)]
    Automaton(#[from] DfaError),
}

/// Truth assignment to atomic propositions: one trace symbol.
pub trait Valuation {
    fn holds(&self, prop: &str) -> bool;
}

impl<V: Valuation + ?Sized> Valuation for &V {
    fn holds(&self, prop: &str) -> bool {
        (**self).holds(prop)
    }
}

impl Valuation for BTreeSet<String> {
    fn holds(&self, prop: &str) -> bool {
        self.contains(prop)
    }
}

impl Valuation for HashSet<String> {
    fn holds(&self, prop: &str) -> bool {
        self.contains(prop)
    }
}

impl Valuation for [&str] {
    fn holds(&self, prop: &str) -> bool {
        self.contains(&prop)
    }
}

/// A symbol over a small alphabet: bit `i` of `mask` is `atoms[i]`.
#[derive(Debug, Clone, Copy)]
pub struct MaskSymbol<'a> {
    pub atoms: &'a [String],
    pub mask: u32,
}

impl Valuation for MaskSymbol<'_> {
    fn holds(&self, prop: &str) -> bool {
        self.atoms
            .iter()
            .position(|a| a == prop)
            .is_some_and(|i| self.mask & (1 << i) != 0)
    }
}

/// A random formula of operator depth at most `max_depth` over `atoms`.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, atoms: &[String], max_depth: usize) -> Formula {
    let leaf = |rng: &mut R| {
        let a = atoms[rng.random_range(0..atoms.len())].clone();
        match rng.random_range(0..10) {
            0 => Formula::True,
            1..=3 => Formula::NotAtom(a),
            _ => Formula::Atom(a),
        }
    };
    if max_depth == 0 || rng.random_bool(0.2) {
        return leaf(rng);
    }
    let d = max_depth - 1;
    match rng.random_range(0..6) {
        0 => Formula::and(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        1 => Formula::or(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
        2 => Formula::next(random_formula(rng, atoms, d)),
        3 => Formula::eventually(random_formula(rng, atoms, d)),
        _ => Formula::until(random_formula(rng, atoms, d), random_formula(rng, atoms, d)),
    }
}
