//! Shared fixtures for the criterion benchmarks.

use prefplan_core::instances::template_instance;
use prefplan_core::scltl::formula_to_dfa;
use prefplan_core::{Dfa, Wts};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded template instance on a `size × size` grid with `tasks` tasks.
pub fn template(size: usize, tasks: usize, seed: u64) -> (Wts, Vec<Dfa>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wts, formulas) = template_instance(&mut rng, size, tasks);
    let dfas = formulas.iter().map(formula_to_dfa).collect();
    (wts, dfas)
}
