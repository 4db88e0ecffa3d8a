//! Seeded random problem instances for testing and benchmarking.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;

use crate::cost::Cost;
use crate::model::{grid_state_name, make_grid_world, Wts};
use crate::scltl::{random_formula, Formula};

/// `F (a & F b & F c)`: visit `a`, then `b` and `c` in either order.
pub fn template_formula(a: &str, b: &str, c: &str) -> Formula {
    Formula::eventually(Formula::and(
        Formula::atom(a),
        Formula::and(
            Formula::eventually(Formula::atom(b)),
            Formula::eventually(Formula::atom(c)),
        ),
    ))
}

/// A unit-cost `size × size` grid and `tasks` template formulas, each over
/// three distinct random cells. A chosen cell is labeled with its own
/// name.
pub fn template_instance<R: Rng + ?Sized>(rng: &mut R, size: usize, tasks: usize) -> (Wts, Vec<Formula>) {
    let mut labels: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
    let mut formulas = Vec::with_capacity(tasks);
    for _ in 0..tasks {
        let cells: Vec<(usize, usize)> = sample(rng, size * size, 3)
            .into_iter()
            .map(|i| (i % size, i / size))
            .collect();
        let names: Vec<String> = cells.iter().map(|&(x, y)| grid_state_name(x, y)).collect();
        for (cell, name) in cells.iter().zip(&names) {
            labels.entry(*cell).or_default().insert(name.clone());
        }
        formulas.push(template_formula(&names[0], &names[1], &names[2]));
    }
    let wts = make_grid_world(size, size, &labels, Cost::ONE, (0, 0)).expect("cells in range");
    (wts, formulas)
}

/// A unit-cost grid where each of `atoms` labels one or two random cells,
/// and `tasks` random formulas of depth at most `depth` over them.
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    width: usize,
    height: usize,
    atoms: &[String],
    tasks: usize,
    depth: usize,
) -> (Wts, Vec<Formula>) {
    let mut labels: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
    for a in atoms {
        for _ in 0..rng.random_range(1..=2) {
            let cell = (rng.random_range(0..width), rng.random_range(0..height));
            labels.entry(cell).or_default().insert(a.clone());
        }
    }
    let formulas = (0..tasks).map(|_| random_formula(rng, atoms, depth)).collect();
    let wts = make_grid_world(width, height, &labels, Cost::ONE, (0, 0)).expect("cells in range");
    (wts, formulas)
}
