//! scLTL to DFA compilation.
//!
//! 1. Tableau expansion yields a nondeterministic automaton whose states
//!    are obligation sets: formulas that must hold at the next position,
//!    which therefore has to exist. The empty set is the accepting,
//!    absorbing state.
//! 2. Subset construction over explicit symbols (subsets of the formula's
//!    atoms). Each subset is reduced to an antichain: an obligation set
//!    that contains another member of the subset is dropped, since it
//!    accepts a sub-language. Any subset containing the empty obligation
//!    set collapses to a single accepting sink.
//! 3. Symbols leading to the same target are merged and their guard is
//!    simplified to a small sum of products.
//!
//! No minimization beyond that is attempted.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::dfa::{Dfa, DfaEdge};
use super::formula::Formula;
use super::guard::Guard;

type Obligations = BTreeSet<Formula>;

/// One tableau transition: the literal constraints on the current symbol
/// and the obligations for the next position.
#[derive(Debug, Clone)]
struct Branch {
    literals: BTreeMap<String, bool>,
    next: Obligations,
}

impl Branch {
    fn admits(&self, atoms: &[String], symbol: u32) -> bool {
        self.literals.iter().all(|(a, &v)| {
            let i = atoms.binary_search(a).expect("literal atom in alphabet");
            (symbol & (1 << i) != 0) == v
        })
    }
}

fn expand(mut todo: Vec<Formula>, mut branch: Branch, out: &mut Vec<Branch>) {
    loop {
        let Some(f) = todo.pop() else {
            out.push(branch);
            return;
        };
        match f {
            Formula::True => {}
            Formula::False => return,
            Formula::Atom(o) => {
                if branch.literals.insert(o, true) == Some(false) {
                    return;
                }
            }
            Formula::NotAtom(o) => {
                if branch.literals.insert(o, false) == Some(true) {
                    return;
                }
            }
            Formula::And(a, b) => {
                todo.push(*b);
                todo.push(*a);
            }
            Formula::Or(a, b) => {
                let mut left = todo.clone();
                left.push(*a);
                expand(left, branch.clone(), out);
                todo.push(*b);
            }
            Formula::Next(a) => {
                branch.next.insert(*a);
            }
            Formula::Until(a, b) => {
                // Either the right side holds now, or the left side holds
                // now and the until is owed at the next position.
                let mut now = todo.clone();
                now.push((*b).clone());
                expand(now, branch.clone(), out);
                branch.next.insert(Formula::Until(a.clone(), b));
                todo.push(*a);
            }
        }
    }
}

fn expand_set(set: &Obligations) -> Vec<Branch> {
    let todo: Vec<Formula> = set.iter().rev().cloned().collect();
    let mut out = Vec::new();
    expand(
        todo,
        Branch {
            literals: BTreeMap::new(),
            next: Obligations::new(),
        },
        &mut out,
    );
    out
}

/// Drops every obligation set that strictly contains another member.
fn antichain(sets: BTreeSet<Obligations>) -> BTreeSet<Obligations> {
    let all: Vec<&Obligations> = sets.iter().collect();
    sets.iter()
        .filter(|s| !all.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .cloned()
        .collect()
}

/// Compiles a formula to a DFA accepting exactly the finite traces that
/// satisfy it. States are numbered in breadth-first discovery order from
/// the initial state `q0`, so unreachable states never appear.
pub fn formula_to_dfa(f: &Formula) -> Dfa {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    let symbols: u32 = 1 << atoms.len();

    let accept: BTreeSet<Obligations> = BTreeSet::from([Obligations::new()]);
    let initial: BTreeSet<Obligations> = if f.nullable() {
        accept.clone()
    } else if *f == Formula::False {
        BTreeSet::new()
    } else {
        BTreeSet::from([Obligations::from([f.clone()])])
    };

    let mut expansions: HashMap<Obligations, Vec<Branch>> = HashMap::new();
    let mut ids: HashMap<BTreeSet<Obligations>, usize> = HashMap::new();
    let mut subsets: Vec<BTreeSet<Obligations>> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(initial.clone(), 0);
    subsets.push(initial.clone());
    queue.push_back(initial);

    let mut raw_edges: Vec<BTreeMap<usize, Vec<u32>>> = Vec::new();
    while let Some(subset) = queue.pop_front() {
        let mut by_target: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        if subset.contains(&Obligations::new()) {
            by_target.insert(ids[&subset], (0..symbols).collect());
            raw_edges.push(by_target);
            continue;
        }
        for sym in 0..symbols {
            let mut next: BTreeSet<Obligations> = BTreeSet::new();
            for obligations in &subset {
                let branches = expansions
                    .entry(obligations.clone())
                    .or_insert_with(|| expand_set(obligations));
                for b in branches.iter().filter(|b| b.admits(&atoms, sym)) {
                    next.insert(b.next.clone());
                }
            }
            let next = if next.contains(&Obligations::new()) {
                accept.clone()
            } else {
                antichain(next)
            };
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    ids.insert(next.clone(), id);
                    subsets.push(next.clone());
                    queue.push_back(next);
                    id
                }
            };
            by_target.entry(id).or_default().push(sym);
        }
        raw_edges.push(by_target);
    }

    let n = subsets.len();
    let names = (0..n).map(|q| format!("q{q}")).collect();
    let accepting = subsets
        .iter()
        .map(|s| s.contains(&Obligations::new()))
        .collect();
    let edges = raw_edges
        .into_iter()
        .map(|by_target| {
            by_target
                .into_iter()
                .map(|(target, minterms)| DfaEdge {
                    guard: Guard::from_minterms(&atoms, &minterms),
                    target,
                })
                .collect()
        })
        .collect();
    Dfa::new_unchecked(names, edges, 0, accepting)
}
