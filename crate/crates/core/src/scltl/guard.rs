//! Propositional guards on automaton transitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::Valuation;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    True,
    False,
    Atom(String),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn atom(name: impl Into<String>) -> Self {
        Guard::Atom(name.into())
    }

    pub fn eval<V: Valuation + ?Sized>(&self, v: &V) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Atom(p) => v.holds(p),
            Guard::Not(g) => !g.eval(v),
            Guard::And(gs) => gs.iter().all(|g| g.eval(v)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval(v)),
        }
    }

    /// Three-valued evaluation under a partial assignment.
    pub fn eval_partial(&self, assignment: &BTreeMap<&str, bool>) -> Option<bool> {
        match self {
            Guard::True => Some(true),
            Guard::False => Some(false),
            Guard::Atom(p) => assignment.get(p.as_str()).copied(),
            Guard::Not(g) => g.eval_partial(assignment).map(|b| !b),
            Guard::And(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval_partial(assignment) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Guard::Or(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval_partial(assignment) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Guard::True | Guard::False => {}
            Guard::Atom(p) => {
                out.insert(p.clone());
            }
            Guard::Not(g) => g.collect_atoms(out),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().for_each(|g| g.collect_atoms(out)),
        }
    }

    /// A small sum-of-products guard equivalent to the given set of
    /// minterms. Bit `i` of a minterm is the value of `atoms[i]`.
    pub fn from_minterms(atoms: &[String], minterms: &[u32]) -> Guard {
        let k = atoms.len();
        let full = 1usize << k;
        let set: BTreeSet<u32> = minterms.iter().copied().collect();
        if set.is_empty() {
            return Guard::False;
        }
        if set.len() == full {
            return Guard::True;
        }
        let primes = prime_implicants(k, &set);
        let cover = select_cover(&primes, &set);
        let mut terms: Vec<Guard> = cover
            .into_iter()
            .map(|imp| {
                let mut lits: Vec<Guard> = (0..k)
                    .filter(|&i| imp.care & (1 << i) != 0)
                    .map(|i| {
                        let a = Guard::Atom(atoms[i].clone());
                        if imp.value & (1 << i) != 0 {
                            a
                        } else {
                            Guard::Not(Box::new(a))
                        }
                    })
                    .collect();
                if lits.len() == 1 {
                    lits.pop().unwrap()
                } else {
                    Guard::And(lits)
                }
            })
            .collect();
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Guard::Or(terms)
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Guard::Or(gs) if gs.len() > 1 => 1,
            Guard::And(gs) if gs.len() > 1 => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, gs: &[Guard], sep: &str, min: u8| {
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                if g.precedence() <= min && gs.len() > 1 {
                    write!(f, "({g})")?;
                } else {
                    write!(f, "{g}")?;
                }
            }
            Ok(())
        };
        match self {
            Guard::True => f.write_str("true"),
            Guard::False => f.write_str("false"),
            Guard::Atom(p) => f.write_str(p),
            Guard::Not(g) => {
                if g.precedence() < 3 {
                    write!(f, "!({g})")
                } else {
                    write!(f, "!{g}")
                }
            }
            Guard::And(gs) if gs.is_empty() => f.write_str("true"),
            Guard::Or(gs) if gs.is_empty() => f.write_str("false"),
            Guard::And(gs) => join(f, gs, " & ", 2),
            Guard::Or(gs) => join(f, gs, " | ", 1),
        }
    }
}

/// An implicant over `k` atoms: bits in `care` are fixed to `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Implicant {
    care: u32,
    value: u32,
}

impl Implicant {
    fn covers(&self, m: u32) -> bool {
        m & self.care == self.value
    }
}

fn prime_implicants(k: usize, minterms: &BTreeSet<u32>) -> Vec<Implicant> {
    let all_care = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut current: BTreeSet<Implicant> = minterms
        .iter()
        .map(|&m| Implicant {
            care: all_care,
            value: m,
        })
        .collect();
    let mut primes = BTreeSet::new();
    while !current.is_empty() {
        let mut merged = BTreeSet::new();
        let mut used = BTreeSet::new();
        let items: Vec<Implicant> = current.iter().copied().collect();
        for (i, a) in items.iter().enumerate() {
            for b in &items[i + 1..] {
                if a.care != b.care {
                    continue;
                }
                let diff = a.value ^ b.value;
                if diff.count_ones() == 1 {
                    merged.insert(Implicant {
                        care: a.care & !diff,
                        value: a.value & !diff,
                    });
                    used.insert(*a);
                    used.insert(*b);
                }
            }
        }
        for imp in &items {
            if !used.contains(imp) {
                primes.insert(*imp);
            }
        }
        current = merged;
    }
    primes.into_iter().collect()
}

/// Essential primes first, then greedy by coverage; deterministic.
fn select_cover(primes: &[Implicant], minterms: &BTreeSet<u32>) -> Vec<Implicant> {
    let mut uncovered: BTreeSet<u32> = minterms.clone();
    let mut chosen: Vec<Implicant> = Vec::new();
    for &m in minterms {
        let covering: Vec<&Implicant> = primes.iter().filter(|p| p.covers(m)).collect();
        if covering.len() == 1 && !chosen.contains(covering[0]) {
            chosen.push(*covering[0]);
        }
    }
    for p in &chosen {
        uncovered.retain(|&m| !p.covers(m));
    }
    while !uncovered.is_empty() {
        let best = primes
            .iter()
            .filter(|p| !chosen.contains(p))
            .max_by_key(|p| {
                (
                    uncovered.iter().filter(|&&m| p.covers(m)).count(),
                    std::cmp::Reverse(p.care.count_ones()),
                    std::cmp::Reverse(**p),
                )
            })
            .copied()
            .expect("primes cover every minterm");
        uncovered.retain(|&m| !best.covers(m));
        chosen.push(best);
    }
    chosen.sort();
    chosen
}

/// Why a guard family fails to partition the symbol space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionViolation {
    /// A symbol (set of true propositions) witnessing the failure.
    pub symbol: BTreeSet<String>,
    /// How many guards the symbol satisfies (0 or ≥ 2).
    pub matching: usize,
}

/// Checks that exactly one guard holds for every symbol, by case splitting
/// on atoms until every guard is decided.
pub fn check_partition(guards: &[&Guard]) -> Result<(), PartitionViolation> {
    let atoms: BTreeSet<String> = guards.iter().flat_map(|g| g.atoms()).collect();
    let atoms: Vec<String> = atoms.into_iter().collect();
    let mut assignment = BTreeMap::new();
    split(guards, &atoms, &mut assignment)
}

fn split<'a>(
    guards: &[&Guard],
    atoms: &'a [String],
    assignment: &mut BTreeMap<&'a str, bool>,
) -> Result<(), PartitionViolation> {
    let mut definitely_true = 0;
    let mut undecided = false;
    for g in guards {
        match g.eval_partial(assignment) {
            Some(true) => definitely_true += 1,
            None => undecided = true,
            Some(false) => {}
        }
    }
    let witness = |assignment: &BTreeMap<&str, bool>, matching| PartitionViolation {
        symbol: assignment
            .iter()
            .filter(|(_, &v)| v)
            .map(|(k, _)| k.to_string())
            .collect(),
        matching,
    };
    if definitely_true >= 2 {
        return Err(witness(assignment, definitely_true));
    }
    if !undecided {
        return if definitely_true == 1 {
            Ok(())
        } else {
            Err(witness(assignment, 0))
        };
    }
    let next = atoms
        .iter()
        .find(|a| !assignment.contains_key(a.as_str()))
        .expect("undecided guard implies an unassigned atom");
    for value in [false, true] {
        assignment.insert(next.as_str(), value);
        let r = split(guards, atoms, assignment);
        assignment.remove(next.as_str());
        r?;
    }
    Ok(())
}
