use std::collections::BTreeSet;
use std::fmt;

/// Syntactically co-safe LTL. Negation only appears on atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NotAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn not_atom(name: impl Into<String>) -> Self {
        Formula::NotAtom(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(a: Formula) -> Self {
        Formula::Next(Box::new(a))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    /// `F φ ≡ true U φ`.
    pub fn eventually(a: Formula) -> Self {
        Formula::until(Formula::True, a)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(o) | Formula::NotAtom(o) => {
                out.insert(o.clone());
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Next(a) => a.collect_atoms(out),
        }
    }

    /// Operator nesting depth; atoms, literals and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NotAtom(_) => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Formula::Next(a) => 1 + a.depth(),
        }
    }

    /// Holds on the empty suffix. Only formulas built from `true` with
    /// `∧`/`∨` qualify, and those are valid.
    pub fn nullable(&self) -> bool {
        match self {
            Formula::True => true,
            Formula::And(a, b) => a.nullable() && b.nullable(),
            Formula::Or(a, b) => a.nullable() || b.nullable(),
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Until(a, _) if **a != Formula::True => 3,
            _ => 4,
        }
    }

    fn fmt_child(&self, child: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < min {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(o) => f.write_str(o),
            Formula::NotAtom(o) => write!(f, "!{o}"),
            Formula::And(a, b) => {
                self.fmt_child(a, 2, f)?;
                f.write_str(" & ")?;
                self.fmt_child(b, 3, f)
            }
            Formula::Or(a, b) => {
                self.fmt_child(a, 1, f)?;
                f.write_str(" | ")?;
                self.fmt_child(b, 2, f)
            }
            Formula::Next(a) => {
                f.write_str("X ")?;
                self.fmt_child(a, 4, f)
            }
            Formula::Until(a, b) if **a == Formula::True => {
                f.write_str("F ")?;
                self.fmt_child(b, 4, f)
            }
            Formula::Until(a, b) => {
                self.fmt_child(a, 4, f)?;
                f.write_str(" U ")?;
                self.fmt_child(b, 3, f)
            }
        }
    }
}
