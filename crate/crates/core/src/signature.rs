//! Attack-tree signatures: the gate families `AND_i` / `OR_i` (one gate per
//! arity `i >= 1`) together with a finite set of nullary basic-step labels.

use std::collections::BTreeSet;
use std::fmt;

/// A function symbol: an AND or OR gate of a fixed arity, or a basic-step
/// label (arity 0).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    And(usize),
    Or(usize),
    Label(String),
}

impl Symbol {
    pub fn label(name: impl Into<String>) -> Self {
        Symbol::Label(name.into())
    }

    /// Number of children a node carrying this symbol must have.
    pub fn arity(&self) -> usize {
        match self {
            Symbol::And(n) | Symbol::Or(n) => *n,
            Symbol::Label(_) => 0,
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self, Symbol::And(_) | Symbol::Or(_))
    }

    pub fn is_label(&self) -> bool {
        matches!(self, Symbol::Label(_))
    }

    pub fn as_label(&self) -> Option<&str> {
        match self {
            Symbol::Label(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::And(n) => write!(f, "AND_{n}"),
            Symbol::Or(n) => write!(f, "OR_{n}"),
            Symbol::Label(b) => write!(f, "{b}"),
        }
    }
}

/// The signature of attack trees over a finite label set.
///
/// Gates of every positive arity are implicitly present; only the label set
/// varies between signatures. Gate symbols of arity 0 are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    labels: BTreeSet<String>,
}

impl Signature {
    /// Signature over the given basic-step labels.
    pub fn attack_tree<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Signature {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    /// Signature with no labels at all (wiring-only graphs).
    pub fn empty() -> Self {
        Signature {
            labels: BTreeSet::new(),
        }
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        match symbol {
            Symbol::And(n) | Symbol::Or(n) => *n >= 1,
            Symbol::Label(b) => self.labels.contains(b),
        }
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_arities() {
        assert_eq!(Symbol::And(3).arity(), 3);
        assert_eq!(Symbol::Or(1).arity(), 1);
        assert_eq!(Symbol::label("D").arity(), 0);
    }

    #[test]
    fn membership() {
        let sig = Signature::attack_tree(["D", "F", "S"]);
        assert!(sig.contains(&Symbol::And(2)));
        assert!(sig.contains(&Symbol::Or(7)));
        assert!(sig.contains(&Symbol::label("F")));
        assert!(!sig.contains(&Symbol::label("X")));
        // gates need at least one child
        assert!(!sig.contains(&Symbol::And(0)));
        assert!(!sig.contains(&Symbol::Or(0)));
    }

    #[test]
    fn display_names() {
        assert_eq!(Symbol::And(2).to_string(), "AND_2");
        assert_eq!(Symbol::Or(3).to_string(), "OR_3");
        assert_eq!(Symbol::label("sneak in").to_string(), "sneak in");
    }
}
