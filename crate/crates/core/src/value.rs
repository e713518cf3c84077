//! Members of the extended base set.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::structures::Term;
use crate::treealg::{Context, Tree};

/// An opaque element of the standard base set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Atom(pub String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A tree node label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Label(pub String);

impl Label {
    pub const HOLE: &'static str = "ξ";

    pub fn new(name: impl Into<String>) -> Self {
        Label(name.into())
    }

    /// The hole label of contexts.
    pub fn hole() -> Self {
        Label(String::from(Self::HOLE))
    }

    pub fn is_hole(&self) -> bool {
        self.0 == Self::HOLE
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Child-index path from a tree's root; the empty path is the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Self {
        Path(Vec::new())
    }

    pub fn child(&self, index: usize) -> Self {
        let mut steps = self.0.clone();
        steps.push(index);
        Path(steps)
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, init) = self.0.split_last()?;
        Some(Path(init.to_vec()))
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    /// True when `self` is a proper ancestor of `other`.
    pub fn is_ancestor_of(&self, other: &Path) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    /// Neither path is an ancestor of (or equal to) the other.
    pub fn is_disjoint(&self, other: &Path) -> bool {
        !other.0.starts_with(&self.0) && !self.0.starts_with(&other.0)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NODE(")?;
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{step}")?;
        }
        f.write_str(")")
    }
}

/// A value of the extended base set.
///
/// Equality is structural. Trees are stored canonically, so structural
/// equality of trees is isomorphism of ordered labelled trees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Value {
    Undef,
    Bool(bool),
    Nat(u64),
    Atom(Atom),
    /// A function symbol (or operator) name used as a value.
    Symbol(String),
    Label(Label),
    /// A node of the tree currently stored at `self`.
    Node(Path),
    Tuple(Vec<Value>),
    Set(BTreeSet<Value>),
    /// A term treated as a value.
    Term(Box<Term>),
    Tree(Tree),
    Hedge(Vec<Tree>),
    Context(Context),
}

impl Value {
    pub fn atom(name: impl Into<String>) -> Self {
        Value::Atom(Atom::new(name))
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        Value::Symbol(name.into())
    }

    pub fn label(name: impl Into<String>) -> Self {
        Value::Label(Label::new(name))
    }

    pub fn is_undef(&self) -> bool {
        matches!(self, Value::Undef)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    /// Values that `drop` and `raise` leave untouched.
    pub fn is_plain(&self) -> bool {
        matches!(
            self,
            Value::Undef | Value::Bool(_) | Value::Nat(_) | Value::Atom(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Undef => "undef",
            Value::Bool(_) => "bool",
            Value::Nat(_) => "nat",
            Value::Atom(_) => "atom",
            Value::Symbol(_) => "symbol",
            Value::Label(_) => "label",
            Value::Node(_) => "node",
            Value::Tuple(_) => "tuple",
            Value::Set(_) => "set",
            Value::Term(_) => "term",
            Value::Tree(_) => "tree",
            Value::Hedge(_) => "hedge",
            Value::Context(_) => "context",
        }
    }

    /// Renames every standard atom, recursing into tuples, sets, dropped
    /// terms and tree leaf values. Everything else is a fixed point.
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Value {
        match self {
            Value::Atom(a) => Value::Atom(f(a)),
            Value::Tuple(items) => Value::Tuple(items.iter().map(|v| v.map_atoms(f)).collect()),
            Value::Set(items) => Value::Set(items.iter().map(|v| v.map_atoms(f)).collect()),
            Value::Term(t) => Value::Term(Box::new(t.map_atoms(f))),
            Value::Tree(t) => Value::Tree(t.map_atoms(f)),
            Value::Hedge(h) => Value::Hedge(h.iter().map(|t| t.map_atoms(f)).collect()),
            Value::Context(c) => Value::Context(c.map_atoms(f)),
            other => other.clone(),
        }
    }

    /// Collects the standard atoms occurring anywhere in the value.
    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Value::Atom(a) => {
                out.insert(a.clone());
            }
            Value::Tuple(items) => items.iter().for_each(|v| v.collect_atoms(out)),
            Value::Set(items) => items.iter().for_each(|v| v.collect_atoms(out)),
            Value::Term(t) => t.collect_atoms(out),
            Value::Tree(t) => t.root().collect_atoms(out),
            Value::Hedge(h) => h.iter().for_each(|t| t.root().collect_atoms(out)),
            Value::Context(c) => c.tree().root().collect_atoms(out),
            _ => {}
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Nat(n)
    }
}

impl From<Tree> for Value {
    fn from(t: Tree) -> Self {
        Value::Tree(t)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Undef => f.write_str("undef"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Symbol(s) => write!(f, "SYM({s})"),
            Value::Label(l) => write!(f, "#{l}"),
            Value::Node(p) => write!(f, "{p}"),
            Value::Tuple(items) => {
                f.write_str("tuple(")?;
                write_list(f, items.iter())?;
                f.write_str(")")
            }
            Value::Set(items) => {
                f.write_str("{")?;
                write_list(f, items.iter())?;
                f.write_str("}")
            }
            Value::Term(t) => {
                f.write_str("DROP(")?;
                crate::structures::term::fmt_dropped(t, f)?;
                f.write_str(")")
            }
            Value::Tree(t) => write!(f, "{t}"),
            Value::Hedge(h) => {
                f.write_str("hedge(")?;
                write_list(f, h.iter())?;
                f.write_str(")")
            }
            Value::Context(c) => write!(f, "{c}"),
        }
    }
}

pub(crate) fn write_list<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = T>,
) -> fmt::Result {
    for (i, item) in items.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}
