//! Updates, shared updates and their operators.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::structures::Location;
use crate::treealg::{algebra, AlgebraValue};
use crate::value::{write_list, Path, Value};

/// Where an update writes: an ordinary location or a subtree of `self`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Address {
    Loc(Location),
    Sub(Path),
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Address::Loc(l) => write!(f, "{l}"),
            Address::Sub(p) => write!(f, "self@{p}"),
        }
    }
}

/// What a splice does to the subtree at its path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpliceOp {
    Replace(Value),
    Apply(Box<Operator>, Vec<Value>),
}

/// Operators of shared updates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    Add,
    /// Set union.
    Union,
    /// Appends trees to the children of the root.
    RightExtend,
    /// Prepends trees to the children of the root.
    LeftExtend,
    /// Rewrites one subtree of a tree-valued location. Sublocation updates
    /// become splices on `self`.
    Splice(Path, SpliceOp),
}

impl Operator {
    pub const NAMES: [&'static str; 4] = ["+", "union", "right_extend", "left_extend"];

    pub fn from_name(name: &str) -> Result<Operator> {
        match name {
            "+" => Ok(Operator::Add),
            "union" => Ok(Operator::Union),
            "right_extend" => Ok(Operator::RightExtend),
            "left_extend" => Ok(Operator::LeftExtend),
            other => Err(Error::Rule(format!(
                "unknown shared-update operator {other}"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Operator::Add => "+",
            Operator::Union => "union",
            Operator::RightExtend => "right_extend",
            Operator::LeftExtend => "left_extend",
            Operator::Splice(..) => "splice",
        }
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self, Operator::Add | Operator::Union)
    }

    /// `op(current, operands…)`. `+` and `union` read an undefined location
    /// as their neutral element.
    pub fn apply(&self, current: &Value, operands: &[Value]) -> Result<Value> {
        match self {
            Operator::Add => {
                let mut acc = match current {
                    Value::Undef => 0,
                    v => nat(v)?,
                };
                for v in operands {
                    acc = acc
                        .checked_add(nat(v)?)
                        .ok_or_else(|| Error::Eval("overflow in +".into()))?;
                }
                Ok(Value::Nat(acc))
            }
            Operator::Union => {
                let mut acc = match current {
                    Value::Undef => Default::default(),
                    Value::Set(s) => s.clone(),
                    other => return Err(Error::Eval(format!("union on {other}"))),
                };
                for v in operands {
                    match v {
                        Value::Set(s) => acc.extend(s.iter().cloned()),
                        other => return Err(Error::Eval(format!("union with {other}"))),
                    }
                }
                Ok(Value::Set(acc))
            }
            Operator::RightExtend | Operator::LeftExtend => {
                let target = AlgebraValue::from_value(current)
                    .ok_or_else(|| Error::Eval(format!("{} on {current}", self.name())))?;
                let items = operands
                    .iter()
                    .map(|v| {
                        AlgebraValue::from_value(v)
                            .ok_or_else(|| Error::Eval(format!("{} with {v}", self.name())))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let hedge = algebra::flatten_hedge(items)?;
                Ok(algebra::extend(target, hedge, *self == Operator::LeftExtend)?.into_value())
            }
            Operator::Splice(path, op) => {
                let Value::Tree(tree) = current else {
                    return Err(Error::Tree(format!(
                        "sublocation {path} of non-tree {current}"
                    )));
                };
                let replacement = match op {
                    SpliceOp::Replace(v) => v.clone(),
                    SpliceOp::Apply(inner, args) => {
                        inner.apply(&Value::Tree(tree.subtree_at(path)?), args)?
                    }
                };
                match replacement {
                    Value::Tree(t) => Ok(Value::Tree(tree.subst_tt_at(path, t)?)),
                    other => Err(Error::Tree(format!(
                        "sublocation {path} needs a tree, got {other}"
                    ))),
                }
            }
        }
    }
}

fn nat(v: &Value) -> Result<u64> {
    v.as_nat()
        .ok_or_else(|| Error::Eval(format!("+ expects a natural number, got {v}")))
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Splice(p, SpliceOp::Replace(v)) => write!(f, "splice[{p} := {v}]"),
            Operator::Splice(p, SpliceOp::Apply(op, args)) => {
                write!(f, "splice[{p} <=[{op}] ")?;
                write_list(f, args.iter())?;
                f.write_str("]")
            }
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Update {
    pub address: Address,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SharedUpdate {
    pub address: Address,
    pub op: Operator,
    pub operands: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entry {
    Plain(Update),
    Shared(SharedUpdate),
}

impl Entry {
    pub fn address(&self) -> &Address {
        match self {
            Entry::Plain(u) => &u.address,
            Entry::Shared(s) => &s.address,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Plain(u) => write!(f, "({}, {})", u.address, u.value),
            Entry::Shared(s) => {
                write!(f, "({}, {}, (", s.address, s.op)?;
                write_list(f, s.operands.iter())?;
                f.write_str("))")
            }
        }
    }
}

/// The update multiset produced by one rule evaluation, in generation order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct UpdateMultiset {
    entries: Vec<Entry>,
}

impl UpdateMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<Entry>) -> Self {
        UpdateMultiset { entries }
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Entry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn plain(&self) -> impl Iterator<Item = &Update> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Plain(u) => Some(u),
            Entry::Shared(_) => None,
        })
    }

    pub fn shared(&self) -> impl Iterator<Item = &SharedUpdate> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Shared(s) => Some(s),
            Entry::Plain(_) => None,
        })
    }

    /// Equality as multisets.
    pub fn same_multiset(&self, other: &UpdateMultiset) -> bool {
        let mut a = self.entries.clone();
        let mut b = other.entries.clone();
        a.sort();
        b.sort();
        a == b
    }
}

/// A consistent set of updates: one value per location.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct UpdateSet {
    updates: BTreeMap<Location, Value>,
}

impl UpdateSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an update, failing when the location already has another value.
    pub fn insert(&mut self, loc: Location, value: Value) -> Result<()> {
        match self.updates.get(&loc) {
            Some(old) if *old != value => Err(Error::Rule(format!(
                "inconsistent updates at {loc}: {old} and {value}"
            ))),
            _ => {
                self.updates.insert(loc, value);
                Ok(())
            }
        }
    }

    pub fn get(&self, loc: &Location) -> Option<&Value> {
        self.updates.get(loc)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Location, &Value)> {
        self.updates.iter()
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    pub fn locations(&self) -> impl Iterator<Item = &Location> {
        self.updates.keys()
    }
}

impl fmt::Display for UpdateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, v)) in self.updates.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({l}, {v})")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treealg::Tree;
    use alloc::vec;

    #[test]
    fn add_treats_undef_as_zero() {
        assert_eq!(
            Operator::Add
                .apply(&Value::Undef, &[Value::Nat(2), Value::Nat(3)])
                .unwrap(),
            Value::Nat(5)
        );
    }

    #[test]
    fn splice_apply_extends_a_subtree() {
        let t = Tree::node("a", vec![Tree::node("b", vec![])]);
        let op = Operator::Splice(
            Path(vec![0]),
            SpliceOp::Apply(
                Box::new(Operator::RightExtend),
                vec![Value::Tree(Tree::leaf("c", None))],
            ),
        );
        let out = op.apply(&Value::Tree(t), &[]).unwrap();
        assert_eq!(
            out,
            Value::Tree(Tree::node(
                "a",
                vec![Tree::node("b", vec![Tree::leaf("c", None)])]
            ))
        );
    }

    #[test]
    fn update_set_rejects_conflicts() {
        let mut u = UpdateSet::new();
        u.insert(Location::nullary("c"), Value::Nat(1)).unwrap();
        u.insert(Location::nullary("c"), Value::Nat(1)).unwrap();
        assert!(u.insert(Location::nullary("c"), Value::Nat(2)).is_err());
        assert_eq!(u.len(), 1);
    }
}
