//! Terms of the tree algebra, evaluated against a fixed input tree.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use super::{concat, inject_context, inject_hedge, label_context, Context, Hedge, Node, Tree};
use crate::error::{Error, Result};
use crate::structures::{Builtin, Term};
use crate::value::{Label, Path, Value};

/// A tree algebra expression. `Subtree` and `Context` address nodes of the
/// input tree the expression is evaluated against.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgebraTerm {
    Literal(Tree),
    /// The trivial context `ξ`.
    Hole,
    Subtree(Path),
    Context(Path, Path),
    LabelHedge(Label, Vec<AlgebraTerm>),
    LabelContext(Label, Box<AlgebraTerm>),
    LeftExtend(Vec<AlgebraTerm>, Box<AlgebraTerm>),
    RightExtend(Vec<AlgebraTerm>, Box<AlgebraTerm>),
    Concat(Box<AlgebraTerm>, Box<AlgebraTerm>),
    InjectHedge(Box<AlgebraTerm>, Vec<AlgebraTerm>),
    InjectContext(Box<AlgebraTerm>, Box<AlgebraTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraValue {
    Tree(Tree),
    Hedge(Hedge),
    Context(Context),
}

impl AlgebraValue {
    pub fn into_value(self) -> Value {
        match self {
            AlgebraValue::Tree(t) => Value::Tree(t),
            AlgebraValue::Hedge(h) => Value::Hedge(h),
            AlgebraValue::Context(c) => Value::Context(c),
        }
    }

    pub fn from_value(v: &Value) -> Option<AlgebraValue> {
        match v {
            Value::Tree(t) => Some(AlgebraValue::Tree(t.clone())),
            Value::Hedge(h) => Some(AlgebraValue::Hedge(h.clone())),
            Value::Context(c) => Some(AlgebraValue::Context(c.clone())),
            _ => None,
        }
    }

    pub fn into_tree(self) -> Result<Tree> {
        match self {
            AlgebraValue::Tree(t) => Ok(t),
            other => Err(Error::Tree(format!(
                "expected a tree, got {}",
                other.kind()
            ))),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            AlgebraValue::Tree(_) => "tree",
            AlgebraValue::Hedge(_) => "hedge",
            AlgebraValue::Context(_) => "context",
        }
    }
}

/// Flattens trees and hedges into one hedge.
pub fn flatten_hedge(items: Vec<AlgebraValue>) -> Result<Hedge> {
    let mut out = Vec::new();
    for item in items {
        match item {
            AlgebraValue::Tree(t) => out.push(t),
            AlgebraValue::Hedge(h) => out.extend(h),
            AlgebraValue::Context(_) => {
                return Err(Error::Tree("a context cannot appear inside a hedge".into()))
            }
        }
    }
    Ok(out)
}

/// `a⟨items⟩`, where at most one item may be a context; the result is a
/// context exactly when one is.
pub fn label_items(label: Label, items: Vec<AlgebraValue>) -> Result<AlgebraValue> {
    let mut children: Vec<Node> = Vec::new();
    let mut holes = 0;
    for item in items {
        match item {
            AlgebraValue::Tree(t) => children.push(t.into_root()),
            AlgebraValue::Hedge(h) => children.extend(h.into_iter().map(Tree::into_root)),
            AlgebraValue::Context(c) => {
                holes += 1;
                children.push(c.tree().clone().into_root());
            }
        }
    }
    let tree = Tree::from_node(Node {
        label,
        value: None,
        children,
    })?;
    match holes {
        0 => Ok(AlgebraValue::Tree(tree)),
        1 => Context::new(tree).map(AlgebraValue::Context),
        _ => Err(Error::Tree("more than one hole under a label".into())),
    }
}

/// Extends the root of a tree or context by a hedge.
pub fn extend(target: AlgebraValue, hedge: Hedge, left: bool) -> Result<AlgebraValue> {
    match target {
        AlgebraValue::Tree(t) => if left {
            t.left_extend(hedge)
        } else {
            t.right_extend(hedge)
        }
        .map(AlgebraValue::Tree),
        AlgebraValue::Context(c) => if left {
            c.left_extend(hedge)
        } else {
            c.right_extend(hedge)
        }
        .map(AlgebraValue::Context),
        AlgebraValue::Hedge(_) => Err(Error::Tree("cannot extend a hedge".into())),
    }
}

fn context_of(v: AlgebraValue) -> Result<Context> {
    match v {
        AlgebraValue::Context(c) => Ok(c),
        other => Err(Error::Tree(format!(
            "expected a context, got {}",
            other.kind()
        ))),
    }
}

impl AlgebraTerm {
    pub fn eval(&self, input: &Tree) -> Result<AlgebraValue> {
        let all = |ts: &[AlgebraTerm]| ts.iter().map(|t| t.eval(input)).collect::<Result<Vec<_>>>();
        match self {
            AlgebraTerm::Literal(t) => Ok(AlgebraValue::Tree(t.clone())),
            AlgebraTerm::Hole => Ok(AlgebraValue::Context(Context::hole())),
            AlgebraTerm::Subtree(p) => input.subtree_at(p).map(AlgebraValue::Tree),
            AlgebraTerm::Context(p1, p2) => input.context_at(p1, p2).map(AlgebraValue::Context),
            AlgebraTerm::LabelHedge(l, items) => label_items(l.clone(), all(items)?),
            AlgebraTerm::LabelContext(l, c) => Ok(AlgebraValue::Context(label_context(
                l.clone(),
                &context_of(c.eval(input)?)?,
            ))),
            AlgebraTerm::LeftExtend(h, c) => extend(c.eval(input)?, flatten_hedge(all(h)?)?, true),
            AlgebraTerm::RightExtend(h, c) => {
                extend(c.eval(input)?, flatten_hedge(all(h)?)?, false)
            }
            AlgebraTerm::Concat(a, b) => {
                let a = flatten_hedge(alloc::vec![a.eval(input)?])?;
                let b = flatten_hedge(alloc::vec![b.eval(input)?])?;
                Ok(AlgebraValue::Hedge(concat(&a, &b)))
            }
            AlgebraTerm::InjectHedge(c, h) => {
                let c = context_of(c.eval(input)?)?;
                inject_hedge(&c, flatten_hedge(all(h)?)?).map(AlgebraValue::Tree)
            }
            AlgebraTerm::InjectContext(a, b) => {
                let a = context_of(a.eval(input)?)?;
                let b = context_of(b.eval(input)?)?;
                Ok(AlgebraValue::Context(inject_context(&a, &b)))
            }
        }
    }

    /// The equivalent rule term, reading the input tree from `self`.
    pub fn to_term(&self) -> Term {
        let node = |p: &Path| Term::Const(Value::Node(p.clone()));
        let all = |ts: &[AlgebraTerm]| ts.iter().map(AlgebraTerm::to_term).collect::<Vec<_>>();
        match self {
            AlgebraTerm::Literal(t) => Term::Const(Value::Tree(t.clone())),
            AlgebraTerm::Hole => Term::Const(Value::Context(Context::hole())),
            AlgebraTerm::Subtree(p) => Term::Builtin(Builtin::Subtree, alloc::vec![node(p)]),
            AlgebraTerm::Context(p1, p2) => {
                Term::Builtin(Builtin::ContextOf, alloc::vec![node(p1), node(p2)])
            }
            AlgebraTerm::LabelHedge(l, items) => {
                let mut args = alloc::vec![Term::Const(Value::Label(l.clone()))];
                args.extend(all(items));
                Term::Builtin(Builtin::LabelHedge, args)
            }
            AlgebraTerm::LabelContext(l, c) => Term::Builtin(
                Builtin::LabelContext,
                alloc::vec![Term::Const(Value::Label(l.clone())), c.to_term()],
            ),
            AlgebraTerm::LeftExtend(h, c) => Term::Builtin(
                Builtin::LeftExtend,
                alloc::vec![Term::Builtin(Builtin::Hedge, all(h)), c.to_term()],
            ),
            AlgebraTerm::RightExtend(h, c) => Term::Builtin(
                Builtin::RightExtend,
                alloc::vec![Term::Builtin(Builtin::Hedge, all(h)), c.to_term()],
            ),
            AlgebraTerm::Concat(a, b) => {
                Term::Builtin(Builtin::Concat, alloc::vec![a.to_term(), b.to_term()])
            }
            AlgebraTerm::InjectHedge(c, h) => Term::Builtin(
                Builtin::InjectHedge,
                alloc::vec![c.to_term(), Term::Builtin(Builtin::Hedge, all(h))],
            ),
            AlgebraTerm::InjectContext(a, b) => Term::Builtin(
                Builtin::InjectContext,
                alloc::vec![a.to_term(), b.to_term()],
            ),
        }
    }

    /// Number of operator and leaf occurrences.
    pub fn size(&self) -> usize {
        match self {
            AlgebraTerm::Literal(_)
            | AlgebraTerm::Hole
            | AlgebraTerm::Subtree(_)
            | AlgebraTerm::Context(..) => 1,
            AlgebraTerm::LabelHedge(_, items) => 1 + items.iter().map(Self::size).sum::<usize>(),
            AlgebraTerm::LabelContext(_, c) => 1 + c.size(),
            AlgebraTerm::LeftExtend(h, c) | AlgebraTerm::RightExtend(h, c) => {
                1 + c.size() + h.iter().map(Self::size).sum::<usize>()
            }
            AlgebraTerm::InjectHedge(c, h) => {
                1 + c.size() + h.iter().map(Self::size).sum::<usize>()
            }
            AlgebraTerm::Concat(a, b) | AlgebraTerm::InjectContext(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for AlgebraTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn leaf(l: &str, v: u64) -> Tree {
        Tree::leaf(l, Some(Value::Nat(v)))
    }

    #[test]
    fn label_items_with_one_context() {
        let v = label_items(
            "a".into(),
            vec![
                AlgebraValue::Tree(leaf("b", 1)),
                AlgebraValue::Context(Context::hole()),
            ],
        )
        .unwrap();
        assert!(matches!(v, AlgebraValue::Context(_)));
        let two = label_items(
            "a".into(),
            vec![
                AlgebraValue::Context(Context::hole()),
                AlgebraValue::Context(Context::hole()),
            ],
        );
        assert!(two.is_err());
    }

    #[test]
    fn eval_rebuilds_from_parts() {
        let t = Tree::node("r", vec![leaf("x", 1), Tree::node("y", vec![leaf("z", 2)])]);
        let term = AlgebraTerm::InjectHedge(
            Box::new(AlgebraTerm::Context(Path::root(), Path(vec![1]))),
            vec![AlgebraTerm::RightExtend(
                vec![AlgebraTerm::Literal(leaf("w", 3))],
                Box::new(AlgebraTerm::Subtree(Path(vec![1]))),
            )],
        );
        let out = term.eval(&t).unwrap().into_tree().unwrap();
        assert_eq!(
            out,
            Tree::node(
                "r",
                vec![
                    leaf("x", 1),
                    Tree::node("y", vec![leaf("z", 2), leaf("w", 3)])
                ]
            )
        );
    }
}
