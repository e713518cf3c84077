//! Unranked labelled trees, hedges, contexts and the tree algebra.
//!
//! Trees are stored as nested nodes in sibling order. Every operator builds a
//! fresh value, and node identifiers are preorder positions, so two trees are
//! equal exactly when they are isomorphic as ordered labelled trees with leaf
//! values.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::value::{Atom, Label, Path, Value};

pub mod algebra;
pub mod diff;

pub use algebra::{AlgebraTerm, AlgebraValue};
pub use diff::{tree_diff, tree_update_rule};

/// An ordered sequence of trees; the empty hedge is `ε`.
pub type Hedge = Vec<Tree>;

/// Preorder position of a node within one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Node {
    pub label: Label,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub value: Option<Value>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub children: Vec<Node>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn count(&self) -> usize {
        1 + self.children.iter().map(Node::count).sum::<usize>()
    }

    fn holes(&self) -> usize {
        usize::from(self.label.is_hole()) + self.children.iter().map(Node::holes).sum::<usize>()
    }

    fn hole_path(&self, here: &mut Vec<usize>) -> bool {
        if self.label.is_hole() {
            return true;
        }
        for (i, child) in self.children.iter().enumerate() {
            here.push(i);
            if child.hole_path(here) {
                return true;
            }
            here.pop();
        }
        false
    }

    fn check(&self) -> Result<()> {
        if self.value.is_some() && !self.children.is_empty() {
            return Err(Error::Tree(format!(
                "node labelled {} carries a value but has children",
                self.label
            )));
        }
        if self.label.is_hole()
            && (!self.children.is_empty() || self.value.as_ref().is_some_and(|v| !v.is_undef()))
        {
            return Err(Error::Tree("the hole must be a leaf without value".into()));
        }
        self.children.iter().try_for_each(Node::check)
    }

    fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Node {
        Node {
            label: self.label.clone(),
            value: self.value.as_ref().map(|v| v.map_atoms(f)),
            children: self.children.iter().map(|c| c.map_atoms(f)).collect(),
        }
    }

    pub(crate) fn collect_atoms(&self, out: &mut alloc::collections::BTreeSet<Atom>) {
        if let Some(v) = &self.value {
            v.collect_atoms(out);
        }
        self.children.iter().for_each(|c| c.collect_atoms(out));
    }

    fn preorder<'a>(&'a self, here: &mut Vec<usize>, out: &mut Vec<(Path, &'a Node)>) {
        out.push((Path(here.clone()), self));
        for (i, child) in self.children.iter().enumerate() {
            here.push(i);
            child.preorder(here, out);
            here.pop();
        }
    }
}

/// A finite unranked tree with a unique root, total labels and values on
/// leaves only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Tree {
    root: Box<Node>,
}

impl Tree {
    /// A leaf, optionally carrying a value.
    pub fn leaf(label: impl Into<Label>, value: Option<Value>) -> Self {
        Tree {
            root: Box::new(Node {
                label: label.into(),
                value,
                children: Vec::new(),
            }),
        }
    }

    /// An interior node over `children` (a leaf when the hedge is empty).
    pub fn node(label: impl Into<Label>, children: Hedge) -> Self {
        label_hedge(label.into(), children)
    }

    /// Wraps a node, checking the leaf-only value invariant.
    pub fn from_node(root: Node) -> Result<Self> {
        root.check()?;
        Ok(Tree {
            root: Box::new(root),
        })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        *self.root
    }

    pub fn label(&self) -> &Label {
        &self.root.label
    }

    pub fn value(&self) -> Option<&Value> {
        self.root.value.as_ref()
    }

    /// Children of the root as a hedge.
    pub fn children(&self) -> Hedge {
        self.root
            .children
            .iter()
            .cloned()
            .map(|root| Tree {
                root: Box::new(root),
            })
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    /// All node paths paired with their nodes, in preorder.
    pub fn preorder(&self) -> Vec<(Path, &Node)> {
        let mut out = Vec::new();
        self.root.preorder(&mut Vec::new(), &mut out);
        out
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn path_of(&self, id: NodeId) -> Result<Path> {
        self.preorder()
            .into_iter()
            .nth(id.0 as usize)
            .map(|(p, _)| p)
            .ok_or_else(|| Error::Tree(format!("unknown node {}", id.0)))
    }

    pub fn id_of(&self, path: &Path) -> Result<NodeId> {
        self.preorder()
            .iter()
            .position(|(p, _)| p == path)
            .map(|i| NodeId(i as u32))
            .ok_or_else(|| Error::Tree(format!("no node at {path}")))
    }

    pub fn at(&self, path: &Path) -> Option<&Node> {
        let mut node: &Node = &self.root;
        for &i in &path.0 {
            node = node.children.get(i)?;
        }
        Some(node)
    }

    fn at_mut(&mut self, path: &Path) -> Option<&mut Node> {
        let mut node: &mut Node = &mut self.root;
        for &i in &path.0 {
            node = node.children.get_mut(i)?;
        }
        Some(node)
    }

    pub fn contains(&self, path: &Path) -> bool {
        self.at(path).is_some()
    }

    pub fn get(&self, id: NodeId) -> Result<&Node> {
        let path = self.path_of(id)?;
        Ok(self.at(&path).expect("path from preorder"))
    }

    pub fn parent(&self, id: NodeId) -> Result<Option<NodeId>> {
        match self.path_of(id)?.parent() {
            Some(p) => Ok(Some(self.id_of(&p)?)),
            None => Ok(None),
        }
    }

    /// `o1 ≺c o2`: `o2` is a child of `o1`.
    pub fn is_child(&self, o1: &Path, o2: &Path) -> bool {
        self.contains(o2) && o2.parent().as_ref() == Some(o1)
    }

    /// `o1 ≺s o2`: `o2` is the next sibling of `o1`.
    pub fn is_next_sibling(&self, o1: &Path, o2: &Path) -> bool {
        match (o1.parent(), o2.parent(), o1.last(), o2.last()) {
            (Some(p1), Some(p2), Some(i), Some(j)) => {
                p1 == p2 && j == i + 1 && self.contains(o1) && self.contains(o2)
            }
            _ => false,
        }
    }

    /// The largest subtree rooted at `path`.
    pub fn subtree_at(&self, path: &Path) -> Result<Tree> {
        self.at(path)
            .map(|n| Tree {
                root: Box::new(n.clone()),
            })
            .ok_or_else(|| Error::Tree(format!("no node at {path}")))
    }

    pub fn subtree(&self, id: NodeId) -> Result<Tree> {
        self.subtree_at(&self.path_of(id)?)
    }

    /// `context(o1, o2)`: the subtree at `o1` with the subtree at `o2`
    /// replaced by the hole. Requires `o1 ≺c⁺ o2`.
    pub fn context_at(&self, o1: &Path, o2: &Path) -> Result<Context> {
        if !o1.is_ancestor_of(o2) || !self.contains(o2) {
            return Err(Error::Tree(format!(
                "{o1} is not a proper ancestor of {o2}"
            )));
        }
        let relative = Path(o2.0[o1.depth()..].to_vec());
        self.subtree_at(o1)?.subst_tc_at(&relative)
    }

    pub fn context_of(&self, o1: NodeId, o2: NodeId) -> Result<Context> {
        self.context_at(&self.path_of(o1)?, &self.path_of(o2)?)
    }

    /// `t1[ô ↦ t2]`.
    pub fn subst_tt_at(&self, path: &Path, replacement: Tree) -> Result<Tree> {
        let mut out = self.clone();
        let slot = out
            .at_mut(path)
            .ok_or_else(|| Error::Tree(format!("no node at {path}")))?;
        *slot = *replacement.root;
        Ok(out)
    }

    pub fn subst_tt(&self, id: NodeId, replacement: Tree) -> Result<Tree> {
        self.subst_tt_at(&self.path_of(id)?, replacement)
    }

    /// `t1[ô ↦ ξ]`.
    pub fn subst_tc_at(&self, path: &Path) -> Result<Context> {
        if self.root.holes() != 0 {
            return Err(Error::Tree("tree already contains a hole".into()));
        }
        let t = self.subst_tt_at(path, Tree::leaf(Label::hole(), None))?;
        Ok(Context { tree: t })
    }

    pub fn subst_tc(&self, id: NodeId) -> Result<Context> {
        self.subst_tc_at(&self.path_of(id)?)
    }

    /// Appends `hedge` to the root's children.
    pub fn right_extend(&self, hedge: Hedge) -> Result<Tree> {
        extend_node(&self.root, hedge, false).map(|root| Tree {
            root: Box::new(root),
        })
    }

    /// Prepends `hedge` to the root's children.
    pub fn left_extend(&self, hedge: Hedge) -> Result<Tree> {
        extend_node(&self.root, hedge, true).map(|root| Tree {
            root: Box::new(root),
        })
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Tree {
        Tree {
            root: Box::new(self.root.map_atoms(f)),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

fn extend_node(root: &Node, hedge: Hedge, left: bool) -> Result<Node> {
    if root.label.is_hole() {
        return Err(Error::Tree("cannot extend the trivial context".into()));
    }
    if hedge.is_empty() {
        return Ok(root.clone());
    }
    if root.value.is_some() {
        return Err(Error::Tree(format!(
            "cannot add children to valued leaf {}",
            root.label
        )));
    }
    let added = hedge.into_iter().map(Tree::into_root);
    let children = if left {
        added.chain(root.children.iter().cloned()).collect()
    } else {
        root.children.iter().cloned().chain(added).collect()
    };
    Ok(Node {
        label: root.label.clone(),
        value: None,
        children,
    })
}

/// A tree with exactly one hole leaf `ξ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Context {
    tree: Tree,
}

impl Context {
    /// The trivial context `ξ`.
    pub fn hole() -> Self {
        Context {
            tree: Tree::leaf(Label::hole(), None),
        }
    }

    pub fn new(tree: Tree) -> Result<Self> {
        tree.root.check()?;
        match tree.root.holes() {
            1 => Ok(Context { tree }),
            n => Err(Error::Tree(format!(
                "a context needs exactly one hole, found {n}"
            ))),
        }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn is_trivial(&self) -> bool {
        self.tree.root.label.is_hole()
    }

    pub fn hole_path(&self) -> Path {
        let mut here = Vec::new();
        let found = self.tree.root.hole_path(&mut here);
        debug_assert!(found, "context without hole");
        Path(here)
    }

    /// `c1[ξ ↦ c2]`.
    pub fn subst_cc(&self, other: &Context) -> Context {
        let t = self
            .tree
            .subst_tt_at(&self.hole_path(), other.tree.clone())
            .expect("hole path exists");
        Context { tree: t }
    }

    /// `c1[ξ ↦ t2]`.
    pub fn subst_ct(&self, t: &Tree) -> Tree {
        self.tree
            .subst_tt_at(&self.hole_path(), t.clone())
            .expect("hole path exists")
    }

    pub fn right_extend(&self, hedge: Hedge) -> Result<Context> {
        extend_node(&self.tree.root, hedge, false).map(|root| Context {
            tree: Tree {
                root: Box::new(root),
            },
        })
    }

    pub fn left_extend(&self, hedge: Hedge) -> Result<Context> {
        extend_node(&self.tree.root, hedge, true).map(|root| Context {
            tree: Tree {
                root: Box::new(root),
            },
        })
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Context {
        Context {
            tree: self.tree.map_atoms(f),
        }
    }
}

/// `label_hedge(a, t1…tn) = a⟨t1,…,tn⟩`.
pub fn label_hedge(label: Label, hedge: Hedge) -> Tree {
    Tree {
        root: Box::new(Node {
            label,
            value: None,
            children: hedge.into_iter().map(Tree::into_root).collect(),
        }),
    }
}

/// `label_context(a, c) = a⟨c⟩`.
pub fn label_context(label: Label, c: &Context) -> Context {
    Context {
        tree: label_hedge(label, alloc::vec![c.tree.clone()]),
    }
}

/// `left_extend(h, a⟨t'…⟩) = a⟨h, t'…⟩`.
pub fn left_extend(hedge: Hedge, c: &Context) -> Result<Context> {
    c.left_extend(hedge)
}

/// `right_extend(h, a⟨t'…⟩) = a⟨t'…, h⟩`.
pub fn right_extend(hedge: Hedge, c: &Context) -> Result<Context> {
    c.right_extend(hedge)
}

pub fn concat(h1: &[Tree], h2: &[Tree]) -> Hedge {
    h1.iter().chain(h2.iter()).cloned().collect()
}

/// `c[ξ ↦ t1…tn]`. The trivial context only accepts a single tree.
pub fn inject_hedge(c: &Context, hedge: Hedge) -> Result<Tree> {
    let hole = c.hole_path();
    let Some(parent) = hole.parent() else {
        return match <[Tree; 1]>::try_from(hedge) {
            Ok([t]) => Ok(t),
            Err(h) => Err(Error::Tree(format!(
                "the trivial context takes exactly one tree, got {}",
                h.len()
            ))),
        };
    };
    let index = hole.last().expect("non-root hole");
    let mut out = c.tree.clone();
    let node = out.at_mut(&parent).expect("hole parent exists");
    node.children
        .splice(index..=index, hedge.into_iter().map(Tree::into_root));
    Ok(out)
}

/// `c1[ξ ↦ c2]`.
pub fn inject_context(c1: &Context, c2: &Context) -> Context {
    c1.subst_cc(c2)
}

fn fmt_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if node.label.is_hole() {
        return f.write_str("XI");
    }
    match &node.value {
        Some(v) => write!(f, "{}({v})", node.label),
        None => {
            write!(f, "{}<", node.label)?;
            for (i, child) in node.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                fmt_node(child, f)?;
            }
            f.write_str(">")
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.root, f)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.tree.root, f)
    }
}
