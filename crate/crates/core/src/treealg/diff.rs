//! Tree algebra terms that rewrite one tree into another.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{AlgebraTerm, Node, Tree};
use crate::rules::{Rule, Target};
use crate::structures::Term;
use crate::value::{Label, Path};

/// A term `θ` with `θ(t) = t2`, reusing subtrees of `t` where possible.
///
/// Subtrees of `t2` that occur in `t` are read off directly (first occurrence
/// in preorder). A node whose children extend the children of some
/// node of `t` on the right or left becomes an extension of that subtree.
/// Everything else is rebuilt with `label_hedge`.
pub fn tree_diff(t: &Tree, t2: &Tree) -> AlgebraTerm {
    let nodes = t.preorder();
    diff_node(&nodes, t2.root())
}

fn find_equal(nodes: &[(Path, &Node)], target: &Node) -> Option<Path> {
    nodes
        .iter()
        .find(|(_, n)| *n == target)
        .map(|(p, _)| p.clone())
}

fn diff_node(nodes: &[(Path, &Node)], target: &Node) -> AlgebraTerm {
    if let Some(p) = find_equal(nodes, target) {
        return AlgebraTerm::Subtree(p);
    }
    let literal =
        || AlgebraTerm::Literal(Tree::from_node(target.clone()).expect("target is a valid tree"));
    if target.is_leaf() || target.label.is_hole() {
        return literal();
    }
    // (reused children, path, extend on the left)
    let mut best: Option<(usize, &Path, bool)> = None;
    for (p, n) in nodes {
        if n.label != target.label || n.value.is_some() || n.children.is_empty() {
            continue;
        }
        let k = n.children.len();
        if k >= target.children.len() {
            continue;
        }
        let candidates = [
            (target.children[..k] == n.children[..], false),
            (
                target.children[target.children.len() - k..] == n.children[..],
                true,
            ),
        ];
        for (matches, left) in candidates {
            if matches && best.is_none_or(|(bk, _, _)| k > bk) {
                best = Some((k, p, left));
            }
        }
    }
    match best {
        Some((k, p, left)) => {
            let extra: &[Node] = if left {
                &target.children[..target.children.len() - k]
            } else {
                &target.children[k..]
            };
            let hedge = extra.iter().map(|c| diff_node(nodes, c)).collect();
            let base = Box::new(AlgebraTerm::Subtree(p.clone()));
            if left {
                AlgebraTerm::LeftExtend(hedge, base)
            } else {
                AlgebraTerm::RightExtend(hedge, base)
            }
        }
        None => AlgebraTerm::LabelHedge(
            target.label.clone(),
            target
                .children
                .iter()
                .map(|c| diff_node(nodes, c))
                .collect(),
        ),
    }
}

fn self_shaped(t: &Tree) -> bool {
    let labels: Vec<&Label> = t.root().children.iter().map(|c| &c.label).collect();
    t.label().as_str() == "self"
        && labels.len() == 2
        && labels[0].as_str() == "signature"
        && labels[1].as_str() == "rule"
}

/// A rule whose single update turns the `self` tree `t` into `t2`.
///
/// For two self-shaped trees the rule updates the signature and rule
/// sublocations of `self` in parallel; otherwise it assigns `self` whole.
pub fn tree_update_rule(t: &Tree, t2: &Tree) -> Rule {
    let sub_assign = |path: Path, theta: AlgebraTerm| Rule::Assign {
        target: Target::Dynamic(Term::Const(crate::value::Value::Node(path))),
        args: Vec::new(),
        value: theta.to_term(),
    };
    if self_shaped(t) && self_shaped(t2) {
        let nodes = t.preorder();
        let sig = diff_node(&nodes, &t2.root().children[0]);
        let rule = diff_node(&nodes, &t2.root().children[1]);
        Rule::Par(alloc::vec![
            sub_assign(Path(alloc::vec![0]), sig),
            sub_assign(Path(alloc::vec![1]), rule),
        ])
    } else {
        Rule::Assign {
            target: Target::Symbol("self".into()),
            args: Vec::new(),
            value: tree_diff(t, t2).to_term(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;
    use alloc::vec;

    fn leaf(l: &str, v: u64) -> Tree {
        Tree::leaf(l, Some(Value::Nat(v)))
    }

    #[test]
    fn identical_trees_diff_to_root() {
        let t = Tree::node("a", vec![leaf("b", 1)]);
        assert_eq!(tree_diff(&t, &t), AlgebraTerm::Subtree(Path::root()));
    }

    #[test]
    fn appended_child_is_a_right_extension() {
        let t = Tree::node("a", vec![leaf("b", 1), leaf("c", 2)]);
        let t2 = Tree::node("a", vec![leaf("b", 1), leaf("c", 2), leaf("d", 3)]);
        let theta = tree_diff(&t, &t2);
        assert!(matches!(theta, AlgebraTerm::RightExtend(..)));
        assert_eq!(theta.eval(&t).unwrap().into_tree().unwrap(), t2);
    }

    #[test]
    fn prepended_child_is_a_left_extension() {
        let t = Tree::node("a", vec![leaf("b", 1)]);
        let t2 = Tree::node("a", vec![leaf("z", 0), leaf("b", 1)]);
        let theta = tree_diff(&t, &t2);
        assert!(matches!(theta, AlgebraTerm::LeftExtend(..)));
        assert_eq!(theta.eval(&t).unwrap().into_tree().unwrap(), t2);
    }

    #[test]
    fn unrelated_tree_is_rebuilt() {
        let t = leaf("q", 9);
        let t2 = Tree::node("a", vec![Tree::node("b", vec![leaf("c", 1)])]);
        assert_eq!(
            tree_diff(&t, &t2).eval(&t).unwrap().into_tree().unwrap(),
            t2
        );
    }
}
