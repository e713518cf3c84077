use proptest::prelude::*;

use rsasm_core::rules::{execute, Outcome};
use rsasm_core::structures::Background;
use rsasm_core::structures::{Location, Signature, State};
use rsasm_core::treealg::{concat, inject_hedge, tree_diff, tree_update_rule, Tree};
use rsasm_core::{Path, Value};

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = (
        prop::sample::select(vec!["a", "b", "c"]),
        prop::option::of(0u64..4),
    )
        .prop_map(|(l, v)| Tree::leaf(l, v.map(Value::Nat)));
    leaf.prop_recursive(4, 20, 4, |inner| {
        (
            prop::sample::select(vec!["a", "b", "c"]),
            prop::collection::vec(inner, 0..4),
        )
            .prop_map(|(l, kids)| Tree::node(l, kids))
    })
}

fn with_node() -> impl Strategy<Value = (Tree, Path)> {
    tree().prop_flat_map(|t| {
        let paths: Vec<Path> = t.preorder().into_iter().map(|(p, _)| p).collect();
        (Just(t), prop::sample::select(paths))
    })
}

proptest! {
    #[test]
    fn cutting_and_refilling_a_subtree_is_the_identity((t, o) in with_node()) {
        let c = t.subst_tc_at(&o).unwrap();
        let sub = t.subtree_at(&o).unwrap();
        prop_assert_eq!(c.subst_ct(&sub), t.clone());
        prop_assert_eq!(inject_hedge(&c, vec![sub]).unwrap(), t);
    }

    #[test]
    fn replacement_size_adds_up((t, o) in with_node(), t2 in tree()) {
        let cut = t.subtree_at(&o).unwrap().node_count();
        let r = t.subst_tt_at(&o, t2.clone()).unwrap();
        prop_assert_eq!(r.node_count(), t.node_count() - cut + t2.node_count());
    }

    #[test]
    fn concat_is_associative(a in prop::collection::vec(tree(), 0..3),
                             b in prop::collection::vec(tree(), 0..3),
                             c in prop::collection::vec(tree(), 0..3)) {
        prop_assert_eq!(concat(&concat(&a, &b), &c), concat(&a, &concat(&b, &c)));
    }

    #[test]
    fn diff_rebuilds_the_target(t in tree(), t2 in tree()) {
        let theta = tree_diff(&t, &t2);
        prop_assert_eq!(theta.eval(&t).unwrap().into_tree().unwrap(), t2);
    }

    #[test]
    fn update_rule_collapses_to_one_self_update(t in tree(), t2 in tree()) {
        prop_assume!(t != t2);
        let mut s = State::new(Signature::with_self(), Background::default());
        s.set(Location::self_location(), Value::Tree(t.clone())).unwrap();
        let (_, outcome) = execute(&s, &tree_update_rule(&t, &t2)).unwrap();
        let Outcome::Updates(u) = outcome else { panic!("clash") };
        prop_assert_eq!(u.len(), 1);
        prop_assert_eq!(u.get(&Location::self_location()), Some(&Value::Tree(t2)));
    }
}
