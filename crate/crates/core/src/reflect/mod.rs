//! The tree representation of signatures and rules, `drop`/`raise`, and the
//! extraction function `β`.
//!
//! Terms inside a rule tree live in leaf values. Each `term⟨…⟩` group is a
//! node labelled `term` whose children are leaves labelled `term`, one per
//! term, each holding the dropped term.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{reflect as err, Error, Result};
use crate::rules::{Address, Operator, Rule, SharedUpdate, Target};
use crate::structures::{Domain, Env, Evaluator, FunctionSymbol, Reserve, Signature, State, Term};
use crate::treealg::{Node, Tree};
use crate::value::{Label, Path, Value};

pub mod labels {
    pub const SELF: &str = "self";
    pub const SIGNATURE: &str = "signature";
    pub const RULE: &str = "rule";
    pub const FUNC: &str = "func";
    pub const NAME: &str = "name";
    pub const ARITY: &str = "arity";
    pub const UPDATE: &str = "update";
    pub const TERM: &str = "term";
    pub const IF: &str = "if";
    pub const BOOL: &str = "bool";
    pub const PAR: &str = "par";
    pub const LET: &str = "let";
    pub const PARTIAL: &str = "partial";

    /// The fixed label set of the representation.
    pub const ALL: [&str; 13] = [
        SELF, SIGNATURE, RULE, FUNC, NAME, ARITY, UPDATE, TERM, IF, BOOL, PAR, LET, PARTIAL,
    ];
}

use labels as l;

/// What `raise` turns a value into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reflected {
    Term(Term),
    Symbol(String),
    Rule(Rule),
    /// The nullary symbol bound to the subtree of `self` at a node.
    Sublocation(Path),
}

/// `drop` on terms. Constants of the standard base set are their own
/// values; every other term becomes a term value.
pub fn drop_term(t: &Term) -> Value {
    match t {
        Term::Const(v) if v.is_plain() => v.clone(),
        other => Value::Term(Box::new(other.clone())),
    }
}

pub fn drop_rule(r: &Rule) -> Value {
    Value::Tree(encode_rule(r))
}

pub fn drop(x: &Reflected) -> Value {
    match x {
        Reflected::Term(t) => drop_term(t),
        Reflected::Symbol(f) => Value::Symbol(f.clone()),
        Reflected::Rule(r) => drop_rule(r),
        Reflected::Sublocation(p) => Value::Node(p.clone()),
    }
}

/// `raise`: the inverse of `drop`.
pub fn raise(v: &Value) -> Result<Reflected> {
    match v {
        Value::Term(t) => Ok(Reflected::Term((**t).clone())),
        Value::Symbol(f) => Ok(Reflected::Symbol(f.clone())),
        Value::Node(p) => Ok(Reflected::Sublocation(p.clone())),
        Value::Tree(t) if is_rule_tree(t) => decode_rule(t).map(Reflected::Rule),
        v if v.is_plain() => Ok(Reflected::Term(Term::Const(v.clone()))),
        other => Err(err(
            &Path::root(),
            format!("cannot raise {} value {other}", other.kind()),
        )),
    }
}

pub fn is_rule_tree(t: &Tree) -> bool {
    [l::UPDATE, l::IF, l::PAR, l::LET, l::PARTIAL].contains(&t.label().as_str())
}

fn leaf(label: &str, v: Value) -> Tree {
    Tree::leaf(label, Some(v))
}

fn term_group(terms: &[Term]) -> Tree {
    Tree::node(
        l::TERM,
        terms.iter().map(|t| leaf(l::TERM, drop_term(t))).collect(),
    )
}

fn func_leaf(target: &Target) -> Tree {
    match target {
        Target::Symbol(f) => leaf(l::FUNC, Value::Symbol(f.clone())),
        Target::Dynamic(t) => leaf(l::FUNC, drop_term(t)),
    }
}

fn wrap_rule(r: &Rule) -> Tree {
    Tree::node(l::RULE, alloc::vec![encode_rule(r)])
}

pub fn encode_rule(r: &Rule) -> Tree {
    match r {
        Rule::Assign {
            target,
            args,
            value,
        } => Tree::node(
            l::UPDATE,
            alloc::vec![
                func_leaf(target),
                term_group(args),
                term_group(core::slice::from_ref(value))
            ],
        ),
        Rule::If {
            cond,
            then,
            otherwise,
        } => {
            let mut kids = alloc::vec![leaf(l::BOOL, drop_term(cond)), wrap_rule(then)];
            if let Some(r) = otherwise {
                kids.push(wrap_rule(r));
            }
            Tree::node(l::IF, kids)
        }
        Rule::Par(rules) => Tree::node(l::PAR, rules.iter().map(wrap_rule).collect()),
        Rule::Let { var, value, body } => Tree::node(
            l::LET,
            alloc::vec![
                term_group(&[Term::Var(var.clone())]),
                term_group(core::slice::from_ref(value)),
                wrap_rule(body),
            ],
        ),
        Rule::Partial {
            target,
            op,
            args,
            operands,
        } => Tree::node(
            l::PARTIAL,
            alloc::vec![
                func_leaf(target),
                leaf(l::FUNC, Value::Symbol(op.clone())),
                term_group(args),
                term_group(operands),
            ],
        ),
    }
}

fn child_path(base: &Path, i: usize) -> Path {
    base.child(i)
}

fn expect_label(n: &Node, label: &str, at: &Path) -> Result<()> {
    if n.label.as_str() == label {
        Ok(())
    } else {
        Err(err(at, format!("expected {label}, found {}", n.label)))
    }
}

fn leaf_value<'a>(n: &'a Node, label: &str, at: &Path) -> Result<&'a Value> {
    expect_label(n, label, at)?;
    if !n.children.is_empty() {
        return Err(err(at, format!("{label} must be a leaf")));
    }
    n.value
        .as_ref()
        .ok_or_else(|| err(at, format!("{label} leaf has no value")))
}

fn raise_term(v: &Value) -> Term {
    match v {
        Value::Term(t) => (**t).clone(),
        other => Term::Const(other.clone()),
    }
}

fn decode_terms(n: &Node, at: &Path) -> Result<Vec<Term>> {
    expect_label(n, l::TERM, at)?;
    if n.value.is_some() {
        return Err(err(at, "term group carries a value"));
    }
    n.children
        .iter()
        .enumerate()
        .map(|(i, c)| leaf_value(c, l::TERM, &child_path(at, i)).map(raise_term))
        .collect()
}

fn decode_single(n: &Node, at: &Path) -> Result<Term> {
    let mut ts = decode_terms(n, at)?;
    if ts.len() != 1 {
        return Err(err(at, format!("expected one term, found {}", ts.len())));
    }
    Ok(ts.remove(0))
}

fn decode_target(n: &Node, at: &Path) -> Result<Target> {
    match leaf_value(n, l::FUNC, at)? {
        Value::Symbol(f) => Ok(Target::Symbol(f.clone())),
        Value::Term(t) => Ok(Target::Dynamic((**t).clone())),
        other if other.is_plain() => Ok(Target::Dynamic(Term::Const(other.clone()))),
        other => Err(err(
            at,
            format!("cannot use {} value {other} as a function", other.kind()),
        )),
    }
}

fn decode_wrapped(n: &Node, at: &Path) -> Result<Rule> {
    expect_label(n, l::RULE, at)?;
    match n.children.as_slice() {
        [inner] => decode_node(inner, &child_path(at, 0)),
        other => Err(err(
            at,
            format!("rule wrapper has {} children", other.len()),
        )),
    }
}

fn arity_error(at: &Path, label: &str, n: usize) -> Error {
    err(at, format!("{label} node has {n} children"))
}

fn decode_node(n: &Node, at: &Path) -> Result<Rule> {
    let kids = &n.children;
    let c = |i: usize| child_path(at, i);
    if n.value.is_some() {
        return Err(err(at, format!("rule node {} carries a value", n.label)));
    }
    match n.label.as_str() {
        l::UPDATE => {
            let [f, args, value] = kids.as_slice() else {
                return Err(arity_error(at, l::UPDATE, kids.len()));
            };
            Ok(Rule::Assign {
                target: decode_target(f, &c(0))?,
                args: decode_terms(args, &c(1))?,
                value: decode_single(value, &c(2))?,
            })
        }
        l::IF => {
            let (cond, then, otherwise) = match kids.as_slice() {
                [cond, then] => (cond, then, None),
                [cond, then, otherwise] => (cond, then, Some(otherwise)),
                _ => return Err(arity_error(at, l::IF, kids.len())),
            };
            Ok(Rule::If {
                cond: raise_term(leaf_value(cond, l::BOOL, &c(0))?),
                then: Box::new(decode_wrapped(then, &c(1))?),
                otherwise: match otherwise {
                    Some(o) => Some(Box::new(decode_wrapped(o, &c(2))?)),
                    None => None,
                },
            })
        }
        l::PAR => kids
            .iter()
            .enumerate()
            .map(|(i, k)| decode_wrapped(k, &c(i)))
            .collect::<Result<Vec<_>>>()
            .map(Rule::Par),
        l::LET => {
            let [var, value, body] = kids.as_slice() else {
                return Err(arity_error(at, l::LET, kids.len()));
            };
            let var = match decode_single(var, &c(0))? {
                Term::Var(x) => x,
                other => return Err(err(&c(0), format!("let binds {other}, not a variable"))),
            };
            Ok(Rule::Let {
                var,
                value: decode_single(value, &c(1))?,
                body: Box::new(decode_wrapped(body, &c(2))?),
            })
        }
        l::PARTIAL => {
            let [f, op, args, operands] = kids.as_slice() else {
                return Err(arity_error(at, l::PARTIAL, kids.len()));
            };
            let op = match leaf_value(op, l::FUNC, &c(1))? {
                Value::Symbol(s) => s.clone(),
                other => return Err(err(&c(1), format!("operator {other} is not a symbol"))),
            };
            Operator::from_name(&op).map_err(|e| err(&c(1), e.to_string()))?;
            Ok(Rule::Partial {
                target: decode_target(f, &c(0))?,
                op,
                args: decode_terms(args, &c(2))?,
                operands: decode_terms(operands, &c(3))?,
            })
        }
        other => Err(err(at, format!("{other} is not a rule label"))),
    }
}

/// Decodes a rule encoding; errors carry the offending node's path.
pub fn decode_rule(t: &Tree) -> Result<Rule> {
    decode_node(t.root(), &Path::root())
}

pub fn encode_signature(sig: &Signature) -> Tree {
    Tree::node(
        l::SIGNATURE,
        sig.symbols().iter().map(encode_symbol).collect(),
    )
}

/// `func⟨name⟨f⟩ arity⟨n⟩⟩`.
pub fn encode_symbol(s: &FunctionSymbol) -> Tree {
    Tree::node(
        l::FUNC,
        alloc::vec![
            leaf(l::NAME, Value::Symbol(s.name.clone())),
            leaf(l::ARITY, Value::Nat(s.arity as u64)),
        ],
    )
}

pub fn decode_signature(t: &Tree) -> Result<Signature> {
    decode_signature_at(t.root(), &Path::root())
}

fn decode_signature_at(n: &Node, at: &Path) -> Result<Signature> {
    expect_label(n, l::SIGNATURE, at)?;
    let mut sig = Signature::empty();
    for (i, f) in n.children.iter().enumerate() {
        let here = child_path(at, i);
        expect_label(f, l::FUNC, &here)?;
        let [name, arity] = f.children.as_slice() else {
            return Err(arity_error(&here, l::FUNC, f.children.len()));
        };
        let name = match leaf_value(name, l::NAME, &here.child(0))? {
            Value::Symbol(s) => s.clone(),
            other => return Err(err(&here.child(0), format!("name {other} is not a symbol"))),
        };
        let arity = match leaf_value(arity, l::ARITY, &here.child(1))? {
            Value::Nat(k) => *k as usize,
            other => {
                return Err(err(
                    &here.child(1),
                    format!("arity {other} is not a number"),
                ))
            }
        };
        sig.add(FunctionSymbol::new(name, arity))
            .map_err(|e| err(&here, e.to_string()))?;
    }
    Ok(sig)
}

/// `self⟨signature⟨…⟩ rule⟨r⟩⟩`.
pub fn encode_self(sig: &Signature, rule: &Rule) -> Tree {
    Tree::node(l::SELF, alloc::vec![encode_signature(sig), wrap_rule(rule)])
}

/// Direct scan for the root's unique child with a given label.
pub fn child_by_label(t: &Tree, label: &str) -> Result<Path> {
    let mut hits = t
        .root()
        .children
        .iter()
        .enumerate()
        .filter(|(_, c)| c.label.as_str() == label)
        .map(|(i, _)| Path(alloc::vec![i]));
    match (hits.next(), hits.next()) {
        (Some(p), None) => Ok(p),
        (None, _) => Err(err(&Path::root(), format!("no {label} child"))),
        (Some(_), Some(_)) => Err(err(&Path::root(), format!("several {label} children"))),
    }
}

/// `I o . root(t) ≺c o ∧ label(o) = label`, evaluated with the term
/// evaluator over the nodes of `t`.
pub fn select_child(t: &Tree, label: &str) -> Result<Path> {
    let mut st = State::new(Signature::with_self(), Default::default());
    st.set(
        crate::structures::Location::self_location(),
        Value::Tree(t.clone()),
    )?;
    let o = Term::var("o");
    let cond = Term::and(alloc::vec![
        Term::builtin(
            crate::structures::Builtin::Child,
            alloc::vec![
                Term::builtin(crate::structures::Builtin::Root, alloc::vec![]),
                o.clone()
            ],
        ),
        Term::eq(
            Term::builtin(crate::structures::Builtin::LabelOf, alloc::vec![o]),
            Term::Const(Value::Label(Label::new(label))),
        ),
    ]);
    let iota = Term::Iota {
        var: "o".into(),
        domain: Domain::Nodes,
        cond: Box::new(cond),
    };
    match Evaluator::new(&st).eval(&iota, &Env::new())? {
        Value::Node(p) => Ok(p),
        _ => Err(err(&Path::root(), format!("no unique {label} child"))),
    }
}

fn check_self_shape(t: &Tree) -> Result<()> {
    if t.label().as_str() != l::SELF {
        return Err(err(
            &Path::root(),
            format!("root is labelled {}", t.label()),
        ));
    }
    Ok(())
}

/// `signature(t)`: the signature-labelled child subtree.
pub fn signature_of_self(t: &Tree) -> Result<Tree> {
    check_self_shape(t)?;
    t.subtree_at(&select_child(t, l::SIGNATURE)?)
}

/// `rule(t)`: the rule encoding under the rule-labelled child.
pub fn rule_of_self(t: &Tree) -> Result<Tree> {
    check_self_shape(t)?;
    let p = select_child(t, l::RULE)?;
    let wrapper = t.at(&p).expect("selected node exists");
    match wrapper.children.as_slice() {
        [_] => t.subtree_at(&p.child(0)),
        other => Err(err(
            &p,
            format!("rule wrapper has {} children", other.len()),
        )),
    }
}

/// The decoded signature of a self tree.
pub fn self_signature(t: &Tree) -> Result<Signature> {
    check_self_shape(t)?;
    let p = child_by_label(t, l::SIGNATURE)?;
    decode_signature_at(t.at(&p).expect("child exists"), &p)
}

/// The decoded signature and rule of a self tree.
pub fn decode_self(t: &Tree) -> Result<(Signature, Rule)> {
    check_self_shape(t)?;
    let kids = &t.root().children;
    let labels: Vec<&str> = kids.iter().map(|c| c.label.as_str()).collect();
    if labels != [l::SIGNATURE, l::RULE] {
        return Err(err(
            &Path::root(),
            format!("self must have signature and rule children, found {labels:?}"),
        ));
    }
    let sig = decode_signature_at(&kids[0], &Path(alloc::vec![0]))?;
    let rule = decode_wrapped(&kids[1], &Path(alloc::vec![1]))?;
    Ok((sig, rule))
}

/// `β` on a decoded rule.
pub fn beta_rule(r: &Rule) -> Vec<Term> {
    let mut out = Vec::new();
    beta_into(r, &mut out);
    out
}

fn applied(target: &Target, args: &[Term]) -> Term {
    match target {
        Target::Symbol(f) => Term::App(f.clone(), args.to_vec()),
        Target::Dynamic(t) => Term::Raise(Box::new(t.clone()), Some(args.to_vec())),
    }
}

fn beta_into(r: &Rule, out: &mut Vec<Term>) {
    match r {
        Rule::Assign {
            target,
            args,
            value,
        } => {
            out.push(value.clone());
            out.extend(args.iter().cloned());
            if let Target::Dynamic(t) = target {
                out.push(t.clone());
            }
        }
        Rule::If {
            cond,
            then,
            otherwise,
        } => {
            out.push(cond.clone());
            beta_into(then, out);
            if let Some(o) = otherwise {
                beta_into(o, out);
            }
        }
        Rule::Par(rules) => rules.iter().for_each(|r| beta_into(r, out)),
        Rule::Let { var, value, body } => {
            out.push(value.clone());
            beta_into(&body.substitute(var, value), out);
        }
        Rule::Partial {
            target,
            op,
            args,
            operands,
        } => {
            out.extend(args.iter().cloned());
            let mut op_args = alloc::vec![applied(target, args)];
            op_args.extend(operands.iter().cloned());
            out.push(Term::Op(op.clone(), op_args));
            if let Target::Dynamic(t) = target {
                out.push(t.clone());
            }
        }
    }
}

/// `β` on a rule encoding.
pub fn beta(t: &Tree) -> Result<Vec<Term>> {
    decode_rule(t).map(|r| beta_rule(&r))
}

/// `β` of a program-valued value: a rule encoding, or the rule inside a
/// self tree. `None` for every other value.
pub fn beta_of_value(v: &Value) -> Option<Result<Vec<Term>>> {
    match v {
        Value::Tree(t) if is_rule_tree(t) => Some(beta(t)),
        Value::Tree(t) if t.label().as_str() == l::SELF => {
            Some(decode_self(t).map(|(_, r)| beta_rule(&r)))
        }
        _ => None,
    }
}

/// Allocates a reserve symbol and the shared update that appends it to the
/// signature subtree of `self`.
pub fn new_function(
    state: &State,
    reserve: &mut Reserve,
    arity: usize,
) -> Result<(String, SharedUpdate)> {
    let tree = state
        .self_tree()
        .ok_or_else(|| Error::State("self holds no tree".into()))?;
    let sig_path = select_child(tree, l::SIGNATURE)?;
    let mut name = reserve.fresh();
    while state.signature().contains(&name) {
        name = reserve.fresh();
    }
    let update = SharedUpdate {
        address: Address::Sub(sig_path),
        op: Operator::RightExtend,
        operands: alloc::vec![Value::Tree(encode_symbol(&FunctionSymbol::new(
            name.clone(),
            arity
        )))],
    };
    Ok((name, update))
}

/// The default self tree: signature with `self` only and an empty rule.
pub fn minimal_self() -> Tree {
    encode_self(&Signature::with_self(), &Rule::skip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Builtin;
    use alloc::vec;

    fn assign(f: &str, args: Vec<Term>, v: Term) -> Rule {
        Rule::assign(f, args, v)
    }

    fn samples() -> Vec<Rule> {
        let c = Term::nullary("c");
        vec![
            assign("card", vec![], Term::constant(0u64)),
            Rule::If {
                cond: Term::eq(c.clone(), Term::constant(1u64)),
                then: Box::new(assign("c", vec![], Term::constant(2u64))),
                otherwise: Some(Box::new(Rule::skip())),
            },
            Rule::If {
                cond: Term::constant(true),
                then: Box::new(Rule::skip()),
                otherwise: None,
            },
            Rule::Par(vec![assign("f", vec![c.clone()], c.clone()), Rule::skip()]),
            Rule::Let {
                var: "x".into(),
                value: Term::builtin(Builtin::Add, vec![c.clone(), Term::constant(1u64)]),
                body: Box::new(assign("f", vec![Term::var("x")], Term::var("x"))),
            },
            Rule::Partial {
                target: Target::Symbol("card".into()),
                op: "+".into(),
                args: vec![],
                operands: vec![Term::constant(1u64)],
            },
            Rule::Assign {
                target: Target::Dynamic(Term::Const(Value::Node(Path(vec![1])))),
                args: vec![],
                value: Term::Const(Value::Tree(Tree::leaf("x", None))),
            },
        ]
    }

    #[test]
    fn rules_round_trip() {
        for r in samples() {
            assert_eq!(decode_rule(&encode_rule(&r)).unwrap(), r, "{r}");
            assert_eq!(raise(&drop_rule(&r)).unwrap(), Reflected::Rule(r));
        }
    }

    #[test]
    fn assign_encoding_shape() {
        let t = encode_rule(&assign("card", vec![], Term::constant(0u64)));
        assert_eq!(
            alloc::format!("{t}"),
            "update<func(SYM(card)), term<>, term<term(0)>>"
        );
    }

    #[test]
    fn empty_par_encodes_to_bare_node() {
        let t = encode_rule(&Rule::skip());
        assert_eq!(t.node_count(), 1);
        assert_eq!(beta(&t).unwrap(), Vec::<Term>::new());
    }

    #[test]
    fn missing_child_reports_path() {
        let bad = Tree::node(
            "par",
            vec![Tree::node(
                "rule",
                vec![Tree::node(
                    "update",
                    vec![term_group(&[]), term_group(&[Term::constant(1u64)])],
                )],
            )],
        );
        match decode_rule(&bad) {
            Err(Error::Reflect { path, .. }) => assert_eq!(path, Path(vec![0, 0])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn beta_equations() {
        let t1 = Term::nullary("a");
        let t0 = Term::nullary("b");
        let upd = assign("f", vec![t1.clone()], t0.clone());
        assert_eq!(beta_rule(&upd), vec![t0.clone(), t1.clone()]);
        let part = Rule::Partial {
            target: Target::Symbol("f".into()),
            op: "+".into(),
            args: vec![t1.clone()],
            operands: vec![t0.clone()],
        };
        assert_eq!(
            beta_rule(&part),
            vec![
                t1.clone(),
                Term::Op(
                    "+".into(),
                    vec![Term::app("f", vec![t1.clone()]), t0.clone()]
                )
            ]
        );
        let let_rule = Rule::Let {
            var: "x".into(),
            value: t1.clone(),
            body: Box::new(assign("f", vec![Term::var("x")], t0.clone())),
        };
        assert_eq!(beta_rule(&let_rule), vec![t1.clone(), t0, t1]);
    }

    #[test]
    fn signature_round_trip_and_selectors() {
        let mut sig = Signature::with_self();
        sig.add(FunctionSymbol::new("index", 2)).unwrap();
        let t = encode_self(&sig, &Rule::skip());
        assert_eq!(
            decode_signature(&signature_of_self(&t).unwrap()).unwrap(),
            sig
        );
        assert_eq!(rule_of_self(&t).unwrap(), encode_rule(&Rule::skip()));
        for label in [l::SIGNATURE, l::RULE] {
            assert_eq!(
                select_child(&t, label).unwrap(),
                child_by_label(&t, label).unwrap()
            );
        }
        let dup = Tree::node(
            l::SIGNATURE,
            vec![
                encode_symbol(&FunctionSymbol::new("f", 0)),
                encode_symbol(&FunctionSymbol::new("f", 1)),
            ],
        );
        assert!(decode_signature(&dup).is_err());
    }

    #[test]
    fn drop_is_identity_on_constants() {
        assert_eq!(drop_term(&Term::constant(5u64)), Value::Nat(5));
        assert_eq!(
            raise(&Value::Nat(5)).unwrap(),
            Reflected::Term(Term::constant(5u64))
        );
        assert!(raise(&Value::label("x")).is_err());
    }

    #[test]
    fn two_allocations_differ() {
        let s = {
            let mut s = State::new(Signature::with_self(), Default::default());
            s.set(
                crate::structures::Location::self_location(),
                Value::Tree(minimal_self()),
            )
            .unwrap();
            s
        };
        let mut r = Reserve::for_state(&s);
        let (a, ua) = new_function(&s, &mut r, 1).unwrap();
        let (b, _) = new_function(&s, &mut r, 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(ua.address, Address::Sub(Path(vec![0])));
    }
}
