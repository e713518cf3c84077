//! Term evaluation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::term::{Builtin, Connective, Domain, LitBody, LitItem, Term, TreeLit};
use super::{Location, State};
use crate::error::{Error, Result};
use crate::rules::Operator;
use crate::treealg::{self, algebra, AlgebraValue, Context, Node, Tree};
use crate::value::{Label, Path, Value};

/// Variable bindings.
pub type Env = BTreeMap<String, Value>;

/// Supplies fresh reserve symbols `f$1`, `f$2`, … during one step.
///
/// The counter starts above every reserve name already in the signature, so
/// the names handed out depend only on the state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reserve {
    next: u64,
}

impl Reserve {
    pub const PREFIX: &'static str = "f$";

    pub fn for_state(state: &State) -> Self {
        let max = state
            .signature()
            .symbols()
            .iter()
            .filter_map(|s| s.name.strip_prefix(Self::PREFIX)?.parse::<u64>().ok())
            .max()
            .unwrap_or(0);
        Reserve { next: max + 1 }
    }

    pub fn fresh(&mut self) -> String {
        let name = format!("{}{}", Self::PREFIX, self.next);
        self.next += 1;
        name
    }
}

/// Evaluates terms in one state, sharing a reserve counter.
pub struct Evaluator<'a> {
    state: &'a State,
    pub reserve: Reserve,
}

/// Evaluates a closed term in a state.
pub fn eval_term(state: &State, term: &Term) -> Result<Value> {
    Evaluator::new(state).eval(term, &Env::new())
}

fn eval_err(msg: impl Into<String>) -> Error {
    Error::Eval(msg.into())
}

fn nat(v: &Value, what: &str) -> Result<u64> {
    v.as_nat()
        .ok_or_else(|| eval_err(format!("{what} expects a natural number, got {v}")))
}

fn set(v: Value, what: &str) -> Result<BTreeSet<Value>> {
    match v {
        Value::Set(s) => Ok(s),
        other => Err(eval_err(format!("{what} expects a set, got {other}"))),
    }
}

fn path(v: &Value, what: &str) -> Result<Path> {
    match v {
        Value::Node(p) => Ok(p.clone()),
        other => Err(eval_err(format!("{what} expects a node, got {other}"))),
    }
}

fn label_value(v: Value, what: &str) -> Result<Label> {
    match v {
        Value::Label(l) => Ok(l),
        Value::Atom(a) => Ok(Label::new(a.0)),
        other => Err(eval_err(format!("{what} expects a label, got {other}"))),
    }
}

fn alg(v: Value, what: &str) -> Result<AlgebraValue> {
    AlgebraValue::from_value(&v)
        .ok_or_else(|| eval_err(format!("{what} expects a tree, hedge or context, got {v}")))
}

fn context(v: Value, what: &str) -> Result<Context> {
    match v {
        Value::Context(c) => Ok(c),
        other => Err(eval_err(format!("{what} expects a context, got {other}"))),
    }
}

fn hedge(items: Vec<Value>, what: &str) -> Result<treealg::Hedge> {
    let items = items
        .into_iter()
        .map(|v| alg(v, what))
        .collect::<Result<Vec<_>>>()?;
    algebra::flatten_hedge(items)
}

fn arity_check(b: Builtin, args: &[Value]) -> Result<()> {
    let ok = match b {
        Builtin::Root => args.is_empty(),
        Builtin::Card
        | Builtin::Subtree
        | Builtin::LabelOf
        | Builtin::ValueOf
        | Builtin::Parent
        | Builtin::PrevSibling
        | Builtin::NextSibling => args.len() == 1,
        Builtin::Add
        | Builtin::Sub
        | Builtin::Mod
        | Builtin::Lt
        | Builtin::Union
        | Builtin::Inter
        | Builtin::Minus
        | Builtin::Member
        | Builtin::Proj
        | Builtin::When
        | Builtin::LabelContext
        | Builtin::LeftExtend
        | Builtin::RightExtend
        | Builtin::Concat
        | Builtin::InjectHedge
        | Builtin::InjectContext
        | Builtin::ContextOf
        | Builtin::Child
        | Builtin::Sibling => args.len() == 2,
        Builtin::LabelHedge => !args.is_empty(),
        Builtin::Select => args.len().is_multiple_of(2),
        Builtin::Tuple | Builtin::SetOf | Builtin::Hedge => true,
    };
    if ok {
        Ok(())
    } else {
        Err(eval_err(format!(
            "{} does not take {} arguments",
            b.name(),
            args.len()
        )))
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(state: &'a State) -> Self {
        Evaluator {
            state,
            reserve: Reserve::for_state(state),
        }
    }

    pub fn state(&self) -> &'a State {
        self.state
    }

    fn self_tree(&self) -> Option<&'a Tree> {
        self.state.self_tree()
    }

    fn eval_all(&mut self, terms: &[Term], env: &Env) -> Result<Vec<Value>> {
        terms.iter().map(|t| self.eval(t, env)).collect()
    }

    pub fn eval(&mut self, term: &Term, env: &Env) -> Result<Value> {
        match term {
            Term::Const(v) => Ok(v.clone()),
            Term::Var(x) => env
                .get(x)
                .cloned()
                .ok_or_else(|| eval_err(format!("unbound variable {x}"))),
            Term::App(f, args) => {
                let args = self.eval_all(args, env)?;
                self.apply(f, args)
            }
            Term::Eq(a, b) => {
                let a = self.eval(a, env)?;
                let b = self.eval(b, env)?;
                Ok(Value::Bool(a == b))
            }
            Term::Bool(c, args) => {
                let vals = self.eval_all(args, env)?;
                if vals.iter().any(Value::is_undef) {
                    return Ok(Value::Undef);
                }
                let bools = vals
                    .iter()
                    .map(|v| {
                        v.as_bool()
                            .ok_or_else(|| eval_err(format!("connective applied to {v}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Value::Bool(match c {
                    Connective::And => bools.iter().all(|b| *b),
                    Connective::Or => bools.iter().any(|b| *b),
                    Connective::Not => match bools.as_slice() {
                        [b] => !b,
                        _ => return Err(eval_err("NOT takes one operand")),
                    },
                }))
            }
            Term::Iota { var, domain, cond } => {
                let mut found = None;
                let mut env = env.clone();
                for candidate in self.domain_values(domain)? {
                    env.insert(var.clone(), candidate.clone());
                    if self.eval(cond, &env)? == Value::Bool(true) {
                        if found.is_some() {
                            return Ok(Value::Undef);
                        }
                        found = Some(candidate);
                    }
                }
                Ok(found.unwrap_or(Value::Undef))
            }
            Term::Domain(d) => Ok(Value::Set(
                self.domain_values(&Domain::Named(d.clone()))?
                    .into_iter()
                    .collect(),
            )),
            Term::Builtin(Builtin::Select, args) => {
                let mut out = BTreeSet::new();
                for pair in args.chunks(2) {
                    let [cond, v] = pair else {
                        return Err(eval_err("select takes condition/value pairs"));
                    };
                    if self.eval(cond, env)? == Value::Bool(true) {
                        out.insert(self.eval(v, env)?);
                    }
                }
                Ok(Value::Set(out))
            }
            Term::Builtin(b, args) => {
                let args = self.eval_all(args, env)?;
                self.builtin(*b, args)
            }
            Term::Raise(t, args) => {
                let v = self.eval(t, env)?;
                let args = match args {
                    Some(a) => Some(self.eval_all(a, env)?),
                    None => None,
                };
                self.raise(v, args, env)
            }
            Term::TreeLit(lit) => match self.tree_lit(lit, env)? {
                Some(node) => {
                    let tree = Tree::from_node(node)?;
                    if tree.preorder().iter().any(|(_, n)| n.label.is_hole()) {
                        Ok(Value::Context(Context::new(tree)?))
                    } else {
                        Ok(Value::Tree(tree))
                    }
                }
                None => Ok(Value::Undef),
            },
            Term::NewFunc => Ok(Value::Symbol(self.reserve.fresh())),
            Term::Op(op, args) => {
                let op = Operator::from_name(op)?;
                let mut args = self.eval_all(args, env)?;
                if args.is_empty() {
                    return Err(eval_err("operator application needs a current value"));
                }
                let current = args.remove(0);
                op.apply(&current, &args)
            }
        }
    }

    /// Applies a signature or derived function symbol to evaluated arguments.
    pub fn apply(&mut self, f: &str, args: Vec<Value>) -> Result<Value> {
        let state = self.state;
        if let Some(d) = state.background().derived.get(f) {
            if d.params.len() != args.len() {
                return Err(Error::Signature(format!(
                    "{f} expects {} arguments, got {}",
                    d.params.len(),
                    args.len()
                )));
            }
            if args.iter().any(Value::is_undef) {
                return Ok(Value::Undef);
            }
            let env: Env = d.params.iter().cloned().zip(args).collect();
            return self.eval(&d.body, &env);
        }
        match state.signature().arity(f) {
            None => Err(Error::Signature(format!("unknown symbol {f}"))),
            Some(n) if n != args.len() => Err(Error::Signature(format!(
                "{f} expects {n} arguments, got {}",
                args.len()
            ))),
            Some(_) if args.iter().any(Value::is_undef) => Ok(Value::Undef),
            Some(_) => Ok(state.get(&Location::new(f, args))),
        }
    }

    fn domain_values(&self, domain: &Domain) -> Result<Vec<Value>> {
        match domain {
            Domain::Named(d) => self
                .state
                .background()
                .domains
                .get(d)
                .cloned()
                .ok_or_else(|| eval_err(format!("unknown domain {d}"))),
            Domain::Nodes => Ok(self
                .self_tree()
                .map(|t| {
                    t.preorder()
                        .into_iter()
                        .map(|(p, _)| Value::Node(p))
                        .collect()
                })
                .unwrap_or_default()),
        }
    }

    fn raise(&mut self, v: Value, args: Option<Vec<Value>>, env: &Env) -> Result<Value> {
        let no_args = args.as_ref().is_none_or(Vec::is_empty);
        match v {
            Value::Symbol(f) => self.apply(&f, args.unwrap_or_default()),
            Value::Undef => Ok(Value::Undef),
            _ if !no_args => Err(eval_err(format!("cannot apply {v} to arguments"))),
            Value::Node(p) => Ok(self
                .self_tree()
                .and_then(|t| t.subtree_at(&p).ok())
                .map(Value::Tree)
                .unwrap_or(Value::Undef)),
            Value::Term(t) => self.eval(&t, env),
            Value::Tree(t) if crate::reflect::is_rule_tree(&t) => {
                Err(eval_err("a raised rule is not a term"))
            }
            other => Ok(other),
        }
    }

    /// `None` when a spliced term is `undef`.
    fn tree_lit(&mut self, lit: &TreeLit, env: &Env) -> Result<Option<Node>> {
        match &lit.body {
            LitBody::Valued(t) => {
                let v = self.eval(t, env)?;
                Ok(Some(Node {
                    label: lit.label.clone(),
                    value: (!v.is_undef()).then_some(v),
                    children: Vec::new(),
                }))
            }
            LitBody::Children(items) => {
                let mut children = Vec::new();
                for item in items {
                    match item {
                        LitItem::Hole => children.push(Context::hole().tree().clone().into_root()),
                        LitItem::Node(sub) => match self.tree_lit(sub, env)? {
                            Some(n) => children.push(n),
                            None => return Ok(None),
                        },
                        LitItem::Splice(t) => match self.eval(t, env)? {
                            Value::Undef => return Ok(None),
                            Value::Tree(t) => children.push(t.into_root()),
                            Value::Hedge(h) => children.extend(h.into_iter().map(Tree::into_root)),
                            Value::Context(c) => children.push(c.tree().clone().into_root()),
                            other => {
                                return Err(eval_err(format!("cannot splice {other} into a tree")))
                            }
                        },
                    }
                }
                Ok(Some(Node {
                    label: lit.label.clone(),
                    value: None,
                    children,
                }))
            }
        }
    }

    fn node_fn(&self, p: &Path, f: impl FnOnce(&Tree) -> Option<Value>) -> Value {
        match self.self_tree() {
            Some(t) if t.contains(p) => f(t).unwrap_or(Value::Undef),
            _ => Value::Undef,
        }
    }

    fn builtin(&mut self, b: Builtin, args: Vec<Value>) -> Result<Value> {
        arity_check(b, &args)?;
        let strict = !matches!(b, Builtin::Tuple | Builtin::SetOf | Builtin::Hedge);
        if strict && args.iter().any(Value::is_undef) {
            return Ok(Value::Undef);
        }
        let name = b.name();
        let mut it = args.into_iter();
        let mut next = || it.next().expect("arity checked");
        Ok(match b {
            Builtin::Add => {
                let (a, c) = (nat(&next(), name)?, nat(&next(), name)?);
                Value::Nat(a.checked_add(c).ok_or_else(|| eval_err("overflow in +"))?)
            }
            Builtin::Sub => {
                let (a, c) = (nat(&next(), name)?, nat(&next(), name)?);
                Value::Nat(a.saturating_sub(c))
            }
            Builtin::Mod => {
                let (a, c) = (nat(&next(), name)?, nat(&next(), name)?);
                if c == 0 {
                    Value::Undef
                } else {
                    Value::Nat(a % c)
                }
            }
            Builtin::Lt => {
                let (a, c) = (nat(&next(), name)?, nat(&next(), name)?);
                Value::Bool(a < c)
            }
            Builtin::Card => match next() {
                Value::Set(s) => Value::Nat(s.len() as u64),
                Value::Tuple(t) => Value::Nat(t.len() as u64),
                Value::Hedge(h) => Value::Nat(h.len() as u64),
                other => return Err(eval_err(format!("CARD of {other}"))),
            },
            Builtin::Union | Builtin::Inter | Builtin::Minus => {
                let a = set(next(), name)?;
                let c = set(next(), name)?;
                Value::Set(match b {
                    Builtin::Union => a.union(&c).cloned().collect(),
                    Builtin::Inter => a.intersection(&c).cloned().collect(),
                    _ => a.difference(&c).cloned().collect(),
                })
            }
            Builtin::Member => {
                let x = next();
                match next() {
                    Value::Set(s) => Value::Bool(s.contains(&x)),
                    Value::Tuple(t) => Value::Bool(t.contains(&x)),
                    other => return Err(eval_err(format!("member of {other}"))),
                }
            }
            Builtin::Tuple => Value::Tuple(it.collect()),
            Builtin::SetOf => Value::Set(it.collect()),
            Builtin::Proj => {
                let t = next();
                let i = nat(&next(), name)?;
                match t {
                    Value::Tuple(items) => (i as usize)
                        .checked_sub(1)
                        .and_then(|i| items.get(i).cloned())
                        .unwrap_or(Value::Undef),
                    other => return Err(eval_err(format!("proj of {other}"))),
                }
            }
            Builtin::When => {
                let c = next();
                let v = next();
                match c {
                    Value::Bool(true) => v,
                    Value::Bool(false) => Value::Undef,
                    other => return Err(eval_err(format!("when condition {other}"))),
                }
            }
            Builtin::Select => unreachable!("select is evaluated lazily"),
            Builtin::LabelHedge => {
                let l = label_value(next(), name)?;
                let items = it.map(|v| alg(v, name)).collect::<Result<Vec<_>>>()?;
                algebra::label_items(l, items)?.into_value()
            }
            Builtin::LabelContext => {
                let l = label_value(next(), name)?;
                Value::Context(treealg::label_context(l, &context(next(), name)?))
            }
            Builtin::LeftExtend | Builtin::RightExtend => {
                let h = hedge(alloc::vec![next()], name)?;
                let target = alg(next(), name)?;
                algebra::extend(target, h, b == Builtin::LeftExtend)?.into_value()
            }
            Builtin::Concat => {
                let a = hedge(alloc::vec![next()], name)?;
                let c = hedge(alloc::vec![next()], name)?;
                Value::Hedge(treealg::concat(&a, &c))
            }
            Builtin::InjectHedge => {
                let c = context(next(), name)?;
                let h = hedge(alloc::vec![next()], name)?;
                Value::Tree(treealg::inject_hedge(&c, h)?)
            }
            Builtin::InjectContext => {
                let c1 = context(next(), name)?;
                let c2 = context(next(), name)?;
                Value::Context(treealg::inject_context(&c1, &c2))
            }
            Builtin::Hedge => {
                let items: Vec<Value> = it.filter(|v| !v.is_undef()).collect();
                Value::Hedge(hedge(items, name)?)
            }
            Builtin::Subtree => {
                let p = path(&next(), name)?;
                self.node_fn(&p, |t| t.subtree_at(&p).ok().map(Value::Tree))
            }
            Builtin::ContextOf => {
                let p1 = path(&next(), name)?;
                let p2 = path(&next(), name)?;
                self.node_fn(&p2, |t| t.context_at(&p1, &p2).ok().map(Value::Context))
            }
            Builtin::LabelOf => {
                let p = path(&next(), name)?;
                self.node_fn(&p, |t| t.at(&p).map(|n| Value::Label(n.label.clone())))
            }
            Builtin::ValueOf => {
                let p = path(&next(), name)?;
                self.node_fn(&p, |t| t.at(&p).and_then(|n| n.value.clone()))
            }
            Builtin::Parent => {
                let p = path(&next(), name)?;
                self.node_fn(&p, |_| p.parent().map(Value::Node))
            }
            Builtin::PrevSibling | Builtin::NextSibling => {
                let p = path(&next(), name)?;
                let prev = b == Builtin::PrevSibling;
                self.node_fn(&p, |t| {
                    let parent = p.parent()?;
                    let i = p.last()?;
                    let j = if prev { i.checked_sub(1)? } else { i + 1 };
                    let q = parent.child(j);
                    t.contains(&q).then_some(Value::Node(q))
                })
            }
            Builtin::Child => {
                let p1 = path(&next(), name)?;
                let p2 = path(&next(), name)?;
                Value::Bool(self.self_tree().is_some_and(|t| t.is_child(&p1, &p2)))
            }
            Builtin::Sibling => {
                let p1 = path(&next(), name)?;
                let p2 = path(&next(), name)?;
                Value::Bool(
                    self.self_tree()
                        .is_some_and(|t| t.is_next_sibling(&p1, &p2)),
                )
            }
            Builtin::Root => match self.self_tree() {
                Some(_) => Value::Node(Path::root()),
                None => Value::Undef,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Background, FunctionSymbol, Signature};
    use alloc::boxed::Box;
    use alloc::vec;

    fn state() -> State {
        let mut sig = Signature::with_self();
        sig.add(FunctionSymbol::new("f", 1)).unwrap();
        sig.add(FunctionSymbol::new("c", 0)).unwrap();
        let mut bg = Background::default();
        bg.domains
            .insert("D".into(), vec![Value::atom("a"), Value::atom("b")]);
        let mut s = State::new(sig, bg);
        s.set(
            Location::new("f", vec![Value::atom("a")]),
            Value::Bool(true),
        )
        .unwrap();
        s.set(Location::nullary("c"), Value::Nat(3)).unwrap();
        s
    }

    #[test]
    fn application_is_strict() {
        let s = state();
        let t = Term::app(
            "f",
            vec![Term::app("f", vec![Term::constant(Value::atom("b"))])],
        );
        assert_eq!(eval_term(&s, &t).unwrap(), Value::Undef);
        let t = Term::builtin(
            Builtin::Add,
            vec![Term::nullary("c"), Term::Const(Value::Undef)],
        );
        assert_eq!(eval_term(&s, &t).unwrap(), Value::Undef);
    }

    #[test]
    fn equality_is_not_strict() {
        let s = state();
        let t = Term::eq(Term::Const(Value::Undef), Term::Const(Value::Undef));
        assert_eq!(eval_term(&s, &t).unwrap(), Value::Bool(true));
    }

    #[test]
    fn connectives_propagate_undef() {
        let s = state();
        let t = Term::and(vec![Term::constant(false), Term::Const(Value::Undef)]);
        assert_eq!(eval_term(&s, &t).unwrap(), Value::Undef);
    }

    #[test]
    fn iota_needs_a_unique_witness() {
        let s = state();
        let unique = Term::Iota {
            var: "x".into(),
            domain: Domain::Named("D".into()),
            cond: Box::new(Term::eq(
                Term::app("f", vec![Term::var("x")]),
                Term::constant(true),
            )),
        };
        assert_eq!(eval_term(&s, &unique).unwrap(), Value::atom("a"));
        let many = Term::Iota {
            var: "x".into(),
            domain: Domain::Named("D".into()),
            cond: Box::new(Term::constant(true)),
        };
        assert_eq!(eval_term(&s, &many).unwrap(), Value::Undef);
    }

    #[test]
    fn unknown_symbol_is_a_signature_error() {
        let s = state();
        assert!(matches!(
            eval_term(&s, &Term::nullary("nope")),
            Err(Error::Signature(_))
        ));
        assert!(matches!(
            eval_term(&s, &Term::app("f", vec![])),
            Err(Error::Signature(_))
        ));
    }

    #[test]
    fn fresh_names_skip_existing_reserve_symbols() {
        let mut s = state();
        let mut sig = s.signature().clone();
        sig.add(FunctionSymbol::new("f$4", 0)).unwrap();
        s.set_signature(sig);
        let mut r = Reserve::for_state(&s);
        assert_eq!(r.fresh(), "f$5");
        assert_eq!(r.fresh(), "f$6");
    }
}
