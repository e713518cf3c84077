//! Seeded random trees, terms, rules and states for property tests and
//! probes.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rsasm_core::reflect::{encode_self, labels};
use rsasm_core::rules::{Rule, Target};
use rsasm_core::structures::{
    Background, Builtin, Connective, Domain, FunctionSymbol, LitBody, LitItem, Location, Signature,
    State, Term, TreeLit,
};
use rsasm_core::treealg::{Context, Hedge, Tree};
use rsasm_core::{Label, Path, Value};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LABELS: [&str; 5] = ["la", "lb", "lc", "ld", "le"];
pub const ATOMS: [&str; 5] = ["a0", "a1", "a2", "a3", "a4"];

fn leaf_value(rng: &mut impl Rng) -> Option<Value> {
    match rng.gen_range(0..4) {
        0 => None,
        1 => Some(Value::atom(*ATOMS.choose(rng).expect("nonempty"))),
        _ => Some(Value::Nat(rng.gen_range(0..5))),
    }
}

/// A random tree with at most `max_nodes` nodes.
pub fn tree(rng: &mut impl Rng, max_nodes: usize) -> Tree {
    let target = rng.gen_range(1..=max_nodes.max(1));
    let mut budget = target - 1;
    grow(rng, &mut budget)
}

fn grow(rng: &mut impl Rng, budget: &mut usize) -> Tree {
    let label = *LABELS.choose(rng).expect("nonempty");
    if *budget == 0 || rng.gen_bool(0.3) {
        return Tree::leaf(label, leaf_value(rng));
    }
    let k = rng.gen_range(1..=(*budget).min(4));
    let mut kids = Vec::new();
    for _ in 0..k {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        kids.push(grow(rng, budget));
    }
    Tree::node(label, kids)
}

pub fn hedge(rng: &mut impl Rng, max_nodes: usize) -> Hedge {
    let k = rng.gen_range(0..=3);
    (0..k).map(|_| tree(rng, (max_nodes / 3).max(1))).collect()
}

/// A random node path of `t`.
pub fn node_of(rng: &mut impl Rng, t: &Tree) -> Path {
    let nodes = t.preorder();
    nodes[rng.gen_range(0..nodes.len())].0.clone()
}

/// A random context: a random tree with one node replaced by the hole.
pub fn context(rng: &mut impl Rng, max_nodes: usize) -> Context {
    let t = tree(rng, max_nodes);
    let p = node_of(rng, &t);
    t.subst_tc_at(&p).expect("path of the tree")
}

/// Names used by generated programs.
pub mod names {
    /// Nullary, natural-number valued.
    pub const NATS: [&str; 2] = ["c", "d"];
    /// Unary over atoms, natural-number valued.
    pub const F: &str = "f";
    /// Unary over atoms, boolean valued.
    pub const H: &str = "h";
    /// Binary over atoms and naturals, natural-number valued.
    pub const G: &str = "g";
    pub const DOMAIN: &str = "D";
}

/// `self`, two nullary counters, `f/1`, `h/1` and `g/2`.
pub fn signature() -> Signature {
    let mut s = Signature::with_self();
    for c in names::NATS {
        s.add(FunctionSymbol::new(c, 0)).expect("fresh");
    }
    s.add(FunctionSymbol::new(names::F, 1)).expect("fresh");
    s.add(FunctionSymbol::new(names::H, 1)).expect("fresh");
    s.add(FunctionSymbol::new(names::G, 2)).expect("fresh");
    s
}

pub fn background() -> Background {
    let mut bg = Background::default();
    bg.domains.insert(
        names::DOMAIN.into(),
        ATOMS[..3].iter().map(|a| Value::atom(*a)).collect(),
    );
    bg
}

fn atom_const(rng: &mut impl Rng) -> Term {
    Term::Const(Value::atom(*ATOMS.choose(rng).expect("nonempty")))
}

/// Terms that evaluate without errors when locations hold values of the
/// types fixed by [`signature`].
pub struct Typed<'a> {
    pub vars: &'a [String],
}

impl Typed<'_> {
    pub fn nat(&self, rng: &mut impl Rng, depth: usize) -> Term {
        let leafy = depth == 0 || rng.gen_bool(0.4);
        if leafy {
            return match rng.gen_range(0..4) {
                0 if !self.vars.is_empty() => Term::var(self.vars.choose(rng).expect("nonempty")),
                0 | 1 => Term::Const(Value::Nat(rng.gen_range(0..4))),
                _ => Term::nullary(*names::NATS.choose(rng).expect("nonempty")),
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..6) {
            0 => Term::app(names::F, vec![self.atom(rng, d)]),
            1 => Term::app(names::G, vec![self.atom(rng, d), self.nat(rng, d)]),
            2 => Term::builtin(Builtin::Add, vec![self.nat(rng, d), self.nat(rng, d)]),
            3 => Term::builtin(Builtin::Mod, vec![self.nat(rng, d), self.nat(rng, d)]),
            4 => Term::builtin(Builtin::When, vec![self.boolean(rng, d), self.nat(rng, d)]),
            _ => Term::builtin(
                Builtin::Card,
                vec![Term::builtin(
                    Builtin::Select,
                    ATOMS[..3]
                        .iter()
                        .flat_map(|a| {
                            let x = Term::Const(Value::atom(*a));
                            [Term::app(names::H, vec![x.clone()]), x]
                        })
                        .collect(),
                )],
            ),
        }
    }

    pub fn atom(&self, rng: &mut impl Rng, depth: usize) -> Term {
        let x = "y".to_string();
        if depth == 0 || rng.gen_bool(0.7) || self.vars.contains(&x) {
            return atom_const(rng);
        }
        let mut vars = self.vars.to_vec();
        vars.push(x.clone());
        let cond = Term::eq(
            Term::app(names::F, vec![Term::var(&x)]),
            Typed { vars: &vars }.nat(rng, depth - 1),
        );
        Term::Iota {
            var: x,
            domain: Domain::Named(names::DOMAIN.into()),
            cond: Box::new(cond),
        }
    }

    pub fn boolean(&self, rng: &mut impl Rng, depth: usize) -> Term {
        if depth == 0 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..3) {
                0 => Term::Const(Value::Bool(rng.gen())),
                _ => Term::eq(self.nat(rng, 0), self.nat(rng, 0)),
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..6) {
            0 => Term::app(names::H, vec![self.atom(rng, d)]),
            1 => Term::eq(self.nat(rng, d), self.nat(rng, d)),
            2 => Term::builtin(Builtin::Lt, vec![self.nat(rng, d), self.nat(rng, d)]),
            3 => Term::negate(self.boolean(rng, d)),
            4 => Term::Bool(
                Connective::Or,
                vec![self.boolean(rng, d), self.boolean(rng, d)],
            ),
            _ => Term::and(vec![self.boolean(rng, d), self.boolean(rng, d)]),
        }
    }

    /// A boolean that is never `undef`.
    pub fn guard(&self, rng: &mut impl Rng, depth: usize) -> Term {
        Term::eq(self.boolean(rng, depth), Term::Const(Value::Bool(true)))
    }
}

/// `IOTA o IN NODES . child(root(), o) AND label_of(o) = #signature`.
pub fn signature_node() -> Term {
    let o = Term::var("o");
    Term::Iota {
        var: "o".into(),
        domain: Domain::Nodes,
        cond: Box::new(Term::and(vec![
            Term::builtin(
                Builtin::Child,
                vec![Term::builtin(Builtin::Root, vec![]), o.clone()],
            ),
            Term::eq(
                Term::builtin(Builtin::LabelOf, vec![o]),
                Term::Const(Value::label(labels::SIGNATURE)),
            ),
        ])),
    }
}

fn lit(label: &str, body: LitBody) -> Term {
    Term::TreeLit(TreeLit {
        label: Label::new(label),
        body,
    })
}

fn lit_leaf(label: &str, t: Term) -> LitItem {
    LitItem::Node(TreeLit {
        label: Label::new(label),
        body: LitBody::Valued(Box::new(t)),
    })
}

/// `LET v = NEWFUNC IN signature <=[right_extend] func<name(v), arity(1)>`.
pub fn new_function_rule() -> Rule {
    Rule::Let {
        var: "v".into(),
        value: Term::NewFunc,
        body: Box::new(Rule::Partial {
            target: Target::Dynamic(signature_node()),
            op: "right_extend".into(),
            args: vec![],
            operands: vec![lit(
                labels::FUNC,
                LitBody::Children(vec![
                    lit_leaf(labels::NAME, Term::var("v")),
                    lit_leaf(labels::ARITY, Term::Const(Value::Nat(1))),
                ]),
            )],
        }),
    }
}

/// Appends `c <=[+] 1` to the program's top-level `PAR`, when it is one.
pub fn self_append_rule() -> Rule {
    let o = Term::var("p");
    let top_par = Term::Iota {
        var: "p".into(),
        domain: Domain::Nodes,
        cond: Box::new(Term::and(vec![
            Term::eq(
                Term::builtin(Builtin::LabelOf, vec![o.clone()]),
                Term::Const(Value::label(labels::PAR)),
            ),
            Term::eq(
                Term::builtin(Builtin::Parent, vec![o]),
                Term::Const(Value::Node(Path(vec![1]))),
            ),
        ])),
    };
    let partial = LitItem::Node(TreeLit {
        label: Label::new(labels::PARTIAL),
        body: LitBody::Children(vec![
            lit_leaf(labels::FUNC, Term::Const(Value::symbol(names::NATS[0]))),
            lit_leaf(labels::FUNC, Term::Const(Value::symbol("+"))),
            LitItem::Node(TreeLit {
                label: Label::new(labels::TERM),
                body: LitBody::Children(vec![]),
            }),
            LitItem::Node(TreeLit {
                label: Label::new(labels::TERM),
                body: LitBody::Children(vec![lit_leaf(labels::TERM, Term::Const(Value::Nat(1)))]),
            }),
        ]),
    });
    Rule::Partial {
        target: Target::Dynamic(top_par),
        op: "right_extend".into(),
        args: vec![],
        operands: vec![lit(labels::RULE, LitBody::Children(vec![partial]))],
    }
}

/// A random rule over [`signature`] whose terms are well typed.
pub fn typed_rule(rng: &mut impl Rng, depth: usize) -> Rule {
    typed_rule_in(rng, depth, &mut Vec::new())
}

fn typed_rule_in(rng: &mut impl Rng, depth: usize, vars: &mut Vec<String>) -> Rule {
    let t = Typed { vars };
    let leafy = depth == 0 || rng.gen_bool(0.35);
    if leafy {
        return match rng.gen_range(0..7) {
            0 => Rule::assign(
                *names::NATS.choose(rng).expect("nonempty"),
                vec![],
                t.nat(rng, 2),
            ),
            1 => Rule::assign(names::F, vec![t.atom(rng, 1)], t.nat(rng, 2)),
            2 => Rule::assign(names::H, vec![t.atom(rng, 1)], t.boolean(rng, 2)),
            3 => Rule::assign(names::G, vec![t.atom(rng, 1), t.nat(rng, 1)], t.nat(rng, 2)),
            4 => Rule::Partial {
                target: Target::Symbol((*names::NATS.choose(rng).expect("nonempty")).into()),
                op: "+".into(),
                args: vec![],
                operands: (0..rng.gen_range(1..=2)).map(|_| t.nat(rng, 1)).collect(),
            },
            5 => Rule::Partial {
                target: Target::Symbol(names::F.into()),
                op: "+".into(),
                args: vec![t.atom(rng, 1)],
                operands: vec![t.nat(rng, 1)],
            },
            _ => Rule::Assign {
                target: Target::Dynamic(Term::Const(Value::symbol(
                    *names::NATS.choose(rng).expect("nonempty"),
                ))),
                args: vec![],
                value: t.nat(rng, 1),
            },
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => Rule::If {
            cond: t.guard(rng, 2),
            then: Box::new(typed_rule_in(rng, d, vars)),
            otherwise: if rng.gen() {
                Some(Box::new(typed_rule_in(rng, d, vars)))
            } else {
                None
            },
        },
        1 => {
            let x = format!("x{}", vars.len());
            let value = t.nat(rng, 2);
            vars.push(x.clone());
            let body = typed_rule_in(rng, d, vars);
            vars.pop();
            Rule::Let {
                var: x,
                value,
                body: Box::new(body),
            }
        }
        _ => Rule::Par(
            (0..rng.gen_range(1..=3))
                .map(|_| typed_rule_in(rng, d, vars))
                .collect(),
        ),
    }
}

/// A program for probes: a typed rule, sometimes wrapped in a `PAR` with
/// a signature extension or a rule that appends to its own `PAR`.
pub fn probe_rule(rng: &mut impl Rng) -> Rule {
    let core = typed_rule(rng, 3);
    match rng.gen_range(0..5) {
        0 => Rule::Par(vec![core, new_function_rule()]),
        1 => Rule::Par(vec![core, self_append_rule()]),
        _ => core,
    }
}

fn random_nat_or_undef(rng: &mut impl Rng) -> Value {
    if rng.gen_bool(0.15) {
        Value::Undef
    } else {
        Value::Nat(rng.gen_range(0..4))
    }
}

/// Every location a probe program can touch over the three domain atoms
/// and small naturals.
pub fn probe_locations() -> Vec<Location> {
    let mut out: Vec<Location> = names::NATS.iter().map(|c| Location::nullary(*c)).collect();
    for a in ATOMS {
        out.push(Location::new(names::F, vec![Value::atom(a)]));
        out.push(Location::new(names::H, vec![Value::atom(a)]));
        for k in 0..4 {
            out.push(Location::new(names::G, vec![Value::atom(a), Value::Nat(k)]));
        }
    }
    out
}

/// A random value of the type its location expects.
pub fn value_for(rng: &mut impl Rng, loc: &Location) -> Value {
    if loc.symbol == names::H {
        match rng.gen_range(0..5) {
            0 => Value::Undef,
            _ => Value::Bool(rng.gen()),
        }
    } else {
        random_nat_or_undef(rng)
    }
}

/// A state over [`signature`] with random values and `rule` in `self`.
pub fn probe_state(rng: &mut impl Rng, rule: &Rule) -> State {
    let sig = signature();
    let mut s = State::new(sig.clone(), background());
    for loc in probe_locations() {
        let v = value_for(rng, &loc);
        s.set(loc, v).expect("location in the signature");
    }
    s.set(
        Location::self_location(),
        Value::Tree(encode_self(&sig, rule)),
    )
    .expect("self is nullary");
    s
}

/// A term of any shape, for reflection and printing round trips. Only
/// `vars` occur as variables.
pub fn any_term(rng: &mut impl Rng, depth: usize, vars: &[String]) -> Term {
    let t = Typed { vars };
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..9) {
            0 => Term::Const(Value::Nat(rng.gen_range(0..9))),
            1 => atom_const(rng),
            2 => Term::Const(Value::Bool(rng.gen())),
            3 => Term::Const(Value::label(*LABELS.choose(rng).expect("nonempty"))),
            4 => Term::Const(Value::symbol(*names::NATS.choose(rng).expect("nonempty"))),
            5 => Term::Const(Value::Node(Path(
                (0..rng.gen_range(0..3))
                    .map(|_| rng.gen_range(0..3))
                    .collect(),
            ))),
            6 => Term::Const(Value::Undef),
            7 if !vars.is_empty() => Term::var(vars.choose(rng).expect("nonempty")),
            _ => t.nat(rng, 0),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..12) {
        0 => t.nat(rng, d),
        1 => t.boolean(rng, d),
        2 => t.atom(rng, d),
        3 => Term::Const(rsasm_core::reflect::drop_term(&t.nat(rng, d))),
        4 => Term::Raise(
            Box::new(Term::Const(Value::symbol(names::F))),
            Some(vec![any_term(rng, d, vars)]),
        ),
        5 => Term::Raise(Box::new(any_term(rng, d, vars)), None),
        6 => Term::Op(
            "+".into(),
            vec![any_term(rng, d, vars), any_term(rng, d, vars)],
        ),
        7 => Term::NewFunc,
        8 => Term::TreeLit(TreeLit {
            label: Label::new(*LABELS.choose(rng).expect("nonempty")),
            body: LitBody::Children(
                (0..rng.gen_range(0..3))
                    .map(|_| match rng.gen_range(0..3) {
                        0 => LitItem::Splice(any_term(rng, d, vars)),
                        1 => lit_leaf(
                            LABELS.choose(rng).expect("nonempty"),
                            any_term(rng, d, vars),
                        ),
                        _ => LitItem::Node(TreeLit {
                            label: Label::new(*LABELS.choose(rng).expect("nonempty")),
                            body: LitBody::Children(vec![]),
                        }),
                    })
                    .collect(),
            ),
        }),
        9 => Term::builtin(
            Builtin::SetOf,
            (0..rng.gen_range(0..3))
                .map(|_| any_term(rng, d, vars))
                .collect(),
        ),
        10 => Term::builtin(
            Builtin::Tuple,
            (0..rng.gen_range(0..3))
                .map(|_| any_term(rng, d, vars))
                .collect(),
        ),
        _ => Term::eq(any_term(rng, d, vars), any_term(rng, d, vars)),
    }
}

/// A rule of any shape over [`signature`], including dynamic targets.
pub fn any_rule(rng: &mut impl Rng, depth: usize) -> Rule {
    any_rule_in(rng, depth, &mut Vec::new())
}

fn any_target(rng: &mut impl Rng, vars: &[String]) -> (Target, usize) {
    match rng.gen_range(0..5) {
        0 => (Target::Symbol(names::F.into()), 1),
        1 => (Target::Symbol(names::G.into()), 2),
        2 => (Target::Dynamic(Term::Const(Value::symbol(names::F))), 1),
        3 => (Target::Dynamic(any_term(rng, 1, vars)), 0),
        _ => (
            Target::Symbol((*names::NATS.choose(rng).expect("nonempty")).into()),
            0,
        ),
    }
}

fn any_rule_in(rng: &mut impl Rng, depth: usize, vars: &mut Vec<String>) -> Rule {
    if depth == 0 || rng.gen_bool(0.3) {
        let (target, n) = any_target(rng, vars);
        let args = (0..n).map(|_| any_term(rng, 2, vars)).collect();
        return if rng.gen_bool(0.6) {
            Rule::Assign {
                target,
                args,
                value: any_term(rng, 3, vars),
            }
        } else {
            let ops = ["+", "union", "right_extend", "left_extend"];
            Rule::Partial {
                target,
                op: (*ops.choose(rng).expect("nonempty")).into(),
                args,
                operands: (0..rng.gen_range(1..3))
                    .map(|_| any_term(rng, 2, vars))
                    .collect(),
            }
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..4) {
        0 => Rule::If {
            cond: any_term(rng, 2, vars),
            then: Box::new(any_rule_in(rng, d, vars)),
            otherwise: if rng.gen() {
                Some(Box::new(any_rule_in(rng, d, vars)))
            } else {
                None
            },
        },
        1 => {
            let x = format!("x{}", vars.len());
            let value = any_term(rng, 2, vars);
            vars.push(x.clone());
            let body = any_rule_in(rng, d, vars);
            vars.pop();
            Rule::Let {
                var: x,
                value,
                body: Box::new(body),
            }
        }
        _ => Rule::Par(
            (0..rng.gen_range(0..4))
                .map(|_| any_rule_in(rng, d, vars))
                .collect(),
        ),
    }
}

/// A random extension of [`signature`] by reserve-style symbols.
pub fn any_signature(rng: &mut impl Rng) -> Signature {
    let mut s = signature();
    for i in 0..rng.gen_range(0..4) {
        s.add(FunctionSymbol::new(format!("k{i}"), rng.gen_range(0..4)))
            .expect("fresh");
    }
    s
}

/// A self tree encoding a random signature and rule.
pub fn self_tree(rng: &mut impl Rng) -> Tree {
    let sig = any_signature(rng);
    let depth = rng.gen_range(0..4);
    encode_self(&sig, &any_rule(rng, depth))
}
