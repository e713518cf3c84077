//! Ground and open terms over a signature, the background functions and the
//! tree algebra.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::value::{write_list, Atom, Label, Value};

/// Finite search domain of an `IOTA` term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Domain {
    /// A finite domain declared in the background.
    Named(String),
    /// The node set of the tree stored at `self`.
    Nodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Connective {
    And,
    Or,
    Not,
}

/// Functions of the background class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Builtin {
    Add,
    Sub,
    Mod,
    Lt,
    Card,
    Union,
    Inter,
    Minus,
    Member,
    Tuple,
    Proj,
    SetOf,
    /// `when(c, v)` is `v` if `c` holds and `undef` otherwise.
    When,
    /// `select(c1, v1, …)`: the set of `vi` whose `ci` is true. Bounded
    /// comprehensions expand to this at parse time.
    Select,
    LabelHedge,
    LabelContext,
    LeftExtend,
    RightExtend,
    Concat,
    InjectHedge,
    InjectContext,
    Hedge,
    Subtree,
    ContextOf,
    LabelOf,
    ValueOf,
    Parent,
    PrevSibling,
    NextSibling,
    Child,
    Sibling,
    Root,
}

impl Builtin {
    pub const ALL: [Builtin; 32] = [
        Builtin::Add,
        Builtin::Sub,
        Builtin::Mod,
        Builtin::Lt,
        Builtin::Card,
        Builtin::Union,
        Builtin::Inter,
        Builtin::Minus,
        Builtin::Member,
        Builtin::Tuple,
        Builtin::Proj,
        Builtin::SetOf,
        Builtin::When,
        Builtin::Select,
        Builtin::LabelHedge,
        Builtin::LabelContext,
        Builtin::LeftExtend,
        Builtin::RightExtend,
        Builtin::Concat,
        Builtin::InjectHedge,
        Builtin::InjectContext,
        Builtin::Hedge,
        Builtin::Subtree,
        Builtin::ContextOf,
        Builtin::LabelOf,
        Builtin::ValueOf,
        Builtin::Parent,
        Builtin::PrevSibling,
        Builtin::NextSibling,
        Builtin::Child,
        Builtin::Sibling,
        Builtin::Root,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Add => "add",
            Builtin::Sub => "sub",
            Builtin::Mod => "mod",
            Builtin::Lt => "lt",
            Builtin::Card => "CARD",
            Builtin::Union => "union",
            Builtin::Inter => "inter",
            Builtin::Minus => "minus",
            Builtin::Member => "member",
            Builtin::Tuple => "tuple",
            Builtin::Proj => "proj",
            Builtin::SetOf => "set",
            Builtin::When => "when",
            Builtin::Select => "select",
            Builtin::LabelHedge => "label_hedge",
            Builtin::LabelContext => "label_context",
            Builtin::LeftExtend => "left_extend",
            Builtin::RightExtend => "right_extend",
            Builtin::Concat => "concat",
            Builtin::InjectHedge => "inject_hedge",
            Builtin::InjectContext => "inject_context",
            Builtin::Hedge => "hedge",
            Builtin::Subtree => "subtree",
            Builtin::ContextOf => "context",
            Builtin::LabelOf => "label_of",
            Builtin::ValueOf => "value_of",
            Builtin::Parent => "parent",
            Builtin::PrevSibling => "prev_sibling",
            Builtin::NextSibling => "next_sibling",
            Builtin::Child => "child",
            Builtin::Sibling => "sibling",
            Builtin::Root => "root",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }

    fn infix(self) -> Option<&'static str> {
        match self {
            Builtin::Add => Some("+"),
            Builtin::Sub => Some("-"),
            Builtin::Mod => Some("MOD"),
            _ => None,
        }
    }
}

/// Child of a tree literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LitItem {
    Node(TreeLit),
    Hole,
    /// A term whose tree, hedge or context value is spliced in.
    Splice(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LitBody {
    /// `label(term)`: a leaf carrying the term's value.
    Valued(Box<Term>),
    /// `label<…>`.
    Children(Vec<LitItem>),
}

/// Tree literal `label<…>` / `label(value)` evaluated to a tree or context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeLit {
    pub label: Label,
    pub body: LitBody,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Term {
    Const(Value),
    Var(String),
    /// Application of a signature (or derived) function symbol.
    App(String, Vec<Term>),
    Eq(Box<Term>, Box<Term>),
    Bool(Connective, Vec<Term>),
    Iota {
        var: String,
        domain: Domain,
        cond: Box<Term>,
    },
    /// The value set of a declared domain.
    Domain(String),
    Builtin(Builtin, Vec<Term>),
    /// `raise` of a value: a symbol applied to arguments, a sublocation, or
    /// a dropped term evaluated in place.
    Raise(Box<Term>, Option<Vec<Term>>),
    TreeLit(TreeLit),
    /// A fresh reserve function symbol.
    NewFunc,
    /// A shared-update operator applied to a location value and operands.
    Op(String, Vec<Term>),
}

impl Term {
    pub fn constant(v: impl Into<Value>) -> Term {
        Term::Const(v.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(f: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(f.into(), args)
    }

    pub fn nullary(f: impl Into<String>) -> Term {
        Term::App(f.into(), Vec::new())
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::Eq(Box::new(a), Box::new(b))
    }

    pub fn and(items: Vec<Term>) -> Term {
        Term::Bool(Connective::And, items)
    }

    pub fn negate(t: Term) -> Term {
        Term::Bool(Connective::Not, alloc::vec![t])
    }

    pub fn builtin(b: Builtin, args: Vec<Term>) -> Term {
        Term::Builtin(b, args)
    }

    /// Direct subterms (tree literal items included).
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        match self {
            Term::Const(_) | Term::Var(_) | Term::Domain(_) | Term::NewFunc => {}
            Term::App(_, args)
            | Term::Bool(_, args)
            | Term::Builtin(_, args)
            | Term::Op(_, args) => out.extend(args.iter()),
            Term::Eq(a, b) => {
                out.push(a);
                out.push(b);
            }
            Term::Iota { cond, .. } => out.push(cond),
            Term::Raise(t, args) => {
                out.push(t);
                if let Some(args) = args {
                    out.extend(args.iter());
                }
            }
            Term::TreeLit(lit) => lit.subterms(&mut out),
        }
        out
    }

    /// Replaces free occurrences of `var` by `by`.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        let sub = |t: &Term| t.substitute(var, by);
        let subs = |ts: &[Term]| ts.iter().map(sub).collect::<Vec<_>>();
        match self {
            Term::Var(x) if x == var => by.clone(),
            Term::Const(_) | Term::Var(_) | Term::Domain(_) | Term::NewFunc => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), subs(args)),
            Term::Eq(a, b) => Term::eq(sub(a), sub(b)),
            Term::Bool(c, args) => Term::Bool(*c, subs(args)),
            Term::Iota { var: x, .. } if x == var => self.clone(),
            Term::Iota {
                var: x,
                domain,
                cond,
            } => Term::Iota {
                var: x.clone(),
                domain: domain.clone(),
                cond: Box::new(sub(cond)),
            },
            Term::Builtin(b, args) => Term::Builtin(*b, subs(args)),
            Term::Op(op, args) => Term::Op(op.clone(), subs(args)),
            Term::Raise(t, args) => Term::Raise(Box::new(sub(t)), args.as_ref().map(|a| subs(a))),
            Term::TreeLit(lit) => Term::TreeLit(lit.substitute(var, by)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Iota { var, cond, .. } => {
                bound.push(var.clone());
                cond.collect_free(bound, out);
                bound.pop();
            }
            other => other
                .subterms()
                .into_iter()
                .for_each(|t| t.collect_free(bound, out)),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Function symbols applied anywhere in the term, with argument counts.
    pub fn symbols(&self, out: &mut Vec<(String, usize)>) {
        if let Term::App(f, args) = self {
            out.push((f.clone(), args.len()));
        }
        self.subterms().into_iter().for_each(|t| t.symbols(out));
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Term {
        let maps = |ts: &[Term]| ts.iter().map(|t| t.map_atoms(f)).collect::<Vec<_>>();
        match self {
            Term::Const(v) => Term::Const(v.map_atoms(f)),
            Term::Var(_) | Term::Domain(_) | Term::NewFunc => self.clone(),
            Term::App(g, args) => Term::App(g.clone(), maps(args)),
            Term::Eq(a, b) => Term::eq(a.map_atoms(f), b.map_atoms(f)),
            Term::Bool(c, args) => Term::Bool(*c, maps(args)),
            Term::Iota { var, domain, cond } => Term::Iota {
                var: var.clone(),
                domain: domain.clone(),
                cond: Box::new(cond.map_atoms(f)),
            },
            Term::Builtin(b, args) => Term::Builtin(*b, maps(args)),
            Term::Op(op, args) => Term::Op(op.clone(), maps(args)),
            Term::Raise(t, args) => {
                Term::Raise(Box::new(t.map_atoms(f)), args.as_ref().map(|a| maps(a)))
            }
            Term::TreeLit(lit) => Term::TreeLit(lit.map_atoms(f)),
        }
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Term::Const(v) => v.collect_atoms(out),
            Term::TreeLit(lit) => {
                let mut ts = Vec::new();
                lit.subterms(&mut ts);
                ts.into_iter().for_each(|t| t.collect_atoms(out));
            }
            other => other
                .subterms()
                .into_iter()
                .for_each(|t| t.collect_atoms(out)),
        }
    }
}

impl TreeLit {
    fn subterms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match &self.body {
            LitBody::Valued(t) => out.push(t),
            LitBody::Children(items) => {
                for item in items {
                    match item {
                        LitItem::Node(lit) => lit.subterms(out),
                        LitItem::Hole => {}
                        LitItem::Splice(t) => out.push(t),
                    }
                }
            }
        }
    }

    fn map_body(&self, f: &mut impl FnMut(&Term) -> Term) -> TreeLit {
        let body = match &self.body {
            LitBody::Valued(t) => LitBody::Valued(Box::new(f(t))),
            LitBody::Children(items) => LitBody::Children(
                items
                    .iter()
                    .map(|item| match item {
                        LitItem::Node(lit) => LitItem::Node(lit.map_body(f)),
                        LitItem::Hole => LitItem::Hole,
                        LitItem::Splice(t) => LitItem::Splice(f(t)),
                    })
                    .collect(),
            ),
        };
        TreeLit {
            label: self.label.clone(),
            body,
        }
    }

    fn substitute(&self, var: &str, by: &Term) -> TreeLit {
        self.map_body(&mut |t| t.substitute(var, by))
    }

    fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> TreeLit {
        self.map_body(&mut |t| t.map_atoms(f))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Named(d) => f.write_str(d),
            Domain::Nodes => f.write_str("NODES"),
        }
    }
}

impl fmt::Display for TreeLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.body {
            LitBody::Valued(t) => write!(f, "{}({t})", self.label),
            LitBody::Children(items) => {
                write!(f, "{}<", self.label)?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match item {
                        LitItem::Node(lit) => write!(f, "{lit}")?,
                        LitItem::Hole => f.write_str("XI")?,
                        LitItem::Splice(t) => write!(f, "({t})")?,
                    }
                }
                f.write_str(">")
            }
        }
    }
}

/// Prints a term inside `DROP(…)`, where a bare nullary symbol would read as
/// the symbol itself rather than its application.
pub(crate) fn fmt_dropped(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::App(g, args) if args.is_empty() => write!(f, "{g}()"),
        other => write!(f, "{other}"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(v) => write!(f, "{v}"),
            Term::Var(x) => f.write_str(x),
            Term::App(g, args) if args.is_empty() => f.write_str(g),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                write_list(f, args.iter())?;
                f.write_str(")")
            }
            Term::Eq(a, b) => write!(f, "({a} = {b})"),
            Term::Bool(Connective::Not, args) => match args.first() {
                Some(t) => write!(f, "(NOT ({t}))"),
                None => f.write_str("(NOT ())"),
            },
            Term::Bool(c, args) => {
                let op = if *c == Connective::And {
                    " AND "
                } else {
                    " OR "
                };
                f.write_str("(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Term::Iota { var, domain, cond } => {
                write!(f, "(IOTA {var} IN {domain} . {cond})")
            }
            Term::Domain(d) => f.write_str(d),
            Term::Builtin(Builtin::SetOf, args) => {
                f.write_str("{")?;
                write_list(f, args.iter())?;
                f.write_str("}")
            }
            Term::Builtin(b, args) => match (b.infix(), args.as_slice()) {
                (Some(op), [l, r]) => write!(f, "({l} {op} {r})"),
                _ => {
                    write!(f, "{}(", b.name())?;
                    write_list(f, args.iter())?;
                    f.write_str(")")
                }
            },
            Term::Raise(t, None) => write!(f, "RAISE({t})"),
            Term::Raise(t, Some(args)) => {
                write!(f, "RAISE({t})(")?;
                write_list(f, args.iter())?;
                f.write_str(")")
            }
            Term::TreeLit(lit) => write!(f, "{lit}"),
            Term::NewFunc => f.write_str("NEWFUNC"),
            Term::Op(op, args) => {
                write!(f, "OP[{op}](")?;
                write_list(f, args.iter())?;
                f.write_str(")")
            }
        }
    }
}
