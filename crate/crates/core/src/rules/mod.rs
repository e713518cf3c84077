//! Rules, their update multisets and the collapse to update sets.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::structures::{Background, Signature, Term};
use crate::value::write_list;

pub mod collapse;
pub mod exec;
pub mod updates;

pub use collapse::{collapse, normalize_sublocations, ClashReport, Outcome};
pub use exec::{apply_update_set, compute_update_multiset, execute};
pub use updates::{
    Address, Entry, Operator, SharedUpdate, SpliceOp, Update, UpdateMultiset, UpdateSet,
};

/// The function being updated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Symbol(String),
    /// A term evaluating to a symbol, or to a node of `self` (a sublocation).
    Dynamic(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Assign {
        target: Target,
        args: Vec<Term>,
        value: Term,
    },
    If {
        cond: Term,
        then: Box<Rule>,
        otherwise: Option<Box<Rule>>,
    },
    Par(Vec<Rule>),
    Let {
        var: String,
        value: Term,
        body: Box<Rule>,
    },
    /// `f(args) <=[op] operands`.
    Partial {
        target: Target,
        op: String,
        args: Vec<Term>,
        operands: Vec<Term>,
    },
}

impl Rule {
    pub fn assign(f: impl Into<String>, args: Vec<Term>, value: Term) -> Rule {
        Rule::Assign {
            target: Target::Symbol(f.into()),
            args,
            value,
        }
    }

    pub fn skip() -> Rule {
        Rule::Par(Vec::new())
    }

    /// Checks symbols, arities, operators and variable scoping.
    pub fn validate(&self, sig: &Signature, bg: &Background) -> Result<()> {
        self.validate_in(sig, bg, &mut Vec::new())
    }

    fn validate_in(&self, sig: &Signature, bg: &Background, bound: &mut Vec<String>) -> Result<()> {
        let term = |t: &Term, bound: &Vec<String>| check_term(t, sig, bg, bound);
        let target = |tg: &Target, n: usize, bound: &Vec<String>| match tg {
            Target::Symbol(f) => match sig.arity(f) {
                Some(a) if a == n => Ok(()),
                Some(a) => Err(Error::Signature(format!(
                    "{f} expects {a} arguments, got {n}"
                ))),
                None => Err(Error::Signature(format!(
                    "cannot update unknown symbol {f}"
                ))),
            },
            Target::Dynamic(t) => check_term(t, sig, bg, bound),
        };
        match self {
            Rule::Assign {
                target: tg,
                args,
                value,
            } => {
                target(tg, args.len(), bound)?;
                args.iter().try_for_each(|a| term(a, bound))?;
                term(value, bound)
            }
            Rule::If {
                cond,
                then,
                otherwise,
            } => {
                term(cond, bound)?;
                then.validate_in(sig, bg, bound)?;
                match otherwise {
                    Some(r) => r.validate_in(sig, bg, bound),
                    None => Ok(()),
                }
            }
            Rule::Par(rules) => rules.iter().try_for_each(|r| r.validate_in(sig, bg, bound)),
            Rule::Let { var, value, body } => {
                term(value, bound)?;
                bound.push(var.clone());
                let r = body.validate_in(sig, bg, bound);
                bound.pop();
                r
            }
            Rule::Partial {
                target: tg,
                op,
                args,
                operands,
            } => {
                Operator::from_name(op)?;
                if operands.is_empty() {
                    return Err(Error::Signature(format!(
                        "partial update with {op} has no operands"
                    )));
                }
                target(tg, args.len(), bound)?;
                args.iter().chain(operands).try_for_each(|a| term(a, bound))
            }
        }
    }

    /// Terms occurring directly in this rule node.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Rule::Assign {
                target,
                args,
                value,
            } => dynamic(target)
                .into_iter()
                .chain(args)
                .chain(core::iter::once(value))
                .collect(),
            Rule::If { cond, .. } => alloc::vec![cond],
            Rule::Par(_) => Vec::new(),
            Rule::Let { value, .. } => alloc::vec![value],
            Rule::Partial {
                target,
                args,
                operands,
                ..
            } => dynamic(target)
                .into_iter()
                .chain(args)
                .chain(operands)
                .collect(),
        }
    }

    pub fn map_atoms(&self, f: &impl Fn(&crate::value::Atom) -> crate::value::Atom) -> Rule {
        let t = |t: &Term| t.map_atoms(f);
        let ts = |ts: &[Term]| ts.iter().map(t).collect::<Vec<_>>();
        let tg = |x: &Target| match x {
            Target::Symbol(s) => Target::Symbol(s.clone()),
            Target::Dynamic(d) => Target::Dynamic(t(d)),
        };
        match self {
            Rule::Assign {
                target,
                args,
                value,
            } => Rule::Assign {
                target: tg(target),
                args: ts(args),
                value: t(value),
            },
            Rule::If {
                cond,
                then,
                otherwise,
            } => Rule::If {
                cond: t(cond),
                then: Box::new(then.map_atoms(f)),
                otherwise: otherwise.as_ref().map(|r| Box::new(r.map_atoms(f))),
            },
            Rule::Par(rs) => Rule::Par(rs.iter().map(|r| r.map_atoms(f)).collect()),
            Rule::Let { var, value, body } => Rule::Let {
                var: var.clone(),
                value: t(value),
                body: Box::new(body.map_atoms(f)),
            },
            Rule::Partial {
                target,
                op,
                args,
                operands,
            } => Rule::Partial {
                target: tg(target),
                op: op.clone(),
                args: ts(args),
                operands: ts(operands),
            },
        }
    }

    /// `r[x ↦ t]`, stopping below a `LET` that rebinds `x`.
    pub fn substitute(&self, var: &str, by: &Term) -> Rule {
        let t = |t: &Term| t.substitute(var, by);
        let ts = |ts: &[Term]| ts.iter().map(t).collect::<Vec<_>>();
        let tg = |x: &Target| match x {
            Target::Symbol(s) => Target::Symbol(s.clone()),
            Target::Dynamic(d) => Target::Dynamic(t(d)),
        };
        match self {
            Rule::Assign {
                target,
                args,
                value,
            } => Rule::Assign {
                target: tg(target),
                args: ts(args),
                value: t(value),
            },
            Rule::If {
                cond,
                then,
                otherwise,
            } => Rule::If {
                cond: t(cond),
                then: Box::new(then.substitute(var, by)),
                otherwise: otherwise.as_ref().map(|r| Box::new(r.substitute(var, by))),
            },
            Rule::Par(rs) => Rule::Par(rs.iter().map(|r| r.substitute(var, by)).collect()),
            Rule::Let {
                var: x,
                value,
                body,
            } => Rule::Let {
                var: x.clone(),
                value: t(value),
                body: if x == var {
                    body.clone()
                } else {
                    Box::new(body.substitute(var, by))
                },
            },
            Rule::Partial {
                target,
                op,
                args,
                operands,
            } => Rule::Partial {
                target: tg(target),
                op: op.clone(),
                args: ts(args),
                operands: ts(operands),
            },
        }
    }

    /// Number of rule constructors.
    pub fn size(&self) -> usize {
        match self {
            Rule::Assign { .. } | Rule::Partial { .. } => 1,
            Rule::If {
                then, otherwise, ..
            } => 1 + then.size() + otherwise.as_ref().map_or(0, |r| r.size()),
            Rule::Par(rs) => 1 + rs.iter().map(Rule::size).sum::<usize>(),
            Rule::Let { body, .. } => 1 + body.size(),
        }
    }
}

fn dynamic(t: &Target) -> Option<&Term> {
    match t {
        Target::Dynamic(t) => Some(t),
        Target::Symbol(_) => None,
    }
}

fn check_term(t: &Term, sig: &Signature, bg: &Background, bound: &[String]) -> Result<()> {
    let mut apps = Vec::new();
    t.symbols(&mut apps);
    for (f, n) in apps {
        let expected = match bg.derived.get(&f) {
            Some(d) => Some(d.params.len()),
            None => sig.arity(&f),
        };
        match expected {
            Some(a) if a == n => {}
            Some(a) => {
                return Err(Error::Signature(format!(
                    "{f} expects {a} arguments, got {n}"
                )))
            }
            None => return Err(Error::Signature(format!("unknown symbol {f}"))),
        }
    }
    let free: BTreeSet<String> = t.free_vars();
    if let Some(x) = free.iter().find(|x| !bound.contains(x)) {
        return Err(Error::Rule(format!("unbound variable {x}")));
    }
    check_ops(t)
}

fn check_ops(t: &Term) -> Result<()> {
    if let Term::Op(op, _) = t {
        Operator::from_name(op)?;
    }
    t.subterms().into_iter().try_for_each(check_ops)
}

fn fmt_target(f: &mut fmt::Formatter<'_>, target: &Target, args: &[Term]) -> fmt::Result {
    match target {
        Target::Symbol(s) => f.write_str(s)?,
        Target::Dynamic(t) => write!(f, "RAISE({t})")?,
    }
    if !args.is_empty() {
        f.write_str("(")?;
        write_list(f, args.iter())?;
        f.write_str(")")?;
    }
    Ok(())
}

impl Rule {
    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = |f: &mut fmt::Formatter<'_>, d: usize| (0..d).try_for_each(|_| f.write_str("  "));
        pad(f, depth)?;
        match self {
            Rule::Assign {
                target,
                args,
                value,
            } => {
                fmt_target(f, target, args)?;
                write!(f, " := {value}")
            }
            Rule::Partial {
                target,
                op,
                args,
                operands,
            } => {
                fmt_target(f, target, args)?;
                write!(f, " <=[{op}] ")?;
                write_list(f, operands.iter())
            }
            Rule::If {
                cond,
                then,
                otherwise,
            } => {
                writeln!(f, "IF {cond} THEN")?;
                then.fmt_indented(f, depth + 1)?;
                f.write_str("\n")?;
                if let Some(r) = otherwise {
                    pad(f, depth)?;
                    f.write_str("ELSE\n")?;
                    r.fmt_indented(f, depth + 1)?;
                    f.write_str("\n")?;
                }
                pad(f, depth)?;
                f.write_str("ENDIF")
            }
            Rule::Par(rules) => {
                f.write_str("PAR\n")?;
                for r in rules {
                    r.fmt_indented(f, depth + 1)?;
                    f.write_str("\n")?;
                }
                pad(f, depth)?;
                f.write_str("ENDPAR")
            }
            Rule::Let { var, value, body } => {
                writeln!(f, "LET {var} = {value} IN")?;
                body.fmt_indented(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}
