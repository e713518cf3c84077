//! Evaluating rules to update multisets and applying update sets.

use alloc::format;
use alloc::vec::Vec;

use super::collapse::{collapse, Outcome};
use super::updates::{Address, Entry, Operator, SharedUpdate, Update, UpdateMultiset, UpdateSet};
use super::{Rule, Target};
use crate::error::{Error, Result};
use crate::structures::{Env, Evaluator, Location, State, Term};
use crate::value::Value;

fn rule_err(msg: impl Into<alloc::string::String>) -> Error {
    Error::Rule(msg.into())
}

fn address(ev: &mut Evaluator<'_>, target: &Target, args: &[Term], env: &Env) -> Result<Address> {
    let symbol = match target {
        Target::Symbol(f) => f.clone(),
        Target::Dynamic(t) => match ev.eval(t, env)? {
            Value::Symbol(f) => f,
            Value::Node(p) if args.is_empty() => {
                return match ev.state().self_tree() {
                    Some(tree) if tree.contains(&p) => Ok(Address::Sub(p)),
                    _ => Err(rule_err(format!("sublocation {p} is not a node of self"))),
                }
            }
            Value::Node(p) => return Err(rule_err(format!("sublocation {p} takes no arguments"))),
            other => return Err(rule_err(format!("cannot update through {other}"))),
        },
    };
    match ev.state().signature().arity(&symbol) {
        Some(n) if n == args.len() => {}
        Some(n) => {
            return Err(Error::Signature(format!(
                "{symbol} expects {n} arguments, got {}",
                args.len()
            )))
        }
        None => {
            return Err(Error::Signature(format!(
                "cannot update unknown symbol {symbol}"
            )))
        }
    }
    let args = args
        .iter()
        .map(|a| ev.eval(a, env))
        .collect::<Result<Vec<_>>>()?;
    Ok(Address::Loc(Location::new(symbol, args)))
}

fn run(ev: &mut Evaluator<'_>, rule: &Rule, env: &Env, out: &mut UpdateMultiset) -> Result<()> {
    match rule {
        Rule::Assign {
            target,
            args,
            value,
        } => {
            let address = address(ev, target, args, env)?;
            let value = ev.eval(value, env)?;
            out.push(Entry::Plain(Update { address, value }));
        }
        Rule::If {
            cond,
            then,
            otherwise,
        } => match ev.eval(cond, env)? {
            Value::Bool(true) => run(ev, then, env, out)?,
            Value::Bool(false) => {
                if let Some(r) = otherwise {
                    run(ev, r, env, out)?;
                }
            }
            other => return Err(rule_err(format!("IF condition evaluated to {other}"))),
        },
        Rule::Par(rules) => {
            for r in rules {
                run(ev, r, env, out)?;
            }
        }
        Rule::Let { var, value, body } => {
            let v = ev.eval(value, env)?;
            let mut env = env.clone();
            env.insert(var.clone(), v);
            run(ev, body, &env, out)?;
        }
        Rule::Partial {
            target,
            op,
            args,
            operands,
        } => {
            let op = Operator::from_name(op)?;
            let address = address(ev, target, args, env)?;
            let operands = operands
                .iter()
                .map(|t| ev.eval(t, env))
                .collect::<Result<Vec<_>>>()?;
            out.push(Entry::Shared(SharedUpdate {
                address,
                op,
                operands,
            }));
        }
    }
    Ok(())
}

/// `Δ(r, S)`: the update multiset of `rule` in `state`.
pub fn compute_update_multiset(state: &State, rule: &Rule) -> Result<UpdateMultiset> {
    let mut ev = Evaluator::new(state);
    let mut out = UpdateMultiset::new();
    run(&mut ev, rule, &Env::new(), &mut out)?;
    Ok(out)
}

/// Evaluates a rule and collapses its multiset.
pub fn execute(state: &State, rule: &Rule) -> Result<(UpdateMultiset, Outcome)> {
    let ms = compute_update_multiset(state, rule)?;
    let outcome = collapse(state, &ms)?;
    Ok((ms, outcome))
}

/// `S + Δ`. When `self` changes and still encodes a signature, the state's
/// signature follows it.
pub fn apply_update_set(state: &State, updates: &UpdateSet) -> Result<State> {
    let mut next = state.clone();
    let mut self_changed = false;
    for (loc, v) in updates.iter() {
        self_changed |= loc.is_self();
        next.set_unchecked(loc.clone(), v.clone());
    }
    if self_changed {
        if let Some(tree) = next.self_tree() {
            if let Ok(sig) = crate::reflect::self_signature(tree) {
                next.set_signature(sig);
            }
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Background, FunctionSymbol, Signature};
    use alloc::vec;

    fn state() -> State {
        let mut sig = Signature::with_self();
        sig.add(FunctionSymbol::new("c", 0)).unwrap();
        sig.add(FunctionSymbol::new("f", 1)).unwrap();
        State::new(sig, Background::default())
    }

    #[test]
    fn if_on_undef_is_a_rule_error() {
        let r = Rule::If {
            cond: Term::nullary("c"),
            then: alloc::boxed::Box::new(Rule::skip()),
            otherwise: None,
        };
        assert!(matches!(
            compute_update_multiset(&state(), &r),
            Err(Error::Rule(_))
        ));
    }

    #[test]
    fn let_binds_before_the_body() {
        let r = Rule::Let {
            var: "x".into(),
            value: Term::constant(4u64),
            body: alloc::boxed::Box::new(Rule::assign("f", vec![Term::var("x")], Term::var("x"))),
        };
        let ms = compute_update_multiset(&state(), &r).unwrap();
        assert_eq!(
            ms.entries(),
            &[Entry::Plain(Update {
                address: Address::Loc(Location::new("f", vec![Value::Nat(4)])),
                value: Value::Nat(4),
            })]
        );
    }

    #[test]
    fn wrong_arity_update_is_rejected() {
        let r = Rule::assign("f", vec![], Term::constant(1u64));
        assert!(matches!(
            compute_update_multiset(&state(), &r),
            Err(Error::Signature(_))
        ));
    }
}
