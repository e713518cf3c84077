//! The reflective step: decode the program from `self`, execute it, apply.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::reflect;
use crate::rules::{self, ClashReport, Outcome, Rule, UpdateMultiset, UpdateSet};
use crate::structures::{eval_term, FunctionSymbol, State, Term};
use crate::value::Value;

pub const DEFAULT_MAX_STEPS: usize = 1000;

/// An rsASM: an initial state whose `self` holds the program.
#[derive(Debug, Clone)]
pub struct Machine {
    pub initial: State,
    pub max_steps: usize,
}

impl Machine {
    /// Checks that `self` decodes and aligns the state's signature with it.
    pub fn new(mut initial: State, max_steps: usize) -> Result<Self> {
        let tree = initial
            .self_tree()
            .ok_or_else(|| Error::State("self holds no tree".into()))?;
        let (sig, rule) = reflect::decode_self(tree)?;
        rule.validate(&sig, initial.background())?;
        initial.set_signature(sig);
        Ok(Machine { initial, max_steps })
    }

    pub fn run(&self) -> Trace {
        run(&self.initial, self.max_steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    /// The last step produced an empty update set.
    Fixpoint,
    MaxSteps,
    Clash,
    Error(String),
}

impl Status {
    pub fn as_str(&self) -> &str {
        match self {
            Status::Fixpoint => "fixpoint",
            Status::MaxSteps => "max_steps",
            Status::Clash => "clash",
            Status::Error(_) => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub index: usize,
    /// The state the step started from.
    pub before: State,
    pub rule: Rule,
    pub multiset: UpdateMultiset,
    pub outcome: Outcome,
    pub signature_added: Vec<FunctionSymbol>,
}

impl StepRecord {
    pub fn updates(&self) -> Option<&UpdateSet> {
        match &self.outcome {
            Outcome::Updates(u) => Some(u),
            Outcome::Clash(_) => None,
        }
    }

    pub fn clash(&self) -> Option<&ClashReport> {
        match &self.outcome {
            Outcome::Clash(c) => Some(c),
            Outcome::Updates(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<StepRecord>,
    pub status: Status,
    pub final_state: State,
}

impl Trace {
    /// The state before step `i`, or the final state for `i == steps.len()`.
    pub fn state_at(&self, i: usize) -> Option<&State> {
        match self.steps.get(i) {
            Some(r) => Some(&r.before),
            None if i == self.steps.len() => Some(&self.final_state),
            None => None,
        }
    }

    /// Each decoded signature contains its predecessor's.
    pub fn signatures_monotone(&self) -> bool {
        let states: Vec<&State> = (0..=self.steps.len())
            .filter_map(|i| self.state_at(i))
            .collect();
        states
            .windows(2)
            .all(|w| w[0].signature().is_subset_of(w[1].signature()))
    }

    /// Every successor equals the predecessor plus its collapsed update set.
    pub fn replays(&self) -> bool {
        self.steps.iter().enumerate().all(|(i, rec)| {
            let next = self.state_at(i + 1).expect("successor recorded");
            let expected = match &rec.outcome {
                Outcome::Updates(u) => match decoded_state(&rec.before) {
                    Ok(s) => rules::apply_update_set(&s, u).ok(),
                    Err(_) => None,
                },
                Outcome::Clash(_) => decoded_state(&rec.before).ok(),
            };
            expected.as_ref() == Some(next)
        })
    }
}

fn decoded_state(state: &State) -> Result<State> {
    let tree = state
        .self_tree()
        .ok_or_else(|| Error::State("self holds no tree".into()))?;
    let sig = reflect::self_signature(tree)?;
    let mut s = state.clone();
    s.set_signature(sig);
    Ok(s)
}

/// One transition `τ(S) = S + Δ(r_S, S)`. On a clash the state is returned
/// unchanged and the record carries the clash.
pub fn step(state: &State) -> Result<(State, StepRecord)> {
    let tree = state
        .self_tree()
        .ok_or_else(|| Error::State("self holds no tree".into()))?;
    let (sig, rule) = reflect::decode_self(tree)?;
    rule.validate(&sig, state.background())?;
    let mut current = state.clone();
    current.set_signature(sig.clone());
    let (multiset, outcome) = rules::execute(&current, &rule)?;
    let next = match &outcome {
        Outcome::Updates(u) => rules::apply_update_set(&current, u)?,
        Outcome::Clash(_) => current.clone(),
    };
    if !sig.is_subset_of(next.signature()) {
        return Err(Error::Signature(format!(
            "signature shrank from {sig} to {}",
            next.signature()
        )));
    }
    if let Some(t) = next.self_tree() {
        reflect::decode_self(t)?;
    } else {
        return Err(Error::State("self no longer holds a tree".into()));
    }
    let record = StepRecord {
        index: 0,
        before: state.clone(),
        rule,
        multiset,
        signature_added: next.signature().added_since(&sig),
        outcome,
    };
    Ok((next, record))
}

/// Steps until an empty update set, a clash, an error or `max_steps`.
pub fn run(initial: &State, max_steps: usize) -> Trace {
    let mut state = initial.clone();
    let mut steps = Vec::new();
    for index in 0..max_steps {
        match step(&state) {
            Ok((next, mut record)) => {
                record.index = index;
                let status = match &record.outcome {
                    Outcome::Clash(_) => Some(Status::Clash),
                    Outcome::Updates(u) if u.is_empty() => Some(Status::Fixpoint),
                    Outcome::Updates(_) => None,
                };
                steps.push(record);
                state = next;
                if let Some(status) = status {
                    return Trace {
                        steps,
                        status,
                        final_state: state,
                    };
                }
            }
            Err(e) => {
                return Trace {
                    steps,
                    status: Status::Error(e.to_string()),
                    final_state: state,
                }
            }
        }
    }
    Trace {
        steps,
        status: Status::MaxSteps,
        final_state: state,
    }
}

fn eval_opt(state: &State, t: &Term) -> Option<Value> {
    eval_term(state, t).ok()
}

/// Strong coincidence over `w`: every term of `w` has the same value in both
/// states, and for program-valued terms so do all `β`-extracted terms.
/// A term whose evaluation fails counts as having no value.
pub fn check_strong_coincidence(s1: &State, s2: &State, w: &[Term]) -> bool {
    w.iter().all(|t| {
        let v1 = eval_opt(s1, t);
        if v1 != eval_opt(s2, t) {
            return false;
        }
        match v1.as_ref().and_then(reflect::beta_of_value) {
            Some(Ok(extracted)) => extracted.iter().all(|e| eval_opt(s1, e) == eval_opt(s2, e)),
            Some(Err(_)) | None => true,
        }
    })
}

/// `W = {self}`.
pub fn self_witness() -> Vec<Term> {
    alloc::vec![Term::nullary(crate::structures::SELF)]
}
