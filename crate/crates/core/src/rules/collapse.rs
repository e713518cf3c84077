//! Collapsing an update multiset into an update set.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::updates::{Address, Entry, Operator, SharedUpdate, SpliceOp, UpdateMultiset, UpdateSet};
use crate::error::{Error, Result};
use crate::structures::{Location, State};
use crate::value::Value;

/// Largest group of non-commuting shared updates checked for order
/// independence by trying every distinct order.
pub const MAX_EXHAUSTIVE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClashReport {
    pub location: Location,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Updates(UpdateSet),
    Clash(ClashReport),
}

/// Rewrites sublocation updates as splices on `self`.
pub fn normalize_sublocations(ms: &UpdateMultiset) -> UpdateMultiset {
    let entries = ms
        .entries()
        .iter()
        .map(|e| match e {
            Entry::Plain(u) => match &u.address {
                Address::Sub(p) => Entry::Shared(SharedUpdate {
                    address: Address::Loc(Location::self_location()),
                    op: Operator::Splice(p.clone(), SpliceOp::Replace(u.value.clone())),
                    operands: Vec::new(),
                }),
                Address::Loc(_) => e.clone(),
            },
            Entry::Shared(s) => match &s.address {
                Address::Sub(p) => Entry::Shared(SharedUpdate {
                    address: Address::Loc(Location::self_location()),
                    op: Operator::Splice(
                        p.clone(),
                        SpliceOp::Apply(Box::new(s.op.clone()), s.operands.clone()),
                    ),
                    operands: Vec::new(),
                }),
                Address::Loc(_) => e.clone(),
            },
        })
        .collect();
    UpdateMultiset::from_entries(entries)
}

fn fold(current: &Value, shared: &[&SharedUpdate]) -> Result<Value> {
    shared
        .iter()
        .try_fold(current.clone(), |acc, s| s.op.apply(&acc, &s.operands))
}

/// Shared updates whose fold is independent of order without checking.
fn obviously_commute(shared: &[&SharedUpdate]) -> bool {
    let first = shared[0];
    if shared.iter().all(|s| *s == first) {
        return true;
    }
    if first.op.is_commutative() && shared.iter().all(|s| s.op == first.op) {
        return true;
    }
    // Splices at pairwise disjoint paths commute; several at one path must
    // commute among themselves.
    let mut by_path: BTreeMap<&crate::value::Path, Vec<&SplicePart<'_>>> = BTreeMap::new();
    let parts: Vec<SplicePart<'_>> = match shared
        .iter()
        .map(|s| match &s.op {
            Operator::Splice(p, op) => Some(SplicePart { path: p, op }),
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
    {
        Some(parts) => parts,
        None => return false,
    };
    for part in &parts {
        by_path.entry(part.path).or_default().push(part);
    }
    let paths: Vec<_> = by_path.keys().collect();
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            if !a.is_disjoint(b) {
                return false;
            }
        }
    }
    by_path.values().all(|group| {
        let first = group[0].op;
        group.iter().all(|g| g.op == first)
            || group.iter().all(|g| match (g.op, first) {
                (SpliceOp::Apply(a, _), SpliceOp::Apply(b, _)) => a == b && a.is_commutative(),
                _ => false,
            })
    })
}

struct SplicePart<'a> {
    path: &'a crate::value::Path,
    op: &'a SpliceOp,
}

/// Rearranges `v` into the next lexicographic permutation.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

enum Folded {
    Value(Value),
    Clash(String),
}

fn fold_group(current: &Value, shared: &[&SharedUpdate]) -> Result<Folded> {
    if obviously_commute(shared) {
        return fold(current, shared).map(Folded::Value);
    }
    if shared.len() > MAX_EXHAUSTIVE {
        return Ok(Folded::Clash(format!(
            "{} shared updates that may not commute",
            shared.len()
        )));
    }
    let mut order: Vec<&SharedUpdate> = shared.to_vec();
    order.sort();
    let mut seen: Option<Value> = None;
    let mut first_err: Option<Error> = None;
    let mut failed = false;
    loop {
        match fold(current, &order) {
            Ok(v) => match &seen {
                Some(prev) if *prev != v => {
                    return Ok(Folded::Clash("shared updates do not commute".into()))
                }
                Some(_) => {}
                None => seen = Some(v),
            },
            Err(e) => {
                failed = true;
                first_err.get_or_insert(e);
            }
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    match (seen, failed) {
        (Some(v), false) => Ok(Folded::Value(v)),
        (Some(_), true) => Ok(Folded::Clash("shared updates fail in some orders".into())),
        (None, _) => Err(first_err.expect("at least one order was tried")),
    }
}

/// Collapses a multiset against the current state.
///
/// Plain updates to one location must agree. Shared updates to a location
/// are folded over its current value and must give the same result in
/// every order; a plain update to the same location must equal that result.
pub fn collapse(state: &State, ms: &UpdateMultiset) -> Result<Outcome> {
    let ms = normalize_sublocations(ms);
    let mut groups: BTreeMap<Location, (Vec<&Value>, Vec<&SharedUpdate>)> = BTreeMap::new();
    for e in ms.entries() {
        let Address::Loc(loc) = e.address() else {
            unreachable!("sublocations were normalized");
        };
        let slot = groups.entry(loc.clone()).or_default();
        match e {
            Entry::Plain(u) => slot.0.push(&u.value),
            Entry::Shared(s) => slot.1.push(s),
        }
    }
    let mut out = UpdateSet::new();
    for (loc, (plain, shared)) in groups {
        let clash = |reason: String| {
            Ok(Outcome::Clash(ClashReport {
                location: loc.clone(),
                reason,
            }))
        };
        let value = if shared.is_empty() {
            let v = plain[0];
            if let Some(other) = plain.iter().find(|p| **p != v) {
                return clash(format!("conflicting values {v} and {other}"));
            }
            v.clone()
        } else {
            let v = match fold_group(&state.get(&loc), &shared)? {
                Folded::Value(v) => v,
                Folded::Clash(reason) => return clash(reason),
            };
            if let Some(p) = plain.iter().find(|p| ***p != v) {
                return clash(format!("plain update {p} disagrees with shared result {v}"));
            }
            v
        };
        out.insert(loc, value)?;
    }
    Ok(Outcome::Updates(out))
}
