//! Signatures, locations and states.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::treealg::Tree;
use crate::value::{write_list, Atom, Value};

pub mod eval;
pub mod iso;
pub mod term;

pub use eval::{eval_term, Env, Evaluator, Reserve};
pub use iso::Bijection;
pub use term::{Builtin, Connective, Domain, LitBody, LitItem, Term, TreeLit};

/// The nullary symbol holding the machine's own tree.
pub const SELF: &str = "self";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FunctionSymbol {
    pub name: String,
    pub arity: usize,
}

impl FunctionSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        FunctionSymbol {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A finite set of function symbols with arities, kept in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Signature {
    symbols: Vec<FunctionSymbol>,
}

impl Signature {
    pub fn empty() -> Self {
        Signature::default()
    }

    /// A signature containing only `self/0`.
    pub fn with_self() -> Self {
        Signature {
            symbols: alloc::vec![FunctionSymbol::new(SELF, 0)],
        }
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = FunctionSymbol>) -> Result<Self> {
        let mut sig = Signature::empty();
        for s in symbols {
            sig.add(s)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, symbol: FunctionSymbol) -> Result<()> {
        if self.contains(&symbol.name) {
            return Err(Error::Signature(format!(
                "duplicate symbol {}",
                symbol.name
            )));
        }
        self.symbols.push(symbol);
        Ok(())
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.arity)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arity(name).is_some()
    }

    pub fn symbols(&self) -> &[FunctionSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.symbols
            .iter()
            .all(|s| other.arity(&s.name) == Some(s.arity))
    }

    /// Symbols of `self` absent from `old`.
    pub fn added_since(&self, old: &Signature) -> Vec<FunctionSymbol> {
        self.symbols
            .iter()
            .filter(|s| !old.contains(&s.name))
            .cloned()
            .collect()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, self.symbols.iter())
    }
}

/// `(f, (a1,…,an))`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Location {
    pub symbol: String,
    pub args: Vec<Value>,
}

impl Location {
    pub fn new(symbol: impl Into<String>, args: Vec<Value>) -> Self {
        Location {
            symbol: symbol.into(),
            args,
        }
    }

    pub fn nullary(symbol: impl Into<String>) -> Self {
        Location::new(symbol, Vec::new())
    }

    pub fn self_location() -> Self {
        Location::nullary(SELF)
    }

    pub fn is_self(&self) -> bool {
        self.symbol == SELF && self.args.is_empty()
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Location {
        Location {
            symbol: self.symbol.clone(),
            args: self.args.iter().map(|v| v.map_atoms(f)).collect(),
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            write_list(f, self.args.iter())?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A function defined by a term over its parameters, evaluated like a
/// background function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Derived {
    pub params: Vec<String>,
    pub body: Term,
}

/// Finite domains and derived functions available to every term.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Background {
    pub domains: BTreeMap<String, Vec<Value>>,
    pub derived: BTreeMap<String, Derived>,
}

impl Background {
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Background {
        Background {
            domains: self
                .domains
                .iter()
                .map(|(k, vs)| (k.clone(), vs.iter().map(|v| v.map_atoms(f)).collect()))
                .collect(),
            derived: self
                .derived
                .iter()
                .map(|(k, d)| {
                    (
                        k.clone(),
                        Derived {
                            params: d.params.clone(),
                            body: d.body.map_atoms(f),
                        },
                    )
                })
                .collect(),
        }
    }
}

/// A state: signature, base atoms, background and the interpretation of
/// every location that is not `undef`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    signature: Signature,
    base: BTreeSet<Atom>,
    background: Background,
    interp: BTreeMap<Location, Value>,
}

impl State {
    pub fn new(signature: Signature, background: Background) -> Self {
        let mut base = BTreeSet::new();
        for vs in background.domains.values() {
            vs.iter().for_each(|v| v.collect_atoms(&mut base));
        }
        for d in background.derived.values() {
            d.body.collect_atoms(&mut base);
        }
        State {
            signature,
            base,
            background,
            interp: BTreeMap::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn set_signature(&mut self, signature: Signature) {
        self.signature = signature;
    }

    pub fn base(&self) -> &BTreeSet<Atom> {
        &self.base
    }

    pub fn add_atom(&mut self, atom: Atom) {
        self.base.insert(atom);
    }

    pub fn background(&self) -> &Background {
        &self.background
    }

    /// The value at a location; `undef` when unset.
    pub fn get(&self, loc: &Location) -> Value {
        self.interp.get(loc).cloned().unwrap_or(Value::Undef)
    }

    /// Sets a location, checking the symbol and arity against the signature.
    pub fn set(&mut self, loc: Location, value: Value) -> Result<()> {
        match self.signature.arity(&loc.symbol) {
            None => {
                return Err(Error::Signature(format!("unknown symbol {}", loc.symbol)));
            }
            Some(n) if n != loc.args.len() => {
                return Err(Error::Signature(format!(
                    "{} expects {n} arguments, got {}",
                    loc.symbol,
                    loc.args.len()
                )));
            }
            Some(_) => {}
        }
        self.set_unchecked(loc, value);
        Ok(())
    }

    pub(crate) fn set_unchecked(&mut self, loc: Location, value: Value) {
        loc.args
            .iter()
            .for_each(|v| v.collect_atoms(&mut self.base));
        value.collect_atoms(&mut self.base);
        if value.is_undef() {
            self.interp.remove(&loc);
        } else {
            self.interp.insert(loc, value);
        }
    }

    /// Locations with a value other than `undef`.
    pub fn defined(&self) -> impl Iterator<Item = (&Location, &Value)> {
        self.interp.iter()
    }

    pub fn self_tree(&self) -> Option<&Tree> {
        match self.interp.get(&Location::self_location()) {
            Some(Value::Tree(t)) => Some(t),
            _ => None,
        }
    }

    /// Locations on which the two states disagree, with both values.
    pub fn diff(&self, other: &State) -> Vec<(Location, Value, Value)> {
        let keys: BTreeSet<&Location> = self.interp.keys().chain(other.interp.keys()).collect();
        keys.into_iter()
            .filter_map(|loc| {
                let (a, b) = (self.get(loc), other.get(loc));
                (a != b).then(|| (loc.clone(), a, b))
            })
            .collect()
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> State {
        State {
            signature: self.signature.clone(),
            base: self.base.iter().map(f).collect(),
            background: self.background.map_atoms(f),
            interp: self
                .interp
                .iter()
                .map(|(l, v)| (l.map_atoms(f), v.map_atoms(f)))
                .collect(),
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (loc, v) in &self.interp {
            writeln!(f, "{loc} = {v}")?;
        }
        Ok(())
    }
}
