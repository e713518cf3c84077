//! Reflective sequential abstract state machines.
//!
//! The machine keeps its own signature and rule as a tree value at the
//! nullary location `self`. Every step decodes that tree, evaluates the rule
//! to an update multiset, collapses shared updates and applies the result,
//! so a program can add function symbols and rewrite its own rule while it
//! runs.
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, JSON snapshots and
//! the command line live in the companion `rsasm` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod engine;
pub mod error;
pub mod reflect;
pub mod rules;
pub mod structures;
pub mod treealg;
pub mod value;

pub use error::{Error, Result};
pub use value::{Atom, Label, Path, Value};
