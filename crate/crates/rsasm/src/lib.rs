//! Program files, JSON snapshots, bundled fixtures, random generators and
//! postulate probes for the `rsasm-core` engine.

pub mod fixtures;
pub mod gen;
pub mod json;
pub mod parse;
pub mod probe;
pub mod program;

pub use parse::{parse_program, parse_rule, parse_term, ParseError};
pub use program::{Options, Program};
