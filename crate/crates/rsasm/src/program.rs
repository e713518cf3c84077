//! Parsed programs: building the initial state and printing source back.

use std::fmt::Write as _;

use rsasm_core::engine::{Machine, DEFAULT_MAX_STEPS};
use rsasm_core::reflect::encode_self;
use rsasm_core::rules::Rule;
use rsasm_core::structures::{Background, Location, Signature, State, SELF};
use rsasm_core::{Result, Value};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Options {
    pub max_steps: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub signature: Signature,
    pub background: Background,
    /// Initial values in source order.
    pub init: Vec<(Location, Value)>,
    pub rule: Rule,
    pub options: Options,
}

impl Program {
    /// The initial state with `self` encoding the signature and rule.
    pub fn initial_state(&self) -> Result<State> {
        let mut s = State::new(self.signature.clone(), self.background.clone());
        for (loc, v) in &self.init {
            s.set(loc.clone(), v.clone())?;
        }
        s.set(
            Location::self_location(),
            Value::Tree(encode_self(&self.signature, &self.rule)),
        )?;
        Ok(s)
    }

    /// A machine capped at the program's `max_steps`, or `default_cap`.
    pub fn machine(&self, default_cap: Option<usize>) -> Result<Machine> {
        let cap = self
            .options
            .max_steps
            .or(default_cap)
            .unwrap_or(DEFAULT_MAX_STEPS);
        Machine::new(self.initial_state()?, cap)
    }

    /// Source text that parses back to this program.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        if !self.background.domains.is_empty() {
            out.push_str("DOMAINS\n");
            for (d, vs) in &self.background.domains {
                let items: Vec<String> = vs.iter().map(Value::to_string).collect();
                let _ = writeln!(out, "  {d} = {{{}}}", items.join(", "));
            }
        }
        out.push_str("SIGNATURE\n");
        let syms: Vec<String> = self
            .signature
            .symbols()
            .iter()
            .filter(|s| s.name != SELF)
            .map(|s| format!("{}/{}", s.name, s.arity))
            .collect();
        if !syms.is_empty() {
            let _ = writeln!(out, "  {}", syms.join(", "));
        }
        if !self.background.derived.is_empty() {
            out.push_str("DERIVED\n");
            for (f, d) in &self.background.derived {
                let _ = writeln!(out, "  {f}({}) = {}", d.params.join(", "), d.body);
            }
        }
        if !self.init.is_empty() {
            out.push_str("INIT\n");
            for (loc, v) in &self.init {
                let _ = writeln!(out, "  {loc} := {v}");
            }
        }
        out.push_str("RULE\n");
        for line in self.rule.to_string().lines() {
            let _ = writeln!(out, "  {line}");
        }
        if self.options != Options::default() {
            out.push_str("OPTIONS\n");
            if let Some(n) = self.options.max_steps {
                let _ = writeln!(out, "  max_steps = {n}");
            }
            if let Some(n) = self.options.seed {
                let _ = writeln!(out, "  seed = {n}");
            }
        }
        out
    }
}
