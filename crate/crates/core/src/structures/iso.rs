//! Isomorphisms of states induced by renaming base atoms.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;

use super::State;
use crate::error::{Error, Result};
use crate::value::Atom;

/// A bijection on standard atoms. Atoms outside its domain are fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bijection {
    map: BTreeMap<Atom, Atom>,
}

impl Bijection {
    pub fn new(map: BTreeMap<Atom, Atom>) -> Result<Self> {
        let image: BTreeSet<&Atom> = map.values().collect();
        if image.len() != map.len() {
            return Err(Error::Iso("mapping is not injective".into()));
        }
        let domain: BTreeSet<&Atom> = map.keys().collect();
        if domain != image {
            return Err(Error::Iso("mapping must permute its own domain".into()));
        }
        Ok(Bijection { map })
    }

    pub fn apply(&self, a: &Atom) -> Atom {
        self.map.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn inverse(&self) -> Bijection {
        Bijection {
            map: self
                .map
                .iter()
                .map(|(k, v)| (v.clone(), k.clone()))
                .collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Atom, &Atom)> {
        self.map.iter()
    }

    /// The image `ζ(S)`. Every atom moved by the bijection must belong to the
    /// state's base set.
    pub fn apply_state(&self, state: &State) -> Result<State> {
        if let Some(a) = self.map.keys().find(|a| !state.base().contains(a)) {
            return Err(Error::Iso(format!("atom {a} is not in the base set")));
        }
        Ok(state.map_atoms(&|a| self.apply(a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{Background, FunctionSymbol, Location, Signature};
    use crate::value::Value;
    use alloc::vec;

    #[test]
    fn swap_moves_locations_and_values() {
        let mut sig = Signature::with_self();
        sig.add(FunctionSymbol::new("f", 1)).unwrap();
        let mut s = State::new(sig, Background::default());
        s.set(Location::new("f", vec![Value::atom("a")]), Value::atom("b"))
            .unwrap();
        let swap = Bijection::new(
            [
                (Atom::new("a"), Atom::new("b")),
                (Atom::new("b"), Atom::new("a")),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        let t = swap.apply_state(&s).unwrap();
        assert_eq!(
            t.get(&Location::new("f", vec![Value::atom("b")])),
            Value::atom("a")
        );
        assert_eq!(swap.inverse().apply_state(&t).unwrap(), s);
    }

    #[test]
    fn non_permutation_is_rejected() {
        let m = [(Atom::new("a"), Atom::new("z"))].into_iter().collect();
        assert!(Bijection::new(m).is_err());
    }
}
