//! Randomized checks of the bounded exploration and abstract state
//! postulates. Each trial state is also run twice to check trace
//! determinism, replay and signature monotonicity.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;

use rsasm_core::engine::{self, check_strong_coincidence, self_witness};
use rsasm_core::reflect::decode_self;
use rsasm_core::rules::{execute, UpdateMultiset};
use rsasm_core::structures::{Bijection, State};
use rsasm_core::{Atom, Result};

use crate::gen::{self, Rng64};
use crate::json;

/// Step cap for the determinism runs of probe trials.
pub const TRACE_STEPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub name: &'static str,
    /// Trials the property was checked on.
    pub checked: usize,
    /// Generated trials that did not meet the property's precondition.
    pub skipped: usize,
    pub violations: Vec<String>,
    /// Trial states whose runs were checked for determinism and
    /// monotonicity.
    pub traces: usize,
    pub trace_violations: Vec<String>,
}

impl Report {
    fn new(name: &'static str) -> Self {
        Report {
            name,
            checked: 0,
            skipped: 0,
            violations: Vec::new(),
            traces: 0,
            trace_violations: Vec::new(),
        }
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.trace_violations.is_empty()
    }

    fn trace(&mut self, trial: usize, s: &State) {
        self.traces += 1;
        if let Some(v) = check_trace(s, TRACE_STEPS) {
            self.trace_violations.push(format!("trial {trial}: {v}"));
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} checked, {} skipped, {} violations; {} traces, {} trace violations",
            self.name,
            self.checked,
            self.skipped,
            self.violations.len(),
            self.traces,
            self.trace_violations.len()
        )
    }
}

/// The state with its signature taken from `self`, as a step sees it.
fn decoded(s: &State) -> Result<State> {
    let tree = s
        .self_tree()
        .ok_or_else(|| rsasm_core::Error::State("self holds no tree".into()))?;
    let (sig, _) = decode_self(tree)?;
    let mut out = s.clone();
    out.set_signature(sig);
    Ok(out)
}

fn multiset(s: &State) -> Result<UpdateMultiset> {
    let d = decoded(s)?;
    let (_, rule) = decode_self(d.self_tree().expect("decoded above"))?;
    execute(&d, &rule).map(|(ms, _)| ms)
}

/// Pairs of states differing in one location. Whenever the pair strongly
/// coincides on `{self}`, both must yield the same update multiset. Runs
/// until `wanted` coinciding pairs were checked or the attempt budget is
/// spent.
pub fn bounded_exploration(seed: u64, wanted: usize) -> Report {
    let mut rng = gen::rng(seed);
    let mut r = Report::new("bounded_exploration");
    let locations = gen::probe_locations();
    let budget = wanted.saturating_mul(20).max(100);
    for trial in 0..budget {
        if r.checked >= wanted {
            break;
        }
        let rule = gen::probe_rule(&mut rng);
        let s1 = gen::probe_state(&mut rng, &rule);
        r.trace(trial, &s1);
        let loc = locations.choose(&mut rng).expect("nonempty");
        let old = s1.get(loc);
        let mut new = gen::value_for(&mut rng, loc);
        while new == old {
            new = gen::value_for(&mut rng, loc);
        }
        let mut s2 = s1.clone();
        s2.set(loc.clone(), new.clone())
            .expect("location in the signature");
        let (Ok(d1), Ok(d2)) = (decoded(&s1), decoded(&s2)) else {
            r.violations
                .push(format!("trial {trial}: self does not decode"));
            continue;
        };
        if !check_strong_coincidence(&d1, &d2, &self_witness()) {
            r.skipped += 1;
            continue;
        }
        r.checked += 1;
        match (multiset(&s1), multiset(&s2)) {
            (Ok(m1), Ok(m2)) if m1.same_multiset(&m2) => {}
            (Err(_), Err(_)) => {}
            (m1, m2) => r.violations.push(format!(
                "trial {trial}: {loc} {old} -> {new} under `{rule}` gives {m1:?} vs {m2:?}"
            )),
        }
    }
    if r.checked < wanted {
        r.violations.push(format!(
            "only {} coinciding pairs in {budget} attempts",
            r.checked
        ));
    }
    r
}

fn random_bijection(rng: &mut Rng64, s: &State) -> Bijection {
    let atoms: Vec<Atom> = s.base().iter().cloned().collect();
    let mut image = atoms.clone();
    image.shuffle(rng);
    let map: BTreeMap<Atom, Atom> = atoms.into_iter().zip(image).collect();
    Bijection::new(map).expect("a permutation of the base set")
}

/// `step(σ(S)) = σ(step(S))` for random states and permutations σ of their
/// base sets.
pub fn isomorphism_closure(seed: u64, trials: usize) -> Report {
    let mut rng = gen::rng(seed);
    let mut r = Report::new("isomorphism_closure");
    for trial in 0..trials {
        let rule = gen::probe_rule(&mut rng);
        let s = gen::probe_state(&mut rng, &rule);
        let sigma = random_bijection(&mut rng, &s);
        let image = sigma.apply_state(&s).expect("σ moves base atoms only");
        r.checked += 1;
        r.trace(trial, &s);
        let lhs = engine::step(&image).map(|(next, _)| next);
        let rhs = engine::step(&s).and_then(|(next, _)| sigma.apply_state(&next));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => {}
            (Err(_), Err(_)) => {}
            (a, b) => r.violations.push(format!(
                "trial {trial}: `{rule}` under {:?}: {:?} vs {:?}",
                sigma.pairs().collect::<Vec<_>>(),
                a.map(|x| json::to_string(&json::state(&x))),
                b.map(|x| json::to_string(&json::state(&x))),
            )),
        }
    }
    r
}

/// Runs `s` twice and checks determinism, replay and monotonicity. Returns
/// the first violation found.
pub fn check_trace(s: &State, max_steps: usize) -> Option<String> {
    let t1 = engine::run(s, max_steps);
    let t2 = engine::run(s, max_steps);
    let j1 = json::to_string(&json::trace(&t1));
    let j2 = json::to_string(&json::trace(&t2));
    if j1 != j2 {
        return Some("trace JSON differs between runs".into());
    }
    if !t1.signatures_monotone() {
        return Some("signature shrank".into());
    }
    if !t1.replays() {
        return Some("a successor is not the predecessor plus its update set".into());
    }
    None
}

/// Both probes, each with `trials` checked trials. Every trial state is
/// also run twice for determinism and monotonicity.
pub fn all(seed: u64, trials: usize) -> Vec<Report> {
    vec![
        bounded_exploration(seed, trials),
        isomorphism_closure(seed.wrapping_add(1), trials),
    ]
}
