//! Canonical JSON for trees, states and traces.
//!
//! Object keys are sorted and output is compact, so equal traces serialize
//! to identical bytes.

use serde_json::{json, Map, Value as Json};
use sha2::{Digest, Sha256};

use rsasm_core::engine::{StepRecord, Trace};
use rsasm_core::rules::Entry;
use rsasm_core::structures::State;
use rsasm_core::treealg::Tree;

pub fn tree(t: &Tree) -> Json {
    serde_json::to_value(t).expect("trees serialize")
}

pub fn tree_from(j: &Json) -> Result<Tree, serde_json::Error> {
    serde_json::from_value(j.clone())
}

/// SHA-256 over the canonical serialization of a tree.
pub fn digest(t: &Tree) -> String {
    hex::encode(Sha256::digest(to_string(&tree(t)).as_bytes()))
}

pub fn to_string(j: &Json) -> String {
    serde_json::to_string(j).expect("JSON values serialize")
}

pub fn to_string_pretty(j: &Json) -> String {
    serde_json::to_string_pretty(j).expect("JSON values serialize")
}

/// Every defined location except `self`, keyed by its printed form.
pub fn state(s: &State) -> Json {
    let mut m = Map::new();
    for (loc, v) in s.defined() {
        if !loc.is_self() {
            m.insert(loc.to_string(), Json::String(v.to_string()));
        }
    }
    Json::Object(m)
}

fn step(rec: &StepRecord) -> Json {
    let self_tree = rec.before.self_tree();
    let mut m = Map::new();
    m.insert("index".into(), json!(rec.index));
    m.insert("rule".into(), json!(rec.rule.to_string()));
    m.insert("self".into(), self_tree.map_or(Json::Null, tree));
    m.insert(
        "self_digest".into(),
        self_tree.map_or(Json::Null, |t| json!(digest(t))),
    );
    let shared: Vec<Json> = rec
        .multiset
        .entries()
        .iter()
        .filter(|e| matches!(e, Entry::Shared(_)))
        .map(|e| json!(e.to_string()))
        .collect();
    m.insert("shared".into(), Json::Array(shared));
    let added: Vec<Json> = rec
        .signature_added
        .iter()
        .map(|s| json!(s.to_string()))
        .collect();
    m.insert("signature_added".into(), Json::Array(added));
    match (rec.updates(), rec.clash()) {
        (Some(u), _) => {
            let ups: Vec<Json> = u
                .iter()
                .map(|(loc, v)| json!({"location": loc.to_string(), "value": v.to_string()}))
                .collect();
            m.insert("updates".into(), Json::Array(ups));
        }
        (None, Some(c)) => {
            m.insert("updates".into(), Json::Array(Vec::new()));
            m.insert(
                "clash".into(),
                json!({"location": c.location.to_string(), "reason": c.reason}),
            );
        }
        (None, None) => {}
    }
    Json::Object(m)
}

pub fn trace(t: &Trace) -> Json {
    let mut m = Map::new();
    m.insert(
        "steps".into(),
        Json::Array(t.steps.iter().map(step).collect()),
    );
    m.insert("status".into(), json!(t.status.as_str()));
    if let rsasm_core::engine::Status::Error(e) = &t.status {
        m.insert("error".into(), json!(e));
    }
    m.insert("final_state".into(), state(&t.final_state));
    m.insert(
        "final_self".into(),
        t.final_state.self_tree().map_or(Json::Null, tree),
    );
    Json::Object(m)
}

/// The self tree before step `i` of a serialized trace, or the final one
/// when `i` equals the number of steps.
pub fn self_at(trace: &Json, i: usize) -> Result<Tree, String> {
    let steps = trace["steps"]
        .as_array()
        .ok_or("trace has no steps array")?;
    let node = match i.cmp(&steps.len()) {
        std::cmp::Ordering::Less => &steps[i]["self"],
        std::cmp::Ordering::Equal => &trace["final_self"],
        std::cmp::Ordering::Greater => {
            return Err(format!(
                "step {i} is past the end of a {}-step trace",
                steps.len()
            ))
        }
    };
    tree_from(node).map_err(|e| format!("step {i}: {e}"))
}
