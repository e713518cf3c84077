//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use rsasm::fixtures::{self, JoinCase, PARITY_DOMAIN};
use rsasm::{gen, json, parse_program, probe};
use rsasm_core::engine::{self, Status};
use rsasm_core::reflect::{
    beta, decode_rule, decode_self, decode_signature, drop, drop_rule, drop_term, encode_rule,
    encode_self, encode_signature, labels, raise, Reflected,
};
use rsasm_core::rules::{execute, Outcome, Rule};
use rsasm_core::structures::{Background, Location, Signature, State, Term};
use rsasm_core::treealg::{
    concat, inject_context, inject_hedge, label_context, label_hedge, left_extend, right_extend,
    tree_diff, tree_update_rule, Context, Node, Tree,
};
use rsasm_core::{Label, Path, Value};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Criterion 1

fn parity() -> Verdict {
    let mut worst_steps = 0;
    let mut worst_time = Duration::ZERO;
    for mask in 0u32..64 {
        let members: [bool; 6] = std::array::from_fn(|i| mask & (1 << i) != 0);
        let k = u64::from(mask.count_ones());
        let t0 = Instant::now();
        let program =
            parse_program(&fixtures::parity_source(&members)).map_err(|e| e.to_string())?;
        let trace = program.machine(None).map_err(|e| e.to_string())?.run();
        let elapsed = t0.elapsed();
        let get = |f: &str| trace.final_state.get(&Location::nullary(f));
        let set: Vec<&str> = PARITY_DOMAIN
            .iter()
            .zip(members)
            .filter(|(_, m)| *m)
            .map(|(x, _)| *x)
            .collect();
        ensure(trace.status == Status::Fixpoint, || {
            format!("X = {set:?}: stopped with {}", trace.status.as_str())
        })?;
        ensure(
            get("parity") == Value::Nat(k % 2) && get("card") == Value::Nat(k),
            || format!("X = {set:?}: parity {} card {}", get("parity"), get("card")),
        )?;
        ensure(trace.steps.len() <= 6, || {
            format!("X = {set:?}: {} steps", trace.steps.len())
        })?;
        ensure(elapsed <= Duration::from_millis(50), || {
            format!("X = {set:?}: took {elapsed:?}")
        })?;
        worst_steps = worst_steps.max(trace.steps.len());
        worst_time = worst_time.max(elapsed);
    }
    Ok(format!(
        "64/64 subsets, at most {worst_steps} steps and {:.1} ms per run",
        worst_time.as_secs_f64() * 1e3
    ))
}

// Criterion 2

/// Natural join by nested loops. Columns are R1's attributes followed by
/// R2's attributes that R1 lacks.
fn join_oracle(c: &JoinCase) -> (Vec<String>, BTreeSet<Vec<String>>) {
    let mut cols = c.attrs1.clone();
    cols.extend(c.attrs2.iter().filter(|a| !c.attrs1.contains(a)).cloned());
    let mut out = BTreeSet::new();
    for t1 in &c.r1 {
        for t2 in &c.r2 {
            let mut row: BTreeMap<&String, &String> = c.attrs1.iter().zip(t1).collect();
            let agrees = c
                .attrs2
                .iter()
                .zip(t2)
                .all(|(a, v)| *row.entry(a).or_insert(v) == v);
            if agrees {
                out.insert(cols.iter().map(|a| row[a].clone()).collect());
            }
        }
    }
    (cols, out)
}

fn check_join(c: &JoinCase) -> Result<(), String> {
    let program = parse_program(&c.source()).map_err(|e| e.to_string())?;
    let trace = program.machine(None).map_err(|e| e.to_string())?.run();
    ensure(trace.status == Status::Fixpoint, || {
        format!("{c:?}: stopped with {}", trace.status.as_str())
    })?;
    let s = &trace.final_state;
    let symbol = |f: &str| match s.get(&Location::nullary(f)) {
        Value::Symbol(j) => Ok(j),
        v => Err(format!("{c:?}: {f} holds {v}")),
    };
    let (j, jhat) = (symbol("jname")?, symbol("jhatname")?);
    let got: BTreeSet<Vec<String>> = s
        .defined()
        .filter(|(loc, v)| loc.symbol == j && **v == Value::Bool(true))
        .map(|(loc, _)| loc.args.iter().map(Value::to_string).collect())
        .collect();
    let (cols, want) = join_oracle(c);
    ensure(got == want, || {
        format!("{c:?}: join {got:?}, expected {want:?}")
    })?;
    let (sig, _) = decode_self(s.self_tree().ok_or("no self")?).map_err(|e| e.to_string())?;
    let n = cols.len();
    ensure(
        sig.arity(&j) == Some(n) && sig.arity(&jhat) == Some(n + 1),
        || {
            format!(
                "{c:?}: arities {:?} and {:?} for n = {n}",
                sig.arity(&j),
                sig.arity(&jhat)
            )
        },
    )
}

fn join() -> Verdict {
    let mut rng = gen::rng(0x5eed_0002);
    let mut cases = vec![fixtures::bundled_join_case()];
    cases.extend((0..200).map(|_| JoinCase::random(&mut rng)));
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(8);
    let chunk = cases.len().div_ceil(workers);
    let results: Vec<Result<(), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().try_for_each(check_join)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    results.into_iter().collect::<Result<(), String>>()?;
    Ok(format!(
        "{} cases match the nested-loop join; J has arity n and its companion n + 1",
        cases.len()
    ))
}

// Criterion 3

/// Preorder listing of `(depth, label, value)`.
type Flat = Vec<(usize, String, Option<String>)>;

fn flat_node(n: &Node, depth: usize, out: &mut Flat) {
    out.push((
        depth,
        n.label.to_string(),
        n.value.as_ref().map(Value::to_string),
    ));
    for c in &n.children {
        flat_node(c, depth + 1, out);
    }
}

fn flat(t: &Tree) -> Flat {
    let mut out = Vec::new();
    flat_node(t.root(), 0, &mut out);
    out
}

fn shifted(f: &Flat, by: usize) -> Flat {
    f.iter()
        .map(|(d, l, v)| (d + by, l.clone(), v.clone()))
        .collect()
}

fn position(t: &Tree, p: &Path) -> usize {
    t.preorder()
        .iter()
        .position(|(q, _)| q == p)
        .expect("node of t")
}

/// Replaces the subtree starting at preorder index `i` by `by`.
fn splice(f: &Flat, i: usize, by: &[Flat]) -> Flat {
    let depth = f[i].0;
    let end = (i + 1..f.len())
        .find(|&j| f[j].0 <= depth)
        .unwrap_or(f.len());
    let mut out = f[..i].to_vec();
    for g in by {
        out.extend(shifted(g, depth));
    }
    out.extend_from_slice(&f[end..]);
    out
}

fn holes(t: &Tree) -> usize {
    flat(t).iter().filter(|(_, l, _)| l == Label::HOLE).count()
}

fn rooted(label: &str, hedge: &[Flat]) -> Flat {
    let mut out = vec![(0, label.to_string(), None)];
    for h in hedge {
        out.extend(shifted(h, 1));
    }
    out
}

fn children_flats(t: &Tree) -> Vec<Flat> {
    t.children().iter().map(flat).collect()
}

fn algebra_trial(rng: &mut gen::Rng64) -> Result<(), String> {
    let e = |e: rsasm_core::Error| e.to_string();
    let t = gen::tree(rng, 20);
    let t2 = gen::tree(rng, 20);
    let o = gen::node_of(rng, &t);
    let i = position(&t, &o);
    let sub = t.subtree_at(&o).map_err(e)?;
    let hole = vec![(0, Label::HOLE.to_string(), None)];

    let tt = t.subst_tt_at(&o, t2.clone()).map_err(e)?;
    ensure(flat(&tt) == splice(&flat(&t), i, &[flat(&t2)]), || {
        "subst_tt".into()
    })?;
    let tc = t.subst_tc_at(&o).map_err(e)?;
    ensure(
        flat(tc.tree()) == splice(&flat(&t), i, std::slice::from_ref(&hole)),
        || "subst_tc".into(),
    )?;
    ensure(holes(tc.tree()) == 1, || "subst_tc hole count".into())?;
    ensure(tc.subst_ct(&sub) == t, || "subst_ct ∘ subst_tc".into())?;
    ensure(tc.subst_ct(&t2) == tt, || "subst_ct vs subst_tt".into())?;
    ensure(
        inject_hedge(&tc, vec![sub.clone()]).map_err(e)? == t,
        || "inject_hedge of the cut subtree".into(),
    )?;

    // context(o1, o2) for a proper ancestor o1 of o2
    if let Some(o1) = o.parent() {
        let depth = rng.gen_range(0..=o1.depth());
        let o1 = Path(o1.0[..depth].to_vec());
        let c = t.context_at(&o1, &o).map_err(e)?;
        ensure(holes(c.tree()) == 1, || "context hole count".into())?;
        ensure(
            inject_hedge(&c, vec![sub.clone()]).map_err(e)? == t.subtree_at(&o1).map_err(e)?,
            || "inject_hedge ∘ context".into(),
        )?;
    } else {
        ensure(t.context_at(&o, &o).is_err(), || {
            "context(o, o) accepted".into()
        })?;
    }

    let c1 = gen::context(rng, 20);
    let c2 = gen::context(rng, 20);
    let c3 = gen::context(rng, 20);
    let cc = c1.subst_cc(&c2);
    ensure(
        flat(cc.tree())
            == splice(
                &flat(c1.tree()),
                position(c1.tree(), &c1.hole_path()),
                &[flat(c2.tree())],
            ),
        || "subst_cc".into(),
    )?;
    ensure(holes(cc.tree()) == 1, || "subst_cc hole count".into())?;
    ensure(cc.subst_cc(&c3) == c1.subst_cc(&c2.subst_cc(&c3)), || {
        "subst_cc associativity".into()
    })?;
    ensure(cc.subst_ct(&t) == c1.subst_ct(&c2.subst_ct(&t)), || {
        "subst_ct ∘ subst_cc".into()
    })?;
    ensure(
        c1.subst_cc(&Context::hole()) == c1 && Context::hole().subst_cc(&c1) == c1,
        || "ξ is a unit".into(),
    )?;
    ensure(inject_context(&c1, &c2) == cc, || "inject_context".into())?;

    let (h1, h2, h3) = (
        gen::hedge(rng, 20),
        gen::hedge(rng, 20),
        gen::hedge(rng, 20),
    );
    ensure(
        concat(&concat(&h1, &h2), &h3) == concat(&h1, &concat(&h2, &h3)),
        || "concat associativity".into(),
    )?;
    ensure(concat(&h1, &[]) == h1 && concat(&[], &h1) == h1, || {
        "ε is a unit".into()
    })?;
    let flats = |h: &[Tree]| h.iter().map(flat).collect::<Vec<_>>();

    let lh = label_hedge(Label::new("lz"), h1.clone());
    ensure(flat(&lh) == rooted("lz", &flats(&h1)), || {
        "label_hedge".into()
    })?;
    let lc = label_context(Label::new("lz"), &c1);
    ensure(flat(lc.tree()) == rooted("lz", &[flat(c1.tree())]), || {
        "label_context".into()
    })?;
    ensure(holes(lc.tree()) == 1, || "label_context hole count".into())?;

    if c1.is_trivial() {
        ensure(left_extend(h1.clone(), &c1).is_err(), || {
            "extending ξ accepted".into()
        })?;
    } else {
        let label = c1.tree().label().to_string();
        let kids = children_flats(c1.tree());
        let l = left_extend(h1.clone(), &c1).map_err(e)?;
        let r = right_extend(h1.clone(), &c1).map_err(e)?;
        let mut want_l = flats(&h1);
        want_l.extend(kids.clone());
        let mut want_r = kids;
        want_r.extend(flats(&h1));
        ensure(flat(l.tree()) == rooted(&label, &want_l), || {
            "left_extend".into()
        })?;
        ensure(flat(r.tree()) == rooted(&label, &want_r), || {
            "right_extend".into()
        })?;
        ensure(holes(l.tree()) == 1 && holes(r.tree()) == 1, || {
            "extend hole count".into()
        })?;
    }

    let injected = inject_hedge(&c1, h2.clone());
    if c1.is_trivial() && h2.len() != 1 {
        ensure(injected.is_err(), || "hedge into ξ accepted".into())?;
    } else {
        let want = splice(
            &flat(c1.tree()),
            position(c1.tree(), &c1.hole_path()),
            &flats(&h2),
        );
        ensure(flat(&injected.map_err(e)?) == want, || {
            "inject_hedge".into()
        })?;
    }
    Ok(())
}

fn tree_algebra() -> Verdict {
    let mut rng = gen::rng(0x5eed_0003);
    for trial in 0..1000 {
        algebra_trial(&mut rng).map_err(|m| format!("trial {trial}: {m}"))?;
    }
    Ok("1000 random trees, contexts and hedges satisfy every law".into())
}

// Criterion 4

fn self_pair(rng: &mut gen::Rng64) -> (Tree, Tree) {
    let t = gen::self_tree(rng);
    let t2 = match rng.gen_range(0..3) {
        0 => gen::self_tree(rng),
        1 => {
            let other = gen::self_tree(rng);
            let o = gen::node_of(rng, &t);
            let piece = other.subtree_at(&gen::node_of(rng, &other)).expect("node");
            t.subst_tt_at(&o, piece).expect("node")
        }
        _ => {
            let rule = gen::probe_rule(rng);
            let s = gen::probe_state(rng, &rule);
            let before = s.self_tree().expect("self").clone();
            match engine::step(&s) {
                Ok((next, _)) => return (before, next.self_tree().expect("self").clone()),
                Err(_) => gen::self_tree(rng),
            }
        }
    };
    (t, t2)
}

fn tree_diff_laws() -> Verdict {
    let mut rng = gen::rng(0x5eed_0004);
    let mut checked = 0;
    while checked < 200 {
        let (t, t2) = self_pair(&mut rng);
        if t == t2 {
            continue;
        }
        checked += 1;
        let theta = tree_diff(&t, &t2);
        let got = theta
            .eval(&t)
            .and_then(|v| v.into_tree())
            .map_err(|e| format!("θ = {theta}: {e}"))?;
        ensure(got == t2, || {
            format!("eval(θ, t) differs from t2 for θ = {theta}")
        })?;

        let rule = tree_update_rule(&t, &t2);
        let mut s = State::new(Signature::with_self(), Background::default());
        s.set(Location::self_location(), Value::Tree(t.clone()))
            .map_err(|e| e.to_string())?;
        match execute(&s, &rule).map_err(|e| format!("{rule}: {e}"))?.1 {
            Outcome::Updates(u) => {
                let only = u.len() == 1
                    && u.get(&Location::self_location()) == Some(&Value::Tree(t2.clone()));
                ensure(only, || format!("{rule} collapses to {u}"))?;
            }
            Outcome::Clash(c) => return Err(format!("{rule} clashes at {}", c.location)),
        }
    }
    Ok(format!("{checked} distinct self-shaped pairs"))
}

// Criterion 5

fn raised_term(v: &Value) -> Result<Term, String> {
    match raise(v).map_err(|e| e.to_string())? {
        Reflected::Term(t) => Ok(t),
        other => Err(format!("{v} raises to {other:?}")),
    }
}

fn group(n: &Tree) -> Result<Vec<Term>, String> {
    ensure(n.label().as_str() == labels::TERM, || {
        format!("expected term group, got {n}")
    })?;
    n.children()
        .iter()
        .map(|c| raised_term(c.value().ok_or("term leaf without value")?))
        .collect()
}

fn only_child(n: &Tree, label: &str) -> Result<Tree, String> {
    let kids = n.children();
    ensure(n.label().as_str() == label && kids.len() == 1, || {
        format!("expected {label}<…>, got {n}")
    })?;
    Ok(kids[0].clone())
}

/// The applied function of an `update` or `partial`: a symbol, or a dynamic
/// target raised in place.
fn applied(func: &Tree, args: Vec<Term>) -> Result<(Term, Option<Term>), String> {
    match func.value() {
        Some(Value::Symbol(f)) => Ok((Term::App(f.clone(), args), None)),
        Some(v) => {
            let t = raised_term(v)?;
            Ok((Term::Raise(Box::new(t.clone()), Some(args)), Some(t)))
        }
        None => Err("func leaf without value".into()),
    }
}

/// The extraction function read off the encoding, one equation per rule
/// label. Dynamic targets add their target term.
fn beta_oracle(t: &Tree, seen: &mut BTreeSet<String>) -> Result<Vec<Term>, String> {
    let kids = t.children();
    let label = t.label().as_str().to_string();
    seen.insert(label.clone());
    match label.as_str() {
        labels::UPDATE => {
            let args = group(&kids[1])?;
            let value = group(&kids[2])?;
            let (_, dynamic) = applied(&kids[0], args.clone())?;
            let mut out = value;
            out.extend(args);
            out.extend(dynamic);
            Ok(out)
        }
        labels::IF => {
            let mut out = vec![raised_term(
                kids[0].value().ok_or("bool leaf without value")?,
            )?];
            for k in &kids[1..] {
                out.extend(beta_oracle(&only_child(k, labels::RULE)?, seen)?);
            }
            Ok(out)
        }
        labels::PAR => {
            let mut out = Vec::new();
            for k in &kids {
                out.extend(beta_oracle(&only_child(k, labels::RULE)?, seen)?);
            }
            Ok(out)
        }
        labels::LET => {
            let x = match group(&kids[0])?.as_slice() {
                [Term::Var(x)] => x.clone(),
                other => return Err(format!("let binds {other:?}")),
            };
            let value = group(&kids[1])?;
            let body =
                decode_rule(&only_child(&kids[2], labels::RULE)?).map_err(|e| e.to_string())?;
            let mut out = value.clone();
            out.extend(beta_oracle(
                &encode_rule(&body.substitute(&x, &value[0])),
                seen,
            )?);
            Ok(out)
        }
        labels::PARTIAL => {
            let args = group(&kids[2])?;
            let operands = group(&kids[3])?;
            let op = match kids[1].value() {
                Some(Value::Symbol(op)) => op.clone(),
                other => return Err(format!("operator leaf holds {other:?}")),
            };
            let (target, dynamic) = applied(&kids[0], args.clone())?;
            let mut out = args;
            let mut op_args = vec![target];
            op_args.extend(operands);
            out.push(Term::Op(op, op_args));
            out.extend(dynamic);
            Ok(out)
        }
        other => Err(format!("not a rule label: {other}")),
    }
}

fn leaf_values(t: &Tree) -> Vec<Value> {
    t.preorder()
        .iter()
        .filter_map(|(_, n)| n.value.clone())
        .collect()
}

fn reflection_trial(rng: &mut gen::Rng64, seen: &mut BTreeSet<String>) -> Result<(), String> {
    let sig = gen::any_signature(rng);
    let depth = rng.gen_range(0..5);
    let r: Rule = gen::any_rule(rng, depth);
    let tree = encode_rule(&r);
    ensure(decode_rule(&tree).as_ref() == Ok(&r), || {
        format!("decode ∘ encode on {r}")
    })?;
    ensure(
        decode_signature(&encode_signature(&sig)).as_ref() == Ok(&sig),
        || format!("decode ∘ encode on {sig}"),
    )?;
    ensure(
        decode_self(&encode_self(&sig, &r)) == Ok((sig.clone(), r.clone())),
        || format!("decode_self ∘ encode_self on {r}"),
    )?;
    let dropped = drop_rule(&r);
    ensure(raise(&dropped) == Ok(Reflected::Rule(r.clone())), || {
        format!("raise ∘ drop on {r}")
    })?;
    for t in r.terms() {
        ensure(
            raise(&drop_term(t)) == Ok(Reflected::Term(t.clone())),
            || format!("raise ∘ drop on {t}"),
        )?;
    }
    let mut values = leaf_values(&tree);
    values.push(dropped);
    for v in values {
        let back = raise(&v).map(|x| drop(&x));
        ensure(back.as_ref() == Ok(&v), || format!("drop ∘ raise on {v}"))?;
    }
    let want = beta_oracle(&tree, seen)?;
    let got = beta(&tree).map_err(|e| e.to_string())?;
    ensure(got == want, || format!("β on {r}: {got:?} vs {want:?}"))
}

fn reflection() -> Verdict {
    let mut rng = gen::rng(0x5eed_0005);
    let mut seen = BTreeSet::new();
    for trial in 0..500 {
        reflection_trial(&mut rng, &mut seen).map_err(|m| format!("trial {trial}: {m}"))?;
    }
    let all: BTreeSet<String> = [
        labels::UPDATE,
        labels::IF,
        labels::PAR,
        labels::LET,
        labels::PARTIAL,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    ensure(seen == all, || format!("β equations exercised: {seen:?}"))?;
    Ok("500 rule trees; all five β equations exercised".into())
}

// Criteria 6 to 8

const PROBE_SEED: u64 = 0x5eed_0006;

fn probe_line(r: &probe::Report, wanted: usize) -> Verdict {
    ensure(r.checked >= wanted, || {
        format!("only {} trials checked", r.checked)
    })?;
    ensure(r.violations.is_empty(), || {
        format!(
            "{} violations, first: {}",
            r.violations.len(),
            r.violations[0]
        )
    })?;
    Ok(format!(
        "{} trials, 0 violations ({} without coincidence skipped)",
        r.checked, r.skipped
    ))
}

fn fixtures_and_probes(reports: &[probe::Report]) -> Verdict {
    for (name, src) in fixtures::bundled() {
        let run = || -> Result<String, String> {
            let program = parse_program(src).map_err(|e| format!("{name}: {e}"))?;
            let machine = program.machine(None).map_err(|e| format!("{name}: {e}"))?;
            let trace = machine.run();
            ensure(trace.signatures_monotone(), || {
                format!("{name}: signature shrank")
            })?;
            ensure(trace.replays(), || format!("{name}: trace does not replay"))?;
            Ok(json::to_string(&json::trace(&trace)))
        };
        let (a, b) = (run()?, run()?);
        ensure(a == b, || {
            format!("{name}: trace JSON differs between runs")
        })?;
        if let Some(v) =
            probe::check_trace(&parse_program(src).unwrap().initial_state().unwrap(), 1000)
        {
            return Err(format!("{name}: {v}"));
        }
    }
    let mut traces = 0;
    for r in reports {
        ensure(r.trace_violations.is_empty(), || {
            format!("{}: {}", r.name, r.trace_violations[0])
        })?;
        traces += r.traces;
    }
    let again = [
        probe::bounded_exploration(PROBE_SEED, 500),
        probe::isomorphism_closure(PROBE_SEED + 1, 300),
    ];
    ensure(again == reports, || {
        "probe reports differ on a re-run with the same seed".into()
    })?;
    Ok(format!(
        "{} bundled fixtures and {traces} probe trials: byte-identical traces, monotone signatures",
        fixtures::bundled().len()
    ))
}

fn main() -> ExitCode {
    let t0 = Instant::now();
    let mut failed = 0;
    let mut line = |n: usize, name: &str, v: Verdict| match v {
        Ok(detail) => println!("PASS [{n}] {name}: {detail}"),
        Err(why) => {
            failed += 1;
            println!("FAIL [{n}] {name}: {why}");
        }
    };
    line(1, "parity fixture", parity());
    line(2, "join fixture", join());
    line(3, "tree algebra laws", tree_algebra());
    line(4, "tree diff and update rule", tree_diff_laws());
    line(5, "reflection round trips and β", reflection());
    let reports = [
        probe::bounded_exploration(PROBE_SEED, 500),
        probe::isomorphism_closure(PROBE_SEED + 1, 300),
    ];
    line(
        6,
        "bounded exploration witness",
        probe_line(&reports[0], 500),
    );
    line(7, "isomorphism closure", probe_line(&reports[1], 200));
    line(
        8,
        "determinism and monotonicity",
        fixtures_and_probes(&reports),
    );
    println!(
        "{} of 8 criteria passed in {:.1} s",
        8 - failed,
        t0.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
