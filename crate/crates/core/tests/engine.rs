use rsasm_core::engine::{run, Machine, Status};
use rsasm_core::reflect::{decode_self, encode_self, labels};
use rsasm_core::rules::{Rule, Target};
use rsasm_core::structures::{
    Background, Builtin, Domain, FunctionSymbol, LitBody, LitItem, Location, Signature, State,
    Term, TreeLit,
};
use rsasm_core::{Label, Value};

fn machine(rule: Rule, symbols: &[(&str, usize)]) -> State {
    let mut sig = Signature::with_self();
    for (f, n) in symbols {
        sig.add(FunctionSymbol::new(*f, *n)).unwrap();
    }
    let mut s = State::new(sig.clone(), Background::default());
    s.set(
        Location::self_location(),
        Value::Tree(encode_self(&sig, &rule)),
    )
    .unwrap();
    s
}

fn c() -> Location {
    Location::nullary("c")
}

#[test]
fn partial_updates_to_one_location_are_summed() {
    let add = |k: u64| Rule::Partial {
        target: Target::Symbol("c".into()),
        op: "+".into(),
        args: vec![],
        operands: vec![Term::constant(k)],
    };
    let mut s = machine(Rule::Par(vec![add(2), add(3)]), &[("c", 0)]);
    s.set(c(), Value::Nat(1)).unwrap();
    let trace = run(&s, 1);
    assert_eq!(trace.final_state.get(&c()), Value::Nat(6));
}

/// `LET v = NEWFUNC IN PAR signature <=[right_extend] func<name(v), arity(0)> c := v ENDPAR`
#[test]
fn new_function_extends_the_decoded_signature() {
    let sig_node = Term::Iota {
        var: "o".into(),
        domain: Domain::Nodes,
        cond: Box::new(Term::and(vec![
            Term::builtin(
                Builtin::Child,
                vec![Term::builtin(Builtin::Root, vec![]), Term::var("o")],
            ),
            Term::eq(
                Term::builtin(Builtin::LabelOf, vec![Term::var("o")]),
                Term::constant(Value::label(labels::SIGNATURE)),
            ),
        ])),
    };
    let leaf = |l: &str, t: Term| {
        LitItem::Node(TreeLit {
            label: Label::new(l),
            body: LitBody::Valued(Box::new(t)),
        })
    };
    let func = Term::TreeLit(TreeLit {
        label: Label::new(labels::FUNC),
        body: LitBody::Children(vec![
            leaf(labels::NAME, Term::var("v")),
            leaf(labels::ARITY, Term::constant(0u64)),
        ]),
    });
    let rule = Rule::Let {
        var: "v".into(),
        value: Term::NewFunc,
        body: Box::new(Rule::Par(vec![
            Rule::Partial {
                target: Target::Dynamic(sig_node),
                op: "right_extend".into(),
                args: vec![],
                operands: vec![func],
            },
            Rule::assign("c", vec![], Term::var("v")),
        ])),
    };
    let trace = Machine::new(machine(rule, &[("c", 0)]), 3).unwrap().run();
    assert_eq!(trace.status, Status::MaxSteps);
    assert!(trace.signatures_monotone());
    assert!(trace.replays());
    let (sig, _) = decode_self(trace.final_state.self_tree().unwrap()).unwrap();
    assert_eq!(sig.len(), 5, "{sig}");
    assert_eq!(trace.final_state.get(&c()), Value::symbol("f$3"));
    assert_eq!(
        trace.steps[0].signature_added,
        vec![FunctionSymbol::new("f$1", 0)]
    );
}

#[test]
fn a_rule_can_replace_itself() {
    // c := 1 and self := (the program with rule IF c = 1 THEN c := 2 ENDIF)
    let mut sig = Signature::with_self();
    sig.add(FunctionSymbol::new("c", 0)).unwrap();
    let bump = Rule::If {
        cond: Term::eq(Term::nullary("c"), Term::constant(1u64)),
        then: Box::new(Rule::assign("c", vec![], Term::constant(2u64))),
        otherwise: None,
    };
    let next = encode_self(&sig, &bump);
    let rule = Rule::Par(vec![
        Rule::assign("c", vec![], Term::constant(1u64)),
        Rule::assign("self", vec![], Term::constant(Value::Tree(next))),
    ]);
    let trace = run(&machine(rule, &[("c", 0)]), 10);
    assert_eq!(trace.status, Status::Fixpoint);
    let values: Vec<Value> = (1..=trace.steps.len())
        .map(|i| trace.state_at(i).unwrap().get(&c()))
        .collect();
    assert_eq!(values, vec![Value::Nat(1), Value::Nat(2), Value::Nat(2)]);
}

#[test]
fn a_broken_self_stops_the_run_with_an_error() {
    let rule = Rule::assign("self", vec![], Term::constant(1u64));
    let trace = run(&machine(rule, &[]), 10);
    assert!(
        matches!(trace.status, Status::Error(_)),
        "{:?}",
        trace.status
    );
    assert_eq!(trace.steps.len(), 0);
}
