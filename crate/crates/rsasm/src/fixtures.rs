//! The bundled example programs and generators for their instances.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

/// Parity of a subset of a six-element set, rewriting its own rule.
pub const PARITY: &str = include_str!("../programs/parity.rsasm");
/// Natural join of two relations, adding the join's function symbols to
/// its own signature.
pub const JOIN: &str = include_str!("../programs/join.rsasm");

pub const PARITY_DOMAIN: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn bundled() -> [(&'static str, &'static str); 2] {
    [("parity.rsasm", PARITY), ("join.rsasm", JOIN)]
}

/// The parity program with `set(x)` true exactly for the flagged members.
pub fn parity_source(members: &[bool; 6]) -> String {
    let init_at = PARITY.find("\nINIT\n").expect("bundled parity has INIT");
    let rule_at = PARITY.find("\nRULE\n").expect("bundled parity has RULE");
    let mut out = String::from(&PARITY[..init_at]);
    out.push_str("\nINIT\n  mode := init\n");
    for (x, m) in PARITY_DOMAIN.iter().zip(members) {
        let _ = writeln!(out, "  set({x}) := {m}");
    }
    out.push_str(&PARITY[rule_at..]);
    out
}

pub const JOIN_DOMAIN: [&str; 3] = ["a", "b", "c"];
pub const JOIN_ATTRIBUTES: [&str; 5] = ["A", "B", "C", "E", "G"];

/// Two relations over attribute lists (in column order) and their tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinCase {
    pub attrs1: Vec<String>,
    pub attrs2: Vec<String>,
    pub r1: BTreeSet<Vec<String>>,
    pub r2: BTreeSet<Vec<String>>,
}

fn all_tuples(n: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                JOIN_DOMAIN.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.to_string());
                    t
                })
            })
            .collect();
    }
    out
}

fn random_relation(rng: &mut impl Rng, arity: usize) -> BTreeSet<Vec<String>> {
    let mut tuples = all_tuples(arity);
    tuples.shuffle(rng);
    let k = rng.gen_range(0..=tuples.len().min(8));
    tuples.into_iter().take(k).collect()
}

fn join_args(prefix: &str, n: usize) -> String {
    (1..=n)
        .map(|i| format!("{prefix}{i}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl JoinCase {
    /// Relations of one to three attributes drawn from a shared pool, with
    /// at most eight tuples each.
    pub fn random(rng: &mut impl Rng) -> Self {
        let pick = |rng: &mut dyn rand::RngCore| {
            let n = rng.gen_range(1..=3);
            let mut pool: Vec<String> = JOIN_ATTRIBUTES.iter().map(|a| a.to_string()).collect();
            pool.shuffle(rng);
            pool.truncate(n);
            pool
        };
        let attrs1 = pick(rng);
        let attrs2 = pick(rng);
        let r1 = random_relation(rng, attrs1.len());
        let r2 = random_relation(rng, attrs2.len());
        JoinCase {
            attrs1,
            attrs2,
            r1,
            r2,
        }
    }

    /// Program text for this instance.
    pub fn source(&self) -> String {
        let (n1, n2) = (self.attrs1.len(), self.attrs2.len());
        let attrs: BTreeSet<&String> = self.attrs1.iter().chain(&self.attrs2).collect();
        let n = attrs.len();
        let mut s = String::new();
        s.push_str("// Natural join of R1 and R2.\n//\n");
        s.push_str("// The init step draws two reserve symbols, appends them to the signature\n");
        s.push_str("// in self with the arity of the joined attribute set, and indexes the new\n");
        s.push_str("// relation's columns. The join step fills both new relations.\n\n");
        let _ = writeln!(s, "DOMAINS\n  D = {{{}}}", JOIN_DOMAIN.join(", "));
        let _ = writeln!(s, "  ATTR = {{{}}}\n", JOIN_ATTRIBUTES.join(", "));
        let _ = writeln!(
            s,
            "SIGNATURE\n  index/2, R1/{n1}, R2/{n2}, mode/0, jname/0, jhatname/0\n"
        );
        s.push_str("DERIVED\n");
        for (r, k) in [("R1", n1), ("R2", n2)] {
            let xs = join_args("x", k);
            let _ = writeln!(
                s,
                "  {r}hat(A, {xs}) = when({r}({xs}) = true, proj(tuple({xs}), index(DROP({r}), A)))"
            );
        }
        s.push_str("\nINIT\n  mode := init\n");
        for (r, attrs) in [("R1", &self.attrs1), ("R2", &self.attrs2)] {
            for (i, a) in attrs.iter().enumerate() {
                let _ = writeln!(s, "  index(DROP({r}), {a}) := {}", i + 1);
            }
        }
        for (r, k, rel) in [("R1", n1, &self.r1), ("R2", n2, &self.r2)] {
            for t in all_tuples(k) {
                let _ = writeln!(s, "  {r}({}) := {}", t.join(", "), rel.contains(&t));
            }
        }
        s.push_str(INIT_RULE);
        s.push_str("    IF mode = join THEN\n      PAR\n");
        let xs = join_args("x", n);
        for i in 1..=n {
            let _ = writeln!(s, "{}PARFOR x{i} IN D", "  ".repeat(3 + i));
        }
        let pad = "  ".repeat(4 + n);
        let hats: Vec<String> = (1..=n2)
            .map(|p| {
                let conj: Vec<String> = JOIN_ATTRIBUTES
                    .iter()
                    .map(|a| {
                        format!(
                            "(index(DROP(R2), {a}) != {p} OR y = proj(tuple({xs}), index(jname, {a})))"
                        )
                    })
                    .collect();
                format!("(IOTA y IN D . {})", conj.join(" AND "))
            })
            .collect();
        let _ = writeln!(
            s,
            "{pad}IF R1({}) = true AND R2({}) = true THEN",
            join_args("x", n1),
            hats.join(", ")
        );
        let _ = writeln!(s, "{pad}  PAR");
        let _ = writeln!(s, "{pad}    RAISE(jname)({xs}) := true");
        let _ = writeln!(s, "{pad}    PARFOR A IN ATTR");
        let _ = writeln!(s, "{pad}      IF index(jname, A) != undef THEN");
        let _ = writeln!(
            s,
            "{pad}        RAISE(jhatname)(A, {xs}) := proj(tuple({xs}), index(jname, A))"
        );
        let _ = writeln!(s, "{pad}      ENDIF");
        let _ = writeln!(s, "{pad}    ENDPARFOR");
        let _ = writeln!(s, "{pad}  ENDPAR");
        let _ = writeln!(s, "{pad}ENDIF");
        for i in (1..=n).rev() {
            let _ = writeln!(s, "{}ENDPARFOR", "  ".repeat(3 + i));
        }
        s.push_str("        mode := halt\n      ENDPAR\n    ENDIF\n  ENDPAR\n");
        s
    }
}

const INIT_RULE: &str = "
RULE
  PAR
    IF mode = init THEN
      LET J = NEWFUNC, Jhat = NEWFUNC IN
      LET ti = {A IN ATTR | index(DROP(R1), A) != undef},
          tj = {A IN ATTR | index(DROP(R2), A) != undef} IN
      LET n = CARD(union(ti, tj)) IN
      PAR
        RAISE(IOTA o IN NODES . child(root(), o) AND label_of(o) = #signature)
          <=[right_extend] func<name(J), arity(n)>, func<name(Jhat), arity(n + 1)>
        PARFOR A IN ATTR
          IF member(A, ti) THEN
            index(J, A) := index(DROP(R1), A)
          ELSE
            IF member(A, minus(tj, ti)) THEN
              index(J, A) := CARD(ti) + index(DROP(R2), A)
                - CARD({B IN ATTR | member(B, inter(ti, tj))
                                    AND lt(index(DROP(R2), B), index(DROP(R2), A))})
            ENDIF
          ENDIF
        ENDPARFOR
        jname := J
        jhatname := Jhat
        mode := join
      ENDPAR
    ENDIF
";

/// The bundled join instance: R1 = {(a)} over A, R2 = {(a), (b)} over A.
pub fn bundled_join_case() -> JoinCase {
    let one = |xs: &[&str]| xs.iter().map(|x| vec![x.to_string()]).collect();
    JoinCase {
        attrs1: vec!["A".into()],
        attrs2: vec!["A".into()],
        r1: one(&["a"]),
        r2: one(&["a", "b"]),
    }
}
