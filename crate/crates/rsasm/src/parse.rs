//! Lexer and parser for `.rsasm` program files.
//!
//! A program has up to six sections, each introduced by its keyword:
//!
//! ```text
//! DOMAINS    D = {a, b, c}
//! SIGNATURE  mode/0, card/0, set/1
//! DERIVED    twice(x) = x + x
//! INIT       mode := init  set(a) := true
//! RULE       IF mode = init THEN ... ENDIF
//! OPTIONS    max_steps = 20
//! ```
//!
//! Bare identifiers resolve, in order, to a bound variable, a signature or
//! derived function, a declared domain, and finally to an atom. Per-element
//! rule families (`PARFOR x IN D ... ENDPARFOR`) and comprehensions
//! (`{x IN D | phi}`) are expanded here over the declared domain values.

use std::collections::{BTreeMap, BTreeSet};

use rsasm_core::reflect::drop_term;
use rsasm_core::rules::{Operator, Rule, Target};
use rsasm_core::structures::{
    eval_term, Background, Builtin, Connective, Derived, Domain, FunctionSymbol, LitBody, LitItem,
    Location, Signature, State, Term, TreeLit, SELF,
};
use rsasm_core::treealg::Context;
use rsasm_core::{Label, Path, Value};

use crate::program::{Options, Program};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error(transparent)]
    Invalid(#[from] rsasm_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCT: [&str; 19] = [
    ":=", "!=", "<=", "(", ")", "<", ">", ",", "=", "+", "-", ".", "{", "}", "|", "#", "[", "]",
    "/",
];

const SECTIONS: [&str; 6] = ["DOMAINS", "SIGNATURE", "DERIVED", "INIT", "RULE", "OPTIONS"];

const KEYWORDS: [&str; 23] = [
    "IF",
    "THEN",
    "ELSE",
    "ENDIF",
    "PAR",
    "ENDPAR",
    "LET",
    "IN",
    "PARFOR",
    "ENDPARFOR",
    "AND",
    "OR",
    "NOT",
    "IOTA",
    "NODES",
    "DROP",
    "RAISE",
    "SYM",
    "NODE",
    "XI",
    "NEWFUNC",
    "MOD",
    "OP",
];

fn is_reserved(s: &str) -> bool {
    KEYWORDS.contains(&s) || SECTIONS.contains(&s) || ["true", "false", "undef"].contains(&s)
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || "_$".contains(chars[i])) {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
                col += 1;
            }
            let n = s.parse().map_err(|_| ParseError::Syntax {
                line: start.0,
                col: start.1,
                msg: format!("number {s} is too large"),
            })?;
            Tok::Nat(n)
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => {
                    i += p.len();
                    col += p.len();
                    Tok::Punct(p)
                }
                None => {
                    return Err(ParseError::Syntax {
                        line,
                        col,
                        msg: format!("unexpected character {c:?}"),
                    })
                }
            }
        };
        out.push(Token {
            tok,
            line: start.0,
            col: start.1,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Names visible while parsing terms and rules.
#[derive(Debug, Default, Clone)]
struct Scope {
    signature: Signature,
    derived: BTreeSet<String>,
    domains: BTreeMap<String, Vec<Value>>,
    vars: Vec<String>,
}

impl Scope {
    fn is_function(&self, name: &str) -> bool {
        self.signature.contains(name) || self.derived.contains(name)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(toks: Vec<Token>, scope: Scope) -> Self {
        Parser {
            toks,
            pos: 0,
            scope,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.at_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.error(format!("expected {k}, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_reserved(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn nat(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(format!("expected a number, found {}", self.describe())),
        }
    }

    fn at_end(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    /// Introduces a variable, rejecting shadowing of anything in scope.
    fn bind(&mut self, x: &str) -> PResult<()> {
        if self.scope.vars.iter().any(|v| v == x) {
            return self.error(format!("variable {x} shadows an enclosing binding"));
        }
        if self.scope.is_function(x) {
            return self.error(format!("variable {x} shadows a function symbol"));
        }
        if self.scope.domains.contains_key(x) {
            return self.error(format!("variable {x} shadows a domain"));
        }
        self.scope.vars.push(x.to_string());
        Ok(())
    }

    fn unbind(&mut self) {
        self.scope.vars.pop();
    }

    fn domain_values(&self, d: &str) -> PResult<Vec<Value>> {
        match self.scope.domains.get(d) {
            Some(vs) => Ok(vs.clone()),
            None => self.error(format!("{d} is not a declared finite domain")),
        }
    }

    fn list<T>(
        &mut self,
        close: &str,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_punct(close) {
                return Ok(out);
            }
            self.expect_punct(",")?;
        }
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect_punct("(")?;
        self.list(")", Self::term)
    }

    // ---- terms -------------------------------------------------------

    fn term(&mut self) -> PResult<Term> {
        self.disjunction()
    }

    fn disjunction(&mut self) -> PResult<Term> {
        let first = self.conjunction()?;
        if !self.at_kw("OR") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_kw("OR") {
            items.push(self.conjunction()?);
        }
        Ok(Term::Bool(Connective::Or, items))
    }

    fn conjunction(&mut self) -> PResult<Term> {
        let first = self.negation()?;
        if !self.at_kw("AND") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_kw("AND") {
            items.push(self.negation()?);
        }
        Ok(Term::Bool(Connective::And, items))
    }

    fn negation(&mut self) -> PResult<Term> {
        if self.eat_kw("NOT") {
            return Ok(Term::negate(self.negation()?));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Term> {
        let a = self.additive()?;
        if self.eat_punct("=") {
            Ok(Term::eq(a, self.additive()?))
        } else if self.eat_punct("!=") {
            Ok(Term::negate(Term::eq(a, self.additive()?)))
        } else {
            Ok(a)
        }
    }

    fn additive(&mut self) -> PResult<Term> {
        let mut a = self.multiplicative()?;
        loop {
            let b = if self.eat_punct("+") {
                Builtin::Add
            } else if self.eat_punct("-") {
                Builtin::Sub
            } else {
                return Ok(a);
            };
            a = Term::Builtin(b, vec![a, self.multiplicative()?]);
        }
    }

    fn multiplicative(&mut self) -> PResult<Term> {
        let mut a = self.primary()?;
        while self.eat_kw("MOD") {
            a = Term::Builtin(Builtin::Mod, vec![a, self.primary()?]);
        }
        Ok(a)
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(Term::Const(Value::Nat(n)))
            }
            Tok::Punct("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_punct(")")?;
                Ok(t)
            }
            Tok::Punct("#") => {
                self.bump();
                Ok(Term::Const(Value::Label(Label::new(self.label_name()?))))
            }
            Tok::Punct("{") => self.braces(),
            Tok::Ident(s) => self.ident_term(&s),
            _ => self.error(format!("expected a term, found {}", self.describe())),
        }
    }

    fn label_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected a label, found {}", self.describe())),
        }
    }

    /// `{t, ...}` set literals and `{x IN D | phi}` comprehensions.
    fn braces(&mut self) -> PResult<Term> {
        self.expect_punct("{")?;
        let comprehension = matches!(self.peek(), Tok::Ident(_))
            && matches!(self.peek_at(1), Tok::Ident(k) if k == "IN");
        if !comprehension {
            let items = self.list("}", Self::term)?;
            return Ok(Term::Builtin(Builtin::SetOf, items));
        }
        let x = self.ident()?;
        self.expect_kw("IN")?;
        if self.at_kw("NODES") {
            return self.error("comprehensions range over declared domains only");
        }
        let d = self.ident()?;
        let values = self.domain_values(&d)?;
        self.expect_punct("|")?;
        self.bind(&x)?;
        let cond = self.term()?;
        self.unbind();
        self.expect_punct("}")?;
        let mut args = Vec::new();
        for v in values {
            let c = Term::Const(v.clone());
            args.push(cond.substitute(&x, &c));
            args.push(c);
        }
        Ok(Term::Builtin(Builtin::Select, args))
    }

    fn ident_term(&mut self, s: &str) -> PResult<Term> {
        match s {
            "true" | "false" => {
                self.bump();
                return Ok(Term::Const(Value::Bool(s == "true")));
            }
            "undef" => {
                self.bump();
                return Ok(Term::Const(Value::Undef));
            }
            "XI" => {
                self.bump();
                return Ok(Term::Const(Value::Context(Context::hole())));
            }
            "NEWFUNC" => {
                self.bump();
                return Ok(Term::NewFunc);
            }
            "IOTA" => return self.iota(),
            "DROP" => return self.drop_form(),
            "RAISE" => {
                self.bump();
                self.expect_punct("(")?;
                let t = self.term()?;
                self.expect_punct(")")?;
                let args = if self.at_punct("(") {
                    Some(self.args()?)
                } else {
                    None
                };
                return Ok(Term::Raise(Box::new(t), args));
            }
            "SYM" => {
                self.bump();
                self.expect_punct("(")?;
                let name = self.symbol_name()?;
                self.expect_punct(")")?;
                return Ok(Term::Const(Value::Symbol(name)));
            }
            "NODE" => {
                self.bump();
                self.expect_punct("(")?;
                let steps = self.list(")", |p| p.nat().map(|n| n as usize))?;
                return Ok(Term::Const(Value::Node(Path(steps))));
            }
            "OP" => {
                self.bump();
                self.expect_punct("[")?;
                let op = self.symbol_name()?;
                self.expect_punct("]")?;
                Operator::from_name(&op)?;
                let args = self.args()?;
                return Ok(Term::Op(op, args));
            }
            _ if is_reserved(s) => {
                return self.error(format!("unexpected keyword {s}"));
            }
            _ => {}
        }
        if matches!(self.peek_at(1), Tok::Punct("<")) {
            return self.tree_lit().map(Term::TreeLit);
        }
        self.bump();
        let call = self.at_punct("(");
        if self.scope.vars.iter().any(|v| v == s) {
            if call {
                return self.error(format!("variable {s} cannot be applied"));
            }
            return Ok(Term::Var(s.to_string()));
        }
        if self.scope.is_function(s) {
            let args = if call { self.args()? } else { Vec::new() };
            return Ok(Term::App(s.to_string(), args));
        }
        if call {
            if let Some(b) = Builtin::from_name(s) {
                return Ok(Term::Builtin(b, self.args()?));
            }
            self.expect_punct("(")?;
            let t = self.term()?;
            self.expect_punct(")")?;
            return Ok(Term::TreeLit(TreeLit {
                label: Label::new(s),
                body: LitBody::Valued(Box::new(t)),
            }));
        }
        if self.scope.domains.contains_key(s) {
            return Ok(Term::Domain(s.to_string()));
        }
        Ok(Term::Const(Value::atom(s)))
    }

    fn symbol_name(&mut self) -> PResult<String> {
        if self.eat_punct("+") {
            return Ok("+".into());
        }
        self.ident()
    }

    fn iota(&mut self) -> PResult<Term> {
        self.expect_kw("IOTA")?;
        let x = self.ident()?;
        self.expect_kw("IN")?;
        let domain = if self.eat_kw("NODES") {
            Domain::Nodes
        } else {
            let d = self.ident()?;
            self.domain_values(&d)?;
            Domain::Named(d)
        };
        self.expect_punct(".")?;
        self.bind(&x)?;
        let cond = self.term()?;
        self.unbind();
        Ok(Term::Iota {
            var: x,
            domain,
            cond: Box::new(cond),
        })
    }

    /// `DROP(f)` of a function or operator name is the symbol itself;
    /// `DROP(t)` of any other term is its term value.
    fn drop_form(&mut self) -> PResult<Term> {
        self.expect_kw("DROP")?;
        self.expect_punct("(")?;
        let bare = match (self.peek().clone(), self.peek_at(1)) {
            (Tok::Punct("+"), Tok::Punct(")")) => Some("+".to_string()),
            (Tok::Ident(s), Tok::Punct(")"))
                if self.scope.is_function(&s) || Operator::from_name(&s).is_ok() =>
            {
                Some(s)
            }
            _ => None,
        };
        let v = match bare {
            Some(name) => {
                self.bump();
                Value::Symbol(name)
            }
            None => drop_term(&self.term()?),
        };
        self.expect_punct(")")?;
        Ok(Term::Const(v))
    }

    fn tree_lit(&mut self) -> PResult<TreeLit> {
        let label = Label::new(self.label_name()?);
        if self.eat_punct("(") {
            let t = self.term()?;
            self.expect_punct(")")?;
            return Ok(TreeLit {
                label,
                body: LitBody::Valued(Box::new(t)),
            });
        }
        self.expect_punct("<")?;
        let items = self.list(">", Self::lit_item)?;
        Ok(TreeLit {
            label,
            body: LitBody::Children(items),
        })
    }

    fn lit_item(&mut self) -> PResult<LitItem> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "XI" => {
                self.bump();
                Ok(LitItem::Hole)
            }
            Tok::Punct("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_punct(")")?;
                Ok(LitItem::Splice(t))
            }
            Tok::Ident(s) if !is_reserved(&s) => {
                let next = self.peek_at(1).clone();
                let named = self.scope.vars.contains(&s)
                    || self.scope.is_function(&s)
                    || (next == Tok::Punct("(") && Builtin::from_name(&s).is_some());
                match next {
                    Tok::Punct("<") => self.tree_lit().map(LitItem::Node),
                    Tok::Punct("(") if !named => self.tree_lit().map(LitItem::Node),
                    _ if named => self.term().map(LitItem::Splice),
                    _ => self.error(format!("label {s} needs `<...>` or `(value)`")),
                }
            }
            _ => self.term().map(LitItem::Splice),
        }
    }

    // ---- rules -------------------------------------------------------

    fn at_rule_end(&self) -> bool {
        self.at_end()
            || ["ENDPAR", "ENDIF", "ELSE", "ENDPARFOR", "THEN", "IN"]
                .iter()
                .any(|k| self.at_kw(k))
    }

    /// One or more rules; several form a `PAR`.
    fn rule_block(&mut self) -> PResult<Rule> {
        let mut rules = self.rules()?;
        if rules.len() == 1 {
            Ok(rules.pop().expect("one rule"))
        } else {
            Ok(Rule::Par(rules))
        }
    }

    fn rules(&mut self) -> PResult<Vec<Rule>> {
        let mut out = Vec::new();
        while !self.at_rule_end() {
            out.push(self.rule()?);
        }
        Ok(out)
    }

    fn rule(&mut self) -> PResult<Rule> {
        if self.eat_kw("IF") {
            let cond = self.term()?;
            self.expect_kw("THEN")?;
            let then = self.rule_block()?;
            let otherwise = if self.eat_kw("ELSE") {
                Some(Box::new(self.rule_block()?))
            } else {
                None
            };
            self.expect_kw("ENDIF")?;
            return Ok(Rule::If {
                cond,
                then: Box::new(then),
                otherwise,
            });
        }
        if self.eat_kw("PAR") {
            let rules = self.rules()?;
            self.expect_kw("ENDPAR")?;
            return Ok(Rule::Par(rules));
        }
        if self.eat_kw("LET") {
            return self.let_rule();
        }
        if self.eat_kw("PARFOR") {
            let x = self.ident()?;
            self.expect_kw("IN")?;
            let d = self.ident()?;
            let values = self.domain_values(&d)?;
            self.bind(&x)?;
            let body = self.rules()?;
            self.unbind();
            self.expect_kw("ENDPARFOR")?;
            let mut out = Vec::new();
            for v in values {
                let c = Term::Const(v);
                out.extend(body.iter().map(|r| r.substitute(&x, &c)));
            }
            return Ok(Rule::Par(out));
        }
        self.update_rule()
    }

    fn let_rule(&mut self) -> PResult<Rule> {
        let mut bindings = Vec::new();
        loop {
            let x = self.ident()?;
            self.expect_punct("=")?;
            let t = self.term()?;
            self.bind(&x)?;
            bindings.push((x, t));
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_kw("IN")?;
        let mut body = self.rule()?;
        for (x, value) in bindings.into_iter().rev() {
            self.unbind();
            body = Rule::Let {
                var: x,
                value,
                body: Box::new(body),
            };
        }
        Ok(body)
    }

    fn update_rule(&mut self) -> PResult<Rule> {
        let (target, args) = if self.at_kw("RAISE") {
            self.bump();
            self.expect_punct("(")?;
            let t = self.term()?;
            self.expect_punct(")")?;
            let args = if self.at_punct("(") {
                self.args()?
            } else {
                Vec::new()
            };
            (Target::Dynamic(t), args)
        } else {
            let f = self.ident()?;
            let args = if self.at_punct("(") {
                self.args()?
            } else {
                Vec::new()
            };
            if self.scope.vars.contains(&f) {
                (Target::Dynamic(Term::Var(f)), args)
            } else {
                (Target::Symbol(f), args)
            }
        };
        if self.eat_punct(":=") {
            let value = self.term()?;
            return Ok(Rule::Assign {
                target,
                args,
                value,
            });
        }
        if self.eat_punct("<=") {
            self.expect_punct("[")?;
            let op = self.symbol_name()?;
            self.expect_punct("]")?;
            if let Err(e) = Operator::from_name(&op) {
                return self.error(e.to_string());
            }
            let mut operands = vec![self.term()?];
            while self.eat_punct(",") {
                operands.push(self.term()?);
            }
            return Ok(Rule::Partial {
                target,
                op,
                args,
                operands,
            });
        }
        self.error(format!(
            "expected `:=` or `<=[op]`, found {}",
            self.describe()
        ))
    }
}

/// Splits the token stream at section keywords.
fn sections(toks: Vec<Token>) -> PResult<BTreeMap<&'static str, Vec<Token>>> {
    let eof = toks.last().cloned().expect("lexer appends end of input");
    let mut out: BTreeMap<&'static str, Vec<Token>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for t in toks {
        if t.tok == Tok::Eof {
            break;
        }
        if let Tok::Ident(s) = &t.tok {
            if let Some(sec) = SECTIONS.iter().find(|k| **k == s.as_str()) {
                if out.contains_key(sec) {
                    return Err(ParseError::Syntax {
                        line: t.line,
                        col: t.col,
                        msg: format!("section {sec} appears twice"),
                    });
                }
                out.insert(sec, Vec::new());
                current = Some(sec);
                continue;
            }
        }
        match current {
            Some(sec) => out.get_mut(sec).expect("section opened").push(t),
            None => {
                return Err(ParseError::Syntax {
                    line: t.line,
                    col: t.col,
                    msg: "expected a section keyword".into(),
                })
            }
        }
    }
    for body in out.values_mut() {
        let end = body.last().map_or((eof.line, eof.col), |t| (t.line, t.col));
        body.push(Token {
            tok: Tok::Eof,
            line: end.0,
            col: end.1,
        });
    }
    Ok(out)
}

fn evaluate(state: &State, t: &Term) -> Result<Value, ParseError> {
    Ok(eval_term(state, t)?)
}

/// Parses a program file into its declarations, initial locations and rule.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut secs = sections(lex(src)?)?;
    let mut take = |k: &str| {
        secs.remove(k).unwrap_or_else(|| {
            vec![Token {
                tok: Tok::Eof,
                line: 1,
                col: 1,
            }]
        })
    };
    let (domain_toks, sig_toks, derived_toks, init_toks, rule_toks, option_toks) = (
        take("DOMAINS"),
        take("SIGNATURE"),
        take("DERIVED"),
        take("INIT"),
        take("RULE"),
        take("OPTIONS"),
    );

    let mut p = Parser::new(domain_toks, Scope::default());
    let empty = State::new(Signature::with_self(), Background::default());
    while !p.at_end() {
        let d = p.ident()?;
        if p.scope.domains.contains_key(&d) {
            return p.error(format!("domain {d} is declared twice"));
        }
        p.expect_punct("=")?;
        let set = p.braces()?;
        let Term::Builtin(Builtin::SetOf, items) = set else {
            return p.error("a domain is a list of values in braces");
        };
        let mut values = Vec::new();
        for t in items {
            let v = evaluate(&empty, &t)?;
            if !values.contains(&v) {
                values.push(v);
            }
        }
        p.scope.domains.insert(d, values);
    }
    let domains = p.scope.domains.clone();

    let mut p = Parser::new(sig_toks, Scope::default());
    let mut signature = Signature::with_self();
    while !p.at_end() {
        let f = p.ident()?;
        p.expect_punct("/")?;
        let n = p.nat()? as usize;
        if f == SELF {
            if n != 0 {
                return p.error("self is nullary");
            }
        } else if let Err(e) = signature.add(FunctionSymbol::new(f, n)) {
            return p.error(e.to_string());
        }
        p.eat_punct(",");
    }

    let mut p = Parser::new(option_toks, Scope::default());
    let mut options = Options::default();
    while !p.at_end() {
        let k = p.ident()?;
        p.expect_punct("=")?;
        let n = p.nat()?;
        match k.as_str() {
            "max_steps" => options.max_steps = Some(n as usize),
            "seed" => options.seed = Some(n),
            _ => return p.error(format!("unknown option {k}")),
        }
        p.eat_punct(",");
    }

    let scope = Scope {
        signature: signature.clone(),
        derived: BTreeSet::new(),
        domains: domains.clone(),
        vars: Vec::new(),
    };
    let mut p = Parser::new(derived_toks, scope);
    let mut derived = BTreeMap::new();
    while !p.at_end() {
        let f = p.ident()?;
        if p.scope.is_function(&f) || p.scope.domains.contains_key(&f) {
            return p.error(format!("{f} is already declared"));
        }
        p.expect_punct("(")?;
        let params = p.list(")", Parser::ident)?;
        for x in &params {
            p.bind(x)?;
        }
        p.expect_punct("=")?;
        let body = p.term()?;
        params.iter().for_each(|_| p.unbind());
        derived.insert(f.clone(), Derived { params, body });
        p.scope.derived.insert(f);
    }
    let mut scope = p.scope;
    let background = Background { domains, derived };

    let mut p = Parser::new(init_toks, scope.clone());
    let mut state = State::new(signature.clone(), background.clone());
    let mut init = Vec::new();
    while !p.at_end() {
        let f = p.ident()?;
        if f == SELF {
            return p.error("self is built from SIGNATURE and RULE");
        }
        let args = if p.at_punct("(") {
            p.args()?
        } else {
            Vec::new()
        };
        p.expect_punct(":=")?;
        let value = p.term()?;
        let args = args
            .iter()
            .map(|a| evaluate(&state, a))
            .collect::<Result<Vec<_>, _>>()?;
        let v = evaluate(&state, &value)?;
        let loc = Location::new(f, args);
        if let Err(e) = state.set(loc.clone(), v.clone()) {
            return p.error(e.to_string());
        }
        init.push((loc, v));
    }

    scope.vars.clear();
    let mut p = Parser::new(rule_toks, scope);
    if p.at_end() {
        return p.error("missing RULE section");
    }
    let rule = p.rule_block()?;
    if !p.at_end() {
        return p.error(format!("unexpected {}", p.describe()));
    }
    rule.validate(&signature, &background)?;

    Ok(Program {
        signature,
        background,
        init,
        rule,
        options,
    })
}

/// Parses a single rule against a signature and background.
pub fn parse_rule(
    src: &str,
    signature: &Signature,
    background: &Background,
) -> Result<Rule, ParseError> {
    let scope = Scope {
        signature: signature.clone(),
        derived: background.derived.keys().cloned().collect(),
        domains: background.domains.clone(),
        vars: Vec::new(),
    };
    let mut p = Parser::new(lex(src)?, scope);
    let rule = p.rule_block()?;
    if !p.at_end() {
        return p.error(format!("unexpected {}", p.describe()));
    }
    Ok(rule)
}

/// Parses a single term against a signature and background.
pub fn parse_term(
    src: &str,
    signature: &Signature,
    background: &Background,
) -> Result<Term, ParseError> {
    let scope = Scope {
        signature: signature.clone(),
        derived: background.derived.keys().cloned().collect(),
        domains: background.domains.clone(),
        vars: Vec::new(),
    };
    let mut p = Parser::new(lex(src)?, scope);
    let t = p.term()?;
    if !p.at_end() {
        return p.error(format!("unexpected {}", p.describe()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(names: &[(&str, usize)]) -> Signature {
        let mut s = Signature::with_self();
        for (f, n) in names {
            s.add(FunctionSymbol::new(*f, *n)).unwrap();
        }
        s
    }

    #[test]
    fn identifiers_resolve_by_scope() {
        let mut bg = Background::default();
        bg.domains.insert("D".into(), vec![Value::atom("a")]);
        let t = parse_term("f(a) = D", &sig(&[("f", 1)]), &bg).unwrap();
        assert_eq!(
            t,
            Term::eq(
                Term::app("f", vec![Term::Const(Value::atom("a"))]),
                Term::Domain("D".into())
            )
        );
    }

    #[test]
    fn comprehension_expands_over_the_domain() {
        let mut bg = Background::default();
        bg.domains
            .insert("D".into(), vec![Value::atom("a"), Value::atom("b")]);
        let t = parse_term("{x IN D | f(x) = true}", &sig(&[("f", 1)]), &bg).unwrap();
        let Term::Builtin(Builtin::Select, args) = t else {
            panic!("expected select")
        };
        assert_eq!(args.len(), 4);
        assert!(parse_term("{x IN E | true}", &sig(&[]), &bg).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_program("SIGNATURE c/0\nRULE\n  c := ").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err}");
        let err =
            parse_program("SIGNATURE c/0\nRULE LET x = 1 IN LET x = 2 IN c := x").unwrap_err();
        assert!(err.to_string().contains("shadows"), "{err}");
    }

    #[test]
    fn drop_of_a_symbol_and_of_a_term() {
        let s = sig(&[("card", 0)]);
        let bg = Background::default();
        assert_eq!(
            parse_term("DROP(card)", &s, &bg).unwrap(),
            Term::Const(Value::symbol("card"))
        );
        assert_eq!(
            parse_term("DROP(card())", &s, &bg).unwrap(),
            Term::Const(Value::Term(Box::new(Term::nullary("card"))))
        );
        assert_eq!(
            parse_term("DROP(+)", &s, &bg).unwrap(),
            Term::Const(Value::symbol("+"))
        );
    }
}
