//! Line-oriented parser for knowledge bases and queries.

use std::collections::HashMap;

use crate::formula::{flatten_literal, Expr, Formula, FormulaError, UClause};
use crate::symbols::{FunId, Literal, SortId, Symbols, TermId};

use super::{Declaration, Item, ParseError, Query};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    Comma,
    Colon,
    Slash,
    Eq,
    Neq,
    Bang,
    And,
    Or,
    Arrow,
    Iff,
    Lt,
    Gt,
}

fn lex(src: &str, line: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            break;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let three: String = chars[i..(i + 3).min(chars.len())].iter().collect();
        let (tok, len) = if three == "<->" {
            (Tok::Iff, 3)
        } else {
            match two.as_str() {
                "==" => (Tok::Eq, 2),
                "!=" => (Tok::Neq, 2),
                "&&" => (Tok::And, 2),
                "||" => (Tok::Or, 2),
                "->" => (Tok::Arrow, 2),
                _ => match c {
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    ',' => (Tok::Comma, 1),
                    ':' => (Tok::Colon, 1),
                    '/' => (Tok::Slash, 1),
                    '!' => (Tok::Bang, 1),
                    '<' => (Tok::Lt, 1),
                    '>' => (Tok::Gt, 1),
                    _ if c.is_ascii_digit() => {
                        let n = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
                        let s: String = chars[i..i + n].iter().collect();
                        let v = s
                            .parse()
                            .map_err(|_| ParseError::new(line, col, "number too large"))?;
                        (Tok::Num(v), n)
                    }
                    _ if c.is_alphabetic() || c == '_' => {
                        let n = chars[i..]
                            .iter()
                            .take_while(|c| c.is_alphanumeric() || **c == '_' || **c == '#' || **c == '\'')
                            .count();
                        (Tok::Ident(chars[i..i + n].iter().collect()), n)
                    }
                    _ => return Err(ParseError::new(line, col, format!("unexpected character `{c}`"))),
                },
            }
        };
        out.push((tok, col));
        i += len;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum TermAst {
    Sym(String, usize),
    App(String, Vec<TermAst>, usize),
}

#[derive(Debug, Clone)]
enum Ast {
    Eq(TermAst, TermAst, bool),
    Bool(bool),
    Not(Box<Ast>),
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
    Implies(Box<Ast>, Box<Ast>),
    Iff(Box<Ast>, Box<Ast>),
    Exists(TermId, Box<Ast>),
    Forall(TermId, Box<Ast>),
    Know(u32, Box<Ast>),
    Maybe(u32, Box<Ast>),
    Guarantee(Box<Ast>),
    OnlyKnow(Box<Ast>),
}

/// Identifiers in scope.
#[derive(Debug, Clone, Default)]
pub(crate) struct Env {
    names: HashMap<String, TermId>,
    funs: HashMap<String, FunId>,
    preds: HashMap<String, FunId>,
    vars: HashMap<String, TermId>,
    sorts: HashMap<String, SortId>,
}

const KEYWORDS: &[&str] = &[
    "sort", "name", "fun", "pred", "var", "kb", "query", "expect", "exists", "forall", "true",
    "false", "K", "M", "G", "O",
];

/// Parses lines against a growing symbol table.
#[derive(Debug, Clone)]
pub struct Parser {
    pub sym: Symbols,
    pub(crate) env: Env,
}

impl Default for Parser {
    fn default() -> Self {
        Self::new()
    }
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), msg)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn num(&mut self, what: &str) -> Result<u32, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

/// `K<2>`, `K2` or `K_2`.
fn modal_level(word: &str) -> Option<(char, Option<u32>)> {
    let mut it = word.chars();
    let head = it.next()?;
    if !matches!(head, 'K' | 'M') {
        return None;
    }
    let rest = it.as_str().trim_start_matches('_');
    if rest.is_empty() {
        return (word.len() == 1).then_some((head, None));
    }
    rest.parse().ok().map(|k| (head, Some(k)))
}

impl Parser {
    pub fn new() -> Parser {
        let sym = Symbols::new();
        let mut env = Env::default();
        env.sorts.insert("BOOL".into(), sym.bool_sort());
        env.names.insert("T".into(), sym.truth());
        Parser { sym, env }
    }

    /// Parses one line; blank and comment lines give `None`.
    pub fn parse_line(&mut self, src: &str, line: usize) -> Result<Option<Item>, ParseError> {
        let toks = lex(src, line)?;
        if toks.is_empty() {
            return Ok(None);
        }
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line,
            end_col: src.trim_end().chars().count() + 1,
        };
        let head = cur.ident("a statement")?;
        let item = match head.as_str() {
            "sort" => {
                let name = cur.ident("a sort name")?;
                self.check_fresh(&cur, &name, self.env.sorts.contains_key(&name))?;
                let s = self.sym.sort(&name);
                self.env.sorts.insert(name.clone(), s);
                Item::Decl(Declaration::Sort(name))
            }
            "name" => {
                let mut ids = vec![cur.ident("a name")?];
                while cur.eat(&Tok::Comma) {
                    ids.push(cur.ident("a name")?);
                }
                cur.expect(&Tok::Colon, "`:`")?;
                let sort_name = cur.ident("a sort")?;
                let sort = self.resolve_sort(&cur, &sort_name)?;
                for id in &ids {
                    if let Some(&n) = self.env.names.get(id) {
                        if self.sym.sort_of(n) == sort {
                            continue;
                        }
                    }
                    self.check_ident(&cur, id)?;
                    let n = self.sym.declare_name(id, sort);
                    self.env.names.insert(id.clone(), n);
                }
                Item::Decl(Declaration::Name(ids, sort_name))
            }
            "fun" | "pred" => {
                let id = cur.ident("a function name")?;
                cur.expect(&Tok::Slash, "`/arity`")?;
                let arity = cur.num("an arity")? as usize;
                if head == "fun" {
                    cur.expect(&Tok::Colon, "`:`")?;
                    let sort_name = cur.ident("a sort")?;
                    let sort = self.resolve_sort(&cur, &sort_name)?;
                    self.check_ident(&cur, &id)?;
                    let f = self.sym.declare_fun(&id, arity, sort);
                    self.env.funs.insert(id.clone(), f);
                    Item::Decl(Declaration::Fun(id, arity, sort_name))
                } else {
                    let lower = lower_first(&id);
                    self.check_ident(&cur, &id)?;
                    if lower != id {
                        self.check_ident(&cur, &lower)?;
                    }
                    let f = self.sym.declare_fun(&lower, arity, self.sym.bool_sort());
                    self.env.funs.insert(lower, f);
                    self.env.preds.insert(id.clone(), f);
                    Item::Decl(Declaration::Pred(id, arity))
                }
            }
            "var" => {
                let mut ids = vec![cur.ident("a variable")?];
                while cur.eat(&Tok::Comma) {
                    ids.push(cur.ident("a variable")?);
                }
                cur.expect(&Tok::Colon, "`:`")?;
                let sort_name = cur.ident("a sort")?;
                let sort = self.resolve_sort(&cur, &sort_name)?;
                for id in &ids {
                    self.check_ident(&cur, id)?;
                    let v = self.sym.new_var(id, sort);
                    self.env.vars.insert(id.clone(), v);
                }
                Item::Decl(Declaration::Var(ids, sort_name))
            }
            "kb" => {
                cur.expect(&Tok::Colon, "`:` after kb")?;
                let ast = self.formula(&mut cur)?;
                cur.done()?;
                Item::Kb(self.lower_kb(&ast, line)?)
            }
            "query" => {
                cur.expect(&Tok::Colon, "`:` after query")?;
                let ast = self.formula(&mut cur)?;
                cur.done()?;
                let f = self.lower_query(&ast, line)?;
                let free = f.free_vars(&self.sym);
                if let Some(&x) = free.first() {
                    return Err(ParseError::new(
                        line,
                        1,
                        format!("query has free variable `{}`", self.sym.label(x)),
                    ));
                }
                Item::Query(Query {
                    formula: f,
                    expect: None,
                    line,
                })
            }
            "expect" => {
                cur.expect(&Tok::Colon, "`:` after expect")?;
                let v = match cur.ident("true or false")?.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return Err(cur.err("expected true or false")),
                };
                Item::Expect(v)
            }
            other => return Err(ParseError::new(line, 1, format!("unknown statement `{other}`"))),
        };
        cur.done()?;
        Ok(Some(item))
    }

    fn resolve_sort(&self, cur: &Cursor, name: &str) -> Result<SortId, ParseError> {
        self.env
            .sorts
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::new(cur.line, cur.col(), format!("unknown sort `{name}`")))
    }

    fn check_fresh(&self, cur: &Cursor, id: &str, taken: bool) -> Result<(), ParseError> {
        if taken || KEYWORDS.contains(&id) {
            Err(ParseError::new(cur.line, cur.col(), format!("`{id}` is already in use")))
        } else {
            Ok(())
        }
    }

    fn check_ident(&self, cur: &Cursor, id: &str) -> Result<(), ParseError> {
        let e = &self.env;
        let taken = e.names.contains_key(id)
            || e.funs.contains_key(id)
            || e.preds.contains_key(id)
            || e.vars.contains_key(id)
            || modal_level(id).is_some();
        self.check_fresh(cur, id, taken)
    }

    fn formula(&mut self, cur: &mut Cursor) -> Result<Ast, ParseError> {
        let lhs = self.disjunction(cur)?;
        if cur.eat(&Tok::Arrow) {
            let rhs = self.formula(cur)?;
            Ok(Ast::Implies(Box::new(lhs), Box::new(rhs)))
        } else if cur.eat(&Tok::Iff) {
            let rhs = self.formula(cur)?;
            Ok(Ast::Iff(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self, cur: &mut Cursor) -> Result<Ast, ParseError> {
        let mut f = self.conjunction(cur)?;
        while cur.eat(&Tok::Or) {
            f = Ast::Or(Box::new(f), Box::new(self.conjunction(cur)?));
        }
        Ok(f)
    }

    fn conjunction(&mut self, cur: &mut Cursor) -> Result<Ast, ParseError> {
        let mut f = self.unary(cur)?;
        while cur.eat(&Tok::And) {
            f = Ast::And(Box::new(f), Box::new(self.unary(cur)?));
        }
        Ok(f)
    }

    fn unary(&mut self, cur: &mut Cursor) -> Result<Ast, ParseError> {
        if cur.eat(&Tok::Bang) {
            return Ok(Ast::Not(Box::new(self.unary(cur)?)));
        }
        if cur.eat(&Tok::LParen) {
            let f = self.formula(cur)?;
            cur.expect(&Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let Some(Tok::Ident(word)) = cur.peek().cloned() else {
            return Err(cur.err("expected a formula"));
        };
        match word.as_str() {
            "exists" | "forall" => {
                cur.next();
                let mut vars = vec![self.bound_var(cur)?];
                while cur.eat(&Tok::Comma) {
                    vars.push(self.bound_var(cur)?);
                }
                let mut body = self.unary(cur)?;
                for &v in vars.iter().rev() {
                    body = if word == "exists" {
                        Ast::Exists(v, Box::new(body))
                    } else {
                        Ast::Forall(v, Box::new(body))
                    };
                }
                Ok(body)
            }
            "true" | "false" => {
                cur.next();
                Ok(Ast::Bool(word == "true"))
            }
            "G" => {
                cur.next();
                Ok(Ast::Guarantee(Box::new(self.unary(cur)?)))
            }
            "O" => {
                cur.next();
                Ok(Ast::OnlyKnow(Box::new(self.unary(cur)?)))
            }
            _ => match modal_level(&word) {
                Some((op, level)) if !self.env.names.contains_key(&word) => {
                    cur.next();
                    let k = match level {
                        Some(k) => k,
                        None if cur.eat(&Tok::Lt) => {
                            let k = cur.num("a belief level")?;
                            cur.expect(&Tok::Gt, "`>`")?;
                            k
                        }
                        None => 0,
                    };
                    let body = Box::new(self.unary(cur)?);
                    Ok(if op == 'K' { Ast::Know(k, body) } else { Ast::Maybe(k, body) })
                }
                _ => self.atom(cur),
            },
        }
    }

    /// `x` or `x : S` (declaring `x` on first use).
    fn bound_var(&mut self, cur: &mut Cursor) -> Result<TermId, ParseError> {
        let id = cur.ident("a variable")?;
        if cur.eat(&Tok::Colon) {
            let sort_name = cur.ident("a sort")?;
            let sort = self.resolve_sort(cur, &sort_name)?;
            if let Some(&v) = self.env.vars.get(&id) {
                if self.sym.sort_of(v) == sort {
                    return Ok(v);
                }
                return Err(cur.err(format!("`{id}` is declared with another sort")));
            }
            self.check_ident(cur, &id)?;
            let v = self.sym.new_var(&id, sort);
            self.env.vars.insert(id, v);
            return Ok(v);
        }
        self.env
            .vars
            .get(&id)
            .copied()
            .ok_or_else(|| cur.err(format!("`{id}` is not a declared variable")))
    }

    fn atom(&mut self, cur: &mut Cursor) -> Result<Ast, ParseError> {
        let lhs = self.term(cur)?;
        match cur.peek() {
            Some(Tok::Eq) | Some(Tok::Neq) => {
                let pos = cur.next() == Some(Tok::Eq);
                let rhs = self.term(cur)?;
                Ok(Ast::Eq(lhs, rhs, pos))
            }
            _ => {
                let t = TermAst::Sym(self.sym.label(self.sym.truth()), 0);
                Ok(Ast::Eq(lhs, t, true))
            }
        }
    }

    fn term(&mut self, cur: &mut Cursor) -> Result<TermAst, ParseError> {
        let col = cur.col();
        let id = cur.ident("a term")?;
        if cur.eat(&Tok::LParen) {
            let mut args = Vec::new();
            if !cur.eat(&Tok::RParen) {
                loop {
                    args.push(self.term(cur)?);
                    if cur.eat(&Tok::RParen) {
                        break;
                    }
                    cur.expect(&Tok::Comma, "`,` or `)`")?;
                }
            }
            Ok(TermAst::App(id, args, col))
        } else {
            Ok(TermAst::Sym(id, col))
        }
    }

    fn resolve(&mut self, t: &TermAst, line: usize) -> Result<Expr, ParseError> {
        match t {
            TermAst::Sym(id, col) => {
                if let Some(&n) = self.env.names.get(id) {
                    return Ok(Expr::Atom(n));
                }
                if let Some(&v) = self.env.vars.get(id) {
                    return Ok(Expr::Atom(v));
                }
                if let Some(f) = self.fun(id) {
                    return self.apply(f, id, &[], line, *col);
                }
                if let Some((sort, ord)) = id.split_once('#') {
                    if let (Some(&s), Ok(k)) = (self.env.sorts.get(sort), ord.parse::<u32>()) {
                        return Ok(Expr::Atom(self.sym.name(s, k)));
                    }
                }
                Err(ParseError::new(line, *col, format!("unknown identifier `{id}`")))
            }
            TermAst::App(id, args, col) => {
                let f = self
                    .fun(id)
                    .ok_or_else(|| ParseError::new(line, *col, format!("unknown function `{id}`")))?;
                self.apply(f, id, args, line, *col)
            }
        }
    }

    fn fun(&self, id: &str) -> Option<FunId> {
        self.env.funs.get(id).or_else(|| self.env.preds.get(id)).copied()
    }

    fn apply(
        &mut self,
        f: FunId,
        id: &str,
        args: &[TermAst],
        line: usize,
        col: usize,
    ) -> Result<Expr, ParseError> {
        let arity = self.sym.fun(f).arity;
        if args.len() != arity {
            return Err(ParseError::new(
                line,
                col,
                format!("`{id}` takes {arity} argument(s), got {}", args.len()),
            ));
        }
        let args = args.iter().map(|a| self.resolve(a, line)).collect::<Result<_, _>>()?;
        Ok(Expr::App(f, args))
    }

    fn expr_sort(&self, e: &Expr) -> SortId {
        match e {
            Expr::Atom(t) => self.sym.sort_of(*t),
            Expr::App(f, _) => self.sym.fun(*f).sort,
        }
    }

    fn flat(&mut self, lhs: &TermAst, rhs: &TermAst, pos: bool, line: usize) -> Result<crate::formula::Flat, ParseError> {
        let col = match lhs {
            TermAst::Sym(_, c) | TermAst::App(_, _, c) => *c,
        };
        let a = self.resolve(lhs, line)?;
        let b = self.resolve(rhs, line)?;
        let (sa, sb) = (self.expr_sort(&a), self.expr_sort(&b));
        if sa != sb {
            return Err(ParseError::new(
                line,
                col,
                format!(
                    "sort mismatch: {} vs {}",
                    self.sym.sort_name(sa),
                    self.sym.sort_name(sb)
                ),
            ));
        }
        flatten_literal(&mut self.sym, &a, &b, pos).map_err(|e| ParseError::new(line, col, e.to_string()))
    }

    fn lower_query(&mut self, f: &Ast, line: usize) -> Result<Formula, ParseError> {
        Ok(match f {
            Ast::Eq(a, b, pos) => {
                let flat = self.flat(a, b, *pos, line)?;
                if flat.vars.is_empty() {
                    Formula::lit(flat.core)
                } else {
                    flat.existential(&self.sym)
                }
            }
            Ast::Bool(true) => Formula::top(&self.sym),
            Ast::Bool(false) => Formula::bottom(&self.sym),
            Ast::Not(a) => Formula::not(self.lower_query(a, line)?),
            Ast::And(a, b) => Formula::and(self.lower_query(a, line)?, self.lower_query(b, line)?),
            Ast::Or(a, b) => Formula::or(self.lower_query(a, line)?, self.lower_query(b, line)?),
            Ast::Implies(a, b) => {
                Formula::implies(self.lower_query(a, line)?, self.lower_query(b, line)?)
            }
            Ast::Iff(a, b) => {
                let (x, y) = (self.lower_query(a, line)?, self.lower_query(b, line)?);
                Formula::and(Formula::implies(x.clone(), y.clone()), Formula::implies(y, x))
            }
            Ast::Exists(x, a) => Formula::exists(*x, self.lower_query(a, line)?),
            Ast::Forall(x, a) => Formula::forall(*x, self.lower_query(a, line)?),
            Ast::Know(k, a) => Formula::know(*k, self.lower_query(a, line)?),
            Ast::Maybe(k, a) => Formula::maybe(*k, self.lower_query(a, line)?),
            Ast::Guarantee(a) => Formula::guarantee(self.lower_query(a, line)?),
            Ast::OnlyKnow(a) => Formula::only_know(self.lower_query(a, line)?),
        })
    }

    /// Converts a knowledge-base line into universally closed clauses.
    fn lower_kb(&mut self, f: &Ast, line: usize) -> Result<Vec<UClause>, ParseError> {
        let err = |e: FormulaError| ParseError::new(line, 1, e.to_string());
        let cnf = nnf_cnf(f, false).map_err(err)?;
        let mut out = Vec::with_capacity(cnf.len());
        for clause in cnf {
            let mut lits: Vec<Literal> = Vec::new();
            for (a, b, pos) in clause {
                let flat = self.flat(&a, &b, pos, line)?;
                lits.extend(flat.defs.iter().map(|d| d.flip()));
                lits.push(flat.core);
            }
            let mut vars = Vec::new();
            for l in &lits {
                self.sym.vars_in(l.lhs(), &mut vars);
                self.sym.vars_in(l.rhs(), &mut vars);
            }
            vars.sort_unstable();
            vars.dedup();
            lits.sort_unstable();
            lits.dedup();
            out.push(UClause { vars, lits });
        }
        Ok(out)
    }

    /// Parses a whole query formula (without the `query:` prefix).
    pub fn parse_formula(&mut self, src: &str) -> Result<Formula, ParseError> {
        let toks = lex(src, 1)?;
        let mut cur = Cursor {
            toks: &toks,
            pos: 0,
            line: 1,
            end_col: src.chars().count() + 1,
        };
        let ast = self.formula(&mut cur)?;
        cur.done()?;
        self.lower_query(&ast, 1)
    }
}

fn lower_first(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(h) => h.to_lowercase().chain(c).collect(),
        None => String::new(),
    }
}

type RawLit = (TermAst, TermAst, bool);

/// Clause normal form of a formula without existentials; universals are
/// dropped since every variable ends up universally quantified anyway.
fn nnf_cnf(f: &Ast, neg: bool) -> Result<Vec<Vec<RawLit>>, FormulaError> {
    let skolem = || {
        FormulaError::NotProperPlus(
            "existential quantifiers are not allowed in the knowledge base; introduce a \
             Skolem function instead (replace `exists x P(x)` by `P(c)` for a new function `c`)"
                .into(),
        )
    };
    Ok(match (f, neg) {
        (Ast::Eq(a, b, pos), _) => vec![vec![(a.clone(), b.clone(), *pos != neg)]],
        (Ast::Bool(b), _) => {
            if *b != neg {
                vec![]
            } else {
                vec![vec![]]
            }
        }
        (Ast::Not(a), _) => nnf_cnf(a, !neg)?,
        (Ast::And(a, b), false) | (Ast::Or(a, b), true) => {
            let mut l = nnf_cnf(a, neg)?;
            l.extend(nnf_cnf(b, neg)?);
            l
        }
        (Ast::Or(a, b), false) | (Ast::And(a, b), true) => {
            distribute(nnf_cnf(a, neg)?, nnf_cnf(b, neg)?)
        }
        (Ast::Implies(a, b), false) => distribute(nnf_cnf(a, true)?, nnf_cnf(b, false)?),
        (Ast::Implies(a, b), true) => {
            let mut l = nnf_cnf(a, false)?;
            l.extend(nnf_cnf(b, true)?);
            l
        }
        (Ast::Iff(a, b), _) => {
            let fwd = Ast::Implies(a.clone(), b.clone());
            let bwd = Ast::Implies(b.clone(), a.clone());
            nnf_cnf(&Ast::And(Box::new(fwd), Box::new(bwd)), neg)?
        }
        (Ast::Forall(_, a), false) | (Ast::Exists(_, a), true) => nnf_cnf(a, neg)?,
        (Ast::Exists(..), false) | (Ast::Forall(..), true) => return Err(skolem()),
        (Ast::Know(..) | Ast::Maybe(..) | Ast::Guarantee(_) | Ast::OnlyKnow(_), _) => {
            return Err(FormulaError::NotProperPlus(
                "belief operators are not allowed in the knowledge base".into(),
            ))
        }
    })
}

fn distribute(a: Vec<Vec<RawLit>>, b: Vec<Vec<RawLit>>) -> Vec<Vec<RawLit>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            out.push(c);
        }
    }
    out
}
