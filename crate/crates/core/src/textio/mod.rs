//! Text format for reasoning problems, a script runner and a REPL.
//!
//! ```text
//! sort HUMAN
//! name Sally, Frank, Fred : HUMAN
//! fun fatherOf/1 : HUMAN
//! pred Rich/1
//! var x : HUMAN
//! kb: fatherOf(Sally) == Frank || fatherOf(Sally) == Fred
//! kb: fatherOf(Sally) != x || Rich(x)
//! query: K<1> (Rich(Frank) || Rich(Fred))
//! expect: true
//! ```

mod parse;
mod print;

use std::fmt;
use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::formula::{Formula, ProperPlusKB, UClause};
use crate::solver::{prepare, QueryOptions, Reasoner, SolverError};
use crate::symbols::Symbols;

pub use parse::Parser;
pub use print::{print_formula, print_script};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Sort(String),
    Name(Vec<String>, String),
    Fun(String, usize, String),
    Pred(String, usize),
    Var(Vec<String>, String),
}

#[derive(Debug, Clone)]
pub struct Query {
    pub formula: Formula,
    pub expect: Option<bool>,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub enum Item {
    Decl(Declaration),
    Kb(Vec<UClause>),
    Query(Query),
    Expect(bool),
}

/// A parsed script: its symbols and statements in order. `expect:` lines
/// are attached to the preceding query.
#[derive(Debug, Clone)]
pub struct Script {
    pub sym: Symbols,
    pub items: Vec<Item>,
}

impl Script {
    pub fn kb(&self) -> ProperPlusKB {
        let mut kb = ProperPlusKB::new();
        for item in &self.items {
            if let Item::Kb(cs) = item {
                for c in cs {
                    kb.push(c.clone());
                }
            }
        }
        kb
    }

    pub fn queries(&self) -> impl Iterator<Item = &Query> {
        self.items.iter().filter_map(|i| match i {
            Item::Query(q) => Some(q),
            _ => None,
        })
    }
}

pub fn parse(source: &str) -> Result<Script, ParseError> {
    let mut p = Parser::new();
    let mut items: Vec<Item> = Vec::new();
    for (i, line) in source.lines().enumerate() {
        match p.parse_line(line, i + 1)? {
            Some(Item::Expect(v)) => match items.iter_mut().rev().find_map(|it| match it {
                Item::Query(q) => Some(q),
                _ => None,
            }) {
                Some(q) if q.expect.is_none() => q.expect = Some(v),
                _ => return Err(ParseError::new(i + 1, 1, "expect: without a preceding query")),
            },
            Some(item) => items.push(item),
            None => {}
        }
    }
    Ok(Script { sym: p.sym, items })
}

/// Result of one query.
#[derive(Debug, Clone)]
pub struct Answer {
    pub index: usize,
    pub result: Result<bool, SolverError>,
    pub level: u32,
    pub elapsed: Duration,
    pub splits: u64,
    pub clauses: usize,
    pub expect: Option<bool>,
}

impl Answer {
    pub fn passed(&self) -> bool {
        match self.expect {
            None => self.result.is_ok(),
            Some(e) => self.result.as_ref().is_ok_and(|&r| r == e),
        }
    }

    pub fn result_text(&self) -> String {
        match &self.result {
            Ok(b) => b.to_string(),
            Err(SolverError::ResourceExhausted) => "unknown".into(),
            Err(e) => format!("error: {e}"),
        }
    }

    /// `index \t result \t level \t millis`.
    pub fn tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            self.index,
            self.result_text(),
            self.level,
            self.elapsed.as_millis()
        )
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (level {}, {} splits, {} clauses, {:.1} ms)",
            self.result_text(),
            self.level,
            self.splits,
            self.clauses,
            self.elapsed.as_secs_f64() * 1e3
        )
    }
}

/// Evaluation settings shared by `run` and the REPL.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub max_level: Option<u32>,
    pub time_limit: Option<Duration>,
    pub no_rewrite: bool,
}

/// An interactive session: declarations and clauses accumulate, queries are
/// answered against everything asserted so far.
pub struct Session {
    parser: Parser,
    kb: ProperPlusKB,
    reasoner: Option<Reasoner>,
    pub settings: Settings,
    answers: usize,
    last: Option<Answer>,
}

impl Session {
    pub fn new(settings: Settings) -> Session {
        Session {
            parser: Parser::new(),
            kb: ProperPlusKB::new(),
            reasoner: None,
            settings,
            answers: 0,
            last: None,
        }
    }

    pub fn reset(&mut self) {
        *self = Session::new(self.settings.clone());
    }

    pub fn symbols(&self) -> &Symbols {
        &self.parser.sym
    }

    pub fn kb(&self) -> &ProperPlusKB {
        &self.kb
    }

    /// Processes one line. Queries yield their answer; an `expect:` line
    /// yields the answer it checks, with the expectation filled in.
    pub fn line(&mut self, src: &str, lineno: usize) -> Result<Option<Answer>, ParseError> {
        match self.parser.parse_line(src, lineno)? {
            None | Some(Item::Decl(_)) => Ok(None),
            Some(Item::Kb(cs)) => {
                for c in cs {
                    self.assert(c);
                }
                Ok(None)
            }
            Some(Item::Query(q)) => {
                let a = self.ask(&q.formula);
                self.last = Some(a.clone());
                Ok(Some(a))
            }
            Some(Item::Expect(v)) => match self.last.take() {
                Some(mut a) if a.expect.is_none() => {
                    a.expect = Some(v);
                    Ok(Some(a))
                }
                _ => Err(ParseError::new(lineno, 1, "expect: without a preceding query")),
            },
        }
    }

    fn assert(&mut self, c: UClause) {
        let fits = self.reasoner.as_ref().is_some_and(|r| {
            let f = c.to_formula(&self.parser.sym);
            r.context().covers(&self.parser.sym, &f)
        });
        if fits {
            let r = self.reasoner.as_mut().unwrap();
            r.add_clause(&mut self.parser.sym, c.clone());
        } else {
            self.reasoner = None;
        }
        self.kb.push(c);
    }

    pub fn ask(&mut self, sigma: &Formula) -> Answer {
        let opts = QueryOptions {
            rewrite: !self.settings.no_rewrite,
            max_level: self.settings.max_level,
            node_limit: None,
            deadline: None,
        };
        let start = Instant::now();
        let f = prepare(sigma, &opts);
        let sym = &mut self.parser.sym;
        let reuse = self.reasoner.as_ref().is_some_and(|r| {
            r.context().covers(sym, &f) && r.context().extra() >= f.max_level() as usize
        });
        if !reuse {
            self.reasoner = Some(Reasoner::for_query(sym, &self.kb, &f));
        }
        let r = self.reasoner.as_mut().unwrap();
        r.set_limits(None, self.settings.time_limit.map(|d| start + d));
        let before = r.stats.splits;
        let result = r.evaluate(sym, &f);
        let answer = Answer {
            index: self.answers,
            result,
            level: f.max_level(),
            elapsed: start.elapsed(),
            splits: r.stats.splits - before,
            clauses: r.setup().num_clauses() + r.setup().num_units(),
            expect: None,
        };
        self.answers += 1;
        answer
    }
}

/// Runs a script, returning one answer per query.
pub fn run_script(source: &str, settings: &Settings) -> Result<Vec<Answer>, ParseError> {
    parse(source)?;
    let mut session = Session::new(settings.clone());
    let mut answers: Vec<Answer> = Vec::new();
    for (i, line) in source.lines().enumerate() {
        if let Some(a) = session.line(line, i + 1)? {
            match answers.last_mut() {
                Some(last) if last.index == a.index => *last = a,
                _ => answers.push(a),
            }
        }
    }
    Ok(answers)
}

/// Reads commands from `input` until EOF or `:quit`.
pub fn repl(input: impl BufRead, mut out: impl Write, settings: Settings) -> std::io::Result<()> {
    let mut session = Session::new(settings);
    let mut lineno = 0;
    for line in input.lines() {
        let line = line?;
        lineno += 1;
        let cmd = line.trim();
        if cmd == ":quit" || cmd == ":q" {
            break;
        }
        if cmd == ":reset" {
            session.reset();
            writeln!(out, "ok")?;
            continue;
        }
        if let Some(path) = cmd.strip_prefix(":load") {
            match std::fs::read_to_string(path.trim()) {
                Ok(src) => {
                    for (i, l) in src.lines().enumerate() {
                        let r = session.line(l, i + 1);
                        report(&mut out, r)?;
                    }
                }
                Err(e) => writeln!(out, "error: {e}")?,
            }
            continue;
        }
        let r = session.line(&line, lineno);
        report(&mut out, r)?;
        out.flush()?;
    }
    Ok(())
}

fn report(out: &mut impl Write, r: Result<Option<Answer>, ParseError>) -> std::io::Result<()> {
    match r {
        Ok(Some(a)) if a.expect.is_some() => {
            writeln!(out, "{}", if a.passed() { "as expected" } else { "UNEXPECTED" })
        }
        Ok(Some(a)) => writeln!(out, "{a}"),
        Ok(None) => Ok(()),
        Err(e) => writeln!(out, "error: {e}"),
    }
}
