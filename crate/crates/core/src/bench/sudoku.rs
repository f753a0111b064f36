//! Sudoku: the grid as a knowledge base over `value(row, col)` and an agent
//! that fills in cells it knows.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::formula::{GroundingContext, ProperPlusKB, UClause};
use crate::solver::{Reasoner, SolverError};
use crate::symbols::{FunId, Literal, Symbols, TermId};

use super::{Decision, GameStats};

/// A 9×9 grid, row by row; 0 marks a blank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SudokuInstance {
    pub cells: [u8; 81],
}

impl SudokuInstance {
    pub fn clues(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    /// True when no row, column or block repeats a digit.
    pub fn consistent(&self) -> bool {
        units().iter().all(|u| {
            let mut seen = [false; 10];
            u.iter().all(|&c| {
                let d = self.cells[c] as usize;
                d == 0 || !std::mem::replace(&mut seen[d], true)
            })
        })
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|&c| c != 0) && self.consistent()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SudokuParseError(pub String);

impl fmt::Display for SudokuParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SudokuParseError {}

impl FromStr for SudokuInstance {
    type Err = SudokuParseError;

    /// 81 characters: digits, with `.` or `0` for blanks.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.chars().count() != 81 {
            return Err(SudokuParseError(format!("expected 81 cells, got {}", s.chars().count())));
        }
        let mut cells = [0u8; 81];
        for (i, ch) in s.chars().enumerate() {
            cells[i] = match ch {
                '.' | '0' => 0,
                '1'..='9' => ch as u8 - b'0',
                _ => return Err(SudokuParseError(format!("bad cell {ch:?} at {i}"))),
            };
        }
        Ok(SudokuInstance { cells })
    }
}

impl fmt::Display for SudokuInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.cells {
            let ch = if c == 0 { '.' } else { (b'0' + c) as char };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// Rows, columns and blocks as lists of cell indices.
fn units() -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(27);
    for i in 0..9 {
        out.push((0..9).map(|j| i * 9 + j).collect());
        out.push((0..9).map(|j| j * 9 + i).collect());
        let (r, c) = (i / 3 * 3, i % 3 * 3);
        out.push((0..9).map(|j| (r + j / 3) * 9 + c + j % 3).collect());
    }
    out
}

/// Symbols for the grid: one sort `num` of nine names serving as rows,
/// columns and digits, and `value/2 : num`.
#[derive(Debug, Clone)]
pub struct SudokuVocab {
    pub value: FunId,
    /// `digits[d - 1]` is the name of digit `d`.
    pub digits: Vec<TermId>,
    /// `value(row, col)` per cell.
    pub cells: Vec<TermId>,
}

impl SudokuVocab {
    pub fn new(sym: &mut Symbols) -> SudokuVocab {
        let num = sym.sort("num");
        let digits: Vec<TermId> = (1..=9).map(|d| sym.declare_name(&format!("n{d}"), num)).collect();
        let value = sym.declare_fun("value", 2, num);
        let mut cells = Vec::with_capacity(81);
        for r in 0..9 {
            for c in 0..9 {
                cells.push(sym.app(value, &[digits[r], digits[c]]).expect("well sorted"));
            }
        }
        SudokuVocab { value, digits, cells }
    }

    pub fn digit_of(&self, name: TermId) -> Option<u8> {
        self.digits.iter().position(|&d| d == name).map(|i| i as u8 + 1)
    }

    fn is(&self, cell: usize, digit: usize) -> Literal {
        Literal::eq(self.cells[cell], self.digits[digit])
    }

    fn isnt(&self, cell: usize, digit: usize) -> Literal {
        Literal::neq(self.cells[cell], self.digits[digit])
    }
}

/// The rules of Sudoku plus one unit per clue. Rows and columns are
/// all-different constraints with quantified coordinates; blocks and the
/// "every digit somewhere" constraints are ground.
pub fn sudoku_encode(sym: &mut Symbols, vocab: &SudokuVocab, inst: &SudokuInstance) -> ProperPlusKB {
    let num = sym.sort_of(vocab.digits[0]);
    let mut kb = ProperPlusKB::new();
    let x = sym.new_var("x", num);
    let y1 = sym.new_var("y1", num);
    let y2 = sym.new_var("y2", num);
    let v = sym.new_var("v", num);
    let row_a = sym.app(vocab.value, &[x, y1]).expect("well sorted");
    let row_b = sym.app(vocab.value, &[x, y2]).expect("well sorted");
    kb.push(UClause {
        vars: vec![x, y1, y2, v],
        lits: vec![Literal::eq(y1, y2), Literal::neq(row_a, v), Literal::neq(row_b, v)],
    });
    let x1 = sym.new_var("x1", num);
    let x2 = sym.new_var("x2", num);
    let y = sym.new_var("y", num);
    let col_a = sym.app(vocab.value, &[x1, y]).expect("well sorted");
    let col_b = sym.app(vocab.value, &[x2, y]).expect("well sorted");
    kb.push(UClause {
        vars: vec![x1, x2, y, v],
        lits: vec![Literal::eq(x1, x2), Literal::neq(col_a, v), Literal::neq(col_b, v)],
    });
    for b in 0..9 {
        let (r0, c0) = (b / 3 * 3, b % 3 * 3);
        let block: Vec<usize> = (0..9).map(|j| (r0 + j / 3) * 9 + c0 + j % 3).collect();
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                if p / 9 == q / 9 || p % 9 == q % 9 {
                    continue;
                }
                for d in 0..9 {
                    kb.push(UClause::ground(vec![vocab.isnt(p, d), vocab.isnt(q, d)]));
                }
            }
        }
    }
    for cell in 0..81 {
        kb.push(UClause::ground((0..9).map(|d| vocab.is(cell, d)).collect()));
    }
    for unit in units() {
        for d in 0..9 {
            kb.push(UClause::ground(unit.iter().map(|&c| vocab.is(c, d)).collect()));
        }
    }
    for (cell, &d) in inst.cells.iter().enumerate() {
        if d != 0 {
            kb.push(UClause::ground(vec![vocab.is(cell, d as usize - 1)]));
        }
    }
    kb
}

/// Fills in a grid by asking for known cells at levels `0..=max_level`.
pub struct SudokuAgent {
    pub sym: Symbols,
    pub vocab: SudokuVocab,
    pub reasoner: Reasoner,
    pub grid: SudokuInstance,
    pub max_level: u32,
}

impl SudokuAgent {
    pub fn new(inst: &SudokuInstance, max_level: u32) -> SudokuAgent {
        let mut sym = Symbols::new();
        let vocab = SudokuVocab::new(&mut sym);
        let kb = sudoku_encode(&mut sym, &vocab, inst);
        let ctx = GroundingContext::new(&mut sym, &kb, &[], max_level as usize);
        let reasoner = Reasoner::new(&mut sym, kb, ctx);
        SudokuAgent {
            sym,
            vocab,
            reasoner,
            grid: *inst,
            max_level,
        }
    }

    /// True once the clues and deductions clash at level 0.
    pub fn inconsistent(&self) -> bool {
        self.reasoner.setup().obviously_inconsistent()
    }

    /// The first blank cell with a known value at the lowest level.
    pub fn agent_step(&mut self) -> Result<Decision<usize, u8>, SolverError> {
        let blanks: Vec<usize> = (0..81).filter(|&c| self.grid.cells[c] == 0).collect();
        if blanks.is_empty() || self.inconsistent() {
            return Ok(Decision::Stuck);
        }
        let terms: Vec<TermId> = blanks.iter().map(|&c| self.vocab.cells[c]).collect();
        for level in 0..=self.max_level {
            let found = self.reasoner.known_values(&mut self.sym, level, &terms, level > 0)?;
            let Some(pairs) = found else {
                return Ok(Decision::Stuck);
            };
            if let Some(&(t, n)) = pairs.first() {
                let cell = self.vocab.cells.iter().position(|&c| c == t).expect("a cell term");
                if let Some(value) = self.vocab.digit_of(n) {
                    return Ok(Decision::Known { cell, value, level });
                }
            }
        }
        Ok(Decision::Stuck)
    }

    /// Writes `value` into `cell` and tells the knowledge base.
    pub fn fill(&mut self, cell: usize, value: u8) {
        self.grid.cells[cell] = value;
        let unit = UClause::ground(vec![self.vocab.is(cell, value as usize - 1)]);
        self.reasoner.add_clause(&mut self.sym, unit);
    }

    /// Runs until the grid is full or nothing more is known.
    pub fn solve(&mut self) -> Result<GameStats, SolverError> {
        let start = Instant::now();
        let mut stats = GameStats::new(self.max_level);
        stats.clues = self.grid.clues();
        while let Decision::Known { cell, value, level } = self.agent_step()? {
            stats.record(level);
            self.fill(cell, value);
        }
        stats.won = self.grid.is_complete();
        stats.elapsed = start.elapsed();
        Ok(stats)
    }
}

/// Grounds and solves `inst`; the time includes grounding.
pub fn solve_puzzle(inst: &SudokuInstance, max_level: u32) -> Result<(SudokuInstance, GameStats), SolverError> {
    let start = Instant::now();
    let mut agent = SudokuAgent::new(inst, max_level);
    let mut stats = agent.solve()?;
    stats.elapsed = start.elapsed();
    Ok((agent.grid, stats))
}

/// One TSV row per puzzle: clues, cells per level, solved flag, seconds.
pub fn stats_tsv(results: &[(SudokuInstance, GameStats)], max_level: u32) -> String {
    use std::fmt::Write;
    let mut s = String::from("puzzle\tclues");
    for l in 0..=max_level {
        let _ = write!(s, "\tlevel{l}");
    }
    s.push_str("\tsolved\ttime_s\n");
    for (i, (_, g)) in results.iter().enumerate() {
        let _ = write!(s, "{i}\t{}", g.clues);
        for n in &g.levels {
            let _ = write!(s, "\t{n}");
        }
        let _ = writeln!(s, "\t{}\t{:.3}", g.won, g.elapsed.as_secs_f64());
    }
    s
}
