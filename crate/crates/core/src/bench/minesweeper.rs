//! Minesweeper: a seeded board, the clauses an uncovered cell contributes,
//! and an agent that opens cells it knows to be safe.

use std::fmt::Write;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;

use crate::formula::{Formula, GroundingContext, ProperPlusKB, UClause};
use crate::solver::{Reasoner, SolverError};
use crate::symbols::{FunId, Literal, Symbols, TermId};

use super::{Decision, GameStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinesweeperConfig {
    pub width: usize,
    pub height: usize,
    pub mines: usize,
    pub seed: u64,
    pub first_click: FirstClick,
}

/// What the board guarantees about the first click (always top-left).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstClick {
    /// Mines anywhere.
    Any,
    /// No mine on the clicked cell.
    Safe,
    /// No mine on the clicked cell or next to it, so it opens an area.
    #[default]
    Opening,
}

impl MinesweeperConfig {
    pub fn new(width: usize, height: usize, mines: usize, seed: u64) -> MinesweeperConfig {
        assert!(mines > 0 && mines < width * height, "need 0 < mines < cells");
        MinesweeperConfig {
            width,
            height,
            mines,
            seed,
            first_click: FirstClick::default(),
        }
    }
}

/// Mine layout. Cells are numbered row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Board {
    pub width: usize,
    pub height: usize,
    mines: Vec<bool>,
}

impl Board {
    pub fn random(cfg: &MinesweeperConfig, rng: &mut Xoshiro256StarStar) -> Board {
        let mut board = Board {
            width: cfg.width,
            height: cfg.height,
            mines: vec![false; cfg.width * cfg.height],
        };
        let mut free: Vec<usize> = (0..board.cells()).collect();
        let near = board.neighbours(0);
        match cfg.first_click {
            FirstClick::Any => {}
            FirstClick::Safe => free.retain(|&c| c != 0),
            FirstClick::Opening => free.retain(|&c| c != 0 && !near.contains(&c)),
        }
        assert!(free.len() >= cfg.mines, "too many mines for the first-click rule");
        for i in index::sample(rng, free.len(), cfg.mines) {
            board.mines[free[i]] = true;
        }
        board
    }

    /// Parses rows of `*` (mine) and `.`.
    pub fn from_rows(rows: &[&str]) -> Board {
        let width = rows[0].len();
        let mines = rows.iter().flat_map(|r| r.chars().map(|c| c == '*')).collect();
        Board {
            width,
            height: rows.len(),
            mines,
        }
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn is_mine(&self, cell: usize) -> bool {
        self.mines[cell]
    }

    pub fn mine_count(&self) -> usize {
        self.mines.iter().filter(|&&m| m).count()
    }

    pub fn neighbours(&self, cell: usize) -> Vec<usize> {
        let (x, y) = ((cell % self.width) as isize, (cell / self.width) as isize);
        let mut out = Vec::with_capacity(8);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if (dx, dy) != (0, 0) && nx >= 0 && ny >= 0 && (nx as usize) < self.width && (ny as usize) < self.height {
                    out.push(ny as usize * self.width + nx as usize);
                }
            }
        }
        out
    }

    pub fn count(&self, cell: usize) -> usize {
        self.neighbours(cell).into_iter().filter(|&n| self.mines[n]).count()
    }
}

/// Symbols for a board: a sort of coordinates and `isMine/2 : BOOL`.
#[derive(Debug, Clone)]
pub struct MineVocab {
    pub is_mine: FunId,
    /// `isMine(x, y)` per cell.
    pub cells: Vec<TermId>,
}

impl MineVocab {
    pub fn new(sym: &mut Symbols, width: usize, height: usize) -> MineVocab {
        let coord = sym.sort("COORD");
        let coords: Vec<TermId> = (0..width.max(height))
            .map(|i| sym.declare_name(&format!("c{i}"), coord))
            .collect();
        let is_mine = sym.declare_fun("isMine", 2, sym.bool_sort());
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(sym.app(is_mine, &[coords[x], coords[y]]).expect("well sorted"));
            }
        }
        MineVocab { is_mine, cells }
    }

    pub fn mine(&self, sym: &Symbols, cell: usize) -> Literal {
        Literal::eq(self.cells[cell], sym.truth())
    }

    pub fn safe(&self, sym: &Symbols, cell: usize) -> Literal {
        Literal::neq(self.cells[cell], sym.truth())
    }
}

fn subsets(items: &[usize], size: usize, out: &mut Vec<Vec<usize>>) {
    fn go(items: &[usize], size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for (i, &x) in items.iter().enumerate() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(x);
            go(&items[i + 1..], size, cur, out);
            cur.pop();
        }
    }
    if size <= items.len() {
        go(items, size, &mut Vec::new(), out);
    }
}

/// Clauses saying exactly `count` of `neighbours` are mines: every
/// `count + 1` of them contain a safe one, every `n - count + 1` a mine.
pub fn encode_observation(sym: &Symbols, vocab: &MineVocab, neighbours: &[usize], count: usize) -> Vec<UClause> {
    let mut out = Vec::new();
    let mut sets = Vec::new();
    subsets(neighbours, count + 1, &mut sets);
    for s in sets.drain(..) {
        out.push(UClause::ground(s.iter().map(|&c| vocab.safe(sym, c)).collect()));
    }
    if count <= neighbours.len() {
        subsets(neighbours, neighbours.len() - count + 1, &mut sets);
    }
    for s in sets {
        out.push(UClause::ground(s.iter().map(|&c| vocab.mine(sym, c)).collect()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Covered,
    Open,
    Flagged,
}

/// A game in progress together with the agent's knowledge base.
pub struct MinesweeperGame {
    pub sym: Symbols,
    pub vocab: MineVocab,
    pub board: Board,
    pub state: Vec<CellState>,
    pub reasoner: Reasoner,
    pub max_level: u32,
    rng: Xoshiro256StarStar,
    lost: bool,
    opened: usize,
}

impl MinesweeperGame {
    pub fn new(board: Board, max_level: u32, rng: Xoshiro256StarStar) -> MinesweeperGame {
        let mut sym = Symbols::new();
        let vocab = MineVocab::new(&mut sym, board.width, board.height);
        let kb = ProperPlusKB::new();
        let probe = Formula::lit(vocab.mine(&sym, 0));
        let ctx = GroundingContext::new(&mut sym, &kb, &[&probe], max_level as usize);
        let reasoner = Reasoner::new(&mut sym, kb, ctx);
        let state = vec![CellState::Covered; board.cells()];
        MinesweeperGame {
            sym,
            vocab,
            board,
            state,
            reasoner,
            max_level,
            rng,
            lost: false,
            opened: 0,
        }
    }

    pub fn lost(&self) -> bool {
        self.lost
    }

    pub fn won(&self) -> bool {
        !self.lost && self.opened + self.board.mine_count() == self.board.cells()
    }

    pub fn over(&self) -> bool {
        self.lost || self.won()
    }

    /// Uncovers `cell`, spreading over zero counts. Returns false on a mine.
    pub fn open(&mut self, cell: usize) -> bool {
        if self.board.is_mine(cell) {
            self.lost = true;
            return false;
        }
        let mut todo = vec![cell];
        while let Some(c) = todo.pop() {
            if self.state[c] != CellState::Covered {
                continue;
            }
            self.state[c] = CellState::Open;
            self.opened += 1;
            let count = self.board.count(c);
            let ns = self.board.neighbours(c);
            let safe = UClause::ground(vec![self.vocab.safe(&self.sym, c)]);
            self.reasoner.add_clause(&mut self.sym, safe);
            for cl in encode_observation(&self.sym, &self.vocab, &ns, count) {
                self.reasoner.add_clause(&mut self.sym, cl);
            }
            if count == 0 {
                todo.extend(ns.into_iter().filter(|&n| self.state[n] == CellState::Covered));
            }
        }
        true
    }

    fn touches_open(&self, cell: usize) -> bool {
        self.board.neighbours(cell).into_iter().any(|n| self.state[n] == CellState::Open)
    }

    /// Looks for a covered cell whose status is known, at levels
    /// `0..=max_level` in turn; otherwise picks a cell to guess.
    pub fn agent_step(&mut self) -> Result<Decision<usize, bool>, SolverError> {
        if self.opened == 0 {
            return Ok(Decision::Guess(0));
        }
        let frontier: Vec<usize> = (0..self.board.cells())
            .filter(|&c| self.state[c] == CellState::Covered && self.touches_open(c))
            .collect();
        for level in 0..=self.max_level {
            for &c in &frontier {
                for mine in [true, false] {
                    let l = if mine {
                        self.vocab.mine(&self.sym, c)
                    } else {
                        self.vocab.safe(&self.sym, c)
                    };
                    if self.reasoner.knows(&mut self.sym, l, level, true)? {
                        return Ok(Decision::Known {
                            cell: c,
                            value: mine,
                            level,
                        });
                    }
                }
            }
        }
        let covered: Vec<usize> = (0..self.board.cells())
            .filter(|&c| self.state[c] == CellState::Covered)
            .collect();
        if covered.is_empty() {
            return Ok(Decision::Stuck);
        }
        let away: Vec<usize> = covered.iter().copied().filter(|&c| !self.touches_open(c)).collect();
        let pool = if away.is_empty() { &covered } else { &away };
        Ok(Decision::Guess(pool[self.rng.random_range(0..pool.len())]))
    }

    /// Plays until the game is won or lost.
    pub fn play(&mut self) -> Result<GameStats, SolverError> {
        let start = Instant::now();
        let mut stats = GameStats::new(self.max_level);
        while !self.over() {
            match self.agent_step()? {
                Decision::Known { cell, value, level } => {
                    stats.record(level);
                    if value {
                        self.state[cell] = CellState::Flagged;
                    } else {
                        self.open(cell);
                    }
                }
                Decision::Guess(cell) => {
                    stats.guesses += 1;
                    self.open(cell);
                }
                Decision::Stuck => break,
            }
        }
        stats.won = self.won();
        stats.elapsed = start.elapsed();
        Ok(stats)
    }
}

/// Results of a batch of games.
#[derive(Debug, Clone)]
pub struct MinesweeperSummary {
    pub config: MinesweeperConfig,
    pub max_level: u32,
    pub games: Vec<GameStats>,
}

impl MinesweeperSummary {
    pub fn win_rate(&self) -> f64 {
        self.games.iter().filter(|g| g.won).count() as f64 / self.games.len().max(1) as f64
    }

    pub fn mean_time(&self) -> Duration {
        let total: Duration = self.games.iter().map(|g| g.elapsed).sum();
        total / self.games.len().max(1) as u32
    }

    /// Header plus one row: configuration, level, win rate, mean seconds.
    pub fn tsv(&self) -> String {
        let c = &self.config;
        let mut s = String::from("config\tmax_level\truns\twin_rate\tmean_time_s");
        for l in 0..=self.max_level {
            let _ = write!(s, "\tlevel{l}");
        }
        s.push_str("\tguesses\n");
        let _ = write!(
            s,
            "{}x{}-{}\t{}\t{}\t{:.3}\t{:.4}",
            c.width,
            c.height,
            c.mines,
            self.max_level,
            self.games.len(),
            self.win_rate(),
            self.mean_time().as_secs_f64()
        );
        let n = self.games.len().max(1) as f64;
        for l in 0..=self.max_level as usize {
            let sum: usize = self.games.iter().map(|g| g.levels[l]).sum();
            let _ = write!(s, "\t{:.2}", sum as f64 / n);
        }
        let guesses: usize = self.games.iter().map(|g| g.guesses).sum();
        let _ = writeln!(s, "\t{:.2}", guesses as f64 / n);
        s
    }
}

/// Plays `runs` games. Run `i` draws its board and guesses from the seed
/// `seed + i`, so results do not depend on scheduling.
pub fn run_benchmark(
    config: &MinesweeperConfig,
    runs: usize,
    max_level: u32,
    seed: u64,
) -> Result<MinesweeperSummary, SolverError> {
    let games = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = Xoshiro256StarStar::seed_from_u64(seed.wrapping_add(i as u64));
            let board = Board::random(config, &mut rng);
            MinesweeperGame::new(board, max_level, rng).play()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MinesweeperSummary {
        config: *config,
        max_level,
        games,
    })
}
