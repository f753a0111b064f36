//! Game agents that play Sudoku and Minesweeper by asking the reasoner for
//! known cells at increasing belief levels.

pub mod minesweeper;
pub mod sudoku;

use std::time::Duration;

pub use minesweeper::{run_benchmark, Board, FirstClick, MinesweeperConfig, MinesweeperGame, MinesweeperSummary};
pub use sudoku::{SudokuAgent, SudokuInstance};

/// What an agent decided to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision<C, V> {
    /// `cell` has `value` at belief level `level`.
    Known { cell: C, value: V, level: u32 },
    /// Nothing is known up to the maximum level; try `cell`.
    Guess(C),
    Stuck,
}

/// Outcome of one game.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GameStats {
    /// `levels[l]` is the number of cells decided at belief level `l`.
    pub levels: Vec<usize>,
    /// Cells opened by guessing (Minesweeper) or given as clues (Sudoku).
    pub guesses: usize,
    pub clues: usize,
    pub won: bool,
    pub elapsed: Duration,
}

impl GameStats {
    pub fn new(max_level: u32) -> GameStats {
        GameStats {
            levels: vec![0; max_level as usize + 1],
            ..GameStats::default()
        }
    }

    pub fn decided(&self) -> usize {
        self.levels.iter().sum()
    }

    pub fn record(&mut self, level: u32) {
        self.levels[level as usize] += 1;
    }
}
