//! Game agents: encodings, determinism, and the agents' claims checked
//! against the boards and an independent Sudoku solver.

mod common;

use std::collections::BTreeSet;

use limbelief::bench::minesweeper::{CellState, MineVocab};
use limbelief::bench::sudoku::{solve_puzzle, stats_tsv, sudoku_encode, SudokuVocab};
use limbelief::bench::{run_benchmark, Board, Decision, MinesweeperConfig, MinesweeperGame, SudokuInstance};
use limbelief::formula::{ground, Formula, GroundingContext, ProperPlusKB};
use limbelief::solver::Reasoner;
use limbelief::symbols::{Literal, Symbols};
use limbelief::textio::{Item, Parser};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

use common::brute_solve;

/// Drops the timing column of a benchmark TSV.
fn without_time(tsv: &str, col: &str) -> Vec<Vec<String>> {
    let rows: Vec<Vec<&str>> = tsv.lines().map(|l| l.split('\t').collect()).collect();
    let skip = rows[0].iter().position(|&h| h == col).unwrap();
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, c)| c.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn minesweeper_runs_repeat_exactly() {
    let cfg = MinesweeperConfig::new(8, 8, 10, 3);
    let a = run_benchmark(&cfg, 1, 1, 3).unwrap().tsv();
    let b = run_benchmark(&cfg, 1, 1, 3).unwrap().tsv();
    assert_eq!(without_time(&a, "mean_time_s"), without_time(&b, "mean_time_s"));
    let c = run_benchmark(&cfg, 6, 1, 3).unwrap();
    let d = run_benchmark(&cfg, 6, 1, 3).unwrap();
    assert_eq!(
        without_time(&c.tsv(), "mean_time_s"),
        without_time(&d.tsv(), "mean_time_s")
    );
    let header = a.lines().next().unwrap();
    assert_eq!(header, "config\tmax_level\truns\twin_rate\tmean_time_s\tlevel0\tlevel1\tguesses");
}

#[test]
fn sudoku_tsv_repeats_exactly() {
    let p: SudokuInstance = include_str!("../data/sudoku_easy.txt").lines().next().unwrap().parse().unwrap();
    let a = stats_tsv(&[solve_puzzle(&p, 1).unwrap()], 1);
    let b = stats_tsv(&[solve_puzzle(&p, 1).unwrap()], 1);
    assert_eq!(without_time(&a, "time_s"), without_time(&b, "time_s"));
}

#[test]
fn row_constraint_from_text_matches_encoder() {
    let names: Vec<String> = (1..=9).map(|d| format!("n{d}")).collect();
    let src = format!(
        "sort num\nname {} : num\nfun value/2 : num\nvar x, y1, y2 : num\nkb: y1 == y2 || value(x, y1) != value(x, y2)",
        names.join(", ")
    );
    let mut p = Parser::new();
    let mut parsed = ProperPlusKB::new();
    for (i, line) in src.lines().enumerate() {
        if let Some(Item::Kb(cs)) = p.parse_line(line, i + 1).unwrap() {
            parsed.clauses.extend(cs);
        }
    }
    assert_eq!(parsed.clauses.len(), 1);

    let mut sym = Symbols::new();
    let vocab = SudokuVocab::new(&mut sym);
    let mut encoded = sudoku_encode(&mut sym, &vocab, &SudokuInstance { cells: [0; 81] });
    encoded.clauses.truncate(1);

    // Ground over all nine digits plus the same number of spare names.
    let shown = |sym: &mut Symbols, kb: &ProperPlusKB| -> BTreeSet<Vec<String>> {
        let num = sym.find_sort("num").unwrap();
        let digits: Vec<_> = sym.names_of(num).iter().take(9).map(|&d| Formula::lit(Literal::eq(d, d))).collect();
        let probe = Formula::disjunction(sym, digits);
        let ctx = GroundingContext::new(sym, kb, &[&probe], 0);
        ground(sym, kb, &ctx)
            .iter()
            .map(|c| {
                let mut lits: Vec<String> = c.literals().iter().map(|&l| sym.literal_label(l)).collect();
                lits.sort();
                lits
            })
            .collect()
    };
    let a = shown(&mut p.sym, &parsed);
    let b = shown(&mut sym, &encoded);
    assert!(a.len() >= 9usize.pow(4));
    assert_eq!(a, b);
}

#[test]
fn level_one_cells_agree_with_backtracking() {
    let line = include_str!("../data/sudoku_easy.txt").lines().nth(7).unwrap();
    let p: SudokuInstance = line.parse().unwrap();
    let (grid, stats) = solve_puzzle(&p, 1).unwrap();
    assert!(stats.won);
    assert!(stats.levels[1] > 0, "{:?}", stats.levels);
    let mut reference = p.cells;
    assert!(brute_solve(&mut reference));
    assert_eq!(grid.cells, reference);
}

#[test]
fn naked_pair_needs_one_split() {
    // Row 0 misses 1..5 in columns 0, 3, 6, 7 and 8. Columns 0 and 3 hold
    // 3, 4 and 5, so those two cells share the pair {1, 2}; column 6 holds
    // 4 and 5, leaving 3 for cell 6 once the pair is placed.
    let mut cells = [0u8; 81];
    cells[..9].copy_from_slice(&[0, 6, 7, 0, 8, 9, 0, 0, 0]);
    for (r, c, d) in [(3, 0, 3), (4, 0, 4), (5, 0, 5), (6, 3, 3), (7, 3, 4), (8, 3, 5), (3, 6, 4), (6, 6, 5)] {
        cells[r * 9 + c] = d;
    }
    let p = SudokuInstance { cells };
    assert!(p.consistent());
    let mut reference = p.cells;
    assert!(brute_solve(&mut reference));
    assert_eq!(reference[6], 3);

    let mut sym = Symbols::new();
    let vocab = SudokuVocab::new(&mut sym);
    let kb = sudoku_encode(&mut sym, &vocab, &p);
    let ctx = GroundingContext::new(&mut sym, &kb, &[], 1);
    let mut r = Reasoner::new(&mut sym, kb, ctx);
    let cell = 6;
    let three = vocab.digits[2];
    let at0 = r.known_values(&mut sym, 0, &[vocab.cells[cell]], false).unwrap().unwrap();
    let at1 = r.known_values(&mut sym, 1, &[vocab.cells[cell]], false).unwrap().unwrap();
    assert!(at0.is_empty(), "{at0:?}");
    assert_eq!(at1, vec![(vocab.cells[cell], three)]);
}

#[test]
fn minesweeper_claims_hold_on_the_board() {
    for seed in 0..25u64 {
        let cfg = MinesweeperConfig::new(8, 8, 10, seed);
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let board = Board::random(&cfg, &mut rng);
        let mut game = MinesweeperGame::new(board, 1, rng);
        while !game.over() {
            match game.agent_step().unwrap() {
                Decision::Known { cell, value, level } => {
                    assert_eq!(game.board.is_mine(cell), value, "seed {seed} cell {cell}");
                    assert_eq!(game.state[cell], CellState::Covered);
                    if level > 0 {
                        requery(&mut game, cell, value, level);
                    }
                    if value {
                        game.state[cell] = CellState::Flagged;
                    } else {
                        assert!(game.open(cell));
                    }
                }
                Decision::Guess(cell) => {
                    assert_eq!(game.state[cell], CellState::Covered);
                    game.open(cell);
                }
                Decision::Stuck => break,
            }
        }
        for c in 0..game.board.cells() {
            if game.state[c] == CellState::Flagged {
                assert!(game.board.is_mine(c));
            }
        }
    }
}

/// A fresh reasoner over the same clauses gives the same level.
fn requery(game: &mut MinesweeperGame, cell: usize, value: bool, level: u32) {
    let kb = game.reasoner.kb().clone();
    let ctx = game.reasoner.context().clone();
    let sym = &mut game.sym;
    let mut r = Reasoner::new(sym, kb, ctx);
    let vocab: &MineVocab = &game.vocab;
    let l = if value { vocab.mine(sym, cell) } else { vocab.safe(sym, cell) };
    assert!(r.knows(sym, l, level, true).unwrap());
    assert!(!r.knows(sym, l, level - 1, true).unwrap());
}
