use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use limbelief::bench::sudoku::{solve_puzzle, stats_tsv};
use limbelief::bench::{run_benchmark, FirstClick, MinesweeperConfig, SudokuInstance};
use limbelief::textio::{repl, run_script, Settings};

#[derive(Parser)]
#[command(name = "limbelief", version, about = "Limited belief reasoner")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive prompt (the default).
    Repl,
    /// Run a script and print one TSV line per query.
    Run {
        script: PathBuf,
        /// Cap every belief level at this value.
        #[arg(long)]
        max_level: Option<u32>,
        /// Per-query time limit in milliseconds.
        #[arg(long)]
        time_limit: Option<u64>,
        /// Evaluate queries as written.
        #[arg(long)]
        no_rewrite: bool,
    },
    /// Play Sudoku or Minesweeper.
    Bench {
        #[arg(long, value_enum)]
        game: Game,
        /// Puzzle file, one 81-character line per puzzle.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        width: usize,
        #[arg(long, default_value_t = 8)]
        height: usize,
        #[arg(long, default_value_t = 10)]
        mines: usize,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// What the board guarantees about the first click.
        #[arg(long, value_enum, default_value_t = FirstRule::Opening)]
        first_click: FirstRule,
        #[arg(long, default_value_t = 1)]
        max_level: u32,
        /// Write the TSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FirstRule {
    Any,
    Safe,
    Opening,
}

#[derive(Clone, Copy, ValueEnum)]
enum Game {
    Sudoku,
    Minesweeper,
}

fn emit(tsv: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, tsv).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{tsv}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command.unwrap_or(Command::Repl) {
        Command::Repl => {
            let stdin = std::io::stdin();
            repl(stdin.lock(), std::io::stdout(), Settings::default()).map_err(|e| e.to_string())?;
            Ok(true)
        }
        Command::Run {
            script,
            max_level,
            time_limit,
            no_rewrite,
        } => {
            let src = std::fs::read_to_string(&script).map_err(|e| format!("{}: {e}", script.display()))?;
            let settings = Settings {
                max_level,
                time_limit: time_limit.map(Duration::from_millis),
                no_rewrite,
            };
            let answers = run_script(&src, &settings).map_err(|e| e.to_string())?;
            println!("query\tresult\tlevel\tms");
            for a in &answers {
                println!("{}", a.tsv());
            }
            Ok(answers.iter().all(|a| a.passed()))
        }
        Command::Bench {
            game: Game::Sudoku,
            file,
            max_level,
            out,
            ..
        } => {
            let file = file.ok_or("sudoku needs --file")?;
            let src = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let mut results = Vec::new();
            for line in src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                let p: SudokuInstance = line.parse().map_err(|e| format!("{line}: {e}"))?;
                results.push(solve_puzzle(&p, max_level).map_err(|e| e.to_string())?);
            }
            emit(&stats_tsv(&results, max_level), &out)?;
            Ok(results.iter().all(|(_, s)| s.won))
        }
        Command::Bench {
            game: Game::Minesweeper,
            width,
            height,
            mines,
            runs,
            seed,
            first_click,
            max_level,
            out,
            ..
        } => {
            let (rule, kept) = match first_click {
                FirstRule::Any => (FirstClick::Any, 0),
                FirstRule::Safe => (FirstClick::Safe, 1),
                FirstRule::Opening => (FirstClick::Opening, 4),
            };
            if width < 2 || height < 2 || mines == 0 || mines + kept.max(1) > width * height {
                return Err("board too small for that many mines".into());
            }
            let mut cfg = MinesweeperConfig::new(width, height, mines, seed);
            cfg.first_click = rule;
            let summary = run_benchmark(&cfg, runs, max_level, seed).map_err(|e| e.to_string())?;
            emit(&summary.tsv(), &out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
