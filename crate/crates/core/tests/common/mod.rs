//! Seeded random propositional knowledge bases and queries.
#![allow(dead_code)]

use limbelief::formula::{Formula, ProperPlusKB, UClause};
use limbelief::symbols::{Literal, Symbols, TermId};
use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub struct Case {
    pub sym: Symbols,
    pub kb: ProperPlusKB,
    pub terms: Vec<TermId>,
    /// Objective queries over the same vocabulary.
    pub queries: Vec<Formula>,
}

pub struct Gen {
    rng: Xoshiro256StarStar,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    fn literal(&mut self, sym: &Symbols, terms: &[TermId], names: &[TermId]) -> Literal {
        let pos = self.rng.random_bool(0.5);
        if self.rng.random_ratio(1, 20) {
            let a = names[self.rng.random_range(0..names.len())];
            let b = names[self.rng.random_range(0..names.len())];
            return Literal::pack(a, b, pos);
        }
        let t = terms[self.rng.random_range(0..terms.len())];
        let pool: Vec<TermId> = names
            .iter()
            .copied()
            .filter(|&n| sym.sort_of(n) == sym.sort_of(t))
            .collect();
        let n = pool[self.rng.random_range(0..pool.len())];
        Literal::pack(t, n, pos)
    }

    /// A random objective formula of depth at most `depth`.
    pub fn objective(&mut self, sym: &Symbols, terms: &[TermId], names: &[TermId], depth: u32) -> Formula {
        if depth == 0 || self.rng.random_ratio(2, 5) {
            return Formula::lit(self.literal(sym, terms, names));
        }
        match self.rng.random_range(0..3) {
            0 => Formula::not(self.objective(sym, terms, names, depth - 1)),
            1 => Formula::or(
                self.objective(sym, terms, names, depth - 1),
                self.objective(sym, terms, names, depth - 1),
            ),
            _ => Formula::and(
                self.objective(sym, terms, names, depth - 1),
                self.objective(sym, terms, names, depth - 1),
            ),
        }
    }

    /// Up to 5 ground clauses over up to 4 primitive terms and up to 3
    /// names per sort.
    pub fn case(&mut self, queries: usize) -> Case {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let k = self.rng.random_range(1..=3);
        let mut names: Vec<TermId> = (0..k).map(|i| sym.declare_name(&format!("n{i}"), s)).collect();
        if self.rng.random_bool(0.5) {
            names.push(sym.truth());
        }
        let f = sym.declare_fun("f", 1, s);
        let p = sym.declare_fun("p", 1, sym.bool_sort());
        let nterms = self.rng.random_range(1..=4);
        let mut terms = Vec::new();
        let mut c = 0;
        while terms.len() < nterms {
            let t = match self.rng.random_range(0..4) {
                0 => {
                    let fun = sym.declare_fun(&format!("c{c}"), 0, s);
                    c += 1;
                    sym.app(fun, &[]).unwrap()
                }
                1 => {
                    let fun = sym.declare_fun(&format!("c{c}"), 0, sym.bool_sort());
                    c += 1;
                    sym.app(fun, &[]).unwrap()
                }
                2 => {
                    let a = names[self.rng.random_range(0..k)];
                    sym.app(f, &[a]).unwrap()
                }
                _ => {
                    let a = names[self.rng.random_range(0..k)];
                    sym.app(p, &[a]).unwrap()
                }
            };
            if !terms.contains(&t) {
                terms.push(t);
            }
        }
        if terms.iter().any(|&t| sym.sort_of(t) == sym.bool_sort()) {
            if !names.contains(&sym.truth()) {
                names.push(sym.truth());
            }
        }
        let mut kb = ProperPlusKB::new();
        for _ in 0..self.rng.random_range(0..=5) {
            let len = self.rng.random_range(1..=3);
            let lits = (0..len).map(|_| self.literal(&sym, &terms, &names)).collect();
            kb.push(UClause::ground(lits));
        }
        let queries = (0..queries)
            .map(|_| self.objective(&sym, &terms, &names, 3))
            .collect();
        Case {
            sym,
            kb,
            terms,
            queries,
        }
    }
}

/// Declarations and `kb:` lines of a script, with the parser kept around
/// so queries can be read against the same symbols.
pub fn load(src: &str) -> (limbelief::textio::Parser, ProperPlusKB) {
    use limbelief::textio::{Item, Parser};
    let mut p = Parser::new();
    let mut kb = ProperPlusKB::new();
    for (i, line) in src.lines().enumerate() {
        if let Some(Item::Kb(cs)) = p.parse_line(line, i + 1).unwrap() {
            for c in cs {
                kb.push(c);
            }
        }
    }
    (p, kb)
}

pub const FATHER: &str = "
sort HUMAN
name Sally, Frank, Fred : HUMAN
fun fatherOf/1 : HUMAN
pred Rich/1
var x : HUMAN
kb: fatherOf(Sally) == Frank || fatherOf(Sally) == Fred
kb: forall x (fatherOf(Sally) != x || Rich(x))
";

/// Plain backtracking, used to check the agent's answers.
pub fn brute_solve(cells: &mut [u8; 81]) -> bool {
    let Some(i) = cells.iter().position(|&c| c == 0) else {
        return true;
    };
    let (r, c) = (i / 9, i % 9);
    for d in 1..=9u8 {
        let clash = (0..9).any(|j| {
            cells[r * 9 + j] == d
                || cells[j * 9 + c] == d
                || cells[(r / 3 * 3 + j / 3) * 9 + c / 3 * 3 + j % 3] == d
        });
        if !clash {
            cells[i] = d;
            if brute_solve(cells) {
                return true;
            }
        }
    }
    cells[i] = 0;
    false
}
