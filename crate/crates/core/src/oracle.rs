//! Brute-force classical semantics over a finite name universe.
//!
//! Exponential by design; meant for checking the solver on small inputs.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::formula::{ground, Formula, GroundingContext, ProperPlusKB};
use crate::symbols::{Literal, Symbols, TermId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("no names available for sort of {0}")]
    EmptySort(String),
    #[error("term {0} is outside the enumerated universe")]
    UnknownTerm(String),
    #[error("{0} has free variables")]
    NotClosed(String),
}

/// An assignment of names to primitive terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct World {
    values: Vec<TermId>,
}

/// The worlds over a fixed list of primitive terms.
#[derive(Debug, Clone)]
pub struct Worlds {
    terms: Vec<TermId>,
    index: HashMap<TermId, usize>,
    pub worlds: Vec<World>,
}

impl Worlds {
    pub fn terms(&self) -> &[TermId] {
        &self.terms
    }

    pub fn value(&self, w: &World, t: TermId) -> Option<TermId> {
        self.index.get(&t).map(|&i| w.values[i])
    }
}

/// Every sort-preserving assignment of universe names to `terms`, in
/// lexicographic order of universe position.
pub fn enumerate_worlds(
    sym: &Symbols,
    terms: &[TermId],
    universe: &GroundingContext,
) -> Result<Worlds, OracleError> {
    let pools: Vec<&[TermId]> = terms.iter().map(|&t| universe.names(sym.sort_of(t))).collect();
    if let Some(i) = pools.iter().position(|p| p.is_empty()) {
        return Err(OracleError::EmptySort(sym.label(terms[i])));
    }
    let mut worlds = Vec::new();
    let mut idx = vec![0usize; terms.len()];
    loop {
        worlds.push(World {
            values: idx.iter().zip(&pools).map(|(&i, p)| p[i]).collect(),
        });
        let mut i = terms.len();
        loop {
            if i == 0 {
                let index = terms.iter().enumerate().map(|(i, &t)| (t, i)).collect();
                return Ok(Worlds {
                    terms: terms.to_vec(),
                    index,
                    worlds,
                });
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < pools[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

struct Eval<'a> {
    sym: &'a mut Symbols,
    universe: &'a GroundingContext,
    worlds: &'a Worlds,
    /// Indices into `worlds.worlds` of the worlds compatible with the KB.
    model: Vec<usize>,
}

impl Eval<'_> {
    fn value(&self, w: &World, t: TermId) -> Result<TermId, OracleError> {
        if t.is_name() {
            return Ok(t);
        }
        if self.sym.is_var(t) {
            return Err(OracleError::NotClosed(self.sym.label(t)));
        }
        self.worlds
            .value(w, t)
            .ok_or_else(|| OracleError::UnknownTerm(self.sym.label(t)))
    }

    fn literal(&self, w: &World, l: Literal) -> Result<bool, OracleError> {
        let a = self.value(w, l.lhs())?;
        let b = self.value(w, l.rhs())?;
        Ok((a == b) == l.pos())
    }

    fn holds(&mut self, w: &World, f: &Formula) -> Result<bool, OracleError> {
        match f {
            Formula::Lit(l) => self.literal(w, *l),
            Formula::Or(a, b) => Ok(self.holds(w, a)? || self.holds(w, b)?),
            Formula::Not(a) => Ok(!self.holds(w, a)?),
            Formula::Exists(x, a) => {
                let names = self.universe.names(self.sym.sort_of(*x)).to_vec();
                for n in names {
                    let inst = a.substitute(self.sym, *x, n);
                    if self.holds(w, &inst)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Know(_, a) => {
                for i in self.model.clone() {
                    let v = self.worlds.worlds[i].clone();
                    if !self.holds(&v, a)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Maybe(_, a) => {
                for i in self.model.clone() {
                    let v = self.worlds.worlds[i].clone();
                    if self.holds(&v, a)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::OnlyKnow(a) => {
                for i in 0..self.worlds.worlds.len() {
                    let v = self.worlds.worlds[i].clone();
                    let inside = self.model.binary_search(&i).is_ok();
                    if self.holds(&v, a)? != inside {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Guarantee(a) => self.holds(w, a),
        }
    }
}

/// Primitive terms of the grounding of `kb` and `sigma` over `universe`.
pub fn primitive_terms(
    sym: &mut Symbols,
    kb: &ProperPlusKB,
    sigma: &Formula,
    universe: &GroundingContext,
) -> Vec<TermId> {
    let mut terms = BTreeSet::new();
    for c in ground(sym, kb, universe) {
        terms.extend(c.literals().iter().map(|l| l.lhs()).filter(|&t| sym.is_primitive(t)));
    }
    sigma.ground_terms(sym, universe, &mut terms);
    terms.into_iter().filter(|&t| sym.is_primitive(t)).collect()
}

/// Decides `O kb => sigma` classically, reading `K_k`/`M_k` as `K`/`M` and
/// `G a` as `a`.
pub fn classical_holds(
    sym: &mut Symbols,
    kb: &ProperPlusKB,
    sigma: &Formula,
    universe: &GroundingContext,
) -> Result<bool, OracleError> {
    let terms = primitive_terms(sym, kb, sigma, universe);
    let worlds = enumerate_worlds(sym, &terms, universe)?;
    let clauses = ground(sym, kb, universe);
    let mut ev = Eval {
        sym,
        universe,
        worlds: &worlds,
        model: Vec::new(),
    };
    'worlds: for (i, w) in worlds.worlds.iter().enumerate() {
        for c in &clauses {
            let mut sat = false;
            for &l in c.literals() {
                if ev.literal(w, l)? {
                    sat = true;
                    break;
                }
            }
            if !sat {
                continue 'worlds;
            }
        }
        ev.model.push(i);
    }
    let actual = worlds.worlds.first().cloned().expect("at least one world");
    ev.holds(&actual, sigma)
}

/// A universe for `kb` and `sigma` with `extra` spare names per sort.
pub fn universe(sym: &mut Symbols, kb: &ProperPlusKB, sigma: &Formula, extra: usize) -> GroundingContext {
    GroundingContext::new(sym, kb, &[sigma], extra)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn world_counts() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let a = sym.declare_name("a", s);
        let f = sym.declare_fun("f", 0, s);
        let g = sym.declare_fun("g", 0, s);
        let h = sym.declare_fun("h", 0, s);
        let (ft, gt, ht) = (sym.app(f, &[]).unwrap(), sym.app(g, &[]).unwrap(), sym.app(h, &[]).unwrap());
        let q = Formula::lit(Literal::eq(ft, a));
        let u = universe(&mut sym, &ProperPlusKB::new(), &q, 1);
        assert_eq!(u.names(s).len(), 3);
        assert_eq!(enumerate_worlds(&sym, &[], &u).unwrap().worlds.len(), 1);
        assert_eq!(enumerate_worlds(&sym, &[ft, gt], &u).unwrap().worlds.len(), 9);
        assert_eq!(enumerate_worlds(&sym, &[ft, gt, ht], &u).unwrap().worlds.len(), 27);
    }
}
