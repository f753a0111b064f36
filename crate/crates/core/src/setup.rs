//! Setups: sets of ground clauses closed under unit propagation.
//!
//! Clauses are stored with invalid literals removed and valid clauses
//! dropped, which is what propagating with every valid literal amounts to.
//! Derived unit literals are kept in a per-term index (a known value and a
//! list of excluded names). Non-unit clauses are watched on two literals.
//! Every change goes through an undo log so that [`Setup::undo`] restores
//! the exact state saved by [`Setup::mark`].

use std::collections::HashMap;

use thiserror::Error;

use crate::clause::Clause;
use crate::symbols::{Literal, SortId, Symbols, TermId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetupError {
    #[error("setups only hold ground clauses")]
    NonGround,
    #[error("undo does not match the most recent mark")]
    UnbalancedUndo,
}

/// What the unit index says about a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Determined {
    Value(TermId),
    Excluded(Vec<TermId>),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    depth: usize,
    log_len: usize,
}

#[derive(Debug, Clone, Default)]
struct TermState {
    value: Option<TermId>,
    excluded: Vec<TermId>,
}

#[derive(Debug, Clone)]
struct Stored {
    lits: Box<[Literal]>,
    watch: [u32; 2],
}

#[derive(Debug, Clone, Copy)]
enum Undo {
    Value(u32),
    Excluded(u32),
    Unit,
    Clause,
    Occurs(u32),
    Watch(u32),
    WatchMove { clause: u32, slot: u8, old: u32 },
    Empty,
}

#[derive(Debug, Clone, Default)]
pub struct Setup {
    clauses: Vec<Stored>,
    state: Vec<TermState>,
    watches: Vec<Vec<u32>>,
    occurs: Vec<Vec<u32>>,
    units: Vec<Literal>,
    empty: bool,
    log: Vec<Undo>,
    marks: Vec<usize>,
    queue: Vec<Literal>,
}

#[inline]
fn slot(t: TermId) -> usize {
    t.index() as usize
}

fn term_at(index: usize) -> TermId {
    TermId::from_parts(index as u32, false).expect("index came from a handle")
}

impl Setup {
    pub fn new() -> Setup {
        Setup::default()
    }

    pub fn from_clauses<'a>(
        sym: &Symbols,
        clauses: impl IntoIterator<Item = &'a Clause>,
    ) -> Result<Setup, SetupError> {
        let mut s = Setup::new();
        for c in clauses {
            s.add(sym, c)?;
        }
        Ok(s)
    }

    fn grow(&mut self, index: usize) {
        if self.state.len() <= index {
            let n = index + 1;
            self.state.resize_with(n, TermState::default);
            self.watches.resize_with(n, Vec::new);
            self.occurs.resize_with(n, Vec::new);
        }
    }

    /// UP contains the empty clause.
    pub fn obviously_inconsistent(&self) -> bool {
        self.empty
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn units(&self) -> &[Literal] {
        &self.units
    }

    #[inline]
    fn falsified(&self, l: Literal) -> bool {
        let Some(st) = self.state.get(slot(l.lhs())) else {
            return false;
        };
        if l.pos() {
            match st.value {
                Some(v) => v != l.rhs(),
                None => st.excluded.contains(&l.rhs()),
            }
        } else {
            st.value == Some(l.rhs())
        }
    }

    /// Some derived unit subsumes `l`.
    #[inline]
    fn satisfied(&self, l: Literal) -> bool {
        if l.lhs().is_name() {
            return false;
        }
        let Some(st) = self.state.get(slot(l.lhs())) else {
            return false;
        };
        if l.pos() {
            st.value == Some(l.rhs())
        } else {
            match st.value {
                Some(v) => v != l.rhs() && l.rhs().is_name(),
                None => st.excluded.contains(&l.rhs()),
            }
        }
    }

    fn set_empty(&mut self) {
        if !self.empty {
            self.empty = true;
            self.log.push(Undo::Empty);
        }
        self.queue.clear();
    }

    /// Records a derived unit and queues it for propagation.
    fn assign(&mut self, l: Literal) {
        let t = slot(l.lhs());
        self.grow(t);
        let st = &mut self.state[t];
        let n = l.rhs();
        if l.pos() {
            match st.value {
                Some(v) if v == n => return,
                Some(_) => return self.set_empty(),
                None => {}
            }
            if st.excluded.contains(&n) {
                return self.set_empty();
            }
            st.value = Some(n);
            self.log.push(Undo::Value(t as u32));
        } else {
            match st.value {
                Some(v) if v == n => return self.set_empty(),
                Some(_) => return,
                None => {}
            }
            if st.excluded.contains(&n) {
                return;
            }
            st.excluded.push(n);
            self.log.push(Undo::Excluded(t as u32));
        }
        self.units.push(l);
        self.log.push(Undo::Unit);
        self.queue.push(l);
    }

    fn propagate(&mut self) {
        while let Some(u) = self.queue.pop() {
            if self.empty {
                break;
            }
            let t = slot(u.lhs());
            let mut i = 0;
            while i < self.watches[t].len() {
                let cid = self.watches[t][i];
                i += 1;
                self.visit(cid, t);
                if self.empty {
                    break;
                }
            }
        }
        self.queue.clear();
    }

    fn visit(&mut self, cid: u32, t: usize) {
        for s in 0..2 {
            let c = &self.clauses[cid as usize];
            let wi = c.watch[s];
            let w = c.lits[wi as usize];
            if slot(w.lhs()) != t || !self.falsified(w) {
                continue;
            }
            let oi = c.watch[1 - s];
            let other = c.lits[oi as usize];
            if self.satisfied(other) {
                continue;
            }
            let repl = c
                .lits
                .iter()
                .enumerate()
                .position(|(j, &l)| j as u32 != wi && j as u32 != oi && !self.falsified(l));
            match repl {
                Some(j) => {
                    let nt = slot(c.lits[j].lhs());
                    self.log.push(Undo::WatchMove {
                        clause: cid,
                        slot: s as u8,
                        old: wi,
                    });
                    self.clauses[cid as usize].watch[s] = j as u32;
                    if nt != t {
                        self.watches[nt].push(cid);
                        self.log.push(Undo::Watch(nt as u32));
                    }
                }
                None if self.falsified(other) => return self.set_empty(),
                None => self.assign(other),
            }
        }
    }

    /// Adds a ground clause and propagates.
    pub fn add(&mut self, sym: &Symbols, c: &Clause) -> Result<(), SetupError> {
        if !c.is_ground(sym) {
            return Err(SetupError::NonGround);
        }
        if self.empty {
            return Ok(());
        }
        let c = c.strip_invalid(sym);
        if c.valid(sym) {
            return Ok(());
        }
        match c.len() {
            0 => self.set_empty(),
            1 => self.assign(c.literals()[0]),
            _ => self.store(&c),
        }
        self.propagate();
        Ok(())
    }

    /// Adds a unit literal (no validity stripping beyond `add`).
    pub fn add_literal(&mut self, sym: &Symbols, l: Literal) -> Result<(), SetupError> {
        self.add(sym, &Clause::unit(l))
    }

    fn store(&mut self, c: &Clause) {
        let lits = c.literals();
        if lits.iter().any(|&l| self.satisfied(l)) {
            return;
        }
        let live: Vec<u32> = (0..lits.len() as u32)
            .filter(|&j| !self.falsified(lits[j as usize]))
            .take(2)
            .collect();
        if live.is_empty() {
            return self.set_empty();
        }
        let w0 = live[0];
        let w1 = live
            .get(1)
            .copied()
            .unwrap_or(if w0 == 0 { 1 } else { 0 });
        let cid = self.clauses.len() as u32;
        let max = lits.iter().map(|l| slot(l.lhs())).max().unwrap_or(0);
        self.grow(max);
        self.clauses.push(Stored {
            lits: lits.into(),
            watch: [w0, w1],
        });
        self.log.push(Undo::Clause);
        let mut prev = usize::MAX;
        for l in lits {
            let t = slot(l.lhs());
            if t != prev {
                self.occurs[t].push(cid);
                self.log.push(Undo::Occurs(t as u32));
                prev = t;
            }
        }
        let t0 = slot(lits[w0 as usize].lhs());
        let t1 = slot(lits[w1 as usize].lhs());
        self.watches[t0].push(cid);
        self.log.push(Undo::Watch(t0 as u32));
        if t1 != t0 {
            self.watches[t1].push(cid);
            self.log.push(Undo::Watch(t1 as u32));
        }
        if live.len() == 1 {
            self.assign(lits[w0 as usize]);
        }
    }

    /// Saves the current state.
    pub fn mark(&mut self) -> Checkpoint {
        self.marks.push(self.log.len());
        Checkpoint {
            depth: self.marks.len(),
            log_len: self.log.len(),
        }
    }

    /// Restores the state saved by the most recent outstanding `mark`.
    pub fn undo(&mut self, cp: Checkpoint) -> Result<(), SetupError> {
        if self.marks.len() != cp.depth || self.marks.last() != Some(&cp.log_len) {
            return Err(SetupError::UnbalancedUndo);
        }
        self.marks.pop();
        while self.log.len() > cp.log_len {
            match self.log.pop().unwrap() {
                Undo::Value(t) => self.state[t as usize].value = None,
                Undo::Excluded(t) => {
                    self.state[t as usize].excluded.pop();
                }
                Undo::Unit => {
                    self.units.pop();
                }
                Undo::Clause => {
                    self.clauses.pop();
                }
                Undo::Occurs(t) => {
                    self.occurs[t as usize].pop();
                }
                Undo::Watch(t) => {
                    self.watches[t as usize].pop();
                }
                Undo::WatchMove { clause, slot, old } => {
                    self.clauses[clause as usize].watch[slot as usize] = old;
                }
                Undo::Empty => self.empty = false,
            }
        }
        Ok(())
    }

    /// Literals of stored clause `cid` not falsified by a derived unit.
    fn reduced(&self, cid: usize) -> impl Iterator<Item = Literal> + '_ {
        self.clauses[cid]
            .lits
            .iter()
            .copied()
            .filter(|&l| !self.falsified(l))
    }

    /// Membership of `c` in the closure of the setup under subsumption.
    pub fn subsumes(&self, sym: &Symbols, c: &Clause) -> bool {
        if self.empty || c.valid(sym) {
            return true;
        }
        let lits = c.literals();
        if lits.iter().any(|&l| self.satisfied(l)) {
            return true;
        }
        let mut prev = None;
        for l in lits {
            let t = l.lhs();
            if t.is_name() || prev == Some(t) {
                continue;
            }
            prev = Some(t);
            let Some(occ) = self.occurs.get(slot(t)) else {
                continue;
            };
            for &cid in occ {
                let mut any = false;
                let ok = self.reduced(cid as usize).all(|a| {
                    any = true;
                    lits.iter().any(|&b| a.subsumes(b))
                });
                if ok && any {
                    return true;
                }
            }
        }
        false
    }

    /// Unit-index summary for `t`.
    pub fn determines(&self, t: TermId) -> Determined {
        match self.state.get(slot(t)) {
            _ if t.is_name() => Determined::Value(t),
            Some(st) if st.value.is_some() => Determined::Value(st.value.unwrap()),
            Some(st) if !st.excluded.is_empty() => Determined::Excluded(st.excluded.clone()),
            _ => Determined::Unknown,
        }
    }

    pub fn value_of(&self, t: TermId) -> Option<TermId> {
        self.state.get(slot(t)).and_then(|st| st.value)
    }

    /// The minimal propagated clauses: units plus fully reduced clauses,
    /// without any clause subsumed by a different one.
    pub fn minimal_clauses(&self) -> Vec<Clause> {
        if self.empty {
            return vec![Clause::empty()];
        }
        let mut out: Vec<Clause> = Vec::new();
        for &u in &self.units {
            if !u.pos() && self.state[slot(u.lhs())].value.is_some() {
                continue;
            }
            out.push(Clause::unit(u));
        }
        let mut rest: Vec<Clause> = Vec::new();
        for cid in 0..self.clauses.len() {
            if self.clauses[cid].lits.iter().any(|&l| self.satisfied(l)) {
                continue;
            }
            let r: Clause = self.reduced(cid).collect();
            if r.len() >= 2 {
                rest.push(r);
            }
        }
        rest.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        rest.dedup();
        let mut by_first: HashMap<TermId, Vec<usize>> = HashMap::new();
        for (i, c) in rest.iter().enumerate() {
            by_first.entry(c.literals()[0].lhs()).or_default().push(i);
        }
        for (i, c) in rest.iter().enumerate() {
            let mut prev = None;
            let mut subsumed = false;
            'terms: for l in c.literals() {
                if prev == Some(l.lhs()) {
                    continue;
                }
                prev = Some(l.lhs());
                if let Some(cands) = by_first.get(&l.lhs()) {
                    for &j in cands {
                        // Of clauses subsuming each other, keep the first.
                        if j != i && rest[j].len() <= c.len() && rest[j].subsumes(c) && (j < i || !c.subsumes(&rest[j])) {
                            subsumed = true;
                            break 'terms;
                        }
                    }
                }
            }
            if !subsumed {
                out.push(c.clone());
            }
        }
        out
    }

    /// Obviously inconsistent, or the literals of the minimal clauses
    /// contain a complementary pair.
    pub fn potentially_inconsistent(&self) -> bool {
        self.potential_conflict(|_| false)
    }

    /// As `potentially_inconsistent`, and also when some term is unequal
    /// to every name its sort has in `universe`.
    pub fn potentially_inconsistent_over<'a>(
        &self,
        sym: &Symbols,
        universe: impl Fn(SortId) -> &'a [TermId],
    ) -> bool {
        self.potential_conflict(|(t, ns)| {
            let pool = universe(sym.sort_of(t));
            !pool.is_empty() && pool.iter().all(|n| ns.contains(n))
        })
    }

    fn potential_conflict(&self, excluded: impl Fn((TermId, &[TermId])) -> bool) -> bool {
        if self.empty {
            return true;
        }
        let mut pos: HashMap<TermId, TermId> = HashMap::new();
        let mut neg: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for c in self.minimal_clauses() {
            for &l in c.literals() {
                if l.pos() {
                    match pos.get(&l.lhs()) {
                        Some(&n) if n != l.rhs() => return true,
                        _ => {
                            pos.insert(l.lhs(), l.rhs());
                        }
                    }
                } else {
                    neg.entry(l.lhs()).or_default().push(l.rhs());
                }
            }
        }
        pos.iter().any(|(t, n)| neg.get(t).is_some_and(|ns| ns.contains(n)))
            || neg.iter().any(|(&t, ns)| excluded((t, ns)))
    }

    /// The part of the minimal clauses connected to `terms`.
    pub fn restrict(&self, sym: &Symbols, terms: &[TermId]) -> Setup {
        let wp = self.minimal_clauses();
        let mut parent: HashMap<TermId, TermId> = HashMap::new();
        fn find(p: &mut HashMap<TermId, TermId>, x: TermId) -> TermId {
            let mut r = x;
            while let Some(&q) = p.get(&r) {
                if q == r {
                    break;
                }
                r = q;
            }
            let mut y = x;
            while y != r {
                let next = p[&y];
                p.insert(y, r);
                y = next;
            }
            r
        }
        for c in &wp {
            let lits = c.literals();
            if lits.is_empty() {
                continue;
            }
            let a = lits[0].lhs();
            parent.entry(a).or_insert(a);
            for l in &lits[1..] {
                let b = l.lhs();
                parent.entry(b).or_insert(b);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent.insert(rb, ra);
                }
            }
        }
        let mut roots: Vec<TermId> = Vec::new();
        for &t in terms {
            if parent.contains_key(&t) {
                roots.push(find(&mut parent, t));
            }
        }
        let mut out = Setup::new();
        for c in &wp {
            let keep = match c.literals().first() {
                None => true,
                Some(l) => roots.contains(&find(&mut parent, l.lhs())),
            };
            if keep {
                out.add(sym, c).expect("minimal clauses are ground");
            }
        }
        out
    }

    /// Terms with a derived unit or occurring in a stored clause.
    pub fn terms(&self) -> Vec<TermId> {
        (0..self.state.len())
            .filter(|&i| {
                let st = &self.state[i];
                st.value.is_some() || !st.excluded.is_empty() || !self.occurs[i].is_empty()
            })
            .map(term_at)
            .collect()
    }

    /// Names `n` such that `t = n` or `t != n` occurs in the setup.
    pub fn names_with(&self, t: TermId, out: &mut Vec<TermId>) {
        let Some(st) = self.state.get(slot(t)) else {
            return;
        };
        out.extend(st.value);
        out.extend(st.excluded.iter().copied());
        for &cid in &self.occurs[slot(t)] {
            for l in self.clauses[cid as usize].lits.iter() {
                if l.lhs() == t {
                    out.push(l.rhs());
                }
            }
        }
    }

    /// Every clause currently stored, plus the units, as clauses.
    pub fn clauses(&self) -> Vec<Clause> {
        let mut out: Vec<Clause> = self.units.iter().map(|&u| Clause::unit(u)).collect();
        out.extend(self.clauses.iter().map(|c| Clause::new(c.lits.iter().copied())));
        if self.empty {
            out.push(Clause::empty());
        }
        out
    }

    /// Adds every literal isomorphic to `l` (under injective, sort-preserving
    /// renamings into `universe`) whose negation is not already entailed.
    pub fn add_isomorphic(
        &mut self,
        sym: &mut Symbols,
        l: Literal,
        universe: &dyn Fn(SortId) -> Vec<TermId>,
    ) -> Result<usize, SetupError> {
        if !sym.is_ground_literal(l) {
            return Err(SetupError::NonGround);
        }
        let mut distinct: Vec<TermId> = Vec::new();
        let mut names = Vec::new();
        sym.names_in(l.lhs(), &mut names);
        names.push(l.rhs());
        for n in names {
            if !distinct.contains(&n) {
                distinct.push(n);
            }
        }
        let pools: Vec<Vec<TermId>> = distinct.iter().map(|&n| universe(sym.sort_of(n))).collect();
        let mut images: Vec<Literal> = Vec::new();
        let mut chosen: Vec<TermId> = Vec::with_capacity(distinct.len());
        fn rec(
            depth: usize,
            pools: &[Vec<TermId>],
            chosen: &mut Vec<TermId>,
            out: &mut Vec<Vec<TermId>>,
        ) {
            if depth == pools.len() {
                out.push(chosen.clone());
                return;
            }
            for &n in &pools[depth] {
                if !chosen.contains(&n) {
                    chosen.push(n);
                    rec(depth + 1, pools, chosen, out);
                    chosen.pop();
                }
            }
        }
        let mut maps = Vec::new();
        rec(0, &pools, &mut chosen, &mut maps);
        for m in maps {
            let image = |n: TermId| distinct.iter().position(|&d| d == n).map_or(n, |i| m[i]);
            let lhs = match sym.fun_of(l.lhs()) {
                Some(f) => {
                    let args: Vec<TermId> = sym.args(l.lhs()).iter().map(|&a| image(a)).collect();
                    sym.app(f, &args).expect("renaming keeps the shape")
                }
                None => image(l.lhs()),
            };
            let l2 = Literal::pack(lhs, image(l.rhs()), l.pos());
            if !self.subsumes(sym, &Clause::unit(l2.flip())) {
                images.push(l2);
            }
        }
        for &l2 in &images {
            self.add_literal(sym, l2)?;
        }
        Ok(images.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fx {
        sym: Symbols,
        f: TermId,
        g: TermId,
        n: Vec<TermId>,
    }

    fn fx() -> Fx {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let n: Vec<TermId> = (0..3).map(|i| sym.declare_name(&format!("n{i}"), s)).collect();
        let ff = sym.declare_fun("f", 0, s);
        let gg = sym.declare_fun("g", 0, s);
        let f = sym.app(ff, &[]).unwrap();
        let g = sym.app(gg, &[]).unwrap();
        Fx { sym, f, g, n }
    }

    #[test]
    fn propagation_reaches_units() {
        let x = fx();
        let mut s = Setup::new();
        let c = Clause::new([Literal::eq(x.f, x.n[0]), Literal::eq(x.g, x.n[1])]);
        s.add(&x.sym, &c).unwrap();
        s.add_literal(&x.sym, Literal::neq(x.f, x.n[0])).unwrap();
        assert!(s.subsumes(&x.sym, &Clause::unit(Literal::eq(x.g, x.n[1]))));
        assert_eq!(s.determines(x.g), Determined::Value(x.n[1]));
    }

    #[test]
    fn potential_inconsistency_example() {
        let x = fx();
        let mut s = Setup::new();
        s.add(&x.sym, &Clause::new([Literal::eq(x.f, x.n[0]), Literal::eq(x.g, x.n[0])]))
            .unwrap();
        s.add(&x.sym, &Clause::new([Literal::eq(x.f, x.n[1]), Literal::eq(x.g, x.n[1])]))
            .unwrap();
        assert!(!s.obviously_inconsistent());
        assert!(s.potentially_inconsistent());
    }

    #[test]
    fn conflicting_units_give_empty_clause() {
        let x = fx();
        let mut s = Setup::new();
        s.add_literal(&x.sym, Literal::eq(x.f, x.n[0])).unwrap();
        s.add_literal(&x.sym, Literal::eq(x.f, x.n[1])).unwrap();
        assert!(s.obviously_inconsistent());
    }

    #[test]
    fn mutually_subsuming_clauses_keep_one() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let n: Vec<TermId> = (0..3).map(|i| sym.declare_name(&format!("n{i}"), s)).collect();
        let f = sym.declare_fun("c", 0, s);
        let c = sym.app(f, &[]).unwrap();
        let a = Clause::new([Literal::neq(c, n[2]), Literal::eq(c, n[0])]);
        let b = Clause::new([Literal::neq(c, n[2]), Literal::eq(c, n[1])]);
        let setup = Setup::from_clauses(&sym, [&a, &b]).unwrap();
        assert_eq!(setup.minimal_clauses().len(), 1);
    }

    #[test]
    fn mark_undo_restores() {
        let x = fx();
        let mut s = Setup::new();
        s.add(&x.sym, &Clause::new([Literal::eq(x.f, x.n[0]), Literal::eq(x.g, x.n[1])]))
            .unwrap();
        let before = s.clauses();
        let cp = s.mark();
        s.add_literal(&x.sym, Literal::neq(x.f, x.n[0])).unwrap();
        s.add_literal(&x.sym, Literal::neq(x.g, x.n[1])).unwrap();
        assert!(s.obviously_inconsistent());
        s.undo(cp).unwrap();
        assert_eq!(s.clauses(), before);
        assert!(!s.obviously_inconsistent());
        assert_eq!(s.undo(cp), Err(SetupError::UnbalancedUndo));
    }

    #[test]
    fn isomorphic_addition() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let n = sym.declare_name("n", s);
        let n2 = sym.declare_name("m", s);
        let f = sym.declare_fun("f", 1, s);
        let fnn = sym.app(f, &[n]).unwrap();
        let fmm = sym.app(f, &[n2]).unwrap();
        let mut st = Setup::new();
        st.add_isomorphic(&mut sym, Literal::eq(fnn, n), &|_| vec![n, n2])
            .unwrap();
        assert_eq!(st.value_of(fnn), Some(n));
        assert_eq!(st.value_of(fmm), Some(n2));
    }
}
