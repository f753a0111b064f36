//! Query evaluation.
//!
//! A subjective query is reduced inside out: every belief operator whose
//! body has free variables is expanded into a case split over the names
//! that matter plus one representative fresh name, and every closed belief
//! is decided against the grounded knowledge base by case splitting on
//! primitive terms. What remains is a function-free sentence that is
//! evaluated directly.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use thiserror::Error;

use crate::clause::Clause;
use crate::formula::{
    ground_clause, ground_setup, rewrite, Formula, FormulaError, GroundingContext, ProperPlusKB,
    UClause,
};
use crate::setup::Setup;
use crate::symbols::{Literal, Symbols, TermId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("queries must be subjective: functions may only occur inside K or M")]
    NotSubjective,
    #[error("O is only supported as the knowledge base, not inside queries")]
    NestedOnlyKnow,
    #[error("resource limit reached")]
    ResourceExhausted,
}

#[derive(Debug, Clone)]
pub struct QueryOptions {
    /// Apply the belief-distribution rewrites first.
    pub rewrite: bool,
    /// Cap every belief level.
    pub max_level: Option<u32>,
    /// Maximum number of split nodes.
    pub node_limit: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions {
            rewrite: true,
            max_level: None,
            node_limit: None,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Split branches explored.
    pub splits: u64,
    /// Closed beliefs decided (memo misses).
    pub decisions: u64,
}

/// Names `n` for which `K t = n` holds; `All` when the setup is refuted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Values {
    All,
    Set(Vec<TermId>),
}

impl Values {
    pub fn contains(&self, n: TermId) -> bool {
        match self {
            Values::All => true,
            Values::Set(v) => v.contains(&n),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Values::Set(v) if v.is_empty())
    }

    fn union(&mut self, other: Values) {
        match (&mut *self, other) {
            (Values::All, _) => {}
            (_, Values::All) => *self = Values::All,
            (Values::Set(a), Values::Set(b)) => {
                for n in b {
                    if !a.contains(&n) {
                        a.push(n);
                    }
                }
            }
        }
    }

    fn intersect(&mut self, other: Values) {
        match (&mut *self, other) {
            (_, Values::All) => {}
            (Values::All, b) => *self = b,
            (Values::Set(a), Values::Set(b)) => a.retain(|n| b.contains(n)),
        }
    }

    fn subset_of(&self, other: &Values) -> bool {
        match (self, other) {
            (_, Values::All) => true,
            (Values::All, _) => false,
            (Values::Set(a), Values::Set(b)) => a.iter().all(|n| b.contains(n)),
        }
    }
}

/// Pairs `(t, n)` with `K t = n` for a fixed set of terms; `All` when the
/// setup is refuted.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Known {
    All,
    Pairs(BTreeSet<(TermId, TermId)>),
}

impl Known {
    fn union(&mut self, other: Known) {
        match (&mut *self, other) {
            (Known::All, _) => {}
            (_, Known::All) => *self = Known::All,
            (Known::Pairs(a), Known::Pairs(b)) => a.extend(b),
        }
    }

    fn intersect(&mut self, other: Known) {
        match (&mut *self, other) {
            (_, Known::All) => {}
            (Known::All, b) => *self = b,
            (Known::Pairs(a), Known::Pairs(b)) => a.retain(|p| b.contains(p)),
        }
    }

    fn subset_of(&self, other: &Known) -> bool {
        match (self, other) {
            (_, Known::All) => true,
            (Known::All, _) => false,
            (Known::Pairs(a), Known::Pairs(b)) => a.is_subset(b),
        }
    }

    fn len(&self) -> usize {
        match self {
            Known::All => usize::MAX,
            Known::Pairs(p) => p.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Mode {
    Know,
    Maybe,
}

#[derive(Debug, Clone, Copy)]
enum Goal {
    Any,
    Name(TermId),
}

#[derive(Debug, Clone, Default)]
struct Budget {
    nodes: u64,
    limit: Option<u64>,
    deadline: Option<Instant>,
}

impl Budget {
    fn tick(&mut self) -> Result<(), SolverError> {
        self.nodes += 1;
        if self.limit.is_some_and(|l| self.nodes > l) {
            return Err(SolverError::ResourceExhausted);
        }
        if self.nodes % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(SolverError::ResourceExhausted);
        }
        Ok(())
    }
}

/// Connected components of the minimal clauses of a setup.
#[derive(Debug, Clone, Default)]
struct Components {
    clauses: Vec<Clause>,
    clause_comp: Vec<usize>,
    term_comp: HashMap<TermId, usize>,
}

impl Components {
    fn of(setup: &Setup) -> Components {
        let clauses = setup.minimal_clauses();
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
        for c in &clauses {
            let lits = c.literals();
            let Some(first) = lits.first() else { continue };
            let a = first.lhs();
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
        let mut ids: HashMap<TermId, usize> = HashMap::new();
        let mut term_comp = HashMap::new();
        let keys: Vec<TermId> = parent.keys().copied().collect();
        for t in keys {
            let r = find(&mut parent, t);
            let n = ids.len();
            let id = *ids.entry(r).or_insert(n);
            term_comp.insert(t, id);
        }
        let clause_comp = clauses
            .iter()
            .map(|c| c.literals().first().map_or(usize::MAX, |l| term_comp[&l.lhs()]))
            .collect();
        Components {
            clauses,
            clause_comp,
            term_comp,
        }
    }

    fn key(&self, terms: &BTreeSet<TermId>) -> Vec<usize> {
        let mut k: Vec<usize> = terms.iter().filter_map(|t| self.term_comp.get(t).copied()).collect();
        k.sort_unstable();
        k.dedup();
        k
    }

    fn build(&self, sym: &Symbols, key: &[usize]) -> Setup {
        let mut s = Setup::new();
        for (c, &id) in self.clauses.iter().zip(&self.clause_comp) {
            if id == usize::MAX || key.binary_search(&id).is_ok() {
                s.add(sym, c).expect("minimal clauses are ground");
            }
        }
        s
    }
}

type Scope = Option<BTreeSet<TermId>>;

/// Evaluation state shared by the split search.
struct Cx<'a> {
    sym: &'a mut Symbols,
    ctx: &'a GroundingContext,
    budget: &'a mut Budget,
    stats: &'a mut Stats,
    split_names: Vec<TermId>,
    /// Split actions taken so far: `(term, name, bulk)`.
    path: Vec<(TermId, TermId, bool)>,
    /// Results per set of split actions and remaining level. The outcome
    /// does not depend on the order in which splits were made.
    seen: HashMap<(Vec<(TermId, TermId, bool)>, u32), Values>,
    seen_known: HashMap<(Vec<(TermId, TermId, bool)>, u32), Known>,
}

impl<'a> Cx<'a> {
    fn new(sym: &'a mut Symbols, ctx: &'a GroundingContext, budget: &'a mut Budget, stats: &'a mut Stats) -> Self {
        Cx {
            sym,
            ctx,
            budget,
            stats,
            split_names: Vec::new(),
            path: Vec::new(),
            seen: HashMap::new(),
            seen_known: HashMap::new(),
        }
    }

    fn key(&self, k: u32) -> (Vec<(TermId, TermId, bool)>, u32) {
        let mut p = self.path.clone();
        p.sort_unstable();
        p.dedup();
        (p, k)
    }

    fn recall(&self, k: u32) -> Option<bool> {
        if self.path.is_empty() {
            return None;
        }
        self.seen.get(&self.key(k)).map(|v| *v == Values::All)
    }

    fn remember(&mut self, k: u32, b: bool) {
        if !self.path.is_empty() {
            let key = self.key(k);
            self.seen.insert(key, if b { Values::All } else { Values::Set(Vec::new()) });
        }
    }

    /// Names a quantifier over `x` ranges over: everything mentioned by the
    /// knowledge base, the split literals and `body`, plus one more name.
    fn candidates(&mut self, x: TermId, body: &Formula) -> Vec<TermId> {
        let sort = self.sym.sort_of(x);
        let mut set: BTreeSet<TermId> = BTreeSet::new();
        body.names(self.sym, &mut set);
        set.extend(self.ctx.kb_names().iter().copied());
        set.extend(self.split_names.iter().copied());
        let sym = &*self.sym;
        let mut out: Vec<TermId> = set.iter().copied().filter(|&n| sym.sort_of(n) == sort).collect();
        let fresh = self.sym.fresh_names(sort, 1, |n| set.contains(&n));
        out.extend(fresh);
        out
    }

    fn obj(&mut self, s: &Setup, f: &Formula) -> Result<bool, SolverError> {
        match f {
            Formula::Lit(l) => Ok(s.subsumes(self.sym, &Clause::unit(*l))),
            Formula::Or(a, b) => match f.as_clause() {
                Some(lits) => Ok(s.subsumes(self.sym, &Clause::new(lits))),
                None => Ok(self.obj(s, a)? || self.obj(s, b)?),
            },
            Formula::Not(g) => self.obj_neg(s, g),
            Formula::Exists(x, body) => {
                for n in self.candidates(*x, body) {
                    let inst = body.substitute(self.sym, *x, n);
                    if self.obj(s, &inst)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            _ => Err(SolverError::NestedOnlyKnow),
        }
    }

    /// Truth of the negation of `g`.
    fn obj_neg(&mut self, s: &Setup, g: &Formula) -> Result<bool, SolverError> {
        match g {
            Formula::Lit(l) => Ok(s.subsumes(self.sym, &Clause::unit(l.flip()))),
            Formula::Or(a, b) => Ok(self.obj_neg(s, a)? && self.obj_neg(s, b)?),
            Formula::Not(h) => self.obj(s, h),
            Formula::Exists(x, body) => {
                for n in self.candidates(*x, body) {
                    let inst = body.substitute(self.sym, *x, n);
                    if !self.obj_neg(s, &inst)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(SolverError::NestedOnlyKnow),
        }
    }

    /// Primitive terms worth splitting on.
    fn split_terms(&mut self, s: &Setup, f: &Formula, skip_known: bool) -> Vec<TermId> {
        let mut terms: BTreeSet<TermId> = s.terms().into_iter().collect();
        let mut lhs = Vec::new();
        f.as_literals(&mut lhs);
        if lhs.iter().all(|l| self.sym.is_ground_literal(*l)) {
            terms.extend(lhs.into_iter().map(|l| l.lhs()).filter(|&t| self.sym.is_primitive(t)));
        } else {
            let mut ground = BTreeSet::new();
            f.ground_terms(self.sym, self.ctx, &mut ground);
            terms.extend(ground.into_iter().filter(|&t| self.sym.is_primitive(t)));
        }
        terms
            .into_iter()
            .filter(|&t| !(skip_known && s.value_of(t).is_some()))
            .collect()
    }

    /// Right-hand sides of the ground instances of `l` whose left-hand side
    /// is `t`.
    fn rhs_instances(&self, t: TermId, l: Literal, out: &mut Vec<TermId>) {
        let rhs = l.rhs();
        if !self.sym.is_var(rhs) {
            out.push(rhs);
            return;
        }
        let sym = &*self.sym;
        let bound = sym.args(t).iter().zip(sym.args(l.lhs())).find(|(_, &p)| p == rhs);
        match bound {
            Some((&a, _)) => out.push(a),
            None => out.extend_from_slice(self.ctx.names(sym.sort_of(rhs))),
        }
    }

    /// Whether ground `t` is an instance of the possibly open term `pattern`.
    fn instance_of(&self, t: TermId, pattern: TermId) -> bool {
        if t == pattern {
            return true;
        }
        if self.sym.is_ground(pattern) || self.sym.fun_of(t) != self.sym.fun_of(pattern) {
            return false;
        }
        let sym = &*self.sym;
        sym.args(t)
            .iter()
            .zip(sym.args(pattern))
            .all(|(&a, &p)| a == p || sym.is_var(p))
    }

    /// Names to try for `t`: those it is compared with, plus one that is
    /// not mentioned anywhere.
    fn split_values(&mut self, s: &Setup, f: &Formula, t: TermId) -> Vec<TermId> {
        let mut set: BTreeSet<TermId> = BTreeSet::new();
        let mut buf = Vec::new();
        s.names_with(t, &mut buf);
        let mut lits = Vec::new();
        f.as_literals(&mut lits);
        for l in &lits {
            if self.instance_of(t, l.lhs()) {
                self.rhs_instances(t, *l, &mut buf);
            }
        }
        set.extend(buf.drain(..).filter(|n| n.is_name()));
        let sort = self.sym.sort_of(t);
        let mut mentioned: BTreeSet<TermId> = BTreeSet::new();
        f.names(self.sym, &mut mentioned);
        mentioned.extend(self.ctx.kb_names().iter().copied());
        mentioned.extend(self.split_names.iter().copied());
        self.sym.names_in(t, &mut buf);
        mentioned.extend(buf);
        let fresh = self.sym.fresh_names(sort, 1, |n| mentioned.contains(&n));
        set.extend(fresh);
        let sym = &*self.sym;
        set.into_iter().filter(|&n| sym.sort_of(n) == sort).collect()
    }

    fn know(&mut self, s: &mut Setup, k: u32, f: &Formula) -> Result<bool, SolverError> {
        if let Some(b) = self.recall(k) {
            return Ok(b);
        }
        let r = self.know_uncached(s, k, f)?;
        self.remember(k, r);
        Ok(r)
    }

    fn know_uncached(&mut self, s: &mut Setup, k: u32, f: &Formula) -> Result<bool, SolverError> {
        self.budget.tick()?;
        if s.obviously_inconsistent() || self.obj(s, f)? {
            return Ok(true);
        }
        if k == 0 {
            return Ok(false);
        }
        for t in self.split_terms(s, f, true) {
            let mut all = true;
            for n in self.split_values(s, f, t) {
                self.stats.splits += 1;
                let cp = s.mark();
                s.add_literal(self.sym, Literal::eq(t, n)).expect("split literals are ground");
                self.split_names.push(n);
                self.path.push((t, n, false));
                let r = self.know(s, k - 1, f);
                self.path.pop();
                self.split_names.pop();
                s.undo(cp).expect("balanced");
                if !r? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn maybe(&mut self, s: &mut Setup, k: u32, f: &Formula) -> Result<bool, SolverError> {
        if let Some(b) = self.recall(k) {
            return Ok(b);
        }
        let r = self.maybe_uncached(s, k, f)?;
        self.remember(k, r);
        Ok(r)
    }

    fn maybe_uncached(&mut self, s: &mut Setup, k: u32, f: &Formula) -> Result<bool, SolverError> {
        self.budget.tick()?;
        if s.obviously_inconsistent() {
            return Ok(false);
        }
        let ctx = self.ctx;
        if !s.potentially_inconsistent_over(self.sym, |sort| ctx.names(sort)) && self.obj(s, f)? {
            return Ok(true);
        }
        if k == 0 {
            return Ok(false);
        }
        for t in self.split_terms(s, f, false) {
            let known = s.value_of(t).is_some();
            let mut values = self.split_values(s, f, t);
            // A name outside the grounding would miss the instances of
            // quantified clauses and could look consistent when it is not.
            let pool = self.ctx.names(self.sym.sort_of(t));
            values.retain(|n| pool.contains(n));
            for n in values {
                for bulk in [false, true] {
                    if !bulk && known {
                        continue;
                    }
                    self.stats.splits += 1;
                    let cp = s.mark();
                    let l = Literal::eq(t, n);
                    let before = self.split_names.len();
                    if bulk {
                        let mut pool = Vec::new();
                        self.sym.names_in(t, &mut pool);
                        pool.push(n);
                        let ctx = self.ctx;
                        let sorts: Vec<_> = pool.iter().map(|&m| (m, self.sym.sort_of(m))).collect();
                        let added = s
                            .add_isomorphic(self.sym, l, &|sort| {
                                let mut v: Vec<TermId> = ctx.names(sort).to_vec();
                                for &(m, ms) in &sorts {
                                    if ms == sort && !v.contains(&m) {
                                        v.push(m);
                                    }
                                }
                                v
                            })
                            .expect("split literals are ground");
                        if added <= 1 {
                            // nothing beyond the single assignment
                            s.undo(cp).expect("balanced");
                            continue;
                        }
                        for (m, ms) in sorts {
                            self.split_names.push(m);
                            self.split_names.extend_from_slice(ctx.names(ms));
                        }
                    } else {
                        s.add_literal(self.sym, l).expect("split literals are ground");
                        self.split_names.push(n);
                    }
                    self.path.push((t, n, bulk));
                    let r = if s.obviously_inconsistent() {
                        Ok(false)
                    } else {
                        self.maybe(s, k - 1, f)
                    };
                    self.path.pop();
                    self.split_names.truncate(before);
                    s.undo(cp).expect("balanced");
                    if r? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }

    /// The names `n` with `K_k t = n`, stopping early once `goal` is met.
    fn values(&mut self, s: &mut Setup, k: u32, t: TermId, goal: Goal) -> Result<Values, SolverError> {
        let key = self.key(k);
        if let Some(v) = self.seen.get(&key) {
            return Ok(v.clone());
        }
        let r = self.values_uncached(s, k, t, goal)?;
        self.seen.insert(key, r.clone());
        Ok(r)
    }

    fn values_uncached(
        &mut self,
        s: &mut Setup,
        k: u32,
        t: TermId,
        goal: Goal,
    ) -> Result<Values, SolverError> {
        self.budget.tick()?;
        if s.obviously_inconsistent() {
            return Ok(Values::All);
        }
        let mut acc = Values::Set(s.value_of(t).into_iter().collect());
        let done = |acc: &Values| match goal {
            Goal::Any => !acc.is_empty(),
            Goal::Name(n) => acc.contains(n),
        };
        if k == 0 || done(&acc) {
            return Ok(acc);
        }
        let target = Formula::Lit(match goal {
            Goal::Name(n) => Literal::eq(t, n),
            Goal::Any => Literal::eq(t, t),
        });
        for u in self.split_terms(s, &target, true) {
            let mut inter = Values::All;
            for n in self.split_values(s, &target, u) {
                self.stats.splits += 1;
                let cp = s.mark();
                s.add_literal(self.sym, Literal::eq(u, n)).expect("split literals are ground");
                self.split_names.push(n);
                self.path.push((u, n, false));
                let r = self.values(s, k - 1, t, goal);
                self.path.pop();
                self.split_names.pop();
                s.undo(cp).expect("balanced");
                inter.intersect(r?);
                if inter.subset_of(&acc) {
                    break;
                }
            }
            acc.union(inter);
            if done(&acc) || acc == Values::All {
                break;
            }
        }
        Ok(acc)
    }

    /// Everything `values` would report, for all of `interest` at once.
    /// With `first`, returns as soon as something beyond the units is found.
    fn sweep(&mut self, s: &mut Setup, k: u32, interest: &[TermId], first: bool) -> Result<Known, SolverError> {
        let key = self.key(k);
        if !first {
            if let Some(v) = self.seen_known.get(&key) {
                return Ok(v.clone());
            }
        }
        self.budget.tick()?;
        let r = if s.obviously_inconsistent() {
            Known::All
        } else {
            let mut acc = Known::Pairs(
                interest
                    .iter()
                    .filter_map(|&t| s.value_of(t).map(|v| (t, v)))
                    .collect(),
            );
            let units = acc.len();
            if k > 0 {
                let none = Formula::Lit(Literal::eq(self.sym.top_var(), self.sym.top_var()));
                for u in self.split_terms(s, &none, true) {
                    let mut inter = Known::All;
                    for n in self.split_values(s, &none, u) {
                        self.stats.splits += 1;
                        let cp = s.mark();
                        s.add_literal(self.sym, Literal::eq(u, n)).expect("split literals are ground");
                        self.split_names.push(n);
                        self.path.push((u, n, false));
                        let r = self.sweep(s, k - 1, interest, false);
                        self.path.pop();
                        self.split_names.pop();
                        s.undo(cp).expect("balanced");
                        inter.intersect(r?);
                        if inter.subset_of(&acc) {
                            break;
                        }
                    }
                    acc.union(inter);
                    if acc == Known::All || (first && acc.len() > units) {
                        break;
                    }
                }
            }
            acc
        };
        if !first {
            self.seen_known.insert(key, r.clone());
        }
        Ok(r)
    }
}

/// A grounded knowledge base ready to answer queries.
#[derive(Debug, Clone)]
pub struct Reasoner {
    kb: ProperPlusKB,
    ctx: GroundingContext,
    base: Setup,
    components: Option<Components>,
    restricted: HashMap<Vec<usize>, Setup>,
    memo: HashMap<(Mode, u32, Formula, Option<Vec<usize>>), bool>,
    budget: Budget,
    pub stats: Stats,
}

impl Reasoner {
    pub fn new(sym: &mut Symbols, kb: ProperPlusKB, ctx: GroundingContext) -> Reasoner {
        let base = ground_setup(sym, &kb, &ctx);
        Reasoner {
            kb,
            ctx,
            base,
            components: None,
            restricted: HashMap::new(),
            memo: HashMap::new(),
            budget: Budget::default(),
            stats: Stats::default(),
        }
    }

    /// Grounds `kb` with a universe large enough for `sigma`.
    pub fn for_query(sym: &mut Symbols, kb: &ProperPlusKB, sigma: &Formula) -> Reasoner {
        let ctx = GroundingContext::new(sym, kb, &[sigma], sigma.max_level() as usize);
        Reasoner::new(sym, kb.clone(), ctx)
    }

    pub fn kb(&self) -> &ProperPlusKB {
        &self.kb
    }

    pub fn context(&self) -> &GroundingContext {
        &self.ctx
    }

    /// The setup of the knowledge base (what `O kb` fixes).
    pub fn setup(&self) -> &Setup {
        &self.base
    }

    pub fn set_limits(&mut self, node_limit: Option<u64>, deadline: Option<Instant>) {
        self.budget = Budget {
            nodes: 0,
            limit: node_limit,
            deadline,
        };
    }

    /// Adds a clause to the knowledge base and its setup.
    pub fn add_clause(&mut self, sym: &mut Symbols, c: UClause) {
        self.ctx.note_clause(sym, &c.lits);
        let mut buf = Vec::new();
        ground_clause(sym, &c, &self.ctx, &mut buf);
        for g in &buf {
            self.base.add(sym, g).expect("grounded clauses are ground");
        }
        self.kb.push(c);
        self.components = None;
        self.restricted.clear();
        self.memo.clear();
    }

    fn scope_key(&mut self, terms: &BTreeSet<TermId>) -> Vec<usize> {
        let comps = self.components.get_or_insert_with(|| Components::of(&self.base));
        comps.key(terms)
    }

    /// The setup restricted to the clauses connected to `terms`.
    pub fn guarantee_setup(&mut self, sym: &Symbols, terms: &BTreeSet<TermId>) -> &Setup {
        let key = self.scope_key(terms);
        let comps = self.components.as_ref().unwrap();
        self.restricted
            .entry(key.clone())
            .or_insert_with(|| comps.build(sym, &key))
    }

    /// Decides a closed belief against the (possibly restricted) setup.
    fn decide(
        &mut self,
        sym: &mut Symbols,
        scope: &Scope,
        mode: Mode,
        k: u32,
        f: &Formula,
    ) -> Result<bool, SolverError> {
        let key = scope.as_ref().map(|t| self.scope_key(t));
        let memo_key = (mode, k, f.clone(), key.clone());
        if let Some(&b) = self.memo.get(&memo_key) {
            return Ok(b);
        }
        self.stats.decisions += 1;
        if let Some(key) = &key {
            if !self.restricted.contains_key(key) {
                let s = self.components.as_ref().unwrap().build(sym, key);
                self.restricted.insert(key.clone(), s);
            }
        }
        let Reasoner {
            ctx,
            base,
            restricted,
            budget,
            stats,
            ..
        } = self;
        let setup = match &key {
            Some(key) => restricted.get_mut(key).unwrap(),
            None => base,
        };
        let mut cx = Cx::new(sym, ctx, budget, stats);
        let r = match (mode, f) {
            (Mode::Know, Formula::Lit(l))
                if l.pos() && l.rhs().is_name() && cx.sym.is_primitive(l.lhs()) =>
            {
                Ok(cx.values(setup, k, l.lhs(), Goal::Name(l.rhs()))?.contains(l.rhs()))
            }
            (Mode::Know, _) => cx.know(setup, k, f),
            (Mode::Maybe, _) => cx.maybe(setup, k, f),
        }?;
        self.memo.insert(memo_key, r);
        Ok(r)
    }

    /// Expands free variables of a belief into a case split over names.
    fn res(
        &mut self,
        sym: &mut Symbols,
        scope: &Scope,
        mode: Mode,
        k: u32,
        f: &Formula,
    ) -> Result<Formula, SolverError> {
        let free = f.free_vars(sym);
        let Some(&x) = free.first() else {
            let b = self.decide(sym, scope, mode, k, f)?;
            return Ok(if b { Formula::top(sym) } else { Formula::bottom(sym) });
        };
        let sort = sym.sort_of(x);
        let mut known: BTreeSet<TermId> = BTreeSet::new();
        f.names(sym, &mut known);
        known.extend(self.ctx.kb_names().iter().copied());
        let names: Vec<TermId> = known.iter().copied().filter(|&n| sym.sort_of(n) == sort).collect();
        let hat = sym.fresh_names(sort, 1, |n| known.contains(&n))[0];
        let mut parts = Vec::with_capacity(names.len() + 1);
        for &n in &names {
            let inst = f.substitute(sym, x, n);
            let r = self.res(sym, scope, mode, k, &inst)?;
            parts.push(Formula::and(Formula::lit(Literal::eq(x, n)), r));
        }
        let inst = f.substitute(sym, x, hat);
        let r = self.res(sym, scope, mode, k, &inst)?.abstract_name(sym, hat, x);
        let mut rest: Vec<Formula> = names.iter().map(|&n| Formula::lit(Literal::neq(x, n))).collect();
        rest.push(r);
        parts.push(Formula::conjunction(sym, rest));
        Ok(Formula::disjunction(sym, parts))
    }

    /// Replaces beliefs by their truth values, innermost first.
    fn red(&mut self, sym: &mut Symbols, scope: &Scope, f: &Formula) -> Result<Formula, SolverError> {
        Ok(match f {
            Formula::Lit(_) => f.clone(),
            Formula::Or(a, b) => Formula::or(self.red(sym, scope, a)?, self.red(sym, scope, b)?),
            Formula::Not(a) => Formula::not(self.red(sym, scope, a)?),
            Formula::Exists(x, a) => Formula::exists(*x, self.red(sym, scope, a)?),
            Formula::Know(k, a) => {
                let inner = self.red(sym, scope, a)?;
                self.res(sym, scope, Mode::Know, *k, &inner)?
            }
            Formula::Maybe(k, a) => {
                let inner = self.red(sym, scope, a)?;
                self.res(sym, scope, Mode::Maybe, *k, &inner)?
            }
            Formula::Guarantee(a) => {
                let mut terms = BTreeSet::new();
                a.ground_terms(sym, &self.ctx, &mut terms);
                let narrowed = match scope {
                    Some(outer) => terms.intersection(outer).copied().collect(),
                    None => terms,
                };
                self.red(sym, &Some(narrowed), a)?
            }
            Formula::OnlyKnow(_) => return Err(SolverError::NestedOnlyKnow),
        })
    }

    /// Evaluates a subjective sentence.
    pub fn evaluate(&mut self, sym: &mut Symbols, sigma: &Formula) -> Result<bool, SolverError> {
        if !sigma.is_subjective(sym) {
            return Err(SolverError::NotSubjective);
        }
        self.budget.nodes = 0;
        let reduced = self.red(sym, &None, sigma)?;
        let mut budget = Budget::default();
        let mut cx = Cx::new(sym, &self.ctx, &mut budget, &mut self.stats);
        cx.obj(&Setup::new(), &reduced)
    }

    /// `K_level l` (wrapped in `G` when `guarantee` is set), for a ground
    /// literal.
    pub fn knows(
        &mut self,
        sym: &mut Symbols,
        l: Literal,
        level: u32,
        guarantee: bool,
    ) -> Result<bool, SolverError> {
        self.budget.nodes = 0;
        let scope = guarantee.then(|| BTreeSet::from([l.lhs()]));
        self.decide(sym, &scope, Mode::Know, level, &Formula::lit(l))
    }

    /// Names `n` with `K_level t = n`; stops at the first one found.
    pub fn known_value(
        &mut self,
        sym: &mut Symbols,
        t: TermId,
        level: u32,
        guarantee: bool,
    ) -> Result<Values, SolverError> {
        self.budget.nodes = 0;
        let scope: Scope = guarantee.then(|| BTreeSet::from([t]));
        let key = scope.as_ref().map(|s| self.scope_key(s));
        if let Some(key) = &key {
            if !self.restricted.contains_key(key) {
                let s = self.components.as_ref().unwrap().build(sym, key);
                self.restricted.insert(key.clone(), s);
            }
        }
        let Reasoner {
            ctx,
            base,
            restricted,
            budget,
            stats,
            ..
        } = self;
        let setup = match &key {
            Some(key) => restricted.get_mut(key).unwrap(),
            None => base,
        };
        let mut cx = Cx::new(sym, ctx, budget, stats);
        cx.values(setup, level, t, Goal::Any)
    }
}

impl Reasoner {
    /// Primitive terms a split at the top level may pick for `psi`.
    pub fn split_terms(&mut self, sym: &mut Symbols, psi: &Formula) -> Vec<TermId> {
        let mut cx = Cx::new(sym, &self.ctx, &mut self.budget, &mut self.stats);
        cx.split_terms(&self.base, psi, false)
    }

    /// Names a split on `t` tries for `psi`, including one fresh name.
    pub fn split_names(&mut self, sym: &mut Symbols, t: TermId, psi: &Formula) -> Vec<TermId> {
        let mut cx = Cx::new(sym, &self.ctx, &mut self.budget, &mut self.stats);
        cx.split_values(&self.base, psi, t)
    }

    /// Objective equivalent of a single `K` or `M` whose argument is
    /// objective but may have free variables.
    pub fn resolve(&mut self, sym: &mut Symbols, belief: &Formula) -> Result<Formula, SolverError> {
        self.budget.nodes = 0;
        match belief {
            Formula::Know(k, f) if f.is_objective() => self.res(sym, &None, Mode::Know, *k, f),
            Formula::Maybe(k, f) if f.is_objective() => self.res(sym, &None, Mode::Maybe, *k, f),
            _ => Err(SolverError::NotSubjective),
        }
    }

    /// Objective equivalent of a formula with nested beliefs.
    pub fn reduce(&mut self, sym: &mut Symbols, sigma: &Formula) -> Result<Formula, SolverError> {
        self.budget.nodes = 0;
        self.red(sym, &None, sigma)
    }

    /// Pairs `(t, n)` with `t` from `terms` and `K_level t = n`. With
    /// `first`, stops once a pair not already fixed by a unit is found.
    /// `None` means the knowledge base is refuted at this level.
    pub fn known_values(
        &mut self,
        sym: &mut Symbols,
        level: u32,
        terms: &[TermId],
        first: bool,
    ) -> Result<Option<Vec<(TermId, TermId)>>, SolverError> {
        self.budget.nodes = 0;
        let mut cx = Cx::new(sym, &self.ctx, &mut self.budget, &mut self.stats);
        Ok(match cx.sweep(&mut self.base, level, terms, first)? {
            Known::All => None,
            Known::Pairs(p) => Some(p.into_iter().collect()),
        })
    }
}

/// Prepares a query according to `opts` (level cap, rewriting).
pub fn prepare(sigma: &Formula, opts: &QueryOptions) -> Formula {
    let mut f = match opts.max_level {
        Some(k) => sigma.clamp_levels(k),
        None => sigma.clone(),
    };
    if opts.rewrite {
        f = rewrite(&f);
    }
    f
}

/// Decides `O kb => sigma`.
pub fn query(
    sym: &mut Symbols,
    kb: &ProperPlusKB,
    sigma: &Formula,
    opts: &QueryOptions,
) -> Result<bool, SolverError> {
    let f = prepare(sigma, opts);
    let mut r = Reasoner::for_query(sym, kb, &f);
    r.set_limits(opts.node_limit, opts.deadline);
    r.evaluate(sym, &f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_set_algebra() {
        let a = TermId::from_parts(0, true).unwrap();
        let b = TermId::from_parts(1, true).unwrap();
        let mut v = Values::Set(vec![a]);
        v.union(Values::Set(vec![b]));
        assert!(v.contains(a) && v.contains(b));
        v.intersect(Values::Set(vec![b]));
        assert_eq!(v, Values::Set(vec![b]));
        v.union(Values::All);
        assert_eq!(v, Values::All);
    }
}
