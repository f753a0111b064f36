//! Formulas, proper+ knowledge bases, and grounding over a finite universe.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::clause::Clause;
use crate::setup::Setup;
use crate::symbols::{FunId, Literal, SortId, SymbolError, Symbols, TermId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("knowledge base is not proper+: {0}")]
    NotProperPlus(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

/// Formulas with `or`, `not`, `exists` and the belief operators as
/// primitives. Conjunction, universals and implication are spelled through
/// the helper constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Lit(Literal),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Exists(TermId, Box<Formula>),
    Know(u32, Box<Formula>),
    Maybe(u32, Box<Formula>),
    OnlyKnow(Box<Formula>),
    Guarantee(Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn lit(l: Literal) -> Formula {
        Lit(l)
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn exists(x: TermId, a: Formula) -> Formula {
        Exists(x, Box::new(a))
    }

    pub fn forall(x: TermId, a: Formula) -> Formula {
        Formula::not(Formula::exists(x, Formula::not(a)))
    }

    pub fn know(k: u32, a: Formula) -> Formula {
        Know(k, Box::new(a))
    }

    pub fn maybe(k: u32, a: Formula) -> Formula {
        Maybe(k, Box::new(a))
    }

    pub fn guarantee(a: Formula) -> Formula {
        Guarantee(Box::new(a))
    }

    pub fn only_know(a: Formula) -> Formula {
        OnlyKnow(Box::new(a))
    }

    /// `exists v (v == v)`.
    pub fn top(sym: &Symbols) -> Formula {
        let v = sym.top_var();
        Formula::exists(v, Lit(Literal::eq(v, v)))
    }

    pub fn bottom(sym: &Symbols) -> Formula {
        Formula::not(Formula::top(sym))
    }

    /// Folds a non-empty list with `or`; an empty list gives falsity.
    pub fn disjunction(sym: &Symbols, parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Formula::bottom(sym),
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn conjunction(sym: &Symbols, parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => Formula::top(sym),
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// The literals of a disjunction of literals, if this is one.
    pub fn as_clause(&self) -> Option<Vec<Literal>> {
        fn go(f: &Formula, out: &mut Vec<Literal>) -> bool {
            match f {
                Lit(l) => {
                    out.push(*l);
                    true
                }
                Not(a) => match **a {
                    Lit(l) if l.pos() => {
                        out.push(l.flip());
                        true
                    }
                    _ => false,
                },
                Or(a, b) => go(a, out) && go(b, out),
                _ => false,
            }
        }
        let mut out = Vec::new();
        go(self, &mut out).then_some(out)
    }

    fn visit_literals(&self, f: &mut impl FnMut(Literal)) {
        match self {
            Lit(l) => f(*l),
            Or(a, b) => {
                a.visit_literals(f);
                b.visit_literals(f);
            }
            Not(a) | Exists(_, a) | Know(_, a) | Maybe(_, a) | OnlyKnow(a) | Guarantee(a) => {
                a.visit_literals(f)
            }
        }
    }

    /// Every literal occurrence, in order.
    pub fn as_literals(&self, out: &mut Vec<Literal>) {
        self.visit_literals(&mut |l| out.push(l));
    }

    /// Every name mentioned anywhere.
    pub fn names(&self, sym: &Symbols, out: &mut BTreeSet<TermId>) {
        let mut buf = Vec::new();
        self.visit_literals(&mut |l| {
            sym.names_in(l.lhs(), &mut buf);
            sym.names_in(l.rhs(), &mut buf);
        });
        out.extend(buf);
    }

    /// Free variables, sorted.
    pub fn free_vars(&self, sym: &Symbols) -> Vec<TermId> {
        let mut out = BTreeSet::new();
        self.collect_free(sym, &mut Vec::new(), &mut out);
        out.into_iter().collect()
    }

    fn collect_free(&self, sym: &Symbols, bound: &mut Vec<TermId>, out: &mut BTreeSet<TermId>) {
        match self {
            Lit(l) => {
                let mut v = Vec::new();
                sym.vars_in(l.lhs(), &mut v);
                sym.vars_in(l.rhs(), &mut v);
                out.extend(v.into_iter().filter(|x| !bound.contains(x)));
            }
            Or(a, b) => {
                a.collect_free(sym, bound, out);
                b.collect_free(sym, bound, out);
            }
            Exists(x, a) => {
                bound.push(*x);
                a.collect_free(sym, bound, out);
                bound.pop();
            }
            Not(a) | Know(_, a) | Maybe(_, a) | OnlyKnow(a) | Guarantee(a) => {
                a.collect_free(sym, bound, out)
            }
        }
    }

    /// For each sort, the largest number of free variables of that sort in
    /// any subformula.
    pub fn vars_per_sort(&self, sym: &Symbols) -> HashMap<SortId, usize> {
        fn go(f: &Formula, sym: &Symbols, max: &mut HashMap<SortId, usize>) -> BTreeSet<TermId> {
            let free: BTreeSet<TermId> = match f {
                Lit(l) => {
                    let mut v = Vec::new();
                    sym.vars_in(l.lhs(), &mut v);
                    sym.vars_in(l.rhs(), &mut v);
                    v.into_iter().collect()
                }
                Or(a, b) => {
                    let mut s = go(a, sym, max);
                    s.extend(go(b, sym, max));
                    s
                }
                Exists(x, a) => {
                    let mut s = go(a, sym, max);
                    s.remove(x);
                    s
                }
                Not(a) | Know(_, a) | Maybe(_, a) | OnlyKnow(a) | Guarantee(a) => go(a, sym, max),
            };
            let mut counts: HashMap<SortId, usize> = HashMap::new();
            for &v in &free {
                *counts.entry(sym.sort_of(v)).or_default() += 1;
            }
            for (s, c) in counts {
                let e = max.entry(s).or_default();
                *e = (*e).max(c);
            }
            free
        }
        let mut max = HashMap::new();
        go(self, sym, &mut max);
        max
    }

    /// Replaces free occurrences of `x` by `t` (a name or variable).
    pub fn substitute(&self, sym: &mut Symbols, x: TermId, t: TermId) -> Formula {
        match self {
            Lit(l) => Lit(sym.replace_in_literal(*l, x, t)),
            Or(a, b) => Formula::or(a.substitute(sym, x, t), b.substitute(sym, x, t)),
            Not(a) => Formula::not(a.substitute(sym, x, t)),
            Exists(y, _) if *y == x => self.clone(),
            Exists(y, a) => Formula::exists(*y, a.substitute(sym, x, t)),
            Know(k, a) => Formula::know(*k, a.substitute(sym, x, t)),
            Maybe(k, a) => Formula::maybe(*k, a.substitute(sym, x, t)),
            OnlyKnow(a) => Formula::only_know(a.substitute(sym, x, t)),
            Guarantee(a) => Formula::guarantee(a.substitute(sym, x, t)),
        }
    }

    /// Replaces every occurrence of the name `n` by the variable `x`.
    pub fn abstract_name(&self, sym: &mut Symbols, n: TermId, x: TermId) -> Formula {
        match self {
            Lit(l) => Lit(sym.replace_in_literal(*l, n, x)),
            Or(a, b) => Formula::or(a.abstract_name(sym, n, x), b.abstract_name(sym, n, x)),
            Not(a) => Formula::not(a.abstract_name(sym, n, x)),
            Exists(y, a) => Formula::exists(*y, a.abstract_name(sym, n, x)),
            Know(k, a) => Formula::know(*k, a.abstract_name(sym, n, x)),
            Maybe(k, a) => Formula::maybe(*k, a.abstract_name(sym, n, x)),
            OnlyKnow(a) => Formula::only_know(a.abstract_name(sym, n, x)),
            Guarantee(a) => Formula::guarantee(a.abstract_name(sym, n, x)),
        }
    }

    /// No belief operators.
    pub fn is_objective(&self) -> bool {
        match self {
            Lit(_) => true,
            Or(a, b) => a.is_objective() && b.is_objective(),
            Not(a) | Exists(_, a) => a.is_objective(),
            _ => false,
        }
    }

    /// No function symbol outside a belief operator.
    pub fn is_subjective(&self, sym: &Symbols) -> bool {
        match self {
            Lit(l) => sym.fun_of(l.lhs()).is_none(),
            Or(a, b) => a.is_subjective(sym) && b.is_subjective(sym),
            Not(a) | Exists(_, a) | Guarantee(a) => a.is_subjective(sym),
            Know(..) | Maybe(..) | OnlyKnow(_) => true,
        }
    }

    pub fn max_level(&self) -> u32 {
        match self {
            Lit(_) => 0,
            Or(a, b) => a.max_level().max(b.max_level()),
            Not(a) | Exists(_, a) | OnlyKnow(a) | Guarantee(a) => a.max_level(),
            Know(k, a) | Maybe(k, a) => (*k).max(a.max_level()),
        }
    }

    /// Caps every belief level at `k`.
    pub fn clamp_levels(&self, cap: u32) -> Formula {
        match self {
            Lit(_) => self.clone(),
            Or(a, b) => Formula::or(a.clamp_levels(cap), b.clamp_levels(cap)),
            Not(a) => Formula::not(a.clamp_levels(cap)),
            Exists(x, a) => Formula::exists(*x, a.clamp_levels(cap)),
            Know(k, a) => Formula::know((*k).min(cap), a.clamp_levels(cap)),
            Maybe(k, a) => Formula::maybe((*k).min(cap), a.clamp_levels(cap)),
            OnlyKnow(a) => Formula::only_know(a.clamp_levels(cap)),
            Guarantee(a) => Formula::guarantee(a.clamp_levels(cap)),
        }
    }

    /// Primitive terms of the grounding over `universe`.
    pub fn ground_terms(
        &self,
        sym: &mut Symbols,
        universe: &GroundingContext,
        out: &mut BTreeSet<TermId>,
    ) {
        let mut lhs = Vec::new();
        self.visit_literals(&mut |l| lhs.push(l.lhs()));
        for t in lhs {
            let Some(f) = sym.fun_of(t) else { continue };
            let args = sym.args(t).to_vec();
            let pools: Vec<Vec<TermId>> = args
                .iter()
                .map(|&a| {
                    if a.is_name() {
                        vec![a]
                    } else {
                        universe.names(sym.sort_of(a)).to_vec()
                    }
                })
                .collect();
            for combo in product(&pools) {
                out.insert(sym.app(f, &combo).expect("instantiation keeps arity"));
            }
        }
    }
}

/// Cartesian product of name pools.
pub(crate) fn product(pools: &[Vec<TermId>]) -> Vec<Vec<TermId>> {
    let mut out = vec![Vec::new()];
    for p in pools {
        let mut next = Vec::with_capacity(out.len() * p.len());
        for prefix in &out {
            for &n in p {
                let mut v = prefix.clone();
                v.push(n);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Applies the belief-distribution rewrites bottom-up:
/// universal over `K` moves inside, conjunctions of same-level `K` merge,
/// and dually for `M` with existentials and disjunctions.
pub fn rewrite(f: &Formula) -> Formula {
    let g = match f {
        Lit(_) => return f.clone(),
        Or(a, b) => Formula::or(rewrite(a), rewrite(b)),
        Not(a) => Formula::not(rewrite(a)),
        Exists(x, a) => Formula::exists(*x, rewrite(a)),
        Know(k, a) => Formula::know(*k, rewrite(a)),
        Maybe(k, a) => Formula::maybe(*k, rewrite(a)),
        OnlyKnow(a) => Formula::only_know(rewrite(a)),
        Guarantee(a) => Formula::guarantee(rewrite(a)),
    };
    match g {
        Not(inner) => match *inner {
            Exists(x, body) => match *body {
                Not(k) => match *k {
                    Know(lvl, a) => Formula::know(lvl, Formula::forall(x, *a)),
                    other => Formula::forall(x, other),
                },
                other => Formula::not(Formula::exists(x, other)),
            },
            Or(l, r) => match (*l, *r) {
                (Not(a), Not(b)) => match (*a, *b) {
                    (Know(i, a), Know(j, b)) if i == j => Formula::know(i, Formula::and(*a, *b)),
                    (a, b) => Formula::and(a, b),
                },
                (l, r) => Formula::not(Formula::or(l, r)),
            },
            other => Formula::not(other),
        },
        Exists(x, body) => match *body {
            Maybe(k, a) => Formula::maybe(k, Formula::exists(x, *a)),
            other => Formula::exists(x, other),
        },
        Or(a, b) => match (*a, *b) {
            (Maybe(i, a), Maybe(j, b)) if i == j => Formula::maybe(i, Formula::or(*a, *b)),
            (a, b) => Formula::or(a, b),
        },
        other => other,
    }
}

/// A term possibly nesting function applications, as written by users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Atom(TermId),
    App(FunId, Vec<Expr>),
}

/// A flattened literal: `core` holds once every `defs` equation holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flat {
    pub vars: Vec<TermId>,
    pub defs: Vec<Literal>,
    pub core: Literal,
}

impl Flat {
    /// `exists vars (defs && core)`.
    pub fn existential(&self, sym: &Symbols) -> Formula {
        let mut parts: Vec<Formula> = self.defs.iter().map(|&d| Lit(d)).collect();
        parts.push(Lit(self.core));
        let mut f = Formula::conjunction(sym, parts);
        for &v in self.vars.iter().rev() {
            f = Formula::exists(v, f);
        }
        f
    }
}

/// Flattens `lhs (=|!=) rhs`, introducing a fresh variable for each nested
/// application and for a function on the right-hand side.
pub fn flatten_literal(
    sym: &mut Symbols,
    lhs: &Expr,
    rhs: &Expr,
    pos: bool,
) -> Result<Flat, FormulaError> {
    let (lhs, rhs) = match (lhs, rhs) {
        (Expr::Atom(_), Expr::App(..)) => (rhs, lhs),
        _ => (lhs, rhs),
    };
    let mut vars = Vec::new();
    let mut defs = Vec::new();
    let r = match rhs {
        Expr::Atom(t) => *t,
        Expr::App(f, _) => {
            let v = fresh_var(sym, sym.fun(*f).sort);
            let t = flat_term(sym, rhs, &mut vars, &mut defs)?;
            vars.push(v);
            defs.push(Literal::eq(t, v));
            v
        }
    };
    let l = flat_term(sym, lhs, &mut vars, &mut defs)?;
    Ok(Flat {
        vars,
        defs,
        core: sym.literal(l, r, pos)?,
    })
}

fn fresh_var(sym: &mut Symbols, sort: SortId) -> TermId {
    let label = format!("_v{}", sym.pool_size());
    sym.new_var(&label, sort)
}

fn flat_term(
    sym: &mut Symbols,
    e: &Expr,
    vars: &mut Vec<TermId>,
    defs: &mut Vec<Literal>,
) -> Result<TermId, FormulaError> {
    match e {
        Expr::Atom(t) => Ok(*t),
        Expr::App(f, args) => {
            let mut flat = Vec::with_capacity(args.len());
            for a in args {
                match a {
                    Expr::Atom(t) => flat.push(*t),
                    Expr::App(g, _) => {
                        let inner = flat_term(sym, a, vars, defs)?;
                        let v = fresh_var(sym, sym.fun(*g).sort);
                        vars.push(v);
                        defs.push(Literal::eq(inner, v));
                        flat.push(v);
                    }
                }
            }
            Ok(sym.app(*f, &flat)?)
        }
    }
}

/// A universally closed clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UClause {
    pub vars: Vec<TermId>,
    pub lits: Vec<Literal>,
}

impl UClause {
    pub fn ground(lits: Vec<Literal>) -> UClause {
        UClause {
            vars: Vec::new(),
            lits,
        }
    }

    pub fn to_formula(&self, sym: &Symbols) -> Formula {
        let mut f = Formula::disjunction(sym, self.lits.iter().map(|&l| Lit(l)).collect());
        if self.lits.is_empty() {
            f = Formula::bottom(sym);
        }
        for &v in self.vars.iter().rev() {
            f = Formula::forall(v, f);
        }
        f
    }
}

/// A conjunction of universally closed clauses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProperPlusKB {
    pub clauses: Vec<UClause>,
}

impl ProperPlusKB {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: UClause) {
        self.clauses.push(c);
    }

    /// Checks the shape and splits a formula into closed clauses. Free
    /// variables are read as universally quantified.
    pub fn from_formula(sym: &Symbols, f: &Formula) -> Result<ProperPlusKB, FormulaError> {
        let mut kb = ProperPlusKB::new();
        let mut parts = Vec::new();
        conjuncts(f, &mut parts);
        for p in parts {
            let mut vars = Vec::new();
            let mut body = p;
            while let Not(inner) = body {
                match &**inner {
                    Exists(x, b) => match &**b {
                        Not(c) => {
                            vars.push(*x);
                            body = c;
                        }
                        _ => return Err(existential_error()),
                    },
                    _ => break,
                }
            }
            let Some(lits) = body.as_clause() else {
                return Err(match body {
                    Exists(..) => existential_error(),
                    Know(..) | Maybe(..) | OnlyKnow(_) | Guarantee(_) => {
                        FormulaError::NotProperPlus("belief operators are not allowed".into())
                    }
                    _ => FormulaError::NotProperPlus(
                        "each conjunct must be a universally closed disjunction of literals".into(),
                    ),
                });
            };
            for v in body.free_vars(sym) {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            kb.push(UClause { vars, lits });
        }
        Ok(kb)
    }

    pub fn to_formula(&self, sym: &Symbols) -> Formula {
        Formula::conjunction(sym, self.clauses.iter().map(|c| c.to_formula(sym)).collect())
    }

    pub fn names(&self, sym: &Symbols, out: &mut BTreeSet<TermId>) {
        let mut buf = Vec::new();
        for c in &self.clauses {
            for l in &c.lits {
                sym.names_in(l.lhs(), &mut buf);
                sym.names_in(l.rhs(), &mut buf);
            }
        }
        out.extend(buf);
    }

    pub fn vars_per_sort(&self, sym: &Symbols) -> HashMap<SortId, usize> {
        let mut max: HashMap<SortId, usize> = HashMap::new();
        for c in &self.clauses {
            let mut counts: HashMap<SortId, usize> = HashMap::new();
            for &v in &c.vars {
                *counts.entry(sym.sort_of(v)).or_default() += 1;
            }
            for (s, n) in counts {
                let e = max.entry(s).or_default();
                *e = (*e).max(n);
            }
        }
        max
    }

    fn sorts(&self, sym: &Symbols, out: &mut BTreeSet<SortId>) {
        for c in &self.clauses {
            for l in &c.lits {
                out.insert(sym.sort_of(l.lhs()));
                out.insert(sym.sort_of(l.rhs()));
                for &a in sym.args(l.lhs()) {
                    out.insert(sym.sort_of(a));
                }
            }
        }
    }
}

fn existential_error() -> FormulaError {
    FormulaError::NotProperPlus(
        "existential quantifiers are not allowed; introduce a Skolem function instead \
         (replace `exists x P(x)` by `P(c)` for a new function symbol `c`)"
            .into(),
    )
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    if let Not(inner) = f {
        if let Or(a, b) = &**inner {
            if let (Not(x), Not(y)) = (&**a, &**b) {
                conjuncts(x, out);
                conjuncts(y, out);
                return;
            }
        }
    }
    out.push(f);
}

/// The finite name universe used to ground a knowledge base for a set of
/// queries: every mentioned name plus `vars + 1 + extra` unmentioned names
/// per sort.
#[derive(Debug, Clone, Default)]
pub struct GroundingContext {
    universe: BTreeMap<SortId, Vec<TermId>>,
    kb_names: BTreeSet<TermId>,
    mentioned: BTreeSet<TermId>,
    vars: HashMap<SortId, usize>,
    extra: usize,
}

impl GroundingContext {
    /// `extra` reserves unmentioned names for split literals.
    pub fn new(sym: &mut Symbols, kb: &ProperPlusKB, queries: &[&Formula], extra: usize) -> Self {
        let mut kb_names = BTreeSet::new();
        kb.names(sym, &mut kb_names);
        let mut mentioned = kb_names.clone();
        let mut sorts = BTreeSet::new();
        kb.sorts(sym, &mut sorts);
        let mut vars = kb.vars_per_sort(sym);
        for q in queries {
            q.names(sym, &mut mentioned);
            for (s, n) in q.vars_per_sort(sym) {
                let e = vars.entry(s).or_default();
                *e = (*e).max(n);
            }
            let mut terms = Vec::new();
            q.visit_literals(&mut |l| terms.push(l));
            for l in terms {
                sorts.insert(sym.sort_of(l.lhs()));
                sorts.insert(sym.sort_of(l.rhs()));
                for &a in sym.args(l.lhs()) {
                    sorts.insert(sym.sort_of(a));
                }
            }
        }
        for &n in &mentioned {
            sorts.insert(sym.sort_of(n));
        }
        let mut universe = BTreeMap::new();
        for s in sorts {
            let mut names: Vec<TermId> = mentioned
                .iter()
                .copied()
                .filter(|&n| sym.sort_of(n) == s)
                .collect();
            let k = vars.get(&s).copied().unwrap_or(0) + 1 + extra;
            names.extend(sym.fresh_names(s, k, |n| mentioned.contains(&n)));
            universe.insert(s, names);
        }
        GroundingContext {
            universe,
            kb_names,
            mentioned,
            vars,
            extra,
        }
    }

    /// Unmentioned names reserved per sort beyond the variable budget.
    pub fn extra(&self) -> usize {
        self.extra
    }

    /// Universe names of `sort` (mentioned names first, then fresh ones).
    pub fn names(&self, sort: SortId) -> &[TermId] {
        self.universe.get(&sort).map_or(&[], |v| v.as_slice())
    }

    pub fn sorts(&self) -> impl Iterator<Item = SortId> + '_ {
        self.universe.keys().copied()
    }

    pub fn kb_names(&self) -> &BTreeSet<TermId> {
        &self.kb_names
    }

    pub fn mentioned(&self) -> &BTreeSet<TermId> {
        &self.mentioned
    }

    pub fn vars(&self, sort: SortId) -> usize {
        self.vars.get(&sort).copied().unwrap_or(0)
    }

    /// True when every name and sort of `f` is already covered, and `f`
    /// needs no more variables than this context was built for.
    pub fn covers(&self, sym: &Symbols, f: &Formula) -> bool {
        let mut names = BTreeSet::new();
        f.names(sym, &mut names);
        names.iter().all(|n| self.mentioned.contains(n))
            && f.vars_per_sort(sym)
                .iter()
                .all(|(s, &n)| self.universe.contains_key(s) && self.vars(*s) >= n)
    }

    /// Records a ground clause added after construction.
    pub fn note_clause(&mut self, sym: &mut Symbols, lits: &[Literal]) {
        for l in lits {
            let mut buf = Vec::new();
            sym.names_in(l.lhs(), &mut buf);
            sym.names_in(l.rhs(), &mut buf);
            for n in buf {
                self.kb_names.insert(n);
                if self.mentioned.insert(n) {
                    let s = sym.sort_of(n);
                    let list = self.universe.entry(s).or_default();
                    if !list.contains(&n) {
                        list.push(n);
                    }
                }
            }
        }
    }
}

/// Instantiates every clause of `kb` over the universe of `ctx`.
pub fn ground(sym: &mut Symbols, kb: &ProperPlusKB, ctx: &GroundingContext) -> Vec<Clause> {
    let mut out = Vec::new();
    for c in &kb.clauses {
        ground_clause(sym, c, ctx, &mut out);
    }
    out
}

pub fn ground_clause(sym: &mut Symbols, c: &UClause, ctx: &GroundingContext, out: &mut Vec<Clause>) {
    if c.vars.is_empty() {
        out.push(Clause::new(c.lits.iter().copied()));
        return;
    }
    let pools: Vec<&[TermId]> = c.vars.iter().map(|&v| ctx.names(sym.sort_of(v))).collect();
    if pools.iter().any(|p| p.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; pools.len()];
    let mut lits = Vec::with_capacity(c.lits.len());
    loop {
        lits.clear();
        for &l in &c.lits {
            lits.push(instantiate(sym, l, &c.vars, &idx, &pools));
        }
        out.push(Clause::new(lits.iter().copied()));
        let mut i = pools.len();
        loop {
            if i == 0 {
                return;
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

fn instantiate(
    sym: &mut Symbols,
    l: Literal,
    vars: &[TermId],
    idx: &[usize],
    pools: &[&[TermId]],
) -> Literal {
    let map = |t: TermId| match vars.iter().position(|&v| v == t) {
        Some(i) => pools[i][idx[i]],
        None => t,
    };
    let lhs = match sym.fun_of(l.lhs()) {
        Some(f) if !sym.is_ground(l.lhs()) => {
            let args: Vec<TermId> = sym.args(l.lhs()).iter().map(|&a| map(a)).collect();
            sym.app(f, &args).expect("instantiation keeps arity")
        }
        _ => map(l.lhs()),
    };
    Literal::pack(lhs, map(l.rhs()), l.pos())
}

/// The setup of a knowledge base over `ctx`.
pub fn ground_setup(sym: &mut Symbols, kb: &ProperPlusKB, ctx: &GroundingContext) -> Setup {
    let mut s = Setup::new();
    for c in &kb.clauses {
        let mut buf = Vec::new();
        ground_clause(sym, c, ctx, &mut buf);
        for g in &buf {
            s.add(sym, g).expect("grounded clauses are ground");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_is_sugar() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let a = sym.declare_name("a", s);
        let c = sym.declare_fun("c", 0, s);
        let t = sym.app(c, &[]).unwrap();
        let l = Formula::lit(Literal::eq(t, a));
        let f = Formula::and(l.clone(), l.clone());
        assert_eq!(
            f,
            Formula::not(Formula::or(Formula::not(l.clone()), Formula::not(l)))
        );
    }

    #[test]
    fn substitution_respects_binding() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let a = sym.declare_name("a", s);
        let x = sym.new_var("x", s);
        let f = sym.declare_fun("f", 1, s);
        let fx = sym.app(f, &[x]).unwrap();
        let fa = sym.app(f, &[a]).unwrap();
        let body = Formula::lit(Literal::eq(fx, x));
        assert_eq!(body.substitute(&mut sym, x, a), Formula::lit(Literal::eq(fa, a)));
        let closed = Formula::exists(x, body);
        assert_eq!(closed.substitute(&mut sym, x, a), closed);
    }

    #[test]
    fn flattening_nested_application() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let n = sym.declare_name("n", s);
        let m = sym.declare_name("m", s);
        let f = sym.declare_fun("f", 1, s);
        let g = sym.declare_fun("g", 1, s);
        let lhs = Expr::App(g, vec![Expr::App(f, vec![Expr::Atom(n)])]);
        let flat = flatten_literal(&mut sym, &lhs, &Expr::Atom(m), true).unwrap();
        assert_eq!(flat.vars.len(), 1);
        let x = flat.vars[0];
        let fnn = sym.app(f, &[n]).unwrap();
        let gx = sym.app(g, &[x]).unwrap();
        assert_eq!(flat.defs, vec![Literal::eq(fnn, x)]);
        assert_eq!(flat.core, Literal::eq(gx, m));
    }

    #[test]
    fn rewrite_merges_knowledge() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let a = sym.declare_name("a", s);
        let c = sym.declare_fun("c", 0, s);
        let t = sym.app(c, &[]).unwrap();
        let alpha = Formula::lit(Literal::eq(t, a));
        let beta = Formula::lit(Literal::neq(t, a));
        let f = Formula::and(Formula::know(1, alpha.clone()), Formula::know(1, beta.clone()));
        assert_eq!(rewrite(&f), Formula::know(1, Formula::and(alpha.clone(), beta.clone())));
        let x = sym.new_var("x", s);
        let f = Formula::exists(x, Formula::maybe(2, alpha.clone()));
        assert_eq!(rewrite(&f), Formula::maybe(2, Formula::exists(x, alpha.clone())));
        let f = Formula::forall(x, Formula::know(0, alpha.clone()));
        assert_eq!(rewrite(&f), Formula::know(0, Formula::forall(x, alpha)));
    }

    #[test]
    fn existential_kb_rejected_with_hint() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let a = sym.declare_name("a", s);
        let x = sym.new_var("x", s);
        let f = sym.declare_fun("f", 1, s);
        let fx = sym.app(f, &[x]).unwrap();
        let kb = Formula::exists(x, Formula::lit(Literal::eq(fx, a)));
        let err = ProperPlusKB::from_formula(&sym, &kb).unwrap_err();
        assert!(err.to_string().contains("Skolem"));
    }

    #[test]
    fn grounding_sizes() {
        let mut sym = Symbols::new();
        let s = sym.sort("S");
        let a = sym.declare_name("a", s);
        let x = sym.new_var("x", s);
        let f = sym.declare_fun("f", 1, s);
        let fx = sym.app(f, &[x]).unwrap();
        let kb = ProperPlusKB {
            clauses: vec![UClause {
                vars: vec![x],
                lits: vec![Literal::neq(fx, a)],
            }],
        };
        let ctx = GroundingContext::new(&mut sym, &kb, &[], 0);
        assert_eq!(ctx.names(s).len(), 3);
        assert_eq!(ground(&mut sym, &kb, &ctx).len(), 3);
    }
}
