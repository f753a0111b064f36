//! Sorts, standard names, variables, function symbols, interned terms and
//! packed literals.
//!
//! Every term is interned once and addressed by a [`TermId`]. Names and
//! non-names live in separate tables; the handle keeps a one-bit tag saying
//! which table it points into, so "is this a name" never needs a lookup.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Upper bound on the index stored in a handle (per table).
pub const INDEX_LIMIT: u32 = 1 << 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymbolError {
    #[error("function `{name}` takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("arguments of `{0}` must be names or variables")]
    NestedArgument(String),
    #[error("right-hand side of a literal must be a name or a variable")]
    ComplexRhs,
    #[error("term pool exhausted")]
    PoolExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SortId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunId(pub u32);

/// Interned term handle: bit 0 is the name flag, bits 1..31 the table index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn from_parts(index: u32, is_name: bool) -> Result<TermId, SymbolError> {
        if index >= INDEX_LIMIT {
            return Err(SymbolError::PoolExhausted);
        }
        Ok(TermId((index << 1) | is_name as u32))
    }

    #[inline]
    pub fn is_name(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }
}

/// Structural view of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Name { sort: SortId, ordinal: u32 },
    Var { sort: SortId, ordinal: u32 },
    App { fun: FunId, args: Box<[TermId]> },
}

/// A literal `lhs = rhs` or `lhs != rhs` packed into one word.
///
/// Layout: bits 33..63 hold the lhs handle, bit 32 the sign (1 = equality),
/// bits 0..30 the rhs handle. Sorting by the raw word groups literals by
/// left-hand side, then sign, then right-hand side.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(u64);

const POS_BIT: u64 = 1 << 32;
const RHS_NAME_BIT: u64 = 1;

impl Literal {
    /// Packs without checking the shape; see [`Symbols::literal`].
    #[inline]
    pub fn pack(lhs: TermId, rhs: TermId, pos: bool) -> Literal {
        Literal(((lhs.0 as u64) << 33) | ((pos as u64) << 32) | rhs.0 as u64)
    }

    #[inline]
    pub fn eq(lhs: TermId, rhs: TermId) -> Literal {
        Literal::pack(lhs, rhs, true)
    }

    #[inline]
    pub fn neq(lhs: TermId, rhs: TermId) -> Literal {
        Literal::pack(lhs, rhs, false)
    }

    #[inline]
    pub fn lhs(self) -> TermId {
        TermId((self.0 >> 33) as u32)
    }

    #[inline]
    pub fn rhs(self) -> TermId {
        TermId(self.0 as u32)
    }

    #[inline]
    pub fn pos(self) -> bool {
        self.0 & POS_BIT != 0
    }

    #[inline]
    pub fn flip(self) -> Literal {
        Literal(self.0 ^ POS_BIT)
    }

    #[inline]
    pub fn raw(self) -> u64 {
        self.0
    }

    /// `t = t'` vs `t != t'`, or `t = n1` vs `t = n2` for distinct names.
    #[inline]
    pub fn complementary(self, other: Literal) -> bool {
        let x = self.0 ^ other.0;
        if x >> 33 != 0 {
            return false;
        }
        if x as u32 == 0 {
            return x & POS_BIT != 0;
        }
        self.0 & other.0 & (POS_BIT | RHS_NAME_BIT) == POS_BIT | RHS_NAME_BIT
    }

    /// Identical, or `t = n1` against `t != n2` for distinct names.
    #[inline]
    pub fn subsumes(self, other: Literal) -> bool {
        if self.0 == other.0 {
            return true;
        }
        let x = self.0 ^ other.0;
        x >> 33 == 0
            && x as u32 != 0
            && self.0 & POS_BIT != 0
            && other.0 & POS_BIT == 0
            && self.0 & other.0 & RHS_NAME_BIT != 0
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.pos() { "=" } else { "!=" };
        write!(f, "t{} {} t{}", self.lhs().0, op, self.rhs().0)
    }
}

#[derive(Debug, Clone)]
pub struct FunInfo {
    pub name: String,
    pub arity: usize,
    pub sort: SortId,
}

#[derive(Debug, Clone)]
struct NameEntry {
    sort: SortId,
    ordinal: u32,
    label: String,
}

#[derive(Debug, Clone)]
struct OtherEntry {
    term: Term,
    sort: SortId,
    ground: bool,
    label: Option<String>,
}

/// Symbol tables and the term pool.
///
/// The pool is append-only. Building it needs `&mut`; afterwards any number
/// of readers can share it.
#[derive(Debug, Clone)]
pub struct Symbols {
    sorts: Vec<String>,
    sort_index: HashMap<String, SortId>,
    funs: Vec<FunInfo>,
    fun_index: HashMap<String, FunId>,
    names: Vec<NameEntry>,
    names_by_sort: Vec<Vec<TermId>>,
    vars_by_sort: Vec<u32>,
    others: Vec<OtherEntry>,
    other_index: HashMap<Term, TermId>,
    bool_sort: SortId,
    truth: TermId,
    top_var: TermId,
}

impl Default for Symbols {
    fn default() -> Self {
        Self::new()
    }
}

impl Symbols {
    /// A fresh table with the Boolean sort `BOOL` and its name `T`.
    pub fn new() -> Self {
        let mut sym = Symbols {
            sorts: Vec::new(),
            sort_index: HashMap::new(),
            funs: Vec::new(),
            fun_index: HashMap::new(),
            names: Vec::new(),
            names_by_sort: Vec::new(),
            vars_by_sort: Vec::new(),
            others: Vec::new(),
            other_index: HashMap::new(),
            bool_sort: SortId(0),
            truth: TermId(1),
            top_var: TermId(0),
        };
        sym.bool_sort = sym.sort("BOOL");
        sym.truth = sym.declare_name("T", sym.bool_sort);
        sym.top_var = sym.new_var("_top", sym.bool_sort);
        sym
    }

    /// Variable used to spell the trivially true sentence `exists v (v == v)`.
    pub fn top_var(&self) -> TermId {
        self.top_var
    }

    pub fn bool_sort(&self) -> SortId {
        self.bool_sort
    }

    /// The name `T` that predicates are compared against.
    pub fn truth(&self) -> TermId {
        self.truth
    }

    /// Looks up a sort by name, creating it if needed.
    pub fn sort(&mut self, name: &str) -> SortId {
        if let Some(&s) = self.sort_index.get(name) {
            return s;
        }
        let s = SortId(self.sorts.len() as u32);
        self.sorts.push(name.to_string());
        self.sort_index.insert(name.to_string(), s);
        self.names_by_sort.push(Vec::new());
        self.vars_by_sort.push(0);
        s
    }

    pub fn find_sort(&self, name: &str) -> Option<SortId> {
        self.sort_index.get(name).copied()
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s.0 as usize]
    }

    pub fn sorts(&self) -> impl Iterator<Item = SortId> {
        (0..self.sorts.len() as u32).map(SortId)
    }

    pub fn declare_fun(&mut self, name: &str, arity: usize, sort: SortId) -> FunId {
        if let Some(&f) = self.fun_index.get(name) {
            return f;
        }
        let f = FunId(self.funs.len() as u32);
        self.funs.push(FunInfo {
            name: name.to_string(),
            arity,
            sort,
        });
        self.fun_index.insert(name.to_string(), f);
        f
    }

    pub fn find_fun(&self, name: &str) -> Option<FunId> {
        self.fun_index.get(name).copied()
    }

    pub fn fun(&self, f: FunId) -> &FunInfo {
        &self.funs[f.0 as usize]
    }

    pub fn funs(&self) -> impl Iterator<Item = FunId> {
        (0..self.funs.len() as u32).map(FunId)
    }

    /// Declares the next name of `sort` with a display label.
    pub fn declare_name(&mut self, label: &str, sort: SortId) -> TermId {
        let id = self.push_name(sort, label.to_string());
        self.names_by_sort[sort.0 as usize].push(id);
        id
    }

    fn push_name(&mut self, sort: SortId, label: String) -> TermId {
        let id = TermId::from_parts(self.names.len() as u32, true).expect("term pool exhausted");
        let ordinal = self.names_by_sort[sort.0 as usize].len() as u32;
        self.names.push(NameEntry {
            sort,
            ordinal,
            label,
        });
        id
    }

    /// The name of `sort` with the given ordinal, created on demand.
    pub fn name(&mut self, sort: SortId, ordinal: u32) -> TermId {
        while self.names_by_sort[sort.0 as usize].len() <= ordinal as usize {
            let ord = self.names_by_sort[sort.0 as usize].len();
            let label = format!("{}#{}", self.sorts[sort.0 as usize], ord);
            let id = self.push_name(sort, label);
            self.names_by_sort[sort.0 as usize].push(id);
        }
        self.names_by_sort[sort.0 as usize][ordinal as usize]
    }

    /// Names of `sort` created so far, in ordinal order.
    pub fn names_of(&self, sort: SortId) -> &[TermId] {
        &self.names_by_sort[sort.0 as usize]
    }

    /// `k` distinct names of `sort` outside `avoid`, smallest ordinals first.
    pub fn fresh_names(
        &mut self,
        sort: SortId,
        k: usize,
        avoid: impl Fn(TermId) -> bool,
    ) -> Vec<TermId> {
        let mut out = Vec::with_capacity(k);
        let mut ord = 0u32;
        while out.len() < k {
            let n = self.name(sort, ord);
            if !avoid(n) {
                out.push(n);
            }
            ord += 1;
        }
        out
    }

    /// A new variable of `sort`.
    pub fn new_var(&mut self, label: &str, sort: SortId) -> TermId {
        let ordinal = self.vars_by_sort[sort.0 as usize];
        self.vars_by_sort[sort.0 as usize] += 1;
        let id = self
            .intern_other(Term::Var { sort, ordinal }, sort, false)
            .expect("term pool exhausted");
        self.others[id.index() as usize].label = Some(label.to_string());
        id
    }

    /// Interns `fun(args)`; every argument must be a name or a variable.
    pub fn app(&mut self, fun: FunId, args: &[TermId]) -> Result<TermId, SymbolError> {
        let info = &self.funs[fun.0 as usize];
        if info.arity != args.len() {
            return Err(SymbolError::Arity {
                name: info.name.clone(),
                expected: info.arity,
                got: args.len(),
            });
        }
        if args.iter().any(|&a| !self.is_atomic(a)) {
            return Err(SymbolError::NestedArgument(info.name.clone()));
        }
        let sort = info.sort;
        let ground = args.iter().all(|a| a.is_name());
        self.intern_other(
            Term::App {
                fun,
                args: args.into(),
            },
            sort,
            ground,
        )
    }

    fn intern_other(&mut self, term: Term, sort: SortId, ground: bool) -> Result<TermId, SymbolError> {
        if let Some(&id) = self.other_index.get(&term) {
            return Ok(id);
        }
        let id = TermId::from_parts(self.others.len() as u32, false)?;
        self.others.push(OtherEntry {
            term: term.clone(),
            sort,
            ground,
            label: None,
        });
        self.other_index.insert(term, id);
        Ok(id)
    }

    /// Checked literal constructor.
    pub fn literal(&self, lhs: TermId, rhs: TermId, pos: bool) -> Result<Literal, SymbolError> {
        if !self.is_atomic(rhs) {
            return Err(SymbolError::ComplexRhs);
        }
        Ok(Literal::pack(lhs, rhs, pos))
    }

    pub fn term(&self, t: TermId) -> Term {
        if t.is_name() {
            let e = &self.names[t.index() as usize];
            Term::Name {
                sort: e.sort,
                ordinal: e.ordinal,
            }
        } else {
            self.others[t.index() as usize].term.clone()
        }
    }

    #[inline]
    pub fn sort_of(&self, t: TermId) -> SortId {
        if t.is_name() {
            self.names[t.index() as usize].sort
        } else {
            self.others[t.index() as usize].sort
        }
    }

    #[inline]
    pub fn is_var(&self, t: TermId) -> bool {
        !t.is_name() && matches!(self.others[t.index() as usize].term, Term::Var { .. })
    }

    /// Name or variable.
    #[inline]
    pub fn is_atomic(&self, t: TermId) -> bool {
        t.is_name() || self.is_var(t)
    }

    /// Function application whose arguments are all names.
    #[inline]
    pub fn is_primitive(&self, t: TermId) -> bool {
        if t.is_name() {
            return false;
        }
        let e = &self.others[t.index() as usize];
        e.ground && matches!(e.term, Term::App { .. })
    }

    #[inline]
    pub fn is_ground(&self, t: TermId) -> bool {
        t.is_name() || self.others[t.index() as usize].ground
    }

    pub fn args(&self, t: TermId) -> &[TermId] {
        if t.is_name() {
            return &[];
        }
        match &self.others[t.index() as usize].term {
            Term::App { args, .. } => args,
            _ => &[],
        }
    }

    pub fn fun_of(&self, t: TermId) -> Option<FunId> {
        if t.is_name() {
            return None;
        }
        match &self.others[t.index() as usize].term {
            Term::App { fun, .. } => Some(*fun),
            _ => None,
        }
    }

    pub fn is_ground_literal(&self, l: Literal) -> bool {
        self.is_ground(l.lhs()) && self.is_ground(l.rhs())
    }

    /// `t = t`, `n != n'` for distinct names, `t != t'` across sorts.
    pub fn literal_valid(&self, l: Literal) -> bool {
        let (a, b) = (l.lhs(), l.rhs());
        if l.pos() {
            a == b
        } else {
            (a != b && a.is_name() && b.is_name()) || self.sort_of(a) != self.sort_of(b)
        }
    }

    /// `t != t`, `n = n'` for distinct names, `t = t'` across sorts.
    pub fn literal_invalid(&self, l: Literal) -> bool {
        let (a, b) = (l.lhs(), l.rhs());
        if l.pos() {
            (a != b && a.is_name() && b.is_name()) || self.sort_of(a) != self.sort_of(b)
        } else {
            a == b
        }
    }

    /// Replaces the atomic term `from` by the atomic term `to` inside `t`.
    pub fn replace(&mut self, t: TermId, from: TermId, to: TermId) -> TermId {
        if t == from {
            return to;
        }
        if t.is_name() {
            return t;
        }
        let (fun, args) = match &self.others[t.index() as usize].term {
            Term::App { fun, args } if args.contains(&from) => (*fun, args.clone()),
            _ => return t,
        };
        let new_args: Vec<TermId> = args.iter().map(|&a| if a == from { to } else { a }).collect();
        self.app(fun, &new_args).expect("substitution keeps arity and shape")
    }

    pub fn replace_in_literal(&mut self, l: Literal, from: TermId, to: TermId) -> Literal {
        let lhs = self.replace(l.lhs(), from, to);
        let rhs = if l.rhs() == from { to } else { l.rhs() };
        Literal::pack(lhs, rhs, l.pos())
    }

    /// Variables occurring in `t` (itself or its arguments).
    pub fn vars_in(&self, t: TermId, out: &mut Vec<TermId>) {
        if t.is_name() {
            return;
        }
        match &self.others[t.index() as usize].term {
            Term::Var { .. } => out.push(t),
            Term::App { args, .. } => out.extend(args.iter().copied().filter(|&a| !a.is_name())),
            Term::Name { .. } => {}
        }
    }

    /// Names occurring in `t` (itself or its arguments).
    pub fn names_in(&self, t: TermId, out: &mut Vec<TermId>) {
        if t.is_name() {
            out.push(t);
            return;
        }
        if let Term::App { args, .. } = &self.others[t.index() as usize].term {
            out.extend(args.iter().copied().filter(|a| a.is_name()));
        }
    }

    pub fn label(&self, t: TermId) -> String {
        if t.is_name() {
            return self.names[t.index() as usize].label.clone();
        }
        let e = &self.others[t.index() as usize];
        match &e.term {
            Term::Var { ordinal, sort } => e
                .label
                .clone()
                .unwrap_or_else(|| format!("_{}{}", self.sorts[sort.0 as usize], ordinal)),
            Term::App { fun, args } => {
                let f = &self.funs[fun.0 as usize].name;
                if args.is_empty() {
                    f.clone()
                } else {
                    let a: Vec<String> = args.iter().map(|&x| self.label(x)).collect();
                    format!("{}({})", f, a.join(", "))
                }
            }
            Term::Name { .. } => unreachable!("names live in their own table"),
        }
    }

    pub fn literal_label(&self, l: Literal) -> String {
        let op = if l.pos() { "==" } else { "!=" };
        format!("{} {} {}", self.label(l.lhs()), op, self.label(l.rhs()))
    }

    /// Total number of interned terms.
    pub fn pool_size(&self) -> usize {
        self.names.len() + self.others.len()
    }

    /// Upper bound (exclusive) on the index of non-name terms.
    pub fn term_capacity(&self) -> usize {
        self.others.len()
    }
}
