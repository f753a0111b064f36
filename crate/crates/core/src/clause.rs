//! Clauses as sorted, duplicate-free literal sets.

use std::fmt;

use crate::symbols::{Literal, Symbols, TermId};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Clause {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Clause(v)
    }

    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn unit(l: Literal) -> Clause {
        Clause(vec![l])
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.len() == 1
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    /// Literals sharing the left-hand side of `l` (they are contiguous).
    fn same_lhs(&self, l: Literal) -> &[Literal] {
        let lo = Literal::pack(l.lhs(), TermId::from_parts(0, false).unwrap(), false);
        let start = self.0.partition_point(|x| *x < lo);
        let end = start + self.0[start..].iter().take_while(|x| x.lhs() == l.lhs()).count();
        &self.0[start..end]
    }

    /// Contains a valid literal, a pair `t = t'`, `t != t'`, or a pair
    /// `t != n1`, `t != n2` with distinct names.
    pub fn valid(&self, sym: &Symbols) -> bool {
        let lits = &self.0;
        for (i, &a) in lits.iter().enumerate() {
            if sym.literal_valid(a) {
                return true;
            }
            for &b in lits[i + 1..].iter().take_while(|b| b.lhs() == a.lhs()) {
                if a.rhs() == b.rhs() && a.pos() != b.pos() {
                    return true;
                }
                if !a.pos() && !b.pos() && a.rhs().is_name() && b.rhs().is_name() {
                    return true;
                }
            }
        }
        false
    }

    /// Every literal of `self` subsumes some literal of `other`.
    pub fn subsumes(&self, other: &Clause) -> bool {
        self.0
            .iter()
            .all(|&a| other.same_lhs(a).iter().any(|&b| a.subsumes(b)))
    }

    /// Unit propagation: drops every literal complementary to `l`.
    pub fn propagate(&self, l: Literal) -> Clause {
        Clause(self.0.iter().copied().filter(|&a| !a.complementary(l)).collect())
    }

    /// Drops invalid literals (the effect of propagating with valid ones).
    pub fn strip_invalid(&self, sym: &Symbols) -> Clause {
        Clause(self.0.iter().copied().filter(|&a| !sym.literal_invalid(a)).collect())
    }

    pub fn is_ground(&self, sym: &Symbols) -> bool {
        self.0.iter().all(|&l| sym.is_ground_literal(l))
    }

    pub fn display(&self, sym: &Symbols) -> String {
        if self.0.is_empty() {
            return "[]".to_string();
        }
        let parts: Vec<String> = self.0.iter().map(|&l| sym.literal_label(l)).collect();
        parts.join(" || ")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl FromIterator<Literal> for Clause {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        Clause::new(iter)
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
    fn validity_examples() {
        let x = fx();
        let c = Clause::new([Literal::eq(x.f, x.n[0]), Literal::neq(x.f, x.n[0])]);
        assert!(c.valid(&x.sym));
        let c = Clause::new([Literal::neq(x.f, x.n[0]), Literal::neq(x.f, x.n[1])]);
        assert!(c.valid(&x.sym));
        let c = Clause::new([Literal::eq(x.f, x.n[0]), Literal::eq(x.f, x.n[1])]);
        assert!(!c.valid(&x.sym));
        assert!(!Clause::empty().valid(&x.sym));
    }

    #[test]
    fn subsumption_examples() {
        let x = fx();
        let a = Clause::new([Literal::eq(x.f, x.n[0])]);
        let b = Clause::new([Literal::neq(x.f, x.n[1]), Literal::eq(x.g, x.n[2])]);
        assert!(a.subsumes(&b));
        assert!(!b.subsumes(&a));
        assert!(Clause::empty().subsumes(&a));
    }

    #[test]
    fn propagation_example() {
        let x = fx();
        let c = Clause::new([Literal::eq(x.f, x.n[0]), Literal::eq(x.g, x.n[1])]);
        let r = c.propagate(Literal::neq(x.f, x.n[0]));
        assert_eq!(r, Clause::unit(Literal::eq(x.g, x.n[1])));
        let r = c.propagate(Literal::eq(x.f, x.n[2]));
        assert_eq!(r, Clause::unit(Literal::eq(x.g, x.n[1])));
    }
}
