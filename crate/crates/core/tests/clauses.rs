//! Clause validity, subsumption and unit propagation.

use limbelief::clause::Clause;
use limbelief::formula::{Formula, ProperPlusKB};
use limbelief::oracle::{classical_holds, universe};
use limbelief::symbols::{Literal, Symbols, TermId};
use proptest::prelude::*;

struct Fx {
    sym: Symbols,
    terms: Vec<TermId>,
    names: Vec<TermId>,
}

fn fx() -> Fx {
    let mut sym = Symbols::new();
    let s = sym.sort("S");
    let names: Vec<TermId> = (0..3).map(|i| sym.declare_name(&format!("n{i}"), s)).collect();
    let f = sym.declare_fun("f", 1, s);
    let g = sym.declare_fun("g", 1, s);
    let terms = vec![sym.app(f, &[names[0]]).unwrap(), sym.app(g, &[names[0]]).unwrap(), names[0]];
    Fx { sym, terms, names }
}

type Spec = Vec<(usize, usize, bool)>;

impl Fx {
    fn literal(&self, (a, b, pos): (usize, usize, bool)) -> Literal {
        Literal::pack(self.terms[a % self.terms.len()], self.names[b % self.names.len()], pos)
    }

    fn clause(&self, spec: &Spec) -> Clause {
        Clause::new(spec.iter().map(|&l| self.literal(l)))
    }

    fn formula(&self, c: &Clause) -> Formula {
        Formula::disjunction(&self.sym, c.literals().iter().map(|&l| Formula::lit(l)).collect())
    }

    fn entailed(&mut self, f: Formula) -> bool {
        let kb = ProperPlusKB::new();
        let q = Formula::know(0, f);
        let u = universe(&mut self.sym, &kb, &q, 1);
        classical_holds(&mut self.sym, &kb, &q, &u).unwrap()
    }
}

/// No literal subsumes another literal of the same clause.
fn reduced(c: &Clause) -> bool {
    let ls = c.literals();
    ls.iter().all(|&a| ls.iter().all(|&b| a == b || !a.subsumes(b)))
}

fn lit() -> impl Strategy<Value = (usize, usize, bool)> {
    (0usize..3, 0usize..3, any::<bool>())
}

fn clause() -> impl Strategy<Value = Spec> {
    prop::collection::vec(lit(), 0..=4)
}

#[test]
fn worked_examples() {
    let x = fx();
    let (f, g) = (x.terms[0], x.terms[1]);
    let [n0, n1, n2] = [x.names[0], x.names[1], x.names[2]];

    assert!(Clause::unit(Literal::eq(n0, n0)).valid(&x.sym));
    assert!(Clause::new([Literal::eq(f, n1), Literal::neq(f, n1)]).valid(&x.sym));
    assert!(Clause::new([Literal::neq(f, n1), Literal::neq(f, n2)]).valid(&x.sym));
    assert!(!Clause::new([Literal::eq(f, n1), Literal::eq(f, n2)]).valid(&x.sym));

    let any = Clause::new([Literal::eq(g, n0)]);
    assert!(Clause::empty().subsumes(&any));
    assert!(Clause::unit(Literal::eq(f, n1)).subsumes(&Clause::new([Literal::neq(f, n2), Literal::eq(g, n0)])));
    assert!(!Clause::new([Literal::eq(f, n1), Literal::eq(g, n0)]).subsumes(&Clause::unit(Literal::eq(f, n1))));

    let c = Clause::new([Literal::eq(f, n1), Literal::eq(g, n2)]);
    assert_eq!(c.propagate(Literal::eq(f, n0)), Clause::unit(Literal::eq(g, n2)));
    assert_eq!(c.propagate(Literal::eq(f, n1)), c);
    assert_eq!(Clause::unit(Literal::eq(f, n1)).propagate(Literal::eq(f, n2)), Clause::empty());
}

proptest! {
    #[test]
    fn subsumption_is_transitive(a in clause(), b in clause(), c in clause()) {
        let x = fx();
        let (a, b, c) = (x.clause(&a), x.clause(&b), x.clause(&c));
        prop_assert!(a.subsumes(&a));
        if a.subsumes(&b) && b.subsumes(&c) {
            prop_assert!(a.subsumes(&c));
        }
    }

    #[test]
    fn mutual_subsumption_of_reduced_clauses_is_identity(a in clause(), b in clause()) {
        let x = fx();
        let (a, b) = (x.clause(&a), x.clause(&b));
        if reduced(&a) && reduced(&b) && a.subsumes(&b) && b.subsumes(&a) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn propagation_keeps_subsumption(a in clause(), b in clause(), l1 in lit(), l2 in lit()) {
        let x = fx();
        let (c1, c2) = (x.clause(&a), x.clause(&b));
        let (l1, l2) = (x.literal(l1), x.literal(l2));
        if c1.subsumes(&c2) && l1.subsumes(l2) {
            prop_assert!(c1.propagate(l1).subsumes(&c2.propagate(l2)));
        }
    }

    #[test]
    fn validity_matches_oracle(a in clause()) {
        let mut x = fx();
        let c = x.clause(&a);
        let f = x.formula(&c);
        prop_assert_eq!(c.valid(&x.sym), x.entailed(f));
    }

    #[test]
    fn subsumption_and_propagation_are_entailments(a in clause(), b in clause(), l in lit()) {
        let mut x = fx();
        let (c1, c2) = (x.clause(&a), x.clause(&b));
        if c1.subsumes(&c2) {
            let f = Formula::implies(x.formula(&c1), x.formula(&c2));
            prop_assert!(x.entailed(f));
        }
        let l = x.literal(l);
        let p = c1.propagate(l);
        prop_assert!(p.literals().iter().all(|q| c1.contains(*q)));
        let f = Formula::implies(Formula::and(x.formula(&c1), Formula::lit(l)), x.formula(&p));
        prop_assert!(x.entailed(f));
    }
}
