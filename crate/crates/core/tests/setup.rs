//! Setups: propagation, subsumption queries, consistency tests,
//! restriction and backtracking, checked on examples and against the
//! oracle.

mod common;

use limbelief::clause::Clause;
use limbelief::formula::{ground_setup, Formula, GroundingContext, ProperPlusKB};
use limbelief::oracle::{classical_holds, universe};
use limbelief::setup::{Determined, Setup};
use limbelief::symbols::{Literal, Symbols, TermId};
use limbelief::textio::Parser;
use proptest::prelude::*;

use common::{load, FATHER};

fn lit(p: &mut Parser, src: &str) -> Literal {
    match p.parse_formula(src).unwrap() {
        Formula::Lit(l) => l,
        f => panic!("not a literal: {f:?}"),
    }
}

fn father() -> (Parser, Setup) {
    let (mut p, kb) = load(FATHER);
    let ctx = GroundingContext::new(&mut p.sym, &kb, &[], 1);
    let s = ground_setup(&mut p.sym, &kb, &ctx);
    (p, s)
}

struct Fx {
    sym: Symbols,
    f: TermId,
    g: TermId,
    n: Vec<TermId>,
}

fn fx() -> Fx {
    let mut sym = Symbols::new();
    let s = sym.sort("S");
    let n: Vec<TermId> = (0..5).map(|i| sym.declare_name(&format!("n{i}"), s)).collect();
    let f = sym.declare_fun("f", 1, s);
    let g = sym.declare_fun("g", 1, s);
    let f = sym.app(f, &[n[0]]).unwrap();
    let g = sym.app(g, &[n[0]]).unwrap();
    Fx { sym, f, g, n }
}

#[test]
fn additions() {
    let x = fx();
    let mut s = Setup::new();
    s.add_literal(&x.sym, Literal::eq(x.f, x.n[1])).unwrap();
    assert!(!s.obviously_inconsistent());
    s.add_literal(&x.sym, Literal::neq(x.f, x.n[1])).unwrap();
    assert!(s.obviously_inconsistent());

    let mut s = Setup::new();
    s.add(&x.sym, &Clause::unit(Literal::eq(x.n[0], x.n[0]))).unwrap();
    assert!(s.clauses().is_empty());

    let (mut p, mut s) = father();
    let l = lit(&mut p, "fatherOf(Sally) != Frank");
    s.add_literal(&p.sym, l).unwrap();
    let fred = lit(&mut p, "fatherOf(Sally) == Fred");
    assert_eq!(s.determines(fred.lhs()), Determined::Value(fred.rhs()));
}

#[test]
fn subsumption_queries_on_running_example() {
    let (mut p, mut s) = father();
    let either = Clause::new([lit(&mut p, "Rich(Frank)"), lit(&mut p, "Rich(Fred)")]);
    assert!(!s.subsumes(&p.sym, &either));
    let l = lit(&mut p, "Sally == Sally");
    assert!(s.subsumes(&p.sym, &Clause::unit(l)));
    let l = lit(&mut p, "fatherOf(Sally) == Frank");
    s.add_literal(&p.sym, l).unwrap();
    let l = lit(&mut p, "Rich(Frank)");
    assert!(s.subsumes(&p.sym, &Clause::unit(l)));
}

#[test]
fn obvious_inconsistency() {
    let x = fx();
    assert!(!Setup::new().obviously_inconsistent());
    let mut s = Setup::new();
    s.add_literal(&x.sym, Literal::eq(x.f, x.n[1])).unwrap();
    s.add_literal(&x.sym, Literal::eq(x.f, x.n[2])).unwrap();
    assert!(s.obviously_inconsistent());

    let (mut p, mut s) = father();
    let l = lit(&mut p, "fatherOf(Sally) == Sally");
    s.add_literal(&p.sym, l).unwrap();
    assert!(s.obviously_inconsistent());
}

#[test]
fn potential_inconsistency() {
    let mut x = fx();
    assert!(!Setup::new().potentially_inconsistent());

    let r = x.sym.sort("R");
    let other = x.sym.declare_name("r0", r);
    let mut s = Setup::new();
    s.add_literal(&x.sym, Literal::pack(x.f, other, true)).unwrap();
    assert!(s.potentially_inconsistent());

    let mut s = Setup::new();
    let [_, n1, n2, n3, n4] = [x.n[0], x.n[1], x.n[2], x.n[3], x.n[4]];
    s.add(&x.sym, &Clause::new([Literal::eq(x.f, n1), Literal::eq(x.g, n2)])).unwrap();
    s.add(&x.sym, &Clause::new([Literal::eq(x.f, n3), Literal::eq(x.g, n4)])).unwrap();
    assert!(!s.obviously_inconsistent());
    assert!(s.potentially_inconsistent());
}

#[test]
fn term_unequal_to_every_name_is_potentially_inconsistent() {
    let x = fx();
    let mut s = Setup::new();
    for &n in &x.n[..3] {
        s.add_literal(&x.sym, Literal::neq(x.f, n)).unwrap();
    }
    assert!(!s.potentially_inconsistent());
    assert!(s.potentially_inconsistent_over(&x.sym, |_| &x.n[..3]));
    assert!(!s.potentially_inconsistent_over(&x.sym, |_| &x.n[..]));
}

#[test]
fn determined_values() {
    let x = fx();
    let mut s = Setup::new();
    assert_eq!(s.determines(x.f), Determined::Unknown);
    s.add_literal(&x.sym, Literal::neq(x.f, x.n[1])).unwrap();
    s.add_literal(&x.sym, Literal::neq(x.f, x.n[2])).unwrap();
    match s.determines(x.f) {
        Determined::Excluded(mut ns) => {
            ns.sort();
            assert_eq!(ns, vec![x.n[1], x.n[2]]);
        }
        d => panic!("{d:?}"),
    }
    s.add_literal(&x.sym, Literal::eq(x.f, x.n[3])).unwrap();
    assert_eq!(s.determines(x.f), Determined::Value(x.n[3]));
}

#[test]
fn restriction() {
    let x = fx();
    let mut s = Setup::new();
    s.add_literal(&x.sym, Literal::eq(x.f, x.n[1])).unwrap();
    s.add_literal(&x.sym, Literal::eq(x.g, x.n[2])).unwrap();
    let only_f = s.restrict(&x.sym, &[x.f]);
    assert_eq!(only_f.clauses(), vec![Clause::unit(Literal::eq(x.f, x.n[1]))]);
    let all = s.restrict(&x.sym, &s.terms());
    let mut a = all.clauses();
    let mut b = s.minimal_clauses();
    a.sort();
    b.sort();
    assert_eq!(a, b);

    s.add_literal(&x.sym, Literal::neq(x.g, x.n[2])).unwrap();
    let r = s.restrict(&x.sym, &[x.f]);
    assert!(r.obviously_inconsistent());
}

#[test]
fn restriction_follows_shared_terms() {
    let x = fx();
    let mut s = Setup::new();
    s.add(&x.sym, &Clause::new([Literal::eq(x.f, x.n[1]), Literal::eq(x.g, x.n[1])])).unwrap();
    let r = s.restrict(&x.sym, &[x.g]);
    assert_eq!(r.clauses().len(), 1);
}

#[test]
fn nested_marks() {
    let x = fx();
    let mut s = Setup::new();
    s.add(&x.sym, &Clause::new([Literal::eq(x.f, x.n[1]), Literal::eq(x.g, x.n[1])])).unwrap();
    let probe = Clause::unit(Literal::eq(x.g, x.n[1]));
    let outer = s.mark();
    s.add_literal(&x.sym, Literal::neq(x.f, x.n[1])).unwrap();
    assert!(s.subsumes(&x.sym, &probe));
    let inner = s.mark();
    s.add_literal(&x.sym, Literal::neq(x.g, x.n[1])).unwrap();
    assert!(s.obviously_inconsistent());
    s.undo(inner).unwrap();
    assert!(!s.obviously_inconsistent());
    assert!(s.subsumes(&x.sym, &probe));
    s.undo(outer).unwrap();
    assert!(!s.subsumes(&x.sym, &probe));
    assert!(s.undo(inner).is_err());
}

#[test]
fn isomorphic_additions() {
    let mut sym = Symbols::new();
    let srt = sym.sort("S");
    let n = sym.declare_name("n", srt);
    let m = sym.declare_name("m", srt);
    let k = sym.declare_name("k", srt);
    let f = sym.declare_fun("f", 1, srt);
    let fa = |sym: &mut Symbols, a| sym.app(f, &[a]).unwrap();
    let (fn_, fm, fk) = (fa(&mut sym, n), fa(&mut sym, m), fa(&mut sym, k));

    let mut s = Setup::new();
    s.add_isomorphic(&mut sym, Literal::eq(fn_, n), &|_| vec![n, m]).unwrap();
    assert_eq!(s.value_of(fn_), Some(n));
    assert_eq!(s.value_of(fm), Some(m));

    let mut s = Setup::new();
    s.add_literal(&sym, Literal::neq(fm, m)).unwrap();
    assert_eq!(s.add_isomorphic(&mut sym, Literal::eq(fn_, n), &|_| vec![n, m]).unwrap(), 1);
    assert_eq!(s.value_of(fn_), Some(n));
    assert_eq!(s.value_of(fm), None);

    let mut s = Setup::new();
    s.add(&sym, &Clause::new([Literal::neq(fk, n), Literal::neq(fk, m)])).unwrap();
    let added = s.add_isomorphic(&mut sym, Literal::eq(fn_, m), &|_| vec![n, m, k]).unwrap();
    // Every f(a) = b with a != b; f(n) then has two values.
    assert_eq!(added, 6);
    assert!(s.obviously_inconsistent());
}

/// Random ground clauses over two terms and three names.
fn clauses() -> impl Strategy<Value = Vec<Vec<(usize, usize, bool)>>> {
    prop::collection::vec(prop::collection::vec((0usize..2, 0usize..3, any::<bool>()), 0..=3), 0..=4)
}

fn build(x: &Fx, spec: &[Vec<(usize, usize, bool)>]) -> Vec<Clause> {
    spec.iter()
        .map(|c| {
            Clause::new(c.iter().map(|&(t, n, pos)| Literal::pack([x.f, x.g][t], x.n[n], pos)))
        })
        .collect()
}

fn formula(sym: &Symbols, c: &Clause) -> Formula {
    Formula::disjunction(sym, c.literals().iter().map(|&l| Formula::lit(l)).collect())
}

/// Classical entailment of `goal` by the clauses.
fn entails(x: &mut Fx, cs: &[Clause], goal: Formula) -> bool {
    let kb = ProperPlusKB::new();
    let premises = Formula::conjunction(&x.sym, cs.iter().map(|c| formula(&x.sym, c)).collect());
    let q = Formula::know(0, Formula::implies(premises, goal));
    let u = universe(&mut x.sym, &kb, &q, 1);
    classical_holds(&mut x.sym, &kb, &q, &u).unwrap()
}

proptest! {
    #[test]
    fn queries_agree_with_oracle(spec in clauses(), goal in prop::collection::vec((0usize..2, 0usize..3, any::<bool>()), 0..=2)) {
        let mut x = fx();
        let cs = build(&x, &spec);
        let s = Setup::from_clauses(&x.sym, cs.iter()).unwrap();
        let goal = build(&x, &[goal]).pop().unwrap();
        let bottom = Formula::bottom(&x.sym);
        if s.subsumes(&x.sym, &goal) {
            let g = formula(&x.sym, &goal);
            prop_assert!(entails(&mut x, &cs, g));
        }
        if s.obviously_inconsistent() {
            prop_assert!(entails(&mut x, &cs, bottom.clone()));
        }
        if !s.potentially_inconsistent() {
            prop_assert!(!entails(&mut x, &cs, bottom));
        }
    }

    #[test]
    fn larger_setups_subsume_more(spec in clauses(), extra in clauses(), goal in prop::collection::vec((0usize..2, 0usize..3, any::<bool>()), 0..=2)) {
        let x = fx();
        let small = build(&x, &spec);
        let mut big = small.clone();
        big.extend(build(&x, &extra));
        let goal = build(&x, &[goal]).pop().unwrap();
        let a = Setup::from_clauses(&x.sym, small.iter()).unwrap();
        let b = Setup::from_clauses(&x.sym, big.iter()).unwrap();
        if a.subsumes(&x.sym, &goal) {
            prop_assert!(b.subsumes(&x.sym, &goal));
        }
    }

    #[test]
    fn undo_restores_queries(spec in clauses(), extra in clauses(), goal in prop::collection::vec((0usize..2, 0usize..3, any::<bool>()), 0..=2)) {
        let x = fx();
        let mut s = Setup::from_clauses(&x.sym, build(&x, &spec).iter()).unwrap();
        let goal = build(&x, &[goal]).pop().unwrap();
        let before = (s.subsumes(&x.sym, &goal), s.obviously_inconsistent(), s.potentially_inconsistent(), s.clauses());
        let cp = s.mark();
        for c in build(&x, &extra) {
            s.add(&x.sym, &c).unwrap();
        }
        s.undo(cp).unwrap();
        let after = (s.subsumes(&x.sym, &goal), s.obviously_inconsistent(), s.potentially_inconsistent(), s.clauses());
        prop_assert_eq!(before, after);
    }
}
