//! Limited belief against brute-force classical belief on random
//! propositional knowledge bases.

mod common;

use limbelief::formula::Formula;
use limbelief::oracle::{classical_holds, universe};
use limbelief::solver::{query, QueryOptions};

use common::Gen;

fn opts() -> QueryOptions {
    QueryOptions {
        rewrite: false,
        ..QueryOptions::default()
    }
}

#[test]
fn sound_and_eventually_complete_on_small_corpus() {
    let mut gen = Gen::new(7);
    let mut failures = Vec::new();
    for case_no in 0..200 {
        let mut case = gen.case(3);
        let kb = case.kb.clone();
        for psi in case.queries.clone() {
            let sym = &mut case.sym;
            let u = universe(sym, &kb, &Formula::know(0, psi.clone()), 1);
            let ok = classical_holds(sym, &kb, &Formula::know(0, psi.clone()), &u).unwrap();
            let om = classical_holds(sym, &kb, &Formula::maybe(0, psi.clone()), &u).unwrap();
            let top = case.terms.len() as u32 + 1;
            let mut found_k = false;
            let mut found_m = false;
            for k in 0..=top {
                let qk = query(sym, &kb, &Formula::know(k, psi.clone()), &opts()).unwrap();
                let qm = query(sym, &kb, &Formula::maybe(k, psi.clone()), &opts()).unwrap();
                if qk && !ok {
                    failures.push(format!("case {case_no}: K{k} unsound"));
                }
                if qm && !om {
                    failures.push(format!("case {case_no}: M{k} unsound"));
                }
                if found_k && !qk || found_m && !qm {
                    failures.push(format!("case {case_no}: level {k} not monotone"));
                }
                found_k |= qk;
                found_m |= qm;
            }
            if ok && !found_k {
                failures.push(format!("case {case_no}: K incomplete"));
            }
            if om && !found_m {
                failures.push(format!("case {case_no}: M incomplete"));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}
