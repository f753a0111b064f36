//! Printing formulas and scripts back to the text format.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::formula::{Formula, UClause};
use crate::symbols::{Symbols, TermId};

use super::{Declaration, Item, Script};

fn is_top(sym: &Symbols, f: &Formula) -> bool {
    *f == Formula::top(sym)
}

fn is_bottom(sym: &Symbols, f: &Formula) -> bool {
    *f == Formula::bottom(sym)
}

pub fn print_formula(sym: &Symbols, f: &Formula) -> String {
    let mut s = String::new();
    go(sym, f, &mut s);
    s
}

fn go(sym: &Symbols, f: &Formula, out: &mut String) {
    if is_top(sym, f) {
        out.push_str("true");
        return;
    }
    if is_bottom(sym, f) {
        out.push_str("false");
        return;
    }
    match f {
        Formula::Lit(l) => out.push_str(&sym.literal_label(*l)),
        Formula::Or(a, b) => {
            out.push('(');
            go(sym, a, out);
            out.push_str(" || ");
            go(sym, b, out);
            out.push(')');
        }
        Formula::Not(inner) => match &**inner {
            Formula::Or(a, b) => match (&**a, &**b) {
                (Formula::Not(x), Formula::Not(y)) => {
                    out.push('(');
                    go(sym, x, out);
                    out.push_str(" && ");
                    go(sym, y, out);
                    out.push(')');
                }
                _ => {
                    out.push('!');
                    go(sym, inner, out);
                }
            },
            Formula::Exists(x, body) => match &**body {
                Formula::Not(b) => {
                    let _ = write!(out, "forall {} (", sym.label(*x));
                    go(sym, b, out);
                    out.push(')');
                }
                _ => {
                    out.push('!');
                    go(sym, inner, out);
                }
            },
            Formula::Lit(_) => {
                out.push_str("!(");
                go(sym, inner, out);
                out.push(')');
            }
            _ => {
                out.push('!');
                go(sym, inner, out);
            }
        },
        Formula::Exists(x, body) => {
            let _ = write!(out, "exists {} (", sym.label(*x));
            go(sym, body, out);
            out.push(')');
        }
        Formula::Know(k, a) => {
            let _ = write!(out, "K<{k}> ");
            wrapped(sym, a, out);
        }
        Formula::Maybe(k, a) => {
            let _ = write!(out, "M<{k}> ");
            wrapped(sym, a, out);
        }
        Formula::Guarantee(a) => {
            out.push_str("G ");
            wrapped(sym, a, out);
        }
        Formula::OnlyKnow(a) => {
            out.push_str("O ");
            wrapped(sym, a, out);
        }
    }
}

fn wrapped(sym: &Symbols, f: &Formula, out: &mut String) {
    if matches!(f, Formula::Lit(_)) {
        out.push('(');
        go(sym, f, out);
        out.push(')');
    } else {
        go(sym, f, out);
    }
}

fn clause_text(sym: &Symbols, c: &UClause) -> String {
    if c.lits.is_empty() {
        return "false".into();
    }
    let parts: Vec<String> = c.lits.iter().map(|&l| sym.literal_label(l)).collect();
    parts.join(" || ")
}

fn collect_vars(sym: &Symbols, f: &Formula, out: &mut BTreeSet<TermId>) {
    let mut lits = Vec::new();
    f.as_literals(&mut lits);
    let mut buf = Vec::new();
    for l in lits {
        sym.vars_in(l.lhs(), &mut buf);
        sym.vars_in(l.rhs(), &mut buf);
    }
    if let Some(x) = bound(f) {
        buf.extend(x);
    }
    out.extend(buf);
}

fn bound(f: &Formula) -> Option<Vec<TermId>> {
    let mut out = Vec::new();
    fn walk(f: &Formula, out: &mut Vec<TermId>) {
        match f {
            Formula::Lit(_) => {}
            Formula::Or(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Formula::Exists(x, a) => {
                out.push(*x);
                walk(a, out);
            }
            Formula::Not(a)
            | Formula::Know(_, a)
            | Formula::Maybe(_, a)
            | Formula::OnlyKnow(a)
            | Formula::Guarantee(a) => walk(a, out),
        }
    }
    walk(f, &mut out);
    Some(out)
}

/// Prints a script; variables introduced while parsing (for nested
/// functions) are declared explicitly so that the output parses back to
/// the same text.
pub fn print_script(script: &Script) -> String {
    let sym = &script.sym;
    let mut out = String::new();
    let mut declared: BTreeSet<String> = BTreeSet::new();
    for item in &script.items {
        if let Item::Decl(d) = item {
            match d {
                Declaration::Sort(s) => {
                    let _ = writeln!(out, "sort {s}");
                }
                Declaration::Name(ns, s) => {
                    let _ = writeln!(out, "name {} : {s}", ns.join(", "));
                }
                Declaration::Fun(f, a, s) => {
                    let _ = writeln!(out, "fun {f}/{a} : {s}");
                }
                Declaration::Pred(p, a) => {
                    let _ = writeln!(out, "pred {p}/{a}");
                }
                Declaration::Var(vs, s) => {
                    declared.extend(vs.iter().cloned());
                    let _ = writeln!(out, "var {} : {s}", vs.join(", "));
                }
            }
        }
    }
    let mut vars: BTreeSet<TermId> = BTreeSet::new();
    for item in &script.items {
        match item {
            Item::Kb(cs) => {
                for c in cs {
                    vars.extend(c.vars.iter().copied());
                }
            }
            Item::Query(q) => collect_vars(sym, &q.formula, &mut vars),
            _ => {}
        }
    }
    vars.remove(&sym.top_var());
    for v in vars {
        let label = sym.label(v);
        if declared.insert(label.clone()) {
            let _ = writeln!(out, "var {} : {}", label, sym.sort_name(sym.sort_of(v)));
        }
    }
    for item in &script.items {
        match item {
            Item::Kb(cs) => {
                for c in cs {
                    let _ = writeln!(out, "kb: {}", clause_text(sym, c));
                }
            }
            Item::Query(q) => {
                let _ = writeln!(out, "query: {}", print_formula(sym, &q.formula));
                if let Some(e) = q.expect {
                    let _ = writeln!(out, "expect: {e}");
                }
            }
            _ => {}
        }
    }
    out
}
