//! Term generators shared by the property suites.
#![allow(dead_code)]

#[path = "../../../oracles/src/corpus.rs"]
mod corpus;
#[allow(unused_imports)]
pub use corpus::{typed_context, Corpus};

use ccnat_core::term::{Annotation, Context, Term, VarSort};
use proptest::prelude::*;

pub fn nat_var(x: &str) -> Term {
    Term::var(x, VarSort::Star)
}

pub fn f(t: Term) -> Term {
    Term::app(nat_var("f"), t)
}

/// First-order object terms over `x y z`, `f`, `0`, `S` and `+`.
pub fn fo_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::zero()),
        Just(Term::numeral(1)),
        Just(nat_var("x")),
        Just(nat_var("y")),
        Just(nat_var("z")),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            inner.clone().prop_map(f),
            (inner.clone(), inner).prop_map(|(a, b)| Term::add(a, b)),
        ]
    })
}

pub fn fo_equation() -> impl Strategy<Value = (Term, Term)> {
    (fo_term(), fo_term())
}

/// `x y z : nat`, `f : nat → nat`, then each equation as an `r` binding.
pub fn fo_context(hyps: &[(Term, Term)]) -> Context {
    let mut ctx = Context::new();
    for x in ["x", "y", "z"] {
        ctx.push(x, Annotation::U, Term::nat()).unwrap();
    }
    ctx.push("f", Annotation::U, Term::arrow(Term::nat(), Term::nat())).unwrap();
    for (i, (l, r)) in hyps.iter().enumerate() {
        ctx.push(format!("h{i}"), Annotation::R, Term::eq(Term::nat(), l.clone(), r.clone())).unwrap();
    }
    ctx
}

/// Every position of `t` as a child-index path, root first.
pub fn positions(t: &Term) -> Vec<Vec<u8>> {
    fn go(t: &Term, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        out.push(path.clone());
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i as u8);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}
