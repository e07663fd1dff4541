//! Reference conversion for first-order object terms built from variables,
//! `0`, `S`, `+` and one unary function symbol `f`.
//!
//! Two procedures are provided. [`fixpoint`] computes the least relation
//! closed under the hypotheses, congruence and arithmetic deduction by
//! brute-force iteration over the subterms of the problem. [`semantic`]
//! decides entailment in every model over ℕ by splitting on all
//! arrangements of the arguments of `f`, which covers the non-convex
//! consequences that plain equality propagation misses.

use std::collections::HashMap;

use ccnat_core::arith::{Atom, LinEq, LinPoly};
use ccnat_core::term::{Annotation, Context, Term};

use crate::arith::{irreducible, Dense};

pub const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fo {
    Var(usize),
    Zero,
    Succ(Box<Fo>),
    Add(Box<Fo>, Box<Fo>),
    F(Box<Fo>),
}

impl Fo {
    pub fn size(&self) -> usize {
        match self {
            Fo::Var(_) | Fo::Zero => 1,
            Fo::Succ(a) | Fo::F(a) => 1 + a.size(),
            Fo::Add(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Fo::Var(i) => Term::var(VARS[*i], ccnat_core::term::VarSort::Star),
            Fo::Zero => Term::zero(),
            Fo::Succ(a) => Term::succ(a.to_term()),
            Fo::Add(a, b) => Term::add(a.to_term(), b.to_term()),
            Fo::F(a) => Term::app(Term::var("f", ccnat_core::term::VarSort::Star), a.to_term()),
        }
    }

    fn children(&self) -> Vec<&Fo> {
        match self {
            Fo::Var(_) | Fo::Zero => vec![],
            Fo::Succ(a) | Fo::F(a) => vec![a],
            Fo::Add(a, b) => vec![a, b],
        }
    }
}

/// `x y z : nat`, `f : nat → nat`, and one `r`-bound equation per hypothesis.
pub fn context(hyps: &[(Fo, Fo)]) -> Context {
    let mut ctx = Context::new();
    for x in VARS {
        ctx.push(x, Annotation::U, Term::nat()).unwrap();
    }
    ctx.push("f", Annotation::U, Term::arrow(Term::nat(), Term::nat())).unwrap();
    for (i, (l, r)) in hyps.iter().enumerate() {
        ctx.push(format!("h{i}"), Annotation::R, Term::eq(Term::nat(), l.to_term(), r.to_term())).unwrap();
    }
    ctx
}

/// Subterm-closed universe with union-find.
struct Universe {
    terms: Vec<Fo>,
    index: HashMap<Fo, usize>,
    parent: Vec<usize>,
}

impl Universe {
    fn new<'a>(roots: impl IntoIterator<Item = &'a Fo>) -> Universe {
        let mut u = Universe { terms: Vec::new(), index: HashMap::new(), parent: Vec::new() };
        for r in roots {
            u.insert(r);
        }
        u
    }

    fn insert(&mut self, t: &Fo) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        for c in t.children() {
            self.insert(c);
        }
        let i = self.terms.len();
        self.terms.push(t.clone());
        self.index.insert(t.clone(), i);
        self.parent.push(i);
        i
    }

    fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[a.max(b)] = a.min(b);
        true
    }

    fn id(&self, t: &Fo) -> usize {
        self.index[t]
    }

    /// Merge syntactically congruent terms until nothing changes.
    fn close(&mut self) -> bool {
        let mut any = false;
        loop {
            let mut changed = false;
            for i in 0..self.terms.len() {
                for j in i + 1..self.terms.len() {
                    if self.find(i) == self.find(j) {
                        continue;
                    }
                    let congruent = match (&self.terms[i], &self.terms[j]) {
                        (Fo::Succ(a), Fo::Succ(b)) | (Fo::F(a), Fo::F(b)) => self.find(self.id(a)) == self.find(self.id(b)),
                        (Fo::Add(a, b), Fo::Add(c, d)) => {
                            self.find(self.id(a)) == self.find(self.id(c)) && self.find(self.id(b)) == self.find(self.id(d))
                        }
                        _ => false,
                    };
                    if congruent {
                        changed |= self.union(i, j);
                    }
                }
            }
            if !changed {
                return any;
            }
            any = true;
        }
    }

    /// Algebraic cap with one arithmetic variable per class of `f`-terms.
    fn cap(&self, t: &Fo) -> LinPoly {
        match t {
            Fo::Var(i) => LinPoly::atom(Atom::Var(VARS[*i].into())),
            Fo::Zero => LinPoly::constant(0),
            Fo::Succ(a) => self.cap(a).add_constant(1),
            Fo::Add(a, b) => self.cap(a).add(&self.cap(b)),
            Fo::F(_) => LinPoly::atom(Atom::Alien(self.find(self.id(t)) as u32)),
        }
    }

    fn class_equations(&self) -> Vec<LinEq> {
        (0..self.terms.len())
            .filter(|&i| self.find(i) != i)
            .map(|i| LinEq::new(self.cap(&self.terms[i]), self.cap(&self.terms[self.find(i)])))
            .collect()
    }
}

/// The ℕ-solutions of a system, as minimal solutions plus Hilbert basis.
struct Solutions {
    dense: Dense,
    minimal: Vec<Vec<i64>>,
    hilbert: Vec<Vec<i64>>,
}

impl Solutions {
    fn new(eqs: &[LinEq], extra: &[&LinEq]) -> Solutions {
        let dense = Dense::new(eqs, extra);
        let (minimal, hilbert) = irreducible(&dense);
        Solutions { dense, minimal, hilbert }
    }

    fn row(&self, e: &LinEq) -> (Vec<i64>, i64) {
        Dense::row(&self.dense.vars, e)
    }

    fn dot(a: &[i64], x: &[i64]) -> i64 {
        a.iter().zip(x).map(|(p, q)| p * q).sum()
    }

    fn entails(&self, goal: &LinEq) -> bool {
        let (g, k) = self.row(goal);
        self.minimal.is_empty()
            || self.minimal.iter().all(|m| Self::dot(&g, m) == k) && self.hilbert.iter().all(|h| Self::dot(&g, h) == 0)
    }

    /// Some solution violates every one of `diseqs`. On `m + cone(H)` each
    /// disequation is an affine function of the cone coefficients, and
    /// finitely many affine functions that are not identically zero have a
    /// common non-root in ℕᵏ.
    fn avoids(&self, diseqs: &[LinEq]) -> bool {
        let rows: Vec<_> = diseqs.iter().map(|d| self.row(d)).collect();
        self.minimal.iter().any(|m| {
            rows.iter().all(|(g, k)| Self::dot(g, m) != *k || self.hilbert.iter().any(|h| Self::dot(g, h) != 0))
        })
    }
}

/// Least fixpoint of hypotheses, congruence and arithmetic deduction,
/// restricted to the subterms of the problem. Whether `t` and `u` end up
/// in one class.
pub fn fixpoint(hyps: &[(Fo, Fo)], t: &Fo, u: &Fo) -> bool {
    let roots: Vec<&Fo> = hyps.iter().flat_map(|(l, r)| [l, r]).chain([t, u]).collect();
    let mut uni = Universe::new(roots);
    for (l, r) in hyps {
        uni.union(uni.id(l), uni.id(r));
    }
    loop {
        uni.close();
        let eqs: Vec<LinEq> = hyps
            .iter()
            .map(|(l, r)| LinEq::new(uni.cap(l), uni.cap(r)))
            .chain(uni.class_equations())
            .collect();
        let n = uni.terms.len();
        let reps: Vec<usize> = (0..n).filter(|&i| uni.find(i) == i).collect();
        let goals: Vec<(usize, usize, LinEq)> = reps
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| reps[a + 1..].iter().map(move |&j| (i, j)))
            .map(|(i, j)| (i, j, LinEq::new(uni.cap(&uni.terms[i]), uni.cap(&uni.terms[j]))))
            .collect();
        let sols = Solutions::new(&eqs, &goals.iter().map(|g| &g.2).collect::<Vec<_>>());
        let mut changed = false;
        for (i, j, g) in &goals {
            if sols.entails(g) {
                changed |= uni.union(*i, *j);
            }
        }
        if !changed {
            return uni.find(uni.id(t)) == uni.find(uni.id(u));
        }
    }
}

/// Whether `t = u` holds in every interpretation over ℕ (with `f` any
/// function ℕ → ℕ) satisfying the hypotheses.
pub fn semantic(hyps: &[(Fo, Fo)], t: &Fo, u: &Fo) -> bool {
    let roots: Vec<&Fo> = hyps.iter().flat_map(|(l, r)| [l, r]).chain([t, u]).collect();
    let uni = Universe::new(roots);
    let args: Vec<usize> = uni
        .terms
        .iter()
        .filter_map(|s| match s {
            Fo::F(a) => Some(uni.id(a)),
            _ => None,
        })
        .collect();
    let mut pairs = Vec::new();
    for (k, &a) in args.iter().enumerate() {
        for &b in &args[k + 1..] {
            if a != b {
                pairs.push((a, b));
            }
        }
    }
    !countermodel(&uni, hyps, t, u, &pairs, &mut Vec::new(), &mut Vec::new())
}

/// Search the arrangements of the `f`-arguments for a model of the
/// hypotheses in which `t ≠ u`.
fn countermodel(
    base: &Universe,
    hyps: &[(Fo, Fo)],
    t: &Fo,
    u: &Fo,
    pairs: &[(usize, usize)],
    same: &mut Vec<(usize, usize)>,
    apart: &mut Vec<(usize, usize)>,
) -> bool {
    let mut uni = Universe { terms: base.terms.clone(), index: base.index.clone(), parent: base.parent.clone() };
    for (l, r) in hyps {
        uni.union(uni.id(l), uni.id(r));
    }
    for &(a, b) in same.iter() {
        uni.union(a, b);
    }
    uni.close();
    let (ti, ui) = (uni.id(t), uni.id(u));
    if uni.find(ti) == uni.find(ui) || apart.iter().any(|&(a, b)| uni.find(a) == uni.find(b)) {
        return false;
    }
    let eqs: Vec<LinEq> = hyps
        .iter()
        .map(|(l, r)| LinEq::new(uni.cap(l), uni.cap(r)))
        .chain(uni.class_equations())
        .collect();
    let diseqs: Vec<LinEq> = apart
        .iter()
        .map(|&(a, b)| (a, b))
        .chain([(ti, ui)])
        .map(|(a, b)| LinEq::new(uni.cap(&uni.terms[a]), uni.cap(&uni.terms[b])))
        .collect();
    let sols = Solutions::new(&eqs, &diseqs.iter().collect::<Vec<_>>());
    if !sols.avoids(&diseqs) {
        return false;
    }
    let open = pairs.iter().find(|&&(a, b)| {
        uni.find(a) != uni.find(b) && !apart.iter().any(|&(c, d)| {
            let (c, d) = (uni.find(c), uni.find(d));
            (c, d) == (uni.find(a), uni.find(b)) || (d, c) == (uni.find(a), uni.find(b))
        })
    });
    let Some(&pair) = open else { return true };
    same.push(pair);
    let found = countermodel(base, hyps, t, u, pairs, same, apart);
    same.pop();
    if found {
        return true;
    }
    apart.push(pair);
    let found = countermodel(base, hyps, t, u, pairs, same, apart);
    apart.pop();
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> Fo {
        Fo::Var(i)
    }
    fn n(k: usize) -> Fo {
        (0..k).fold(Fo::Zero, |a, _| Fo::Succ(Box::new(a)))
    }
    fn add(a: Fo, b: Fo) -> Fo {
        Fo::Add(Box::new(a), Box::new(b))
    }
    fn f(a: Fo) -> Fo {
        Fo::F(Box::new(a))
    }

    #[test]
    fn commutativity_and_separation() {
        assert!(fixpoint(&[], &add(v(0), v(1)), &add(v(1), v(0))));
        assert!(semantic(&[], &add(v(0), v(1)), &add(v(1), v(0))));
        assert!(!fixpoint(&[], &n(0), &n(1)));
        assert!(!semantic(&[], &n(0), &n(1)));
        assert!(!semantic(&[], &f(v(0)), &f(v(1))));
    }

    #[test]
    fn congruence_through_arithmetic() {
        let hyps = [(add(v(0), n(1)), add(v(1), n(1)))];
        assert!(fixpoint(&hyps, &f(v(0)), &f(v(1))));
        assert!(semantic(&hyps, &f(v(0)), &f(v(1))));
    }

    #[test]
    fn case_splits_go_beyond_the_fixpoint() {
        // x + y = 1 forces one of them to be 0, so f x + f y covers both
        // f 0 + f 1 orderings only by cases.
        let hyps = [(add(v(0), v(1)), n(1))];
        let t = add(f(v(0)), f(v(1)));
        let u = add(f(n(0)), f(n(1)));
        assert!(semantic(&hyps, &t, &u));
        assert!(!fixpoint(&hyps, &t, &u));
    }

    #[test]
    fn inconsistent_hypotheses_equate_everything() {
        let hyps = [(add(v(0), n(2)), n(1))];
        assert!(fixpoint(&hyps, &f(v(2)), &n(7)));
        assert!(semantic(&hyps, &f(v(2)), &n(7)));
    }
}
