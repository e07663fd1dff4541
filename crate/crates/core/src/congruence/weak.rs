//! Weak conversion: arithmetic is consulted only on the hypotheses as
//! written, with aliens compared syntactically, and the result is closed
//! under congruence. It never feeds merged classes back into arithmetic,
//! so it decides a sub-relation of full conversion.

use std::collections::HashMap;

use crate::arith::{self, cap, Atom, Entailment, LinEq, LinPoly, Limits, Model, Search};
use crate::reduce::{normalize, Status};
use crate::term::{Class, Context, Term, TermKind};

use super::{extract_hypotheses, ConvError};

pub fn weak_convertible(ctx: &Context, t: &Term, u: &Term, fuel: u64, limits: Limits) -> Result<bool, ConvError> {
    if !t.is_locally_closed() || !u.is_locally_closed() {
        return Err(ConvError::NotClosed);
    }
    let mut w = Weak { fuel, limits, aliens: HashMap::new(), eqs: Vec::new(), models: Vec::new(), refuted: false, memo: HashMap::new(), fresh: 0 };
    for h in extract_hypotheses(ctx, fuel) {
        let (l, r) = (w.cap(&h.lhs), w.cap(&h.rhs));
        w.eqs.push(LinEq::new(l, r));
    }
    match arith::solve(&w.eqs, limits) {
        Ok(Search::Sat(m)) => w.models.push(m),
        Ok(Search::Refuted(_)) => w.refuted = true,
        Err(_) => {}
    }
    let a = w.nf(t)?;
    let b = w.nf(u)?;
    w.equal(&a, &b)
}

struct Weak {
    fuel: u64,
    limits: Limits,
    aliens: HashMap<Term, u32>,
    eqs: Vec<LinEq>,
    models: Vec<Model>,
    refuted: bool,
    memo: HashMap<(Term, Term), bool>,
    fresh: u64,
}

impl Weak {
    fn nf(&self, t: &Term) -> Result<Term, ConvError> {
        let r = normalize(t, self.fuel);
        match r.status {
            Status::NormalForm => Ok(r.term),
            Status::FuelExhausted => Err(ConvError::Fuel(r.steps)),
        }
    }

    fn cap(&mut self, t: &Term) -> LinPoly {
        let aliens = &mut self.aliens;
        cap(t, &mut |a: &Term| {
            let n = aliens.len() as u32;
            Atom::Alien(*aliens.entry(a.clone()).or_insert(n))
        })
    }

    fn arith_equal(&mut self, a: &Term, b: &Term) -> bool {
        if self.refuted {
            return true;
        }
        let goal = LinEq::new(self.cap(a), self.cap(b));
        if goal.is_trivial() {
            return true;
        }
        let value = |m: &Model, x: &Atom| m.get(x).cloned().unwrap_or_else(|| distinct(x));
        if self.models.iter().any(|m| !goal.holds(&|x| value(m, x))) {
            return false;
        }
        match arith::entails(&self.eqs, &goal, self.limits) {
            Ok(Entailment::Entailed(_)) => true,
            Ok(Entailment::Countermodel(m)) => {
                self.models.push(m);
                false
            }
            Err(_) => false,
        }
    }

    fn equal(&mut self, a: &Term, b: &Term) -> Result<bool, ConvError> {
        if a == b {
            return Ok(true);
        }
        let key = (a.clone(), b.clone());
        if let Some(&r) = self.memo.get(&key) {
            return Ok(r);
        }
        // Provisional answer for cycles through binder bodies.
        self.memo.insert(key.clone(), false);
        let mut terms = a.closed_subterms();
        for s in b.closed_subterms() {
            if !terms.contains(&s) {
                terms.push(s);
            }
        }
        let index: HashMap<Term, usize> = terms.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let mut uf: Vec<usize> = (0..terms.len()).collect();
        fn find(uf: &mut [usize], mut i: usize) -> usize {
            while uf[i] != i {
                uf[i] = uf[uf[i]];
                i = uf[i];
            }
            i
        }
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].class() == Class::O && terms[j].class() == Class::O && self.arith_equal(&terms[i], &terms[j]) {
                    let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
                    uf[ri] = rj;
                }
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..terms.len() {
                for j in i + 1..terms.len() {
                    if find(&mut uf, i) == find(&mut uf, j) {
                        continue;
                    }
                    let merge = match (terms[i].kind(), terms[j].kind()) {
                        (TermKind::Lam(x), TermKind::Lam(y)) | (TermKind::Prod(x), TermKind::Prod(y)) => {
                            if x.annot != y.annot || x.var_sort != y.var_sort {
                                false
                            } else {
                                let (dx, dy) = (index[&x.domain], index[&y.domain]);
                                if find(&mut uf, dx) != find(&mut uf, dy) {
                                    false
                                } else {
                                    self.fresh += 1;
                                    let v = Term::var(format!("{}#w{}", x.name, self.fresh), x.var_sort);
                                    self.equal(&x.body.instantiate(&v), &y.body.instantiate(&v))?
                                }
                            }
                        }
                        _ => {
                            let (ci, cj) = (terms[i].children(), terms[j].children());
                            let same_head = std::mem::discriminant(terms[i].kind()) == std::mem::discriminant(terms[j].kind())
                                && matches!(terms[i].kind(), TermKind::App(..) | TermKind::Rec(..) | TermKind::EqIntro(_));
                            same_head
                                && ci.iter().zip(&cj).all(|(p, q)| {
                                    let (p, q) = (index[*p], index[*q]);
                                    find(&mut uf, p) == find(&mut uf, q)
                                })
                        }
                    };
                    if merge {
                        let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
                        uf[ri] = rj;
                        changed = true;
                    }
                }
            }
        }
        let r = find(&mut uf, index[a]) == find(&mut uf, index[b]);
        self.memo.insert(key, r);
        Ok(r)
    }
}

fn distinct(a: &Atom) -> num_bigint::BigInt {
    let k = match a {
        Atom::Alien(k) => *k as u64,
        _ => 7,
    };
    num_bigint::BigInt::from(1_000_003u64 * (k + 2) + 11)
}
