//! β- and ι-reduction.
//!
//! `normalize` is a normal-order normalizer that records the path of every
//! contraction, so a certificate can replay the exact same sequence with
//! `contract_at`. The stepwise `step` function exists for strategy
//! comparisons.

use crate::term::{Class, Term, TermKind};

pub const DEFAULT_FUEL: u64 = 100_000;
/// Terms growing past this many nodes are treated like fuel exhaustion.
pub const MAX_TERM_SIZE: u32 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    NormalForm,
    FuelExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub term: Term,
    pub steps: u64,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RedexKind {
    Beta,
    Iota,
}

/// Which redex, if any, sits at the root of `t`.
pub fn redex_kind(t: &Term) -> Option<RedexKind> {
    match t.kind() {
        TermKind::App(f, _) if matches!(f.kind(), TermKind::Lam(_)) => Some(RedexKind::Beta),
        TermKind::Rec(s, _, z, st) => {
            let constructor = matches!(s.kind(), TermKind::Zero) || s.as_succ().is_some();
            (constructor && z.class() == Class::O && st.class() == Class::O).then_some(RedexKind::Iota)
        }
        _ => None,
    }
}

/// Contract the redex at the root of `t`.
pub fn contract(t: &Term) -> Option<Term> {
    match (redex_kind(t)?, t.kind()) {
        (RedexKind::Beta, TermKind::App(f, a)) => match f.kind() {
            TermKind::Lam(b) => Some(b.body.instantiate(a)),
            _ => None,
        },
        (RedexKind::Iota, TermKind::Rec(s, m, z, st)) => match s.as_succ() {
            None => Some(z.clone()),
            Some(n) => Some(Term::app(
                Term::app(st.clone(), n.clone()),
                Term::rec(n.clone(), m.clone(), z.clone(), st.clone()),
            )),
        },
        _ => None,
    }
}

/// Contract the redex found at `path`, rebuilding the spine above it.
pub fn contract_at(t: &Term, path: &[u8]) -> Option<Term> {
    match path.split_first() {
        None => contract(t),
        Some((&i, rest)) => {
            let mut ch: Vec<Term> = t.children().into_iter().cloned().collect();
            let c = ch.get(i as usize)?;
            let new = contract_at(c, rest)?;
            ch[i as usize] = new;
            Some(t.with_children(ch))
        }
    }
}

fn find_redex(t: &Term, strategy: Strategy, kinds: &[RedexKind], path: &mut Vec<u8>) -> bool {
    let here = redex_kind(t).is_some_and(|k| kinds.contains(&k));
    if strategy == Strategy::LeftmostOutermost && here {
        return true;
    }
    let n = t.children().len();
    let order: Vec<usize> = match strategy {
        Strategy::LeftmostOutermost => (0..n).collect(),
        Strategy::RightmostInnermost => (0..n).rev().collect(),
    };
    for i in order {
        path.push(i as u8);
        if find_redex(t.children()[i], strategy, kinds, path) {
            return true;
        }
        path.pop();
    }
    here
}

/// One contraction of the kinds given, chosen by `strategy`.
pub fn step_with(t: &Term, strategy: Strategy, kinds: &[RedexKind]) -> Option<(Term, Vec<u8>)> {
    let mut path = Vec::new();
    if !find_redex(t, strategy, kinds, &mut path) {
        return None;
    }
    let r = contract_at(t, &path)?;
    Some((r, path))
}

pub fn step(t: &Term, strategy: Strategy) -> Option<(Term, Vec<u8>)> {
    step_with(t, strategy, &[RedexKind::Beta, RedexKind::Iota])
}

/// One leftmost-outermost β-contraction.
pub fn beta_step(t: &Term) -> Option<Term> {
    step_with(t, Strategy::LeftmostOutermost, &[RedexKind::Beta]).map(|(r, _)| r)
}

/// One leftmost-outermost ι-contraction.
pub fn iota_step(t: &Term) -> Option<Term> {
    step_with(t, Strategy::LeftmostOutermost, &[RedexKind::Iota]).map(|(r, _)| r)
}

/// Normalize by repeated single steps of the given strategy.
pub fn normalize_stepwise(t: &Term, fuel: u64, strategy: Strategy) -> ReductionResult {
    let mut cur = t.clone();
    let mut steps = 0;
    while let Some((next, _)) = step(&cur, strategy) {
        if steps >= fuel || next.size() > MAX_TERM_SIZE {
            return ReductionResult { term: cur, steps, status: Status::FuelExhausted };
        }
        cur = next;
        steps += 1;
    }
    ReductionResult { term: cur, steps, status: Status::NormalForm }
}

struct Exhausted;

struct Normalizer {
    fuel: u64,
    steps: u64,
    trace: Option<Vec<Vec<u8>>>,
}

impl Normalizer {
    fn fire(&mut self, t: &Term, path: &[u8]) -> Result<Term, Exhausted> {
        if self.steps >= self.fuel {
            return Err(Exhausted);
        }
        let r = contract(t).expect("fire on a redex");
        if r.size() > MAX_TERM_SIZE {
            return Err(Exhausted);
        }
        self.steps += 1;
        if let Some(tr) = &mut self.trace {
            tr.push(path.to_vec());
        }
        Ok(r)
    }

    fn whnf(&mut self, t: Term, path: &mut Vec<u8>) -> Result<Term, Exhausted> {
        let mut t = t;
        loop {
            let next = match t.kind() {
                TermKind::App(f, a) => {
                    path.push(0);
                    let f2 = self.whnf(f.clone(), path);
                    path.pop();
                    let f2 = f2?;
                    let t2 = if f2.ptr_eq(f) { t.clone() } else { Term::app(f2, a.clone()) };
                    if redex_kind(&t2).is_some() {
                        self.fire(&t2, path)?
                    } else {
                        return Ok(t2);
                    }
                }
                TermKind::Rec(s, m, z, st) => {
                    path.push(0);
                    let s2 = self.whnf(s.clone(), path);
                    path.pop();
                    let s2 = s2?;
                    let t2 = if s2.ptr_eq(s) {
                        t.clone()
                    } else {
                        Term::rec(s2, m.clone(), z.clone(), st.clone())
                    };
                    if redex_kind(&t2).is_some() {
                        self.fire(&t2, path)?
                    } else {
                        return Ok(t2);
                    }
                }
                _ => return Ok(t),
            };
            t = next;
        }
    }

    fn nf(&mut self, t: Term, path: &mut Vec<u8>) -> Result<Term, Exhausted> {
        let mut t = t;
        loop {
            t = self.whnf(t, path)?;
            let children: Vec<Term> = t.children().into_iter().cloned().collect();
            let mut changed = false;
            let mut new = Vec::with_capacity(children.len());
            for (i, c) in children.iter().enumerate() {
                path.push(i as u8);
                let r = self.nf(c.clone(), path);
                path.pop();
                let r = r?;
                changed |= !r.ptr_eq(c);
                new.push(r);
            }
            if changed {
                t = t.with_children(new);
            }
            if redex_kind(&t).is_none() {
                return Ok(t);
            }
        }
    }
}

fn run(t: &Term, fuel: u64, trace: bool) -> (ReductionResult, Vec<Vec<u8>>) {
    let mut n = Normalizer { fuel, steps: 0, trace: trace.then(Vec::new) };
    let r = n.nf(t.clone(), &mut Vec::new());
    let paths = n.trace.take().unwrap_or_default();
    match r {
        Ok(term) => (ReductionResult { term, steps: n.steps, status: Status::NormalForm }, paths),
        Err(Exhausted) => (
            ReductionResult { term: t.clone(), steps: n.steps, status: Status::FuelExhausted },
            paths,
        ),
    }
}

/// βι-normal form by normal-order reduction, bounded by `fuel` contractions.
pub fn normalize(t: &Term, fuel: u64) -> ReductionResult {
    run(t, fuel, false).0
}

/// As `normalize`, also returning the path of each contraction in order.
pub fn normalize_traced(t: &Term, fuel: u64) -> (ReductionResult, Vec<Vec<u8>>) {
    run(t, fuel, true)
}

/// Weak-head β-reduction of the application spine, at most `max_steps`
/// contractions. Deterministic, so replaying with the returned count
/// reproduces the same term.
pub fn whnf_beta(t: &Term, max_steps: u64) -> (Term, u64) {
    let mut cur = t.clone();
    let mut steps = 0;
    while steps < max_steps {
        let (h, args) = cur.spine();
        if !matches!(h.kind(), TermKind::Lam(_)) || args.is_empty() {
            break;
        }
        let path = vec![0u8; args.len() - 1];
        match contract_at(&cur, &path) {
            Some(next) if next.size() <= MAX_TERM_SIZE => cur = next,
            _ => break,
        }
        steps += 1;
    }
    (cur, steps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExposedEquality {
    pub lhs: Term,
    pub rhs: Term,
    pub carrier: Term,
    pub beta_steps: u64,
}

/// Match `t1 ≐_T t2` (with both sides objects) on a term that is already in
/// the right shape.
pub fn equality_shape(t: &Term) -> Option<(Term, Term, Term)> {
    let (ty, a, b) = t.as_eq()?;
    (a.class() == Class::O && b.class() == Class::O).then(|| (a.clone(), b.clone(), ty.clone()))
}

/// Expose an object equality by weak-head β-reduction only.
pub fn beta_reduce_to_equality(t: &Term, fuel: u64) -> Option<ExposedEquality> {
    let (w, beta_steps) = whnf_beta(t, fuel);
    let (lhs, rhs, carrier) = equality_shape(&w)?;
    Some(ExposedEquality { lhs, rhs, carrier, beta_steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::term::{Annotation, Context};

    fn ctx() -> Context {
        let mut g = Context::new();
        g.push("x", Annotation::U, Term::nat()).unwrap();
        g.push("Q", Annotation::U, Term::arrow(Term::nat(), Term::star())).unwrap();
        g.push("t0", Annotation::U, Term::nat()).unwrap();
        g.push("tS", Annotation::U, Term::arrow(Term::nat(), Term::arrow(Term::nat(), Term::nat())))
            .unwrap();
        g
    }
    fn p(s: &str) -> Term {
        parse_term(&ctx(), s).unwrap()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_step(&p("(app (lam x u nat x) 0)")), Some(p("0")));
        assert_eq!(beta_step(&p("0")), None);
        assert_eq!(beta_step(&p("(app (lam y u nat (+ y y)) (S 0))")), Some(p("(+ (S 0) (S 0))")));
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota_step(&p("(rec 0 Q t0 tS)")), Some(p("t0")));
        assert_eq!(iota_step(&p("(rec (S 0) Q t0 tS)")), Some(p("(app tS 0 (rec 0 Q t0 tS))")));
        assert_eq!(iota_step(&p("(rec x Q t0 tS)")), None);
        // branch outside the object class blocks the rule
        assert_eq!(iota_step(&p("(rec 0 Q nat tS)")), None);
    }

    #[test]
    fn normalize_examples() {
        let r = normalize(&p("(app (lam y u nat (S y)) 0)"), 100);
        assert_eq!((r.term, r.status), (p("1"), Status::NormalForm));
        // Rec(2, Q){0, λn λp. S p}: ι, β, β, ι, β, β, ι
        let r = normalize(&p("(rec 2 Q 0 (lam n u nat (lam q u (app Q n) (S q))))"), 100);
        assert_eq!(r.term, p("2"));
        assert_eq!(r.status, Status::NormalForm);
        assert_eq!(r.steps, 7);
        let omega = p("(app (lam z u nat (app z z)) (lam z u nat (app z z)))");
        assert_eq!(normalize(&omega, 10).status, Status::FuelExhausted);
    }

    #[test]
    fn traced_paths_replay() {
        let t = p("(app (lam a u nat (rec a Q 0 (lam n u nat (lam q u nat (S q))))) (+ 1 (S 1)))");
        let (r, paths) = normalize_traced(&t, 1000);
        let mut cur = t.clone();
        for path in &paths {
            cur = contract_at(&cur, path).unwrap();
        }
        assert_eq!(cur, r.term);
        assert_eq!(paths.len() as u64, r.steps);
    }

    #[test]
    fn equality_exposure() {
        let e = beta_reduce_to_equality(&p("(app (lam z u nat (eq nat z 0)) (S 0))"), 10).unwrap();
        assert_eq!((e.lhs, e.rhs, e.carrier, e.beta_steps), (p("(S 0)"), p("0"), p("nat"), 1));
        let e = beta_reduce_to_equality(&p("(eq nat x t0)"), 10).unwrap();
        assert_eq!((e.lhs, e.rhs, e.beta_steps), (p("x"), p("t0"), 0));
        assert!(beta_reduce_to_equality(&p("nat"), 10).is_none());
    }
}
