//! Certificate replay.
//!
//! Every step is checked by a local computation: named contractions,
//! counted head β-steps, structural comparison, or arithmetic witness
//! replay. Nothing here searches.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::{context_fingerprint, Certificate, StepKind};
use crate::arith::witness::check_entailment;
use crate::arith::{cap, Atom, LinEq};
use crate::reduce::{contract_at, equality_shape, whnf_beta, MAX_TERM_SIZE};
use crate::term::{Annotation, Binder, Class, Context, Name, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct VerifyError {
    /// Offending step, or the step count for errors about the whole
    /// certificate.
    pub step: usize,
    pub reason: String,
}

pub fn verify(ctx: &Context, cert: &Certificate, lhs: &Term, rhs: &Term) -> bool {
    check(ctx, cert, lhs, rhs).is_ok()
}

struct ScopeCtx {
    bindings: Vec<(Name, Annotation, Term)>,
}

impl ScopeCtx {
    fn binds(&self, x: &str) -> bool {
        self.bindings.iter().any(|(n, _, _)| &**n == x)
    }

    fn covers(&self, t: &Term) -> bool {
        t.is_locally_closed() && t.free_vars().iter().all(|x| self.binds(x))
    }
}

pub fn check(ctx: &Context, cert: &Certificate, lhs: &Term, rhs: &Term) -> Result<(), VerifyError> {
    let whole = |reason: &str| VerifyError { step: cert.steps.len(), reason: reason.to_string() };
    if cert.context != context_fingerprint(ctx) {
        return Err(whole("context fingerprint does not match"));
    }
    if (&cert.lhs, &cert.rhs) != (lhs, rhs) {
        return Err(whole("certificate is for a different goal"));
    }
    let mut scopes = vec![ScopeCtx {
        bindings: ctx.bindings().iter().map(|b| (b.name.clone(), b.annot, b.ty.clone())).collect(),
    }];
    if !scopes[0].covers(lhs) || !scopes[0].covers(rhs) {
        return Err(whole("goal mentions variables outside the context"));
    }
    for (i, s) in cert.scopes.iter().enumerate() {
        let parent = scopes.get(s.parent).filter(|_| s.parent <= i).ok_or_else(|| whole("scope has no earlier parent"))?;
        if parent.binds(&s.var) || !parent.covers(&s.domain) {
            return Err(whole("scope variable is not fresh or its type is not closed"));
        }
        let mut bindings = parent.bindings.clone();
        bindings.push((s.var.clone(), s.annot, s.domain.clone()));
        scopes.push(ScopeCtx { bindings });
    }

    let mut concl: Vec<(Term, Term)> = Vec::with_capacity(cert.steps.len());
    for (i, step) in cert.steps.iter().enumerate() {
        let fail = |reason: String| VerifyError { step: i, reason };
        let sc = scopes.get(step.scope).ok_or_else(|| fail("unknown scope".into()))?;
        let get = |j: usize| -> Result<&(Term, Term), VerifyError> {
            if j >= i {
                return Err(fail(format!("reference to step {j} is not backwards")));
            }
            if cert.steps[j].scope != step.scope {
                return Err(fail(format!("step {j} lives in another scope")));
            }
            Ok(&concl[j])
        };
        let closed = |ts: &[&Term]| -> Result<(), VerifyError> {
            match ts.iter().all(|t| sc.covers(t)) {
                true => Ok(()),
                false => Err(fail("term is not closed in the step's scope".into())),
            }
        };
        let c = match &step.kind {
            StepKind::BetaIota { from, to, paths } => {
                closed(&[from, to])?;
                let mut cur = from.clone();
                for p in paths {
                    cur = contract_at(&cur, p).ok_or_else(|| fail(format!("no redex at path {p:?}")))?;
                    if cur.size() > MAX_TERM_SIZE {
                        return Err(fail("reduction exceeds the term size limit".into()));
                    }
                }
                if &cur != to {
                    return Err(fail("contractions do not reach the stated term".into()));
                }
                (from.clone(), to.clone())
            }
            StepKind::Hyp { index, lhs, rhs, beta_steps } => {
                let (_, annot, ty) = sc.bindings.get(*index).ok_or_else(|| fail("binding index out of range".into()))?;
                if *annot != Annotation::R {
                    return Err(fail("hypothesis binding is not r-annotated".into()));
                }
                let (w, n) = whnf_beta(ty, *beta_steps);
                match equality_shape(&w) {
                    Some((l, r, _)) if n == *beta_steps && (&l, &r) == (lhs, rhs) => (l, r),
                    _ => return Err(fail("binding type does not expose the stated equality".into())),
                }
            }
            StepKind::Sym(j) => {
                let (a, b) = get(*j)?;
                (b.clone(), a.clone())
            }
            StepKind::Trans(j, k) => {
                let ((a, b), (c, d)) = (get(*j)?, get(*k)?);
                if b != c {
                    return Err(fail("transitivity through different terms".into()));
                }
                (a.clone(), d.clone())
            }
            StepKind::Congr(j, k) => {
                let ((f, g), (a, b)) = (get(*j)?, get(*k)?);
                (Term::app(f.clone(), a.clone()), Term::app(g.clone(), b.clone()))
            }
            StepKind::RecCongr(ids) => {
                let mut l = Vec::with_capacity(4);
                let mut r = Vec::with_capacity(4);
                for &j in ids {
                    let (a, b) = get(j)?;
                    l.push(a.clone());
                    r.push(b.clone());
                }
                (
                    Term::rec(l[0].clone(), l[1].clone(), l[2].clone(), l[3].clone()),
                    Term::rec(r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone()),
                )
            }
            StepKind::EqCongr(j) => {
                let (a, b) = get(*j)?;
                (Term::eq_intro(a.clone()), Term::eq_intro(b.clone()))
            }
            StepKind::Binder { prod, domain, body } => {
                let (d1, d2) = get(*domain)?;
                if *body >= i {
                    return Err(fail(format!("reference to step {body} is not backwards")));
                }
                let inner_id = cert.steps[*body].scope;
                let inner = inner_id.checked_sub(1).and_then(|k| cert.scopes.get(k));
                let inner = inner
                    .filter(|s| s.parent == step.scope && &s.domain == d1)
                    .ok_or_else(|| fail("body is not proven under this binder's domain".into()))?;
                let (b1, b2) = &concl[*body];
                let build = |dom: &Term, b: &Term| {
                    let binder = Binder {
                        name: inner.var.clone(),
                        annot: inner.annot,
                        var_sort: inner.var_sort,
                        domain: dom.clone(),
                        body: b.abstract_var(&inner.var),
                    };
                    if *prod {
                        Term::prod(binder)
                    } else {
                        Term::lam(binder)
                    }
                };
                (build(d1, b1), build(d2, b2))
            }
            StepKind::Arith { premises, aliens, lhs, rhs, witness } => {
                closed(&[lhs, rhs])?;
                let mut table: HashMap<&Term, u32> = HashMap::new();
                let mut reps: BTreeMap<u32, &Term> = BTreeMap::new();
                for a in aliens {
                    closed(&[&a.term])?;
                    if table.insert(&a.term, a.var).is_some() {
                        return Err(fail("alien term bound twice".into()));
                    }
                    match (reps.get(&a.var), a.link) {
                        (None, None) => {
                            reps.insert(a.var, &a.term);
                        }
                        (Some(rep), Some(j)) => {
                            let (x, y) = get(j)?;
                            if (x, y) != (&a.term, *rep) {
                                return Err(fail("alien link does not join the term to its representative".into()));
                            }
                        }
                        _ => return Err(fail("alien entry has a misplaced link".into())),
                    }
                }
                let mut missing = false;
                let mut abstract_cap = |t: &Term| {
                    cap(t, &mut |a: &Term| match table.get(a) {
                        Some(v) => Atom::Alien(*v),
                        None => {
                            missing = true;
                            Atom::Alien(u32::MAX)
                        }
                    })
                };
                let mut eqs = Vec::with_capacity(premises.len());
                for &j in premises {
                    let (a, b) = get(j)?;
                    if a.class() != Class::O || b.class() != Class::O {
                        return Err(fail(format!("premise {j} is not an object equation")));
                    }
                    eqs.push(LinEq::new(abstract_cap(a), abstract_cap(b)));
                }
                if lhs.class() != Class::O || rhs.class() != Class::O {
                    return Err(fail("conclusion is not an object equation".into()));
                }
                let goal = LinEq::new(abstract_cap(lhs), abstract_cap(rhs));
                if missing {
                    return Err(fail("an alien subterm has no table entry".into()));
                }
                if !check_entailment(&eqs, &goal, witness) {
                    return Err(fail("arithmetic witness does not replay".into()));
                }
                (lhs.clone(), rhs.clone())
            }
            StepKind::Collapse { absurd, lhs, rhs } => {
                closed(&[lhs, rhs])?;
                let (a, b) = get(*absurd)?;
                if (a, b) != (&Term::zero(), &Term::numeral(1)) {
                    return Err(fail("collapse needs a step concluding 0 ≃ S 0".into()));
                }
                if lhs.class() != Class::O || rhs.class() != Class::O {
                    return Err(fail("collapse applies to objects only".into()));
                }
                (lhs.clone(), rhs.clone())
            }
        };
        concl.push(c);
    }
    match (cert.steps.last(), concl.last()) {
        (Some(s), Some((a, b))) if s.scope == 0 && (a, b) == (lhs, rhs) => Ok(()),
        _ => Err(whole("final step does not conclude the goal")),
    }
}
