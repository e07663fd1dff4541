//! Flattening a derivation into certificate steps.

use std::collections::HashMap;
use std::sync::Arc;

use super::{context_fingerprint, AlienBinding, Certificate, Scope, Step, StepKind};
use crate::congruence::{Proof, Rule};
use crate::term::{Context, Name};

/// Certificate for the derivation `proof` of `proof.lhs ≃_Γ proof.rhs`.
pub fn emit(ctx: &Context, proof: &Arc<Proof>) -> Certificate {
    let mut e = Emitter { ctx, scopes: Vec::new(), steps: Vec::new(), done: HashMap::new(), scope_of: HashMap::new() };
    e.step(proof, 0);
    Certificate {
        context: context_fingerprint(ctx),
        lhs: proof.lhs.clone(),
        rhs: proof.rhs.clone(),
        scopes: e.scopes,
        steps: e.steps,
    }
}

struct Emitter<'a> {
    ctx: &'a Context,
    scopes: Vec<Scope>,
    steps: Vec<Step>,
    done: HashMap<(*const Proof, usize), usize>,
    scope_of: HashMap<(usize, Name), usize>,
}

impl Emitter<'_> {
    /// Names bound in `scope`, outermost first.
    fn names(&self, mut scope: usize) -> Vec<Name> {
        let mut chain = Vec::new();
        while scope > 0 {
            let s = &self.scopes[scope - 1];
            chain.push(s.var.clone());
            scope = s.parent;
        }
        let mut names: Vec<Name> = self.ctx.bindings().iter().map(|b| b.name.clone()).collect();
        names.extend(chain.into_iter().rev());
        names
    }

    fn push(&mut self, scope: usize, kind: StepKind) -> usize {
        self.steps.push(Step { scope, kind });
        self.steps.len() - 1
    }

    fn step(&mut self, p: &Arc<Proof>, scope: usize) -> usize {
        let key = (Arc::as_ptr(p), scope);
        if let Some(&id) = self.done.get(&key) {
            return id;
        }
        let kind = match &p.rule {
            Rule::BetaIota { paths } => StepKind::BetaIota { from: p.lhs.clone(), to: p.rhs.clone(), paths: paths.clone() },
            Rule::Hyp { name, beta_steps } => {
                let index = self.names(scope).iter().rposition(|n| n == name).expect("hypothesis is bound");
                StepKind::Hyp { index, lhs: p.lhs.clone(), rhs: p.rhs.clone(), beta_steps: *beta_steps }
            }
            Rule::Sym(q) => StepKind::Sym(self.step(q, scope)),
            Rule::Trans(a, b) => {
                let a = self.step(a, scope);
                StepKind::Trans(a, self.step(b, scope))
            }
            Rule::App(f, a) => {
                let f = self.step(f, scope);
                StepKind::Congr(f, self.step(a, scope))
            }
            Rule::Rec(ps) => {
                let mut ids = [0; 4];
                for (k, q) in ps.iter().enumerate() {
                    ids[k] = self.step(q, scope);
                }
                StepKind::RecCongr(ids)
            }
            Rule::EqIntro(q) => StepKind::EqCongr(self.step(q, scope)),
            Rule::Binder { prod, annot, var_sort, var, domain, body } => {
                let d = self.step(domain, scope);
                let inner = match self.scope_of.get(&(scope, var.clone())) {
                    Some(&s) => s,
                    None => {
                        self.scopes.push(Scope {
                            parent: scope,
                            var: var.clone(),
                            annot: *annot,
                            var_sort: *var_sort,
                            domain: domain.lhs.clone(),
                        });
                        self.scope_of.insert((scope, var.clone()), self.scopes.len());
                        self.scopes.len()
                    }
                };
                let b = self.step(body, inner);
                StepKind::Binder { prod: *prod, domain: d, body: b }
            }
            Rule::Ded { premises, aliens, witness } => {
                let premises = premises.iter().map(|q| self.step(q, scope)).collect();
                let aliens = aliens
                    .iter()
                    .map(|a| AlienBinding {
                        var: a.var,
                        term: a.term.clone(),
                        link: a.link.as_ref().map(|q| self.step(q, scope)),
                    })
                    .collect();
                StepKind::Arith { premises, aliens, lhs: p.lhs.clone(), rhs: p.rhs.clone(), witness: witness.clone() }
            }
            Rule::Collapse(q) => StepKind::Collapse { absurd: self.step(q, scope), lhs: p.lhs.clone(), rhs: p.rhs.clone() },
        };
        let id = self.push(scope, kind);
        self.done.insert(key, id);
        id
    }
}
