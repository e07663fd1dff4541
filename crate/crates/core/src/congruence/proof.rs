//! Derivations of `t ≃_Γ u`, produced by explaining a saturation state.
//!
//! Each node stores its conclusion, so sharing sub-derivations through `Arc`
//! never forces recomputation.

use std::sync::Arc;

use crate::arith::EntailmentWitness;
use crate::term::{Annotation, Binder, Name, Term, VarSort};

#[derive(Clone, Debug)]
pub struct Proof {
    pub lhs: Term,
    pub rhs: Term,
    pub rule: Rule,
}

/// One entry of the abstraction table used by a deduction: the alien `term`
/// is read as `Atom::Alien(var)`. The first entry of each variable is its
/// representative; later entries carry a derivation `term ≃ representative`.
#[derive(Clone, Debug)]
pub struct AlienEntry {
    pub var: u32,
    pub term: Term,
    pub link: Option<Arc<Proof>>,
}

#[derive(Clone, Debug)]
pub enum Rule {
    /// `lhs →*βι rhs`, contracting the redexes at `paths` in order. With no
    /// paths this is reflexivity.
    BetaIota { paths: Vec<Vec<u8>> },
    /// The context binding `name` weak-head β-reduces in `beta_steps` steps
    /// to `lhs ≐ rhs`.
    Hyp { name: Name, beta_steps: u64 },
    Sym(Arc<Proof>),
    Trans(Arc<Proof>, Arc<Proof>),
    App(Arc<Proof>, Arc<Proof>),
    Rec([Arc<Proof>; 4]),
    EqIntro(Arc<Proof>),
    /// Binder congruence. `body` is a derivation in the context extended
    /// with `var :^annot domain`, over the bodies opened at `var`.
    Binder { prod: bool, annot: Annotation, var_sort: VarSort, var: Name, domain: Arc<Proof>, body: Arc<Proof> },
    /// Arithmetic deduction from proven premises.
    Ded { premises: Vec<Arc<Proof>>, aliens: Vec<AlienEntry>, witness: EntailmentWitness },
    /// Any two objects are convertible once `0 ≃ S 0` is derived.
    Collapse(Arc<Proof>),
}

impl Proof {
    pub fn refl(t: &Term) -> Arc<Proof> {
        Arc::new(Proof { lhs: t.clone(), rhs: t.clone(), rule: Rule::BetaIota { paths: Vec::new() } })
    }

    pub fn reduction(from: &Term, to: &Term, paths: Vec<Vec<u8>>) -> Arc<Proof> {
        Arc::new(Proof { lhs: from.clone(), rhs: to.clone(), rule: Rule::BetaIota { paths } })
    }

    pub fn is_refl(&self) -> bool {
        matches!(&self.rule, Rule::BetaIota { paths } if paths.is_empty())
    }

    pub fn sym(p: Arc<Proof>) -> Arc<Proof> {
        if p.is_refl() {
            return p;
        }
        if let Rule::Sym(q) = &p.rule {
            return q.clone();
        }
        Arc::new(Proof { lhs: p.rhs.clone(), rhs: p.lhs.clone(), rule: Rule::Sym(p) })
    }

    pub fn trans(p: Arc<Proof>, q: Arc<Proof>) -> Arc<Proof> {
        debug_assert_eq!(p.rhs, q.lhs);
        if p.is_refl() {
            return q;
        }
        if q.is_refl() {
            return p;
        }
        Arc::new(Proof { lhs: p.lhs.clone(), rhs: q.rhs.clone(), rule: Rule::Trans(p, q) })
    }

    /// Chain a non-empty sequence of derivations.
    pub fn chain(steps: impl IntoIterator<Item = Arc<Proof>>) -> Option<Arc<Proof>> {
        steps.into_iter().reduce(Proof::trans)
    }

    pub fn app(f: Arc<Proof>, a: Arc<Proof>) -> Arc<Proof> {
        if f.is_refl() && a.is_refl() {
            return Proof::refl(&Term::app(f.lhs.clone(), a.lhs.clone()));
        }
        Arc::new(Proof {
            lhs: Term::app(f.lhs.clone(), a.lhs.clone()),
            rhs: Term::app(f.rhs.clone(), a.rhs.clone()),
            rule: Rule::App(f, a),
        })
    }

    pub fn rec(parts: [Arc<Proof>; 4]) -> Arc<Proof> {
        let side = |l: bool| {
            let t: Vec<Term> = parts.iter().map(|p| if l { p.lhs.clone() } else { p.rhs.clone() }).collect();
            Term::rec(t[0].clone(), t[1].clone(), t[2].clone(), t[3].clone())
        };
        if parts.iter().all(|p| p.is_refl()) {
            return Proof::refl(&side(true));
        }
        Arc::new(Proof { lhs: side(true), rhs: side(false), rule: Rule::Rec(parts) })
    }

    pub fn eq_intro(p: Arc<Proof>) -> Arc<Proof> {
        if p.is_refl() {
            return Proof::refl(&Term::eq_intro(p.lhs.clone()));
        }
        Arc::new(Proof { lhs: Term::eq_intro(p.lhs.clone()), rhs: Term::eq_intro(p.rhs.clone()), rule: Rule::EqIntro(p) })
    }

    pub fn binder(
        prod: bool,
        annot: Annotation,
        var_sort: VarSort,
        var: Name,
        domain: Arc<Proof>,
        body: Arc<Proof>,
    ) -> Arc<Proof> {
        let build = |dom: &Term, b: &Term| {
            let binder = Binder {
                name: var.clone(),
                annot,
                var_sort,
                domain: dom.clone(),
                body: b.abstract_var(&var),
            };
            if prod {
                Term::prod(binder)
            } else {
                Term::lam(binder)
            }
        };
        let lhs = build(&domain.lhs, &body.lhs);
        let rhs = build(&domain.rhs, &body.rhs);
        if domain.is_refl() && body.is_refl() {
            return Proof::refl(&lhs);
        }
        Arc::new(Proof { lhs, rhs, rule: Rule::Binder { prod, annot, var_sort, var, domain, body } })
    }

    /// Number of distinct derivation nodes.
    pub fn size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        count(self, &mut seen)
    }
}

fn count(p: &Proof, seen: &mut std::collections::HashSet<*const Proof>) -> usize {
    if !seen.insert(p as *const Proof) {
        return 0;
    }
    1 + match &p.rule {
        Rule::BetaIota { .. } | Rule::Hyp { .. } => 0,
        Rule::Sym(q) | Rule::EqIntro(q) | Rule::Collapse(q) => count(q, seen),
        Rule::Trans(a, b) | Rule::App(a, b) => count(a, seen) + count(b, seen),
        Rule::Rec(ps) => ps.iter().map(|q| count(q, seen)).sum(),
        Rule::Binder { domain, body, .. } => count(domain, seen) + count(body, seen),
        Rule::Ded { premises, aliens, .. } => {
            premises.iter().map(|q| count(q, seen)).sum::<usize>()
                + aliens.iter().filter_map(|a| a.link.as_ref()).map(|q| count(q, seen)).sum::<usize>()
        }
    }
}
