//! Conversion `t ≃_Γ u`: βι-conversion extended by the object equalities
//! the context assumes (through `r`-annotated bindings), closed under
//! congruence and under linear arithmetic over ℕ.
//!
//! [`Conversion`] keeps one saturation state per set of hypotheses, so
//! repeated queries in the same context reuse earlier work.

pub mod proof;
mod state;
mod weak;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::Limits;
use crate::reduce::{beta_reduce_to_equality, normalize_traced, Status, DEFAULT_FUEL};
use crate::term::{Annotation, Context, Name, Term};

pub use proof::{AlienEntry, Proof, Rule};
pub use state::Consistency;
pub use weak::weak_convertible;

use state::State;

/// An object equality assumed by an `r`-binding whose type weak-head
/// β-reduces, in `beta_steps` steps, to `lhs ≐ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    pub name: Name,
    pub lhs: Term,
    pub rhs: Term,
    pub beta_steps: u64,
}

pub fn extract_hypotheses(ctx: &Context, fuel: u64) -> Vec<Hypothesis> {
    ctx.bindings()
        .iter()
        .filter(|b| b.annot == Annotation::R)
        .filter_map(|b| {
            let ex = beta_reduce_to_equality(&b.ty, fuel)?;
            Some(Hypothesis { name: b.name.clone(), lhs: ex.lhs, rhs: ex.rhs, beta_steps: ex.beta_steps })
        })
        .collect()
}

/// Why two classes were merged.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Hypothesis,
    Congruence,
    Reduction,
    Binder,
    Arithmetic,
    /// The hypotheses are arithmetically inconsistent.
    Collapse,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Hypothesis => "hyp",
            Origin::Congruence => "congr",
            Origin::Reduction => "beta-iota",
            Origin::Binder => "binder",
            Origin::Arithmetic => "arith",
            Origin::Collapse => "collapse",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvError {
    #[error("normalization ran out of fuel after {0} steps")]
    Fuel(u64),
    #[error("congruence closure exceeded {0} terms")]
    Universe(usize),
    #[error("term has loose bound variables")]
    NotClosed,
}

#[derive(Clone, Debug)]
pub struct ConvJudgment {
    pub convertible: bool,
    /// Present when a derivation was requested and the terms are convertible.
    pub proof: Option<Arc<Proof>>,
    /// Arithmetic queries that hit a resource limit; a negative answer may
    /// be incomplete when this is non-empty.
    pub diagnostics: Vec<String>,
}

pub struct Conversion {
    pub fuel: u64,
    pub arith: Limits,
    pub max_universe: usize,
    states: HashMap<Vec<Hypothesis>, State>,
    busy: HashSet<Vec<Hypothesis>>,
    fresh: u64,
}

impl Default for Conversion {
    fn default() -> Self {
        Conversion::new(DEFAULT_FUEL)
    }
}

const MAX_CACHED_STATES: usize = 512;

impl Conversion {
    pub fn new(fuel: u64) -> Conversion {
        Conversion {
            fuel,
            arith: Limits::default(),
            max_universe: 50_000,
            states: HashMap::new(),
            busy: HashSet::new(),
            fresh: 0,
        }
    }

    pub(crate) fn normal_form(&self, t: &Term) -> Result<(Term, Vec<Vec<u8>>), ConvError> {
        let (r, paths) = normalize_traced(t, self.fuel);
        match r.status {
            Status::NormalForm => Ok((r.term, paths)),
            Status::FuelExhausted => Err(ConvError::Fuel(r.steps)),
        }
    }

    /// A name no user binding can have: `#` is not an identifier character.
    pub(crate) fn fresh_var(&mut self, hint: &str) -> Name {
        self.fresh += 1;
        let base = hint.split('#').next().filter(|b| !b.is_empty()).unwrap_or("x");
        crate::term::name(&format!("{base}#{}", self.fresh))
    }

    /// Hypotheses after binding `var :^annot domain`, or `None` when the
    /// binding adds none.
    pub(crate) fn extended_hyps(
        &self,
        hyps: &[Hypothesis],
        var: &Name,
        annot: Annotation,
        domain: &Term,
    ) -> Option<Vec<Hypothesis>> {
        if annot != Annotation::R {
            return None;
        }
        let ex = beta_reduce_to_equality(domain, self.fuel)?;
        let mut out = hyps.to_vec();
        out.push(Hypothesis { name: var.clone(), lhs: ex.lhs, rhs: ex.rhs, beta_steps: ex.beta_steps });
        Some(out)
    }

    fn with_state<R>(
        &mut self,
        hyps: &[Hypothesis],
        f: impl FnOnce(&mut State, &mut Conversion) -> Result<R, ConvError>,
    ) -> Result<R, ConvError> {
        let key = hyps.to_vec();
        assert!(!self.busy.contains(&key), "saturation state re-entered");
        let mut st = match self.states.remove(&key) {
            Some(st) => st,
            None => State::new(key.clone(), self)?,
        };
        self.busy.insert(key.clone());
        let r = f(&mut st, self);
        self.busy.remove(&key);
        // A failed saturation may leave pending work behind; drop it.
        if r.is_ok() {
            if self.states.len() >= MAX_CACHED_STATES && self.busy.is_empty() {
                self.states.clear();
            }
            self.states.insert(key, st);
        }
        r
    }

    pub(crate) fn decide_with(&mut self, hyps: &[Hypothesis], t: &Term, u: &Term) -> Result<bool, ConvError> {
        self.with_state(hyps, |st, eng| st.decide(eng, t, u))
    }

    pub(crate) fn prove_with(
        &mut self,
        hyps: &[Hypothesis],
        t: &Term,
        u: &Term,
    ) -> Result<Option<Arc<Proof>>, ConvError> {
        self.with_state(hyps, |st, eng| st.prove(eng, t, u))
    }

    /// Decide `t ≃_Γ u` for locally closed terms.
    pub fn convertible(&mut self, ctx: &Context, t: &Term, u: &Term) -> Result<bool, ConvError> {
        Ok(self.judge(ctx, t, u, false)?.convertible)
    }

    /// Decide `t ≃_Γ u`, optionally with a derivation.
    pub fn judge(&mut self, ctx: &Context, t: &Term, u: &Term, want_proof: bool) -> Result<ConvJudgment, ConvError> {
        if !t.is_locally_closed() || !u.is_locally_closed() {
            return Err(ConvError::NotClosed);
        }
        if t == u {
            let proof = want_proof.then(|| Proof::refl(t));
            return Ok(ConvJudgment { convertible: true, proof, diagnostics: Vec::new() });
        }
        let (nt, pt) = self.normal_form(t)?;
        let (nu, pu) = self.normal_form(u)?;
        if nt == nu {
            let proof = want_proof.then(|| {
                Proof::trans(Proof::reduction(t, &nt, pt), Proof::sym(Proof::reduction(u, &nu, pu)))
            });
            return Ok(ConvJudgment { convertible: true, proof, diagnostics: Vec::new() });
        }
        let hyps = extract_hypotheses(ctx, self.fuel);
        self.with_state(&hyps, |st, eng| {
            let proof = if want_proof { st.prove(eng, t, u)? } else { None };
            let convertible = proof.is_some() || (!want_proof && st.decide(eng, t, u)?);
            let diagnostics = std::mem::take(&mut st.diagnostics);
            Ok(ConvJudgment { convertible, proof, diagnostics })
        })
    }

    /// Whether the context's hypotheses are arithmetically consistent,
    /// that is whether `0 ≄_Γ S 0`.
    pub fn consistency(&mut self, ctx: &Context) -> Result<Consistency, ConvError> {
        let hyps = extract_hypotheses(ctx, self.fuel);
        self.with_state(&hyps, |st, eng| {
            st.decide(eng, &Term::zero(), &Term::numeral(1))?;
            Ok(st.consistency)
        })
    }

    /// Merges performed so far in the state for `ctx`, in order.
    pub fn trace(&mut self, ctx: &Context) -> Result<Vec<(Origin, Term, Term)>, ConvError> {
        let hyps = extract_hypotheses(ctx, self.fuel);
        self.with_state(&hyps, |st, _| Ok(st.trace().map(|(o, a, b)| (o, a.clone(), b.clone())).collect()))
    }
}
