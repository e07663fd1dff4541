//! Conversion certificates.
//!
//! A certificate is a flat list of steps, each justified locally from
//! earlier steps: a βι-reduction replayed contraction by contraction, a
//! context hypothesis re-exposed by a counted number of β-steps, a
//! congruence, or an arithmetic deduction replayed from its witness.
//!
//! [`verify`] depends only on terms, single-step reduction and witness
//! replay. It never runs the saturation engine or an arithmetic search.

mod emit;
mod text;
mod verify;

use crate::arith::EntailmentWitness;
use crate::term::{Annotation, Name, Term, VarSort};

pub use emit::emit;
pub use text::{context_fingerprint, parse, print, CertParseError};
pub use verify::{check, verify, VerifyError};

pub const FORMAT_HEADER: &str = "ccnat-cert v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    /// Fingerprint of the context the goal lives in.
    pub context: u64,
    pub lhs: Term,
    pub rhs: Term,
    /// Context extensions introduced under binders. Scope `0` is the
    /// context itself; scope `i + 1` is `scopes[i]`.
    pub scopes: Vec<Scope>,
    pub steps: Vec<Step>,
}

/// The parent scope extended with `var :^annot domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scope {
    pub parent: usize,
    pub var: Name,
    pub annot: Annotation,
    pub var_sort: VarSort,
    pub domain: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub scope: usize,
    pub kind: StepKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlienBinding {
    pub var: u32,
    pub term: Term,
    /// Step proving `term ≃` the first term bound to the same variable.
    pub link: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    BetaIota { from: Term, to: Term, paths: Vec<Vec<u8>> },
    /// Binding number `index` of the scope's context is `r`-annotated and
    /// its type reaches `lhs ≐ rhs` in exactly `beta_steps` head β-steps.
    Hyp { index: usize, lhs: Term, rhs: Term, beta_steps: u64 },
    Sym(usize),
    Trans(usize, usize),
    Congr(usize, usize),
    RecCongr([usize; 4]),
    EqCongr(usize),
    /// `body` lives in a child scope binding the variable that both
    /// binder bodies are opened at.
    Binder { prod: bool, domain: usize, body: usize },
    Arith { premises: Vec<usize>, aliens: Vec<AlienBinding>, lhs: Term, rhs: Term, witness: EntailmentWitness },
    /// `absurd` concludes `0 ≃ S 0`.
    Collapse { absurd: usize, lhs: Term, rhs: Term },
}

#[cfg(test)]
mod tests;
