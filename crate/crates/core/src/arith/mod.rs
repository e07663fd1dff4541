//! Linear arithmetic over ℕ: algebraic caps, an entailment decision
//! procedure, and independently checkable witnesses.

pub mod poly;
pub mod solve;
pub mod witness;

pub use poly::{cap, is_algebraic, Atom, LinEq, LinPoly};
pub use solve::{entails, solve, ArithError, Entailment, Limits, Model, Search};
pub use witness::{check_entailment, check_refutation, ArithWitness, Combination, EntailmentWitness};
