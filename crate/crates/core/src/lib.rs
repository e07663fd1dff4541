//! Proof-checking kernel for the calculus of constructions with natural
//! numbers, whose conversion rule folds in congruence closure and linear
//! arithmetic over ℕ using equalities taken from the typing context.

pub mod arith;
pub mod cert;
pub mod congruence;
pub mod reduce;
pub mod script;
pub mod syntax;
pub mod term;
pub mod typecheck;
