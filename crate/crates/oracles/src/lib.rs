//! Reference procedures for differential testing. Everything here favours
//! obviousness over speed and shares no decision logic with the kernel.

pub mod arith;
pub mod conversion;
pub mod differential;
pub mod tamper;
pub mod corpus;
